//! Rule-space sweeps, list verification, and symmetry normalization.
//!
//! A sweep classifies every rule drawn from a source (a contiguous number
//! range, an explicit list, or a seeded uniform sample) and tallies the
//! results; shards split one sweep into disjoint contiguous slices so
//! independent processes can divide the space. [`verify_list`] re-checks a
//! published list of allegedly surjective rules and flags discrepancies
//! instead of dropping them. [`canonicalize`] reduces a table to the
//! lexicographically least member of its orbit under window reflection and
//! simultaneous symbol permutation, both of which preserve the
//! surjective/open/injective classification.

use std::time::Instant;

use itertools::Itertools;
use num_bigint::{BigUint, RandBigInt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automata::{classify, CaClass};
use crate::error::{Error, Result};
use crate::rule::{RuleTable, Symbol};

// ── Sweep specification ───────────────────────────────────────────────────────

/// Where the rule numbers of a sweep come from.
#[derive(Debug, Clone)]
pub enum SweepSource {
    /// Inclusive range `start..=end`; `start > end` is the empty range.
    Range { start: u128, end: u128 },
    /// Explicit rule numbers; scanned in ascending numeric order.
    List(Vec<BigUint>),
    /// `count` rules drawn uniformly with a recorded seed, scanned in
    /// ascending order (duplicates kept so the tally matches `count`).
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub alphabet: u8,
    pub span: usize,
    pub source: SweepSource,
    /// This process covers contiguous slice `shard_index` of `shard_total`.
    pub shard_index: u32,
    pub shard_total: u32,
}

/// Tally of one sweep shard.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyResult {
    pub shard_index: u32,
    pub shard_total: u32,
    /// Rules classified in this shard; the per-class counts sum to this.
    pub scanned: u64,
    /// Rules per class, indexed by class number 0..=3.
    pub counts: [u64; 4],
    /// Rule numbers with class at least 1, in scan order.
    pub surjective: Vec<BigUint>,
    pub seconds: f64,
}

fn shard_slice(len: u128, index: u32, total: u32) -> Result<(u128, u128)> {
    if total == 0 || index >= total {
        return Err(Error::ShardSpec { index, total });
    }
    let total = total as u128;
    let index = index as u128;
    let chunk = len / total;
    let rem = len % total;
    let offset = index * chunk + index.min(rem);
    let size = chunk + u128::from(index < rem);
    Ok((offset, size))
}

/// Classify every rule in the shard, in ascending rule-number order.
///
/// `on_rule` observes each (rule number, class) pair as it is produced;
/// the returned tally aggregates the same stream. Classification applies
/// the balance filter first (a cheap necessary condition for surjectivity),
/// which is what makes full span-4 sweeps practical.
pub fn sweep<F>(spec: &SweepSpec, mut on_rule: F) -> Result<SurveyResult>
where
    F: FnMut(&BigUint, CaClass),
{
    let bound = BigUint::from(spec.alphabet).pow(crate::rule::table_len(
        spec.alphabet,
        spec.span,
    )? as u32);
    let start_time = Instant::now();
    let mut counts = [0u64; 4];
    let mut surjective = Vec::new();
    let mut scanned = 0u64;

    let mut visit = |number: &BigUint,
                     table: RuleTable,
                     counts: &mut [u64; 4],
                     surjective: &mut Vec<BigUint>| {
        let class = classify(&table);
        counts[class.as_u8() as usize] += 1;
        if class.is_surjective() {
            surjective.push(number.clone());
        }
        on_rule(number, class);
    };

    match &spec.source {
        SweepSource::Range { start, end } => {
            if start <= end {
                let end_big = BigUint::from(*end);
                if end_big >= bound {
                    return Err(Error::SweepRange {
                        start: start.to_string(),
                        end: end.to_string(),
                        bound: bound.to_string(),
                    });
                }
                let len = (end - start).checked_add(1).ok_or(Error::SweepRange {
                    start: start.to_string(),
                    end: end.to_string(),
                    bound: bound.to_string(),
                })?;
                let (offset, size) = shard_slice(len, spec.shard_index, spec.shard_total)?;
                let lo = start + offset;
                for r in lo..lo + size {
                    let number = BigUint::from(r);
                    let table = RuleTable::from_rule_u128(r, spec.alphabet, spec.span)?;
                    visit(&number, table, &mut counts, &mut surjective);
                    scanned += 1;
                }
            } else {
                // Empty range: still validate the shard spec.
                shard_slice(0, spec.shard_index, spec.shard_total)?;
            }
        }
        SweepSource::List(numbers) => {
            let mut sorted = numbers.clone();
            sorted.sort();
            for n in &sorted {
                if *n >= bound {
                    return Err(Error::SweepRange {
                        start: n.to_string(),
                        end: n.to_string(),
                        bound: bound.to_string(),
                    });
                }
            }
            let (offset, size) =
                shard_slice(sorted.len() as u128, spec.shard_index, spec.shard_total)?;
            for n in sorted.iter().skip(offset as usize).take(size as usize) {
                let table = RuleTable::from_rule_number(n, spec.alphabet, spec.span)?;
                visit(n, table, &mut counts, &mut surjective);
                scanned += 1;
            }
        }
        SweepSource::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut drawn: Vec<BigUint> = (0..*count)
                .map(|_| rng.gen_biguint_below(&bound))
                .collect();
            drawn.sort();
            let (offset, size) =
                shard_slice(drawn.len() as u128, spec.shard_index, spec.shard_total)?;
            for n in drawn.iter().skip(offset as usize).take(size as usize) {
                let table = RuleTable::from_rule_number(n, spec.alphabet, spec.span)?;
                visit(n, table, &mut counts, &mut surjective);
                scanned += 1;
            }
        }
    }

    Ok(SurveyResult {
        shard_index: spec.shard_index,
        shard_total: spec.shard_total,
        scanned,
        counts,
        surjective,
        seconds: start_time.elapsed().as_secs_f64(),
    })
}

// ── List verification ─────────────────────────────────────────────────────────

/// Outcome of re-checking one rule from a published list.
#[derive(Debug, Clone, PartialEq)]
pub struct ListVerdict {
    /// Decimal rule number as given.
    pub rule: String,
    /// Classification, absent when the number itself was rejected.
    pub class: Option<CaClass>,
    /// Parse/validation failure, recorded instead of dropping the entry.
    pub error: Option<String>,
    /// Whether the entry met the expectation (surjective or better).
    pub pass: bool,
}

/// Classify every listed rule and compare against the expectation that each
/// is surjective. Invalid entries produce a per-item error verdict and the
/// remaining entries are still checked.
pub fn verify_list(rules: &[BigUint], alphabet: u8, span: usize) -> Vec<ListVerdict> {
    rules
        .iter()
        .map(|n| match RuleTable::from_rule_number(n, alphabet, span) {
            Ok(table) => {
                let class = classify(&table);
                ListVerdict {
                    rule: n.to_string(),
                    class: Some(class),
                    error: None,
                    pass: class.is_surjective(),
                }
            }
            Err(e) => ListVerdict {
                rule: n.to_string(),
                class: None,
                error: Some(e.to_string()),
                pass: false,
            },
        })
        .collect()
}

// ── Symmetry normalization ────────────────────────────────────────────────────

/// Lexicographically least table in the orbit of `t` under window
/// reflection and simultaneous symbol permutation of inputs and outputs.
///
/// Both generators commute with the shift action up to direction reversal,
/// so every orbit member shares `t`'s classification; `canonicalize` is
/// idempotent and constant on orbits.
pub fn canonicalize(t: &RuleTable) -> RuleTable {
    let n = t.alphabet() as usize;
    let s = t.span();
    let len = t.entries().len();
    let mut digits = vec![0usize; s];
    let mut best: Option<Vec<Symbol>> = None;
    for perm in (0..n).permutations(n) {
        let mut inv = vec![0usize; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        for reflect in [false, true] {
            let mut table = vec![0 as Symbol; len];
            for (w, slot) in table.iter_mut().enumerate() {
                let mut v = w;
                for pos in (0..s).rev() {
                    digits[pos] = v % n;
                    v /= n;
                }
                let mut src = 0usize;
                if reflect {
                    for j in (0..s).rev() {
                        src = src * n + inv[digits[j]];
                    }
                } else {
                    for j in 0..s {
                        src = src * n + inv[digits[j]];
                    }
                }
                *slot = perm[t.output(src) as usize] as Symbol;
            }
            if best.as_ref().is_none_or(|b| table < *b) {
                best = Some(table);
            }
        }
    }
    RuleTable::new(t.alphabet(), s, best.expect("orbit is nonempty"))
        .expect("orbit members are valid tables")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span3(rule: u128) -> RuleTable {
        RuleTable::from_rule_u128(rule, 2, 3).unwrap()
    }

    fn full_span3_spec() -> SweepSpec {
        SweepSpec {
            alphabet: 2,
            span: 3,
            source: SweepSource::Range { start: 0, end: 255 },
            shard_index: 0,
            shard_total: 1,
        }
    }

    #[test]
    fn full_span3_sweep_finds_the_surjective_rules() {
        let result = sweep(&full_span3_spec(), |_, _| {}).unwrap();
        assert_eq!(result.scanned, 256);
        assert_eq!(result.counts.iter().sum::<u64>(), 256);
        // 30 of the 256 span-3 binary rules are surjective; frozen from the
        // exhaustive run and cross-checked by the subset-construction oracle
        // in the acceptance suite.
        assert_eq!(result.surjective.len(), 30);
        let listed: Vec<u128> = result
            .surjective
            .iter()
            .map(|n| n.try_into().unwrap())
            .collect();
        for present in [170u128, 204, 90, 30, 15, 51] {
            assert!(listed.contains(&present), "rule {present} missing");
        }
        for absent in [110u128, 116, 0, 255] {
            assert!(!listed.contains(&absent), "rule {absent} wrongly listed");
        }
    }

    #[test]
    fn sweep_reports_every_rule_in_order() {
        let mut seen: Vec<(BigUint, CaClass)> = Vec::new();
        let spec = SweepSpec {
            alphabet: 2,
            span: 3,
            source: SweepSource::Range { start: 10, end: 16 },
            shard_index: 0,
            shard_total: 1,
        };
        let result = sweep(&spec, |n, c| seen.push((n.clone(), c))).unwrap();
        assert_eq!(result.scanned, 7);
        let numbers: Vec<u32> = seen.iter().map(|(n, _)| n.try_into().unwrap()).collect();
        assert_eq!(numbers, vec![10, 11, 12, 13, 14, 15, 16]);
        assert_eq!(seen[5].1, CaClass::Injective); // rule 15
    }

    #[test]
    fn shards_concatenate_to_the_unsharded_sweep() {
        let whole = sweep(&full_span3_spec(), |_, _| {}).unwrap();
        let mut merged: Vec<BigUint> = Vec::new();
        let mut scanned = 0u64;
        let mut counts = [0u64; 4];
        for index in 0..3 {
            let spec = SweepSpec {
                shard_index: index,
                shard_total: 3,
                ..full_span3_spec()
            };
            let part = sweep(&spec, |_, _| {}).unwrap();
            scanned += part.scanned;
            for (acc, c) in counts.iter_mut().zip(part.counts) {
                *acc += c;
            }
            merged.extend(part.surjective);
        }
        assert_eq!(scanned, whole.scanned);
        assert_eq!(counts, whole.counts);
        assert_eq!(merged, whole.surjective);
    }

    #[test]
    fn empty_sources_scan_nothing() {
        let empty_range = SweepSpec {
            source: SweepSource::Range { start: 9, end: 8 },
            ..full_span3_spec()
        };
        assert_eq!(sweep(&empty_range, |_, _| {}).unwrap().scanned, 0);
        let empty_list = SweepSpec {
            source: SweepSource::List(Vec::new()),
            ..full_span3_spec()
        };
        assert_eq!(sweep(&empty_list, |_, _| {}).unwrap().scanned, 0);
    }

    #[test]
    fn sweep_validates_range_and_shards() {
        let too_big = SweepSpec {
            source: SweepSource::Range { start: 0, end: 256 },
            ..full_span3_spec()
        };
        assert!(matches!(
            sweep(&too_big, |_, _| {}),
            Err(Error::SweepRange { .. })
        ));
        let bad_shard = SweepSpec {
            shard_index: 3,
            shard_total: 3,
            ..full_span3_spec()
        };
        assert!(matches!(
            sweep(&bad_shard, |_, _| {}),
            Err(Error::ShardSpec { index: 3, total: 3 })
        ));
    }

    #[test]
    fn samples_are_deterministic_per_seed() {
        let spec = SweepSpec {
            alphabet: 2,
            span: 4,
            source: SweepSource::Sample {
                count: 40,
                seed: 7,
            },
            shard_index: 0,
            shard_total: 1,
        };
        let a = sweep(&spec, |_, _| {}).unwrap();
        let b = sweep(&spec, |_, _| {}).unwrap();
        assert_eq!(a.scanned, 40);
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.surjective, b.surjective);
    }

    #[test]
    fn verify_list_flags_discrepancies_and_bad_numbers() {
        let rules = vec![
            BigUint::from(240u32), // leftmost-cell rule: injective
            BigUint::from(0u32),   // constant: not surjective
            BigUint::from(300u32), // out of range for span 3
        ];
        let verdicts = verify_list(&rules, 2, 3);
        assert_eq!(verdicts.len(), 3);
        assert_eq!(verdicts[0].class, Some(CaClass::Injective));
        assert!(verdicts[0].pass);
        assert_eq!(verdicts[1].class, Some(CaClass::None));
        assert!(!verdicts[1].pass);
        assert_eq!(verdicts[2].class, None);
        assert!(verdicts[2].error.is_some());
        assert!(!verdicts[2].pass);
    }

    #[test]
    fn canonicalize_is_idempotent_on_every_span3_rule() {
        for rule in 0u128..256 {
            let canon = canonicalize(&span3(rule));
            let again = canonicalize(&canon);
            assert_eq!(canon.entries(), again.entries(), "rule {rule}");
        }
    }

    #[test]
    fn canonical_forms_match_hand_checked_orbits() {
        // Reflection-symmetric rule stays put.
        assert_eq!(canonicalize(&span3(90)).entries(), span3(90).entries());
        // The leftmost-cell rule is the least member of its orbit; the
        // rightmost-cell rule reflects onto it.
        assert_eq!(canonicalize(&span3(240)).entries(), span3(240).entries());
        assert_eq!(canonicalize(&span3(170)).entries(), span3(240).entries());
        // Constant 0 beats constant 1.
        assert_eq!(canonicalize(&span3(0)).entries(), span3(0).entries());
        assert_eq!(canonicalize(&span3(255)).entries(), span3(0).entries());
    }

    #[test]
    fn canonicalize_is_constant_on_orbit_samples() {
        // Complement conjugation of rule 30 and its reflection must land on
        // the same canonical table as rule 30 itself.
        let base = canonicalize(&span3(30));
        let complement: Vec<Symbol> = (0..8usize)
            .map(|w| 1 - span3(30).output(7 - w))
            .collect();
        let conj = RuleTable::new(2, 3, complement).unwrap();
        assert_eq!(canonicalize(&conj).entries(), base.entries());
    }
}
