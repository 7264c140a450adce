//! Jointly periodic points, m-density, and the per-period growth statistic.
//!
//! A length-`k` circular word stands for a spatially k-periodic configuration;
//! the rule restricted to those words is a function on a finite set, so a
//! point is also temporally periodic iff it lies on a cycle of that function.
//! The cyclic nodes are found by in-degree peeling: repeatedly strip nodes
//! with no remaining preimage and whatever survives is exactly the set of
//! jointly periodic points. Density then asks whether every length-`m` word
//! occurs (cyclically) inside some survivor, and `v_k = P^(1/k)` measures the
//! growth of the survivor count `P`.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::rule::{CircularWord, RuleTable, Symbol};

/// Default memory-budget exponent: at most `2^26` circular words per period.
pub const DEFAULT_BUDGET_LOG2: u32 = 26;

/// Number of missing words quoted verbatim in a wire record.
const MISSING_SAMPLE_CAP: usize = 8;

/// Materialized successor tables index with `u32`.
const MATERIALIZE_CAP: u64 = 1 << 31;

/// Budget exponent → node budget, saturating at `u64::MAX`.
pub fn budget_nodes(log2: u32) -> u64 {
    if log2 >= 63 {
        u64::MAX
    } else {
        1u64 << log2
    }
}

// ── Configuration space ───────────────────────────────────────────────────────

/// The `N^k` circular words of length `k`, addressed by packed index
/// (leftmost cell most significant, matching [`CircularWord::pack`]).
#[derive(Clone, Copy, Debug)]
pub struct ConfigSpace {
    alphabet: u8,
    k: usize,
    size: u64,
}

impl ConfigSpace {
    /// Fails with a capacity error when `N^k` exceeds the node budget.
    pub fn new(alphabet: u8, k: usize, budget: u64) -> Result<Self> {
        assert!(k >= 1, "period k must be at least 1");
        let size = (alphabet as u128)
            .checked_pow(k as u32)
            .ok_or(Error::Capacity {
                size: u128::MAX,
                budget,
            })?;
        if size > budget as u128 {
            return Err(Error::Capacity { size, budget });
        }
        Ok(ConfigSpace {
            alphabet,
            k,
            size: size as u64,
        })
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn index_of(&self, w: &CircularWord) -> Result<u64> {
        debug_assert_eq!(w.len(), self.k);
        w.pack(self.alphabet)
    }

    pub fn word_at(&self, index: u64) -> CircularWord {
        CircularWord::unpack(index, self.alphabet, self.k).expect("k >= 1 by construction")
    }
}

/// Image of the packed word `idx` under one application of the rule, using
/// the same wrap-around window arithmetic as [`RuleTable::evolve_circular`].
fn successor_packed(
    t: &RuleTable,
    k: usize,
    idx: u64,
    digits: &mut [Symbol],
    out: &mut [Symbol],
) -> u64 {
    let n = t.alphabet() as u64;
    let mut v = idx;
    for pos in (0..k).rev() {
        digits[pos] = (v % n) as Symbol;
        v /= n;
    }
    let nn = t.alphabet() as usize;
    let states = t.state_count();
    let mut w = 0usize;
    for j in 0..t.span() - 1 {
        w = w * nn + digits[j % k] as usize;
    }
    for i in 0..k {
        let tail = digits[(i + t.span() - 1) % k] as usize;
        let full = (w % states) * nn + tail;
        out[i] = t.output(full);
        w = full % states;
    }
    let mut packed = 0u64;
    for &s in out.iter() {
        packed = packed * n + s as u64;
    }
    packed
}

fn materialize_successors(t: &RuleTable, space: &ConfigSpace) -> Result<Vec<u32>> {
    if space.size() > MATERIALIZE_CAP {
        return Err(Error::Capacity {
            size: space.size() as u128,
            budget: MATERIALIZE_CAP,
        });
    }
    let k = space.k();
    let mut digits = vec![0 as Symbol; k];
    let mut out = vec![0 as Symbol; k];
    let mut succ = vec![0u32; space.size() as usize];
    for (x, slot) in succ.iter_mut().enumerate() {
        *slot = successor_packed(t, k, x as u64, &mut digits, &mut out) as u32;
    }
    Ok(succ)
}

// ── Successor map ─────────────────────────────────────────────────────────────

/// Whether an [`OrbitMap`] caches all successors or recomputes per query.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrbitMode {
    Materialized,
    Recomputed,
}

/// The successor function `index ↦ index of the image word`.
pub struct OrbitMap<'a> {
    rule: &'a RuleTable,
    space: ConfigSpace,
    table: Option<Vec<u32>>,
}

impl<'a> OrbitMap<'a> {
    pub fn build(rule: &'a RuleTable, space: ConfigSpace, mode: OrbitMode) -> Result<Self> {
        let table = match mode {
            OrbitMode::Materialized => Some(materialize_successors(rule, &space)?),
            OrbitMode::Recomputed => None,
        };
        Ok(OrbitMap { rule, space, table })
    }

    pub fn space(&self) -> &ConfigSpace {
        &self.space
    }

    pub fn successor(&self, index: u64) -> u64 {
        match &self.table {
            Some(table) => table[index as usize] as u64,
            None => {
                let k = self.space.k();
                let mut digits = vec![0 as Symbol; k];
                let mut out = vec![0 as Symbol; k];
                successor_packed(self.rule, k, index, &mut digits, &mut out)
            }
        }
    }
}

// ── Jointly periodic points ───────────────────────────────────────────────────

/// One peel pass with counters of type `T`; `None` signals counter overflow
/// so the caller can retry with a wider type.
fn peel<T>(succ: &[u32]) -> Option<BitSet>
where
    T: Copy
        + PartialEq
        + num_traits::Zero
        + num_traits::One
        + num_traits::CheckedAdd
        + std::ops::Sub<Output = T>,
{
    let mut indeg = vec![T::zero(); succ.len()];
    for &w in succ {
        let slot = &mut indeg[w as usize];
        *slot = slot.checked_add(&T::one())?;
    }
    let mut stack: Vec<u32> = Vec::new();
    for (v, c) in indeg.iter().enumerate() {
        if *c == T::zero() {
            stack.push(v as u32);
        }
    }
    while let Some(v) = stack.pop() {
        let w = succ[v as usize] as usize;
        let next = indeg[w] - T::one();
        indeg[w] = next;
        if next == T::zero() {
            stack.push(w as u32);
        }
    }
    let mut cyclic = BitSet::new(succ.len());
    for (v, c) in indeg.iter().enumerate() {
        if *c != T::zero() {
            cyclic.insert(v);
        }
    }
    Some(cyclic)
}

/// Set of packed indices lying on a cycle of the successor function — the
/// spatially k-periodic points that are also temporally periodic.
///
/// In-degree counters start at 16 bits and widen to 32 on overflow (a
/// near-constant rule can funnel all `N^k` preimages into one node).
pub fn jointly_periodic_set(t: &RuleTable, k: usize, budget: u64) -> Result<BitSet> {
    let space = ConfigSpace::new(t.alphabet(), k, budget)?;
    let succ = materialize_successors(t, &space)?;
    if let Some(set) = peel::<u16>(&succ) {
        return Ok(set);
    }
    Ok(peel::<u32>(&succ).expect("32-bit in-degree counters cannot overflow below the node cap"))
}

// ── Density and growth reports ────────────────────────────────────────────────

/// Full density verdict for one `(k, m)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    /// Rule number in decimal.
    pub rule: String,
    pub alphabet: u8,
    pub span: usize,
    pub k: usize,
    pub m: usize,
    /// Number of jointly periodic points (`P`).
    pub count: u64,
    /// `P^(1/k)`, exact when `P` is a perfect k-th power of a symbol count.
    pub v_k: f64,
    pub dense: bool,
    /// Packed m-words missing from every jointly periodic point, ascending;
    /// empty iff dense.
    pub missing: Vec<u64>,
    pub seconds: f64,
}

impl DensityReport {
    /// Wire form: missing words summarized as a count plus a short sample.
    pub fn to_record(&self) -> DensityRecord {
        DensityRecord {
            rule: self.rule.clone(),
            alphabet: self.alphabet,
            span: self.span,
            k: self.k,
            m: self.m,
            count: self.count,
            v_k: self.v_k,
            dense: self.dense,
            missing_count: self.missing.len() as u64,
            missing_sample: self
                .missing
                .iter()
                .take(MISSING_SAMPLE_CAP)
                .map(|&w| {
                    CircularWord::unpack(w, self.alphabet, self.m)
                        .expect("m >= 1")
                        .to_display()
                })
                .collect(),
            seconds: self.seconds,
        }
    }
}

/// JSON-line form of a [`DensityReport`]; also the checkpoint record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub rule: String,
    #[serde(rename = "N")]
    pub alphabet: u8,
    pub span: usize,
    pub k: usize,
    pub m: usize,
    #[serde(rename = "P")]
    pub count: u64,
    pub v_k: f64,
    pub dense: bool,
    pub missing_count: u64,
    pub missing_sample: Vec<String>,
    pub seconds: f64,
}

/// `count^(1/k)` with an exact answer whenever `count` is a perfect k-th
/// power with root at most the alphabet size (so the identity and shift
/// report exactly `N`, not a value one floating-point ulp off).
pub fn vk_value(count: u64, k: usize, alphabet: u8) -> f64 {
    if count == 0 {
        return 0.0;
    }
    if count == 1 {
        return 1.0;
    }
    for root in 2..=alphabet as u64 {
        match root.checked_pow(k as u32) {
            Some(p) if p == count => return root as f64,
            Some(p) if p > count => break,
            Some(_) => {}
            None => break,
        }
    }
    (count as f64).powf(1.0 / k as f64)
}

/// Density verdict for the survivors in `set` (as produced by
/// [`jointly_periodic_set`] for the same rule and `k`). The `seconds` field
/// covers only the marking phase.
pub fn density_from_set(
    t: &RuleTable,
    k: usize,
    m: usize,
    set: &BitSet,
    rule_id: &str,
) -> Result<DensityReport> {
    if m < 1 || m > k {
        return Err(Error::DensityRange { m, k });
    }
    let start = Instant::now();
    let n = t.alphabet() as u64;
    let m_size = n.pow(m as u32);
    let mut present = BitSet::new(m_size as usize);
    let mut digits = vec![0 as Symbol; k];
    for x in set.iter_ones() {
        let mut v = x as u64;
        for pos in (0..k).rev() {
            digits[pos] = (v % n) as Symbol;
            v /= n;
        }
        for i in 0..k {
            let mut w = 0u64;
            for j in 0..m {
                w = w * n + digits[(i + j) % k] as u64;
            }
            present.insert(w as usize);
        }
    }
    let missing: Vec<u64> = (0..m_size).filter(|&w| !present.contains(w as usize)).collect();
    let count = set.count();
    Ok(DensityReport {
        rule: rule_id.to_string(),
        alphabet: t.alphabet(),
        span: t.span(),
        k,
        m,
        count,
        v_k: vk_value(count, k, t.alphabet()),
        dense: missing.is_empty(),
        missing,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Compute the jointly periodic set for period `k` and report m-density.
pub fn is_m_dense(t: &RuleTable, k: usize, m: usize, budget: u64) -> Result<DensityReport> {
    if m < 1 || m > k {
        return Err(Error::DensityRange { m, k });
    }
    let start = Instant::now();
    let set = jointly_periodic_set(t, k, budget)?;
    let peel_seconds = start.elapsed().as_secs_f64();
    let mut report = density_from_set(t, k, m, &set, &t.rule_number().to_string())?;
    report.seconds += peel_seconds;
    Ok(report)
}

/// One `(k, P, v_k)` row of [`v_statistic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VkEntry {
    pub k: usize,
    pub count: u64,
    pub v_k: f64,
}

/// Per-period survivor counts and `v_k` values; a capacity failure on one
/// period is reported in place and does not stop the others.
pub fn v_statistic(
    t: &RuleTable,
    k_values: &[usize],
    budget: u64,
) -> Vec<(usize, Result<VkEntry>)> {
    let mut ks: Vec<usize> = k_values.iter().copied().filter(|&k| k >= 1).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| {
            let entry = jointly_periodic_set(t, k, budget).map(|set| {
                let count = set.count();
                VkEntry {
                    k,
                    count,
                    v_k: vk_value(count, k, t.alphabet()),
                }
            });
            (k, entry)
        })
        .collect()
}

// ── Checkpointing ─────────────────────────────────────────────────────────────

type CheckpointKey = (String, u8, usize, usize, usize); // rule, N, span, m, k

fn key_of(r: &DensityRecord) -> CheckpointKey {
    (r.rule.clone(), r.alphabet, r.span, r.m, r.k)
}

/// Append-only JSON-lines store of completed density records, fsync'd per
/// record. A checkpoint that cannot be parsed is discarded with a warning —
/// results are recomputed, never silently trusted.
pub struct Checkpoint {
    file: File,
    done: HashMap<CheckpointKey, DensityRecord>,
}

impl Checkpoint {
    /// Opens (or creates) the checkpoint; the second component carries a
    /// human-readable warning when previous content had to be discarded.
    pub fn open(path: &Path) -> Result<(Self, Option<String>)> {
        let mut warning = None;
        let mut done = HashMap::new();
        let mut corrupt = false;
        match std::fs::read_to_string(path) {
            Ok(text) => {
                let mut records = Vec::new();
                for line in text.lines() {
                    let line = line.trim();
                    if line.is_empty() {
                        continue;
                    }
                    match serde_json::from_str::<DensityRecord>(line) {
                        Ok(r) => records.push(r),
                        Err(e) => {
                            corrupt = true;
                            warning = Some(format!(
                                "checkpoint {}: unreadable record ({e}); discarding and starting fresh",
                                path.display()
                            ));
                            break;
                        }
                    }
                }
                if !corrupt {
                    for r in records {
                        done.insert(key_of(&r), r);
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => {
                corrupt = true;
                warning = Some(format!(
                    "checkpoint {}: unreadable ({e}); starting fresh",
                    path.display()
                ));
            }
        }
        let file = if corrupt {
            File::create(path)?
        } else {
            OpenOptions::new().create(true).append(true).open(path)?
        };
        Ok((Checkpoint { file, done }, warning))
    }

    pub fn len(&self) -> usize {
        self.done.len()
    }

    pub fn is_empty(&self) -> bool {
        self.done.is_empty()
    }

    pub fn lookup(
        &self,
        rule: &str,
        alphabet: u8,
        span: usize,
        m: usize,
        k: usize,
    ) -> Option<&DensityRecord> {
        self.done
            .get(&(rule.to_string(), alphabet, span, m, k))
    }

    /// Appends one record and forces it to disk before returning.
    pub fn record(&mut self, rec: &DensityRecord) -> Result<()> {
        let mut line =
            serde_json::to_string(rec).map_err(|e| Error::Checkpoint(e.to_string()))?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()?;
        self.done.insert(key_of(rec), rec.clone());
        Ok(())
    }
}

// ── Orchestrated density sweeps ───────────────────────────────────────────────

/// All reports for one period: the jointly periodic set is computed once and
/// shared by every requested `m`; its construction time is attributed to the
/// first report.
fn compute_k_reports(
    t: &RuleTable,
    k: usize,
    ms_todo: &[usize],
    budget: u64,
    rule_id: &str,
) -> Result<Vec<DensityReport>> {
    let start = Instant::now();
    let set = jointly_periodic_set(t, k, budget)?;
    let peel_seconds = start.elapsed().as_secs_f64();
    let mut out = Vec::with_capacity(ms_todo.len());
    for (i, &m) in ms_todo.iter().enumerate() {
        let mut rep = density_from_set(t, k, m, &set, rule_id)?;
        if i == 0 {
            rep.seconds += peel_seconds;
        }
        out.push(rep);
    }
    Ok(out)
}

/// Streams one [`DensityRecord`] per `(m, k)` pair with `k ≥ m`, ordered by
/// ascending `k` then ascending `m`.
///
/// Pairs already present in the checkpoint are re-emitted from the stored
/// record instead of recomputed; fresh results are appended to the
/// checkpoint as they are produced. A capacity failure skips that period
/// with a warning and the sweep continues. Periods are processed in chunks
/// of `jobs` parallel workers, which also caps how many `N^k` node sets are
/// alive at once.
#[allow(clippy::too_many_arguments)]
pub fn fdense_report<E, W>(
    t: &RuleTable,
    m_values: &[usize],
    k_values: &[usize],
    budget: u64,
    jobs: usize,
    checkpoint_path: Option<&Path>,
    mut emit: E,
    mut warn: W,
) -> Result<()>
where
    E: FnMut(&DensityRecord),
    W: FnMut(&str),
{
    let mut ms: Vec<usize> = m_values.iter().copied().filter(|&m| m >= 1).collect();
    ms.sort_unstable();
    ms.dedup();
    let mut ks: Vec<usize> = k_values.iter().copied().filter(|&k| k >= 1).collect();
    ks.sort_unstable();
    ks.dedup();

    let mut checkpoint = match checkpoint_path {
        Some(path) => {
            let (cp, warning) = Checkpoint::open(path)?;
            if let Some(msg) = warning {
                warn(&msg);
            }
            Some(cp)
        }
        None => None,
    };

    let rule_id = t.rule_number().to_string();
    let jobs = jobs.max(1);
    let pool = if jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .ok()
    } else {
        None
    };

    for chunk in ks.chunks(jobs) {
        let plans: Vec<(usize, Vec<usize>)> = chunk
            .iter()
            .map(|&k| {
                let todo: Vec<usize> = ms
                    .iter()
                    .copied()
                    .filter(|&m| m <= k)
                    .filter(|&m| match &checkpoint {
                        Some(cp) => cp
                            .lookup(&rule_id, t.alphabet(), t.span(), m, k)
                            .is_none(),
                        None => true,
                    })
                    .collect();
                (k, todo)
            })
            .collect();

        let compute_one = |(k, todo): &(usize, Vec<usize>)| -> (usize, Result<Vec<DensityReport>>) {
            if todo.is_empty() {
                (*k, Ok(Vec::new()))
            } else {
                (*k, compute_k_reports(t, *k, todo, budget, &rule_id))
            }
        };
        let computed: Vec<(usize, Result<Vec<DensityReport>>)> = match &pool {
            Some(pool) if plans.len() > 1 => {
                pool.install(|| plans.par_iter().map(compute_one).collect())
            }
            _ => plans.iter().map(compute_one).collect(),
        };

        for (k, outcome) in computed {
            let mut fresh: HashMap<usize, DensityRecord> = HashMap::new();
            match outcome {
                Ok(reports) => {
                    for r in &reports {
                        fresh.insert(r.m, r.to_record());
                    }
                }
                Err(e) => warn(&format!("period k={k}: {e}; skipping")),
            }
            for &m in &ms {
                if m > k {
                    continue;
                }
                let stored = checkpoint
                    .as_ref()
                    .and_then(|cp| cp.lookup(&rule_id, t.alphabet(), t.span(), m, k))
                    .cloned();
                if let Some(rec) = stored {
                    emit(&rec);
                } else if let Some(rec) = fresh.remove(&m) {
                    emit(&rec);
                    if let Some(cp) = checkpoint.as_mut() {
                        cp.record(&rec)?;
                    }
                }
            }
        }
    }
    Ok(())
}
