//! Surjectivity decision by breadth-first subset construction, with
//! zero-preimage witness words and exact preimage counting.
//!
//! This is the second, independent surjectivity oracle next to the SCC
//! classifier in [`crate::automata`]. It explores the subsets of windows
//! that can produce a given output word: the level-0 node for an output
//! symbol `b` is the set of windows mapping to `b`, and the successor of a
//! node under symbol `a` keeps every window that extends a member's suffix
//! and maps to `a`. Reaching an empty subset means some finite word has no
//! preimage, so the map is not surjective; because subsets over a finite
//! window space repeat, the memoized search always terminates.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bitset::BitSet;
use crate::rule::{RuleTable, Symbol};

/// Outcome of [`decide_surjective`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurjectivityVerdict {
    /// Whether the global map is onto.
    pub surjective: bool,
    /// A shortest word with zero preimages, present iff not surjective.
    /// Ties are broken lexicographically, so the witness is deterministic.
    pub witness: Option<Vec<Symbol>>,
}

impl SurjectivityVerdict {
    fn onto() -> Self {
        SurjectivityVerdict {
            surjective: true,
            witness: None,
        }
    }

    fn counterexample(witness: Vec<Symbol>) -> Self {
        SurjectivityVerdict {
            surjective: false,
            witness: Some(witness),
        }
    }
}

/// Decides surjectivity of the global map by memoized breadth-first subset
/// construction over window sets.
///
/// Returns a shortest (then lexicographically least) zero-preimage word as
/// witness when the map is not onto. Nodes are explored first-in-first-out
/// and symbols in ascending order, and every subset is extended only the
/// first time it appears, which is what makes the witness canonical.
pub fn decide_surjective(t: &RuleTable) -> SurjectivityVerdict {
    let n = t.alphabet() as usize;
    if t.span() == 1 {
        // The global map applies one symbol permutation pointwise; it is
        // onto iff every symbol is hit.
        for b in 0..n as Symbol {
            if !t.entries().contains(&b) {
                return SurjectivityVerdict::counterexample(vec![b]);
            }
        }
        return SurjectivityVerdict::onto();
    }

    let windows = t.window_count();
    let suffixes = t.state_count();

    // Node storage: the subset itself plus (parent, symbol) for witness
    // reconstruction. Roots carry no parent.
    let mut sets: Vec<BitSet> = Vec::new();
    let mut edges: Vec<(Option<usize>, Symbol)> = Vec::new();
    let mut memo: HashMap<BitSet, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    for b in 0..n as Symbol {
        let mut root = BitSet::new(windows);
        for w in 0..windows {
            if t.output(w) == b {
                root.insert(w);
            }
        }
        if root.is_empty() {
            // The symbol b itself is a length-1 word nobody produces.
            return SurjectivityVerdict::counterexample(vec![b]);
        }
        if !memo.contains_key(&root) {
            let id = sets.len();
            memo.insert(root.clone(), id);
            sets.push(root);
            edges.push((None, b));
            queue.push_back(id);
        }
    }

    while let Some(node) = queue.pop_front() {
        for a in 0..n as Symbol {
            let mut succ = BitSet::new(windows);
            for w in sets[node].iter_ones() {
                let u = w % suffixes;
                for d in 0..n {
                    let next = u * n + d;
                    if t.output(next) == a {
                        succ.insert(next);
                    }
                }
            }
            if succ.is_empty() {
                let mut witness = vec![a];
                let mut at = Some(node);
                while let Some(i) = at {
                    witness.push(edges[i].1);
                    at = edges[i].0;
                }
                witness.reverse();
                return SurjectivityVerdict::counterexample(witness);
            }
            if !memo.contains_key(&succ) {
                let id = sets.len();
                memo.insert(succ.clone(), id);
                sets.push(succ);
                edges.push((Some(node), a));
                queue.push_back(id);
            }
        }
    }

    SurjectivityVerdict::onto()
}

/// Number of length `|w| + span - 1` lines whose sliding-block image is `w`,
/// computed by a transfer DP over the de Bruijn states (no enumeration).
///
/// Counts can exceed any fixed-width integer (a constant rule maps all
/// `N^(L+s-1)` lines to one word), hence the big-integer result.
pub fn preimage_count(t: &RuleTable, w: &[Symbol]) -> BigUint {
    assert!(!w.is_empty(), "preimage_count needs a nonempty word");
    let n = t.alphabet() as usize;
    for &y in w {
        assert!((y as usize) < n, "symbol {y} outside alphabet 0..{n}");
    }

    if t.span() == 1 {
        // Cells are independent: multiply per-symbol fibre sizes.
        let mut fibre = vec![0u32; n];
        for &out in t.entries() {
            fibre[out as usize] += 1;
        }
        let mut total = BigUint::one();
        for &y in w {
            total *= fibre[y as usize];
        }
        return total;
    }

    let states = t.state_count();
    // One free choice of initial (span-1)-gram, then one forced-output
    // transition per output symbol.
    let mut cur = vec![BigUint::one(); states];
    for &y in w {
        let mut next = vec![BigUint::zero(); states];
        for (u, count) in cur.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            for d in 0..n {
                let window = u * n + d;
                if t.output(window) == y {
                    next[window % states] += count;
                }
            }
        }
        cur = next;
    }
    cur.into_iter().sum()
}

/// Shortest word (then lexicographically least) with zero preimages, up to
/// `max_len`; `None` when every word that short is produced.
///
/// Runs the subset construction over de Bruijn states starting from the
/// full state set: a word has a preimage iff some output-labelled path
/// spells it, so hitting the empty subset pins a zero-preimage word.
pub fn find_witness_word(t: &RuleTable, max_len: usize) -> Option<Vec<Symbol>> {
    assert!(max_len >= 1, "max_len must be at least 1");
    let n = t.alphabet() as usize;

    if t.span() == 1 {
        for b in 0..n as Symbol {
            if !t.entries().contains(&b) {
                return Some(vec![b]);
            }
        }
        return None;
    }

    let states = t.state_count();
    let mut sets: Vec<BitSet> = Vec::new();
    let mut edges: Vec<(Option<usize>, Symbol)> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut memo: HashMap<BitSet, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    let root = BitSet::full(states);
    memo.insert(root.clone(), 0);
    sets.push(root);
    edges.push((None, 0));
    depth.push(0);
    queue.push_back(0);

    while let Some(node) = queue.pop_front() {
        if depth[node] >= max_len {
            break;
        }
        for a in 0..n as Symbol {
            let mut succ = BitSet::new(states);
            for u in sets[node].iter_ones() {
                for d in 0..n {
                    let window = u * n + d;
                    if t.output(window) == a {
                        succ.insert(window % states);
                    }
                }
            }
            if succ.is_empty() {
                let mut witness = vec![a];
                let mut at = node;
                while let (Some(parent), symbol) = edges[at] {
                    witness.push(symbol);
                    at = parent;
                }
                witness.reverse();
                return Some(witness);
            }
            if !memo.contains_key(&succ) {
                let id = sets.len();
                memo.insert(succ.clone(), id);
                sets.push(succ);
                edges.push((Some(node), a));
                depth.push(depth[node] + 1);
                queue.push_back(id);
            }
        }
    }

    None
}
