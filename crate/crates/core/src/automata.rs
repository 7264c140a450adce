//! The de Bruijn semiautomaton of a rule and the graph analyses built on it:
//! the four-way classifier (none / surjective / open / injective) over the pair
//! graph's condensation, permutivity probes, and the subset-construction DFA.
//!
//! States are the `(s-1)`-grams, packed like windows (leftmost most significant);
//! reading one more symbol `a` from state `u` crosses the window `u·a`, outputs the
//! rule's entry there, and lands in the window's suffix `(s-1)`-gram. Paths spell
//! images of sequences, which is what every decision below exploits.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::rule::{RuleTable, Symbol};

// ── Semiautomaton ─────────────────────────────────────────────────────────────

/// Output-labeled de Bruijn automaton of a rule with span >= 2.
pub struct Semiautomaton {
    alphabet: u8,
    state_count: usize,
    /// Edge arrays indexed by the packed window `u * alphabet + a`.
    targets: Vec<usize>,
    outputs: Vec<Symbol>,
}

impl Semiautomaton {
    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    /// State reached from `u` by appending symbol `a`.
    #[inline]
    pub fn target(&self, u: usize, a: Symbol) -> usize {
        self.targets[u * self.alphabet as usize + a as usize]
    }

    /// Output emitted from `u` when appending symbol `a`.
    #[inline]
    pub fn output(&self, u: usize, a: Symbol) -> Symbol {
        self.outputs[u * self.alphabet as usize + a as usize]
    }
}

/// Build the semiautomaton; span 1 has no `(s-1)`-gram states and is rejected.
pub fn build_semiautomaton(t: &RuleTable) -> Result<Semiautomaton> {
    if t.span() < 2 {
        return Err(Error::UnsupportedSpan { span: t.span() });
    }
    let n = t.state_count();
    let windows = t.window_count();
    let mut targets = Vec::with_capacity(windows);
    let mut outputs = Vec::with_capacity(windows);
    for w in 0..windows {
        // the window's suffix (s-1)-gram drops the most significant digit
        targets.push(w % n);
        outputs.push(t.output(w));
    }
    Ok(Semiautomaton {
        alphabet: t.alphabet(),
        state_count: n,
        targets,
        outputs,
    })
}

// ── Pair graph ────────────────────────────────────────────────────────────────

/// Product of the semiautomaton with itself, synchronized on equal output labels.
/// Vertex `(u, v)` is the index `u * n + v`.
pub struct PairGraph {
    pub state_count: usize,
    pub adj: Vec<Vec<usize>>,
}

/// Build the synchronized product graph (adjacency deduplicated, sorted).
pub fn build_pair_graph(sa: &Semiautomaton) -> PairGraph {
    let n = sa.state_count();
    let nsym = sa.alphabet();
    let mut adj = vec![Vec::new(); n * n];
    for u in 0..n {
        for v in 0..n {
            let edges = &mut adj[u * n + v];
            for a in 0..nsym {
                for b in 0..nsym {
                    if sa.output(u, a) == sa.output(v, b) {
                        edges.push(sa.target(u, a) * n + sa.target(v, b));
                    }
                }
            }
            edges.sort_unstable();
            edges.dedup();
        }
    }
    PairGraph {
        state_count: n,
        adj,
    }
}

// ── Strongly connected components ─────────────────────────────────────────────

/// SCC decomposition with deterministic numbering (components ordered by their
/// smallest contained vertex) and the trivial flag (singleton without self-loop).
pub struct SccDecomposition {
    pub comp_of: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    pub trivial: Vec<bool>,
}

/// Iterative Tarjan over an adjacency-list graph.
pub fn scc_decompose(adj: &[Vec<usize>]) -> SccDecomposition {
    const UNSET: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp_of = vec![UNSET; n];
    let mut raw: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, ei)) = call.last() {
            if ei == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(ei) {
                call.last_mut().expect("nonempty").1 += 1;
                if index[w] == UNSET {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp_of[w] = raw.len();
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    raw.push(comp);
                }
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }

    // renumber so that component ids follow the smallest contained vertex
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by_key(|&c| raw[c][0]);
    let mut remap = vec![0usize; raw.len()];
    for (new_id, &old_id) in order.iter().enumerate() {
        remap[old_id] = new_id;
    }
    let mut components: Vec<Vec<usize>> = vec![Vec::new(); raw.len()];
    for (old_id, comp) in raw.into_iter().enumerate() {
        components[remap[old_id]] = comp;
    }
    for c in comp_of.iter_mut() {
        *c = remap[*c];
    }
    let trivial = components
        .iter()
        .map(|comp| comp.len() == 1 && !adj[comp[0]].contains(&comp[0]))
        .collect();
    SccDecomposition {
        comp_of,
        components,
        trivial,
    }
}

// ── Classifier ────────────────────────────────────────────────────────────────

/// Four-way classification; the levels are nested (injective implies open
/// implies surjective).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CaClass {
    None = 0,
    Surjective = 1,
    Open = 2,
    Injective = 3,
}

impl CaClass {
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            CaClass::None => "none",
            CaClass::Surjective => "surjective",
            CaClass::Open => "open",
            CaClass::Injective => "injective",
        }
    }

    pub fn is_surjective(self) -> bool {
        self >= CaClass::Surjective
    }
}

impl std::fmt::Display for CaClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Classify a rule by the condensation of its pair graph.
///
/// Steps: unbalanced rules are not surjective; the component of the diagonal
/// vertex `(0,0)` must consist of exactly the `n` diagonal vertices or some
/// diamond witnesses non-surjectivity; a lone non-trivial component means
/// injective; otherwise the rule is open exactly when the diagonal component is
/// isolated inside `HH`, the condensation subgraph induced by vertices lying both
/// in the forward and in the backward closure of the non-trivial components.
/// The openness branch reproduces its source procedure verbatim and is validated
/// against bi-permutive fixtures rather than an independent oracle.
pub fn classify(t: &RuleTable) -> CaClass {
    if t.span() == 1 {
        // pointwise symbol map: bijective = injective CA, anything else fails
        // balance (each symbol must appear exactly N^0 = 1 time)
        let mut seen = vec![false; t.alphabet() as usize];
        for &s in t.entries() {
            if seen[s as usize] {
                return CaClass::None;
            }
            seen[s as usize] = true;
        }
        return CaClass::Injective;
    }
    if !t.is_balanced() {
        return CaClass::None;
    }
    classify_balanced_graph(t)
}

/// The graph pipeline of `classify`, without the balance short-circuit (exposed
/// so tests can confirm the short-circuit agrees with the full analysis).
pub fn classify_without_balance_check(t: &RuleTable) -> CaClass {
    assert!(t.span() >= 2, "graph pipeline needs span >= 2");
    classify_balanced_graph(t)
}

fn classify_balanced_graph(t: &RuleTable) -> CaClass {
    let sa = build_semiautomaton(t).expect("span >= 2");
    let n = sa.state_count();
    let pair = build_pair_graph(&sa);
    let scc = scc_decompose(&pair.adj);

    let diag = scc.comp_of[0]; // component of the diagonal vertex (0,0)
    if scc.components[diag].len() != n {
        return CaClass::None;
    }
    // the de Bruijn graph is strongly connected, so in the surjective case the
    // diagonal component is exactly the diagonal
    assert!(
        (0..n).all(|u| scc.comp_of[u * n + u] == diag),
        "diagonal vertices must share one component"
    );

    let non_trivial: Vec<usize> = (0..scc.components.len())
        .filter(|&c| !scc.trivial[c])
        .collect();
    if non_trivial.len() == 1 {
        return CaClass::Injective;
    }

    // condensation edges, deduplicated
    let ncomp = scc.components.len();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (v, outs) in pair.adj.iter().enumerate() {
        let cv = scc.comp_of[v];
        for &w in outs {
            let cw = scc.comp_of[w];
            if cv != cw {
                edges.push((cv, cw));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();

    let mut cadj = vec![Vec::new(); ncomp];
    let mut cradj = vec![Vec::new(); ncomp];
    for &(a, b) in &edges {
        cadj[a].push(b);
        cradj[b].push(a);
    }

    let fwd = reachable_from(&cadj, &non_trivial);
    let bwd = reachable_from(&cradj, &non_trivial);
    let in_hh = |c: usize| fwd[c] && bwd[c];

    let diag_degree_in_hh = edges
        .iter()
        .filter(|&&(a, b)| (a == diag || b == diag) && in_hh(a) && in_hh(b))
        .count();
    if diag_degree_in_hh == 0 {
        CaClass::Open
    } else {
        CaClass::Surjective
    }
}

fn reachable_from(adj: &[Vec<usize>], sources: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue: Vec<usize> = Vec::new();
    for &s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push(s);
        }
    }
    while let Some(v) = queue.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push(w);
            }
        }
    }
    seen
}

// ── Permutivity ───────────────────────────────────────────────────────────────

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Permutivity {
    pub left: bool,
    pub right: bool,
}

/// A rule is left-permutive when, for every fixed tail, the map from the first
/// window cell to the output is a bijection of the alphabet; right-permutive
/// symmetrically in the last cell.
pub fn is_permutive(t: &RuleTable) -> Permutivity {
    let n = t.alphabet() as usize;
    let windows = t.window_count();
    let states = t.state_count();

    let mut left = true;
    for tail in 0..states {
        let mut seen = vec![false; n];
        for first in 0..n {
            let out = t.output(first * states + tail) as usize;
            if seen[out] {
                left = false;
            }
            seen[out] = true;
        }
    }
    let mut right = true;
    for head in 0..windows / n {
        let mut seen = vec![false; n];
        for last in 0..n {
            let out = t.output(head * n + last) as usize;
            if seen[out] {
                right = false;
            }
            seen[out] = true;
        }
    }
    Permutivity { left, right }
}

// ── Subset-construction DFA ───────────────────────────────────────────────────

/// Deterministic automaton over subsets of semiautomaton states, built from the
/// full state set; `transitions[node][symbol]` is `None` when the successor set
/// is empty (a word with no preimage passes through there).
pub struct SubsetDfa {
    pub alphabet: u8,
    pub state_count: usize,
    pub nodes: Vec<BitSet>,
    pub transitions: Vec<Vec<Option<usize>>>,
}

impl SubsetDfa {
    /// Human-readable label of a node, e.g. `{u0,u1,u3}`.
    pub fn node_label(&self, node: usize) -> String {
        let names: Vec<String> = self.nodes[node]
            .iter_ones()
            .map(|s| format!("u{s}"))
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// DOT rendering; missing transitions appear as comments.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph subset_dfa {\n  rankdir=LR;\n");
        for (i, _) in self.nodes.iter().enumerate() {
            let shape = if i == 0 { "box" } else { "ellipse" };
            out.push_str(&format!("  \"{}\" [shape={}];\n", self.node_label(i), shape));
        }
        for (i, row) in self.transitions.iter().enumerate() {
            for (sym, tgt) in row.iter().enumerate() {
                match tgt {
                    Some(j) => out.push_str(&format!(
                        "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                        self.node_label(i),
                        self.node_label(*j),
                        crate::rule::symbol_to_char(sym as u8)
                    )),
                    None => out.push_str(&format!(
                        "  // \"{}\" --{}--> (no transition)\n",
                        self.node_label(i),
                        crate::rule::symbol_to_char(sym as u8)
                    )),
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Subset construction from the full state set, breadth-first, symbols ascending.
pub fn export_dfa(t: &RuleTable) -> Result<SubsetDfa> {
    let sa = build_semiautomaton(t)?;
    let n = sa.state_count();
    let nsym = sa.alphabet();

    let mut nodes: Vec<BitSet> = vec![BitSet::full(n)];
    let mut transitions: Vec<Vec<Option<usize>>> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    seen.insert(nodes[0].clone(), 0usize);

    let mut next = 0usize;
    while next < nodes.len() {
        let current = nodes[next].clone();
        let mut row = Vec::with_capacity(nsym as usize);
        for b in 0..nsym {
            let mut succ = BitSet::new(n);
            for u in current.iter_ones() {
                for a in 0..nsym {
                    if sa.output(u, a) == b {
                        succ.insert(sa.target(u, a));
                    }
                }
            }
            if succ.is_empty() {
                row.push(None);
            } else if let Some(&id) = seen.get(&succ) {
                row.push(Some(id));
            } else {
                let id = nodes.len();
                seen.insert(succ.clone(), id);
                nodes.push(succ);
                row.push(Some(id));
            }
        }
        transitions.push(row);
        next += 1;
    }
    Ok(SubsetDfa {
        alphabet: nsym,
        state_count: n,
        nodes,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(n: u128) -> RuleTable {
        RuleTable::from_rule_u128(n, 2, 3).unwrap()
    }

    #[test]
    fn rule_76_semiautomaton_edge() {
        let sa = build_semiautomaton(&rule(76)).unwrap();
        assert_eq!(sa.state_count(), 4);
        // from state 01 (index 1), appending 0 crosses window 010: output 1, land in 10
        assert_eq!(sa.output(1, 0), 1);
        assert_eq!(sa.target(1, 0), 2);
    }

    #[test]
    fn span3_counts_forced() {
        let sa = build_semiautomaton(&rule(57)).unwrap();
        assert_eq!(sa.state_count(), 4);
        let edge_count: usize = (0..4).map(|_| 2).sum();
        assert_eq!(edge_count, 8);
    }

    #[test]
    fn identity_semiautomaton_outputs_middle_cell() {
        let sa = build_semiautomaton(&rule(204)).unwrap();
        for u in 0..4usize {
            for a in 0..2u8 {
                // the output of u·a under the identity is the middle cell,
                // i.e. the least significant digit of u
                assert_eq!(sa.output(u, a), (u & 1) as u8);
            }
        }
    }

    #[test]
    fn span1_rejected_by_graph_pipeline() {
        let t = RuleTable::new(2, 1, vec![0, 1]).unwrap();
        assert!(matches!(
            build_semiautomaton(&t),
            Err(Error::UnsupportedSpan { span: 1 })
        ));
    }

    #[test]
    fn classify_bijections_are_injective() {
        assert_eq!(classify(&rule(170)), CaClass::Injective); // shift
        assert_eq!(classify(&rule(204)), CaClass::Injective); // identity
        assert_eq!(classify(&rule(15)), CaClass::Injective); // complemented projection
    }

    #[test]
    fn classify_bipermutive_rules_are_open_not_injective() {
        for n in [90u128, 105, 150, 165] {
            let t = rule(n);
            let p = is_permutive(&t);
            assert!(p.left && p.right, "rule {n} should be bi-permutive");
            assert_eq!(classify(&t), CaClass::Open, "rule {n}");
        }
    }

    #[test]
    fn classify_rule_30_is_surjective_only() {
        // left-permutive, hence surjective; not open (the all-zeros configuration
        // has two preimages, not the constant multiplicity four); not injective
        assert_eq!(classify(&rule(30)), CaClass::Surjective);
    }

    #[test]
    fn classify_rule_116_fails_balance_late() {
        // balanced but non-surjective: the diamond check must catch it
        assert!(rule(116).is_balanced());
        assert_eq!(classify(&rule(116)), CaClass::None);
    }

    #[test]
    fn classify_unbalanced_is_none() {
        assert_eq!(classify(&rule(110)), CaClass::None);
        assert_eq!(classify(&rule(0)), CaClass::None);
    }

    #[test]
    fn classify_span1_direct() {
        let ident = RuleTable::new(2, 1, vec![0, 1]).unwrap();
        assert_eq!(classify(&ident), CaClass::Injective);
        let constant = RuleTable::new(2, 1, vec![1, 1]).unwrap();
        assert_eq!(classify(&constant), CaClass::None);
        let rot3 = RuleTable::new(3, 1, vec![1, 2, 0]).unwrap();
        assert_eq!(classify(&rot3), CaClass::Injective);
    }

    #[test]
    fn permutivity_examples() {
        assert_eq!(
            is_permutive(&rule(90)),
            Permutivity {
                left: true,
                right: true
            }
        );
        assert_eq!(
            is_permutive(&rule(204)),
            Permutivity {
                left: false,
                right: false
            }
        );
        assert_eq!(
            is_permutive(&rule(30)),
            Permutivity {
                left: true,
                right: false
            }
        );
    }

    #[test]
    fn export_dfa_rule_76_matches_published_listing() {
        let dfa = export_dfa(&rule(76)).unwrap();
        let find = |label: &str| {
            (0..dfa.nodes.len())
                .find(|&i| dfa.node_label(i) == label)
                .unwrap_or_else(|| panic!("missing node {label}"))
        };
        let full = find("{u0,u1,u2,u3}");
        let a = find("{u0,u1,u3}");
        let b = find("{u2,u3}");
        let c = find("{u2}");
        let d = find("{u0,u1}");
        assert_eq!(dfa.nodes.len(), 5);
        assert_eq!(dfa.transitions[full], vec![Some(a), Some(b)]);
        assert_eq!(dfa.transitions[a], vec![Some(a), Some(b)]);
        assert_eq!(dfa.transitions[b], vec![Some(a), Some(c)]);
        assert_eq!(dfa.transitions[c], vec![Some(d), None]);
        assert_eq!(dfa.transitions[d], vec![Some(d), Some(b)]);
        let dot = dfa.to_dot();
        assert!(dot.contains("\"{u2}\" --1--> (no transition)"));
    }

    #[test]
    fn scc_on_small_graph() {
        // 0 <-> 1, 2 self-loop, 3 isolated, 0 -> 2
        let adj = vec![vec![1, 2], vec![0], vec![2], vec![]];
        let scc = scc_decompose(&adj);
        assert_eq!(scc.components.len(), 3);
        assert_eq!(scc.components[0], vec![0, 1]);
        assert_eq!(scc.components[1], vec![2]);
        assert_eq!(scc.components[2], vec![3]);
        assert_eq!(scc.trivial, vec![false, false, true]);
    }
}
