//! Core library for one-dimensional cellular automata over finite alphabets.
//!
//! The library provides:
//!
//! - [`rule`] — local rule tables, rule-number/tabular/polynomial encodings,
//!   finite and circular evolution ([`RuleTable`], [`CircularWord`]).
//! - [`automata`] — the de Bruijn semiautomaton, the pair graph, SCC
//!   condensation, and the surjective/open/injective classifier
//!   ([`classify`], [`CaClass`]).
//! - [`amoroso`] — the subset-construction surjectivity decision with
//!   zero-preimage witness words, plus exact preimage counting
//!   ([`decide_surjective`], [`preimage_count`]).
//! - [`periodic`] — jointly periodic points on circular words, m-density,
//!   and the per-period growth statistic v_k ([`jointly_periodic_set`],
//!   [`is_m_dense`], [`fdense_report`]).
//! - [`enumeration`] — rule-space sweeps, list verification, and
//!   symmetry canonicalization ([`sweep`], [`verify_list`]).
//! - [`fixtures`] — bundled reference rule lists used by the test suites
//!   and the reproduction subcommands.
//!
//! Two independent decision procedures (the SCC classifier and the subset
//! construction) are exposed side by side so that results can always be
//! cross-checked.

pub mod amoroso;
pub mod automata;
pub mod bitset;
pub mod enumeration;
pub mod error;
pub mod fixtures;
pub mod periodic;
pub mod poly;
pub mod rule;

pub use amoroso::{decide_surjective, find_witness_word, preimage_count, SurjectivityVerdict};
pub use automata::{
    build_pair_graph, build_semiautomaton, classify, classify_without_balance_check, export_dfa,
    is_permutive, scc_decompose, CaClass, PairGraph, Permutivity, SccDecomposition, Semiautomaton,
    SubsetDfa,
};
pub use bitset::BitSet;
pub use error::{Error, Result};
pub use periodic::{
    budget_nodes, density_from_set, fdense_report, is_m_dense, jointly_periodic_set, v_statistic,
    vk_value, Checkpoint, ConfigSpace, DensityRecord, DensityReport, OrbitMap, OrbitMode, VkEntry,
    DEFAULT_BUDGET_LOG2,
};
pub use poly::{parse_polynomial, Polynomial};
pub use rule::{CircularWord, RuleTable, Symbol, MAX_ALPHABET};
pub use enumeration::{
    canonicalize, sweep, verify_list, ListVerdict, SurveyResult, SweepSource, SweepSpec,
};
