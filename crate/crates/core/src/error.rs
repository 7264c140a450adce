//! Error type shared by every module in the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("alphabet size must be in 2..=36, got {0}")]
    AlphabetRange(u8),

    #[error("span must be at least 1")]
    SpanZero,

    #[error("table for alphabet {alphabet}, span {span} would need {needed} entries; too large to materialize")]
    TableTooLarge {
        alphabet: u8,
        span: usize,
        needed: u128,
    },

    #[error("table length {got} does not match alphabet {alphabet} to the power span {span} = {expected}")]
    TableLength {
        alphabet: u8,
        span: usize,
        expected: usize,
        got: usize,
    },

    #[error("symbol {symbol} at table entry {index} is outside alphabet 0..{alphabet}")]
    SymbolRange {
        index: usize,
        symbol: u8,
        alphabet: u8,
    },

    #[error("rule number must be below {bound} for alphabet {alphabet}, span {span}")]
    RuleNumberRange {
        bound: String,
        alphabet: u8,
        span: usize,
    },

    #[error("invalid digit '{ch}' at position {pos} for alphabet {alphabet}")]
    InvalidDigit { pos: usize, ch: char, alphabet: u8 },

    #[error("polynomial parse error at byte {pos}: {msg}")]
    PolyParse { pos: usize, msg: String },

    #[error("variable x{index} out of range for span {span}")]
    PolyVarRange { index: usize, span: usize },

    #[error("polynomial declares modulus {declared} but alphabet is {alphabet}")]
    PolyModulus { declared: u64, alphabet: u8 },

    #[error("window has {got} cells, rule span is {span}")]
    WindowLength { span: usize, got: usize },

    #[error("line of length {got} is shorter than the rule span {span}")]
    LineTooShort { span: usize, got: usize },

    #[error("circular word must have at least one cell")]
    EmptyWord,

    #[error("operation needs span >= 2, got {span}")]
    UnsupportedSpan { span: usize },

    #[error("state space of {size} nodes exceeds the memory budget of {budget} nodes")]
    Capacity { size: u128, budget: u64 },

    #[error("window length m={m} must satisfy 1 <= m <= k={k}")]
    DensityRange { m: usize, k: usize },

    #[error("rule number range [{start}, {end}] does not fit below {bound}")]
    SweepRange {
        start: String,
        end: String,
        bound: String,
    },

    #[error("shard {index}/{total} is invalid: index must be below total and total nonzero")]
    ShardSpec { index: u32, total: u32 },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
