//! Local rules of one-dimensional cellular automata and the words they act on.
//!
//! A rule is a function `F: A^s -> A` over an alphabet `A = {0, .., N-1}` given as a
//! lookup table. Windows are packed into indices with the leftmost cell most
//! significant: the window `(a_0, .., a_{s-1})` has index `sum a_j * N^(s-1-j)`.
//! Evolution is one-sided: `(f x)_i = F(x_i, .., x_{i+s-1})`.
//!
//! Three interchangeable encodings are supported:
//! - the table itself, entries ascending by window index;
//! - the tabular string, digit `w` of the string being entry `w`;
//! - the rule number, whose base-`N` digit of weight `N^w` is entry `w`.
//!
//! For binary rules the tabular string and the rule number read their digits in
//! mutually reversed order; both converters round-trip and are tested against the
//! classical numbering (rule 30, rule 204, ..).

use num_bigint::BigUint;

use crate::error::{Error, Result};

pub type Symbol = u8;

/// Largest alphabet that still has a digit character per symbol (0-9, a-z).
pub const MAX_ALPHABET: u8 = 36;

// ── Digit characters ──────────────────────────────────────────────────────────

/// Symbol for a digit character, if it is one for the given alphabet.
pub fn symbol_from_char(ch: char, alphabet: u8) -> Option<Symbol> {
    let v = ch.to_digit(36)? as u8;
    (v < alphabet).then_some(v)
}

/// Digit character for a symbol (lowercase beyond 9).
pub fn symbol_to_char(s: Symbol) -> char {
    char::from_digit(s as u32, 36).expect("symbol below 36")
}

/// Parse a word over the alphabet from digit characters; whitespace and `_` ignored.
pub fn word_from_str(text: &str, alphabet: u8) -> Result<Vec<Symbol>> {
    let mut out = Vec::new();
    for (pos, ch) in text.char_indices() {
        if ch.is_whitespace() || ch == '_' {
            continue;
        }
        match symbol_from_char(ch, alphabet) {
            Some(s) => out.push(s),
            None => return Err(Error::InvalidDigit { pos, ch, alphabet }),
        }
    }
    Ok(out)
}

/// Render a word as digit characters.
pub fn word_to_string(word: &[Symbol]) -> String {
    word.iter().map(|&s| symbol_to_char(s)).collect()
}

fn check_alphabet(alphabet: u8) -> Result<()> {
    if !(2..=MAX_ALPHABET).contains(&alphabet) {
        return Err(Error::AlphabetRange(alphabet));
    }
    Ok(())
}

/// `alphabet^span` as a table size, or an error when it cannot be materialized.
pub(crate) fn table_len(alphabet: u8, span: usize) -> Result<usize> {
    if span == 0 {
        return Err(Error::SpanZero);
    }
    let needed: u128 = (alphabet as u128)
        .checked_pow(span as u32)
        .ok_or(Error::TableTooLarge {
            alphabet,
            span,
            needed: u128::MAX,
        })?;
    // Anything beyond this is unusable for the graph algorithms downstream anyway.
    const MAX_TABLE: u128 = 1 << 30;
    if needed > MAX_TABLE {
        return Err(Error::TableTooLarge {
            alphabet,
            span,
            needed,
        });
    }
    Ok(needed as usize)
}

// ── RuleTable ─────────────────────────────────────────────────────────────────

/// A local rule as a lookup table over packed windows.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RuleTable {
    alphabet: u8,
    span: usize,
    table: Vec<Symbol>,
}

impl RuleTable {
    /// Build from explicit entries; `table[w]` is the output on the window packed as `w`.
    pub fn new(alphabet: u8, span: usize, table: Vec<Symbol>) -> Result<Self> {
        check_alphabet(alphabet)?;
        let expected = table_len(alphabet, span)?;
        if table.len() != expected {
            return Err(Error::TableLength {
                alphabet,
                span,
                expected,
                got: table.len(),
            });
        }
        for (index, &symbol) in table.iter().enumerate() {
            if symbol >= alphabet {
                return Err(Error::SymbolRange {
                    index,
                    symbol,
                    alphabet,
                });
            }
        }
        Ok(RuleTable {
            alphabet,
            span,
            table,
        })
    }

    /// Decode a rule number: base-`alphabet` digit of weight `alphabet^w` is entry `w`.
    pub fn from_rule_number(number: &BigUint, alphabet: u8, span: usize) -> Result<Self> {
        check_alphabet(alphabet)?;
        let len = table_len(alphabet, span)?;
        let mut digits = number.to_radix_le(alphabet as u32);
        if digits.len() > len {
            let bound = BigUint::from(alphabet).pow(len as u32);
            return Err(Error::RuleNumberRange {
                bound: bound.to_string(),
                alphabet,
                span,
            });
        }
        digits.resize(len, 0);
        RuleTable::new(alphabet, span, digits)
    }

    /// `from_rule_number` for numbers that fit in machine words (sweeps use this).
    pub fn from_rule_u128(number: u128, alphabet: u8, span: usize) -> Result<Self> {
        check_alphabet(alphabet)?;
        let len = table_len(alphabet, span)?;
        let mut digits = vec![0u8; len];
        let mut n = number;
        for d in digits.iter_mut() {
            if n == 0 {
                break;
            }
            *d = (n % alphabet as u128) as u8;
            n /= alphabet as u128;
        }
        if n != 0 {
            let bound = BigUint::from(alphabet).pow(len as u32);
            return Err(Error::RuleNumberRange {
                bound: bound.to_string(),
                alphabet,
                span,
            });
        }
        RuleTable::new(alphabet, span, digits)
    }

    /// Decode a tabular string: digit at position `w` is entry `w`.
    /// Whitespace and underscores are ignored.
    pub fn from_tabular(text: &str, alphabet: u8, span: usize) -> Result<Self> {
        check_alphabet(alphabet)?;
        let expected = table_len(alphabet, span)?;
        let table = word_from_str(text, alphabet)?;
        if table.len() != expected {
            return Err(Error::TableLength {
                alphabet,
                span,
                expected,
                got: table.len(),
            });
        }
        RuleTable::new(alphabet, span, table)
    }

    /// The rule number for this table.
    pub fn rule_number(&self) -> BigUint {
        BigUint::from_radix_le(&self.table, self.alphabet as u32).expect("digits below radix")
    }

    /// The tabular string for this table (plain digits, no grouping).
    pub fn to_tabular(&self) -> String {
        word_to_string(&self.table)
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.table
    }

    /// Number of windows, `alphabet^span`.
    pub fn window_count(&self) -> usize {
        self.table.len()
    }

    /// Number of `(span-1)`-grams, `alphabet^(span-1)`.
    pub fn state_count(&self) -> usize {
        self.table.len() / self.alphabet as usize
    }

    /// Output on a packed window index.
    #[inline]
    pub fn output(&self, window: usize) -> Symbol {
        self.table[window]
    }

    /// Output on an explicit window of exactly `span` cells.
    pub fn apply_local(&self, window: &[Symbol]) -> Result<Symbol> {
        if window.len() != self.span {
            return Err(Error::WindowLength {
                span: self.span,
                got: window.len(),
            });
        }
        let mut w = 0usize;
        for (pos, &s) in window.iter().enumerate() {
            if s >= self.alphabet {
                return Err(Error::SymbolRange {
                    index: pos,
                    symbol: s,
                    alphabet: self.alphabet,
                });
            }
            w = w * self.alphabet as usize + s as usize;
        }
        Ok(self.table[w])
    }

    /// Slide the rule across a finite line; output has `len - span + 1` cells.
    pub fn evolve_finite(&self, line: &[Symbol]) -> Result<Vec<Symbol>> {
        if line.len() < self.span {
            return Err(Error::LineTooShort {
                span: self.span,
                got: line.len(),
            });
        }
        let n = self.alphabet as usize;
        let states = self.state_count();
        let mut w = 0usize;
        for (pos, &s) in line.iter().enumerate() {
            if s >= self.alphabet {
                return Err(Error::SymbolRange {
                    index: pos,
                    symbol: s,
                    alphabet: self.alphabet,
                });
            }
            if pos < self.span - 1 {
                w = w * n + s as usize;
            }
        }
        let mut out = Vec::with_capacity(line.len() - self.span + 1);
        for i in self.span - 1..line.len() {
            w = (w % states) * n + line[i] as usize;
            out.push(self.table[w]);
        }
        Ok(out)
    }

    /// Apply the rule to a circular word of any length; windows wrap around
    /// (several times if the word is shorter than the span).
    pub fn evolve_circular(&self, x: &CircularWord) -> Result<CircularWord> {
        let k = x.len();
        let n = self.alphabet as usize;
        let cells = x.symbols();
        for (pos, &s) in cells.iter().enumerate() {
            if s >= self.alphabet {
                return Err(Error::SymbolRange {
                    index: pos,
                    symbol: s,
                    alphabet: self.alphabet,
                });
            }
        }
        let states = self.state_count();
        let mut w = 0usize;
        for j in 0..self.span - 1 {
            w = w * n + cells[j % k] as usize;
        }
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let tail = cells[(i + self.span - 1) % k] as usize;
            let full = (w % states) * n + tail;
            out.push(self.table[full]);
            w = full % states;
        }
        Ok(CircularWord::new(out).expect("same length"))
    }

    /// Every symbol occurs exactly `alphabet^(span-1)` times among the entries.
    pub fn is_balanced(&self) -> bool {
        let mut counts = vec![0usize; self.alphabet as usize];
        for &s in &self.table {
            counts[s as usize] += 1;
        }
        counts.iter().all(|&c| c == self.state_count())
    }

    /// Table of `f` composed with the left shift: one cell wider, ignoring the
    /// leftmost window cell. Classification and periodic-orbit structure are
    /// invariant under this widening.
    pub fn compose_with_shift(&self) -> Result<RuleTable> {
        let n = self.alphabet as usize;
        let mut table = Vec::with_capacity(self.table.len() * n);
        for _ in 0..n {
            table.extend_from_slice(&self.table);
        }
        RuleTable::new(self.alphabet, self.span + 1, table)
    }
}

// ── CircularWord ──────────────────────────────────────────────────────────────

/// A word read cyclically; position arithmetic is modulo its length.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CircularWord {
    symbols: Vec<Symbol>,
}

impl CircularWord {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(CircularWord { symbols })
    }

    /// Parse from digit characters.
    pub fn parse(text: &str, alphabet: u8) -> Result<Self> {
        Self::new(word_from_str(text, alphabet)?)
    }

    #[allow(clippy::len_without_is_empty)] // never empty by construction
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// `out[i] = x[(i + r) mod k]`; negative `r` rotates the other way.
    pub fn rotate(&self, r: i64) -> CircularWord {
        let k = self.symbols.len();
        let shift = r.rem_euclid(k as i64) as usize;
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            out.push(self.symbols[(i + shift) % k]);
        }
        CircularWord { symbols: out }
    }

    /// Packed index with the leftmost cell most significant.
    pub fn pack(&self, alphabet: u8) -> Result<u64> {
        let mut idx: u64 = 0;
        for (pos, &s) in self.symbols.iter().enumerate() {
            if s >= alphabet {
                return Err(Error::SymbolRange {
                    index: pos,
                    symbol: s,
                    alphabet,
                });
            }
            idx = idx
                .checked_mul(alphabet as u64)
                .and_then(|v| v.checked_add(s as u64))
                .ok_or(Error::Capacity {
                    size: u128::MAX,
                    budget: u64::MAX,
                })?;
        }
        Ok(idx)
    }

    /// Inverse of `pack` for words of length `k`.
    pub fn unpack(mut index: u64, alphabet: u8, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyWord);
        }
        let mut symbols = vec![0u8; k];
        for pos in (0..k).rev() {
            symbols[pos] = (index % alphabet as u64) as u8;
            index /= alphabet as u64;
        }
        Ok(CircularWord { symbols })
    }

    pub fn to_display(&self) -> String {
        word_to_string(&self.symbols)
    }
}

impl std::fmt::Display for CircularWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_display())
    }
}
