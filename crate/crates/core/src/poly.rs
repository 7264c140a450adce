//! Polynomial parser: sums of products of window variables modulo the alphabet size.
//!
//! Grammar (no parentheses, whitespace free-form):
//!   expr   := term ('+' term)*
//!   term   := factor ('*' factor)*
//!   factor := integer | 'x' integer
//! with an optional trailing `mod N` that must agree with the declared alphabet.
//! `x0` is the leftmost cell of the window.

use crate::error::{Error, Result};
use crate::rule::RuleTable;

/// One product of a coefficient and window variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: u8,
    pub vars: Vec<usize>,
}

/// A parsed polynomial over `Z_modulus` in the window variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    modulus: u8,
    terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Var(usize),
    Plus,
    Star,
    Mod,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            b'*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                let mut v: u64 = 0;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add((bytes[i] - b'0') as u64))
                        .ok_or(Error::PolyParse {
                            pos: start,
                            msg: "integer too large".into(),
                        })?;
                    i += 1;
                }
                toks.push((start, Tok::Int(v)));
            }
            b'x' => {
                let start = i;
                i += 1;
                let digits_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == digits_start {
                    return Err(Error::PolyParse {
                        pos: start,
                        msg: "expected variable index after 'x'".into(),
                    });
                }
                let idx: usize =
                    text[digits_start..i]
                        .parse()
                        .map_err(|_| Error::PolyParse {
                            pos: start,
                            msg: "variable index too large".into(),
                        })?;
                toks.push((start, Tok::Var(idx)));
            }
            b'm' => {
                if bytes[i..].starts_with(b"mod") {
                    toks.push((i, Tok::Mod));
                    i += 3;
                } else {
                    return Err(Error::PolyParse {
                        pos: i,
                        msg: "unexpected identifier".into(),
                    });
                }
            }
            other => {
                return Err(Error::PolyParse {
                    pos: i,
                    msg: format!("unexpected character '{}'", other as char),
                });
            }
        }
    }
    Ok(toks)
}

impl Polynomial {
    /// Parse against a declared alphabet and span; variable indices must be below
    /// the span and a trailing `mod N` must name the alphabet.
    pub fn parse(text: &str, alphabet: u8, span: usize) -> Result<Self> {
        let toks = lex(text)?;
        let end_pos = text.len();
        let mut cur = 0usize;

        let peek = |cur: usize| toks.get(cur).map(|(_, t)| t.clone());
        let pos_of = |cur: usize| toks.get(cur).map(|(p, _)| *p).unwrap_or(end_pos);

        let mut terms = Vec::new();
        loop {
            // term := factor ('*' factor)*
            let mut coeff: u64 = 1;
            let mut vars = Vec::new();
            loop {
                match peek(cur) {
                    Some(Tok::Int(v)) => {
                        coeff = coeff * (v % alphabet as u64) % alphabet as u64;
                        cur += 1;
                    }
                    Some(Tok::Var(idx)) => {
                        if idx >= span {
                            return Err(Error::PolyVarRange { index: idx, span });
                        }
                        vars.push(idx);
                        cur += 1;
                    }
                    _ => {
                        return Err(Error::PolyParse {
                            pos: pos_of(cur),
                            msg: "expected integer or variable".into(),
                        });
                    }
                }
                if peek(cur) == Some(Tok::Star) {
                    cur += 1;
                    continue;
                }
                break;
            }
            terms.push(Term {
                coeff: coeff as u8,
                vars,
            });
            match peek(cur) {
                Some(Tok::Plus) => {
                    cur += 1;
                }
                _ => break,
            }
        }

        // optional trailing `mod N`
        if peek(cur) == Some(Tok::Mod) {
            cur += 1;
            match peek(cur) {
                Some(Tok::Int(declared)) => {
                    cur += 1;
                    if declared != alphabet as u64 {
                        return Err(Error::PolyModulus {
                            declared,
                            alphabet,
                        });
                    }
                }
                _ => {
                    return Err(Error::PolyParse {
                        pos: pos_of(cur),
                        msg: "expected modulus after 'mod'".into(),
                    });
                }
            }
        }
        if cur != toks.len() {
            return Err(Error::PolyParse {
                pos: pos_of(cur),
                msg: "unexpected trailing input".into(),
            });
        }
        Ok(Polynomial {
            modulus: alphabet,
            terms,
        })
    }

    pub fn modulus(&self) -> u8 {
        self.modulus
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Evaluate at one window.
    pub fn eval(&self, window: &[u8]) -> u8 {
        let m = self.modulus as u64;
        let mut acc: u64 = 0;
        for t in &self.terms {
            let mut prod = t.coeff as u64 % m;
            for &v in &t.vars {
                prod = prod * window[v] as u64 % m;
            }
            acc = (acc + prod) % m;
        }
        acc as u8
    }

    /// Tabulate over every window of the given span.
    pub fn to_table(&self, span: usize) -> Result<RuleTable> {
        let n = self.modulus as usize;
        let len = n.checked_pow(span as u32).ok_or(Error::TableTooLarge {
            alphabet: self.modulus,
            span,
            needed: u128::MAX,
        })?;
        let mut window = vec![0u8; span];
        let mut table = Vec::with_capacity(len);
        for w in 0..len {
            let mut v = w;
            for j in (0..span).rev() {
                window[j] = (v % n) as u8;
                v /= n;
            }
            table.push(self.eval(&window));
        }
        RuleTable::new(self.modulus, span, table)
    }
}

/// Parse and tabulate in one step.
pub fn parse_polynomial(text: &str, alphabet: u8, span: usize) -> Result<RuleTable> {
    Polynomial::parse(text, alphabet, span)?.to_table(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_plus_product() {
        let t = parse_polynomial("x0 + x1*x2", 2, 3).unwrap();
        assert_eq!(t, RuleTable::from_tabular("0001 1110", 2, 3).unwrap());
    }

    #[test]
    fn middle_projection_is_identity_rule() {
        let t = parse_polynomial("x1", 2, 3).unwrap();
        assert_eq!(t.rule_number().to_string(), "204");
    }

    #[test]
    fn trailing_mod_accepted_when_consistent() {
        let a = parse_polynomial("x0 + x3 + x2*x5 mod 2", 2, 6).unwrap();
        let b = parse_polynomial("x0 + x3 + x2*x5", 2, 6).unwrap();
        assert_eq!(a, b);
        assert!(a.is_balanced());
    }

    #[test]
    fn trailing_mod_rejected_when_inconsistent() {
        assert!(matches!(
            parse_polynomial("x0 mod 3", 2, 3),
            Err(Error::PolyModulus { declared: 3, .. })
        ));
    }

    #[test]
    fn constants_reduce_mod_alphabet() {
        let t = parse_polynomial("3", 2, 2).unwrap();
        assert_eq!(t.entries(), &[1, 1, 1, 1]);
        let u = parse_polynomial("2*x0 + 2", 3, 1).unwrap();
        assert_eq!(u.entries(), &[2, 1, 0]);
    }

    #[test]
    fn eval_agrees_with_table_everywhere() {
        let p = Polynomial::parse("x0*x1 + 2*x2 + 1", 3, 3).unwrap();
        let t = p.to_table(3).unwrap();
        let mut w = 0usize;
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    assert_eq!(t.output(w), p.eval(&[a, b, c]));
                    w += 1;
                }
            }
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match Polynomial::parse("x0 + + x1", 2, 3) {
            Err(Error::PolyParse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            Polynomial::parse("x9", 2, 3),
            Err(Error::PolyVarRange { index: 9, span: 3 })
        ));
        assert!(matches!(
            Polynomial::parse("x0 ^ x1", 2, 3),
            Err(Error::PolyParse { .. })
        ));
        assert!(matches!(
            Polynomial::parse("", 2, 3),
            Err(Error::PolyParse { .. })
        ));
    }
}
