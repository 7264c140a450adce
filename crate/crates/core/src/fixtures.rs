//! Reference rule lists bundled with the crate.
//!
//! Three data files ship in `fixtures/`: the 32 span-4 binary maps used by
//! the reproduction tables, the 86 span-6 binary rule numbers expected to
//! classify as surjective, and the expected m-density verdicts for selected
//! span-4 maps with periods between 10 and 18. They are embedded at compile
//! time so the binaries and test suites never depend on external data.

use num_bigint::BigUint;

use crate::rule::RuleTable;

const TABLE2: &str = include_str!("../fixtures/table2_span4.txt");
const APPENDIX_A: &str = include_str!("../fixtures/appendix_a_span6.txt");
const TABLE1: &str = include_str!("../fixtures/table1_expected.txt");

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// The 32 span-4 binary maps, paired with their 1-based map number.
pub fn table2_span4() -> Vec<(usize, RuleTable)> {
    data_lines(TABLE2)
        .enumerate()
        .map(|(i, line)| {
            let table = RuleTable::from_tabular(line, 2, 4)
                .unwrap_or_else(|e| panic!("bundled map {}: {e}", i + 1));
            (i + 1, table)
        })
        .collect()
}

/// The 86 span-6 binary rule numbers expected to be surjective or better.
pub fn appendix_a_span6() -> Vec<BigUint> {
    data_lines(APPENDIX_A)
        .map(|line| {
            line.parse::<BigUint>()
                .unwrap_or_else(|e| panic!("bundled rule number {line:?}: {e}"))
        })
        .collect()
}

/// One expected-density row: for map `map` and window length `m`, the set
/// of periods `k` (within 10..=18 for m=10, 13..=18 for m=13) at which the
/// jointly periodic points are m-dense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1Row {
    pub map: usize,
    pub m: usize,
    pub dense_k: Vec<usize>,
}

/// Expected m-density verdicts for selected span-4 maps.
pub fn table1_expected() -> Vec<Table1Row> {
    data_lines(TABLE1)
        .map(|line| {
            let mut parts = line.split_whitespace();
            let map = parts
                .next()
                .and_then(|p| p.parse().ok())
                .unwrap_or_else(|| panic!("bad density row {line:?}"));
            let m = parts
                .next()
                .and_then(|p| p.parse().ok())
                .unwrap_or_else(|| panic!("bad density row {line:?}"));
            let dense_k = parts
                .next()
                .map(|list| {
                    if list == "-" {
                        return Vec::new();
                    }
                    list.split(',')
                        .map(|k| {
                            k.parse()
                                .unwrap_or_else(|_| panic!("bad k value in {line:?}"))
                        })
                        .collect()
                })
                .unwrap_or_else(|| panic!("bad density row {line:?}"));
            Table1Row { map, m, dense_k }
        })
        .collect()
}
