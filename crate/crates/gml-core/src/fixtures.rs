//! Published reference values bundled as CSV.

use std::collections::BTreeMap;

use serde::Serialize;

const CUTS_BY_KIND: &str = include_str!("../data/cuts_by_kind.csv");
const TOPOLOGICAL_TOTALS: &str = include_str!("../data/topological_totals.csv");
const SMALLEST_LARGEST: &str = include_str!("../data/smallest_largest_divisor_cuts.csv");
const TRIANGULATIONS: &str = include_str!("../data/triangulations.csv");
const RGC_LAYERS: &str = include_str!("../data/rgc_layers.csv");

/// Data rows of a bundled CSV: comment lines and the header are dropped.
fn rows(src: &'static str) -> impl Iterator<Item = Vec<&'static str>> {
    src.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::trim).collect())
}

fn num(s: &str) -> u64 {
    s.parse()
        .unwrap_or_else(|_| panic!("bundled fixture holds non-numeric cell {s:?}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CutsByKindRow {
    pub m: u64,
    pub vv: u64,
    pub vs: u64,
    pub ss: u64,
    pub subtotal: u64,
    pub divisors: u64,
    pub total: u64,
}

pub fn cuts_by_kind() -> BTreeMap<u64, CutsByKindRow> {
    rows(CUTS_BY_KIND)
        .map(|r| {
            let row = CutsByKindRow {
                m: num(r[0]),
                vv: num(r[1]),
                vs: num(r[2]),
                ss: num(r[3]),
                subtotal: num(r[4]),
                divisors: num(r[5]),
                total: num(r[6]),
            };
            (row.m, row)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologicalRow {
    pub m: u64,
    pub ss: u64,
    pub vs: u64,
    pub vv: u64,
    pub total: u64,
    pub ss_expression: String,
}

pub fn topological_totals() -> BTreeMap<u64, TopologicalRow> {
    rows(TOPOLOGICAL_TOTALS)
        .map(|r| {
            let row = TopologicalRow {
                m: num(r[0]),
                ss: num(r[1]),
                vs: num(r[2]),
                vv: num(r[3]),
                total: num(r[4]),
                ss_expression: r.get(5).copied().unwrap_or("").to_string(),
            };
            (row.m, row)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisorCutsRow {
    pub m: u64,
    pub d1: u64,
    pub dm: u64,
    pub sum: u64,
}

pub fn smallest_largest_divisor_cuts() -> BTreeMap<u64, DivisorCutsRow> {
    rows(SMALLEST_LARGEST)
        .map(|r| {
            let row = DivisorCutsRow {
                m: num(r[0]),
                d1: num(r[1]),
                dm: num(r[2]),
                sum: num(r[3]),
            };
            (row.m, row)
        })
        .collect()
}

pub fn triangulations() -> BTreeMap<u64, u64> {
    rows(TRIANGULATIONS).map(|r| (num(r[0]), num(r[1]))).collect()
}

/// `(p, q) → independent shape count`.
pub fn rgc_layers() -> BTreeMap<(u64, u64), u64> {
    rows(RGC_LAYERS)
        .map(|r| ((num(r[0]), num(r[1])), num(r[2])))
        .collect()
}
