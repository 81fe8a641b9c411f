//! Reproducible tables, the formula-versus-oracle audit, and the JSON
//! report envelope.
//!
//! Reports serialise with sorted keys and floats rounded to 12 significant
//! digits so that identical inputs give byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cutmodel::{
    class_signature, count_geometric, count_topological, dm_strata, enumerate_d1_cuts, kind_tally,
    d1_formula, dm_formula, sum_d1_dm, sweep_dm_classes, CountReport, Mode, SweepConfig,
};
use crate::error::{invalid, GmlError, Result};
use crate::fixtures;
use crate::gmlcut::{mobius_scan, theorem3_witness, MobiusScan, WitnessCell};
use crate::gmlmesh::fmt_sig;
use crate::numtheory::{catalan_euler, catalan_segner, count_triangulations_bruteforce, BRUTEFORCE_MAX_M};

pub const FLOAT_DIGITS: usize = 12;

/// Rounds every float in `v` to [`FLOAT_DIGITS`] significant digits.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = fmt_sig(x, FLOAT_DIGITS).parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x)
        .map(canonicalize)
        .map_err(|e| GmlError::Internal(format!("report serialisation failed: {e}")))
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json<T: Serialize>(x: &T) -> Result<String> {
    let v = to_value(x)?;
    let mut s = serde_json::to_string_pretty(&v)
        .map_err(|e| GmlError::Internal(format!("report serialisation failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Text of a table cell: strings verbatim, arrays space-separated, null
/// empty.
pub fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell_text).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub discrepancies: Vec<Value>,
    pub version: String,
    /// No randomness enters any report.
    pub deterministic: bool,
}

impl ReportEnvelope {
    pub fn new(command: &str, inputs: Value, results: Value, discrepancies: Vec<Value>) -> Self {
        ReportEnvelope {
            command: command.to_string(),
            inputs,
            results,
            discrepancies,
            version: env!("CARGO_PKG_VERSION").to_string(),
            deterministic: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub id: u32,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Rows whose computed values disagree with bundled reference values.
    pub mismatches: usize,
}

impl Table {
    fn new(id: u32, title: &str, columns: &[&str]) -> Self {
        Table {
            id,
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            mismatches: 0,
        }
    }

    /// Rows as objects keyed by column name.
    pub fn records(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                Value::Object(m)
            })
            .collect()
    }
}

pub const TABLE_IDS: [u32; 6] = [1, 2, 8, 11, 13, 14];

/// Supported `m` span of each table.
pub fn table_span(id: u32) -> Option<(usize, usize)> {
    match id {
        1 | 2 => Some((3, 200)),
        8 => Some((3, 60)),
        11 => Some((3, 200)),
        13 => Some((3, 40)),
        14 => Some((3, 16)),
        _ => None,
    }
}

fn opt(v: Option<u64>) -> Value {
    v.map(Value::from).unwrap_or(Value::Null)
}

/// Empty when the reference is missing, otherwise `ok` or `DIFF`.
fn diff_flag(computed: u64, reference: Option<u64>) -> Value {
    match reference {
        None => Value::from(""),
        Some(r) if r == computed => Value::from("ok"),
        Some(_) => Value::from("DIFF"),
    }
}

pub fn build_table(id: u32, m_lo: usize, m_hi: usize) -> Result<Table> {
    let (lo, hi) = table_span(id).ok_or_else(|| invalid(format!("unsupported table id {id}; choose one of {TABLE_IDS:?}")))?;
    if m_lo < lo || m_hi > hi || m_lo > m_hi {
        return Err(invalid(format!("table {id} supports m in {lo}..={hi}, got {m_lo}..={m_hi}")));
    }
    let mut t = match id {
        1 => Table::new(1, "single-knife cut classes", &["m", "vv", "vs", "ss", "enumerated", "formula", "diff"]),
        2 => Table::new(2, "cut classes of the smallest and largest divisor", &["m", "d1", "dm", "sum", "formula", "mod8", "reference", "diff"]),
        8 => Table::new(8, "triangulations of the convex m-gon", &["m", "catalan_euler", "catalan_segner", "brute_force", "reference", "diff"]),
        11 => Table::new(11, "geometric cut classes summed over divisors", &["m", "vv", "vs", "ss", "subtotal", "divisors", "total", "reference", "diff"]),
        13 => Table::new(13, "topological cut classes summed over divisors", &["m", "per_divisor", "enumerated", "formula_plain", "formula_reduced", "reference", "diff"]),
        _ => Table::new(14, "region counts of d-knives against the closed forms", &["m", "d", "family", "applicable", "expected", "witnessed", "degenerate_expected", "degenerate_witnessed", "status"]),
    };
    for m in m_lo..=m_hi {
        match id {
            1 => {
                let cuts = enumerate_d1_cuts(m, Mode::Topological)?;
                let (vv, vs, ss) = kind_tally(&cuts);
                let f = d1_formula(m);
                let n = cuts.len() as u64;
                t.mismatches += (n != f) as usize;
                t.rows.push(vec![m.into(), vv.into(), vs.into(), ss.into(), n.into(), f.into(), diff_flag(n, Some(f))]);
            }
            2 => {
                let d1 = enumerate_d1_cuts(m, Mode::Topological)?.len() as u64;
                let dm = dm_strata(m)?.len() as u64;
                let f = sum_d1_dm(m)?;
                let reference = fixtures::smallest_largest_divisor_cuts().get(&(m as u64)).map(|r| r.sum);
                let bad = d1 + dm != f || reference.is_some_and(|r| r != d1 + dm);
                t.mismatches += bad as usize;
                let flag = if bad { "DIFF" } else if reference.is_some() { "ok" } else { "" };
                t.rows.push(vec![m.into(), d1.into(), dm.into(), (d1 + dm).into(), f.into(), ((d1 + dm) % 8).into(), opt(reference), flag.into()]);
            }
            8 => {
                let e = catalan_euler(m as u32)?;
                let s = catalan_segner(m as u32)?;
                let brute = if m as u32 <= BRUTEFORCE_MAX_M {
                    Some(count_triangulations_bruteforce(m as u32)?)
                } else {
                    None
                };
                let reference = fixtures::triangulations().get(&(m as u64)).copied();
                let es = e.to_string();
                let bad = e != s
                    || brute.is_some_and(|b| b.to_string() != es)
                    || reference.is_some_and(|r| r.to_string() != es);
                t.mismatches += bad as usize;
                let flag = if bad { "DIFF" } else if reference.is_some() { "ok" } else { "" };
                t.rows.push(vec![m.into(), big(&es), big(&s.to_string()), opt(brute), opt(reference), flag.into()]);
            }
            11 => {
                let r = count_geometric(m, false)?;
                let (vv, vs, ss) = kind_tally(&dm_strata(m)?);
                let sub = r.per_divisor.values().next().copied().unwrap_or(0);
                let bad = !r.discrepancies.is_empty()
                    || fixtures::cuts_by_kind()
                        .get(&(m as u64))
                        .is_some_and(|row| (row.vv, row.vs, row.ss) != (vv, vs, ss));
                t.mismatches += bad as usize;
                let flag = if bad { "DIFF" } else if r.table_total.is_some() { "ok" } else { "" };
                t.rows.push(vec![m.into(), vv.into(), vs.into(), ss.into(), sub.into(), r.per_divisor.len().into(), r.formula_total.into(), opt(r.table_total), flag.into()]);
            }
            13 => {
                let r = count_topological(m)?;
                let variants = r.formula_variant_totals.clone().unwrap_or_default();
                let per: Vec<Value> = r.per_divisor.iter().map(|(d, c)| Value::from(format!("{d}:{c}"))).collect();
                t.mismatches += !r.discrepancies.is_empty() as usize;
                let flag = if r.discrepancies.is_empty() { "ok" } else { "DIFF" };
                t.rows.push(vec![
                    m.into(),
                    Value::Array(per),
                    opt(r.enumerated_total),
                    opt(variants.get(crate::cutmodel::FORMULA_PLAIN).copied()),
                    opt(variants.get(crate::cutmodel::FORMULA_REDUCED).copied()),
                    opt(r.table_total),
                    flag.into(),
                ]);
            }
            _ => {
                for w in theorem3_witness(m)? {
                    let status = if !w.cell.applicable {
                        "not_applicable"
                    } else if w.ok() {
                        "ok"
                    } else {
                        t.mismatches += 1;
                        "DIFF"
                    };
                    t.rows.push(vec![
                        m.into(),
                        w.cell.d.into(),
                        w.cell.family.to_string().into(),
                        w.cell.applicable.into(),
                        set(&w.cell.values),
                        set(&w.witnessed),
                        set(&w.cell.degenerate_values),
                        set(&w.degenerate_witnessed),
                        status.into(),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

fn big(s: &str) -> Value {
    s.parse::<u64>().map(Value::from).unwrap_or_else(|_| Value::from(s))
}

fn set(s: &std::collections::BTreeSet<u64>) -> Value {
    Value::Array(s.iter().map(|&x| Value::from(x)).collect())
}

// ---------------------------------------------------------------------------
// Audit.

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub m: usize,
    pub swept_classes: usize,
    pub enumerated_classes: usize,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub max_m: usize,
    pub theorem1: Vec<CountReport>,
    pub theorem1_sweep: Vec<SweepSummary>,
    pub theorem2: Vec<CountReport>,
    pub theorem3: Vec<WitnessCell>,
    pub theorem4: MobiusScan,
}

/// Largest m of the coarse class sweep inside the audit.
pub const AUDIT_SWEEP_MAX_M: usize = 8;
pub const AUDIT_SWEEP: SweepConfig = SweepConfig {
    grid: 128,
    curve_samples: 256,
    crossing_scan: 2048,
};
pub const AUDIT_MAX_M: usize = 16;

/// Counting formulas against tables and enumerators for `3 <= m <= max_m`.
pub fn audit(max_m: usize) -> Result<(AuditReport, Vec<Value>)> {
    if !(3..=AUDIT_MAX_M).contains(&max_m) {
        return Err(invalid(format!("audit supports max_m in 3..={AUDIT_MAX_M}, got {max_m}")));
    }
    let mut ledger = Vec::new();
    let mut theorem1 = Vec::new();
    let mut theorem2 = Vec::new();
    let mut theorem3 = Vec::new();
    let mut theorem1_sweep = Vec::new();
    for m in 3..=max_m {
        let g = count_geometric(m, false)?;
        for d in &g.discrepancies {
            ledger.push(json!({"theorem": 1, "kind": "count", "record": to_value(d)?}));
        }
        theorem1.push(g);
        let t = count_topological(m)?;
        for d in &t.discrepancies {
            ledger.push(json!({"theorem": 2, "kind": "count", "record": to_value(d)?}));
        }
        theorem2.push(t);
        for w in theorem3_witness(m)? {
            if !w.ok() {
                ledger.push(json!({
                    "theorem": 3,
                    "kind": "object_count",
                    "record": {
                        "m": m,
                        "d": w.cell.d,
                        "family": w.cell.family.to_string(),
                        "expected": to_value(&w.cell.values)?,
                        "witnessed": to_value(&w.witnessed)?,
                        "missing": to_value(&w.missing)?,
                        "out_of_set": to_value(&w.out_of_set)?,
                    }
                }));
            }
            theorem3.push(w);
        }
        if m <= AUDIT_SWEEP_MAX_M {
            let rep = sweep_dm_classes(m, &AUDIT_SWEEP)?;
            let strata: std::collections::BTreeSet<_> = dm_strata(m)?
                .iter()
                .map(|c| class_signature(m, m, c))
                .collect::<Result<_>>()?;
            let swept: std::collections::BTreeSet<_> = rep.classes.keys().cloned().collect();
            let agree = swept == strata;
            if !agree {
                ledger.push(json!({
                    "theorem": 1,
                    "kind": "sweep",
                    "record": {"m": m, "swept": swept.len(), "enumerated": strata.len()}
                }));
            }
            theorem1_sweep.push(SweepSummary {
                m,
                swept_classes: swept.len(),
                enumerated_classes: strata.len(),
                agree,
            });
        }
    }
    let theorem4 = mobius_scan(max_m)?;
    for c in theorem4.chordal_violations.iter().chain(&theorem4.radial_violations) {
        ledger.push(json!({"theorem": 4, "kind": "single_body", "record": to_value(c)?}));
    }
    Ok((
        AuditReport {
            max_m,
            theorem1,
            theorem1_sweep,
            theorem2,
            theorem3,
            theorem4,
        },
        ledger,
    ))
}

pub fn cmd_audit(max_m: usize) -> Result<ReportEnvelope> {
    let (rep, ledger) = audit(max_m)?;
    Ok(ReportEnvelope::new("audit", json!({"max_m": max_m}), to_value(&rep)?, ledger))
}

pub fn cmd_tables(id: u32, m_lo: usize, m_hi: usize) -> Result<(Table, ReportEnvelope)> {
    let t = build_table(id, m_lo, m_hi)?;
    let discrepancies = t
        .records()
        .into_iter()
        .filter(|r| {
            let s = r.get("diff").or_else(|| r.get("status")).and_then(Value::as_str);
            s == Some("DIFF")
        })
        .collect();
    let env = ReportEnvelope::new(
        "tables",
        json!({"table": id, "m_min": m_lo, "m_max": m_hi}),
        json!({"title": t.title, "columns": t.columns, "rows": t.records()}),
        discrepancies,
    );
    Ok((t, env))
}

/// Per-divisor class lists for `cmd_enumerate`.
pub fn cmd_enumerate(m: usize, d: usize, mode: Mode) -> Result<ReportEnvelope> {
    let classes = crate::cutmodel::enumerate_cuts(m, d, mode)?;
    let formula = match (d, mode) {
        (1, Mode::Topological) => Some(d1_formula(m)),
        (1, Mode::Geometric) => Some(dm_formula(m)),
        (d, _) if d == m => Some(dm_formula(m)),
        _ => None,
    };
    let mut discrepancies = Vec::new();
    if let Some(f) = formula {
        if f != classes.len() as u64 {
            discrepancies.push(json!({"m": m, "d": d, "formula": f, "enumerated": classes.len()}));
        }
    }
    let mut rows = Vec::new();
    for c in &classes {
        rows.push(json!({
            "representative": c.representative.to_string(),
            "label": c.representative.label(),
            "members": c.members.iter().map(|x| x.label()).collect::<Vec<_>>(),
            "signature": c.signature.to_string(),
        }));
    }
    let mut results = BTreeMap::new();
    results.insert("count", json!(classes.len()));
    results.insert("formula", json!(formula));
    results.insert("classes", Value::Array(rows));
    Ok(ReportEnvelope::new(
        "enumerate",
        json!({"m": m, "divisor": d, "mode": to_value(&mode)?}),
        to_value(&results)?,
        discrepancies,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_rounded() {
        let v = canonicalize(json!({"b": 1.0 / 3.0, "a": [2.0, 7]}));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"a":[2.0,7],"b":0.333333333333}"#);
    }

    #[test]
    fn table_examples() {
        let t = build_table(11, 3, 15).unwrap();
        assert_eq!(t.rows.last().unwrap()[6], json!(148));
        assert_eq!(t.mismatches, 0);
        let t = build_table(8, 10, 10).unwrap();
        assert_eq!(t.rows[0][1], json!(1430));
        let t = build_table(13, 9, 9).unwrap();
        assert_eq!(t.rows[0][3], json!(48));
        assert_eq!(t.rows[0][5], json!(49));
        assert_eq!(t.rows[0][6], json!("DIFF"));
        assert!(build_table(7, 3, 5).is_err());
        assert!(build_table(1, 2, 5).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let e = cmd_enumerate(6, 1, Mode::Topological).unwrap();
        assert_eq!(e.results["count"], json!(7));
        let e = cmd_enumerate(5, 5, Mode::Geometric).unwrap();
        assert_eq!(e.results["count"], json!(12));
        let e = cmd_enumerate(4, 2, Mode::Topological).unwrap();
        assert_eq!(e.results["count"], json!(5));
        assert!(e.discrepancies.is_empty());
    }
}
