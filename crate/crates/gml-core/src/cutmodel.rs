//! Cut taxonomy of the regular m-gon, d-knives, class enumeration and the
//! counting formulas.
//!
//! Indices in a [`CutSpec`] are 1-based: vertex `V_i` sits at perimeter
//! parameter `i − 1` and side `S_j` spans `[j − 1, j]`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{build_arrangement, side_multiset, BoundaryKind, PlanarArrangement, Segment};
use crate::error::{invalid, GmlError, Result};
use crate::fixtures;
use crate::geom::{
    antipode_param, boundary_param_at_angle, clip_line, is_vertex_param, param_tol, shares_side,
    wrap_param, Line,
};
use crate::gielis::regular_polygon_radius;
use crate::numtheory::divisors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CutKind {
    VV,
    VS,
    SS,
}

impl fmt::Display for CutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutKind::VV => "VV",
            CutKind::VS => "VS",
            CutKind::SS => "SS",
        })
    }
}

/// Position of a side-to-side chord relative to the midpoint-to-midpoint
/// chord between the same two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetClass {
    AtMidpoints,
    Shorter,
    Longer,
    /// Longer than midpoint-to-midpoint, on the near side of the centre.
    LeftOfMid,
    /// Longer than midpoint-to-midpoint, beyond the centre.
    RightOfMid,
    NotApplicable,
}

impl OffsetClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            OffsetClass::AtMidpoints => "at_midpoints",
            OffsetClass::Shorter => "shorter",
            OffsetClass::Longer => "longer",
            OffsetClass::LeftOfMid => "left_of_mid",
            OffsetClass::RightOfMid => "right_of_mid",
            OffsetClass::NotApplicable => "not_applicable",
        }
    }
}

impl FromStr for OffsetClass {
    type Err = GmlError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "at_midpoints" | "mid" => OffsetClass::AtMidpoints,
            "shorter" => OffsetClass::Shorter,
            "longer" => OffsetClass::Longer,
            "left_of_mid" | "left" => OffsetClass::LeftOfMid,
            "right_of_mid" | "right" => OffsetClass::RightOfMid,
            "not_applicable" | "na" => OffsetClass::NotApplicable,
            _ => return Err(invalid(format!("unknown offset class {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CutSpec {
    pub kind: CutKind,
    pub i: usize,
    pub j: usize,
    pub through_center: bool,
    pub offset_class: OffsetClass,
}

impl CutSpec {
    pub fn new(kind: CutKind, i: usize, j: usize) -> Self {
        CutSpec {
            kind,
            i,
            j,
            through_center: false,
            offset_class: OffsetClass::NotApplicable,
        }
    }

    pub fn center(mut self) -> Self {
        self.through_center = true;
        self
    }

    pub fn offset(mut self, o: OffsetClass) -> Self {
        self.offset_class = o;
        self
    }

    /// Short label such as `SS13C` or `SS12<`.
    pub fn label(&self) -> String {
        let mut s = format!("{}{}{}", self.kind, self.i, self.j);
        if self.through_center {
            s.push('C');
        }
        s.push_str(match self.offset_class {
            OffsetClass::AtMidpoints => "=",
            OffsetClass::Shorter => "<",
            OffsetClass::Longer => ">",
            OffsetClass::LeftOfMid => ">l",
            OffsetClass::RightOfMid => ">r",
            OffsetClass::NotApplicable => "",
        });
        s
    }

    /// Position of `j` relative to `i`, in `1..=m`.
    fn rel_j(&self, m: usize) -> usize {
        (self.j + m - self.i) % m + 1
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if m < 3 {
            return Err(invalid(format!("cuts need m >= 3, got {m}")));
        }
        if !(1..=m).contains(&self.i) || !(1..=m).contains(&self.j) {
            return Err(invalid(format!("indices of {} out of 1..={m}", self.label())));
        }
        let r = self.rel_j(m);
        let bad = |why: &str| Err(invalid(format!("{} is not a valid cut of the {m}-gon: {why}", self.label())));
        match self.kind {
            CutKind::VV => {
                if r == 1 || r == 2 || r == m {
                    return bad("vertices coincide or are adjacent");
                }
                let centre = m % 2 == 0 && r == m / 2 + 1;
                if self.through_center != centre {
                    return bad("centre flag does not match the diagonal");
                }
                if self.offset_class != OffsetClass::NotApplicable {
                    return bad("offset classes apply to side-to-side cuts");
                }
            }
            CutKind::VS => {
                if r == 1 || r == m {
                    return bad("the side contains the vertex");
                }
                if self.through_center && !(m % 2 == 1 && r == (m + 1) / 2) {
                    return bad("only the side opposite a vertex of an odd polygon admits a centre cut");
                }
                if self.offset_class != OffsetClass::NotApplicable {
                    return bad("offset classes apply to side-to-side cuts");
                }
            }
            CutKind::SS => {
                if r == 1 {
                    return bad("both ends on one side");
                }
                let rc = r.min(m + 2 - r);
                let even_opposite = m % 2 == 0 && rc == m / 2 + 1;
                let centre_bearing = m % 2 == 1 && rc == (m + 1) / 2;
                use OffsetClass::*;
                let ok = if even_opposite {
                    if self.through_center {
                        matches!(self.offset_class, AtMidpoints | NotApplicable)
                    } else {
                        self.offset_class == NotApplicable
                    }
                } else if self.through_center {
                    centre_bearing && self.offset_class == NotApplicable
                } else if centre_bearing {
                    matches!(self.offset_class, Shorter | AtMidpoints | LeftOfMid | RightOfMid | NotApplicable)
                } else {
                    matches!(self.offset_class, Shorter | AtMidpoints | Longer | NotApplicable)
                };
                if !ok {
                    return bad("offset class or centre flag not realisable for these sides");
                }
            }
        }
        Ok(())
    }

    /// Perimeter parameters `(a, b)` of a representative chord.
    pub fn chord(&self, m: usize) -> Result<(f64, f64)> {
        self.validate(m)?;
        let r = self.rel_j(m);
        let shift = (self.i - 1) as f64;
        let (a, b) = match self.kind {
            CutKind::VV => (0.0, (r - 1) as f64),
            CutKind::VS => {
                let tb = if self.through_center {
                    0.5
                } else if r <= m / 2 + 1 {
                    0.3
                } else {
                    0.7
                };
                (0.0, (r - 1) as f64 + tb)
            }
            CutKind::SS => {
                let rc = r.min(m + 2 - r);
                let mirrored = rc != r;
                let (ta, tb) = ss_offsets(m, rc, self.through_center, self.offset_class);
                let (ta, tb) = if mirrored { (1.0 - tb, 1.0 - ta) } else { (ta, tb) };
                (ta, (r - 1) as f64 + tb)
            }
        };
        Ok((wrap_param(m, a + shift), wrap_param(m, b + shift)))
    }
}

/// `(ta, tb)` along sides 1 and `rc` for the canonical orientation
/// `rc <= m/2 + 1`.
fn ss_offsets(m: usize, rc: usize, centre: bool, o: OffsetClass) -> (f64, f64) {
    let even_opposite = m % 2 == 0 && rc == m / 2 + 1;
    let side = (rc - 1) as f64;
    // Fraction along side rc of the antipode of parameter ta on side 1.
    let through = |ta: f64| antipode_param(m, ta) - side;
    if even_opposite {
        return if centre { (0.5, 0.5) } else { (0.7, 0.3) };
    }
    if centre {
        return (0.25, through(0.25));
    }
    match o {
        OffsetClass::Shorter | OffsetClass::NotApplicable => (0.7, 0.3),
        OffsetClass::AtMidpoints => (0.5, 0.5),
        OffsetClass::Longer => (0.3, 0.7),
        OffsetClass::LeftOfMid => (0.4, (0.4 + through(0.4)) / 2.0),
        OffsetClass::RightOfMid => (0.1, (through(0.1) + 1.0) / 2.0),
    }
}

impl fmt::Display for CutSpec {
    /// `KIND:i,j[:center][:offset]`, the form accepted by `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{}", self.kind, self.i, self.j)?;
        if self.through_center {
            f.write_str(":center")?;
        }
        if self.offset_class != OffsetClass::NotApplicable {
            write!(f, ":{}", self.offset_class.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for CutSpec {
    type Err = GmlError;
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = match parts.next().map(str::to_ascii_uppercase).as_deref() {
            Some("VV") => CutKind::VV,
            Some("VS") => CutKind::VS,
            Some("SS") => CutKind::SS,
            _ => return Err(invalid(format!("cut {s:?} must start with VV, VS or SS"))),
        };
        let idx = parts
            .next()
            .ok_or_else(|| invalid(format!("cut {s:?} lacks indices")))?;
        let (i, j) = idx
            .split_once(',')
            .ok_or_else(|| invalid(format!("indices {idx:?} must read i,j")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| invalid(format!("bad index {t:?}")))
        };
        let mut c = CutSpec::new(kind, parse(i)?, parse(j)?);
        for p in parts {
            match p.to_ascii_lowercase().as_str() {
                "center" | "centre" | "c" => c.through_center = true,
                other => c.offset_class = other.parse()?,
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Geometric,
    Topological,
}

impl FromStr for Mode {
    type Err = GmlError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" | "geo" => Ok(Mode::Geometric),
            "topological" | "top" => Ok(Mode::Topological),
            _ => Err(invalid(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KnifeMode {
    Chordal,
    Radial,
}

impl FromStr for KnifeMode {
    type Err = GmlError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chordal" => Ok(KnifeMode::Chordal),
            "radial" => Ok(KnifeMode::Radial),
            _ => Err(invalid(format!("unknown knife mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnifeFamily {
    pub m: usize,
    pub d: usize,
    pub alpha: f64,
    pub delta: f64,
    pub mode: KnifeMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum KnifeBlade {
    Line(Line),
    /// Half-line from the centre at polar angle `angle`.
    Ray { angle: f64 },
}

fn check_divisor(m: usize, d: usize) -> Result<()> {
    if m < 3 {
        return Err(invalid(format!("knives need m >= 3, got {m}")));
    }
    if d == 0 || m % d != 0 {
        return Err(invalid(format!("{d} does not divide {m}")));
    }
    Ok(())
}

/// The `d` blades of a family, rotated by steps of `(m/d)·2π/m`. A radial
/// blade points along the normal of the corresponding line.
pub fn knife_lines(f: &KnifeFamily) -> Result<Vec<KnifeBlade>> {
    check_divisor(f.m, f.d)?;
    let s = f.m / f.d;
    Ok((0..f.d)
        .map(|i| {
            let phi = f.alpha + 2.0 * PI * (i * s) as f64 / f.m as f64;
            match f.mode {
                KnifeMode::Chordal => KnifeBlade::Line(Line {
                    phi,
                    delta: f.delta,
                }),
                KnifeMode::Radial => KnifeBlade::Ray {
                    angle: PI / 2.0 - phi,
                },
            }
        })
        .collect())
}

/// Blades clipped to the polygon as arrangement segments.
pub fn knife_segments(f: &KnifeFamily) -> Result<Vec<Segment>> {
    knife_lines(f)?
        .into_iter()
        .map(|b| match b {
            KnifeBlade::Line(l) => clip_line(f.m, &l)
                .map(|(u, v)| Segment::chord(u, v))
                .ok_or_else(|| invalid(format!("line {l:?} does not cut the {}-gon", f.m))),
            KnifeBlade::Ray { angle } => Ok(Segment::radial(boundary_param_at_angle(f.m, angle))),
        })
        .collect()
}

pub fn knife_arrangement(f: &KnifeFamily) -> Result<PlanarArrangement> {
    build_arrangement(f.m, BoundaryKind::Polygon, &knife_segments(f)?)
}

fn same_param(m: usize, x: f64, y: f64) -> bool {
    let d = (x - y).rem_euclid(m as f64);
    d.min(m as f64 - d) <= param_tol(m)
}

/// Rotated copies of one chord under the `d`-knife, with coincident
/// copies removed. The flag reports whether any were removed.
pub fn knife_pattern(m: usize, d: usize, chord: (f64, f64)) -> Result<(Vec<(f64, f64)>, bool)> {
    check_divisor(m, d)?;
    let s = (m / d) as f64;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(d);
    let mut degenerate = false;
    for k in 0..d {
        let c = (
            wrap_param(m, chord.0 + s * k as f64),
            wrap_param(m, chord.1 + s * k as f64),
        );
        let dup = out.iter().any(|&(a, b)| {
            (same_param(m, a, c.0) && same_param(m, b, c.1))
                || (same_param(m, a, c.1) && same_param(m, b, c.0))
        });
        if dup {
            degenerate = true;
        } else {
            out.push(c);
        }
    }
    Ok((out, degenerate))
}

/// Arrangement of the `d`-knife pattern of one chord (or, radially, of
/// the ray from the centre to the chord's first endpoint).
pub fn pattern_arrangement(
    m: usize,
    d: usize,
    chord: (f64, f64),
    mode: KnifeMode,
) -> Result<(PlanarArrangement, bool)> {
    let (pat, degenerate) = match mode {
        KnifeMode::Chordal => knife_pattern(m, d, chord)?,
        KnifeMode::Radial => knife_pattern(m, d, (chord.0, chord.0))?,
    };
    let segs: Vec<Segment> = pat
        .iter()
        .map(|&(a, b)| match mode {
            KnifeMode::Chordal => Segment::chord(a, b),
            KnifeMode::Radial => Segment::radial(a),
        })
        .collect();
    Ok((build_arrangement(m, BoundaryKind::Polygon, &segs)?, degenerate))
}

/// Combinatorial fingerprint of a knife pattern: how many ends of the
/// generating chord sit on polygon vertices, the face count, and the
/// sorted face side counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassSignature {
    pub vertex_endpoints: u8,
    pub faces: usize,
    pub sides: Vec<usize>,
}

impl fmt::Display for ClassSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &s in &self.sides {
            *counts.entry(s).or_default() += 1;
        }
        let parts: Vec<String> = counts.iter().map(|(s, n)| format!("{n}x{s}")).collect();
        write!(f, "v{} f{} [{}]", self.vertex_endpoints, self.faces, parts.join(" "))
    }
}

pub(crate) fn vertex_endpoints(m: usize, chord: (f64, f64)) -> u8 {
    is_vertex_param(m, chord.0) as u8 + is_vertex_param(m, chord.1) as u8
}

pub fn chord_signature(m: usize, d: usize, chord: (f64, f64)) -> Result<ClassSignature> {
    let (arr, _) = pattern_arrangement(m, d, chord, KnifeMode::Chordal)?;
    Ok(ClassSignature {
        vertex_endpoints: vertex_endpoints(m, chord),
        faces: arr.face_count(),
        sides: side_multiset(&arr),
    })
}

pub fn class_signature(m: usize, d: usize, cut: &CutSpec) -> Result<ClassSignature> {
    chord_signature(m, d, cut.chord(m)?)
}

/// Every geometric class of the m-knife, one canonical cut each.
pub fn dm_strata(m: usize) -> Result<Vec<CutSpec>> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3, got {m}")));
    }
    use OffsetClass::*;
    let mut out = Vec::new();
    for j in 3..=m / 2 + 1 {
        let c = CutSpec::new(CutKind::VV, 1, j);
        out.push(if m % 2 == 0 && j == m / 2 + 1 { c.center() } else { c });
    }
    for j in 2..=(m + 1) / 2 {
        out.push(CutSpec::new(CutKind::VS, 1, j));
        if m % 2 == 1 && j == (m + 1) / 2 {
            out.push(CutSpec::new(CutKind::VS, 1, j).center());
        }
    }
    for j in 2..=m / 2 + 1 {
        let c = CutSpec::new(CutKind::SS, 1, j);
        if m % 2 == 0 && j == m / 2 + 1 {
            out.push(c);
            out.push(c.center().offset(AtMidpoints));
        } else if m % 2 == 1 && j == (m + 1) / 2 {
            out.push(c.offset(Shorter));
            out.push(c.offset(AtMidpoints));
            out.push(c.offset(LeftOfMid));
            out.push(c.center());
            out.push(c.offset(RightOfMid));
        } else {
            out.push(c.offset(Shorter));
            out.push(c.offset(AtMidpoints));
            out.push(c.offset(Longer));
        }
    }
    Ok(out)
}

pub fn enumerate_d1_cuts(m: usize, mode: Mode) -> Result<Vec<CutSpec>> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3, got {m}")));
    }
    match mode {
        // One-to-one inheritance from the m-knife.
        Mode::Geometric => dm_strata(m),
        Mode::Topological => {
            let mut out = Vec::new();
            for j in 3..=m / 2 + 1 {
                let c = CutSpec::new(CutKind::VV, 1, j);
                out.push(if m % 2 == 0 && j == m / 2 + 1 { c.center() } else { c });
            }
            for j in 2..=(m + 1) / 2 {
                out.push(CutSpec::new(CutKind::VS, 1, j));
            }
            for j in 2..=m / 2 + 1 {
                out.push(CutSpec::new(CutKind::SS, 1, j));
            }
            Ok(out)
        }
    }
}

/// Classes of the m-knife. Both modes give the same list.
pub fn enumerate_dm_cuts(m: usize, _mode: Mode) -> Result<Vec<CutSpec>> {
    dm_strata(m)
}

/// One class of a `d`-knife: its signature, the first canonical cut that
/// realises it, and every canonical cut that does.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutClass {
    pub signature: ClassSignature,
    pub representative: CutSpec,
    pub members: Vec<CutSpec>,
}

/// Classes of the `d`-knife. Topological mode groups the m-knife classes
/// by the signature of their `d`-knife pattern; geometric mode keeps the
/// inherited m-knife classes.
pub fn enumerate_cuts(m: usize, d: usize, mode: Mode) -> Result<Vec<CutClass>> {
    check_divisor(m, d)?;
    let strata = dm_strata(m)?;
    let mut classes: Vec<CutClass> = Vec::new();
    for c in strata {
        let sig = class_signature(m, d, &c)?;
        if mode == Mode::Topological {
            if let Some(cls) = classes.iter_mut().find(|k| k.signature == sig) {
                cls.members.push(c);
                continue;
            }
        }
        classes.push(CutClass {
            signature: sig,
            representative: c,
            members: vec![c],
        });
    }
    Ok(classes)
}

/// `4m − 3` for odd m, `4m − 5` for even m.
pub fn sum_d1_dm(m: usize) -> Result<u64> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3, got {m}")));
    }
    let m = m as u64;
    Ok(if m % 2 == 1 { 4 * m - 3 } else { 4 * m - 5 })
}

/// Closed forms for the d1 count and m-knife count.
pub fn d1_formula(m: usize) -> u64 {
    let k = (m / 2) as u64;
    if m % 2 == 1 {
        3 * k - 1
    } else {
        3 * k - 2
    }
}

pub fn dm_formula(m: usize) -> u64 {
    let k = (m / 2) as u64;
    if m % 2 == 1 {
        5 * k + 2
    } else {
        5 * k - 3
    }
}

/// Per-kind tallies `(VV, VS, SS)` of the m-knife classes in closed form.
pub fn dm_kind_formula(m: usize) -> (u64, u64, u64) {
    let k = (m / 2) as u64;
    if m % 2 == 1 {
        (k - 1, k + 1, 3 * (k - 1) + 5)
    } else {
        (k - 1, k - 1, 3 * (k - 1) + 2)
    }
}

/// Per-kind tallies `(VV, VS, SS)` of the one-knife classes in closed form.
pub fn d1_kind_formula(m: usize) -> (u64, u64, u64) {
    let k = (m / 2) as u64;
    if m % 2 == 1 {
        (k - 1, k, k)
    } else {
        (k - 1, k - 1, k)
    }
}

pub fn kind_tally(cuts: &[CutSpec]) -> (u64, u64, u64) {
    let n = |k| cuts.iter().filter(|c| c.kind == k).count() as u64;
    (n(CutKind::VV), n(CutKind::VS), n(CutKind::SS))
}

// ---------------------------------------------------------------------------
// Parameter sweep over (α, δ).

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepConfig {
    /// Cells per axis of the 2D grid.
    pub grid: usize,
    /// Samples along each critical curve.
    pub curve_samples: usize,
    /// Scan resolution when locating curve crossings.
    pub crossing_scan: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            grid: 512,
            curve_samples: 512,
            crossing_scan: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SampleCounts {
    pub two_d: usize,
    pub one_d: usize,
    pub zero_d: usize,
    /// Samples whose line missed the polygon.
    pub outside: usize,
    /// Samples refused by the kernel as ambiguous snaps.
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub m: usize,
    pub config: SweepConfig,
    /// Class signature → number of samples that realised it.
    #[serde(serialize_with = "classes_as_list")]
    pub classes: BTreeMap<ClassSignature, usize>,
    pub samples: SampleCounts,
}

fn classes_as_list<S: serde::Serializer>(
    classes: &BTreeMap<ClassSignature, usize>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        signature: &'a ClassSignature,
        samples: usize,
    }
    ser.collect_seq(classes.iter().map(|(signature, &samples)| Entry { signature, samples }))
}

impl SweepReport {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// A curve `δ = f(α)` on which the m-knife pattern changes combinatorially.
#[derive(Debug, Clone, Copy)]
enum Critical {
    /// The line passes through vertex `v`.
    Vertex(usize),
    /// The line passes through the centre.
    Centre,
    /// The line meets its `j`-th rotated copy on the boundary.
    Meet { j: usize, positive: bool },
}

impl Critical {
    fn delta(&self, m: usize, alpha: f64) -> f64 {
        match *self {
            Critical::Vertex(v) => -(alpha + 2.0 * PI * v as f64 / m as f64).sin(),
            Critical::Centre => 0.0,
            Critical::Meet { j, positive } => {
                let h = PI * j as f64 / m as f64;
                if positive {
                    h.cos() * regular_polygon_radius(1.5 * PI - alpha - h, m as u32)
                } else {
                    -h.cos() * regular_polygon_radius(0.5 * PI - alpha - h, m as u32)
                }
            }
        }
    }
}

fn critical_curves(m: usize) -> Vec<Critical> {
    let mut c: Vec<Critical> = (0..m).map(Critical::Vertex).collect();
    c.push(Critical::Centre);
    for j in 1..m.div_ceil(2) {
        c.push(Critical::Meet { j, positive: true });
        c.push(Critical::Meet { j, positive: false });
    }
    c
}

enum Sampled {
    Class(ClassSignature),
    Outside,
    Rejected,
}

/// Faces thinner than this mark a placement that only differs from a
/// degenerate one by rounding.
const SLIVER_AREA: f64 = 1e-10;

/// Parameter distance under which a chord counts as lying along a side.
const SIDE_HUGGING: f64 = 1e-7;

fn sample_line(m: usize, alpha: f64, delta: f64) -> Sampled {
    let Some(chord) = clip_line(m, &Line { phi: alpha, delta }) else {
        return Sampled::Outside;
    };
    if shares_side(m, chord.0, chord.1, SIDE_HUGGING) {
        return Sampled::Rejected;
    }
    let Ok((arr, _)) = pattern_arrangement(m, m, chord, KnifeMode::Chordal) else {
        return Sampled::Rejected;
    };
    if arr.faces.iter().any(|f| f.area < SLIVER_AREA) {
        return Sampled::Rejected;
    }
    Sampled::Class(ClassSignature {
        vertex_endpoints: vertex_endpoints(m, chord),
        faces: arr.face_count(),
        sides: side_multiset(&arr),
    })
}

#[derive(Default)]
struct Tally {
    classes: BTreeMap<ClassSignature, usize>,
    hits: usize,
    outside: usize,
    rejected: usize,
}

impl Tally {
    fn add(mut self, s: Sampled) -> Self {
        match s {
            Sampled::Class(sig) => {
                *self.classes.entry(sig).or_default() += 1;
                self.hits += 1;
            }
            Sampled::Outside => self.outside += 1,
            Sampled::Rejected => self.rejected += 1,
        }
        self
    }

    fn merge(mut self, o: Tally) -> Self {
        for (k, v) in o.classes {
            *self.classes.entry(k).or_default() += v;
        }
        self.hits += o.hits;
        self.outside += o.outside;
        self.rejected += o.rejected;
        self
    }
}

/// Classifies the m-knife over the rectangle `α ∈ [−π/m, π/m]`,
/// `δ ∈ [−1, 1]`: cell centres of a 2D grid, samples along every critical
/// curve, and every pairwise crossing of critical curves.
pub fn sweep_dm_classes(m: usize, cfg: &SweepConfig) -> Result<SweepReport> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3, got {m}")));
    }
    if cfg.grid == 0 || cfg.curve_samples == 0 || cfg.crossing_scan < 2 {
        return Err(invalid("sweep resolutions must be positive"));
    }
    let half = PI / m as f64;
    let n = cfg.grid;
    let two_d = (0..n)
        .into_par_iter()
        .map(|r| {
            let alpha = -half + 2.0 * half * (r as f64 + 0.5) / n as f64;
            (0..n).fold(Tally::default(), |t, c| {
                let delta = -1.0 + 2.0 * (c as f64 + 0.5) / n as f64;
                t.add(sample_line(m, alpha, delta))
            })
        })
        .reduce(Tally::default, Tally::merge);

    let curves = critical_curves(m);
    let one_d = curves
        .par_iter()
        .map(|cv| {
            (0..cfg.curve_samples).fold(Tally::default(), |t, i| {
                let alpha = -half + 2.0 * half * (i as f64 + 0.5) / cfg.curve_samples as f64;
                t.add(sample_line(m, alpha, cv.delta(m, alpha)))
            })
        })
        .reduce(Tally::default, Tally::merge);

    let mut pairs = Vec::new();
    for a in 0..curves.len() {
        for b in a + 1..curves.len() {
            pairs.push((curves[a], curves[b]));
        }
    }
    let zero_d = pairs
        .par_iter()
        .map(|&(p, q)| {
            crossings(m, p, q, cfg.crossing_scan)
                .into_iter()
                .fold(Tally::default(), |t, alpha| {
                    t.add(sample_line(m, alpha, p.delta(m, alpha)))
                })
        })
        .reduce(Tally::default, Tally::merge);

    let hits = (two_d.hits, one_d.hits, zero_d.hits);
    let all = two_d.merge(one_d).merge(zero_d);
    Ok(SweepReport {
        m,
        config: *cfg,
        classes: all.classes,
        samples: SampleCounts {
            two_d: hits.0,
            one_d: hits.1,
            zero_d: hits.2,
            outside: all.outside,
            rejected: all.rejected,
        },
    })
}

/// α values in a slightly widened range where two critical curves cross.
fn crossings(m: usize, p: Critical, q: Critical, scan: usize) -> Vec<f64> {
    let half = PI / m as f64;
    let lo = -half * 1.01;
    let hi = half * 1.01;
    let f = |a: f64| p.delta(m, a) - q.delta(m, a);
    let mut out = Vec::new();
    let mut prev_a = lo;
    let mut prev_f = f(lo);
    for i in 1..=scan {
        let a = lo + (hi - lo) * i as f64 / scan as f64;
        let fa = f(a);
        if prev_f == 0.0 {
            out.push(prev_a);
        } else if fa != 0.0 && (prev_f > 0.0) != (fa > 0.0) {
            let (mut x0, mut x1, mut f0) = (prev_a, a, prev_f);
            for _ in 0..200 {
                let mid = 0.5 * (x0 + x1);
                if mid == x0 || mid == x1 {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    x0 = mid;
                    x1 = mid;
                    break;
                }
                if (fm > 0.0) == (f0 > 0.0) {
                    x0 = mid;
                    f0 = fm;
                } else {
                    x1 = mid;
                }
            }
            // Reject jumps: a true crossing has a small residual.
            let x = 0.5 * (x0 + x1);
            if f(x).abs() < 1e-12 {
                out.push(x);
            }
        }
        prev_a = a;
        prev_f = fa;
    }
    if prev_f == 0.0 {
        out.push(prev_a);
    }
    out
}

// ---------------------------------------------------------------------------
// Counting formulas.

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub m: u64,
    pub left: String,
    pub left_value: u64,
    pub right: String,
    pub right_value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub m: u64,
    pub mode: Mode,
    pub per_divisor: BTreeMap<u64, u64>,
    pub formula_total: u64,
    pub formula_variant_totals: Option<BTreeMap<String, u64>>,
    pub table_total: Option<u64>,
    pub enumerated_total: Option<u64>,
    pub discrepancies: Vec<Discrepancy>,
}

fn discrepancies(m: u64, sources: &[(String, Option<u64>)]) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for a in 0..sources.len() {
        for b in a + 1..sources.len() {
            if let ((la, Some(va)), (lb, Some(vb))) = (&sources[a], &sources[b]) {
                if va != vb {
                    out.push(Discrepancy {
                        m,
                        left: la.clone(),
                        left_value: *va,
                        right: lb.clone(),
                        right_value: *vb,
                    });
                }
            }
        }
    }
    out
}

/// SS count of the m-knife from the step-3 recurrence with bases
/// `SS(2) = 2` and `SS(3) = 5`, run backwards once for `SS(1) = 2`.
pub fn ss_recurrence(m: usize) -> u64 {
    let m = m as i64;
    let v = if m % 2 == 0 {
        2 + 3 * (m / 2 - 1)
    } else {
        5 + 3 * ((m - 3) / 2)
    };
    v as u64
}

/// Per-divisor subtotal `m + 1 + SS(m − 2)` (even) or `m + 2 + SS(m − 2)`
/// (odd), plus `m` when chords between adjacent vertices are allowed.
pub fn geometric_subtotal(m: usize, convex_sides: bool) -> u64 {
    let base = if m % 2 == 0 { m as u64 + 1 } else { m as u64 + 2 };
    let extra = if convex_sides { m as u64 } else { 0 };
    base + ss_recurrence(m - 2) + extra
}

pub fn count_geometric(m: usize, convex_sides: bool) -> Result<CountReport> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3, got {m}")));
    }
    let prof = divisors(m as u64)?;
    let sub = geometric_subtotal(m, convex_sides);
    let per_divisor: BTreeMap<u64, u64> = prof.divisors.iter().map(|&d| (d, sub)).collect();
    let formula_total = sub * prof.divisors.len() as u64;
    let table_total = if convex_sides {
        None
    } else {
        fixtures::cuts_by_kind().get(&(m as u64)).map(|r| r.total)
    };
    let strata = dm_strata(m)?.len() as u64 + if convex_sides { m as u64 } else { 0 };
    let enumerated_total = Some(strata * prof.divisors.len() as u64);
    let sources = vec![
        ("formula".to_string(), Some(formula_total)),
        ("table".to_string(), table_total),
        ("enumerated".to_string(), enumerated_total),
    ];
    Ok(CountReport {
        m: m as u64,
        mode: Mode::Geometric,
        per_divisor,
        formula_total,
        formula_variant_totals: None,
        table_total,
        enumerated_total,
        discrepancies: discrepancies(m as u64, &sources),
    })
}

/// Topological total with the odd form `8k + 1 + 3Nk + Σ⌊k/d⌋ + 2N` and
/// the even form `8k − 5 + 3Nk + Σ⌊(k−1)/d⌋`, sums over nontrivial
/// divisors.
pub fn topological_formula_plain(m: usize) -> Result<u64> {
    let prof = divisors(m as u64)?;
    let k = m as u64 / 2;
    let nontrivial = &prof.divisors[1..prof.divisors.len() - 1];
    let n = nontrivial.len() as u64;
    Ok(if m % 2 == 1 {
        8 * k + 1 + 3 * n * k + nontrivial.iter().map(|d| k / d).sum::<u64>() + 2 * n
    } else {
        8 * k - 5 + 3 * n * k + nontrivial.iter().map(|d| (k - 1) / d).sum::<u64>()
    })
}

/// As [`topological_formula_plain`], with the even form reduced by `N`.
pub fn topological_formula_reduced(m: usize) -> Result<u64> {
    let plain = topological_formula_plain(m)?;
    if m % 2 == 1 {
        return Ok(plain);
    }
    let n = divisors(m as u64)?.nontrivial as u64;
    Ok(plain - n)
}

pub const FORMULA_PLAIN: &str = "formula_plain";
pub const FORMULA_REDUCED: &str = "formula_reduced";

pub fn count_topological(m: usize) -> Result<CountReport> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3, got {m}")));
    }
    let plain = topological_formula_plain(m)?;
    let reduced = topological_formula_reduced(m)?;
    let prof = divisors(m as u64)?;
    let mut per_divisor = BTreeMap::new();
    for &d in &prof.divisors {
        per_divisor.insert(d, enumerate_cuts(m, d as usize, Mode::Topological)?.len() as u64);
    }
    let enumerated_total: u64 = per_divisor.values().sum();
    let table_total = fixtures::topological_totals().get(&(m as u64)).map(|r| r.total);
    let mut variants = BTreeMap::new();
    variants.insert(FORMULA_PLAIN.to_string(), plain);
    variants.insert(FORMULA_REDUCED.to_string(), reduced);
    let sources = vec![
        (FORMULA_PLAIN.to_string(), Some(plain)),
        (FORMULA_REDUCED.to_string(), Some(reduced)),
        ("table".to_string(), table_total),
        ("enumerated".to_string(), Some(enumerated_total)),
    ];
    Ok(CountReport {
        m: m as u64,
        mode: Mode::Topological,
        per_divisor,
        formula_total: reduced,
        formula_variant_totals: Some(variants),
        table_total,
        enumerated_total: Some(enumerated_total),
        discrepancies: discrepancies(m as u64, &sources),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn topological_lists() {
        let six: Vec<String> = enumerate_d1_cuts(6, Mode::Topological)
            .unwrap()
            .iter()
            .map(|c| format!("{}{}{}", c.kind, c.i, c.j))
            .collect();
        assert_eq!(six, ["VV13", "VV14", "VS12", "VS13", "SS12", "SS13", "SS14"]);
        assert_eq!(enumerate_d1_cuts(5, Mode::Topological).unwrap().len(), 5);
        assert_eq!(enumerate_d1_cuts(3, Mode::Topological).unwrap().len(), 2);
    }

    #[test]
    fn strata_counts() {
        for m in 3..=30 {
            let s = dm_strata(m).unwrap();
            assert_eq!(s.len() as u64, dm_formula(m), "m={m}");
            assert_eq!(kind_tally(&s), dm_kind_formula(m), "m={m}");
            let t = enumerate_d1_cuts(m, Mode::Topological).unwrap();
            assert_eq!(kind_tally(&t), d1_kind_formula(m), "m={m}");
            assert_eq!(t.len() as u64 + s.len() as u64, sum_d1_dm(m).unwrap());
            for c in &s {
                c.validate(m).unwrap();
            }
        }
    }

    #[test]
    fn strata_match_published_kinds() {
        let table = crate::fixtures::cuts_by_kind();
        for m in 3..=15 {
            let row = table[&(m as u64)];
            let s = dm_strata(m).unwrap();
            assert_eq!(kind_tally(&s), (row.vv, row.vs, row.ss), "m={m}");
            assert_eq!(s.len() as u64, row.subtotal, "m={m}");
        }
    }

    #[test]
    fn smallest_divisor_has_fewest_classes() {
        for m in 3..=15 {
            let r = count_topological(m).unwrap();
            let d1 = r.per_divisor[&1];
            assert!(r.per_divisor.values().all(|&c| d1 <= c), "m={m}: {:?}", r.per_divisor);
        }
    }

    #[test]
    fn cut_parse_round_trip() {
        let c: CutSpec = "SS:1,3:center".parse().unwrap();
        assert!(c.through_center);
        assert_eq!(c.to_string(), "SS:1,3:center");
        let c: CutSpec = "ss:1,2:shorter".parse().unwrap();
        assert_eq!(c.offset_class, OffsetClass::Shorter);
        assert!("XX:1,2".parse::<CutSpec>().is_err());
        assert!("VV:1".parse::<CutSpec>().is_err());
    }

    #[test]
    fn validation() {
        assert!(CutSpec::new(CutKind::VV, 1, 2).validate(5).is_err());
        assert!(CutSpec::new(CutKind::VS, 1, 1).validate(5).is_err());
        assert!(CutSpec::new(CutKind::SS, 2, 2).validate(5).is_err());
        assert!(CutSpec::new(CutKind::VS, 1, 3).center().validate(5).is_ok());
        assert!(CutSpec::new(CutKind::VS, 1, 3).center().validate(6).is_err());
        assert!(CutSpec::new(CutKind::VV, 1, 4).center().validate(6).is_ok());
        assert!(CutSpec::new(CutKind::VV, 1, 4).validate(6).is_err());
    }

    #[test]
    fn centre_chords_pass_through_centre() {
        use crate::geom::perimeter_point;
        for m in 3..=15 {
            for c in dm_strata(m).unwrap().iter().filter(|c| c.through_center) {
                let (a, b) = c.chord(m).unwrap();
                let (p, q) = (perimeter_point(m, a), perimeter_point(m, b));
                assert!(p.cross(q).abs() < 1e-12, "{} m={m}", c.label());
            }
        }
    }

    #[test]
    fn strata_signatures_are_distinct() {
        for m in 3..=12 {
            let s = dm_strata(m).unwrap();
            let sigs: BTreeSet<_> = s.iter().map(|c| class_signature(m, m, c).unwrap()).collect();
            assert_eq!(sigs.len(), s.len(), "m={m}");
        }
    }

    #[test]
    fn knife_examples() {
        let f = KnifeFamily {
            m: 4,
            d: 1,
            alpha: 0.0,
            delta: 0.0,
            mode: KnifeMode::Chordal,
        };
        let l = knife_lines(&f).unwrap();
        assert_eq!(l, vec![KnifeBlade::Line(Line { phi: 0.0, delta: 0.0 })]);
        let f6 = KnifeFamily { m: 6, d: 3, ..f };
        let l = knife_lines(&f6).unwrap();
        assert_eq!(l.len(), 3);
        if let (KnifeBlade::Line(a), KnifeBlade::Line(b)) = (l[0], l[1]) {
            assert!((b.phi - a.phi - 2.0 * PI / 3.0).abs() < 1e-15);
        }
        let sq = KnifeFamily {
            m: 4,
            d: 4,
            alpha: 0.0,
            delta: -crate::geom::apothem(4) / 2f64.sqrt(),
            mode: KnifeMode::Chordal,
        };
        let arr = knife_arrangement(&sq).unwrap();
        assert_eq!(side_multiset(&arr), vec![3, 3, 3, 3, 4]);
        assert!(knife_lines(&KnifeFamily { d: 3, ..f }).is_err());
    }

    #[test]
    fn divisor_two_of_square() {
        let cls = enumerate_cuts(4, 2, Mode::Topological).unwrap();
        assert_eq!(cls.len(), 5);
        assert_eq!(enumerate_cuts(5, 5, Mode::Geometric).unwrap().len(), 12);
    }

    #[test]
    fn formula_values() {
        let r = count_geometric(12, false).unwrap();
        assert_eq!((geometric_subtotal(12, false), r.formula_total), (27, 162));
        assert_eq!(count_geometric(6, false).unwrap().formula_total, 48);
        assert_eq!(geometric_subtotal(4, true), 11);
        assert_eq!(topological_formula_plain(9).unwrap(), 48);
        assert_eq!(topological_formula_reduced(4).unwrap(), 16);
        assert_eq!(topological_formula_plain(6).unwrap(), 38);
        assert_eq!(topological_formula_reduced(6).unwrap(), 36);
        let r = count_topological(7).unwrap();
        assert_eq!(r.formula_total, 25);
        assert_eq!(r.table_total, Some(25));
    }

    #[test]
    fn small_sweep_matches_strata() {
        let cfg = SweepConfig {
            grid: 64,
            curve_samples: 64,
            crossing_scan: 512,
        };
        for m in [3usize, 4] {
            let rep = sweep_dm_classes(m, &cfg).unwrap();
            let want: BTreeSet<_> = dm_strata(m)
                .unwrap()
                .iter()
                .map(|c| class_signature(m, m, c).unwrap())
                .collect();
            let got: BTreeSet<_> = rep.classes.keys().cloned().collect();
            assert_eq!(got, want, "m={m}");
        }
    }
}
