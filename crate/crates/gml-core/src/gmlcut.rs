//! Full cuts of a twisted prism GML_m^n.
//!
//! The knife is held fixed while the body turns by `κ·2π/m` per revolution,
//! so one cut repeats as its orbit under that rotation. Faces of the
//! resulting cross-section fuse along the body when the rotation carries
//! one onto another; each face orbit is one resulting body.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::arrangement::{build_arrangement, BoundaryKind, PlanarArrangement, Segment};
use crate::cutmodel::{dm_strata, knife_pattern, vertex_endpoints, CutKind, CutSpec, KnifeMode};
use crate::error::{invalid, GmlError, Result};
use crate::geom::{antipode_param, chord_center_distance, shares_side, SNAP_TOL};
use crate::numtheory::divisors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GmlSpec {
    pub m: u64,
    pub n: i64,
    pub omega: i64,
    pub kappa: u64,
}

impl GmlSpec {
    pub fn new(m: u64, n: i64) -> Result<Self> {
        if m < 2 {
            return Err(invalid(format!("GML bodies need m >= 2, got {m}")));
        }
        let kappa = n.rem_euclid(m as i64);
        Ok(GmlSpec {
            m,
            n,
            omega: (n - kappa) / m as i64,
            kappa: kappa as u64,
        })
    }
}

/// Twist index `a·ω + b` of a resulting body as a function of the number
/// `ω` of full twist periods of the original.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TwistExpr {
    pub a: i64,
    pub b: i64,
}

impl TwistExpr {
    pub fn eval(&self, omega: i64) -> i64 {
        self.a * omega + self.b
    }
}

impl fmt::Display for TwistExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}w"),
            (a, b) if b < 0 => write!(f, "{a}w-{}", -b),
            (a, b) => write!(f, "{a}w+{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Side count of the cross-section.
    pub sides: usize,
    /// Revolutions of the basic line before the body closes.
    pub winding: usize,
    pub twist: TwistExpr,
    /// Twist index evaluated at the uncut body's `ω`.
    pub twist_index: i64,
    /// Face indices of the orbit in the effective arrangement.
    pub faces: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutOutcome {
    pub spec: GmlSpec,
    pub cut: CutSpec,
    pub knife: KnifeMode,
    pub placements: usize,
    pub total_faces: usize,
    pub components: Vec<Component>,
    pub link_count: usize,
    pub mobius: bool,
}

impl CutOutcome {
    pub fn side_multiset(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.components.iter().map(|c| c.sides).collect();
        v.sort_unstable();
        v
    }
}

fn check_kappa(m: usize, kappa: usize) -> Result<()> {
    if kappa >= m {
        return Err(invalid(format!("kappa {kappa} outside 0..{m}")));
    }
    Ok(())
}

/// Distinct placements of the cut as the body turns: its orbit under
/// rotation by `κ·2π/m`.
pub fn effective_knife_pattern(m: usize, kappa: usize, cut: &CutSpec) -> Result<Vec<(f64, f64)>> {
    check_kappa(m, kappa)?;
    let chord = cut.chord(m)?;
    orbit_chords(m, kappa, chord)
}

fn orbit_chords(m: usize, kappa: usize, chord: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let g = if kappa == 0 { m } else { m.gcd(&kappa) };
    // The κ-orbit is the pattern of the (m/g)-knife.
    let (pat, _) = knife_pattern(m, m / g, chord)?;
    Ok(pat)
}

/// Partitions faces into orbits of the rotation by `κ·2π/m`. Each orbit
/// lists face indices in the order the rotation visits them.
pub fn trace_orbits(arr: &PlanarArrangement, m: usize, kappa: usize) -> Result<Vec<Vec<usize>>> {
    check_kappa(m, kappa)?;
    let angle = 2.0 * PI * kappa as f64 / m as f64;
    let image: Vec<usize> = arr
        .faces
        .iter()
        .map(|f| {
            let c = f.centroid.rotate(angle);
            arr.faces
                .iter()
                .position(|g| {
                    g.side_count == f.side_count
                        && (g.area - f.area).abs() <= 1e-7
                        && g.centroid.dist(c) <= 1e-7
                })
                .ok_or_else(|| {
                    GmlError::Internal(format!(
                        "rotated face centroid ({:.6}, {:.6}) matches no face",
                        c.x, c.y
                    ))
                })
        })
        .collect::<Result<_>>()?;
    let mut seen = vec![false; image.len()];
    let mut orbits = Vec::new();
    for start in 0..image.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut f = start;
        while !seen[f] {
            seen[f] = true;
            orbit.push(f);
            f = image[f];
        }
        if f != start {
            return Err(GmlError::Internal("face rotation is not a permutation".into()));
        }
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// Twist of a body whose cross-section has `sides` sides and which closes
/// after `winding` revolutions: `n′ = m′·L·n/m + (L − 1)·m′`.
pub fn fused_twist(m: usize, kappa: usize, sides: usize, winding: usize) -> Result<TwistExpr> {
    let (m, k, s, l) = (m as i64, kappa as i64, sides as i64, winding as i64);
    let num = s * l * k;
    if num % m != 0 {
        return Err(GmlError::Internal(format!(
            "a {sides}-gon closing after {winding} turns is not carried onto itself by a {kappa}/{m} turn"
        )));
    }
    Ok(TwistExpr {
        a: s * l,
        b: num / m + (l - 1) * s,
    })
}

/// Cross-section arrangement of the effective pattern. A radial cut is
/// the full `m`-ray pattern anchored at the cut's first endpoint.
pub fn effective_arrangement(
    m: usize,
    kappa: usize,
    cut: &CutSpec,
    knife: KnifeMode,
) -> Result<(PlanarArrangement, usize)> {
    check_kappa(m, kappa)?;
    let chord = cut.chord(m)?;
    let segs: Vec<Segment> = match knife {
        KnifeMode::Chordal => orbit_chords(m, kappa, chord)?
            .into_iter()
            .map(|(a, b)| Segment::chord(a, b))
            .collect(),
        KnifeMode::Radial => (0..m).map(|k| Segment::radial(chord.0 + k as f64)).collect(),
    };
    let n = segs.len();
    Ok((build_arrangement(m, BoundaryKind::Polygon, &segs)?, n))
}

pub fn cut_gml(spec: &GmlSpec, cut: &CutSpec, knife: KnifeMode) -> Result<CutOutcome> {
    let m = spec.m as usize;
    let kappa = spec.kappa as usize;
    cut.validate(m)?;
    let (arr, placements) = effective_arrangement(m, kappa, cut, knife)?;
    let orbits = trace_orbits(&arr, m, kappa)?;
    let mut components = orbits
        .into_iter()
        .map(|orbit| {
            let sides = arr.faces[orbit[0]].side_count;
            let twist = fused_twist(m, kappa, sides, orbit.len())?;
            Ok(Component {
                sides,
                winding: orbit.len(),
                twist,
                twist_index: twist.eval(spec.omega),
                faces: orbit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    components.sort_by(|a, b| (b.sides, b.winding, &a.faces).cmp(&(a.sides, a.winding, &b.faces)));
    let covered: usize = components.iter().map(|c| c.winding).sum();
    if covered != arr.face_count() {
        return Err(GmlError::Internal(format!(
            "orbits cover {covered} of {} faces",
            arr.face_count()
        )));
    }
    let link_count = components.len();
    Ok(CutOutcome {
        spec: *spec,
        cut: *cut,
        knife,
        placements,
        total_faces: arr.face_count(),
        components,
        link_count,
        mobius: link_count == 1,
    })
}

pub fn mobius_phenomenon(spec: &GmlSpec, cut: &CutSpec, knife: KnifeMode) -> Result<bool> {
    Ok(cut_gml(spec, cut, knife)?.mobius)
}

// ---------------------------------------------------------------------------
// Independent objects of a d-knife.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CutFamily {
    SS,
    SSc,
    VS,
    VSc,
    VV,
    VVc,
}

impl CutFamily {
    pub const ALL: [CutFamily; 6] = [
        CutFamily::SS,
        CutFamily::SSc,
        CutFamily::VS,
        CutFamily::VSc,
        CutFamily::VV,
        CutFamily::VVc,
    ];

    pub fn new(kind: CutKind, center: bool) -> Self {
        match (kind, center) {
            (CutKind::SS, false) => CutFamily::SS,
            (CutKind::SS, true) => CutFamily::SSc,
            (CutKind::VS, false) => CutFamily::VS,
            (CutKind::VS, true) => CutFamily::VSc,
            (CutKind::VV, false) => CutFamily::VV,
            (CutKind::VV, true) => CutFamily::VVc,
        }
    }

    pub fn centered(&self) -> bool {
        matches!(self, CutFamily::SSc | CutFamily::VSc | CutFamily::VVc)
    }

    /// Whether a chord of this family exists in the regular m-gon.
    pub fn realizable(&self, m: usize) -> bool {
        match self {
            CutFamily::SS | CutFamily::SSc | CutFamily::VS => true,
            CutFamily::VSc => m % 2 == 1,
            CutFamily::VV => m >= 5,
            CutFamily::VVc => m % 2 == 0,
        }
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutFamily::SS => "SS",
            CutFamily::SSc => "SS_c",
            CutFamily::VS => "VS",
            CutFamily::VSc => "VS_c",
            CutFamily::VV => "VV",
            CutFamily::VVc => "VV_c",
        })
    }
}

/// Closed-form region counts of one (m, d, family) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectCell {
    pub m: usize,
    pub d: usize,
    pub family: CutFamily,
    /// False when the family has no chord in the m-gon.
    pub applicable: bool,
    /// Counts expected from non-degenerate placements.
    pub values: BTreeSet<u64>,
    /// Counts expected only from placements whose copies coincide: an
    /// even knife of centre chords acts as half as many knives.
    pub degenerate_values: BTreeSet<u64>,
}

fn series(d: usize, lo: usize, hi: usize) -> BTreeSet<u64> {
    (lo..=hi).map(|j| (j * d + 1) as u64).collect()
}

pub fn independent_object_formula(m: usize, d: usize, family: CutFamily) -> Result<ObjectCell> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3, got {m}")));
    }
    if d == 0 || m % d != 0 {
        return Err(invalid(format!("{d} does not divide {m}")));
    }
    use CutFamily::*;
    let k = m / 2;
    let ki = d / 2;
    let one = |v: usize| BTreeSet::from([v as u64]);
    let none = BTreeSet::new;
    let mut degenerate_values = BTreeSet::new();
    let values = if d == 1 {
        one(2)
    } else if m % 2 == 1 {
        if d == m {
            match family {
                SS => series(m, 1, k + 1),
                SSc | VSc => one(2 * m),
                VS => series(m, 2, k + 1),
                VV => series(m, 2, k),
                VVc => none(),
            }
        } else {
            match family {
                SS | VS | VV => series(d, 1, ki + 1),
                SSc | VSc => one(2 * d),
                VVc => none(),
            }
        }
    } else if d == m {
        match family {
            SS => series(m, 1, k),
            VS => series(m, 2, k),
            VV => series(m, 2, k - 1),
            SSc | VSc | VVc => none(),
        }
    } else if d == m / 2 && d % 2 == 1 {
        match family {
            SS | VS => series(d, 1, ki + 1),
            SSc | VSc => one(2 * d),
            VV => series(d, 1, ki),
            VVc => none(),
        }
    } else if d == m / 2 {
        match family {
            SS | VS | VV => series(d, 1, ki),
            SSc | VSc | VVc => none(),
        }
    } else if d % 2 == 1 {
        match family {
            SS | VS | VV => series(d, 1, ki + 1),
            SSc | VVc => one(2 * d),
            VSc => none(),
        }
    } else {
        match family {
            SS | VS | VV => series(d, 1, ki),
            SSc | VVc => {
                degenerate_values.insert(d as u64);
                none()
            }
            VSc => none(),
        }
    };
    Ok(ObjectCell {
        m,
        d,
        family,
        applicable: family.realizable(m),
        values,
        degenerate_values,
    })
}

/// Witness record of one (m, d, family) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCell {
    pub cell: ObjectCell,
    pub witnessed: BTreeSet<u64>,
    pub degenerate_witnessed: BTreeSet<u64>,
    /// Expected counts no placement produced.
    pub missing: BTreeSet<u64>,
    /// Counts produced by non-degenerate placements outside the cell.
    pub out_of_set: BTreeSet<u64>,
    pub placements: usize,
    pub degenerate_placements: usize,
}

impl WitnessCell {
    pub fn ok(&self) -> bool {
        !self.cell.applicable
            || (self.missing.is_empty()
                && self.out_of_set.is_empty()
                && self.cell.degenerate_values.is_subset(&self.degenerate_witnessed))
    }
}

/// Steps per side of the witness grid.
pub const WITNESS_STEPS: usize = 32;

fn chord_family(m: usize, chord: (f64, f64)) -> CutFamily {
    let kind = match vertex_endpoints(m, chord) {
        2 => CutKind::VV,
        1 => CutKind::VS,
        _ => CutKind::SS,
    };
    CutFamily::new(kind, chord_center_distance(m, chord.0, chord.1) < SNAP_TOL)
}

/// Whether some interior point other than the centre lies on three or
/// more chords of the pattern.
fn has_triple_point(m: usize, chords: &[(f64, f64)]) -> bool {
    use crate::geom::perimeter_point;
    let segs: Vec<_> = chords
        .iter()
        .map(|&(a, b)| (perimeter_point(m, a), perimeter_point(m, b)))
        .collect();
    let on = |p: crate::geom::Point2, (a, b): (crate::geom::Point2, crate::geom::Point2)| {
        let e = b.sub(a);
        (e.cross(p.sub(a)) / e.norm()).abs() <= SNAP_TOL
    };
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (p, r) = (segs[i].0, segs[i].1.sub(segs[i].0));
            let (q, s) = (segs[j].0, segs[j].1.sub(segs[j].0));
            let den = r.cross(s);
            if den.abs() < 1e-15 {
                continue;
            }
            let t = q.sub(p).cross(s) / den;
            let x = p.add(r.scale(t));
            if x.norm() <= SNAP_TOL || !(1e-9..=1.0 - 1e-9).contains(&t) {
                continue;
            }
            let through = segs.iter().filter(|&&sg| on(x, sg)).count();
            if through >= 3 {
                return true;
            }
        }
    }
    false
}

/// Region counts of every `d`-knife on a grid of chords (first end on
/// side 0 in steps of `1/WITNESS_STEPS`, second end anywhere on the same
/// grid, plus every chord through the centre from the first grid), graded
/// against the closed-form cells.
pub fn theorem3_witness(m: usize) -> Result<Vec<WitnessCell>> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3, got {m}")));
    }
    let step = 1.0 / WITNESS_STEPS as f64;
    let mut chords = Vec::new();
    for ia in 0..WITNESS_STEPS {
        let a = ia as f64 * step;
        for ib in 0..m * WITNESS_STEPS {
            let b = ib as f64 * step;
            if !shares_side(m, a, b, 1e-12) {
                chords.push((a, b));
            }
        }
        chords.push((a, antipode_param(m, a)));
    }
    let divs = divisors(m as u64)?.divisors;
    let mut out = Vec::new();
    for &d in &divs {
        let d = d as usize;
        let mut hits: BTreeMap<CutFamily, (BTreeSet<u64>, BTreeSet<u64>, usize, usize)> = BTreeMap::new();
        for &c in &chords {
            let family = chord_family(m, c);
            let (pat, coincident) = knife_pattern(m, d, c)?;
            let degenerate = coincident || has_triple_point(m, &pat);
            let segs: Vec<Segment> = pat.iter().map(|&(a, b)| Segment::chord(a, b)).collect();
            let count = build_arrangement(m, BoundaryKind::Polygon, &segs)?.face_count() as u64;
            let e = hits.entry(family).or_default();
            if degenerate {
                e.1.insert(count);
                e.3 += 1;
            } else {
                e.0.insert(count);
                e.2 += 1;
            }
        }
        for family in CutFamily::ALL {
            let cell = independent_object_formula(m, d, family)?;
            let (witnessed, degenerate_witnessed, placements, degenerate_placements) =
                hits.remove(&family).unwrap_or_default();
            let missing = cell.values.difference(&witnessed).copied().collect();
            let out_of_set = witnessed.difference(&cell.values).copied().collect();
            out.push(WitnessCell {
                cell,
                witnessed,
                degenerate_witnessed,
                missing,
                out_of_set,
                placements,
                degenerate_placements,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Single-body outcomes.

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MobiusCase {
    pub m: usize,
    pub kappa: usize,
    pub cut: String,
    pub knife: KnifeMode,
    pub link_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct MobiusScan {
    pub cases: usize,
    /// Chordal single-body outcomes.
    pub chordal_single: Vec<MobiusCase>,
    /// Chordal single-body outcomes with odd m or an off-centre cut.
    pub chordal_violations: Vec<MobiusCase>,
    /// Radial outcomes whose body count is not `gcd(m, κ)`.
    pub radial_violations: Vec<MobiusCase>,
}

/// Every class of the m-knife for every twist class `κ`, `3 <= m <= max_m`.
pub fn mobius_scan(max_m: usize) -> Result<MobiusScan> {
    let mut scan = MobiusScan::default();
    for m in 3..=max_m {
        for cut in dm_strata(m)? {
            for kappa in 0..m {
                let spec = GmlSpec::new(m as u64, kappa as i64)?;
                let ch = cut_gml(&spec, &cut, KnifeMode::Chordal)?;
                scan.cases += 1;
                let case = |knife, link_count| MobiusCase {
                    m,
                    kappa,
                    cut: cut.label(),
                    knife,
                    link_count,
                };
                if ch.mobius {
                    scan.chordal_single.push(case(KnifeMode::Chordal, 1));
                    if m % 2 == 1 || !cut.through_center {
                        scan.chordal_violations.push(case(KnifeMode::Chordal, 1));
                    }
                }
                let rad = cut_gml(&spec, &cut, KnifeMode::Radial)?;
                scan.cases += 1;
                let want = if kappa == 0 { m } else { m.gcd(&kappa) };
                if rad.link_count != want {
                    scan.radial_violations.push(case(KnifeMode::Radial, rad.link_count));
                }
            }
        }
    }
    Ok(scan)
}

// ---------------------------------------------------------------------------
// Reference outcomes for m = 4 and m = 5.

const CUT_OUTCOMES: &str = include_str!("../data/cut_outcomes.csv");

/// One expected body: sides, winding and, where checked, the twist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectedBody {
    pub sides: usize,
    pub winding: usize,
    pub twist: Option<TwistExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutcomeFixture {
    pub figure: String,
    pub row: String,
    pub m: u64,
    pub kappa: u64,
    pub cut: CutSpec,
    pub bodies: Vec<ExpectedBody>,
    pub link_count: usize,
}

fn malformed<T>(row: &str) -> T {
    panic!("malformed cut outcome fixture row {row:?}")
}

pub fn outcome_fixtures() -> Vec<OutcomeFixture> {
    CUT_OUTCOMES
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1)
        .map(|l| {
            let r: Vec<&str> = l.split(',').map(str::trim).collect();
            let num = |s: &str| s.parse::<u64>().unwrap_or_else(|_| malformed(l));
            let cut: CutSpec = r[4].replace(';', ",").parse().unwrap_or_else(|_| malformed(l));
            let bodies = r[5]
                .split_whitespace()
                .map(|b| {
                    let f: Vec<&str> = b.split('/').collect();
                    let twist = match f.len() {
                        2 => None,
                        4 => Some(TwistExpr {
                            a: f[2].parse().unwrap_or_else(|_| malformed(l)),
                            b: f[3].parse().unwrap_or_else(|_| malformed(l)),
                        }),
                        _ => malformed(l),
                    };
                    ExpectedBody {
                        sides: num(f[0]) as usize,
                        winding: num(f[1]) as usize,
                        twist,
                    }
                })
                .collect();
            OutcomeFixture {
                figure: r[0].to_string(),
                row: r[1].to_string(),
                m: num(r[2]),
                kappa: num(r[3]),
                cut,
                bodies,
                link_count: num(r[6]) as usize,
            }
        })
        .collect()
}

/// Bodies of the simulated outcome in fixture form, sorted.
pub fn outcome_bodies(o: &CutOutcome, with_twist: bool) -> Vec<ExpectedBody> {
    let mut v: Vec<ExpectedBody> = o
        .components
        .iter()
        .map(|c| ExpectedBody {
            sides: c.sides,
            winding: c.winding,
            twist: with_twist.then_some(c.twist),
        })
        .collect();
    v.sort_by_key(|b| (b.sides, b.winding, b.twist));
    v
}

/// Compares a fixture row with the simulation; `None` when they agree.
pub fn check_fixture(f: &OutcomeFixture) -> Result<Option<String>> {
    let spec = GmlSpec::new(f.m, f.kappa as i64)?;
    let o = cut_gml(&spec, &f.cut, KnifeMode::Chordal)?;
    let with_twist = f.bodies.iter().all(|b| b.twist.is_some());
    let got = outcome_bodies(&o, with_twist);
    let mut want = f.bodies.clone();
    want.sort_by_key(|b| (b.sides, b.winding, b.twist));
    if got == want && o.link_count == f.link_count {
        Ok(None)
    } else {
        Ok(Some(format!(
            "{} {}: expected {:?} link {}, got {:?} link {}",
            f.figure, f.row, want, f.link_count, got, o.link_count
        )))
    }
}
