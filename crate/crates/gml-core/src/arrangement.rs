//! Planar subdivision of a regular polygon (or a circle with `m` marked
//! points) by straight knife segments.
//!
//! Segment endpoints are given combinatorially as perimeter parameters or
//! the centre. Intersections are computed in floating point and snapped:
//! a point within `SNAP_TOL` of the centre becomes the centre, and a point
//! within `SNAP_TOL` of an existing vertex becomes that vertex. Faces are
//! extracted from half-edge cycles around angularly sorted vertices.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{invalid, GmlError, Result};
use crate::geom::{
    is_vertex_param, perimeter_point, polygon_area, polygon_vertices, snap_param, Point2,
    SNAP_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Polygon,
    /// Unit circle with `m` marked points at the polygon vertices. Only
    /// chords between marked points are allowed.
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Anchor {
    /// Boundary point at perimeter parameter `u`.
    Perimeter(f64),
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub a: Anchor,
    pub b: Anchor,
}

impl Segment {
    pub fn chord(u: f64, v: f64) -> Self {
        Segment {
            a: Anchor::Perimeter(u),
            b: Anchor::Perimeter(v),
        }
    }

    pub fn radial(u: f64) -> Self {
        Segment {
            a: Anchor::Center,
            b: Anchor::Perimeter(u),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub side_count: usize,
    pub vertex_count: usize,
    pub area: f64,
    pub centroid: Point2,
    pub boundary_edge_ids: Vec<usize>,
    pub vertex_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarArrangement {
    pub m: usize,
    pub boundary: BoundaryKind,
    pub vertices: Vec<Point2>,
    pub edges: Vec<(usize, usize)>,
    /// Bounded faces inside the inscribed polygon, ordered by centroid.
    pub faces: Vec<Region>,
    /// Connected components of the edge graph.
    pub components: usize,
    /// Circular segments between the polygon and the circle; zero for a
    /// polygon boundary.
    pub caps: usize,
}

impl PlanarArrangement {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Faces plus circular caps.
    pub fn region_count(&self) -> usize {
        self.faces.len() + self.caps
    }

    /// `V − E + F_total − (1 + C)` with the unbounded face counted once.
    pub fn euler_defect(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let e = self.edges.len() as i64;
        let f = self.faces.len() as i64 + 1;
        v - e + f - (1 + self.components as i64)
    }

    pub fn boundary_area(&self) -> f64 {
        match self.boundary {
            BoundaryKind::Polygon => polygon_area(self.m),
            BoundaryKind::Circle => PI,
        }
    }

    /// Relative gap between the summed region areas and the boundary area.
    pub fn area_defect(&self) -> f64 {
        let faces: f64 = self.faces.iter().map(|f| f.area).sum();
        let caps = self.caps as f64 * cap_area(self.m);
        ((faces + caps) - self.boundary_area()).abs() / self.boundary_area()
    }

    /// Face list as JSON-ready records.
    pub fn face_records(&self) -> Vec<FaceRecord> {
        self.faces
            .iter()
            .map(|f| FaceRecord {
                side_count: f.side_count,
                area: f.area,
                centroid: f.centroid,
            })
            .collect()
    }

    /// Debug rendering of edges and face centroids.
    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\">"
        );
        let _ = writeln!(s, "<g transform=\"scale(1,-1)\" stroke=\"black\" stroke-width=\"0.005\">");
        if self.boundary == BoundaryKind::Circle {
            let _ = writeln!(s, "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\"/>");
        }
        for &(a, b) in &self.edges {
            let (p, q) = (self.vertices[a], self.vertices[b]);
            let _ = writeln!(
                s,
                "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\"/>",
                p.x, p.y, q.x, q.y
            );
        }
        for f in &self.faces {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"0.01\" fill=\"red\" stroke=\"none\"/>",
                f.centroid.x, f.centroid.y
            );
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceRecord {
    pub side_count: usize,
    pub area: f64,
    pub centroid: Point2,
}

fn cap_area(m: usize) -> f64 {
    let t = 2.0 * PI / m as f64;
    0.5 * (t - t.sin())
}

struct Snapper {
    pts: Vec<Point2>,
}

impl Snapper {
    fn insert(&mut self, p: Point2) -> Result<usize> {
        let p = if p.norm() <= SNAP_TOL {
            Point2::ORIGIN
        } else {
            p
        };
        let mut hit = None;
        for (i, q) in self.pts.iter().enumerate() {
            if q.dist(p) <= SNAP_TOL {
                if let Some(j) = hit {
                    let r: &Point2 = &self.pts[j];
                    return Err(GmlError::Degeneracy(format!(
                        "({:.12}, {:.12}) is within tolerance of both ({:.12}, {:.12}) and ({:.12}, {:.12})",
                        p.x, p.y, r.x, r.y, q.x, q.y
                    )));
                }
                hit = Some(i);
            }
        }
        Ok(match hit {
            Some(i) => {
                // The centre wins over a computed point.
                if p == Point2::ORIGIN {
                    self.pts[i] = Point2::ORIGIN;
                }
                i
            }
            None => {
                self.pts.push(p);
                self.pts.len() - 1
            }
        })
    }
}

fn anchor_point(m: usize, a: Anchor) -> Point2 {
    match a {
        Anchor::Perimeter(u) => perimeter_point(m, snap_param(m, u)),
        Anchor::Center => Point2::ORIGIN,
    }
}

/// Builds the subdivision induced by `segments` inside the boundary.
pub fn build_arrangement(
    m: usize,
    boundary: BoundaryKind,
    segments: &[Segment],
) -> Result<PlanarArrangement> {
    if m < 3 {
        return Err(invalid(format!("boundary needs m >= 3, got {m}")));
    }
    let mut snap = Snapper {
        pts: polygon_vertices(m),
    };
    // (start vertex, end vertex) for every segment, sides first.
    let mut segs: Vec<(usize, usize)> = (0..m).map(|k| (k, (k + 1) % m)).collect();
    for s in segments {
        if boundary == BoundaryKind::Circle {
            for a in [s.a, s.b] {
                if let Anchor::Perimeter(u) = a {
                    if !is_vertex_param(m, u) {
                        return Err(invalid(format!(
                            "circle chords must end at marked points, got parameter {u}"
                        )));
                    }
                }
            }
        }
        for a in [s.a, s.b] {
            if let Anchor::Perimeter(u) = a {
                if !u.is_finite() {
                    return Err(invalid("segment endpoint is not finite"));
                }
            }
        }
        let ia = snap.insert(anchor_point(m, s.a))?;
        let ib = snap.insert(anchor_point(m, s.b))?;
        if ia == ib {
            return Err(invalid("segment has zero length after snapping"));
        }
        segs.push((ia, ib));
    }

    // Pairwise intersections.
    let n = segs.len();
    for i in 0..n {
        for j in i + 1..n {
            let (p, r) = {
                let (a, b) = segs[i];
                (snap.pts[a], snap.pts[b].sub(snap.pts[a]))
            };
            let (q, u) = {
                let (a, b) = segs[j];
                (snap.pts[a], snap.pts[b].sub(snap.pts[a]))
            };
            let den = r.cross(u);
            if den.abs() <= 1e-14 * r.norm() * u.norm() {
                continue;
            }
            let qp = q.sub(p);
            let s = qp.cross(u) / den;
            let t = qp.cross(r) / den;
            let es = SNAP_TOL / r.norm();
            let et = SNAP_TOL / u.norm();
            if s >= -es && s <= 1.0 + es && t >= -et && t <= 1.0 + et {
                snap.insert(p.add(r.scale(s)))?;
            }
        }
    }
    let pts = snap.pts;

    // Split every segment at the vertices lying on it.
    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(a, b) in &segs {
        let pa = pts[a];
        let d = pts[b].sub(pa);
        let len2 = d.dot(d);
        let len = len2.sqrt();
        let mut on: Vec<(f64, usize)> = Vec::new();
        for (k, &p) in pts.iter().enumerate() {
            let w = p.sub(pa);
            let t = w.dot(d) / len2;
            if t < -SNAP_TOL / len || t > 1.0 + SNAP_TOL / len {
                continue;
            }
            if (w.cross(d) / len).abs() <= SNAP_TOL {
                on.push((t, k));
            }
        }
        on.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in on.windows(2) {
            let (u, v) = (w[0].1, w[1].1);
            if u != v {
                edge_set.insert((u.min(v), u.max(v)));
            }
        }
    }
    let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();

    // Angular order of neighbours.
    let nv = pts.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for (v, list) in adj.iter_mut().enumerate() {
        let o = pts[v];
        list.sort_by(|&x, &y| {
            let ax = (pts[x].y - o.y).atan2(pts[x].x - o.x);
            let ay = (pts[y].y - o.y).atan2(pts[y].x - o.x);
            ax.total_cmp(&ay)
        });
    }
    let mut pos: HashMap<(usize, usize), usize> = HashMap::new();
    for (v, list) in adj.iter().enumerate() {
        for (k, &w) in list.iter().enumerate() {
            pos.insert((v, w), k);
        }
    }
    let edge_id: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

    // Walk half-edge cycles with the face on the left.
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut faces = Vec::new();
    for &(a, b) in &edges {
        for start in [(a, b), (b, a)] {
            if seen.contains(&start) {
                continue;
            }
            let mut cyc = Vec::new();
            let mut he = start;
            loop {
                if !seen.insert(he) {
                    return Err(GmlError::Internal("half-edge walk revisited an edge".into()));
                }
                cyc.push(he.0);
                let (u, v) = he;
                let list = &adj[v];
                let k = pos[&(v, u)];
                let w = list[(k + list.len() - 1) % list.len()];
                he = (v, w);
                if he == start {
                    break;
                }
            }
            let (area, centroid) = shoelace(&pts, &cyc);
            if area > 0.0 {
                let ids = (0..cyc.len())
                    .map(|i| {
                        let (u, v) = (cyc[i], cyc[(i + 1) % cyc.len()]);
                        edge_id[&(u.min(v), u.max(v))]
                    })
                    .collect();
                faces.push(Region {
                    side_count: corner_count(&pts, &cyc),
                    vertex_count: cyc.len(),
                    area,
                    centroid,
                    boundary_edge_ids: ids,
                    vertex_ids: cyc,
                });
            }
        }
    }
    faces.sort_by(|f, g| {
        let kf = (round9(f.centroid.y), round9(f.centroid.x));
        let kg = (round9(g.centroid.y), round9(g.centroid.x));
        kf.cmp(&kg)
    });

    let components = count_components(nv, &edges);
    let arr = PlanarArrangement {
        m,
        boundary,
        vertices: pts,
        edges,
        faces,
        components,
        caps: if boundary == BoundaryKind::Circle { m } else { 0 },
    };
    if arr.euler_defect() != 0 {
        return Err(GmlError::Internal(format!(
            "Euler relation violated by {}",
            arr.euler_defect()
        )));
    }
    if arr.area_defect() > 1e-9 {
        return Err(GmlError::Internal(format!(
            "face areas miss the boundary area by {:e}",
            arr.area_defect()
        )));
    }
    Ok(arr)
}

fn round9(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

fn shoelace(pts: &[Point2], cyc: &[usize]) -> (f64, Point2) {
    let mut a2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..cyc.len() {
        let p = pts[cyc[i]];
        let q = pts[cyc[(i + 1) % cyc.len()]];
        let c = p.cross(q);
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    let area = a2 / 2.0;
    if area.abs() < 1e-300 {
        return (0.0, Point2::ORIGIN);
    }
    (area, Point2::new(cx / (6.0 * area), cy / (6.0 * area)))
}

fn corner_count(pts: &[Point2], cyc: &[usize]) -> usize {
    let n = cyc.len();
    (0..n)
        .filter(|&i| {
            let p = pts[cyc[(i + n - 1) % n]];
            let c = pts[cyc[i]];
            let q = pts[cyc[(i + 1) % n]];
            let d1 = c.sub(p);
            let d2 = q.sub(c);
            let straight =
                d1.cross(d2).abs() <= 1e-9 * d1.norm() * d2.norm() && d1.dot(d2) > 0.0;
            !straight
        })
        .count()
}

fn count_components(nv: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..nv).filter(|&v| find(&mut parent, v) == v).count()
}

/// Region tally of the unit circle cut by every chord among `n`
/// equispaced marked points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CircleRegionTally {
    pub n: usize,
    pub polygonal: usize,
    pub circular_segments: usize,
    pub total: usize,
}

pub const CIRCLE_DIAGONAL_MAX_N: usize = 12;

pub fn circle_diagonal_regions(n: usize) -> Result<CircleRegionTally> {
    if !(3..=CIRCLE_DIAGONAL_MAX_N).contains(&n) {
        return Err(GmlError::Budget(format!(
            "circle diagonals are supported for 3 <= n <= {CIRCLE_DIAGONAL_MAX_N}, got {n}"
        )));
    }
    let mut segs = Vec::new();
    for a in 0..n {
        for b in a + 2..n {
            if a == 0 && b == n - 1 {
                continue;
            }
            segs.push(Segment::chord(a as f64, b as f64));
        }
    }
    let arr = build_arrangement(n, BoundaryKind::Circle, &segs)?;
    Ok(CircleRegionTally {
        n,
        polygonal: arr.face_count(),
        circular_segments: arr.caps,
        total: arr.region_count(),
    })
}

/// Groups faces by side count and area rank. Areas within `1e-9` of each
/// other share a rank; ranks ascend with area.
pub fn classify_regions(arr: &PlanarArrangement) -> BTreeMap<(usize, usize), usize> {
    let mut areas: Vec<f64> = arr.faces.iter().map(|f| f.area).collect();
    areas.sort_by(f64::total_cmp);
    let mut levels: Vec<f64> = Vec::new();
    for a in areas {
        if levels.last().is_none_or(|&l| a - l > 1e-9) {
            levels.push(a);
        }
    }
    let rank = |a: f64| levels.iter().rposition(|&l| a - l >= -1e-9).unwrap_or(0);
    let mut out = BTreeMap::new();
    for f in &arr.faces {
        *out.entry((f.side_count, rank(f.area))).or_insert(0) += 1;
    }
    out
}

/// Sorted multiset of face side counts.
pub fn side_multiset(arr: &PlanarArrangement) -> Vec<usize> {
    let mut v: Vec<usize> = arr.faces.iter().map(|f| f.side_count).collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(m: usize, segs: &[Segment]) -> PlanarArrangement {
        build_arrangement(m, BoundaryKind::Polygon, segs).unwrap()
    }

    #[test]
    fn square_diagonals() {
        let a = poly(4, &[Segment::chord(0.0, 2.0), Segment::chord(1.0, 3.0)]);
        assert_eq!(a.face_count(), 4);
        assert_eq!(a.vertices.len(), 5);
        assert!(a.faces.iter().all(|f| f.side_count == 3));
    }

    #[test]
    fn pentagram() {
        let segs: Vec<_> = (0..5)
            .map(|k| Segment::chord(k as f64, (k + 2) as f64))
            .collect();
        let a = poly(5, &segs);
        assert_eq!(a.face_count(), 11);
        assert_eq!(side_multiset(&a), vec![3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 5]);
    }

    #[test]
    fn hexagon_diameters_meet_once() {
        let segs: Vec<_> = (0..3)
            .map(|k| Segment::chord(k as f64, (k + 3) as f64))
            .collect();
        let a = poly(6, &segs);
        assert_eq!(a.face_count(), 6);
        assert_eq!(a.vertices.len(), 7);
        let c = classify_regions(&a);
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![((3, 0), 6)]);
    }

    #[test]
    fn square_vs12_pattern() {
        // Vertex k to a point 0.3 along side k + 1.
        let segs: Vec<_> = (0..4)
            .map(|k| Segment::chord(k as f64, k as f64 + 1.3))
            .collect();
        let a = poly(4, &segs);
        assert_eq!(a.face_count(), 9);
        let c = classify_regions(&a);
        let mut by_sides: BTreeMap<usize, usize> = BTreeMap::new();
        for ((s, _), n) in &c {
            *by_sides.entry(*s).or_default() += n;
        }
        assert_eq!(by_sides[&3], 4);
        assert_eq!(by_sides[&4], 5);
    }

    #[test]
    fn centre_chords_of_square() {
        let a = poly(4, &[Segment::chord(0.5, 2.5), Segment::chord(1.5, 3.5)]);
        let c = classify_regions(&a);
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![((4, 0), 4)]);
    }

    #[test]
    fn radial_slit_keeps_one_face() {
        let a = poly(5, &[Segment::radial(0.5)]);
        assert_eq!(a.face_count(), 1);
        // The slit is traversed on both sides.
        assert_eq!(a.faces[0].vertex_count, 5 + 1 + 2);
        let b = poly(5, &(0..5).map(|k| Segment::radial(k as f64 + 0.5)).collect::<Vec<_>>());
        assert_eq!(b.face_count(), 5);
    }

    #[test]
    fn circle_regions_match_known_sequence() {
        // Interior region counts of the regular n-gon with all diagonals.
        let want = [1, 4, 11, 24, 50, 80, 154, 220, 375, 444];
        for (i, w) in want.iter().enumerate() {
            let n = i + 3;
            let t = circle_diagonal_regions(n).unwrap();
            assert_eq!(t.polygonal, *w, "n={n}");
            assert_eq!(t.total, w + n);
        }
        assert!(circle_diagonal_regions(13).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_arrangement(5, BoundaryKind::Polygon, &[Segment::chord(1.0, 1.0)]).is_err());
        assert!(build_arrangement(5, BoundaryKind::Circle, &[Segment::chord(0.5, 2.0)]).is_err());
        assert!(build_arrangement(2, BoundaryKind::Polygon, &[]).is_err());
    }

    #[test]
    fn star_polygon_regions_match_rgc_layers() {
        // Inside the {p/q} star the region count is (q−1)p + 1.
        for (p, q) in [(5usize, 2usize), (7, 2), (7, 3), (8, 3), (9, 2), (9, 4), (11, 5)] {
            let segs: Vec<_> = (0..p)
                .map(|k| Segment::chord(k as f64, (k + q) as f64))
                .collect();
            let a = poly(p, &segs);
            let star = a.face_count() - p;
            let layers = crate::gielis::rgc_layer_counts(p as u32, q as u32).unwrap();
            assert_eq!(star as u32, *layers.layer_shape_counts.last().unwrap());
        }
    }

    proptest! {
        #[test]
        fn random_chords_satisfy_invariants(
            m in 3usize..10,
            raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..6)
        ) {
            let segs: Vec<_> = raw
                .iter()
                .map(|&(x, y)| (x * m as f64, y * m as f64))
                .filter(|(u, v)| {
                    let d = (u - v).abs();
                    d > 1e-3 && (m as f64 - d) > 1e-3
                        && !(u.floor() == v.floor())
                })
                .map(|(u, v)| Segment::chord(u, v))
                .collect();
            let a = build_arrangement(m, BoundaryKind::Polygon, &segs).unwrap();
            prop_assert_eq!(a.euler_defect(), 0);
            prop_assert!(a.area_defect() <= 1e-9);
            prop_assert!(a.faces.iter().all(|f| f.area > 0.0 && f.side_count >= 3));
        }

        #[test]
        fn rotation_keeps_signature(
            m in 3usize..9,
            raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..5),
            step in 1usize..8
        ) {
            let chords: Vec<(f64, f64)> = raw
                .iter()
                .map(|&(x, y)| (x * m as f64, y * m as f64))
                .filter(|(u, v)| (u.floor() != v.floor()) && (u - v).abs() > 1e-3)
                .collect();
            let s = (step % m) as f64;
            let a: Vec<_> = chords.iter().map(|&(u, v)| Segment::chord(u, v)).collect();
            let b: Vec<_> = chords.iter().map(|&(u, v)| Segment::chord(u + s, v + s)).collect();
            let aa = build_arrangement(m, BoundaryKind::Polygon, &a).unwrap();
            let bb = build_arrangement(m, BoundaryKind::Polygon, &b).unwrap();
            prop_assert_eq!(classify_regions(&aa), classify_regions(&bb));
        }
    }
}
