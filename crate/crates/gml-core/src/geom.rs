//! Planar primitives for the unit-circumradius regular m-gon.
//!
//! Vertex `k` (0-based) sits at angle `2πk/m`. Boundary positions are
//! addressed by a perimeter parameter `u` in `[0, m)`: the integer part is
//! the side index (side `k` runs from vertex `k` to vertex `k + 1`) and the
//! fractional part is the position along that side.

use std::f64::consts::PI;

use serde::Serialize;

/// Snap tolerance used by the arrangement kernel, in length units.
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        self.sub(o).norm()
    }

    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

pub fn polygon_vertex(m: usize, k: usize) -> Point2 {
    let a = 2.0 * PI * (k % m) as f64 / m as f64;
    Point2::new(a.cos(), a.sin())
}

pub fn polygon_vertices(m: usize) -> Vec<Point2> {
    (0..m).map(|k| polygon_vertex(m, k)).collect()
}

pub fn side_length(m: usize) -> f64 {
    2.0 * (PI / m as f64).sin()
}

pub fn apothem(m: usize) -> f64 {
    (PI / m as f64).cos()
}

pub fn polygon_area(m: usize) -> f64 {
    0.5 * m as f64 * (2.0 * PI / m as f64).sin()
}

/// Wraps a perimeter parameter into `[0, m)`.
pub fn wrap_param(m: usize, u: f64) -> f64 {
    let r = u.rem_euclid(m as f64);
    if r >= m as f64 {
        0.0
    } else {
        r
    }
}

/// Perimeter parameter tolerance equivalent to `SNAP_TOL` along a side.
pub fn param_tol(m: usize) -> f64 {
    SNAP_TOL / side_length(m)
}

/// Rounds `u` onto the nearest vertex when it is within snap tolerance.
pub fn snap_param(m: usize, u: f64) -> f64 {
    let u = wrap_param(m, u);
    let r = u.round();
    if (u - r).abs() <= param_tol(m) {
        wrap_param(m, r)
    } else {
        u
    }
}

pub fn is_vertex_param(m: usize, u: f64) -> bool {
    let u = wrap_param(m, u);
    (u - u.round()).abs() <= param_tol(m)
}

pub fn perimeter_point(m: usize, u: f64) -> Point2 {
    let u = wrap_param(m, u);
    let k = u.floor() as usize % m;
    let t = u - u.floor();
    let a = polygon_vertex(m, k);
    if t == 0.0 {
        return a;
    }
    let b = polygon_vertex(m, k + 1);
    a.add(b.sub(a).scale(t))
}

/// Perimeter parameter of the boundary point seen from the centre at polar
/// angle `psi`.
pub fn boundary_param_at_angle(m: usize, psi: f64) -> f64 {
    let step = 2.0 * PI / m as f64;
    let psi = psi.rem_euclid(2.0 * PI);
    let k = ((psi / step).floor() as usize).min(m - 1);
    let a = polygon_vertex(m, k);
    let b = polygon_vertex(m, k + 1);
    let dir = Point2::new(psi.cos(), psi.sin());
    // Solve a + t (b − a) = s · dir for t.
    let e = b.sub(a);
    let t = -a.cross(dir) / e.cross(dir);
    snap_param(m, k as f64 + t.clamp(0.0, 1.0))
}

/// Boundary point diametrically across the centre from parameter `u`.
pub fn antipode_param(m: usize, u: f64) -> f64 {
    let p = perimeter_point(m, u);
    boundary_param_at_angle(m, p.y.atan2(p.x) + PI)
}

/// Whether `a` and `b` lie within `tol` (in parameter units) of one
/// closed side, so that the chord between them runs along that side.
pub fn shares_side(m: usize, a: f64, b: f64, tol: f64) -> bool {
    (0..m).any(|k| {
        let near = |u: f64| {
            let lo = (u - k as f64).rem_euclid(m as f64);
            lo <= 1.0 + tol || lo >= m as f64 - tol
        };
        near(a) && near(b)
    })
}

/// Distance from the centre to the line through two boundary points.
pub fn chord_center_distance(m: usize, a: f64, b: f64) -> f64 {
    let (p, q) = (perimeter_point(m, a), perimeter_point(m, b));
    p.cross(q).abs() / p.dist(q)
}

/// A line `sin(phi)·x + cos(phi)·y + delta = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    pub phi: f64,
    pub delta: f64,
}

impl Line {
    pub fn normal(&self) -> Point2 {
        Point2::new(self.phi.sin(), self.phi.cos())
    }

    pub fn eval(&self, p: Point2) -> f64 {
        self.normal().dot(p) + self.delta
    }
}

/// Intersects a line with the polygon and returns the chord as a pair of
/// perimeter parameters, or `None` when the line misses the interior, only
/// touches a vertex, or runs along a side.
pub fn clip_line(m: usize, line: &Line) -> Option<(f64, f64)> {
    let verts = polygon_vertices(m);
    let s: Vec<f64> = verts.iter().map(|&v| line.eval(v)).collect();
    let on = |x: f64| x.abs() <= SNAP_TOL;
    let mut hits: Vec<f64> = Vec::new();
    for k in 0..m {
        let (a, b) = (s[k], s[(k + 1) % m]);
        if on(a) {
            hits.push(k as f64);
        } else if !on(b) && (a > 0.0) != (b > 0.0) {
            let t = a / (a - b);
            hits.push(snap_param(m, k as f64 + t));
        }
    }
    hits.sort_by(f64::total_cmp);
    hits.dedup_by(|a, b| (*a - *b).abs() <= param_tol(m));
    if hits.len() == 2 && (hits[1] - hits[0] - m as f64).abs() <= param_tol(m) {
        hits.pop();
    }
    if hits.len() != 2 {
        return None;
    }
    let (u, v) = (hits[0], hits[1]);
    // A line along a side hits two adjacent vertices and nothing else.
    if is_vertex_param(m, u) && is_vertex_param(m, v) {
        let gap = (v - u).round() as i64;
        if gap == 1 || gap == m as i64 - 1 {
            return None;
        }
    }
    Some((u, v))
}
