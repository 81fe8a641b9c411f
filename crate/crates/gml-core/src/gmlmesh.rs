//! Meshes of GML bodies and their open (GRT) counterparts.
//!
//! A point of the body is addressed by `(τ, ψ, θ)`: `θ` runs along the
//! basic line, `ψ` is the polar angle inside the cross-section and `τ`
//! scales the section (`τ = 1` is the surface).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{invalid, GmlError, Result};
use crate::gielis::{gielis_radius, gielis_surface_point, regular_polygon_radius, GielisParams};

/// A function of `θ`, usually constant.
#[derive(Debug, Clone, Copy)]
pub enum Profile {
    Constant(f64),
    Function(fn(f64) -> f64),
}

impl Profile {
    pub fn at(&self, theta: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Function(f) => f(theta),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum CrossSection {
    /// Regular m-gon of unit circumradius; for `m = 2` a lens with
    /// corners at `(±1, 0)`.
    Polygon { m: u32 },
    Circle { radius: f64 },
    Gielis(GielisParams),
    /// Cartesian section `(p, q)(τ, ψ)`, rotated as a rigid frame.
    Cartesian {
        p: fn(f64, f64) -> f64,
        q: fn(f64, f64) -> f64,
    },
}

impl CrossSection {
    /// Section point `(p, q)` before the twist rotation.
    fn local(&self, tau: f64, psi: f64) -> Result<(f64, f64)> {
        let r = match self {
            CrossSection::Polygon { m: 2 } => lens_radius(psi),
            CrossSection::Polygon { m } => regular_polygon_radius(psi, *m),
            CrossSection::Circle { radius } => *radius,
            CrossSection::Gielis(g) => gielis_radius(psi, g)?,
            CrossSection::Cartesian { p, q } => {
                let (x, y) = (p(tau, psi), q(tau, psi));
                if !x.is_finite() || !y.is_finite() {
                    return Err(GmlError::Domain {
                        theta: psi,
                        reason: "cross-section is not finite".into(),
                    });
                }
                return Ok((x, y));
            }
        };
        if !r.is_finite() {
            return Err(GmlError::Domain {
                theta: psi,
                reason: "cross-section radius is not finite".into(),
            });
        }
        let r = tau * r;
        Ok((r * psi.cos(), r * psi.sin()))
    }
}

/// Two arcs of radius √2 through `(±1, 0)` centred at `(0, ∓1)`.
fn lens_radius(psi: f64) -> f64 {
    let s = psi.sin().abs();
    (s * s + 1.0).sqrt() - s
}

#[derive(Debug, Clone, Copy)]
pub struct GmlParams {
    pub m: u32,
    pub n: i64,
    /// Radius `R(θ)` of the basic line.
    pub radius: Profile,
    /// Height `K(θ)` of the basic line.
    pub height: Profile,
    pub section: CrossSection,
    /// `2π` for a closed body; anything else gives an open sheet.
    pub theta_span: f64,
}

impl GmlParams {
    /// Closed body with a flat circular basic line of twice the section's
    /// largest radius.
    pub fn new(m: u32, n: i64, section: CrossSection) -> Result<Self> {
        if m < 1 {
            return Err(invalid("m must be positive"));
        }
        if let CrossSection::Polygon { m: k } = section {
            if k < 2 {
                return Err(invalid(format!("polygonal sections need m >= 2, got {k}")));
            }
        }
        let mut p = GmlParams {
            m,
            n,
            radius: Profile::Constant(1.0),
            height: Profile::Constant(0.0),
            section,
            theta_span: 2.0 * PI,
        };
        p.radius = Profile::Constant(2.0 * p.max_section_radius(4096)?);
        Ok(p)
    }

    pub fn polygonal(m: u32, n: i64) -> Result<Self> {
        Self::new(m, n, CrossSection::Polygon { m })
    }

    pub fn is_closed(&self) -> bool {
        (self.theta_span - 2.0 * PI).abs() < 1e-12
    }

    fn max_section_radius(&self, samples: usize) -> Result<f64> {
        let mut best: f64 = 0.0;
        for i in 0..samples {
            let (x, y) = self.section.local(1.0, 2.0 * PI * i as f64 / samples as f64)?;
            best = best.max(x.hypot(y));
        }
        Ok(best)
    }
}

pub fn gml_point(tau: f64, psi: f64, theta: f64, params: &GmlParams) -> Result<[f64; 3]> {
    let (p, q) = params.section.local(tau, psi)?;
    let w = params.n as f64 * theta / params.m as f64;
    let (s, c) = w.sin_cos();
    let rr = params.radius.at(theta) + p * c - q * s;
    Ok([rr * theta.cos(), rr * theta.sin(), params.height.at(theta) + p * s + q * c])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshKind {
    Surface,
    /// The surface closed off by end caps when the body is open.
    Body,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Seam {
    /// Column `j` of the last ring continues into column `j + shift` of
    /// the first.
    pub shift: usize,
    pub rings: usize,
    pub columns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// 0-based vertex indices, counter-clockwise.
    pub faces: Vec<Vec<usize>>,
    pub seam: Option<Seam>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub boundary_edges: usize,
    /// Edges used by more than two faces.
    pub nonmanifold_edges: usize,
    pub min_face_area: f64,
}

impl Mesh {
    fn edge_uses(&self) -> BTreeMap<(usize, usize), usize> {
        let mut uses = BTreeMap::new();
        for f in &self.faces {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                *uses.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        uses
    }

    pub fn stats(&self) -> MeshStats {
        let uses = self.edge_uses();
        let (v, e, f) = (self.vertices.len(), uses.len(), self.faces.len());
        MeshStats {
            vertices: v,
            edges: e,
            faces: f,
            euler_characteristic: v as i64 - e as i64 + f as i64,
            boundary_edges: uses.values().filter(|&&u| u == 1).count(),
            nonmanifold_edges: uses.values().filter(|&&u| u > 2).count(),
            min_face_area: self
                .faces
                .iter()
                .map(|f| face_area(&self.vertices, f))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Every edge is shared by exactly two faces.
    pub fn is_closed(&self) -> bool {
        let s = self.stats();
        s.boundary_edges == 0 && s.nonmanifold_edges == 0
    }
}

fn face_area(v: &[[f64; 3]], f: &[usize]) -> f64 {
    let o = v[f[0]];
    let mut acc = [0.0; 3];
    for i in 1..f.len() - 1 {
        let a = sub(v[f[i]], o);
        let b = sub(v[f[i + 1]], o);
        let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        for k in 0..3 {
            acc[k] += c[k];
        }
    }
    0.5 * (acc[0] * acc[0] + acc[1] * acc[1] + acc[2] * acc[2]).sqrt()
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = sub(a, b);
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Seam identification must hold to this distance.
pub const SEAM_TOL: f64 = 1e-9;

const MIN_FACE_AREA: f64 = 1e-12;

/// Grid mesh over `(ψ, θ)` at `τ = 1`. A closed body glues its last ring
/// to the first with the column shift `res_psi·n/m`, which needs
/// `res_psi` to be a multiple of `m`.
pub fn build_mesh(params: &GmlParams, res_theta: usize, res_psi: usize, kind: MeshKind) -> Result<Mesh> {
    let m = params.m as usize;
    if res_theta < 3 * m || res_psi < 3 * m {
        return Err(invalid(format!(
            "resolution {res_theta}x{res_psi} below the 3m = {} guard",
            3 * m
        )));
    }
    if !(params.theta_span > 0.0) || params.theta_span > 2.0 * PI + 1e-12 {
        return Err(invalid(format!("theta span {} outside (0, 2π]", params.theta_span)));
    }
    let closed = params.is_closed();
    let rings = if closed { res_theta } else { res_theta + 1 };
    let psis: Vec<f64> = (0..res_psi).map(|j| 2.0 * PI * j as f64 / res_psi as f64).collect();
    let mut section_max: f64 = 0.0;
    for &psi in &psis {
        let (x, y) = params.section.local(1.0, psi)?;
        section_max = section_max.max(x.hypot(y));
    }
    let mut vertices = Vec::with_capacity(rings * res_psi + 2);
    for t in 0..rings {
        let theta = params.theta_span * t as f64 / res_theta as f64;
        if params.radius.at(theta) <= section_max {
            return Err(invalid(format!(
                "basic line radius {} at theta={theta} does not clear the section radius {section_max}",
                params.radius.at(theta)
            )));
        }
        for &psi in &psis {
            vertices.push(gml_point(1.0, psi, theta, params)?);
        }
    }
    let idx = |t: usize, j: usize| t * res_psi + j % res_psi;
    let mut faces = Vec::with_capacity(res_theta * res_psi);
    let mut seam = None;
    if closed {
        let shift = seam_shift(params, res_psi)?;
        // The ring at θ = 2π must coincide with the first ring, shifted.
        for (j, &psi) in psis.iter().enumerate() {
            let end = gml_point(1.0, psi, 2.0 * PI, params)?;
            let start = vertices[idx(0, j + shift)];
            if dist(end, start) > SEAM_TOL {
                return Err(GmlError::Closure(format!(
                    "seam mismatch {:.3e} at psi={psi}: the section is not carried onto itself by a {}/{} turn",
                    dist(end, start),
                    params.n,
                    params.m
                )));
            }
        }
        for t in 0..res_theta {
            let (nt, off) = if t + 1 == res_theta { (0, shift) } else { (t + 1, 0) };
            for j in 0..res_psi {
                faces.push(vec![idx(t, j), idx(nt, j + off), idx(nt, j + 1 + off), idx(t, j + 1)]);
            }
        }
        seam = Some(Seam {
            shift,
            rings,
            columns: res_psi,
        });
    } else {
        for t in 0..res_theta {
            for j in 0..res_psi {
                faces.push(vec![idx(t, j), idx(t + 1, j), idx(t + 1, j + 1), idx(t, j + 1)]);
            }
        }
        if kind == MeshKind::Body {
            for (t, theta) in [(0usize, 0.0), (res_theta, params.theta_span)] {
                let c = gml_point(0.0, 0.0, theta, params)?;
                let ci = vertices.len();
                vertices.push(c);
                for j in 0..res_psi {
                    if t == 0 {
                        faces.push(vec![ci, idx(t, j), idx(t, j + 1)]);
                    } else {
                        faces.push(vec![ci, idx(t, j + 1), idx(t, j)]);
                    }
                }
            }
        }
    }
    let mesh = Mesh { vertices, faces, seam };
    if let Some(f) = mesh
        .faces
        .iter()
        .find(|f| face_area(&mesh.vertices, f) <= MIN_FACE_AREA)
    {
        return Err(GmlError::Internal(format!("degenerate mesh face {f:?}")));
    }
    Ok(mesh)
}

fn seam_shift(params: &GmlParams, res_psi: usize) -> Result<usize> {
    let m = params.m as i64;
    let num = res_psi as i64 * params.n;
    if num % m != 0 {
        return Err(GmlError::Closure(format!(
            "{res_psi} section samples cannot realise a {}/{} turn",
            params.n, params.m
        )));
    }
    Ok((num / m).rem_euclid(res_psi as i64) as usize)
}

/// Number of distinct lateral faces met by walking the surface of a closed
/// polygonal body across the seam.
pub fn surface_side_trace(params: &GmlParams) -> Result<u64> {
    let m = params.m as usize;
    if !params.is_closed() {
        return Err(invalid("side trace needs a closed body"));
    }
    if !matches!(params.section, CrossSection::Polygon { m: pm } if pm == params.m) {
        return Err(invalid("side trace needs the regular m-gon section"));
    }
    let per_side = 3;
    let res_psi = per_side * m;
    let mesh = build_mesh(params, 3 * m, res_psi, MeshKind::Surface)?;
    let seam = mesh.seam.expect("closed meshes carry a seam");
    let rings = seam.rings;
    let face = |t: usize, j: usize| t * res_psi + j % res_psi;
    let mut uf = UnionFind::new(mesh.faces.len());
    for t in 0..rings {
        for j in 0..res_psi {
            // Along the basic line, through the seam on the last ring.
            if t + 1 == rings {
                uf.union(face(t, j), face(0, j + seam.shift));
            } else {
                uf.union(face(t, j), face(t + 1, j));
            }
            // Across ψ unless the shared edge is a polygon edge.
            if (j + 1) % per_side != 0 {
                uf.union(face(t, j), face(t, j + 1));
            }
        }
    }
    Ok(uf.count() as u64)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Superformula surface over a `(θ, φ)` grid with one vertex per pole.
pub fn gielis_surface_mesh(g1: &GielisParams, g2: &GielisParams, res_theta: usize, res_phi: usize) -> Result<Mesh> {
    if res_theta < 3 || res_phi < 2 {
        return Err(invalid("surface mesh needs res_theta >= 3 and res_phi >= 2"));
    }
    let mut vertices = vec![gielis_surface_point(0.0, -PI / 2.0, g1, g2)?];
    for i in 1..res_phi {
        let phi = -PI / 2.0 + PI * i as f64 / res_phi as f64;
        for j in 0..res_theta {
            let theta = -PI + 2.0 * PI * j as f64 / res_theta as f64;
            vertices.push(gielis_surface_point(theta, phi, g1, g2)?);
        }
    }
    vertices.push(gielis_surface_point(0.0, PI / 2.0, g1, g2)?);
    let top = vertices.len() - 1;
    let ring = |i: usize, j: usize| 1 + (i - 1) * res_theta + j % res_theta;
    let mut faces = Vec::new();
    for j in 0..res_theta {
        faces.push(vec![0, ring(1, j + 1), ring(1, j)]);
        faces.push(vec![top, ring(res_phi - 1, j), ring(res_phi - 1, j + 1)]);
    }
    for i in 1..res_phi - 1 {
        for j in 0..res_theta {
            faces.push(vec![ring(i, j), ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j)]);
        }
    }
    Ok(Mesh {
        vertices,
        faces,
        seam: None,
    })
}

/// `x` rounded to `digits` significant digits, printed without trailing
/// zeros.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let r: f64 = format!("{:.*e}", digits - 1, x).parse().expect("formatted float");
    let s = format!("{r}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Plain-text OBJ: `v x y z` with 9 significant digits, then `f` lines
/// with 1-based indices.
pub fn export_obj(mesh: &Mesh, out: &mut impl Write, destination: &str) -> Result<()> {
    if mesh.vertices.is_empty() || mesh.faces.is_empty() {
        return Err(invalid("refusing to export an empty mesh"));
    }
    let mut s = String::with_capacity(mesh.vertices.len() * 40 + mesh.faces.len() * 24);
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", fmt_sig(v[0], 9), fmt_sig(v[1], 9), fmt_sig(v[2], 9));
    }
    for f in &mesh.faces {
        s.push('f');
        for i in f {
            let _ = write!(s, " {}", i + 1);
        }
        s.push('\n');
    }
    out.write_all(s.as_bytes()).map_err(|e| GmlError::Io {
        path: destination.to_string(),
        reason: e.to_string(),
    })
}

/// Writes the mesh to `path`; nothing is created when the mesh is empty.
pub fn write_obj(mesh: &Mesh, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    export_obj(mesh, &mut buf, &path.display().to_string())?;
    std::fs::write(path, buf).map_err(|e| GmlError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Reads the `v` and `f` records of an OBJ document.
pub fn parse_obj(text: &str) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let bad = || invalid(format!("OBJ line {}: {line:?}", no + 1));
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                if c.len() < 3 {
                    return Err(bad());
                }
                vertices.push([c[0], c[1], c[2]]);
            }
            Some("f") => {
                let f: Vec<usize> = it
                    .map(|t| {
                        let i: usize = t.split('/').next().unwrap_or("").parse().map_err(|_| bad())?;
                        if i == 0 || i > vertices.len() {
                            return Err(bad());
                        }
                        Ok(i - 1)
                    })
                    .collect::<Result<_>>()?;
                if f.len() < 3 {
                    return Err(bad());
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    Ok(Mesh {
        vertices,
        faces,
        seam: None,
    })
}
