//! Gielis curves and surfaces, polygon approximations, and rational-curve
//! layer counts.

use std::f64::consts::PI;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{invalid, GmlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

/// Parameters of a planar Gielis curve. The symmetry is the rational
/// `p / q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GielisParams {
    pub a: f64,
    pub b: f64,
    pub p: u32,
    pub q: u32,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub sign: Sign,
}

impl GielisParams {
    pub fn new(a: f64, b: f64, p: u32, q: u32, n1: f64, n2: f64, n3: f64) -> Result<Self> {
        let g = GielisParams {
            a,
            b,
            p,
            q,
            n1,
            n2,
            n3,
            sign: Sign::Plus,
        };
        g.validate()?;
        Ok(g)
    }

    /// Unit circle for any symmetry.
    pub fn circle() -> Self {
        GielisParams {
            a: 1.0,
            b: 1.0,
            p: 4,
            q: 1,
            n1: 2.0,
            n2: 2.0,
            n3: 2.0,
            sign: Sign::Plus,
        }
    }

    /// Lamé-type curve `|cos|^n + |sin|^n` with integer symmetry `m`.
    pub fn lame(m: u32, n: f64) -> Self {
        GielisParams {
            a: 1.0,
            b: 1.0,
            p: m,
            q: 1,
            n1: n,
            n2: n,
            n3: n,
            sign: Sign::Plus,
        }
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn symmetry(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0) {
            return Err(invalid("semi-axes A and B must be positive"));
        }
        if self.n1 == 0.0 || !self.n1.is_finite() {
            return Err(invalid("n1 must be finite and nonzero"));
        }
        if !(self.n2.is_finite() && self.n3.is_finite()) {
            return Err(invalid("n2 and n3 must be finite"));
        }
        if self.p == 0 || self.q == 0 {
            return Err(invalid("symmetry p/q needs positive p and q"));
        }
        if self.p.gcd(&self.q) != 1 {
            return Err(invalid(format!(
                "symmetry {}/{} is not in lowest terms",
                self.p, self.q
            )));
        }
        Ok(())
    }
}

pub fn gielis_radius(theta: f64, g: &GielisParams) -> Result<f64> {
    g.validate()?;
    let t = g.symmetry() * theta / 4.0;
    let u = (t.cos() / g.a).abs().powf(g.n2);
    let v = (t.sin() / g.b).abs().powf(g.n3);
    let s = match g.sign {
        Sign::Plus => u + v,
        Sign::Minus => u - v,
    };
    let r = s.powf(-1.0 / g.n1);
    if !r.is_finite() || r <= 0.0 {
        return Err(GmlError::Domain {
            theta,
            reason: format!("radius evaluates to {r} (denominator {s})"),
        });
    }
    Ok(r)
}

/// Exact polar radius of the circumradius-1 regular m-gon with a vertex at
/// `theta = 0`.
pub fn regular_polygon_radius(theta: f64, m: u32) -> f64 {
    let step = 2.0 * PI / m as f64;
    let half = PI / m as f64;
    half.cos() / (theta.rem_euclid(step) - half).cos()
}

pub fn matsuura_polygon(m: u32) -> Result<GielisParams> {
    if m < 3 {
        return Err(invalid(format!("polygon needs m >= 3, got {m}")));
    }
    let n1 = (m as f64 / 4.0).powi(2);
    GielisParams::new(1.0, 1.0, m, 1, n1, 1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatsuuraDeviation {
    pub m: u32,
    /// `max |ρ − r| / r` with `r` the exact polygon radius at the same angle.
    pub pointwise_relative: f64,
    /// `max |ρ − r|` measured against the unit circumradius.
    pub circumradius_relative: f64,
}

/// Maximum deviation of the Matsuura curve from the exact polygon over
/// `samples + 1` evenly spaced angles of one symmetry sector.
pub fn matsuura_deviation(m: u32, samples: usize) -> Result<MatsuuraDeviation> {
    let g = matsuura_polygon(m)?;
    if samples == 0 {
        return Err(invalid("samples must be positive"));
    }
    let sector = 2.0 * PI / m as f64;
    let mut pointwise = 0.0f64;
    let mut circ = 0.0f64;
    for i in 0..=samples {
        let th = sector * i as f64 / samples as f64;
        let rho = gielis_radius(th, &g)?;
        let r = regular_polygon_radius(th, m);
        pointwise = pointwise.max((rho - r).abs() / r);
        circ = circ.max((rho - r).abs());
    }
    Ok(MatsuuraDeviation {
        m,
        pointwise_relative: pointwise,
        circumradius_relative: circ,
    })
}

fn limit_exponent_base(m: u32) -> f64 {
    -2.0 * (PI / m as f64).cos().log2()
}

/// The polygon form with exponent `2(1 − n1·log2 cos(π/m))` at finite `n1`,
/// evaluated in log space. It has apothem 1 with an edge midpoint at
/// `theta = 0`.
pub fn polygon_limit_radius_finite(theta: f64, m: u32, n1: f64) -> Result<f64> {
    if m < 3 || !(n1 > 0.0) {
        return Err(invalid("need m >= 3 and n1 > 0"));
    }
    let e = 2.0 + n1 * limit_exponent_base(m);
    let t = m as f64 * theta / 4.0;
    let lc = e * t.cos().abs().ln();
    let ls = e * t.sin().abs().ln();
    let hi = lc.max(ls);
    let lse = hi + ((lc - hi).exp() + (ls - hi).exp()).ln();
    let r = (-lse / n1).exp();
    if !r.is_finite() {
        return Err(GmlError::Domain {
            theta,
            reason: "limit form overflowed".into(),
        });
    }
    Ok(r)
}

/// Pointwise limit of `polygon_limit_radius_finite` as `n1 → ∞`.
pub fn polygon_limit_radius(theta: f64, m: u32) -> f64 {
    let t = m as f64 * theta / 4.0;
    t.cos().abs().max(t.sin().abs()).powf(-limit_exponent_base(m))
}

/// Exact apothem-1 polygon with an edge midpoint at `theta = 0`, the shape
/// the limit form approximates.
pub fn edge_centred_polygon_radius(theta: f64, m: u32) -> f64 {
    let half = PI / m as f64;
    regular_polygon_radius(theta + half, m) / half.cos()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RgcLayerProfile {
    pub p: u32,
    pub q: u32,
    pub layer_shape_counts: Vec<u32>,
}

pub fn rgc_layer_counts(p: u32, q: u32) -> Result<RgcLayerProfile> {
    if p < 3 || q < 1 || q >= p {
        return Err(invalid(format!("need p >= 3 and 1 <= q < p, got {p}/{q}")));
    }
    if p.gcd(&q) != 1 {
        return Err(invalid(format!("{p} and {q} are not coprime")));
    }
    Ok(RgcLayerProfile {
        p,
        q,
        layer_shape_counts: (0..q).map(|a| a * p + 1).collect(),
    })
}

/// Surface point from two planar curves: `ρ1` drives longitude `theta`,
/// `ρ2` drives latitude `phi`.
pub fn gielis_surface_point(
    theta: f64,
    phi: f64,
    rho1: &GielisParams,
    rho2: &GielisParams,
) -> Result<[f64; 3]> {
    let r1 = gielis_radius(theta, rho1)?;
    let r2 = gielis_radius(phi, rho2)?;
    Ok([
        r1 * theta.cos() * r2 * phi.cos(),
        r1 * theta.sin() * r2 * phi.cos(),
        r2 * phi.sin(),
    ])
}

/// Parameters of the single-radius volumetric form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumetricParams {
    pub m1: f64,
    pub m2: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub n4: f64,
}

impl VolumetricParams {
    pub fn sphere() -> Self {
        VolumetricParams {
            m1: 4.0,
            m2: 4.0,
            a: 1.0,
            b: 1.0,
            c: 1.0,
            n1: 2.0,
            n2: 2.0,
            n3: 2.0,
            n4: 2.0,
        }
    }
}

/// Radius `r(θ, φ)` of the volumetric form; the modulation factor is taken
/// as 1.
pub fn volumetric_radius(theta: f64, phi: f64, v: &VolumetricParams) -> Result<f64> {
    if !(v.a > 0.0 && v.b > 0.0 && v.c > 0.0) || v.n1 == 0.0 {
        return Err(invalid("volumetric form needs positive A, B, C and n1 != 0"));
    }
    let (st, ct) = (v.m1 * theta / 4.0).sin_cos();
    let (sp, cp) = (v.m2 * phi / 4.0).sin_cos();
    let s = (st * cp / v.a).abs().powf(v.n2)
        + (st * sp / v.b).abs().powf(v.n3)
        + (ct / v.c).abs().powf(v.n4);
    let r = s.powf(-1.0 / v.n1);
    if !r.is_finite() {
        return Err(GmlError::Domain {
            theta,
            reason: format!("volumetric radius non-finite at phi={phi}"),
        });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn circle_is_constant() {
        for i in 0..1000 {
            let th = i as f64 * 0.0131;
            let r = gielis_radius(th, &GielisParams::circle()).unwrap();
            assert_relative_eq!(r, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn square_lame_diagonal() {
        let r = gielis_radius(PI / 4.0, &GielisParams::lame(4, 1.0)).unwrap();
        // Argument (4/4)·(π/4): |cos| + |sin| = √2.
        let t: f64 = PI / 4.0;
        assert_relative_eq!(r, 1.0 / (t.cos() + t.sin()), epsilon = 1e-14);
        assert_relative_eq!(r, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn polygon_reference_values() {
        for m in 3..12 {
            assert_relative_eq!(regular_polygon_radius(0.0, m), 1.0, epsilon = 1e-15);
            let h = PI / m as f64;
            assert_relative_eq!(regular_polygon_radius(h, m), h.cos(), epsilon = 1e-15);
        }
        assert_relative_eq!(
            regular_polygon_radius(PI / 4.0, 4),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn matsuura_exponents() {
        assert_eq!(matsuura_polygon(5).unwrap().n1, 25.0 / 16.0);
        assert_eq!(matsuura_polygon(4).unwrap().n1, 1.0);
        let d = matsuura_deviation(11, 4000).unwrap();
        assert!(d.pointwise_relative < 0.005);
    }

    #[test]
    fn matsuura_hexagon_excess() {
        let d = matsuura_deviation(6, 20000).unwrap();
        assert!(d.pointwise_relative > 0.0101 && d.pointwise_relative < 0.0102);
        assert!(d.circumradius_relative < 0.009);
        for m in (5..=20).filter(|&m| m != 6) {
            assert!(matsuura_deviation(m, 20000).unwrap().pointwise_relative < 0.01);
        }
    }

    #[test]
    fn minus_sign_domain_error() {
        // cos² − sin² is negative at θ = π/2 for m = 4.
        let g = GielisParams::lame(4, 2.0).with_sign(Sign::Minus);
        let e = gielis_radius(PI / 2.0, &g).unwrap_err();
        assert!(matches!(e, GmlError::Domain { .. }));
    }

    #[test]
    fn limit_form_converges() {
        for m in [3u32, 4, 5, 6, 8] {
            let mut prev = f64::INFINITY;
            for n1 in [10.0, 100.0, 1000.0, 10000.0] {
                let gap = (0..=400)
                    .map(|i| {
                        let th = 2.0 * PI / m as f64 * i as f64 / 400.0;
                        (polygon_limit_radius_finite(th, m, n1).unwrap()
                            - polygon_limit_radius(th, m))
                        .abs()
                    })
                    .fold(0.0, f64::max);
                assert!(gap < prev, "m={m} n1={n1}");
                prev = gap;
            }
            assert!(prev < 1e-3);
            let h = PI / m as f64;
            assert_relative_eq!(polygon_limit_radius(0.0, m), 1.0, epsilon = 1e-12);
            assert_relative_eq!(polygon_limit_radius(h, m), 1.0 / h.cos(), epsilon = 1e-12);
        }
        // Only the square's limit is straight-sided.
        for i in 0..100 {
            let th = i as f64 * 0.07;
            assert_relative_eq!(
                polygon_limit_radius(th, 4),
                edge_centred_polygon_radius(th, 4),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn rgc_counts() {
        assert_eq!(rgc_layer_counts(5, 2).unwrap().layer_shape_counts, vec![1, 6]);
        assert_eq!(*rgc_layer_counts(5, 3).unwrap().layer_shape_counts.last().unwrap(), 11);
        assert_eq!(*rgc_layer_counts(5, 4).unwrap().layer_shape_counts.last().unwrap(), 16);
        assert!(rgc_layer_counts(6, 4).is_err());
        assert!(rgc_layer_counts(5, 5).is_err());
    }

    #[test]
    fn seven_fifths_has_seven_maxima() {
        let g = GielisParams::new(1.0, 1.0, 7, 5, 3.0, 5.0, 5.0).unwrap();
        let n = 7000;
        let period = 2.0 * 5.0 * PI;
        let r: Vec<f64> = (0..n)
            .map(|i| gielis_radius(period * i as f64 / n as f64, &g).unwrap())
            .collect();
        let maxima = (0..n)
            .filter(|&i| r[i] > r[(i + n - 1) % n] && r[i] >= r[(i + 1) % n])
            .count();
        assert_eq!(maxima, 7);
    }

    #[test]
    fn surface_points() {
        let c = GielisParams::circle();
        let p = gielis_surface_point(0.0, 0.0, &c, &c).unwrap();
        assert_relative_eq!(p[0], 1.0);
        let p = gielis_surface_point(0.3, PI / 2.0, &c, &c).unwrap();
        assert_relative_eq!(p[2], 1.0);
        let l = GielisParams::lame(4, 1.0);
        let p = gielis_surface_point(0.0, 0.0, &c, &l).unwrap();
        assert_relative_eq!(p[0], gielis_radius(0.0, &l).unwrap());
        assert_relative_eq!(
            volumetric_radius(0.4, 0.9, &VolumetricParams::sphere()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    proptest! {
        #[test]
        fn closes_after_q_turns(p in 3u32..12, q in 1u32..6, th in -10.0f64..10.0) {
            prop_assume!(p.gcd(&q) == 1);
            let g = GielisParams::new(1.0, 1.0, p, q, 2.5, 3.0, 3.0).unwrap();
            let a = gielis_radius(th, &g).unwrap();
            let b = gielis_radius(th + 2.0 * PI * q as f64, &g).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
            // Unequal axes or exponents need twice as many turns for odd p.
            let h = GielisParams::new(1.0, 1.3, p, q, 2.5, 3.0, 1.5).unwrap();
            let a = gielis_radius(th, &h).unwrap();
            let b = gielis_radius(th + 4.0 * PI * q as f64, &h).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn rotational_symmetry(p in 3u32..12, q in 1u32..4, th in -10.0f64..10.0) {
            prop_assume!(p.gcd(&q) == 1);
            let g = GielisParams::new(1.0, 1.0, p, q, 2.5, 3.0, 1.5).unwrap();
            let step = 4.0 * PI * q as f64 / p as f64;
            let a = gielis_radius(th, &g).unwrap();
            let b = gielis_radius(th + step, &g).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn matsuura_band(m in 5u32..21, th in 0.0f64..6.3) {
            // The hexagon overshoots; see `matsuura_hexagon_excess`.
            prop_assume!(m != 6);
            let g = matsuura_polygon(m).unwrap();
            let r = gielis_radius(th, &g).unwrap();
            let ap = (PI / m as f64).cos();
            prop_assert!(r >= ap * 0.99 && r <= 1.01);
        }
    }
}
