//! Sections of the tangent bundle and its cube from polynomial data.
//!
//! A symbol is specified by a quadratic `Q` and a sextic `P`. In chart 1 the
//! section values in the orthonormal frame are `zv = Q(z)·alpha(z)` and
//! `zw = P(z)·alpha(z)³`. In chart 2 the same sections are represented by the
//! reciprocal-substituted polynomials
//!
//! ```text
//!   Q2(w) = -(a2 + a1 w + a0 w²),      P2(w) = -(b6 + b5 w + ... + b0 w⁶),
//! ```
//!
//! pre-expanded so that the point at infinity is an ordinary point and no
//! division ever occurs. The scalar field `f = |zw|² − |zv|²` and its
//! chart-coordinate gradient are evaluated from the same closed forms; the
//! gradient is analytic (no finite differences on the evaluation path).

use alloc::string::String;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::poly;
use crate::sphere::{ChartId, ChartPoint};
use crate::Complex64;

/// Polynomial pair defining the symbol: `Q` of degree <= 2 (three
/// coefficients, low degree first) and `P` of degree <= 6 (seven
/// coefficients).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSpec {
    q: [Complex64; 3],
    p: [Complex64; 7],
    /// Chart-2 representations, fixed at construction.
    q2: [Complex64; 3],
    p2: [Complex64; 7],
    pub label: String,
}

impl SymbolSpec {
    /// Builds a spec from coefficient slices (low degree first, length at
    /// most 3 and 7; shorter slices are zero-padded). Fails if either
    /// polynomial is identically zero.
    pub fn new(q: &[Complex64], p: &[Complex64], label: &str) -> Result<Self> {
        if q.len() > 3 || q.iter().all(|c| c.norm() == 0.0) || q.is_empty() {
            return Err(Error::ZeroPolynomial("Q"));
        }
        if p.len() > 7 || p.iter().all(|c| c.norm() == 0.0) || p.is_empty() {
            return Err(Error::ZeroPolynomial("P"));
        }
        let mut qa = [Complex::new(0.0, 0.0); 3];
        let mut pa = [Complex::new(0.0, 0.0); 7];
        qa[..q.len()].copy_from_slice(q);
        pa[..p.len()].copy_from_slice(p);
        let mut q2 = [Complex::new(0.0, 0.0); 3];
        let mut p2 = [Complex::new(0.0, 0.0); 7];
        for k in 0..3 {
            q2[k] = -qa[2 - k];
        }
        for k in 0..7 {
            p2[k] = -pa[6 - k];
        }
        Ok(Self {
            q: qa,
            p: pa,
            q2,
            p2,
            label: String::from(label),
        })
    }

    /// Chart-1 coefficients of `Q`.
    pub fn q_coeffs(&self) -> &[Complex64; 3] {
        &self.q
    }

    /// Chart-1 coefficients of `P`.
    pub fn p_coeffs(&self) -> &[Complex64; 7] {
        &self.p
    }

    /// The polynomial representations of `(Q, P)` in the given chart.
    pub fn chart_polys(&self, chart: ChartId) -> (&[Complex64], &[Complex64]) {
        match chart {
            ChartId::Chart1 => (&self.q, &self.p),
            ChartId::Chart2 => (&self.q2, &self.p2),
        }
    }

    /// Frame values `(zv, zw)` of the two sections at a point, powers 1 and 3.
    pub fn eval_sections(&self, at: &ChartPoint) -> (Complex64, Complex64) {
        let (qc, pc) = self.chart_polys(at.chart);
        let a = at.conformal_factor();
        let zv = poly::eval(qc, at.coord) * a;
        let zw = poly::eval(pc, at.coord) * (a * a * a);
        (zv, zw)
    }

    /// The scalar field `f = |zw|² − |zv|²` whose zero set is the
    /// multiplicity base.
    pub fn eval_f(&self, at: &ChartPoint) -> f64 {
        let (qc, pc) = self.chart_polys(at.chart);
        let a = at.conformal_factor();
        let a2 = a * a;
        let qv = poly::eval(qc, at.coord);
        let pv = poly::eval(pc, at.coord);
        a2 * (pv.norm_sqr() * a2 * a2 - qv.norm_sqr())
    }

    /// Chart-coordinate gradient `(∂f/∂x, ∂f/∂y)`, from the analytic
    /// holomorphic-derivative form.
    pub fn eval_grad_f(&self, at: &ChartPoint) -> (f64, f64) {
        let g = self.grad_f_complex(at);
        (g.re, g.im)
    }

    /// Gradient packed as `∂f/∂x + i·∂f/∂y`.
    ///
    /// With `fz` the z-Wirtinger derivative of `f`,
    /// `fz = P'·conj(P)·a⁶ − 3|P|²a⁷·conj(c) − Q'·conj(Q)·a² + |Q|²a³·conj(c)`
    /// and the gradient is `2·conj(fz)`.
    pub fn grad_f_complex(&self, at: &ChartPoint) -> Complex64 {
        let (qc, pc) = self.chart_polys(at.chart);
        let c = at.coord;
        let a = at.conformal_factor();
        let a2 = a * a;
        let a3 = a2 * a;
        let a6 = a3 * a3;
        let qv = poly::eval(qc, c);
        let qd = poly::eval(&poly::derivative(qc), c);
        let pv = poly::eval(pc, c);
        let pd = poly::eval(&poly::derivative(pc), c);
        let fz = pd * pv.conj() * a6 - pv.norm_sqr() * a6 * a * 3.0 * c.conj()
            - qd * qv.conj() * a2
            + qv.norm_sqr() * a3 * c.conj();
        2.0 * fz.conj()
    }

    /// Full per-point record: sections, f, gradient.
    pub fn sample(&self, at: &ChartPoint) -> FieldSample {
        let (zv, zw) = self.eval_sections(at);
        FieldSample {
            point: *at,
            zv,
            zw,
            f: self.eval_f(at),
            grad_f: {
                let (gx, gy) = self.eval_grad_f(at);
                [gx, gy]
            },
        }
    }
}

/// Evaluation record of the two sections and the scalar field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub point: ChartPoint,
    /// Frame value of the tangent-line section (power 1).
    pub zv: Complex64,
    /// Frame value of the cubed-tangent section (power 3).
    pub zw: Complex64,
    pub f: f64,
    pub grad_f: [f64; 2],
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::ChartPoint;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex::new(re, im)
    }

    fn example1() -> SymbolSpec {
        SymbolSpec::new(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)], "ex1").unwrap()
    }

    #[test]
    fn rejects_zero_polynomials() {
        assert_eq!(
            SymbolSpec::new(&[], &[c(1.0, 0.0)], ""),
            Err(Error::ZeroPolynomial("Q"))
        );
        assert_eq!(
            SymbolSpec::new(&[c(1.0, 0.0)], &[c(0.0, 0.0)], ""),
            Err(Error::ZeroPolynomial("P"))
        );
    }

    #[test]
    fn section_examples() {
        let s = example1();
        // Q = z^2, P = 1 at the chart-1 origin: zv = 0, zw = alpha^3 = 8
        let (zv, zw) = s.eval_sections(&ChartPoint::in_chart1(c(0.0, 0.0)));
        assert!(zv.norm() < 1e-15);
        assert!((zw - c(8.0, 0.0)).norm() < 1e-15);

        // on the unit circle both section norms are 1
        for k in 0..8 {
            let z = crate::sphere::unit(k as f64 * 0.7853981633974483);
            let (zv, zw) = s.eval_sections(&ChartPoint::in_chart1(z));
            assert!((zv.norm() - 1.0).abs() < 1e-12);
            assert!((zw.norm() - 1.0).abs() < 1e-12);
        }

        // constant Q seen from both charts: zv = 1 at z=1 vs zv = -1 at w=1
        let s = SymbolSpec::new(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)], "q1").unwrap();
        let (zv1, _) = s.eval_sections(&ChartPoint::in_chart1(c(1.0, 0.0)));
        let (zv2, _) = s.eval_sections(&ChartPoint::in_chart2(c(1.0, 0.0)));
        assert!((zv1 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((zv2 - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((zv1.norm() - zv2.norm()).abs() < 1e-15);
    }

    #[test]
    fn f_examples() {
        let s = example1();
        assert!((s.eval_f(&ChartPoint::in_chart1(c(0.0, 0.0))) - 64.0).abs() < 1e-12);
        assert!(s.eval_f(&ChartPoint::in_chart1(c(1.0, 0.0))).abs() < 1e-15);
        assert!(s.eval_f(&ChartPoint::in_chart1(c(2.0, 0.0))) < 0.0);
        // f equals |zw|^2 - |zv|^2 by construction
        let p = ChartPoint::in_chart1(c(0.3, -0.8));
        let (zv, zw) = s.eval_sections(&p);
        assert!((s.eval_f(&p) - (zw.norm_sqr() - zv.norm_sqr())).abs() < 1e-10);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let specs = [
            example1(),
            SymbolSpec::new(
                &[c(0.2, -0.1), c(0.0, 0.7), c(1.0, 0.0)],
                &[c(-1.0, 0.0), c(0.1, 0.2), c(0.0, 0.0), c(0.3, 0.0), c(1.0, 0.0)],
                "rand",
            )
            .unwrap(),
        ];
        let h = 1e-5;
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.4 - 1.2
        };
        for s in &specs {
            for chart in [ChartId::Chart1, ChartId::Chart2] {
                for _ in 0..100 {
                    let z = c(next(), next());
                    let at = ChartPoint::new(chart, z);
                    let (gx, gy) = s.eval_grad_f(&at);
                    let fx = (s.eval_f(&ChartPoint::new(chart, z + c(h, 0.0)))
                        - s.eval_f(&ChartPoint::new(chart, z - c(h, 0.0))))
                        / (2.0 * h);
                    let fy = (s.eval_f(&ChartPoint::new(chart, z + c(0.0, h)))
                        - s.eval_f(&ChartPoint::new(chart, z - c(0.0, h))))
                        / (2.0 * h);
                    let scale = (gx.hypot(gy)).max(1.0);
                    assert!(
                        (gx - fx).abs() <= 1e-6 * scale && (gy - fy).abs() <= 1e-6 * scale,
                        "chart {chart:?} z {z} analytic ({gx},{gy}) fd ({fx},{fy})"
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_special_points() {
        let s = example1();
        // radially symmetric spec: only critical points are the two poles
        let (gx, gy) = s.eval_grad_f(&ChartPoint::in_chart2(c(0.0, 0.0)));
        assert!(gx.abs() < 1e-15 && gy.abs() < 1e-15);
        let (gx, gy) = s.eval_grad_f(&ChartPoint::in_chart1(c(0.0, 0.0)));
        assert!(gx.abs() < 1e-15 && gy.abs() < 1e-15);
        // on the positive real axis the gradient is radial
        let (gx, gy) = s.eval_grad_f(&ChartPoint::in_chart1(c(0.6, 0.0)));
        assert!(gy.abs() < 1e-14 && gx.abs() > 1e-3);
    }

    #[test]
    fn example2_half_axis_gradient_is_nonzero_at_root() {
        // Q = z^2, P = z^4 - 1: P vanishes at z = 1 but f is not critical
        // there; the analytic value is (-2, 0), confirmed by central
        // differences in `gradient_matches_central_differences` machinery.
        let s = SymbolSpec::new(
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            &[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            "ex2",
        )
        .unwrap();
        let (gx, gy) = s.eval_grad_f(&ChartPoint::in_chart1(c(1.0, 0.0)));
        assert!((gx + 2.0).abs() < 1e-12, "gx = {gx}");
        assert!(gy.abs() < 1e-12);
    }

    #[test]
    fn chart_invariance_in_overlap() {
        let s = SymbolSpec::new(
            &[c(0.4, 0.3), c(-0.2, 0.0), c(0.5, -0.5)],
            &[c(0.1, 0.0), c(0.0, -0.3), c(0.7, 0.2), c(0.0, 0.0), c(-0.4, 0.1), c(0.0, 0.2), c(0.3, 0.0)],
            "rand",
        )
        .unwrap();
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..300 {
            let r = 0.5 + 1.5 * next();
            let z = crate::sphere::unit(next() * core::f64::consts::TAU) * r;
            let p1 = ChartPoint::in_chart1(z);
            let p2 = p1.transition().unwrap();
            let (zv1, zw1) = s.eval_sections(&p1);
            let (zv2, zw2) = s.eval_sections(&p2);
            assert!((zv1.norm() - zv2.norm()).abs() < 1e-10);
            assert!((zw1.norm() - zw2.norm()).abs() < 1e-10);
            let f1 = s.eval_f(&p1);
            let f2 = s.eval_f(&p2);
            assert!((f1 - f2).abs() <= 1e-9 * f1.abs().max(1.0));
            // the frame transition phase carries zv and zw across charts
            let u1 = p1.frame_transition_phase(1).unwrap();
            let u3 = p1.frame_transition_phase(3).unwrap();
            assert!((zv2 - u1 * zv1).norm() < 1e-10);
            assert!((zw2 - u3 * zw1).norm() < 1e-10);
        }
    }
}
