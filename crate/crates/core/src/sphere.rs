//! Two-chart stereographic atlas of the unit sphere.
//!
//! Chart 1 is the stereographic plane from the north pole `(0,0,1)` (so its
//! origin is the south pole), chart 2 the plane from the south pole with the
//! imaginary axis conjugated, which makes the transition map the holomorphic
//! inversion `w = 1/z`. Both charts carry the round metric in the conformal
//! form `alpha(c)² |dc|²` with `alpha(c) = 2/(1+|c|²)`, and `{e1, i·e1}` with
//! `e1 = alpha⁻¹ ∂/∂x` is the orthonormal frame used for all section values.
//!
//! A tangent-power section is represented in a chart by a single complex
//! number, its [`FrameScalar`]; changing charts multiplies it by the unit
//! phase of `(-c⁻²)ⁿ` while the conformal factor absorbs the modulus.

use num_complex::Complex;
#[allow(unused_imports)] use num_traits::Float;

use crate::error::{Error, Result};
use crate::Complex64;

/// The two stereographic charts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChartId {
    /// Covers the sphere minus the north pole `(0,0,1)`; coordinate `z`.
    Chart1,
    /// Covers the sphere minus the south pole `(0,0,-1)`; coordinate `w = 1/z`.
    Chart2,
}

impl ChartId {
    /// The opposite chart.
    pub fn other(self) -> ChartId {
        match self {
            ChartId::Chart1 => ChartId::Chart2,
            ChartId::Chart2 => ChartId::Chart1,
        }
    }

    /// Short label used in reports and figures.
    pub fn label(self) -> &'static str {
        match self {
            ChartId::Chart1 => "z",
            ChartId::Chart2 => "w",
        }
    }
}

/// A point of the sphere, as a chart plus a complex coordinate in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub coord: Complex64,
}

impl ChartPoint {
    pub fn new(chart: ChartId, coord: Complex64) -> Self {
        Self { chart, coord }
    }

    /// Point with the given coordinate in chart 1.
    pub fn in_chart1(coord: Complex64) -> Self {
        Self::new(ChartId::Chart1, coord)
    }

    /// Point with the given coordinate in chart 2.
    pub fn in_chart2(coord: Complex64) -> Self {
        Self::new(ChartId::Chart2, coord)
    }

    /// Embedding into the unit sphere in R³.
    ///
    /// Chart 1 maps `x+iy` to `(2x, 2y, x²+y²-1)/(1+x²+y²)`; chart 2 uses the
    /// conjugated second stereographic projection so that `w = 1/z` lands on
    /// the same point.
    pub fn embed(&self) -> [f64; 3] {
        let x = self.coord.re;
        let y = self.coord.im;
        let d = 1.0 + x * x + y * y;
        match self.chart {
            ChartId::Chart1 => [2.0 * x / d, 2.0 * y / d, (x * x + y * y - 1.0) / d],
            ChartId::Chart2 => [2.0 * x / d, -2.0 * y / d, (1.0 - x * x - y * y) / d],
        }
    }

    /// The same sphere point expressed in the other chart via `w = 1/z`.
    pub fn transition(&self) -> Result<ChartPoint> {
        if self.coord.norm() == 0.0 {
            return Err(Error::PoleNotInChart);
        }
        Ok(ChartPoint::new(self.chart.other(), self.coord.inv()))
    }

    /// Re-expresses the point in `chart`, a no-op when it is already there.
    pub fn to_chart(&self, chart: ChartId) -> Result<ChartPoint> {
        if self.chart == chart {
            Ok(*self)
        } else {
            self.transition()
        }
    }

    /// Canonical representative: chart 1 when `|coord| <= 1`, chart 2
    /// otherwise, so coordinates stay bounded by 1.
    pub fn canonical(&self) -> ChartPoint {
        let r = self.coord.norm();
        match self.chart {
            ChartId::Chart1 if r > 1.0 => self.transition().expect("r > 1"),
            ChartId::Chart2 if r > 1.0 => self.transition().expect("r > 1"),
            _ => *self,
        }
    }

    /// Conformal factor `alpha = 2/(1+|coord|²)` of the round metric, in `(0, 2]`.
    pub fn conformal_factor(&self) -> f64 {
        2.0 / (1.0 + self.coord.norm_sqr())
    }

    /// Unit phase by which a frame scalar of power `n` is multiplied when the
    /// point moves to the other chart: `phase(-coord⁻²)ⁿ = (-conj(c)/c)ⁿ`.
    pub fn frame_transition_phase(&self, n: u32) -> Result<Complex64> {
        if self.coord.norm() == 0.0 {
            return Err(Error::PoleNotInChart);
        }
        let u = -(self.coord.conj() / self.coord);
        // u is unit modulus up to rounding; renormalize before taking powers.
        let u = u / u.norm();
        Ok(u.powu(n))
    }

    /// Euclidean chord distance to another point, chart-independent.
    pub fn chord_dist(&self, other: &ChartPoint) -> f64 {
        let a = self.embed();
        let b = other.embed();
        let mut s = 0.0;
        for k in 0..3 {
            let d = a[k] - b[k];
            s += d * d;
        }
        s.sqrt()
    }
}

/// A section value of the n-th complex tangent power in the local orthonormal
/// frame: `value` stands for `Re(value)·e1ⁿ + Im(value)·(i e1ⁿ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameScalar {
    pub value: Complex64,
    /// Which tensor power the value lives in (1 for tangent vectors).
    pub power: u32,
}

impl FrameScalar {
    pub fn new(value: Complex64, power: u32) -> Self {
        Self { value, power }
    }

    /// Frame norm, chart-invariant.
    pub fn norm(&self) -> f64 {
        self.value.norm()
    }

    /// The same section value in the other chart's frame at the given point.
    pub fn transition(&self, at: &ChartPoint) -> Result<FrameScalar> {
        let u = at.frame_transition_phase(self.power)?;
        Ok(FrameScalar::new(u * self.value, self.power))
    }
}

/// Unit complex number `e^{i·theta}`.
pub fn unit(theta: f64) -> Complex64 {
    Complex::new(theta.cos(), theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex::new(re, im)
    }

    #[test]
    fn embed_chart_origins() {
        let south = ChartPoint::in_chart1(c(0.0, 0.0)).embed();
        assert_eq!(south, [0.0, 0.0, -1.0]);
        let north = ChartPoint::in_chart2(c(0.0, 0.0)).embed();
        assert_eq!(north, [0.0, 0.0, 1.0]);
        let e = ChartPoint::in_chart1(c(1.0, 0.0)).embed();
        assert!((e[0] - 1.0).abs() < 1e-15 && e[1].abs() < 1e-15 && e[2].abs() < 1e-15);
    }

    #[test]
    fn embed_is_unit_norm() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 8.0 - 4.0
        };
        for _ in 0..200 {
            for chart in [ChartId::Chart1, ChartId::Chart2] {
                let p = ChartPoint::new(chart, c(next(), next()));
                let e = p.embed();
                let n = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transition_examples() {
        let p = ChartPoint::in_chart1(c(1.0, 0.0)).transition().unwrap();
        assert_eq!(p.chart, ChartId::Chart2);
        assert!((p.coord - c(1.0, 0.0)).norm() < 1e-15);

        let p = ChartPoint::in_chart1(c(2.0, 0.0)).transition().unwrap();
        assert!((p.coord - c(0.5, 0.0)).norm() < 1e-15);

        let p = ChartPoint::in_chart1(c(0.0, 1.0)).transition().unwrap();
        assert!((p.coord - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn transition_preserves_embedding() {
        for (re, im) in [(0.3, 0.4), (1.7, -0.2), (-0.9, 0.6), (0.05, -0.02)] {
            let p = ChartPoint::in_chart1(c(re, im));
            let q = p.transition().unwrap();
            assert!(p.chord_dist(&q) < 1e-12, "{re} {im}");
            let back = q.transition().unwrap();
            assert!((back.coord - p.coord).norm() < 1e-12);
        }
    }

    #[test]
    fn transition_at_pole_fails() {
        assert_eq!(
            ChartPoint::in_chart1(c(0.0, 0.0)).transition(),
            Err(Error::PoleNotInChart)
        );
    }

    #[test]
    fn conformal_factor_values() {
        assert_eq!(ChartPoint::in_chart1(c(0.0, 0.0)).conformal_factor(), 2.0);
        assert!((ChartPoint::in_chart1(c(1.0, 0.0)).conformal_factor() - 1.0).abs() < 1e-15);
        assert!((ChartPoint::in_chart1(c(3.0, 0.0)).conformal_factor() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn frame_phase_examples() {
        let p = ChartPoint::in_chart1(c(1.0, 0.0));
        let u1 = p.frame_transition_phase(1).unwrap();
        assert!((u1 - c(-1.0, 0.0)).norm() < 1e-15);
        let u3 = p.frame_transition_phase(3).unwrap();
        assert!((u3 - c(-1.0, 0.0)).norm() < 1e-15);

        // z = e^{i pi/4}: phase(-z^{-2}) = e^{i pi/2}
        let z = unit(core::f64::consts::FRAC_PI_4);
        let u = ChartPoint::in_chart1(z).frame_transition_phase(1).unwrap();
        assert!((u - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn embed_injective_per_chart() {
        let pts: Vec<ChartPoint> = [(0.2, 0.3), (0.21, 0.3), (-1.5, 0.7), (0.2, 0.301)]
            .iter()
            .map(|&(re, im)| ChartPoint::in_chart1(c(re, im)))
            .collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                assert!(pts[i].chord_dist(&pts[j]) > 1e-6);
            }
        }
    }
}
