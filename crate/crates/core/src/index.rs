//! Winding numbers, field indices along curves, the kernel line-field index,
//! the critical-point census, and the three-way index verification.
//!
//! All windings are measured against powers of the curve's unit tangent
//! frame, so every accumulated quantity is chart-invariant and mixed-chart
//! curves need no seams. Winding sums must land within `winding_residual` of
//! their admissible lattice (integers, or half-integers for the kernel
//! branch) or the computation fails loudly.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex;
#[allow(unused_imports)] use num_traits::Float;

use crate::error::{Error, Result};
use crate::fields::SymbolSpec;
use crate::sphere::{ChartId, ChartPoint};
use crate::tol::Tolerances;
use crate::trace::{
    genericity_diagnostic, trace_level_set, GenericityReport, OrientedCurve, Verdict,
};
use crate::Complex64;

/// Euler characteristic of the sphere, the only surface this backend
/// implements.
pub const EULER_CHARACTERISTIC: i32 = 2;

/// Which of the two sections to measure along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionKind {
    /// The tangent-line section (frame power 1).
    VQ,
    /// The cubed-tangent section (frame power 3).
    VP,
}

impl SectionKind {
    fn power(self) -> i32 {
        match self {
            SectionKind::VQ => 1,
            SectionKind::VP => 3,
        }
    }
}

/// Which critical points to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Only critical points with `f < 0`.
    SMinus,
    /// Everything on the sphere.
    All,
}

/// A refined critical point of `f` with its gradient winding index.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPointRec {
    /// Canonical chart representation (`|coord| <= 1`).
    pub point: ChartPoint,
    /// Winding number of `grad f` on a small circle around the point.
    pub grad_index: i32,
    pub f_value: f64,
    pub in_s_minus: bool,
}

/// Critical-point search output.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSearch {
    pub points: Vec<CriticalPointRec>,
    /// Seeds whose Newton iteration failed to converge (not fatal).
    pub diverged_seeds: usize,
}

/// Per-component index triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentIndices {
    pub ind_v: i32,
    pub ind_w: i32,
    pub ind_m: i32,
}

/// The three independent index computations and their per-component pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    /// Kernel line-field winding, summed over components.
    pub ind_direct: i32,
    /// Difference of the section indices, summed over components.
    pub ind_w_minus_v: i32,
    /// `3·chi − 2·(sum of gradient indices over critical points with f < 0)`.
    pub ind_formula: i32,
    pub per_component: Vec<ComponentIndices>,
    pub critical_points: Vec<CriticalPointRec>,
    /// Newton seeds that did not converge during the critical-point search.
    pub diverged_seeds: usize,
    /// Worst pre-rounding winding residual encountered.
    pub max_residual: f64,
    pub consistent: bool,
}

// ---------------------------------------------------------------------------
// winding numbers
// ---------------------------------------------------------------------------

/// Sum of principal angle increments between consecutive samples, in turns.
/// Guards: every sample nonzero, every increment strictly below pi/2.
fn turn_sum(samples: &[Complex64], closed: bool) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::UndersampledLoop { increment: core::f64::consts::PI });
    }
    for (k, s) in samples.iter().enumerate() {
        if s.norm() < 1e-14 {
            return Err(Error::ZeroVector { index: k });
        }
    }
    let count = if closed { samples.len() } else { samples.len() - 1 };
    let mut total = 0.0;
    for k in 0..count {
        let inc = (samples[(k + 1) % samples.len()] / samples[k]).arg();
        if inc.abs() >= core::f64::consts::FRAC_PI_2 {
            return Err(Error::UndersampledLoop { increment: inc.abs() });
        }
        total += inc;
    }
    Ok(total / core::f64::consts::TAU)
}

/// Winding number of a sampled loop of nonzero plane vectors around the
/// origin. The pre-rounding residual must stay below `0.05` turns.
pub fn winding_number(samples: &[Complex64], closed: bool) -> Result<i32> {
    let turns = turn_sum(samples, closed)?;
    let rounded = turns.round();
    let residual = (turns - rounded).abs();
    if residual > 0.05 {
        return Err(Error::WindingResidual { residual });
    }
    Ok(rounded as i32)
}

// ---------------------------------------------------------------------------
// indices along curves
// ---------------------------------------------------------------------------

/// Per-vertex data for index computations: section values and the unit
/// tangent, each in the vertex's own chart.
fn curve_frames(
    spec: &SymbolSpec,
    curve: &OrientedCurve,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let n = curve.len();
    let mut zv = Vec::with_capacity(n);
    let mut zw = Vec::with_capacity(n);
    let mut tau = Vec::with_capacity(n);
    for k in 0..n {
        let (v, w) = spec.eval_sections(&curve.vertices[k]);
        zv.push(v);
        zw.push(w);
        tau.push(curve.unit_tangent(k));
    }
    (zv, zw, tau)
}

/// Index of one section along an oriented curve: the winding of the section
/// measured against the matching power of the unit tangent frame.
pub fn field_index_along_curve(
    spec: &SymbolSpec,
    curve: &OrientedCurve,
    which: SectionKind,
) -> Result<i32> {
    let (zv, zw, tau) = curve_frames(spec, curve);
    let sec = match which {
        SectionKind::VQ => &zv,
        SectionKind::VP => &zw,
    };
    let min_mod = sec.iter().fold(f64::INFINITY, |m, s| m.min(s.norm()));
    if min_mod <= 1e-8 {
        return Err(Error::SectionVanishesOnCurve { min_modulus: min_mod });
    }
    let n = which.power();
    let samples: Vec<Complex64> = sec
        .iter()
        .zip(&tau)
        .map(|(s, t)| s / t.powi(n))
        .collect();
    winding_number(&samples, true)
}

/// Kernel line-field index over each component, by continuous branch
/// tracking.
///
/// At every vertex the two unit kernel candidates `±i·(zw/zv)^{1/2}` are
/// reduced by the tangent frame; the branch nearer to the previous value is
/// followed and its angle increments accumulated. One traversal accumulates a
/// multiple of half a turn (the branch returns to itself or to its negative,
/// according to the parity of the component); the component index is twice
/// the accumulated turns, covering both branches of the double cover.
pub fn multiplicity_index_direct(
    spec: &SymbolSpec,
    curves: &[OrientedCurve],
) -> Result<(i32, Vec<i32>)> {
    let mut per = Vec::with_capacity(curves.len());
    let mut total = 0i32;
    for curve in curves {
        let (ind, _residual) = kernel_branch_index(spec, curve)?;
        per.push(ind);
        total += ind;
    }
    Ok((total, per))
}

pub(crate) fn kernel_branch_index(spec: &SymbolSpec, curve: &OrientedCurve) -> Result<(i32, f64)> {
    let (zv, zw, tau) = curve_frames(spec, curve);
    let n = curve.len();
    let min_mod = zv
        .iter()
        .chain(zw.iter())
        .fold(f64::INFINITY, |m, s| m.min(s.norm()));
    if min_mod <= 1e-8 {
        return Err(Error::SectionVanishesOnCurve { min_modulus: min_mod });
    }
    // the kernel condition must hold along the curve
    let defect = zv
        .iter()
        .zip(&zw)
        .fold(0.0f64, |m, (v, w)| m.max((v.norm() - w.norm()).abs()));
    if defect > 1e-4 {
        return Err(Error::SectionVanishesOnCurve { min_modulus: defect });
    }
    let mu = |k: usize| -> Complex64 {
        let d = Complex::<f64>::i() * (zw[k] / zv[k]).sqrt();
        let d = d / d.norm();
        d / tau[k]
    };
    let mut current = mu(0);
    let mut total = 0.0f64;
    for step in 1..=n {
        let cand = mu(step % n);
        let d_plus = (cand / current).arg();
        let d_minus = (-cand / current).arg();
        let (inc, next) = if d_plus.abs() <= d_minus.abs() {
            (d_plus, cand)
        } else {
            (d_minus, -cand)
        };
        if inc.abs() > core::f64::consts::FRAC_PI_4 {
            return Err(Error::BranchJump { angle: inc.abs() });
        }
        total += inc;
        current = next;
    }
    // twice the accumulated turns; one traversal accumulates k/2 turns
    let doubled = 2.0 * total / core::f64::consts::TAU;
    let rounded = doubled.round();
    let residual = (doubled - rounded).abs();
    if residual > 0.05 {
        return Err(Error::WindingResidual { residual });
    }
    Ok((rounded as i32, residual))
}

/// Winding index of a section around an isolated zero: the winding of its
/// frame value on a circle of the given radius about `center`, in the chart
/// of `center`. Sums over all zeros to the Euler number of the bundle (2 for
/// the tangent line, 6 for its cube).
pub fn section_zero_index(
    spec: &SymbolSpec,
    which: SectionKind,
    center: &ChartPoint,
    radius: f64,
    samples: usize,
) -> Result<i32> {
    let vals: Vec<Complex64> = (0..samples)
        .map(|s| {
            let ang = core::f64::consts::TAU * s as f64 / samples as f64;
            let c = center.coord + Complex::new(radius * ang.cos(), radius * ang.sin());
            let (zv, zw) = spec.eval_sections(&ChartPoint::new(center.chart, c));
            match which {
                SectionKind::VQ => zv,
                SectionKind::VP => zw,
            }
        })
        .collect();
    winding_number(&vals, true)
}

// ---------------------------------------------------------------------------
// critical points
// ---------------------------------------------------------------------------

/// Newton iteration for `grad f = 0` with a finite-difference Jacobian of the
/// analytic gradient.
fn newton_critical(
    spec: &SymbolSpec,
    chart: ChartId,
    start: Complex64,
    tol: &Tolerances,
) -> Option<ChartPoint> {
    let h = 1e-6;
    let mut c = start;
    for _ in 0..tol.newton_max_iter {
        let g = spec.grad_f_complex(&ChartPoint::new(chart, c));
        if g.norm() <= tol.newton_eps {
            break;
        }
        let gxp = spec.grad_f_complex(&ChartPoint::new(chart, c + Complex::new(h, 0.0)));
        let gxm = spec.grad_f_complex(&ChartPoint::new(chart, c - Complex::new(h, 0.0)));
        let gyp = spec.grad_f_complex(&ChartPoint::new(chart, c + Complex::new(0.0, h)));
        let gym = spec.grad_f_complex(&ChartPoint::new(chart, c - Complex::new(0.0, h)));
        let a = (gxp.re - gxm.re) / (2.0 * h);
        let b = (gyp.re - gym.re) / (2.0 * h);
        let d = (gxp.im - gxm.im) / (2.0 * h);
        let e = (gyp.im - gym.im) / (2.0 * h);
        let det = a * e - b * d;
        if det.abs() < 1e-14 {
            return None;
        }
        let dx = (-g.re * e + b * g.im) / det;
        let dy = (g.re * d - a * g.im) / det;
        let step = Complex::new(dx, dy);
        c += step;
        if !c.re.is_finite() || !c.im.is_finite() || c.norm() > 1e6 {
            return None;
        }
        if step.norm() < 1e-15 {
            break;
        }
    }
    let at = ChartPoint::new(chart, c);
    if spec.grad_f_complex(&at).norm() <= 1e-10 {
        Some(at)
    } else {
        None
    }
}

/// Finds the critical points of `f`, their gradient winding indices, and
/// whether they lie in `{f < 0}`.
///
/// Seeds come from the local minima of `|grad f|²` on a `crit_grid` per-chart
/// grid; converged roots closer than `1e-6` in the embedding are merged. The
/// gradient winding runs on a circle of radius `grad_index_radius` (shrunk
/// when two critical points are close).
pub fn find_critical_points(
    spec: &SymbolSpec,
    region: Region,
    tol: &Tolerances,
) -> Result<CriticalSearch> {
    let n = tol.crit_grid;
    let r = tol.disk_radius;
    let step = 2.0 * r / n as f64;
    let mut found: Vec<ChartPoint> = Vec::new();
    let mut diverged = 0usize;

    for chart in [ChartId::Chart1, ChartId::Chart2] {
        let mut g2 = vec![0.0f64; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=n {
                let c = Complex::new(-r + step * i as f64, -r + step * j as f64);
                g2[i * (n + 1) + j] = spec.grad_f_complex(&ChartPoint::new(chart, c)).norm_sqr();
            }
        }
        let at = |i: usize, j: usize| g2[i * (n + 1) + j];
        for i in 1..n {
            for j in 1..n {
                let c = Complex::new(-r + step * i as f64, -r + step * j as f64);
                if c.norm() > r {
                    continue;
                }
                let v = at(i, j);
                let is_min = (-1..=1).all(|di: isize| {
                    (-1..=1).all(|dj: isize| {
                        v <= at((i as isize + di) as usize, (j as isize + dj) as usize)
                    })
                });
                if !is_min {
                    continue;
                }
                match newton_critical(spec, chart, c, tol) {
                    Some(p) => {
                        let p = p.canonical();
                        if !found.iter().any(|q| q.chord_dist(&p) < 1e-6) {
                            found.push(p);
                        }
                    }
                    None => diverged += 1,
                }
            }
        }
    }

    // deterministic order by embedding
    found.sort_by(|a, b| {
        a.embed()
            .partial_cmp(&b.embed())
            .unwrap_or(core::cmp::Ordering::Equal)
    });

    let mut points = Vec::with_capacity(found.len());
    for (k, p) in found.iter().enumerate() {
        let mut radius = tol.grad_index_radius;
        for (j, q) in found.iter().enumerate() {
            if j != k {
                radius = radius.min(p.chord_dist(q) / 3.0);
            }
        }
        let m = tol.grad_index_samples;
        let samples: Vec<Complex64> = (0..m)
            .map(|s| {
                let ang = core::f64::consts::TAU * s as f64 / m as f64;
                let c = p.coord + Complex::new(radius * ang.cos(), radius * ang.sin());
                spec.grad_f_complex(&ChartPoint::new(p.chart, c))
            })
            .collect();
        let grad_index = winding_number(&samples, true).map_err(|e| match e {
            Error::WindingResidual { residual } => Error::DegenerateCritical {
                x: p.coord.re,
                y: p.coord.im,
                residual,
            },
            other => other,
        })?;
        let f_value = spec.eval_f(p);
        let rec = CriticalPointRec {
            point: *p,
            grad_index,
            f_value,
            in_s_minus: f_value < 0.0,
        };
        if region == Region::All || rec.in_s_minus {
            points.push(rec);
        }
    }
    Ok(CriticalSearch { points, diverged_seeds: diverged })
}

// ---------------------------------------------------------------------------
// three-way verification
// ---------------------------------------------------------------------------

/// Assembles the three index computations for already-traced curves and an
/// already-run critical-point search.
pub fn index_report_for_curves(
    spec: &SymbolSpec,
    curves: &[OrientedCurve],
    search: &CriticalSearch,
    tol: &Tolerances,
) -> Result<IndexReport> {
    let _ = tol;
    let mut per = Vec::with_capacity(curves.len());
    let mut max_residual = 0.0f64;
    for curve in curves {
        let ind_v = field_index_along_curve(spec, curve, SectionKind::VQ)?;
        let ind_w = field_index_along_curve(spec, curve, SectionKind::VP)?;
        let (ind_m, residual) = kernel_branch_index(spec, curve)?;
        max_residual = max_residual.max(residual);
        per.push(ComponentIndices { ind_v, ind_w, ind_m });
    }
    let ind_direct: i32 = per.iter().map(|c| c.ind_m).sum();
    let ind_w_minus_v: i32 = per.iter().map(|c| c.ind_w - c.ind_v).sum();
    let grad_sum: i32 = search
        .points
        .iter()
        .filter(|p| p.in_s_minus)
        .map(|p| p.grad_index)
        .sum();
    let ind_formula = 3 * EULER_CHARACTERISTIC - 2 * grad_sum;
    let consistent = ind_direct == ind_w_minus_v && ind_w_minus_v == ind_formula;
    Ok(IndexReport {
        ind_direct,
        ind_w_minus_v,
        ind_formula,
        per_component: per,
        critical_points: search.points.clone(),
        diverged_seeds: search.diverged_seeds,
        max_residual,
        consistent,
    })
}

/// Traces the multiplicity base, runs the genericity gate, computes the index
/// three ways, and errors if the results disagree.
pub fn verify_index_identity(
    spec: &SymbolSpec,
    grid_n: usize,
    tol: &Tolerances,
) -> Result<IndexReport> {
    let curves = trace_level_set(spec, grid_n, tol)?;
    let gen = genericity_diagnostic(spec, &curves, tol);
    if gen.verdict != Verdict::Generic {
        return Err(Error::NonGenericSymbol {
            verdict: gen.verdict.label(),
            min_grad: gen.min_grad_norm_on_curve,
        });
    }
    let search = find_critical_points(spec, Region::All, tol)?;
    let report = report_with_densify_retries(spec, &curves, &search, tol)?;
    if !report.consistent {
        return Err(Error::InconsistentIndices {
            direct: report.ind_direct,
            w_minus_v: report.ind_w_minus_v,
            formula: report.ind_formula,
        });
    }
    Ok(report)
}

/// Runs the per-curve index computations, subdividing all curves and retrying
/// when a winding is undersampled or a kernel branch jumps.
pub fn report_with_densify_retries(
    spec: &SymbolSpec,
    curves: &[OrientedCurve],
    search: &CriticalSearch,
    tol: &Tolerances,
) -> Result<IndexReport> {
    let mut working: Vec<OrientedCurve> = curves.to_vec();
    for _attempt in 0..4 {
        match index_report_for_curves(spec, &working, search, tol) {
            Err(Error::UndersampledLoop { .. }) | Err(Error::BranchJump { .. }) => {
                working = working.iter().map(|c| c.subdivided(spec, tol)).collect();
            }
            other => return other,
        }
    }
    index_report_for_curves(spec, &working, search, tol)
}

/// Convenience wrapper: full verification report plus the curves and the
/// genericity diagnostic, for callers that need all the artifacts.
pub fn analyze(
    spec: &SymbolSpec,
    grid_n: usize,
    tol: &Tolerances,
) -> Result<(Vec<OrientedCurve>, GenericityReport, IndexReport)> {
    let curves = trace_level_set(spec, grid_n, tol)?;
    let gen = genericity_diagnostic(spec, &curves, tol);
    let search = find_critical_points(spec, Region::All, tol)?;
    let report = report_with_densify_retries(spec, &curves, &search, tol)?;
    Ok((curves, gen, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::unit;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex::new(re, im)
    }

    #[test]
    fn winding_examples() {
        let m = 64;
        let once: Vec<Complex64> = (0..m)
            .map(|k| unit(core::f64::consts::TAU * k as f64 / m as f64))
            .collect();
        assert_eq!(winding_number(&once, true).unwrap(), 1);

        let twice_rev: Vec<Complex64> = (0..(2 * m))
            .map(|k| {
                let t = k as f64 / (2 * m) as f64;
                c((2.0 * core::f64::consts::TAU * t).cos(), -(2.0 * core::f64::consts::TAU * t).sin())
            })
            .collect();
        assert_eq!(winding_number(&twice_rev, true).unwrap(), -2);

        let constant = vec![c(1.0, 0.0); 8];
        assert_eq!(winding_number(&constant, true).unwrap(), 0);
    }

    #[test]
    fn winding_guards() {
        // 3 samples for one turn: increments of 2pi/3 >= pi/2
        let coarse: Vec<Complex64> = (0..3)
            .map(|k| unit(core::f64::consts::TAU * k as f64 / 3.0))
            .collect();
        assert!(matches!(
            winding_number(&coarse, true),
            Err(Error::UndersampledLoop { .. })
        ));
        let zeroed = vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(winding_number(&zeroed, true), Err(Error::ZeroVector { index: 1 })));
    }

    fn circle_curve(radius: f64, clockwise: bool, n: usize) -> OrientedCurve {
        let vertices = (0..n)
            .map(|k| {
                let t = core::f64::consts::TAU * k as f64 / n as f64;
                let ang = if clockwise { -t } else { t };
                ChartPoint::in_chart1(unit(ang) * radius)
            })
            .collect();
        OrientedCurve { vertices, orientation_check: 1.0 }
    }

    fn example1() -> SymbolSpec {
        SymbolSpec::new(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)], "ex1").unwrap()
    }

    #[test]
    fn field_indices_on_exact_circle() {
        // boundary orientation of {|z| > 1} is clockwise in the chart
        let spec = example1();
        let curve = circle_curve(1.0, true, 512);
        assert_eq!(field_index_along_curve(&spec, &curve, SectionKind::VQ).unwrap(), -1);
        assert_eq!(field_index_along_curve(&spec, &curve, SectionKind::VP).unwrap(), 3);
    }

    #[test]
    fn constant_section_against_ccw_loop() {
        // constant Q on the counterclockwise unit circle: index -1
        let spec = SymbolSpec::new(&[c(1.0, 0.0)], &[c(1.0, 0.0)], "const").unwrap();
        let curve = circle_curve(1.0, false, 512);
        assert_eq!(field_index_along_curve(&spec, &curve, SectionKind::VQ).unwrap(), -1);
    }

    #[test]
    fn reversing_the_curve_negates_field_indices() {
        let spec = example1();
        let curve = circle_curve(1.0, true, 512);
        let rev = curve.reversed();
        let a = field_index_along_curve(&spec, &curve, SectionKind::VQ).unwrap();
        let b = field_index_along_curve(&spec, &rev, SectionKind::VQ).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn direct_index_on_exact_circle() {
        let spec = example1();
        let curve = circle_curve(1.0, true, 512);
        let (total, per) = multiplicity_index_direct(&spec, &[curve]).unwrap();
        assert_eq!(total, 4);
        assert_eq!(per, vec![4]);
    }

    #[test]
    fn section_vanishing_is_reported() {
        // V_Q vanishes at z = 0.5 on a curve through it
        let spec = SymbolSpec::new(&[c(-0.5, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)], "van").unwrap();
        let curve = circle_curve(0.5, false, 256);
        assert!(matches!(
            field_index_along_curve(&spec, &curve, SectionKind::VQ),
            Err(Error::SectionVanishesOnCurve { .. })
        ));
    }

    #[test]
    fn critical_points_example1() {
        let spec = example1();
        let tol = Tolerances::default();
        let all = find_critical_points(&spec, Region::All, &tol).unwrap();
        assert_eq!(all.points.len(), 2);
        let minus = find_critical_points(&spec, Region::SMinus, &tol).unwrap();
        assert_eq!(minus.points.len(), 1);
        let p = &minus.points[0];
        assert_eq!(p.point.chart, ChartId::Chart2);
        assert!(p.point.coord.norm() < 1e-9);
        assert_eq!(p.grad_index, 1);
        assert!((p.f_value + 4.0).abs() < 1e-10);
        // the census over the whole sphere sums to the Euler characteristic
        let total: i32 = all.points.iter().map(|p| p.grad_index).sum();
        assert_eq!(total, EULER_CHARACTERISTIC);
    }

    #[test]
    fn verify_example1() {
        let spec = example1();
        let tol = Tolerances::default();
        let report = verify_index_identity(&spec, 128, &tol).unwrap();
        assert!(report.consistent);
        assert_eq!(report.ind_direct, 4);
        assert_eq!(report.ind_w_minus_v, 4);
        assert_eq!(report.ind_formula, 4);
        assert_eq!(report.per_component.len(), 1);
        assert_eq!(report.per_component[0].ind_v, -1);
        assert_eq!(report.per_component[0].ind_w, 3);
        assert!(report.max_residual < 0.05);
    }
}
