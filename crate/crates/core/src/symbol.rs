//! Fiberwise algebra of traceless symmetric endomorphisms.
//!
//! With the plane identified with the complex line, a traceless symmetric
//! 2x2 matrix `[[p, q], [q, -p]]` is the complex number `p + iq`, and a pair
//! `(z, w)` of fiber components (tangent power 1 and 3) acts on a vector `v`
//! by `v -> z·v + w·conj(v)`. On the unit circle the map has a kernel exactly
//! when `|z| = |w| != 0`, and the kernel line is `±i·(w/z)^{1/2}`.

use num_complex::Complex;
#[allow(unused_imports)] use num_traits::Float;

use crate::error::{Error, Result};
use crate::Complex64;

/// Traceless symmetric endomorphism `[[p, q], [q, -p]]`, stored as the pair
/// `(p, q)` and identified with the complex number `p + iq`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TracelessSym {
    pub p: f64,
    pub q: f64,
}

impl TracelessSym {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    pub fn from_complex(c: Complex64) -> Self {
        Self { p: c.re, q: c.im }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex::new(self.p, self.q)
    }

    /// Norm from the half-trace metric: `sqrt(tr(A²)/2) = sqrt(p² + q²)`.
    pub fn norm(&self) -> f64 {
        self.p.hypot(self.q)
    }
}

/// The two fiber components of a symbol at one point: `z` in the tangent
/// line, `w` in its third tensor power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolFiber {
    pub z: Complex64,
    pub w: Complex64,
}

impl SymbolFiber {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        Self { z, w }
    }
}

/// Applies the fiber endomorphism to a tangent vector: `z·v + w·conj(v)`,
/// real-linear in `v`.
pub fn phi_apply(fiber: &SymbolFiber, v: Complex64) -> TracelessSym {
    TracelessSym::from_complex(fiber.z * v + fiber.w * v.conj())
}

/// Unit kernel directions `{d, -d}` with `d = i·(w/z)^{1/2}`, when the fiber
/// has a one-dimensional kernel on the unit circle.
///
/// Returns `Ok(None)` when `||z| - |w|| > tol` (simple eigenvalues), and
/// `Err(DegenerateFiber)` when both components vanish below `tol` (the map is
/// zero and the kernel is the whole plane).
pub fn kernel_directions(
    fiber: &SymbolFiber,
    tol: f64,
) -> Result<Option<(Complex64, Complex64)>> {
    let nz = fiber.z.norm();
    let nw = fiber.w.norm();
    if nz <= tol && nw <= tol {
        return Err(Error::DegenerateFiber);
    }
    if (nz - nw).abs() > tol || nz <= tol {
        return Ok(None);
    }
    let d = Complex::<f64>::i() * (fiber.w / fiber.z).sqrt();
    let d = d / d.norm();
    Ok(Some((d, -d)))
}

/// Eigenvalues `t/2 ∓ ‖s0‖` of `t/2·I + s0`, smallest first.
pub fn eigenvalues(trace_part: f64, s0: TracelessSym) -> (f64, f64) {
    let half = trace_part / 2.0;
    let n = s0.norm();
    (half - n, half + n)
}

/// Rotation-equivariance defect
/// `|phi(e^{iθ}z, e^{3iθ}w)(e^{iθ}v) − e^{2iθ}·phi(z, w)(v)|`; zero up to
/// rounding for every fiber.
pub fn equivariance_defect(fiber: &SymbolFiber, theta: f64, v: Complex64) -> f64 {
    let r1 = Complex::new(theta.cos(), theta.sin());
    let r2 = r1 * r1;
    let r3 = r2 * r1;
    let rotated = SymbolFiber::new(fiber.z * r1, fiber.w * r3);
    let lhs = phi_apply(&rotated, v * r1).as_complex();
    let rhs = r2 * phi_apply(fiber, v).as_complex();
    (lhs - rhs).norm()
}
