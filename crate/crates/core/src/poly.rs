//! Small dense complex polynomials: evaluation, derivatives, roots.
//!
//! Coefficients are stored low degree first. The root finder is a plain
//! Durand-Kerner iteration, ample for the degree <= 6 polynomials that occur
//! here.

use alloc::vec::Vec;
use num_complex::Complex;

use crate::Complex64;

/// Horner evaluation.
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Coefficients of the derivative.
pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Degree after dropping trailing (near-)zero coefficients; `None` for the
/// zero polynomial.
pub fn degree(coeffs: &[Complex64], tol: f64) -> Option<usize> {
    coeffs.iter().rposition(|c| c.norm() > tol)
}

/// All complex roots of the polynomial, by Durand-Kerner iteration on the
/// monic normalization. Multiple roots come out as clusters of simple ones.
pub fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = match degree(coeffs, 0.0) {
        Some(d) if d >= 1 => d,
        _ => return Vec::new(),
    };
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs[..=deg].iter().map(|&c| c / lead).collect();

    // spread the initial guesses on a non-real ray to dodge symmetric traps
    let seed = Complex::new(0.4, 0.9);
    let mut xs: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32 + 1)).collect();

    for _ in 0..400 {
        let mut moved: f64 = 0.0;
        for i in 0..deg {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= xs[i] - xs[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex::new(1e-12, 0.0);
            }
            let step = eval(&monic, xs[i]) / denom;
            xs[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-13 {
            break;
        }
    }
    xs
}
