//! Crate error type.

use thiserror::Error;

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while tracing curves or computing indices.
///
/// Numerical guards are deliberately loud: an undersampled winding or a
/// kernel-branch jump fails the run instead of silently rounding to a
/// plausible integer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Transition or frame change requested at the chart origin, which the
    /// other chart does not cover.
    #[error("chart coordinate 0 has no image in the other chart")]
    PoleNotInChart,

    /// Both fiber components vanish: the endomorphism is zero and the kernel
    /// is two-dimensional, so no kernel line is defined.
    #[error("degenerate fiber: |z| and |w| both below tolerance, kernel has dimension 2")]
    DegenerateFiber,

    /// A polynomial that must not vanish identically is identically zero.
    #[error("{0} polynomial is identically zero")]
    ZeroPolynomial(&'static str),

    /// Marching found a saddle-pattern cell with a small gradient on the zero
    /// set: 0 is not numerically a regular value of f.
    #[error("level set is not generic near ({x}, {y}) in {chart}: saddle pattern with |grad f| = {grad_norm:.3e}")]
    NonGenericLevelSet {
        chart: &'static str,
        x: f64,
        y: f64,
        grad_norm: f64,
    },

    /// f sampled at the orientation offset is too close to zero to vote.
    #[error("orientation ambiguous: |f| = {margin:.3e} at the side offset")]
    OrientationAmbiguous { margin: f64 },

    /// Consecutive winding samples subtend an angle of pi/2 or more.
    #[error("undersampled loop: angle increment {increment:.4} >= pi/2")]
    UndersampledLoop { increment: f64 },

    /// A winding sample has modulus below 1e-14.
    #[error("zero vector in winding samples at position {index}")]
    ZeroVector { index: usize },

    /// A section that must not vanish on the curve dips below the margin.
    #[error("section vanishes on curve: min modulus {min_modulus:.3e}")]
    SectionVanishesOnCurve { min_modulus: f64 },

    /// Kernel-direction continuation moved by more than pi/4 in one step.
    #[error("kernel branch jump of {angle:.4} rad between consecutive vertices")]
    BranchJump { angle: f64 },

    /// Winding sum is too far from an integer (or half-integer-doubled) value.
    #[error("winding residual {residual:.4} exceeds 0.05")]
    WindingResidual { residual: f64 },

    /// A gradient winding around a critical point was not cleanly integral.
    #[error("degenerate critical point near ({x}, {y}): gradient winding residual {residual:.4}")]
    DegenerateCritical { x: f64, y: f64, residual: f64 },

    /// Level-set pieces could not be assembled into closed curves.
    #[error("level-set assembly incomplete: {open_pieces} piece(s) left, smallest gap {gap:.3e}")]
    TraceIncomplete { open_pieces: usize, gap: f64 },

    /// The symbol failed the genericity diagnostic required for index work.
    #[error("symbol is not generic: verdict {verdict}, min |grad f| on curve {min_grad:.3e}")]
    NonGenericSymbol { verdict: &'static str, min_grad: f64 },

    /// The three index computations disagree.
    #[error("index identity violated: direct {direct}, section difference {w_minus_v}, critical-point formula {formula}")]
    InconsistentIndices {
        direct: i32,
        w_minus_v: i32,
        formula: i32,
    },
}
