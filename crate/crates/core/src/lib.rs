//! Multiplicity sets of first-order symbols on the 2-sphere.
//!
//! A symbol here is a pair of holomorphic sections of the tangent bundle and
//! its third complex tensor power, given by a quadratic polynomial `Q` and a
//! sextic polynomial `P` in a stereographic chart. The eigenvalues of the
//! associated family of traceless symmetric endomorphisms coincide along the
//! zero set of the scalar field `f = ‖w‖² − ‖v‖²`; over that curve the kernel
//! directions form a line field whose total turning relative to the curve's
//! unit tangent is an integer index.
//!
//! The crate computes that index three independent ways and checks they agree:
//!
//! 1. directly, by tracking a kernel branch around each traced component
//!    ([`multiplicity_index_direct`]),
//! 2. as the difference of the section indices along the curve
//!    ([`field_index_along_curve`]),
//! 3. from the identity `ind = 3χ(S²) − 2·Σ ind_∇f` over the critical points
//!    of `f` in the region `f < 0` ([`find_critical_points`]).
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and plotting
//! live in the companion CLI crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod fields;
pub mod index;
pub mod poly;
pub mod sphere;
pub mod symbol;
pub mod tol;
pub mod trace;

pub use error::{Error, Result};
pub use fields::{FieldSample, SymbolSpec};
pub use index::{
    analyze, field_index_along_curve, find_critical_points, index_report_for_curves,
    multiplicity_index_direct, report_with_densify_retries, section_zero_index,
    verify_index_identity,
    winding_number, ComponentIndices, CriticalPointRec, CriticalSearch, IndexReport, Region,
    SectionKind, EULER_CHARACTERISTIC,
};
pub use sphere::{ChartId, ChartPoint, FrameScalar};
pub use symbol::{
    eigenvalues, equivariance_defect, kernel_directions, phi_apply, SymbolFiber, TracelessSym,
};
pub use tol::Tolerances;
pub use trace::{
    genericity_diagnostic, orient_as_boundary, trace_level_set, GenericityReport, OrientedCurve,
    Verdict,
};

/// Complex double, the scalar type used throughout.
pub type Complex64 = num_complex::Complex<f64>;
