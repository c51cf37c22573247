//! Centralized numerical tolerances.
//!
//! Every threshold used by tracing, orientation, and index computation lives
//! in one record so that runs are reproducible from a single configuration
//! value and tests can tighten or loosen them in one place.

/// Tolerances and discretization parameters for the whole pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Vertices are Newton-refined onto the level set until |f| falls below
    /// this value.
    pub trace_tol: f64,
    /// Fiber components with ||z| - |w|| below this count as multiplicity
    /// fibers when extracting kernel directions.
    pub kernel_tol: f64,
    /// Minimum |grad f| on the traced curve for a `Generic` verdict.
    pub grad_floor: f64,
    /// Newton target for critical-point refinement (|grad f| <= newton_eps
    /// declares convergence; acceptance is 100x looser).
    pub newton_eps: f64,
    /// Maximum chart-coordinate distance between consecutive curve vertices.
    pub max_step: f64,
    /// Maximum sagitta allowed between a segment and the refined midpoint;
    /// segments flatter than this stop subdividing.
    pub sag_tol: f64,
    /// Maximum turning angle between consecutive segments before a vertex is
    /// inserted (keeps tangent-frame windings well below the pi/2 guard).
    pub turn_limit: f64,
    /// Curves whose embedded images stay within this mean distance are the
    /// same component seen from both charts.
    pub merge_dist: f64,
    /// Maximum gap, in embedded coordinates, bridged when joining trimmed
    /// level-set pieces across charts.
    pub stitch_tol: f64,
    /// Largest allowed distance of a winding sum from its admissible lattice.
    pub winding_residual: f64,
    /// Maximum ||zv| - |zw|| along a traced curve for the kernel condition.
    pub fiber_defect_tol: f64,
    /// Radius of the circle on which gradient windings around critical points
    /// are sampled.
    pub grad_index_radius: f64,
    /// Number of samples on that circle.
    pub grad_index_samples: usize,
    /// Chart-coordinate radius of the traced disk per chart.
    pub disk_radius: f64,
    /// Ownership radius: chart 1 keeps |z| <= trim_radius of an open chain,
    /// chart 2 keeps the complement.
    pub trim_radius: f64,
    /// Sideways offset used when sampling f to orient a curve.
    pub orient_offset: f64,
    /// Node count per axis of the seeding grid for the critical-point search.
    pub crit_grid: usize,
    /// Iteration cap for the 1-D on-curve Newton refinement.
    pub refine_max_iter: usize,
    /// Iteration cap for the 2-D critical-point Newton.
    pub newton_max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trace_tol: 1e-8,
            kernel_tol: 1e-9,
            grad_floor: 1e-4,
            newton_eps: 1e-12,
            max_step: 0.02,
            sag_tol: 1e-5,
            turn_limit: 0.2,
            merge_dist: 1e-4,
            stitch_tol: 5e-3,
            winding_residual: 0.05,
            fiber_defect_tol: 1e-6,
            grad_index_radius: 1e-3,
            grad_index_samples: 256,
            disk_radius: 1.25,
            trim_radius: 1.0,
            orient_offset: 1e-3,
            crit_grid: 256,
            refine_max_iter: 20,
            newton_max_iter: 50,
        }
    }
}

impl Tolerances {
    /// True when every tolerance is strictly positive and sample counts are
    /// nonzero.
    pub fn is_valid(&self) -> bool {
        [
            self.trace_tol,
            self.kernel_tol,
            self.grad_floor,
            self.newton_eps,
            self.max_step,
            self.sag_tol,
            self.turn_limit,
            self.merge_dist,
            self.stitch_tol,
            self.winding_residual,
            self.fiber_defect_tol,
            self.grad_index_radius,
            self.disk_radius,
            self.trim_radius,
            self.orient_offset,
        ]
        .iter()
        .all(|&t| t > 0.0)
            && self.grad_index_samples > 0
            && self.crit_grid > 1
    }
}
