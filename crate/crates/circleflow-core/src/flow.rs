//! Combinatorial Ricci flows on the radius vector.
//!
//! Four flows drive the vertex curvatures toward a target:
//!
//! * hyperbolic, target 0:       `dr_i/dt = -K_i sinh r_i`
//! * Euclidean, target average:  `dr_i/dt = (K_av - K_i) r_i`, `K_av = 2πχ/N`
//! * hyperbolic, prescribed K̄:   `dr_i/dt = (K̄_i - K_i) sinh r_i`
//! * Euclidean, prescribed K̄:    `dr_i/dt = (K̄_i - K_i) r_i`
//!
//! All four are integrated in log coordinates, `u_i = ln r_i` (Euclidean)
//! or `u_i = ln tanh(r_i/2)` (hyperbolic), where they share the common form
//! `du_i/dt = target_i - K_i`. Positivity of the radii is then structural,
//! the stiffness near collapse is tamed, and in the Euclidean case the
//! conservation of `Σ ln r_i` becomes a linear invariant of the vector
//! field.
//!
//! The stepper is the Dormand-Prince 5(4) embedded pair with PI step-size
//! control. A run terminates on the first of: curvature gap below
//! `convergence_eps` (converged), all log coordinates below
//! `collapse_floor` with a monotone-shrinking largest radius (collapsed to
//! zero), flow-time budget exhausted, or step-size underflow (both reported
//! as undetermined; the engine never guesses).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::complex::{Triangle, WeightedComplex};
use crate::geometry::{
    inner_angle_pair, CurvatureVector, Geometry, GeometryError, PatternState,
    MAX_HYPERBOLIC_RADIUS,
};
use crate::math;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Which curvature the flow drives toward.
#[derive(Clone, Debug, PartialEq)]
pub enum FlowTarget {
    /// All curvatures to zero (hyperbolic background only).
    ZeroCurvature,
    /// All curvatures to the average `2πχ/N` (Euclidean background only).
    AverageCurvature,
    /// Per-vertex prescribed curvatures, each `< 2π`; in the Euclidean
    /// background their sum must equal `2πχ`.
    Prescribed(Vec<f64>),
}

/// Everything a flow run needs.
#[derive(Clone, Debug)]
pub struct FlowConfig {
    /// Background geometry.
    pub geometry: Geometry,
    /// Target curvature.
    pub target: FlowTarget,
    /// Initial radius vector.
    pub initial_radii: PatternState,
    /// Absolute step-error tolerance (log coordinates).
    pub abs_tol: f64,
    /// Relative step-error tolerance (log coordinates).
    pub rel_tol: f64,
    /// Sup-norm curvature gap below which the run counts as converged.
    pub convergence_eps: f64,
    /// Log-coordinate level below which radii count as collapsed.
    pub collapse_floor: f64,
    /// Flow-time budget.
    pub max_time: f64,
    /// Record every k-th accepted step into the trajectory (0 acts as 1).
    pub sample_stride: usize,
}

impl FlowConfig {
    /// A config with the default tolerances: `abs_tol = rel_tol = 1e-12`,
    /// `convergence_eps = 1e-10`, `collapse_floor = -50`, `max_time = 1000`,
    /// every accepted step sampled.
    ///
    /// The step tolerances sit two orders below the convergence epsilon on
    /// purpose. Near a fixed point an explicit adaptive pair settles into a
    /// stability-limited equilibrium where the curvature gap stalls around
    /// `λ · tol` (`λ` the local decay rate); the margin keeps that plateau
    /// safely below the classification threshold.
    pub fn new(geometry: Geometry, target: FlowTarget, initial_radii: PatternState) -> Self {
        Self {
            geometry,
            target,
            initial_radii,
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            convergence_eps: 1e-10,
            collapse_floor: -50.0,
            max_time: 1000.0,
            sample_stride: 1,
        }
    }
}

/// Tolerance on `|ΣK̄ - 2πχ|` for Euclidean prescribed targets.
pub const PRESCRIBED_SUM_TOL: f64 = 1e-9;

/// Errors rejecting a flow configuration before any integration happens.
#[derive(Clone, Debug, PartialEq)]
pub enum FlowError {
    /// The complex violates the per-face weight-sum condition.
    FaceConditionViolated {
        /// Largest per-face residual magnitude.
        max_abs_residual: f64,
    },
    /// Target kind and background geometry do not fit together.
    TargetGeometryMismatch,
    /// Prescribed curvature vector has the wrong length.
    TargetDimensionMismatch {
        /// Number of vertices.
        expected: usize,
        /// Length supplied.
        got: usize,
    },
    /// A prescribed curvature is not finite or not below `2π`.
    PrescribedOutOfRange {
        /// Offending vertex.
        vertex: usize,
        /// Offending value.
        value: f64,
    },
    /// Euclidean prescribed curvatures must sum to `2πχ`.
    PrescribedSumMismatch {
        /// Actual sum.
        sum: f64,
        /// Required sum `2πχ`.
        expected: f64,
    },
    /// Initial radii invalid for the chosen geometry.
    Geometry(GeometryError),
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::FaceConditionViolated { max_abs_residual } => write!(
                f,
                "face weight sums violate the ideal-pattern condition (worst residual {max_abs_residual:.3e})"
            ),
            FlowError::TargetGeometryMismatch => write!(
                f,
                "zero-curvature targets need hyperbolic geometry, average-curvature targets Euclidean"
            ),
            FlowError::TargetDimensionMismatch { expected, got } => {
                write!(f, "prescribed curvature has {got} entries, expected {expected}")
            }
            FlowError::PrescribedOutOfRange { vertex, value } => {
                write!(f, "prescribed curvature {value} at vertex {vertex} is not below 2 pi")
            }
            FlowError::PrescribedSumMismatch { sum, expected } => {
                write!(f, "prescribed curvatures sum to {sum}, need {expected} (2 pi chi)")
            }
            FlowError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FlowError {}

impl From<GeometryError> for FlowError {
    fn from(e: GeometryError) -> Self {
        FlowError::Geometry(e)
    }
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// Terminal classification of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowStatus {
    /// Curvature gap fell below `convergence_eps`.
    Converged,
    /// Every radius collapsed below the floor with a shrinking maximum.
    CollapsedToZero,
    /// Budget exhausted or the stepper gave up; no verdict.
    Undetermined,
}

impl fmt::Display for FlowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowStatus::Converged => write!(f, "converged"),
            FlowStatus::CollapsedToZero => write!(f, "collapsed-to-zero"),
            FlowStatus::Undetermined => write!(f, "undetermined"),
        }
    }
}

/// Why the integration loop stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Sup-norm curvature gap below `convergence_eps`.
    GapBelowEps,
    /// All log coordinates below `collapse_floor`, shrinking monotonically.
    RadiiCollapsed,
    /// Flow time reached `max_time`.
    MaxTimeReached,
    /// Step size shrank below the representable floor.
    StepSizeUnderflow,
}

/// One recorded trajectory point.
#[derive(Clone, Debug)]
pub struct TrajectorySample {
    /// Flow time.
    pub time: f64,
    /// Radii at this time.
    pub radii: Vec<f64>,
    /// Sup-norm of `K - target`.
    pub gap_sup_norm: f64,
    /// Compensated sum of the log coordinates; conserved along Euclidean
    /// flows, merely recorded for hyperbolic ones.
    pub conserved_sum: f64,
}

/// Exponential-rate fit of a trajectory series.
#[derive(Clone, Copy, Debug)]
pub struct RateEstimate {
    /// Fitted slope of the log-series against time (negative for decay).
    pub rate: f64,
    /// Coefficient of determination of the linear fit.
    pub r_squared: f64,
    /// Number of samples entering the fit.
    pub samples_used: usize,
}

/// Drift report for the conserved quantity of Euclidean flows.
#[derive(Clone, Copy, Debug)]
pub enum ConservationReport {
    /// Euclidean runs conserve `Σ ln r_i`.
    Euclidean {
        /// Largest observed `|Σu(t) - Σu(0)|`.
        max_drift: f64,
        /// Pass threshold `1e-9 · N`.
        threshold: f64,
        /// Whether the drift stayed below the threshold.
        pass: bool,
    },
    /// Hyperbolic flows have no conserved product.
    NotApplicable,
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct FlowResult {
    /// Terminal classification.
    pub status: FlowStatus,
    /// Why the loop stopped.
    pub stop_reason: StopReason,
    /// Flow time at the terminal state.
    pub final_time: f64,
    /// Terminal radii.
    pub final_state: PatternState,
    /// Terminal curvatures.
    pub final_curvature: CurvatureVector,
    /// Recorded samples (always includes the initial and terminal states).
    pub trajectory: Vec<TrajectorySample>,
    /// Exponential decay fit: of the curvature gap for converged runs, of
    /// the largest log radius for collapsed runs; `None` when there is
    /// nothing to fit.
    pub rate_estimate: Option<RateEstimate>,
    /// Conserved-quantity drift.
    pub conservation: ConservationReport,
    /// Accepted step count.
    pub steps_accepted: usize,
    /// Rejected step count.
    pub steps_rejected: usize,
}

// ---------------------------------------------------------------------------
// Log coordinates
// ---------------------------------------------------------------------------

/// `u = ln tanh(r/2)`, with full relative precision at both ends: direct
/// for small `r`, via `ln1p(-2e^{-r}/(1+e^{-r}))` for large `r` where
/// `tanh` saturates.
fn u_of_r_hyperbolic(r: f64) -> f64 {
    if r < 1.0 {
        math::ln(math::tanh(0.5 * r))
    } else {
        let e = math::exp(-r);
        math::ln_1p(-2.0 * e / (1.0 + e))
    }
}

/// Inverse of [`u_of_r_hyperbolic`]; `u` must be negative. For very
/// negative `u` the exact value is `2 atanh(e^u) = 2e^u` to beyond double
/// precision, which sidesteps `expm1(u)` rounding to -1.
fn r_of_u_hyperbolic(u: f64) -> f64 {
    if u < -20.0 {
        2.0 * math::exp(u)
    } else {
        math::ln_1p(math::exp(u)) - math::ln(-math::exp_m1(u))
    }
}

fn u_from_state(g: Geometry, r: &PatternState) -> Vec<f64> {
    r.radii()
        .iter()
        .map(|&ri| match g {
            Geometry::Euclidean => math::ln(ri),
            Geometry::Hyperbolic => u_of_r_hyperbolic(ri),
        })
        .collect()
}

fn radii_from_u(g: Geometry, u: &[f64]) -> Vec<f64> {
    u.iter()
        .map(|&ui| match g {
            Geometry::Euclidean => math::exp(ui),
            Geometry::Hyperbolic => r_of_u_hyperbolic(ui),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Right-hand side
// ---------------------------------------------------------------------------

/// Log coordinates admissible for evaluation. Beyond these the radii stop
/// being representable, so the stepper treats excursions as rejections.
const U_MIN: f64 = -700.0;
const U_MAX_EUCLIDEAN: f64 = 690.0;

/// Below this log coordinate the hyperbolic two-circle triangle is
/// Euclidean to within double precision, and the scale-invariant Euclidean
/// angle of the radius *ratio* avoids underflowing radii altogether.
const U_EUCLIDEAN_LIMIT: f64 = -20.0;

struct FlowField<'a> {
    geometry: Geometry,
    target: &'a [f64],
    triangles: &'a [Triangle],
}

struct OutOfRange;

impl FlowField<'_> {
    /// `f_i = target_i - K_i(r(u))`, written into `out`.
    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<(), OutOfRange> {
        for &ui in u {
            if !ui.is_finite() || ui < U_MIN {
                return Err(OutOfRange);
            }
            match self.geometry {
                Geometry::Euclidean => {
                    if ui > U_MAX_EUCLIDEAN {
                        return Err(OutOfRange);
                    }
                }
                Geometry::Hyperbolic => {
                    if ui >= 0.0 || r_of_u_hyperbolic(ui) > MAX_HYPERBOLIC_RADIUS {
                        return Err(OutOfRange);
                    }
                }
            }
        }

        // Cone angle accumulation; plain sums suffice here, the headline
        // compensated sums live in the geometry module.
        for (o, &t) in out.iter_mut().zip(self.target) {
            *o = t - 2.0 * PI;
        }
        for tri in self.triangles {
            let (ui, uj) = (u[tri.corner_i.0], u[tri.corner_j.0]);
            let (a_i, a_j) = self.angles(ui, uj, tri.weight);
            out[tri.corner_i.0] += a_i;
            out[tri.corner_j.0] += a_j;
        }
        Ok(())
    }

    /// Inner angle pair straight from log coordinates.
    fn angles(&self, ui: f64, uj: f64, phi: f64) -> (f64, f64) {
        match self.geometry {
            Geometry::Euclidean => euclidean_ratio_angles(ui, uj, phi),
            Geometry::Hyperbolic => {
                if ui < U_EUCLIDEAN_LIMIT && uj < U_EUCLIDEAN_LIMIT {
                    // u = ln(r/2) + O(r^2) here, so the ratio survives.
                    euclidean_ratio_angles(ui, uj, phi)
                } else {
                    inner_angle_pair(
                        Geometry::Hyperbolic,
                        r_of_u_hyperbolic(ui),
                        r_of_u_hyperbolic(uj),
                        phi,
                    )
                }
            }
        }
    }
}

/// Euclidean inner angles depend only on the radius ratio:
/// `θ_i = atan2(sin φ, r_i/r_j + cos φ)`. Overflowing ratios degrade
/// gracefully to the correct limits 0 and φ.
fn euclidean_ratio_angles(ui: f64, uj: f64, phi: f64) -> (f64, f64) {
    let (s, c) = (math::sin(phi), math::cos(phi));
    (
        math::atan2(s, math::exp(ui - uj) + c),
        math::atan2(s, math::exp(uj - ui) + c),
    )
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)
// ---------------------------------------------------------------------------

const STAGES: usize = 7;

// The flow field is autonomous, so the stage times (the `c` row) never
// enter the evaluation.
const A: [[f64; 6]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// The fifth-order weights equal the last `A` row (FSAL), so the new state
// is simply the seventh stage point; no separate `b` row is needed.

/// Difference between the fifth- and fourth-order weights.
const ERR: [f64; STAGES] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
/// PI controller exponents (Hairer's dopri5 defaults).
const PI_ALPHA: f64 = 0.17;
const PI_BETA: f64 = 0.04;
const H_MAX: f64 = 10.0;

/// Collapse is only declared after this many accepted steps with a
/// monotone-shrinking largest radius; avoids misclassifying slow transients.
const COLLAPSE_TAIL: usize = 8;

// ---------------------------------------------------------------------------
// The driver
// ---------------------------------------------------------------------------

/// Integrates the configured flow and classifies the terminal behavior.
pub fn run_flow(complex: &WeightedComplex, cfg: &FlowConfig) -> Result<FlowResult, FlowError> {
    let b1 = complex.validate_b1();
    if !b1.pass() {
        return Err(FlowError::FaceConditionViolated {
            max_abs_residual: b1.max_abs_residual(),
        });
    }
    let n = complex.vertex_count();
    if cfg.initial_radii.len() != n {
        return Err(FlowError::Geometry(GeometryError::DimensionMismatch {
            expected: n,
            got: cfg.initial_radii.len(),
        }));
    }
    let chi = complex.euler_characteristic();
    let target: Vec<f64> = match &cfg.target {
        FlowTarget::ZeroCurvature => {
            if cfg.geometry != Geometry::Hyperbolic {
                return Err(FlowError::TargetGeometryMismatch);
            }
            vec![0.0; n]
        }
        FlowTarget::AverageCurvature => {
            if cfg.geometry != Geometry::Euclidean {
                return Err(FlowError::TargetGeometryMismatch);
            }
            vec![2.0 * PI * chi as f64 / n as f64; n]
        }
        FlowTarget::Prescribed(kbar) => {
            if kbar.len() != n {
                return Err(FlowError::TargetDimensionMismatch {
                    expected: n,
                    got: kbar.len(),
                });
            }
            for (v, &k) in kbar.iter().enumerate() {
                if !(k.is_finite() && k < 2.0 * PI) {
                    return Err(FlowError::PrescribedOutOfRange { vertex: v, value: k });
                }
            }
            if cfg.geometry == Geometry::Euclidean {
                let sum = math::sum_compensated(kbar);
                let expected = 2.0 * PI * chi as f64;
                if math::abs(sum - expected) > PRESCRIBED_SUM_TOL {
                    return Err(FlowError::PrescribedSumMismatch { sum, expected });
                }
            }
            kbar.clone()
        }
    };
    for &r in cfg.initial_radii.radii() {
        let admissible = match cfg.geometry {
            Geometry::Hyperbolic => r <= MAX_HYPERBOLIC_RADIUS,
            // Keep the log coordinate evaluable.
            Geometry::Euclidean => math::ln(r) > U_MIN && math::ln(r) < U_MAX_EUCLIDEAN,
        };
        if !admissible {
            return Err(FlowError::Geometry(GeometryError::RadiusOutOfRange {
                radius: r,
            }));
        }
    }

    let triangulation = complex.triangulate();
    let field = FlowField {
        geometry: cfg.geometry,
        target: &target,
        triangles: triangulation.triangles(),
    };

    Integrator::new(cfg, field, n).run()
}

struct Integrator<'a> {
    cfg: &'a FlowConfig,
    field: FlowField<'a>,
    n: usize,
    t: f64,
    u: Vec<f64>,
    /// f(t, u); FSAL keeps it current with `u`.
    k1: Vec<f64>,
    stages: Vec<Vec<f64>>,
    u_try: Vec<f64>,
    u_new: Vec<f64>,
    samples: Vec<TrajectorySample>,
    accepted: usize,
    rejected: usize,
    /// Recent history of the largest log coordinate.
    tail: Vec<f64>,
}

impl<'a> Integrator<'a> {
    fn new(cfg: &'a FlowConfig, field: FlowField<'a>, n: usize) -> Self {
        Self {
            cfg,
            field,
            n,
            t: 0.0,
            u: u_from_state(cfg.geometry, &cfg.initial_radii),
            k1: vec![0.0; n],
            stages: vec![vec![0.0; n]; STAGES],
            u_try: vec![0.0; n],
            u_new: vec![0.0; n],
            samples: Vec::new(),
            accepted: 0,
            rejected: 0,
            tail: Vec::new(),
        }
    }

    fn gap(values: &[f64]) -> f64 {
        values.iter().fold(0.0, |a, &v| a.max(math::abs(v)))
    }

    fn record_sample(&mut self, gap: f64) {
        let mut s = math::NeumaierSum::new();
        for &ui in &self.u {
            s.add(ui);
        }
        self.samples.push(TrajectorySample {
            time: self.t,
            radii: radii_from_u(self.cfg.geometry, &self.u),
            gap_sup_norm: gap,
            conserved_sum: s.total(),
        });
    }

    fn u_max(&self) -> f64 {
        self.u.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v))
    }

    fn collapsed(&self) -> bool {
        if self.tail.len() < COLLAPSE_TAIL {
            return false;
        }
        if !self.u.iter().all(|&ui| ui < self.cfg.collapse_floor) {
            return false;
        }
        self.tail.windows(2).all(|w| w[1] < w[0])
    }

    fn initial_step(&self) -> f64 {
        let f0 = Self::gap(&self.k1);
        (1e-2 / (1.0 + f0)).min(self.cfg.max_time).min(H_MAX)
    }

    fn finish(mut self, status: FlowStatus, reason: StopReason, last_gap: f64) -> FlowResult {
        // Make sure the terminal state is recorded.
        if self
            .samples
            .last()
            .map(|s| s.time != self.t)
            .unwrap_or(true)
        {
            self.record_sample(last_gap);
        }
        let final_state = PatternState::new(radii_from_u(self.cfg.geometry, &self.u))
            .expect("admissible log coordinates map to positive radii");
        let final_curvature = CurvatureVector::from_values(
            self.field
                .target
                .iter()
                .zip(&self.k1)
                .map(|(&t, &f)| t - f)
                .collect(),
        );
        let conservation = conserved_quantities(self.cfg, &self.samples);
        let rate_estimate = match status {
            FlowStatus::Converged => estimate_rate(&self.samples).ok(),
            FlowStatus::CollapsedToZero => fit_collapse_rate(self.cfg.geometry, &self.samples),
            FlowStatus::Undetermined => None,
        };
        FlowResult {
            status,
            stop_reason: reason,
            final_time: self.t,
            final_state,
            final_curvature,
            trajectory: self.samples,
            rate_estimate,
            conservation,
            steps_accepted: self.accepted,
            steps_rejected: self.rejected,
        }
    }

    fn run(mut self) -> Result<FlowResult, FlowError> {
        // The field must be evaluable at the initial state.
        let mut k1 = core::mem::take(&mut self.k1);
        if self.field.eval(&self.u, &mut k1).is_err() {
            return Err(FlowError::Geometry(GeometryError::RadiusOutOfRange {
                radius: f64::NAN,
            }));
        }
        self.k1 = k1;

        let gap0 = Self::gap(&self.k1);
        self.record_sample(gap0);
        if gap0 < self.cfg.convergence_eps {
            // Already stationary.
            return Ok(self.finish(FlowStatus::Converged, StopReason::GapBelowEps, gap0));
        }

        let mut h = self.initial_step();
        let mut err_old: f64 = 1e-4;
        let stride = self.cfg.sample_stride.max(1);

        loop {
            if self.t >= self.cfg.max_time {
                let gap = Self::gap(&self.k1);
                return Ok(self.finish(FlowStatus::Undetermined, StopReason::MaxTimeReached, gap));
            }
            h = h.min(H_MAX).min(self.cfg.max_time - self.t);
            let h_floor = 1e-13 * self.t.max(1.0);
            if h < h_floor {
                let gap = Self::gap(&self.k1);
                return Ok(self.finish(
                    FlowStatus::Undetermined,
                    StopReason::StepSizeUnderflow,
                    gap,
                ));
            }

            match self.try_step(h) {
                Err(OutOfRange) => {
                    self.rejected += 1;
                    h *= 0.5;
                    continue;
                }
                Ok(err) if err > 1.0 => {
                    self.rejected += 1;
                    let fac = (SAFETY * math::powf(err, -0.2)).clamp(FAC_MIN, 1.0);
                    h *= fac;
                    continue;
                }
                Ok(err) => {
                    // Accept; FSAL reuses stage 7 as the next first stage.
                    self.t += h;
                    core::mem::swap(&mut self.u, &mut self.u_new);
                    core::mem::swap(&mut self.k1, &mut self.stages[6]);
                    self.accepted += 1;

                    let gap = Self::gap(&self.k1);
                    self.tail.push(self.u_max());
                    if self.tail.len() > COLLAPSE_TAIL {
                        self.tail.remove(0);
                    }
                    if self.accepted % stride == 0 {
                        self.record_sample(gap);
                    }

                    if gap < self.cfg.convergence_eps {
                        return Ok(self.finish(
                            FlowStatus::Converged,
                            StopReason::GapBelowEps,
                            gap,
                        ));
                    }
                    if self.collapsed() {
                        return Ok(self.finish(
                            FlowStatus::CollapsedToZero,
                            StopReason::RadiiCollapsed,
                            gap,
                        ));
                    }

                    // PI step-size controller.
                    let err = err.max(1e-10);
                    let fac = SAFETY * math::powf(err, -PI_ALPHA) * math::powf(err_old, PI_BETA);
                    h *= fac.clamp(FAC_MIN, FAC_MAX);
                    err_old = err.max(1e-4);
                }
            }
        }
    }

    /// One trial step of size `h`. On success returns the scaled error norm;
    /// `u_new` and `stages[6] = f(t+h, u_new)` are filled in.
    fn try_step(&mut self, h: f64) -> Result<f64, OutOfRange> {
        // Stage 1 is FSAL: f(t, u) already sits in k1.
        self.stages[0].copy_from_slice(&self.k1);
        for s in 1..STAGES {
            for i in 0..self.n {
                let mut acc = self.u[i];
                for (j, stage) in self.stages.iter().take(s).enumerate() {
                    acc += h * A[s][j] * stage[i];
                }
                self.u_try[i] = acc;
            }
            if s == STAGES - 1 {
                // Stage 7 is evaluated at the fifth-order solution.
                self.u_new.copy_from_slice(&self.u_try);
            }
            let mut stage = core::mem::take(&mut self.stages[s]);
            let res = self.field.eval(&self.u_try, &mut stage);
            self.stages[s] = stage;
            res?;
        }

        // Scaled RMS error over the embedded difference.
        let mut err_sq = 0.0;
        for i in 0..self.n {
            let mut e = 0.0;
            for (s, stage) in self.stages.iter().enumerate() {
                e += ERR[s] * stage[i];
            }
            e *= h;
            let scale = self.cfg.abs_tol
                + self.cfg.rel_tol * math::abs(self.u[i]).max(math::abs(self.u_new[i]));
            let q = e / scale;
            err_sq += q * q;
        }
        Ok(math::sqrt(err_sq / self.n as f64))
    }
}

// ---------------------------------------------------------------------------
// Diagnostics over trajectories
// ---------------------------------------------------------------------------

/// Drift of the conserved quantity over a recorded trajectory.
///
/// Euclidean flows conserve `Σ ln r_i` exactly; the report states the
/// largest deviation from the initial value against the `1e-9 · N`
/// threshold. Hyperbolic flows carry no such invariant.
pub fn conserved_quantities(cfg: &FlowConfig, trajectory: &[TrajectorySample]) -> ConservationReport {
    if cfg.geometry != Geometry::Euclidean {
        return ConservationReport::NotApplicable;
    }
    let Some(first) = trajectory.first() else {
        return ConservationReport::NotApplicable;
    };
    let max_drift = trajectory
        .iter()
        .fold(0.0f64, |a, s| a.max(math::abs(s.conserved_sum - first.conserved_sum)));
    let threshold = 1e-9 * first.radii.len() as f64;
    ConservationReport::Euclidean {
        max_drift,
        threshold,
        pass: max_drift < threshold,
    }
}

/// Errors from [`estimate_rate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateError {
    /// Not enough positive-gap samples in the trailing half.
    InsufficientSamples {
        /// Samples required.
        needed: usize,
        /// Samples available.
        got: usize,
    },
}

impl fmt::Display for RateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateError::InsufficientSamples { needed, got } => {
                write!(f, "rate fit needs {needed} tail samples with positive gap, got {got}")
            }
        }
    }
}

impl core::error::Error for RateError {}

/// Minimum tail samples for a gap-decay fit.
pub const RATE_FIT_MIN_SAMPLES: usize = 20;

/// Least-squares slope of `ln(gap)` against time over the trailing half of
/// the trajectory, with the fit quality.
pub fn estimate_rate(trajectory: &[TrajectorySample]) -> Result<RateEstimate, RateError> {
    let tail = &trajectory[trajectory.len() / 2..];
    let points: Vec<(f64, f64)> = tail
        .iter()
        .filter(|s| s.gap_sup_norm > 0.0)
        .map(|s| (s.time, math::ln(s.gap_sup_norm)))
        .collect();
    if points.len() < RATE_FIT_MIN_SAMPLES {
        return Err(RateError::InsufficientSamples {
            needed: RATE_FIT_MIN_SAMPLES,
            got: points.len(),
        });
    }
    Ok(fit_line(&points))
}

/// Collapse-rate fit: slope of the largest log radius against time.
fn fit_collapse_rate(g: Geometry, trajectory: &[TrajectorySample]) -> Option<RateEstimate> {
    let tail = &trajectory[trajectory.len() / 2..];
    let points: Vec<(f64, f64)> = tail
        .iter()
        .map(|s| {
            let r_max = s.radii.iter().fold(0.0f64, |a, &r| a.max(r));
            let v = match g {
                Geometry::Euclidean => math::ln(r_max),
                Geometry::Hyperbolic => u_of_r_hyperbolic(r_max),
            };
            (s.time, v)
        })
        .collect();
    if points.len() < 3 {
        return None;
    }
    Some(fit_line(&points))
}

/// Centered least-squares line fit returning slope and R².
fn fit_line(points: &[(f64, f64)]) -> RateEstimate {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let rate = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r_squared = if sxx > 0.0 && syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        0.0
    };
    RateEstimate {
        rate,
        r_squared,
        samples_used: points.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_log_coordinate_roundtrip() {
        for r in [1e-9, 1e-4, 0.5, 1.0, 5.0, 20.0, 39.0] {
            let u = u_of_r_hyperbolic(r);
            assert!(u < 0.0);
            let back = r_of_u_hyperbolic(u);
            assert!(
                (back - r).abs() <= 1e-12 * r.max(1.0),
                "r={r} u={u} back={back}"
            );
        }
    }

    #[test]
    fn hyperbolic_log_coordinate_matches_naive_form() {
        for r in [0.3, 1.0, 2.5] {
            let naive = ((r / 2.0) as f64).tanh().ln();
            assert!((u_of_r_hyperbolic(r) - naive).abs() < 1e-14);
        }
    }

    #[test]
    fn euclidean_ratio_angles_match_kernel() {
        use crate::geometry::inner_angle;
        for (ri, rj, phi) in [(1.0, 1.0, 1.0), (0.3, 2.0, 2.4), (5.0, 0.01, 0.4)] {
            let (ui, uj) = (math::ln(ri), math::ln(rj));
            let (ai, aj) = euclidean_ratio_angles(ui, uj, phi);
            let ki = inner_angle(Geometry::Euclidean, ri, rj, phi).unwrap();
            let kj = inner_angle(Geometry::Euclidean, rj, ri, phi).unwrap();
            assert!((ai - ki).abs() < 1e-13);
            assert!((aj - kj).abs() < 1e-13);
        }
    }

    #[test]
    fn line_fit_recovers_exact_slope() {
        let points: Vec<(f64, f64)> = (0..40).map(|i| (i as f64 * 0.5, 3.0 - 1.25 * i as f64 * 0.5)).collect();
        let fit = fit_line(&points);
        assert!((fit.rate + 1.25).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }
}
