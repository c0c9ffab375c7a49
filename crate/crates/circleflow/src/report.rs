//! The run report: one JSON document collecting everything a command
//! learned about the input.
//!
//! Reports are deterministic: the same invocation (including the seed)
//! produces byte-identical output except for the `generated_at` stamp.
//! Diagnostic quantities carry their tolerance next to the value.

use serde::Serialize;

use circleflow_core::complex::{B1Report, CharacterVector, WeightedComplex};
use circleflow_core::criteria::{CharacterReport, PrescribedReport, SubsetReport};
use circleflow_core::flow::{ConservationReport, FlowResult, RateEstimate};
use circleflow_core::geometry::character_average_residual;

/// A diagnostic value paired with the tolerance it was judged against.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Toleranced {
    /// The measured value.
    pub value: f64,
    /// Absolute tolerance.
    pub tolerance: f64,
    /// `|value| <= tolerance`.
    pub pass: bool,
}

impl Toleranced {
    /// Judges `value` against an absolute tolerance.
    pub fn new(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            pass: value.abs() <= tolerance,
        }
    }
}

/// Combinatorial summary of the input.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexSummary {
    /// Number of primal vertices.
    pub vertices: usize,
    /// Number of edges.
    pub edges: usize,
    /// Number of 2-cells.
    pub faces: usize,
    /// Euler characteristic.
    pub euler_characteristic: i64,
    /// Genus of the closed oriented surface.
    pub genus: i64,
}

impl ComplexSummary {
    /// Summarizes a built complex.
    pub fn of(c: &WeightedComplex) -> Self {
        Self {
            vertices: c.vertex_count(),
            edges: c.edge_count(),
            faces: c.face_count(),
            euler_characteristic: c.euler_characteristic(),
            genus: c.genus(),
        }
    }
}

/// Per-face weight-sum residuals.
#[derive(Clone, Debug, Serialize)]
pub struct B1Section {
    /// One entry per face.
    pub residuals: Vec<Toleranced>,
    /// Whether every face passes.
    pub pass: bool,
}

impl B1Section {
    /// Converts a core report, attaching the per-face tolerances.
    pub fn of(c: &WeightedComplex, report: &B1Report) -> Self {
        let residuals = report
            .residuals()
            .iter()
            .zip(c.faces())
            .map(|(&r, f)| Toleranced::new(r, B1Report::tolerance(f.boundary.len())))
            .collect();
        Self {
            residuals,
            pass: report.pass(),
        }
    }
}

/// Characters and the mean-character identity.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterSection {
    /// Per-vertex characters.
    pub values: Vec<f64>,
    /// Mean character.
    pub average: f64,
    /// Expected mean `2π(1 - χ/N)`.
    pub expected_average: f64,
    /// `average - expected_average` against 1e-12.
    pub identity_residual: Toleranced,
}

impl CharacterSection {
    /// Builds the section from a complex and its characters.
    pub fn of(c: &WeightedComplex, characters: &CharacterVector) -> Self {
        let residual =
            character_average_residual(characters, c.euler_characteristic(), c.vertex_count());
        Self {
            values: characters.values().to_vec(),
            average: characters.average(),
            expected_average: characters.average() - residual,
            identity_residual: Toleranced::new(residual, 1e-12),
        }
    }
}

/// One classification verdict.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationSection {
    /// Geometry classified against.
    pub geometry: String,
    /// The character threshold.
    pub threshold: f64,
    /// Per-vertex margins over the threshold.
    pub margins: Vec<f64>,
    /// Verdict string.
    pub verdict: String,
    /// Whether flow collapse is predicted.
    pub collapse_predicted: bool,
    /// Rule identifier.
    pub rule: String,
}

impl ClassificationSection {
    /// Converts a core report.
    pub fn of(report: &CharacterReport) -> Self {
        Self {
            geometry: report.geometry.to_string(),
            threshold: report.threshold,
            margins: report.margins.clone(),
            verdict: report.verdict.to_string(),
            collapse_predicted: report.collapse_predicted,
            rule: report.rule.to_string(),
        }
    }
}

/// Prescribed-curvature interval verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct PrescribedSection {
    /// Geometry tested against.
    pub geometry: String,
    /// `K̄_i - (2π - ℒ_i)` per vertex.
    pub lower_margins: Vec<f64>,
    /// `2π - K̄_i` per vertex.
    pub upper_margins: Vec<f64>,
    /// Verdict string.
    pub verdict: String,
    /// Whether flow collapse is predicted.
    pub collapse_predicted: bool,
    /// Inside the box guaranteed realizable.
    pub in_guaranteed_box: bool,
    /// Inside the box guaranteed unrealizable.
    pub outside_image: bool,
    /// Rule identifier.
    pub rule: String,
}

impl PrescribedSection {
    /// Converts a core report.
    pub fn of(report: &PrescribedReport) -> Self {
        Self {
            geometry: report.geometry.to_string(),
            lower_margins: report.lower_margins.clone(),
            upper_margins: report.upper_margins.clone(),
            verdict: report.verdict.to_string(),
            collapse_predicted: report.collapse_predicted,
            in_guaranteed_box: report.in_guaranteed_box,
            outside_image: report.outside_image,
            rule: report.rule.to_string(),
        }
    }
}

/// One subset-inequality check.
#[derive(Clone, Debug, Serialize)]
pub struct SubsetSection {
    /// Mode identifier.
    pub mode: String,
    /// Whether every inequality holds.
    pub pass: bool,
    /// Smallest slack over the quantified subsets.
    pub min_slack: f64,
    /// Subset attaining it (sorted vertex ids).
    pub worst_subset: Vec<usize>,
    /// Equality residual at the full set (Euclidean image mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality_residual_at_full: Option<f64>,
    /// Pointwise `K_i < 2π` bound, where applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_bound_ok: Option<bool>,
    /// Number of subsets enumerated.
    pub subsets_checked: u64,
}

impl SubsetSection {
    /// Converts a core report.
    pub fn of(report: &SubsetReport) -> Self {
        Self {
            mode: report.mode.to_string(),
            pass: report.pass,
            min_slack: report.min_slack,
            worst_subset: report.worst_subset.clone(),
            equality_residual_at_full: report.equality_residual_at_full,
            vertex_bound_ok: report.vertex_bound_ok,
            subsets_checked: report.subsets_checked,
        }
    }
}

/// Exponential-rate fit.
#[derive(Clone, Debug, Serialize)]
pub struct RateSection {
    /// Fitted slope.
    pub rate: f64,
    /// Fit quality.
    pub r_squared: f64,
    /// Points in the fit.
    pub samples_used: usize,
}

impl RateSection {
    /// Converts a core estimate.
    pub fn of(r: &RateEstimate) -> Self {
        Self {
            rate: r.rate,
            r_squared: r.r_squared,
            samples_used: r.samples_used,
        }
    }
}

/// Conservation drift as reported.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConservationSection {
    /// Euclidean flows conserve the log-radius sum.
    Euclidean {
        /// Largest observed drift.
        max_drift: f64,
        /// Threshold `1e-9 · N`.
        threshold: f64,
        /// Verdict.
        pass: bool,
    },
    /// No conserved quantity for this flow.
    NotApplicable,
}

impl ConservationSection {
    /// Converts a core report.
    pub fn of(report: &ConservationReport) -> Self {
        match *report {
            ConservationReport::Euclidean {
                max_drift,
                threshold,
                pass,
            } => ConservationSection::Euclidean {
                max_drift,
                threshold,
                pass,
            },
            ConservationReport::NotApplicable => ConservationSection::NotApplicable,
        }
    }
}

/// Flow run summary.
#[derive(Clone, Debug, Serialize)]
pub struct FlowSection {
    /// Terminal classification.
    pub status: String,
    /// Why the loop stopped.
    pub stop_reason: String,
    /// Flow time at termination.
    pub final_time: f64,
    /// Terminal radii.
    pub final_radii: Vec<f64>,
    /// Terminal curvatures.
    pub final_curvature: Vec<f64>,
    /// Terminal sup-norm curvature gap.
    pub final_gap_sup_norm: f64,
    /// Rate fit, when one was possible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_estimate: Option<RateSection>,
    /// Conservation drift.
    pub conservation: ConservationSection,
    /// Gauss-Bonnet residual at the final state, when computable inside
    /// kernel range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss_bonnet_residual: Option<Toleranced>,
    /// Accepted steps.
    pub steps_accepted: usize,
    /// Rejected steps.
    pub steps_rejected: usize,
    /// Trajectory samples recorded.
    pub samples_recorded: usize,
}

impl FlowSection {
    /// Summarizes a run; `gauss_bonnet_residual` is attached by the caller
    /// because collapsed states sit below the public kernel range.
    pub fn of(result: &FlowResult, gauss_bonnet_residual: Option<Toleranced>) -> Self {
        let final_gap = result
            .trajectory
            .last()
            .map(|s| s.gap_sup_norm)
            .unwrap_or(f64::NAN);
        Self {
            status: result.status.to_string(),
            stop_reason: format!("{:?}", result.stop_reason),
            final_time: result.final_time,
            final_radii: result.final_state.radii().to_vec(),
            final_curvature: result.final_curvature.values().to_vec(),
            final_gap_sup_norm: final_gap,
            rate_estimate: result.rate_estimate.as_ref().map(RateSection::of),
            conservation: ConservationSection::of(&result.conservation),
            gauss_bonnet_residual,
            steps_accepted: result.steps_accepted,
            steps_rejected: result.steps_rejected,
            samples_recorded: result.trajectory.len(),
        }
    }
}

/// Gradient-check summary for one geometry.
#[derive(Clone, Debug, Serialize)]
pub struct GradcheckRow {
    /// Geometry checked.
    pub geometry: String,
    /// Number of random samples.
    pub samples: usize,
    /// Largest relative error against central differences, measured
    /// against the gradient magnitude.
    pub max_rel_error: f64,
    /// Pass at 1e-6.
    pub pass: bool,
}

/// Tool identification.
#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    /// Binary name.
    pub name: &'static str,
    /// Crate version.
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: "circleflow",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// The complete report document.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    /// Tool name and version.
    pub tool: ToolInfo,
    /// Unix timestamp (seconds); the only non-deterministic field.
    pub generated_at: u64,
    /// The subcommand that produced this report.
    pub command: String,
    /// Echo of the effective configuration, flags and seed included.
    pub config: serde_json::Value,
    /// Input summary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexSummary>,
    /// Per-face weight-sum residuals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub face_condition: Option<B1Section>,
    /// Characters and the mean identity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characters: Option<CharacterSection>,
    /// Character-threshold classifications.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub classifications: Vec<ClassificationSection>,
    /// Prescribed-curvature verdicts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prescribed: Option<PrescribedSection>,
    /// Subset-inequality checks.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub subset_checks: Vec<SubsetSection>,
    /// Flow run summary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSection>,
    /// Gradient-check table.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub gradcheck: Vec<GradcheckRow>,
}

impl RunReport {
    /// An empty report skeleton for `command` with its config echo.
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        let generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: ToolInfo::default(),
            generated_at,
            command: command.to_string(),
            config,
            complex: None,
            face_condition: None,
            characters: None,
            classifications: Vec::new(),
            prescribed: None,
            subset_checks: Vec::new(),
            flow: None,
            gradcheck: Vec::new(),
        }
    }

    /// Pretty JSON rendering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
