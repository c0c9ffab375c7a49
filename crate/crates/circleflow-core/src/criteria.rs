//! Existence and non-existence criteria for ideal circle patterns.
//!
//! Three kinds of checks, in increasing cost:
//!
//! * [`classify_character`] — per-vertex character thresholds. In the
//!   hyperbolic background a pattern with zero curvature exists (uniquely)
//!   when every character exceeds `2π` and cannot exist when none does; in
//!   the Euclidean background the threshold is the average `2π(1 - χ/N)`,
//!   with existence unique up to scaling. Characters strictly below their
//!   threshold additionally predict collapse of the flow.
//! * [`check_prescribed`] — per-vertex interval tests for a prescribed
//!   curvature `K̄`: realizable when every `K̄_i` lies in
//!   `(2π - ℒ_i, 2π)` (hyperbolic, open) or `[2π - ℒ_i, 2π)` (Euclidean,
//!   closed below, plus the total-curvature constraint), impossible when
//!   every `K̄_i` sits on the wrong side.
//! * [`check_subset_inequalities`] — brute-force verification of the
//!   subset conditions of Bobenko-Springborn and Ge-Hua-Zhou over all
//!   non-empty vertex subsets, feasible up to [`SUBSET_ENUMERATION_CAP`]
//!   vertices.
//!
//! Verdicts are three-valued; when characters straddle a threshold the
//! theorems are silent and the checker reports [`Verdict::Indeterminate`]
//! rather than extrapolate.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::complex::WeightedComplex;
use crate::geometry::{CurvatureVector, Geometry};
use crate::math;

/// Three-valued outcome of a criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The pattern exists and is unique (up to scaling in the Euclidean
    /// background).
    ExistsUnique,
    /// No such pattern exists.
    NotExists,
    /// The hypothesis of neither direction holds.
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ExistsUnique => write!(f, "exists-unique"),
            Verdict::NotExists => write!(f, "not-exists"),
            Verdict::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

/// Margins within this distance of a threshold count as sitting exactly on
/// it, so weak inequalities survive floating-point weight arithmetic.
pub const THRESHOLD_SNAP: f64 = 1e-9;

/// Subsets are enumerated exhaustively; beyond this many vertices the
/// check refuses rather than prune heuristically.
pub const SUBSET_ENUMERATION_CAP: usize = 24;

/// Errors from the criteria checkers.
#[derive(Clone, Debug, PartialEq)]
pub enum CriteriaError {
    /// The complex violates the per-face weight-sum condition.
    FaceConditionViolated {
        /// Largest per-face residual magnitude.
        max_abs_residual: f64,
    },
    /// Too many vertices for exhaustive subset enumeration.
    TooManyVertices {
        /// Vertex count.
        vertices: usize,
        /// The cap.
        cap: usize,
    },
    /// The Bobenko-Springborn modes need a curvature vector.
    CurvatureRequired,
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
        /// Required sum.
        expected: f64,
    },
    /// A supplied vector has the wrong length.
    DimensionMismatch {
        /// Number of vertices.
        expected: usize,
        /// Length supplied.
        got: usize,
    },
}

impl fmt::Display for CriteriaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriteriaError::FaceConditionViolated { max_abs_residual } => write!(
                f,
                "face weight sums violate the ideal-pattern condition (worst residual {max_abs_residual:.3e})"
            ),
            CriteriaError::TooManyVertices { vertices, cap } => {
                write!(f, "{vertices} vertices exceed the exhaustive enumeration cap of {cap}")
            }
            CriteriaError::CurvatureRequired => {
                write!(f, "this subset mode needs a curvature vector")
            }
            CriteriaError::PrescribedOutOfRange { vertex, value } => {
                write!(f, "prescribed curvature {value} at vertex {vertex} is not below 2 pi")
            }
            CriteriaError::PrescribedSumMismatch { sum, expected } => {
                write!(f, "prescribed curvatures sum to {sum}, need {expected} (2 pi chi)")
            }
            CriteriaError::DimensionMismatch { expected, got } => {
                write!(f, "vector has {got} entries, complex has {expected} vertices")
            }
        }
    }
}

impl core::error::Error for CriteriaError {}

// ---------------------------------------------------------------------------
// Character thresholds
// ---------------------------------------------------------------------------

/// Result of the per-vertex character classification.
#[derive(Clone, Debug)]
pub struct CharacterReport {
    /// Geometry the verdict refers to.
    pub geometry: Geometry,
    /// The threshold compared against: `2π` or `2π(1 - χ/N)`.
    pub threshold: f64,
    /// Per-vertex margins `ℒ_i - threshold`.
    pub margins: Vec<f64>,
    /// The verdict.
    pub verdict: Verdict,
    /// Whether the flow is predicted to collapse to zero.
    pub collapse_predicted: bool,
    /// Which rule produced the verdict.
    pub rule: &'static str,
}

/// Classifies existence from the per-vertex characters alone.
pub fn classify_character(
    complex: &WeightedComplex,
    geometry: Geometry,
) -> Result<CharacterReport, CriteriaError> {
    let b1 = complex.validate_b1();
    if !b1.pass() {
        return Err(CriteriaError::FaceConditionViolated {
            max_abs_residual: b1.max_abs_residual(),
        });
    }
    let characters = complex.character();
    let n = complex.vertex_count() as f64;
    let chi = complex.euler_characteristic() as f64;
    let threshold = match geometry {
        Geometry::Hyperbolic => 2.0 * PI,
        Geometry::Euclidean => 2.0 * PI * (1.0 - chi / n),
    };
    let margins: Vec<f64> = characters.values().iter().map(|&l| l - threshold).collect();

    let all_above_strict = margins.iter().all(|&m| m > THRESHOLD_SNAP);
    let all_at_least = margins.iter().all(|&m| m >= -THRESHOLD_SNAP);
    let all_at_most = margins.iter().all(|&m| m <= THRESHOLD_SNAP);
    let all_below_strict = margins.iter().all(|&m| m < -THRESHOLD_SNAP);

    let (verdict, collapse_predicted, rule) = match geometry {
        Geometry::Hyperbolic => {
            if all_above_strict {
                (Verdict::ExistsUnique, false, "character-above-2pi-everywhere")
            } else if all_at_most {
                (
                    Verdict::NotExists,
                    all_below_strict,
                    "character-at-most-2pi-everywhere",
                )
            } else {
                (Verdict::Indeterminate, false, "character-mixed")
            }
        }
        Geometry::Euclidean => {
            if all_at_least {
                (
                    Verdict::ExistsUnique,
                    false,
                    "character-at-least-average-everywhere",
                )
            } else if all_below_strict {
                (
                    Verdict::NotExists,
                    true,
                    "character-below-average-everywhere",
                )
            } else {
                (Verdict::Indeterminate, false, "character-mixed")
            }
        }
    };

    Ok(CharacterReport {
        geometry,
        threshold,
        margins,
        verdict,
        collapse_predicted,
        rule,
    })
}

// ---------------------------------------------------------------------------
// Prescribed curvature
// ---------------------------------------------------------------------------

/// Result of the prescribed-curvature interval test.
#[derive(Clone, Debug)]
pub struct PrescribedReport {
    /// Geometry the verdict refers to.
    pub geometry: Geometry,
    /// Per-vertex lower margins `K̄_i - (2π - ℒ_i)`.
    pub lower_margins: Vec<f64>,
    /// Per-vertex upper margins `2π - K̄_i` (all positive by precondition).
    pub upper_margins: Vec<f64>,
    /// The verdict.
    pub verdict: Verdict,
    /// Whether the prescribed flow is predicted to collapse to zero.
    pub collapse_predicted: bool,
    /// `K̄` lies in the box guaranteed to be inside the curvature image.
    pub in_guaranteed_box: bool,
    /// `K̄` lies in the box guaranteed to be outside the curvature image.
    pub outside_image: bool,
    /// Which rule produced the verdict.
    pub rule: &'static str,
}

/// Tests a prescribed curvature vector against the per-vertex intervals.
pub fn check_prescribed(
    complex: &WeightedComplex,
    geometry: Geometry,
    prescribed: &[f64],
) -> Result<PrescribedReport, CriteriaError> {
    let b1 = complex.validate_b1();
    if !b1.pass() {
        return Err(CriteriaError::FaceConditionViolated {
            max_abs_residual: b1.max_abs_residual(),
        });
    }
    let n = complex.vertex_count();
    if prescribed.len() != n {
        return Err(CriteriaError::DimensionMismatch {
            expected: n,
            got: prescribed.len(),
        });
    }
    for (v, &k) in prescribed.iter().enumerate() {
        if !(k.is_finite() && k < 2.0 * PI) {
            return Err(CriteriaError::PrescribedOutOfRange { vertex: v, value: k });
        }
    }
    if geometry == Geometry::Euclidean {
        let sum = math::sum_compensated(prescribed);
        let expected = 2.0 * PI * complex.euler_characteristic() as f64;
        if math::abs(sum - expected) > crate::flow::PRESCRIBED_SUM_TOL {
            return Err(CriteriaError::PrescribedSumMismatch { sum, expected });
        }
    }

    let characters = complex.character();
    let lower_margins: Vec<f64> = prescribed
        .iter()
        .zip(characters.values())
        .map(|(&k, &l)| k - (2.0 * PI - l))
        .collect();
    let upper_margins: Vec<f64> = prescribed.iter().map(|&k| 2.0 * PI - k).collect();

    let all_above_strict = lower_margins.iter().all(|&m| m > THRESHOLD_SNAP);
    let all_at_least = lower_margins.iter().all(|&m| m >= -THRESHOLD_SNAP);
    let all_at_most = lower_margins.iter().all(|&m| m <= THRESHOLD_SNAP);
    let all_below_strict = lower_margins.iter().all(|&m| m < -THRESHOLD_SNAP);

    let (verdict, collapse_predicted, rule) = match geometry {
        Geometry::Hyperbolic => {
            if all_above_strict {
                (Verdict::ExistsUnique, false, "prescribed-inside-open-interval")
            } else if all_at_most {
                (
                    Verdict::NotExists,
                    all_below_strict,
                    "prescribed-at-most-lower-bound",
                )
            } else {
                (Verdict::Indeterminate, false, "prescribed-mixed")
            }
        }
        Geometry::Euclidean => {
            if all_at_least {
                (
                    Verdict::ExistsUnique,
                    false,
                    "prescribed-inside-half-open-interval",
                )
            } else if all_below_strict {
                (
                    Verdict::NotExists,
                    true,
                    "prescribed-below-lower-bound-everywhere",
                )
            } else {
                (Verdict::Indeterminate, false, "prescribed-mixed")
            }
        }
    };

    Ok(PrescribedReport {
        geometry,
        lower_margins,
        upper_margins,
        verdict,
        collapse_predicted,
        in_guaranteed_box: verdict == Verdict::ExistsUnique,
        outside_image: verdict == Verdict::NotExists,
        rule,
    })
}

// ---------------------------------------------------------------------------
// Subset inequalities
// ---------------------------------------------------------------------------

/// Which family of subset inequalities to verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetMode {
    /// Bobenko-Springborn image description, hyperbolic: for every
    /// non-empty `A ⊆ V`, `Σ_{i∈A} K_i > 2π|A| - 2 Σ_{∂e∩A≠∅} Φ(e)`
    /// strictly, together with `K_i < 2π` per vertex.
    BsHyperbolic,
    /// Bobenko-Springborn image description, Euclidean: same sums with
    /// `≥`, and equality exactly at `A = V`.
    BsEuclidean,
    /// Ge-Hua-Zhou hyperbolic convergence condition:
    /// `Σ_{∂e∩A≠∅} Φ(e) > π|A|` for every non-empty `A`.
    GhzH3,
    /// Ge-Hua-Zhou Euclidean convergence condition:
    /// `πχ|A|/N > π|A| - Σ_{∂e∩A≠∅} Φ(e)` for every non-empty `A`.
    GhzE3,
}

impl fmt::Display for SubsetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetMode::BsHyperbolic => write!(f, "bs-hyperbolic"),
            SubsetMode::BsEuclidean => write!(f, "bs-euclidean"),
            SubsetMode::GhzH3 => write!(f, "ghz-h3"),
            SubsetMode::GhzE3 => write!(f, "ghz-e3"),
        }
    }
}

/// Result of an exhaustive subset check.
#[derive(Clone, Debug)]
pub struct SubsetReport {
    /// The mode checked.
    pub mode: SubsetMode,
    /// Whether every required inequality holds (strictly, beyond
    /// [`THRESHOLD_SNAP`]; for the Euclidean Bobenko-Springborn mode the
    /// full set must instead sit on the threshold).
    pub pass: bool,
    /// Smallest slack over the quantified subsets.
    pub min_slack: f64,
    /// The subset attaining the smallest slack, as sorted vertex ids;
    /// lexicographically smallest among ties.
    pub worst_subset: Vec<usize>,
    /// Residual at `A = V` for the Euclidean Bobenko-Springborn equality.
    pub equality_residual_at_full: Option<f64>,
    /// Per-vertex bound `K_i < 2π` (the pointwise part of the
    /// Bobenko-Springborn descriptions); `None` for the weight-only modes.
    pub vertex_bound_ok: Option<bool>,
    /// Number of subsets enumerated.
    pub subsets_checked: u64,
}

/// Exhaustively verifies one family of subset inequalities.
///
/// A loop contributes its weight once when its single endpoint meets `A`
/// (the endpoint *set* of a loop is a singleton).
pub fn check_subset_inequalities(
    complex: &WeightedComplex,
    mode: SubsetMode,
    curvature: Option<&CurvatureVector>,
) -> Result<SubsetReport, CriteriaError> {
    let n = complex.vertex_count();
    if n > SUBSET_ENUMERATION_CAP {
        return Err(CriteriaError::TooManyVertices {
            vertices: n,
            cap: SUBSET_ENUMERATION_CAP,
        });
    }
    let needs_curvature = matches!(mode, SubsetMode::BsHyperbolic | SubsetMode::BsEuclidean);
    let curvature = match (needs_curvature, curvature) {
        (true, None) => return Err(CriteriaError::CurvatureRequired),
        (true, Some(k)) => {
            if k.values().len() != n {
                return Err(CriteriaError::DimensionMismatch {
                    expected: n,
                    got: k.values().len(),
                });
            }
            Some(k)
        }
        (false, k) => k,
    };

    // Endpoint bit masks; a loop's mask has a single bit.
    let edge_masks: Vec<(u32, f64)> = complex
        .edges()
        .iter()
        .map(|e| {
            let a = complex.half_edges()[e.half_edges[0].0].origin.0;
            let b = complex.half_edges()[e.half_edges[1].0].origin.0;
            ((1u32 << a) | (1u32 << b), e.weight)
        })
        .collect();

    let chi = complex.euler_characteristic() as f64;
    let full: u32 = (1u32 << n) - 1;

    let mut min_slack = f64::INFINITY;
    let mut worst: u32 = 0;
    let mut equality_residual_at_full = None;
    let mut pass = true;

    for mask in 1..=full {
        let size = mask.count_ones() as f64;
        let mut weight_sum = math::NeumaierSum::new();
        for &(em, w) in &edge_masks {
            if em & mask != 0 {
                weight_sum.add(w);
            }
        }
        let weight_sum = weight_sum.total();

        let slack = match mode {
            SubsetMode::BsHyperbolic | SubsetMode::BsEuclidean => {
                let k = curvature.expect("checked above");
                let mut k_sum = math::NeumaierSum::new();
                for v in 0..n {
                    if mask & (1 << v) != 0 {
                        k_sum.add(k.values()[v]);
                    }
                }
                k_sum.total() - 2.0 * PI * size + 2.0 * weight_sum
            }
            SubsetMode::GhzH3 => weight_sum - PI * size,
            SubsetMode::GhzE3 => PI * chi * size / n as f64 - PI * size + weight_sum,
        };

        if mode == SubsetMode::BsEuclidean && mask == full {
            // Equality is required exactly at the full set.
            equality_residual_at_full = Some(slack);
            if math::abs(slack) > THRESHOLD_SNAP {
                pass = false;
            }
            continue;
        }

        if slack < min_slack
            || (slack == min_slack && lex_less(mask, worst))
        {
            min_slack = slack;
            worst = mask;
        }
        if slack <= THRESHOLD_SNAP {
            pass = false;
        }
    }

    // A full-set-only complex (n = 1) in the Euclidean mode quantifies
    // nothing strictly; keep min_slack presentable.
    if !min_slack.is_finite() {
        min_slack = 0.0;
    }

    let vertex_bound_ok = curvature
        .filter(|_| needs_curvature)
        .map(|k| k.values().iter().all(|&ki| ki < 2.0 * PI));
    if let Some(false) = vertex_bound_ok {
        pass = false;
    }

    Ok(SubsetReport {
        mode,
        pass,
        min_slack,
        worst_subset: mask_to_sorted(worst),
        equality_residual_at_full,
        vertex_bound_ok,
        subsets_checked: full as u64,
    })
}

fn mask_to_sorted(mask: u32) -> Vec<usize> {
    (0..32).filter(|v| mask & (1 << v) != 0).collect()
}

/// Lexicographic order on subsets viewed as sorted vertex lists.
fn lex_less(a: u32, b: u32) -> bool {
    mask_to_sorted(a) < mask_to_sorted(b)
}
