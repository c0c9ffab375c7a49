//! Two-circle configuration kernels.
//!
//! For two circles of radii `r_i`, `r_j` crossing at exterior angle
//! `φ ∈ (0, π)`, the triangle spanned by the two centers and one crossing
//! point has side lengths `l`, `r_i`, `r_j`, where
//!
//! * Euclidean:  `l² = r_i² + r_j² + 2 r_i r_j cos φ`
//! * hyperbolic: `cosh l = cosh r_i cosh r_j + sinh r_i sinh r_j cos φ`
//!
//! The inner angle `θ_i` at the center of circle `i` follows from the law
//! of cosines of the background geometry. The kernels below evaluate it as
//! `atan2(sin θ_i, cos θ_i)` with both entries in cancellation-free form,
//! which stays accurate over the whole admissible radius range:
//!
//! * Euclidean:  `θ_i = atan2(r_j sin φ, r_i + r_j cos φ)`
//! * hyperbolic: `θ_i = atan2(sinh r_j sin φ,
//!                            sinh r_i cosh r_j + cosh r_i sinh r_j cos φ)`
//!
//! Radii are restricted to `[1e-12, ∞)` (Euclidean) and `[1e-12, 40]`
//! (hyperbolic; `cosh` of side lengths would overflow far beyond that).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::complex::{CharacterVector, Triangulation, VertexId};
use crate::math;

/// Background geometry of the pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    /// Flat background (curvature 0).
    Euclidean,
    /// Hyperbolic background (curvature -1).
    Hyperbolic,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Euclidean => write!(f, "euclidean"),
            Geometry::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

/// Smallest radius the kernels accept.
pub const MIN_RADIUS: f64 = 1e-12;

/// Largest radius the hyperbolic kernels accept.
pub const MAX_HYPERBOLIC_RADIUS: f64 = 40.0;

/// Domain errors from the geometry kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryError {
    /// A radius is non-finite, below [`MIN_RADIUS`], or above
    /// [`MAX_HYPERBOLIC_RADIUS`] in hyperbolic geometry.
    RadiusOutOfRange {
        /// The offending radius.
        radius: f64,
    },
    /// A weight lies outside the open interval `(0, π)`.
    WeightOutOfRange {
        /// The offending weight.
        weight: f64,
    },
    /// A state vector does not match the vertex count of the triangulation.
    DimensionMismatch {
        /// Expected length.
        expected: usize,
        /// Actual length.
        got: usize,
    },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::RadiusOutOfRange { radius } => {
                write!(f, "radius {radius} outside the admissible range")
            }
            GeometryError::WeightOutOfRange { weight } => {
                write!(f, "weight {weight} outside (0, pi)")
            }
            GeometryError::DimensionMismatch { expected, got } => {
                write!(f, "state has {got} entries, triangulation has {expected} vertices")
            }
        }
    }
}

impl core::error::Error for GeometryError {}

fn check_radius(g: Geometry, r: f64) -> Result<(), GeometryError> {
    let ok = r.is_finite()
        && r >= MIN_RADIUS
        && (g == Geometry::Euclidean || r <= MAX_HYPERBOLIC_RADIUS);
    if ok {
        Ok(())
    } else {
        Err(GeometryError::RadiusOutOfRange { radius: r })
    }
}

fn check_weight(phi: f64) -> Result<(), GeometryError> {
    if phi > 0.0 && phi < PI {
        Ok(())
    } else {
        Err(GeometryError::WeightOutOfRange { weight: phi })
    }
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// A radius vector: one positive circle radius per primal vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternState {
    radii: Vec<f64>,
}

impl PatternState {
    /// Wraps a radius vector, rejecting non-positive or non-finite entries.
    pub fn new(radii: Vec<f64>) -> Result<Self, GeometryError> {
        for &r in &radii {
            if !(r.is_finite() && r > 0.0) {
                return Err(GeometryError::RadiusOutOfRange { radius: r });
            }
        }
        Ok(Self { radii })
    }

    /// The constant state `r ≡ value`.
    pub fn uniform(n: usize, value: f64) -> Result<Self, GeometryError> {
        Self::new(vec![value; n])
    }

    /// Radii indexed by vertex id.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Radius at one vertex.
    pub fn radius(&self, v: VertexId) -> f64 {
        self.radii[v.0]
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    /// True if the state is empty.
    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Geometric mean of the radii, the natural scale of a Euclidean state.
    pub fn geometric_mean(&self) -> f64 {
        let mut acc = math::NeumaierSum::new();
        for &r in &self.radii {
            acc.add(math::ln(r));
        }
        math::exp(acc.total() / self.radii.len() as f64)
    }
}

/// Per-vertex curvatures `K_i = 2π - (cone angle at i)`.
#[derive(Clone, Debug)]
pub struct CurvatureVector {
    values: Vec<f64>,
}

impl CurvatureVector {
    /// Wraps raw per-vertex curvature values. Vectors computed by
    /// [`curvature_vector`] satisfy `K_i < 2π` structurally; external
    /// values are bound-checked by their consumers (the subset checks
    /// report the pointwise bound explicitly).
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    /// Curvatures indexed by vertex id. Every value is `< 2π`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Curvature at one vertex.
    pub fn value(&self, v: VertexId) -> f64 {
        self.values[v.0]
    }

    /// Compensated total curvature.
    pub fn sum(&self) -> f64 {
        math::sum_compensated(&self.values)
    }

    /// Sup-norm distance to a target curvature vector.
    pub fn sup_gap(&self, target: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(target)
            .fold(0.0, |a, (&k, &t)| a.max(math::abs(k - t)))
    }
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

/// Distance between the two circle centers.
pub fn edge_length(g: Geometry, r_i: f64, r_j: f64, phi: f64) -> Result<f64, GeometryError> {
    check_radius(g, r_i)?;
    check_radius(g, r_j)?;
    check_weight(phi)?;
    Ok(match g {
        Geometry::Euclidean => euclidean_length(r_i, r_j, phi),
        Geometry::Hyperbolic => {
            let cm1 = hyperbolic_coshl_m1(r_i, r_j, phi);
            // l = acosh(1 + cm1), written to stay exact for small l.
            math::ln_1p(cm1 + math::sqrt(cm1 * (cm1 + 2.0)))
        }
    })
}

/// Inner angle `θ_i` at the center of circle `i`.
pub fn inner_angle(g: Geometry, r_i: f64, r_j: f64, phi: f64) -> Result<f64, GeometryError> {
    check_radius(g, r_i)?;
    check_radius(g, r_j)?;
    check_weight(phi)?;
    Ok(inner_angle_unchecked(g, r_i, r_j, phi))
}

/// Analytic partial derivatives `(∂θ_i/∂r_i, ∂θ_i/∂r_j)`.
///
/// The first is always negative, the second always positive: growing the
/// own circle narrows the corner, growing the neighbor widens it.
pub fn inner_angle_gradient(
    g: Geometry,
    r_i: f64,
    r_j: f64,
    phi: f64,
) -> Result<(f64, f64), GeometryError> {
    check_radius(g, r_i)?;
    check_radius(g, r_j)?;
    check_weight(phi)?;
    let s = math::sin(phi);
    Ok(match g {
        Geometry::Euclidean => {
            let l2 = euclidean_length_sq(r_i, r_j, phi);
            (-r_j * s / l2, r_i * s / l2)
        }
        Geometry::Hyperbolic => {
            let cm1 = hyperbolic_coshl_m1(r_i, r_j, phi);
            let sinh_l_sq = cm1 * (cm1 + 2.0);
            let cosh_l = 1.0 + cm1;
            (
                -math::sinh(r_j) * cosh_l * s / sinh_l_sq,
                math::sinh(r_i) * s / sinh_l_sq,
            )
        }
    })
}

#[inline]
fn euclidean_length_sq(r_i: f64, r_j: f64, phi: f64) -> f64 {
    // (r_i - r_j)^2 + 4 r_i r_j cos^2(phi/2) avoids cancellation near phi = pi.
    let d = r_i - r_j;
    let ch = math::cos(0.5 * phi);
    d * d + 4.0 * r_i * r_j * ch * ch
}

#[inline]
fn euclidean_length(r_i: f64, r_j: f64, phi: f64) -> f64 {
    math::sqrt(euclidean_length_sq(r_i, r_j, phi))
}

/// `cosh l - 1` in cancellation-free form:
/// `2 sinh²((r_i - r_j)/2) + 2 sinh r_i sinh r_j cos²(φ/2)`.
#[inline]
fn hyperbolic_coshl_m1(r_i: f64, r_j: f64, phi: f64) -> f64 {
    let sh = math::sinh(0.5 * (r_i - r_j));
    let ch = math::cos(0.5 * phi);
    2.0 * sh * sh + 2.0 * math::sinh(r_i) * math::sinh(r_j) * ch * ch
}

#[inline]
pub(crate) fn inner_angle_unchecked(g: Geometry, r_i: f64, r_j: f64, phi: f64) -> f64 {
    let (s, c) = (math::sin(phi), math::cos(phi));
    match g {
        Geometry::Euclidean => math::atan2(r_j * s, r_i + r_j * c),
        Geometry::Hyperbolic => {
            let (shi, chi) = (math::sinh(r_i), math::cosh(r_i));
            let (shj, chj) = (math::sinh(r_j), math::cosh(r_j));
            math::atan2(shj * s, shi * chj + chi * shj * c)
        }
    }
}

/// Both inner angles of one two-circle triangle, sharing the hyperbolic
/// function evaluations.
#[inline]
pub(crate) fn inner_angle_pair(g: Geometry, r_i: f64, r_j: f64, phi: f64) -> (f64, f64) {
    let (s, c) = (math::sin(phi), math::cos(phi));
    match g {
        Geometry::Euclidean => (
            math::atan2(r_j * s, r_i + r_j * c),
            math::atan2(r_i * s, r_j + r_i * c),
        ),
        Geometry::Hyperbolic => {
            let (shi, chi) = (math::sinh(r_i), math::cosh(r_i));
            let (shj, chj) = (math::sinh(r_j), math::cosh(r_j));
            (
                math::atan2(shj * s, shi * chj + chi * shj * c),
                math::atan2(shi * s, shj * chi + chj * shi * c),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Aggregates over a triangulation
// ---------------------------------------------------------------------------

fn check_state(t: &Triangulation, g: Geometry, r: &PatternState) -> Result<(), GeometryError> {
    if r.len() != t.vertex_count() {
        return Err(GeometryError::DimensionMismatch {
            expected: t.vertex_count(),
            got: r.len(),
        });
    }
    for &radius in r.radii() {
        check_radius(g, radius)?;
    }
    Ok(())
}

/// Cone angle at `v`: the sum of inner angles over every triangle corner at
/// `v`. Each edge-face incidence contributes one corner; a loop contributes
/// both corners of its triangles.
pub fn cone_angle(
    t: &Triangulation,
    g: Geometry,
    r: &PatternState,
    v: VertexId,
) -> Result<f64, GeometryError> {
    check_state(t, g, r)?;
    let mut acc = math::NeumaierSum::new();
    for tri in t.triangles() {
        if tri.corner_i != v && tri.corner_j != v {
            continue;
        }
        let (a_i, a_j) = inner_angle_pair(
            g,
            r.radius(tri.corner_i),
            r.radius(tri.corner_j),
            tri.weight,
        );
        if tri.corner_i == v {
            acc.add(a_i);
        }
        if tri.corner_j == v {
            acc.add(a_j);
        }
    }
    Ok(acc.total())
}

/// All vertex curvatures `K_i = 2π - a_i` in one pass.
pub fn curvature_vector(
    t: &Triangulation,
    g: Geometry,
    r: &PatternState,
) -> Result<CurvatureVector, GeometryError> {
    check_state(t, g, r)?;
    let mut cones = vec![math::NeumaierSum::new(); t.vertex_count()];
    for tri in t.triangles() {
        let (a_i, a_j) = inner_angle_pair(
            g,
            r.radius(tri.corner_i),
            r.radius(tri.corner_j),
            tri.weight,
        );
        cones[tri.corner_i.0].add(a_i);
        cones[tri.corner_j.0].add(a_j);
    }
    Ok(CurvatureVector::from_values(
        cones.iter().map(|c| 2.0 * PI - c.total()).collect(),
    ))
}

/// Total hyperbolic area: every triangle has star-corner angle `π - φ`, so
/// its angle deficit is `φ - θ_i - θ_j`; the total over all `2|E|`
/// triangles is the area of the cone surface.
pub fn hyperbolic_area(t: &Triangulation, r: &PatternState) -> Result<f64, GeometryError> {
    check_state(t, Geometry::Hyperbolic, r)?;
    let mut acc = math::NeumaierSum::new();
    for tri in t.triangles() {
        let (a_i, a_j) = inner_angle_pair(
            Geometry::Hyperbolic,
            r.radius(tri.corner_i),
            r.radius(tri.corner_j),
            tri.weight,
        );
        acc.add(tri.weight - a_i - a_j);
    }
    Ok(acc.total())
}

/// Residual of the combinatorial Gauss-Bonnet identity:
/// `ΣK_i - 2πχ` (Euclidean) or `ΣK_i - 2πχ - Area` (hyperbolic).
///
/// The curvature sum and the area are accumulated through their separate
/// defining routes, so the residual measures the numerical consistency of
/// the kernels rather than restating an algebraic identity.
pub fn gauss_bonnet_residual(
    t: &Triangulation,
    g: Geometry,
    r: &PatternState,
) -> Result<f64, GeometryError> {
    let k = curvature_vector(t, g, r)?;
    let chi_term = 2.0 * PI * t.euler_characteristic() as f64;
    Ok(match g {
        Geometry::Euclidean => k.sum() - chi_term,
        Geometry::Hyperbolic => k.sum() - chi_term - hyperbolic_area(t, r)?,
    })
}

/// Convenience check used by reports and tests: cone angles at unit radii
/// in the Euclidean background reproduce the characters exactly.
pub fn unit_euclidean_cone_angles(t: &Triangulation) -> Vec<f64> {
    let r = PatternState::uniform(t.vertex_count(), 1.0).expect("unit radii are valid");
    curvature_vector(t, Geometry::Euclidean, &r)
        .expect("unit state is in range")
        .values()
        .iter()
        .map(|k| 2.0 * PI - k)
        .collect()
}

/// Residual of the mean-character identity `mean(ℒ) - 2π(1 - χ/N)`.
pub fn character_average_residual(characters: &CharacterVector, chi: i64, n: usize) -> f64 {
    characters.average() - 2.0 * PI * (1.0 - chi as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::WeightedComplex;
    use crate::samples;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn euclidean_lengths_match_hand_values() {
        assert!((edge_length(Geometry::Euclidean, 1.0, 1.0, FRAC_PI_2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((edge_length(Geometry::Euclidean, 1.0, 1.0, FRAC_PI_3).unwrap() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_length_matches_extended_precision_oracle() {
        // acosh(cosh^2 1) evaluated with 40-digit arithmetic.
        let expected = 1.513374006596503959804011875726635441571;
        let got = edge_length(Geometry::Hyperbolic, 1.0, 1.0, FRAC_PI_2).unwrap();
        assert!((got - expected).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn triangle_inequalities_hold() {
        let samples = [
            (0.01, 9.0, 0.06),
            (1.0, 1.0, FRAC_PI_2),
            (2.5, 0.3, 3.0),
            (5.0, 4.0, 1.5),
        ];
        for g in [Geometry::Euclidean, Geometry::Hyperbolic] {
            for &(ri, rj, phi) in &samples {
                let l = edge_length(g, ri, rj, phi).unwrap();
                assert!(l > (ri - rj).abs());
                assert!(l < ri + rj);
            }
        }
    }

    #[test]
    fn euclidean_equal_radii_angle_is_half_weight() {
        for t in [1e-6, 0.01, 1.0, 7.5, 1e4] {
            for phi in [0.05, FRAC_PI_3, 2.8] {
                let theta = inner_angle(Geometry::Euclidean, t, t, phi).unwrap();
                assert!((theta - phi / 2.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn euclidean_right_isoceles_angle() {
        let theta = inner_angle(Geometry::Euclidean, 1.0, 1.0, FRAC_PI_2).unwrap();
        assert!((theta - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_equal_radii_angle_limits() {
        // Frozen from a 40-digit evaluation of the defining formulas.
        let small = inner_angle(Geometry::Hyperbolic, 1e-4, 1e-4, 1.0).unwrap();
        assert!((small - 0.4999999978963225).abs() < 1e-13);
        let large = inner_angle(Geometry::Hyperbolic, 15.0, 15.0, 1.0).unwrap();
        assert!((large - 3.342303986782375e-7).abs() < 1e-17);
        // Toward zero the angle approaches phi/2; toward infinity, zero.
        assert!(small < 0.5);
        assert!(large > 0.0);
    }

    #[test]
    fn hyperbolic_equal_radii_angle_strictly_decreasing() {
        let phi = 2.0;
        let grid = [1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 39.0];
        let mut prev = phi / 2.0;
        for &t in &grid {
            let theta = inner_angle(Geometry::Hyperbolic, t, t, phi).unwrap();
            assert!(theta < prev, "t={t}: {theta} !< {prev}");
            prev = theta;
        }
    }

    #[test]
    fn gradient_signs_and_spot_value() {
        for g in [Geometry::Euclidean, Geometry::Hyperbolic] {
            let (di, dj) = inner_angle_gradient(g, 1.3, 0.4, 2.0).unwrap();
            assert!(di < 0.0);
            assert!(dj > 0.0);
        }
        let (di, dj) = inner_angle_gradient(Geometry::Euclidean, 1.0, 1.0, FRAC_PI_2).unwrap();
        assert!((di + 0.5).abs() < 1e-15);
        assert!((dj - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kernels_reject_out_of_range_input() {
        assert!(matches!(
            inner_angle(Geometry::Euclidean, 1e-13, 1.0, 1.0),
            Err(GeometryError::RadiusOutOfRange { .. })
        ));
        assert!(matches!(
            inner_angle(Geometry::Hyperbolic, 41.0, 1.0, 1.0),
            Err(GeometryError::RadiusOutOfRange { .. })
        ));
        assert!(edge_length(Geometry::Euclidean, 41.0, 1.0, 1.0).is_ok());
        assert!(matches!(
            inner_angle(Geometry::Euclidean, 1.0, 1.0, PI),
            Err(GeometryError::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            inner_angle(Geometry::Euclidean, f64::NAN, 1.0, 1.0),
            Err(GeometryError::RadiusOutOfRange { .. })
        ));
    }

    #[test]
    fn unit_euclidean_cone_angle_equals_character() {
        for input in [
            samples::tetrahedron([FRAC_PI_3; 3]),
            samples::grid_torus(3, 3, [FRAC_PI_3; 3]),
            samples::polygon_quotient(2, &[3.0 * PI / 4.0; 4]),
        ] {
            let c = WeightedComplex::build(&input).unwrap();
            let t = c.triangulate();
            let characters = c.character();
            for (a, ch) in unit_euclidean_cone_angles(&t)
                .iter()
                .zip(characters.values())
            {
                assert!((a - ch).abs() < 1e-12, "cone {a} vs character {ch}");
            }
        }
    }

    #[test]
    fn torus_uniform_state_is_flat_at_any_scale() {
        let c = WeightedComplex::build(&samples::grid_torus(3, 3, [FRAC_PI_3; 3])).unwrap();
        let t = c.triangulate();
        for scale in [0.1, 1.0, 2.0, 37.0] {
            let r = PatternState::uniform(9, scale).unwrap();
            for v in 0..9 {
                let a = cone_angle(&t, Geometry::Euclidean, &r, VertexId(v)).unwrap();
                assert!((a - 2.0 * PI).abs() < 1e-12);
            }
            let k = curvature_vector(&t, Geometry::Euclidean, &r).unwrap();
            for &ki in k.values() {
                assert!(ki.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tetrahedron_unit_euclidean_curvature() {
        let c = WeightedComplex::build(&samples::tetrahedron([FRAC_PI_3; 3])).unwrap();
        let t = c.triangulate();
        let r = PatternState::uniform(4, 1.0).unwrap();
        let k = curvature_vector(&t, Geometry::Euclidean, &r).unwrap();
        for &ki in k.values() {
            assert!((ki - PI).abs() < 1e-12);
        }
        assert!((k.sum() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn gauss_bonnet_residual_small_on_random_states() {
        // Deterministic pseudo-random radii via a tiny LCG; both geometries.
        let mut seed = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for input in [
            samples::tetrahedron([FRAC_PI_3; 3]),
            samples::grid_torus(3, 3, [FRAC_PI_3; 3]),
            samples::polygon_quotient(2, &[3.0 * PI / 4.0; 4]),
        ] {
            let c = WeightedComplex::build(&input).unwrap();
            let t = c.triangulate();
            for _ in 0..25 {
                let radii: Vec<f64> = (0..c.vertex_count()).map(|_| 0.05 + 6.0 * next()).collect();
                let r = PatternState::new(radii).unwrap();
                let re = gauss_bonnet_residual(&t, Geometry::Euclidean, &r).unwrap();
                assert!(re.abs() < 1e-9, "euclidean residual {re}");
                let rh = gauss_bonnet_residual(&t, Geometry::Hyperbolic, &r).unwrap();
                assert!(rh.abs() < 1e-8, "hyperbolic residual {rh}");
            }
        }
    }

    #[test]
    fn hyperbolic_area_positive_and_vanishing_toward_zero() {
        let c = WeightedComplex::build(&samples::polygon_quotient(2, &[3.0 * PI / 4.0; 4])).unwrap();
        let t = c.triangulate();
        let mut prev = f64::INFINITY;
        for r in [2.0, 0.5, 0.1, 1e-3, 1e-6] {
            let area = hyperbolic_area(&t, &PatternState::uniform(1, r).unwrap()).unwrap();
            assert!(area > 0.0);
            assert!(area < prev);
            prev = area;
        }
        assert!(prev < 1e-10);
    }

    #[test]
    fn curvature_values_below_two_pi() {
        let c = WeightedComplex::build(&samples::tetrahedron([FRAC_PI_3; 3])).unwrap();
        let t = c.triangulate();
        for g in [Geometry::Euclidean, Geometry::Hyperbolic] {
            let r = PatternState::new(alloc::vec![0.02, 3.0, 0.5, 9.0]).unwrap();
            let k = curvature_vector(&t, g, &r).unwrap();
            for &ki in k.values() {
                assert!(ki < 2.0 * PI);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let c = WeightedComplex::build(&samples::tetrahedron([FRAC_PI_3; 3])).unwrap();
        let t = c.triangulate();
        let r = PatternState::uniform(3, 1.0).unwrap();
        assert!(matches!(
            curvature_vector(&t, Geometry::Euclidean, &r),
            Err(GeometryError::DimensionMismatch { expected: 4, got: 3 })
        ));
    }
}
