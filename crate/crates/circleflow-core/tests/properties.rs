//! Property tests for the two-circle kernels and the combinatorial
//! invariants of weighted complexes.

use core::f64::consts::PI;

use circleflow_core::complex::WeightedComplex;
use circleflow_core::geometry::{
    character_average_residual, curvature_vector, edge_length, inner_angle, inner_angle_gradient,
    Geometry, PatternState,
};
use circleflow_core::samples;
use proptest::prelude::*;

fn radius() -> impl Strategy<Value = f64> {
    0.01f64..10.0
}

fn weight() -> impl Strategy<Value = f64> {
    0.05f64..(PI - 0.05)
}

fn geometry() -> impl Strategy<Value = Geometry> {
    prop_oneof![Just(Geometry::Euclidean), Just(Geometry::Hyperbolic)]
}

/// A weight triple from the open simplex `a + b + c = π`, the shared
/// parametrization of the sample families.
fn simplex_weights() -> impl Strategy<Value = [f64; 3]> {
    (0.05f64..2.4, 0.05f64..0.9).prop_map(|(a, frac)| {
        let rest = PI - 0.1 - a;
        let b = 0.05 + frac * rest;
        let c = PI - a - b;
        [a, b, c]
    })
}

proptest! {
    #[test]
    fn triangle_inequalities(g in geometry(), ri in radius(), rj in radius(), phi in weight()) {
        let l = edge_length(g, ri, rj, phi).unwrap();
        prop_assert!(l > (ri - rj).abs());
        prop_assert!(l < ri + rj);
    }

    #[test]
    fn comparison_principle(g in geometry(), ri in radius(), rj in radius(), phi in weight()) {
        // Against both equal-radii configurations, from the smaller side.
        let (lo, hi) = if ri <= rj { (ri, rj) } else { (rj, ri) };
        let mixed = inner_angle(g, lo, hi, phi).unwrap();
        let at_lo = inner_angle(g, lo, lo, phi).unwrap();
        let at_hi = inner_angle(g, hi, hi, phi).unwrap();
        prop_assert!(mixed >= at_lo - 1e-12, "theta(lo,hi) {mixed} < theta(lo,lo) {at_lo}");
        prop_assert!(mixed >= at_hi - 1e-12, "theta(lo,hi) {mixed} < theta(hi,hi) {at_hi}");
        // Mirrored form from the larger side.
        let mixed_hi = inner_angle(g, hi, lo, phi).unwrap();
        prop_assert!(mixed_hi <= at_hi + 1e-12);
        prop_assert!(mixed_hi <= at_lo + 1e-12);
    }

    #[test]
    fn euclidean_scale_invariance(ri in radius(), rj in radius(), phi in weight(), c in 0.02f64..50.0) {
        let base = inner_angle(Geometry::Euclidean, ri, rj, phi).unwrap();
        let scaled = inner_angle(Geometry::Euclidean, c * ri, c * rj, phi).unwrap();
        prop_assert!((base - scaled).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences(
        g in geometry(),
        ri in radius(),
        rj in radius(),
        phi in weight(),
    ) {
        let h = 1e-6;
        let (di, dj) = inner_angle_gradient(g, ri, rj, phi).unwrap();
        let fd_i = (inner_angle(g, ri + h, rj, phi).unwrap()
            - inner_angle(g, ri - h, rj, phi).unwrap())
            / (2.0 * h);
        let fd_j = (inner_angle(g, ri, rj + h, phi).unwrap()
            - inner_angle(g, ri, rj - h, phi).unwrap())
            / (2.0 * h);
        // Errors measured against the gradient magnitude: a component whose
        // true value sits below ulp(theta)/h carries no oracle signal of its
        // own, but is also negligible inside the gradient.
        let scale = di.abs().max(dj.abs());
        prop_assert!((di - fd_i).abs() / scale < 1e-6, "d/dri {di} vs fd {fd_i}");
        prop_assert!((dj - fd_j).abs() / scale < 1e-6, "d/drj {dj} vs fd {fd_j}");
        prop_assert!(di < 0.0);
        prop_assert!(dj > 0.0);
    }

    #[test]
    fn hyperbolic_equal_radii_decreasing(phi in weight(), t in 0.01f64..20.0, step in 0.1f64..5.0) {
        let a = inner_angle(Geometry::Hyperbolic, t, t, phi).unwrap();
        let b = inner_angle(Geometry::Hyperbolic, t + step, t + step, phi).unwrap();
        prop_assert!(b < a);
        // Bracketed by the limits.
        prop_assert!(a < phi / 2.0);
        prop_assert!(b > 0.0);
    }

    #[test]
    fn character_identities_on_random_families(
        w in simplex_weights(),
        n in 3usize..6,
        m in 3usize..6,
        family in 0usize..3,
    ) {
        let input = match family {
            0 => samples::tetrahedron(w),
            1 => samples::grid_torus(n, m, w),
            _ => {
                // Genus-2 octagon: four weights summing to 3π, inside (0, π).
                let scale = 3.0 * PI / (2.0 * (w[0] + w[1] + w[2]));
                let quad = [
                    (w[0] * scale).clamp(0.01, PI - 0.01),
                    (w[1] * scale).clamp(0.01, PI - 0.01),
                    (w[2] * scale).clamp(0.01, PI - 0.01),
                    0.0,
                ];
                let mut quad = quad;
                quad[3] = 3.0 * PI - quad[0] - quad[1] - quad[2];
                if !(quad[3] > 0.0 && quad[3] < PI) {
                    return Ok(()); // rescaling left the simplex; skip
                }
                samples::polygon_quotient(2, &quad)
            }
        };
        let c = WeightedComplex::build(&input).unwrap();
        prop_assume!(c.validate_b1().pass());

        // Mean character equals 2π(1 - χ/N) under the face condition.
        let chars = c.character();
        let resid = character_average_residual(&chars, c.euler_characteristic(), c.vertex_count());
        prop_assert!(resid.abs() < 1e-12, "identity residual {resid}");

        // Character total is twice the weight total.
        let total: f64 = chars.values().iter().sum();
        let weight_total: f64 = c.edges().iter().map(|e| e.weight).sum();
        prop_assert!((total - 2.0 * weight_total).abs() < 1e-10);
    }

    #[test]
    fn curvatures_stay_below_two_pi(
        g in geometry(),
        seeds in prop::collection::vec(0.05f64..8.0, 9),
    ) {
        let c = WeightedComplex::build(&samples::grid_torus(3, 3, [PI / 3.0; 3])).unwrap();
        let t = c.triangulate();
        let r = PatternState::new(seeds).unwrap();
        let k = curvature_vector(&t, g, &r).unwrap();
        for &ki in k.values() {
            prop_assert!(ki < 2.0 * PI);
        }
    }
}

#[test]
fn triangulation_deterministic_across_rebuilds() {
    let input = samples::grid_torus(4, 5, [1.0, 1.2, PI - 2.2]);
    let a = WeightedComplex::build(&input).unwrap().triangulate();
    let b = WeightedComplex::build(&input).unwrap().triangulate();
    assert_eq!(a.triangles().len(), b.triangles().len());
    for (x, y) in a.triangles().iter().zip(b.triangles()) {
        assert_eq!((x.edge, x.face, x.corner_i, x.corner_j), (y.edge, y.face, y.corner_i, y.corner_j));
        assert_eq!(x.weight.to_bits(), y.weight.to_bits());
    }
}
