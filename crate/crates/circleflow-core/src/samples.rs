//! Parametric families of weighted decompositions.
//!
//! Each family exposes a weight parametrization under which the per-face
//! weight-sum condition reduces to a single linear constraint, which makes
//! the families convenient for randomized testing:
//!
//! * [`tetrahedron`] — sphere; condition holds iff `a + b + c = π`, and
//!   every vertex character equals `a + b + c`.
//! * [`grid_torus`] — torus; condition holds iff `a + b + c = π`, and every
//!   vertex character equals `2(a + b + c)`.
//! * [`polygon_quotient`] — genus `g ≥ 1` one-vertex quotient of a `4g`-gon;
//!   condition holds iff the weights sum to `(2g - 1)π`, and the single
//!   character equals twice that sum.

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::DecompositionInput;

/// The tetrahedron with weights constant on opposite edge pairs.
///
/// Faces carry one edge of each class `a`, `b`, `c`, so the face condition
/// holds exactly when `a + b + c = π`. Edge classes in first-appearance
/// order are `[a, c, b, a, c, b]`.
pub fn tetrahedron(class_weights: [f64; 3]) -> DecompositionInput {
    let [a, b, c] = class_weights;
    // {0,1}={2,3}=a, {0,2}={1,3}=b, {0,3}={1,2}=c; ids by first appearance:
    // face 0 introduces {0,1}, {1,2}, {2,0} -> a, c, b
    // face 1 introduces {2,3}, {3,0}       -> a, c
    // face 2 introduces {3,1}              -> b
    DecompositionInput::Simple {
        vertex_count: 4,
        faces: vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1], vec![1, 3, 2]],
        weights: vec![a, c, b, a, c, b],
    }
}

/// An `n × m` grid torus triangulation (`n, m ≥ 3`), with weights constant
/// on the three edge direction classes: horizontal `a`, vertical `b`,
/// diagonal `c`.
///
/// Every triangle carries one edge of each class, so the face condition
/// holds exactly when `a + b + c = π`. Every vertex has degree 6 with two
/// edges of each class, so every character equals `2(a + b + c)`.
///
/// Panics if `n < 3` or `m < 3` (smaller grids fold onto parallel edges,
/// which the simple format rejects).
pub fn grid_torus(n: usize, m: usize, class_weights: [f64; 3]) -> DecompositionInput {
    assert!(n >= 3 && m >= 3, "grid torus needs n, m >= 3");
    let [a, b, c] = class_weights;
    let v = |i: usize, j: usize| (i % n) * m + (j % m);

    let mut faces = Vec::with_capacity(2 * n * m);
    for i in 0..n {
        for j in 0..m {
            // Cell (i,j) splits along its diagonal into two triangles.
            faces.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            faces.push(vec![v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }

    // Edge ids follow first appearance; classify each by direction instead
    // of tracking the scan order by hand.
    let mut weights = Vec::with_capacity(3 * n * m);
    let mut seen: Vec<(usize, usize)> = Vec::new();
    for cycle in &faces {
        for (si, &p) in cycle.iter().enumerate() {
            let q = cycle[(si + 1) % cycle.len()];
            let key = (p.min(q), p.max(q));
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let (pi, pj) = (p / m, p % m);
            let (qi, qj) = (q / m, q % m);
            let di = (qi + n - pi) % n;
            let dj = (qj + m - pj) % m;
            // One endpoint is the cell corner, so steps are 0 or +/-1.
            let horizontal = dj == 0;
            let vertical = di == 0;
            weights.push(if horizontal {
                a
            } else if vertical {
                b
            } else {
                c
            });
        }
    }

    DecompositionInput::Simple {
        vertex_count: n * m,
        faces,
        weights,
    }
}

/// The one-vertex quotient of a `4g`-gon with the standard identification
/// `a₁ b₁ a₁⁻¹ b₁⁻¹ ⋯ a_g b_g a_g⁻¹ b_g⁻¹`, a closed surface of genus `g`.
///
/// `weights` has length `2g` (one per identified edge pair); the single
/// face has boundary length `4g`, so the face condition holds exactly when
/// the weights sum to `(2g - 1)π`. Panics if `g == 0` or if the weight
/// count is not `2g`.
pub fn polygon_quotient(genus: usize, weights: &[f64]) -> DecompositionInput {
    assert!(genus >= 1, "polygon quotient needs genus >= 1");
    assert_eq!(weights.len(), 2 * genus, "need one weight per edge pair");
    let sides = 4 * genus;
    // Boundary slots 4k..4k+3 read a_k, b_k, a_k^-1, b_k^-1.
    let mut twins = Vec::with_capacity(2 * genus);
    for k in 0..genus {
        twins.push([4 * k, 4 * k + 2]);
        twins.push([4 * k + 1, 4 * k + 3]);
    }
    DecompositionInput::General {
        vertex_count: 1,
        faces: vec![(0..sides).collect()],
        twins,
        weights: weights.to_vec(),
        origins: None,
    }
}
