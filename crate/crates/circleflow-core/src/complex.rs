//! Weighted cellular decompositions of closed oriented surfaces.
//!
//! # Structure
//!
//! The decomposition is stored as a half-edge structure. Every undirected
//! edge is a pair of directed **half-edges** (twins); each half-edge carries
//!
//! * `origin` — the vertex it leaves from
//! * `twin`   — the opposite half-edge (same edge, opposite direction)
//! * `next`   — the next half-edge around the same face
//! * `edge`   — the undirected parent edge (which carries the weight)
//! * `face`   — the face whose boundary the half-edge lies on
//!
//! Loops and parallel edges are first class: one-vertex polygon quotients
//! (the genus-2 octagon, for instance) need both.
//!
//! # Input formats
//!
//! [`DecompositionInput::Simple`] lists faces as cyclic vertex sequences and
//! auto-pairs opposite directed vertex pairs into edges. It rejects loops
//! and parallel edges, whose pairing would be ambiguous. Edge ids are
//! assigned in order of first appearance, scanning faces in order and each
//! boundary in cyclic order.
//!
//! [`DecompositionInput::General`] lists faces as cyclic sequences of
//! half-edge ids together with an explicit twin pairing; edge `e` consists
//! of the two half-edges `twins[e]`. Vertices are derived as the orbits of
//! `h ↦ next(twin(h))` and numbered by their smallest half-edge id, so a
//! declared `vertex_count` cross-checks the intended identification.
//!
//! All indices, and hence the derived triangulation, are deterministic
//! functions of the input.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::math::NeumaierSum;

// ---------------------------------------------------------------------------
// Index types
// ---------------------------------------------------------------------------

/// Index of a primal vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

/// Index of a directed half-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdgeId(pub usize);

/// Index of an undirected weighted edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

/// Index of a 2-cell. Doubles as the index of the star vertex placed in
/// that 2-cell by [`WeightedComplex::triangulate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

/// A directed half-edge record.
#[derive(Clone, Debug)]
pub struct HalfEdge {
    /// Vertex this half-edge leaves from.
    pub origin: VertexId,
    /// The other half-edge of the same undirected edge.
    pub twin: HalfEdgeId,
    /// Next half-edge around the same face boundary.
    pub next: HalfEdgeId,
    /// Undirected parent edge.
    pub edge: EdgeId,
    /// Face whose boundary contains this half-edge.
    pub face: FaceId,
}

/// An undirected edge with its exterior intersection angle.
#[derive(Clone, Debug)]
pub struct Edge {
    /// The two half-edges of this edge.
    pub half_edges: [HalfEdgeId; 2],
    /// Exterior intersection angle, strictly inside `(0, π)`.
    pub weight: f64,
}

/// A 2-cell given by its cyclic boundary of half-edges.
#[derive(Clone, Debug)]
pub struct Face {
    /// Boundary half-edges in cyclic order; `len() == m ≥ 1`.
    pub boundary: Vec<HalfEdgeId>,
}

// ---------------------------------------------------------------------------
// Build input
// ---------------------------------------------------------------------------

/// Description of a decomposition, ready to be validated and built.
///
/// `weights` is indexed by edge id in both formats (see the module docs for
/// how edge ids are assigned in the simple format).
#[derive(Clone, Debug)]
pub enum DecompositionInput {
    /// Faces as cyclic vertex sequences; edges auto-paired by matching
    /// opposite directed vertex pairs. Rejects loops and parallel edges.
    Simple {
        /// Number of primal vertices.
        vertex_count: usize,
        /// Each face as a cyclic vertex sequence.
        faces: Vec<Vec<usize>>,
        /// Per-edge weight in `(0, π)`, indexed by edge id.
        weights: Vec<f64>,
    },
    /// Faces as cyclic sequences of half-edge ids plus an explicit twin
    /// pairing; vertices are derived from the identification.
    General {
        /// Declared number of primal vertices (checked against the orbits).
        vertex_count: usize,
        /// Each face as a cyclic sequence of half-edge ids.
        faces: Vec<Vec<usize>>,
        /// `twins[e]` are the two half-edge ids forming edge `e`.
        twins: Vec<[usize; 2]>,
        /// Per-edge weight in `(0, π)`, indexed by edge id.
        weights: Vec<f64>,
        /// Optional explicit origin vertex per half-edge. When absent,
        /// vertices are numbered by their smallest half-edge id; when
        /// present, the labels must be constant on each derived orbit so
        /// a caller-chosen numbering survives a round-trip.
        origins: Option<Vec<usize>>,
    },
}

/// Structural errors raised while building a [`WeightedComplex`].
#[derive(Clone, Debug, PartialEq)]
pub enum BuildError {
    /// No faces, no vertices, or an empty face boundary.
    Empty,
    /// A face references a vertex id `>= vertex_count`.
    VertexOutOfRange {
        /// Offending face index.
        face: usize,
        /// Offending vertex id.
        vertex: usize,
    },
    /// A face references a half-edge id outside the twin table.
    HalfEdgeOutOfRange {
        /// Offending face index.
        face: usize,
        /// Offending half-edge id.
        half_edge: usize,
    },
    /// Simple format: a boundary step starts and ends at the same vertex.
    LoopNeedsGeneralFormat {
        /// Offending face index.
        face: usize,
        /// The repeated vertex.
        vertex: usize,
    },
    /// Simple format: more than one undirected edge joins the same vertex
    /// pair, so auto-pairing is ambiguous.
    AmbiguousAutoPairing {
        /// One endpoint.
        a: usize,
        /// Other endpoint.
        b: usize,
    },
    /// Two faces traverse the same directed vertex pair.
    InconsistentOrientation {
        /// Tail of the repeated directed pair.
        from: usize,
        /// Head of the repeated directed pair.
        to: usize,
    },
    /// An edge lies on a number of face boundary slots different from two,
    /// so the complex is not a closed surface.
    NonManifoldEdge {
        /// One endpoint.
        a: usize,
        /// Other endpoint.
        b: usize,
        /// Number of boundary slots using the edge.
        slots: usize,
    },
    /// General format: a half-edge appears in no face boundary or in more
    /// than one slot.
    HalfEdgeSlotCount {
        /// Offending half-edge id.
        half_edge: usize,
        /// Number of boundary slots using it.
        slots: usize,
    },
    /// General format: a half-edge appears in the twin table a number of
    /// times different from one.
    TwinTableMisuse {
        /// Offending half-edge id.
        half_edge: usize,
    },
    /// General format: an edge pairs a half-edge with itself.
    TwinFixedPoint {
        /// Offending half-edge id.
        half_edge: usize,
    },
    /// `weights.len()` does not match the number of edges.
    WeightCountMismatch {
        /// Number of edges in the decomposition.
        edges: usize,
        /// Number of weights supplied.
        weights: usize,
    },
    /// A weight lies outside the open interval `(0, π)`.
    WeightOutOfRange {
        /// Offending edge id.
        edge: usize,
        /// Its weight.
        weight: f64,
    },
    /// The surface is not connected.
    Disconnected,
    /// A declared vertex appears in no face boundary.
    IsolatedVertex {
        /// Offending vertex id.
        vertex: usize,
    },
    /// General format: the declared vertex count differs from the number of
    /// orbits of `h ↦ next(twin(h))`.
    VertexCountMismatch {
        /// Declared count.
        declared: usize,
        /// Count derived from the identification.
        derived: usize,
    },
    /// General format: explicit origin labels disagree with the vertex
    /// orbits of the identification.
    OriginLabelsInvalid {
        /// A half-edge exhibiting the disagreement.
        half_edge: usize,
    },
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Empty => write!(f, "decomposition has no faces or no vertices"),
            BuildError::VertexOutOfRange { face, vertex } => {
                write!(f, "face {face} references vertex {vertex} out of range")
            }
            BuildError::HalfEdgeOutOfRange { face, half_edge } => {
                write!(f, "face {face} references half-edge {half_edge} out of range")
            }
            BuildError::LoopNeedsGeneralFormat { face, vertex } => write!(
                f,
                "face {face} has a loop at vertex {vertex}; loops need the general format"
            ),
            BuildError::AmbiguousAutoPairing { a, b } => write!(
                f,
                "parallel edges between vertices {a} and {b}; auto-pairing is ambiguous, use the general format"
            ),
            BuildError::InconsistentOrientation { from, to } => write!(
                f,
                "directed pair {from}->{to} traversed by two faces; face orientations are inconsistent"
            ),
            BuildError::NonManifoldEdge { a, b, slots } => write!(
                f,
                "edge {{{a},{b}}} lies on {slots} face boundary slots, expected exactly 2"
            ),
            BuildError::HalfEdgeSlotCount { half_edge, slots } => write!(
                f,
                "half-edge {half_edge} appears in {slots} boundary slots, expected exactly 1"
            ),
            BuildError::TwinTableMisuse { half_edge } => write!(
                f,
                "half-edge {half_edge} must appear exactly once in the twin table"
            ),
            BuildError::TwinFixedPoint { half_edge } => {
                write!(f, "half-edge {half_edge} is paired with itself")
            }
            BuildError::WeightCountMismatch { edges, weights } => {
                write!(f, "{edges} edges but {weights} weights supplied")
            }
            BuildError::WeightOutOfRange { edge, weight } => {
                write!(f, "weight {weight} on edge {edge} is outside (0, pi)")
            }
            BuildError::Disconnected => write!(f, "the surface is not connected"),
            BuildError::IsolatedVertex { vertex } => {
                write!(f, "vertex {vertex} appears in no face boundary")
            }
            BuildError::VertexCountMismatch { declared, derived } => write!(
                f,
                "declared {declared} vertices but the identification yields {derived}"
            ),
            BuildError::OriginLabelsInvalid { half_edge } => write!(
                f,
                "origin labels disagree with the half-edge identification at half-edge {half_edge}"
            ),
        }
    }
}

impl core::error::Error for BuildError {}

// ---------------------------------------------------------------------------
// The complex
// ---------------------------------------------------------------------------

/// A validated weighted cellular decomposition of a closed oriented surface.
///
/// Immutable after construction; all methods are pure, so shared references
/// can be used freely across threads.
#[derive(Clone, Debug)]
pub struct WeightedComplex {
    vertex_count: usize,
    half_edges: Vec<HalfEdge>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
}

impl WeightedComplex {
    /// Validates `input` and builds the complex.
    pub fn build(input: &DecompositionInput) -> Result<Self, BuildError> {
        let complex = match input {
            DecompositionInput::Simple {
                vertex_count,
                faces,
                weights,
            } => Self::build_simple(*vertex_count, faces, weights)?,
            DecompositionInput::General {
                vertex_count,
                faces,
                twins,
                weights,
                origins,
            } => Self::build_general(*vertex_count, faces, twins, weights, origins.as_deref())?,
        };
        complex.check_connected()?;
        Ok(complex)
    }

    fn build_simple(
        vertex_count: usize,
        face_cycles: &[Vec<usize>],
        weights: &[f64],
    ) -> Result<Self, BuildError> {
        if vertex_count == 0 || face_cycles.is_empty() || face_cycles.iter().any(Vec::is_empty) {
            return Err(BuildError::Empty);
        }

        // Directed pairs in slot order; half-edge id == global slot index.
        let mut directed: Vec<(usize, usize)> = Vec::new();
        let mut face_of: Vec<usize> = Vec::new();
        let mut next: Vec<usize> = Vec::new();
        let mut boundaries: Vec<Vec<usize>> = Vec::with_capacity(face_cycles.len());
        for (fi, cycle) in face_cycles.iter().enumerate() {
            let first = directed.len();
            let m = cycle.len();
            for (si, &v) in cycle.iter().enumerate() {
                if v >= vertex_count {
                    return Err(BuildError::VertexOutOfRange { face: fi, vertex: v });
                }
                let w = cycle[(si + 1) % m];
                if v == w {
                    return Err(BuildError::LoopNeedsGeneralFormat { face: fi, vertex: v });
                }
                directed.push((v, w));
                face_of.push(fi);
                next.push(first + (si + 1) % m);
            }
            boundaries.push((first..first + m).collect());
        }

        // Diagnose pairing failures before committing to edge ids.
        let count_of = |pair: (usize, usize)| directed.iter().filter(|&&p| p == pair).count();
        for &(a, b) in &directed {
            let fwd = count_of((a, b));
            let rev = count_of((b, a));
            match (fwd, rev) {
                (1, 1) => {}
                (2, 0) => return Err(BuildError::InconsistentOrientation { from: a, to: b }),
                (f, r) if f == r => return Err(BuildError::AmbiguousAutoPairing { a, b }),
                (f, r) => {
                    return Err(BuildError::NonManifoldEdge { a, b, slots: f + r });
                }
            }
        }

        // Pair (v, w) with (w, v); assign edge ids by first appearance.
        let h_total = directed.len();
        let mut twin = vec![usize::MAX; h_total];
        let mut edge_of = vec![usize::MAX; h_total];
        let mut edges: Vec<Edge> = Vec::new();
        for h in 0..h_total {
            if edge_of[h] != usize::MAX {
                continue;
            }
            let (v, w) = directed[h];
            // Unique by the occurrence check above.
            let mate = directed
                .iter()
                .position(|&p| p == (w, v))
                .expect("reverse pair exists");
            twin[h] = mate;
            twin[mate] = h;
            let id = edges.len();
            edge_of[h] = id;
            edge_of[mate] = id;
            edges.push(Edge {
                half_edges: [HalfEdgeId(h), HalfEdgeId(mate)],
                weight: f64::NAN,
            });
        }

        let origin: Vec<usize> = directed.iter().map(|&(v, _)| v).collect();
        Self::finish(
            vertex_count,
            &origin,
            &twin,
            &next,
            &face_of,
            &edge_of,
            boundaries,
            edges,
            weights,
        )
    }

    fn build_general(
        vertex_count: usize,
        face_cycles: &[Vec<usize>],
        twins: &[[usize; 2]],
        weights: &[f64],
        origin_labels: Option<&[usize]>,
    ) -> Result<Self, BuildError> {
        if vertex_count == 0
            || face_cycles.is_empty()
            || face_cycles.iter().any(Vec::is_empty)
            || twins.is_empty()
        {
            return Err(BuildError::Empty);
        }
        let h_total = 2 * twins.len();

        // Twin table: an involution without fixed points covering 0..h_total.
        let mut twin = vec![usize::MAX; h_total];
        let mut edge_of = vec![usize::MAX; h_total];
        let mut edges: Vec<Edge> = Vec::with_capacity(twins.len());
        for (eid, &[h0, h1]) in twins.iter().enumerate() {
            if h0 == h1 {
                return Err(BuildError::TwinFixedPoint { half_edge: h0 });
            }
            for &h in &[h0, h1] {
                if h >= h_total || edge_of[h] != usize::MAX {
                    return Err(BuildError::TwinTableMisuse { half_edge: h });
                }
                edge_of[h] = eid;
            }
            twin[h0] = h1;
            twin[h1] = h0;
            edges.push(Edge {
                half_edges: [HalfEdgeId(h0), HalfEdgeId(h1)],
                weight: f64::NAN,
            });
        }

        // Every half-edge in exactly one face boundary slot.
        let mut slot_count = vec![0usize; h_total];
        for (fi, cycle) in face_cycles.iter().enumerate() {
            for &h in cycle {
                if h >= h_total {
                    return Err(BuildError::HalfEdgeOutOfRange { face: fi, half_edge: h });
                }
                slot_count[h] += 1;
            }
        }
        if let Some(h) = slot_count.iter().position(|&c| c != 1) {
            return Err(BuildError::HalfEdgeSlotCount {
                half_edge: h,
                slots: slot_count[h],
            });
        }

        let mut next = vec![usize::MAX; h_total];
        let mut face_of = vec![usize::MAX; h_total];
        for (fi, cycle) in face_cycles.iter().enumerate() {
            for (si, &h) in cycle.iter().enumerate() {
                next[h] = cycle[(si + 1) % cycle.len()];
                face_of[h] = fi;
            }
        }

        // Vertices are the orbits of h -> next(twin(h)), numbered by their
        // smallest half-edge id.
        let mut origin = vec![usize::MAX; h_total];
        let mut derived = 0usize;
        for h0 in 0..h_total {
            if origin[h0] != usize::MAX {
                continue;
            }
            let v = derived;
            derived += 1;
            let mut h = h0;
            loop {
                origin[h] = v;
                h = next[twin[h]];
                if h == h0 {
                    break;
                }
            }
        }
        if derived != vertex_count {
            return Err(BuildError::VertexCountMismatch {
                declared: vertex_count,
                derived,
            });
        }

        // Explicit labels, when given, must induce exactly the orbit
        // partition; then they replace the smallest-half-edge numbering.
        if let Some(labels) = origin_labels {
            if labels.len() != h_total {
                return Err(BuildError::OriginLabelsInvalid {
                    half_edge: labels.len().min(h_total),
                });
            }
            let mut label_of_orbit = vec![usize::MAX; vertex_count];
            let mut orbit_of_label = vec![usize::MAX; vertex_count];
            for h in 0..h_total {
                let label = labels[h];
                if label >= vertex_count {
                    return Err(BuildError::OriginLabelsInvalid { half_edge: h });
                }
                let orbit = origin[h];
                if label_of_orbit[orbit] == usize::MAX {
                    if orbit_of_label[label] != usize::MAX {
                        return Err(BuildError::OriginLabelsInvalid { half_edge: h });
                    }
                    label_of_orbit[orbit] = label;
                    orbit_of_label[label] = orbit;
                } else if label_of_orbit[orbit] != label {
                    return Err(BuildError::OriginLabelsInvalid { half_edge: h });
                }
            }
            for slot in origin.iter_mut() {
                *slot = label_of_orbit[*slot];
            }
        }

        Self::finish(
            vertex_count,
            &origin,
            &twin,
            &next,
            &face_of,
            &edge_of,
            face_cycles.to_vec(),
            edges,
            weights,
        )
    }

    /// Shared tail of both builders: attach weights, materialize records,
    /// and reject isolated vertices. All slices are indexed by half-edge id.
    #[allow(clippy::too_many_arguments)]
    fn finish(
        vertex_count: usize,
        origin: &[usize],
        twin: &[usize],
        next: &[usize],
        face_of: &[usize],
        edge_of: &[usize],
        boundaries: Vec<Vec<usize>>,
        mut edges: Vec<Edge>,
        weights: &[f64],
    ) -> Result<Self, BuildError> {
        if weights.len() != edges.len() {
            return Err(BuildError::WeightCountMismatch {
                edges: edges.len(),
                weights: weights.len(),
            });
        }
        for (eid, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w < PI) {
                return Err(BuildError::WeightOutOfRange { edge: eid, weight: w });
            }
            edges[eid].weight = w;
        }

        let half_edges: Vec<HalfEdge> = (0..origin.len())
            .map(|h| HalfEdge {
                origin: VertexId(origin[h]),
                twin: HalfEdgeId(twin[h]),
                next: HalfEdgeId(next[h]),
                edge: EdgeId(edge_of[h]),
                face: FaceId(face_of[h]),
            })
            .collect();

        let faces: Vec<Face> = boundaries
            .into_iter()
            .map(|b| Face {
                boundary: b.into_iter().map(HalfEdgeId).collect(),
            })
            .collect();

        let mut isolated = vec![true; vertex_count];
        for he in &half_edges {
            isolated[he.origin.0] = false;
        }
        if let Some(v) = isolated.iter().position(|&i| i) {
            return Err(BuildError::IsolatedVertex { vertex: v });
        }

        Ok(Self {
            vertex_count,
            half_edges,
            edges,
            faces,
        })
    }

    /// The surface is connected iff all half-edges lie in one orbit of
    /// `{twin, next}`.
    fn check_connected(&self) -> Result<(), BuildError> {
        let n = self.half_edges.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(h) = stack.pop() {
            for nb in [self.half_edges[h].twin.0, self.half_edges[h].next.0] {
                if !seen[nb] {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(BuildError::Disconnected)
        }
    }

    // -- accessors ----------------------------------------------------------

    /// Number of primal vertices `N`.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of undirected edges `|E|`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of 2-cells `|F|`.
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// All half-edges, indexed by [`HalfEdgeId`].
    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    /// All edges, indexed by [`EdgeId`].
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// All faces, indexed by [`FaceId`].
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Weight of edge `e`.
    pub fn weight(&self, e: EdgeId) -> f64 {
        self.edges[e.0].weight
    }

    /// Number of half-edges leaving `v` (loops count twice).
    pub fn degree(&self, v: VertexId) -> usize {
        self.half_edges.iter().filter(|h| h.origin == v).count()
    }

    /// Euler characteristic `N - |E| + |F|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Genus of the closed oriented surface, `(2 - χ) / 2`.
    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    // -- combinatorial operations -------------------------------------------

    /// Per-face residuals of the ideal-pattern weight condition: for a face
    /// of boundary length `m`, the boundary weights (one term per slot, so a
    /// doubly-traversed edge counts twice) must sum to `(m - 2)π`.
    pub fn validate_b1(&self) -> B1Report {
        let mut residuals = Vec::with_capacity(self.faces.len());
        let mut pass = true;
        for face in &self.faces {
            let m = face.boundary.len();
            let mut sum = NeumaierSum::new();
            for &h in &face.boundary {
                sum.add(self.weight(self.half_edges[h.0].edge));
            }
            let residual = sum.total() - (m as f64 - 2.0) * PI;
            if crate::math::abs(residual) > B1Report::tolerance(m) {
                pass = false;
            }
            residuals.push(residual);
        }
        B1Report { residuals, pass }
    }

    /// Per-vertex characters: the sum of weights over half-edges leaving
    /// each vertex, so a loop contributes its weight twice. With unit radii
    /// in the Euclidean background this is exactly the cone angle.
    pub fn character(&self) -> CharacterVector {
        let mut sums = vec![NeumaierSum::new(); self.vertex_count];
        for he in &self.half_edges {
            sums[he.origin.0].add(self.edges[he.edge.0].weight);
        }
        let values: Vec<f64> = sums.iter().map(NeumaierSum::total).collect();
        let mut total = NeumaierSum::new();
        for &v in &values {
            total.add(v);
        }
        let average = total.total() / self.vertex_count as f64;
        CharacterVector { values, average }
    }

    /// The star-vertex triangulation: one star vertex per face, one triangle
    /// per half-edge (equivalently per edge-face incidence), `2|E|` in all.
    ///
    /// Triangle order follows half-edge ids, so the result is a
    /// deterministic function of the build input.
    pub fn triangulate(&self) -> Triangulation {
        let triangles = self
            .half_edges
            .iter()
            .map(|he| Triangle {
                edge: he.edge,
                face: he.face,
                corner_i: he.origin,
                corner_j: self.half_edges[he.next.0].origin,
                weight: self.edges[he.edge.0].weight,
            })
            .collect();
        Triangulation {
            triangles,
            vertex_count: self.vertex_count,
            star_vertex_count: self.faces.len(),
            euler_characteristic: self.euler_characteristic(),
        }
    }
}

// ---------------------------------------------------------------------------
// Derived data
// ---------------------------------------------------------------------------

/// Residuals of the per-face weight-sum condition.
#[derive(Clone, Debug)]
pub struct B1Report {
    residuals: Vec<f64>,
    pass: bool,
}

impl B1Report {
    /// Tolerance for a face of boundary length `m`. Weights arrive as
    /// floating point, so the condition is checked to roundoff, scaled by
    /// the number of summands.
    pub fn tolerance(m: usize) -> f64 {
        1e-12 * m as f64
    }

    /// Residual per face: boundary weight sum minus `(m - 2)π`.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Largest residual magnitude.
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, &r| a.max(crate::math::abs(r)))
    }

    /// True iff every face residual is within tolerance.
    pub fn pass(&self) -> bool {
        self.pass
    }
}

/// Per-vertex characters of a weighted decomposition.
#[derive(Clone, Debug)]
pub struct CharacterVector {
    values: Vec<f64>,
    average: f64,
}

impl CharacterVector {
    /// Character values indexed by vertex id.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Character at one vertex.
    pub fn value(&self, v: VertexId) -> f64 {
        self.values[v.0]
    }

    /// Mean character. On complexes passing the per-face weight condition
    /// this equals `2π(1 - χ/N)` to machine precision.
    pub fn average(&self) -> f64 {
        self.average
    }
}

/// One triangle of the star-vertex triangulation. Its corners are the two
/// endpoints of `edge` plus the star vertex of `face`; the star corner
/// carries the angle `π - weight`.
#[derive(Clone, Copy, Debug)]
pub struct Triangle {
    /// The edge whose two-circle configuration realizes this triangle.
    pub edge: EdgeId,
    /// The face providing the star corner.
    pub face: FaceId,
    /// First primal corner (origin of the boundary half-edge).
    pub corner_i: VertexId,
    /// Second primal corner (equals `corner_i` for a loop).
    pub corner_j: VertexId,
    /// Weight of `edge`, cached for geometry kernels.
    pub weight: f64,
}

/// The star-vertex triangulation of a weighted complex.
#[derive(Clone, Debug)]
pub struct Triangulation {
    triangles: Vec<Triangle>,
    vertex_count: usize,
    star_vertex_count: usize,
    euler_characteristic: i64,
}

impl Triangulation {
    /// All `2|E|` triangles in half-edge order.
    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    /// Number of primal vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of star vertices (= number of 2-cells).
    pub fn star_vertex_count(&self) -> usize {
        self.star_vertex_count
    }

    /// Euler characteristic of the underlying surface.
    pub fn euler_characteristic(&self) -> i64 {
        self.euler_characteristic
    }
}
