//! On-disk formats: the decomposition spec file, value vectors (radii,
//! prescribed curvatures), and the trajectory CSV.
//!
//! A decomposition file is a JSON document:
//!
//! ```json
//! {
//!   "format": "simple",
//!   "vertex_count": 4,
//!   "faces": [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
//!   "weights": { "0": "pi/3", "1": "pi/3", "2": "pi/3",
//!                "3": "pi/3", "4": "pi/3", "5": "pi/3" }
//! }
//! ```
//!
//! * `format: "simple"` — `faces` are cyclic vertex sequences; edges are
//!   auto-paired from opposite directed vertex pairs and numbered in order
//!   of first appearance (faces in file order, slots in cyclic order).
//!   Loops and parallel edges are rejected here.
//! * `format: "general"` — `faces` are cyclic half-edge sequences and
//!   `twins[e]` lists the two half-edges of edge `e`. Vertices are derived
//!   from the identification; `vertex_count` cross-checks it.
//!
//! `weights` is keyed by decimal edge id and must cover every edge exactly
//! once. Values are either JSON numbers (radians) or strings of the form
//! `"pi"`, `"pi/3"`, `"3pi/4"` evaluated to the nearest double.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use circleflow_core::complex::{DecompositionInput, WeightedComplex};
use circleflow_core::flow::TrajectorySample;
use serde::{Deserialize, Serialize};

/// Input format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatKind {
    /// Faces as vertex cycles, edges auto-paired.
    Simple,
    /// Faces as half-edge cycles with an explicit twin table.
    General,
}

/// A weight entry: plain radians or a symbolic fraction of pi.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightValue {
    /// Radians as a JSON number.
    Number(f64),
    /// `"pi"`, `"pi/3"`, `"3pi/4"`, ...
    Symbolic(String),
}

impl WeightValue {
    /// Evaluates to radians.
    pub fn to_radians(&self) -> Result<f64> {
        match self {
            WeightValue::Number(x) => Ok(*x),
            WeightValue::Symbolic(s) => parse_pi_fraction(s),
        }
    }
}

/// Parses `[k]pi[/d]` with positive integers `k`, `d` to `k·π/d`.
pub fn parse_pi_fraction(s: &str) -> Result<f64> {
    let t = s.trim();
    let Some(at) = t.find("pi") else {
        bail!("weight string '{s}' must contain 'pi' (e.g. \"pi/3\", \"3pi/4\")");
    };
    let (num_part, rest) = t.split_at(at);
    let rest = &rest[2..];
    let k: f64 = if num_part.is_empty() {
        1.0
    } else {
        let k: u64 = num_part
            .parse()
            .with_context(|| format!("bad numerator in weight string '{s}'"))?;
        k as f64
    };
    let d: f64 = if rest.is_empty() {
        1.0
    } else {
        let Some(den) = rest.strip_prefix('/') else {
            bail!("unexpected trailing '{rest}' in weight string '{s}'");
        };
        let d: u64 = den
            .parse()
            .with_context(|| format!("bad denominator in weight string '{s}'"))?;
        if d == 0 {
            bail!("zero denominator in weight string '{s}'");
        }
        d as f64
    };
    Ok(k * std::f64::consts::PI / d)
}

/// The decomposition spec document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    /// Input format selector.
    pub format: FormatKind,
    /// Number of primal vertices.
    pub vertex_count: usize,
    /// Faces (vertex cycles in the simple format, half-edge cycles in the
    /// general format).
    pub faces: Vec<Vec<usize>>,
    /// Twin table, general format only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twins: Option<Vec<[usize; 2]>>,
    /// Optional explicit origin vertex per half-edge (general format); when
    /// absent, vertices are numbered by smallest half-edge id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origins: Option<Vec<usize>>,
    /// Per-edge weights keyed by decimal edge id.
    pub weights: BTreeMap<String, WeightValue>,
}

impl DecompositionFile {
    /// Reads and parses a spec file.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let file: DecompositionFile = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse {}", path.display()))?;
        Ok(file)
    }

    /// Converts the weight map into a dense vector indexed by edge id.
    fn weight_vector(&self) -> Result<Vec<f64>> {
        let n = self.weights.len();
        let mut weights = vec![f64::NAN; n];
        for (key, value) in &self.weights {
            let id: usize = key
                .parse()
                .with_context(|| format!("weight key '{key}' is not an edge id"))?;
            if id >= n {
                bail!("weight key '{key}' out of range; keys must cover 0..{n} densely");
            }
            if !weights[id].is_nan() {
                bail!("duplicate weight for edge {id}");
            }
            weights[id] = value.to_radians()?;
        }
        Ok(weights)
    }

    /// Lowers the document into a build description.
    pub fn to_input(&self) -> Result<DecompositionInput> {
        let weights = self.weight_vector()?;
        Ok(match self.format {
            FormatKind::Simple => {
                if self.twins.is_some() || self.origins.is_some() {
                    bail!("'twins' and 'origins' are only meaningful in the general format");
                }
                DecompositionInput::Simple {
                    vertex_count: self.vertex_count,
                    faces: self.faces.clone(),
                    weights,
                }
            }
            FormatKind::General => {
                let twins = self
                    .twins
                    .clone()
                    .context("general format needs a 'twins' table")?;
                DecompositionInput::General {
                    vertex_count: self.vertex_count,
                    faces: self.faces.clone(),
                    twins,
                    weights,
                    origins: self.origins.clone(),
                }
            }
        })
    }

    /// Builds and validates the complex this document describes.
    pub fn build(&self) -> Result<WeightedComplex> {
        let input = self.to_input()?;
        WeightedComplex::build(&input).map_err(|e| anyhow::anyhow!("invalid decomposition: {e}"))
    }
}

/// Canonical general-format document for a built complex. Parsing the
/// result reproduces the complex with identical ids, so
/// parse → serialize → parse is the identity.
pub fn canonical_file(complex: &WeightedComplex) -> DecompositionFile {
    let faces = complex
        .faces()
        .iter()
        .map(|f| f.boundary.iter().map(|h| h.0).collect())
        .collect();
    let twins = complex
        .edges()
        .iter()
        .map(|e| [e.half_edges[0].0, e.half_edges[1].0])
        .collect();
    let weights = complex
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (i.to_string(), WeightValue::Number(e.weight)))
        .collect();
    let origins = complex.half_edges().iter().map(|h| h.origin.0).collect();
    DecompositionFile {
        format: FormatKind::General,
        vertex_count: complex.vertex_count(),
        faces,
        twins: Some(twins),
        origins: Some(origins),
        weights,
    }
}

/// A vector of per-vertex values (radii or prescribed curvatures).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesFile {
    /// The values, one per vertex, in vertex-id order.
    pub values: Vec<WeightValue>,
}

impl ValuesFile {
    /// Reads and evaluates a values file.
    pub fn read(path: &Path) -> Result<Vec<f64>> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let file: ValuesFile = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse {}", path.display()))?;
        file.values.iter().map(WeightValue::to_radians).collect()
    }
}

/// Writes the trajectory CSV: `t, r_1..r_N, gap_supnorm, conserved_sum`,
/// one row per sample, values in shortest round-trip form.
pub fn trajectory_csv(n: usize, samples: &[TrajectorySample]) -> String {
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",r_{i}");
    }
    out.push_str(",gap_supnorm,conserved_sum\n");
    for s in samples {
        let _ = write!(out, "{}", s.time);
        for r in &s.radii {
            let _ = write!(out, ",{r}");
        }
        let _ = writeln!(out, ",{},{}", s.gap_sup_norm, s.conserved_sum);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pi_fractions_parse_exactly() {
        assert_eq!(parse_pi_fraction("pi").unwrap(), PI);
        assert_eq!(parse_pi_fraction("pi/3").unwrap(), PI / 3.0);
        assert_eq!(parse_pi_fraction("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_pi_fraction(" 2pi ").unwrap(), 2.0 * PI);
        assert!(parse_pi_fraction("tau/2").is_err());
        assert!(parse_pi_fraction("pi/0").is_err());
        assert!(parse_pi_fraction("pix").is_err());
        assert!(parse_pi_fraction("-pi/3").is_err());
    }

    #[test]
    fn weight_map_must_be_dense() {
        let json = r#"{
            "format": "general",
            "vertex_count": 1,
            "faces": [[0, 1, 2, 3]],
            "twins": [[0, 2], [1, 3]],
            "weights": { "0": "pi/2", "2": "pi/2" }
        }"#;
        let file: DecompositionFile = serde_json::from_str(json).unwrap();
        assert!(file.to_input().is_err());
    }

    fn assert_identical(c1: &WeightedComplex, c2: &WeightedComplex) {
        assert_eq!(c1.vertex_count(), c2.vertex_count());
        assert_eq!(c1.edge_count(), c2.edge_count());
        assert_eq!(c1.face_count(), c2.face_count());
        for (a, b) in c1.half_edges().iter().zip(c2.half_edges()) {
            assert_eq!(a.origin, b.origin);
            assert_eq!(a.twin, b.twin);
            assert_eq!(a.next, b.next);
            assert_eq!(a.edge, b.edge);
            assert_eq!(a.face, b.face);
        }
        for (a, b) in c1.edges().iter().zip(c2.edges()) {
            assert_eq!(a.weight.to_bits(), b.weight.to_bits());
        }
    }

    #[test]
    fn canonical_roundtrip_is_identity() {
        let json = r#"{
            "format": "simple",
            "vertex_count": 4,
            "faces": [[0,1,2],[0,2,3],[0,3,1],[1,3,2]],
            "weights": {"0":"pi/3","1":"pi/3","2":"pi/3","3":"pi/3","4":"pi/3","5":"pi/3"}
        }"#;
        let file: DecompositionFile = serde_json::from_str(json).unwrap();
        let c1 = file.build().unwrap();
        let text = serde_json::to_string(&canonical_file(&c1)).unwrap();
        let c2: WeightedComplex = serde_json::from_str::<DecompositionFile>(&text)
            .unwrap()
            .build()
            .unwrap();
        assert_identical(&c1, &c2);
    }

    #[test]
    fn canonical_roundtrip_preserves_scrambled_vertex_ids() {
        // Vertex numbering deliberately not in first-appearance order; the
        // explicit origins field must carry it through.
        let json = r#"{
            "format": "simple",
            "vertex_count": 4,
            "faces": [[3,2,1],[3,1,0],[3,0,2],[2,0,1]],
            "weights": {"0":"pi/3","1":"pi/3","2":"pi/3","3":"pi/3","4":"pi/3","5":"pi/3"}
        }"#;
        let file: DecompositionFile = serde_json::from_str(json).unwrap();
        let c1 = file.build().unwrap();
        let text = serde_json::to_string(&canonical_file(&c1)).unwrap();
        let c2 = serde_json::from_str::<DecompositionFile>(&text)
            .unwrap()
            .build()
            .unwrap();
        assert_identical(&c1, &c2);
        // And serialization is already stable after one round.
        let text2 = serde_json::to_string(&canonical_file(&c2)).unwrap();
        assert_eq!(text, text2);
    }
}
