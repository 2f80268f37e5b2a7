use serde::Serialize;
use serde_json::{json, Value};

use crate::poly::Poly;

/// One step of a stable-equivalence trail. Variable indices refer to the
/// ring of the germ the reduction started from; `ring` lists, in order, the
/// variables of the ring a step acts on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStep {
    AddSquare {
        var: usize,
    },
    RemoveSquarePair {
        x: usize,
        z: usize,
    },
    /// Change of coordinates with linear components; `note` says what it
    /// achieves.
    LinearChange {
        ring: Vec<usize>,
        map: Vec<Poly>,
        note: String,
    },
    /// Polynomial change of coordinates `v -> map(v)` with an inverse that
    /// was checked by composition, exactly when `verified_degree` is `None`
    /// and modulo terms above that degree otherwise.
    PolynomialChange {
        ring: Vec<usize>,
        map: Vec<Poly>,
        inverse: Vec<Poly>,
        verified_degree: Option<u32>,
    },
    /// A run of the iterative splitting decomposition.
    Splitting {
        ring: Vec<usize>,
        pairing: Vec<(usize, usize)>,
        iterations: usize,
        remainder_order: Option<u32>,
        /// Order of the part set aside beyond the determinacy degree.
        discarded_order: Option<u32>,
    },
    /// The pairs `x_j z_j` become `u_j^2 + v_j^2` under `x_j = u_j + i v_j`,
    /// `z_j = u_j - i v_j`.
    HyperbolicToDiagonal {
        pairs: Vec<(usize, usize)>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StableEquivalenceTrace {
    pub steps: Vec<TraceStep>,
}

impl StableEquivalenceTrace {
    pub fn push(&mut self, step: TraceStep) {
        self.steps.push(step);
    }

    pub fn extend(&mut self, other: StableEquivalenceTrace) {
        self.steps.extend(other.steps);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn removed_pairs(&self) -> Vec<(usize, usize)> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                TraceStep::RemoveSquarePair { x, z } => Some((*x, *z)),
                _ => None,
            })
            .collect()
    }

    /// JSON rendering with polynomials printed in the given variable names.
    pub fn to_json(&self, names: &[String]) -> Value {
        let ring_names = |ring: &[usize]| ring.iter().map(|&k| names[k].clone()).collect::<Vec<_>>();
        let polys = |ring: &[usize], ps: &[Poly]| {
            let vs = ring_names(ring);
            ps.iter().map(|p| p.to_text(&vs)).collect::<Vec<_>>()
        };
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| match s {
                TraceStep::AddSquare { var } => json!({"step": "add_square", "var": names[*var]}),
                TraceStep::RemoveSquarePair { x, z } => {
                    json!({"step": "remove_square_pair", "x": names[*x], "z": names[*z]})
                }
                TraceStep::LinearChange { ring, map, note } => json!({
                    "step": "linear_change",
                    "vars": ring_names(ring),
                    "map": polys(ring, map),
                    "note": note,
                }),
                TraceStep::PolynomialChange { ring, map, inverse, verified_degree } => json!({
                    "step": "polynomial_change",
                    "vars": ring_names(ring),
                    "map": polys(ring, map),
                    "inverse": polys(ring, inverse),
                    "inverse_verified": match verified_degree {
                        None => json!("exact"),
                        Some(d) => json!(format!("modulo degree > {d}")),
                    },
                }),
                TraceStep::Splitting { ring, pairing, iterations, remainder_order, discarded_order } => json!({
                    "step": "splitting",
                    "vars": ring_names(ring),
                    "pairing": pairing.iter().map(|(x, z)| [names[*x].clone(), names[*z].clone()]).collect::<Vec<_>>(),
                    "iterations": iterations,
                    "remainder_order": remainder_order,
                    "discarded_order": discarded_order,
                }),
                TraceStep::HyperbolicToDiagonal { pairs } => json!({
                    "step": "hyperbolic_to_diagonal",
                    "pairing": pairs.iter().map(|(x, z)| [names[*x].clone(), names[*z].clone()]).collect::<Vec<_>>(),
                }),
            })
            .collect();
        Value::Array(steps)
    }
}

/// Summary of one state reached by the splitting iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateSummary {
    pub m: usize,
    pub remainder_order: Option<u32>,
    pub remainder_weighted_order: Option<String>,
    pub reconstruction_ok: bool,
    pub bounds_ok: bool,
}
