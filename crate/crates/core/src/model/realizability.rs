//! Sufficient conditions for realizing a labeled graph.
//!
//! A rejection only means the sufficient conditions fail at some vertex; it is
//! not a proof that no realization exists.

use std::fmt;

use serde::Serialize;

use super::graph::LabeledGraph;
use super::label::odd_count;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// Local extremum with an odd number of incident odd-chi edges.
    ExtremumParity { odd_edges: usize },
    /// Non-extremum vertex where (odd-chi edges below) - (odd-chi edges above) is odd.
    SaddleParity { below: usize, above: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexDiagnostic {
    pub vertex: usize,
    pub name: String,
    pub violation: Violation,
}

impl fmt::Display for VertexDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.violation {
            Violation::ExtremumParity { odd_edges } => write!(
                f,
                "vertex `{}`: local extremum with {odd_edges} incident odd-chi edges (must be even)",
                self.name
            ),
            Violation::SaddleParity { below, above } => write!(
                f,
                "vertex `{}`: {below} odd-chi edges below minus {above} above is odd",
                self.name
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Realizability {
    /// Every failing vertex, in vertex order.
    pub failures: Vec<VertexDiagnostic>,
}

impl Realizability {
    pub fn accepted(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_realizable(graph: &LabeledGraph) -> Realizability {
    let mut failures = Vec::new();
    for v in 0..graph.vertex_count() {
        let p = graph.vertex_profile(v).expect("vertex in range");
        let violation = if p.is_extremum {
            let odd = odd_count(p.up.iter().chain(&p.down));
            (odd % 2 != 0).then_some(Violation::ExtremumParity { odd_edges: odd })
        } else {
            // edges below v are the ones where g restricted to the edge peaks at v
            let below = odd_count(&p.down);
            let above = odd_count(&p.up);
            ((below + above) % 2 != 0).then_some(Violation::SaddleParity { below, above })
        };
        if let Some(violation) = violation {
            failures.push(VertexDiagnostic {
                vertex: v,
                name: graph.vertices()[v].name.clone(),
                violation,
            });
        }
    }
    Realizability { failures }
}
