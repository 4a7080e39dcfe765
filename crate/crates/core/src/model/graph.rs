use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::label::SurfaceLabel;
use crate::error::ParseError;
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub value: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: SurfaceLabel,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Finite connected loop-free multigraph with a good function on its vertices
/// and a surface label on each edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Incident labels of a vertex split by the direction of the far endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexProfile {
    /// Labels of edges whose other endpoint has a larger value.
    pub up: Vec<SurfaceLabel>,
    pub down: Vec<SurfaceLabel>,
    pub is_extremum: bool,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
struct VertexDoc {
    id: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    u: String,
    v: String,
    r: i64,
}

impl LabeledGraph {
    /// Builds a graph and checks every invariant.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, ParseError> {
        let mut seen = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if seen.insert(v.name.clone(), i).is_some() {
                return Err(ParseError::DuplicateVertex(v.name.clone()));
            }
        }
        if edges.is_empty() {
            return Err(ParseError::NoEdges);
        }
        for (i, e) in edges.iter().enumerate() {
            for end in [e.u, e.v] {
                if end >= vertices.len() {
                    return Err(ParseError::UnknownVertex(end.to_string()));
                }
            }
            if e.u == e.v {
                return Err(ParseError::LoopEdge(i, vertices[e.u].name.clone()));
            }
            if vertices[e.u].value == vertices[e.v].value {
                return Err(ParseError::NotGood {
                    index: i,
                    u: vertices[e.u].name.clone(),
                    v: vertices[e.v].name.clone(),
                });
            }
        }
        let graph = LabeledGraph { vertices, edges };
        if !graph.is_connected() {
            return Err(ParseError::Disconnected);
        }
        Ok(graph)
    }

    /// Convenience constructor from integer-free tuples, mainly for tests.
    pub fn from_parts(
        values: &[Rational],
        edges: &[(usize, usize, i64)],
    ) -> Result<Self, ParseError> {
        let vertices = values
            .iter()
            .enumerate()
            .map(|(i, v)| Vertex {
                name: format!("v{i}"),
                value: v.clone(),
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(u, v, r)| Edge {
                u,
                v,
                label: SurfaceLabel(r),
            })
            .collect();
        Self::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn value(&self, v: usize) -> &Rational {
        &self.vertices[v].value
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, &Edge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.u == v || e.v == v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident(v).count()
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_profile(&self, v: usize) -> Option<VertexProfile> {
        if v >= self.vertices.len() {
            return None;
        }
        let mut up = Vec::new();
        let mut down = Vec::new();
        for (_, e) in self.incident(v) {
            if self.value(e.other(v)) > self.value(v) {
                up.push(e.label);
            } else {
                down.push(e.label);
            }
        }
        up.sort();
        down.sort();
        let is_extremum = up.is_empty() || down.is_empty();
        Some(VertexProfile {
            up,
            down,
            is_extremum,
        })
    }

    /// Same graph with vertices renamed and re-ordered by `perm` (`perm[old] = new`).
    pub fn permuted(&self, perm: &[usize]) -> LabeledGraph {
        let mut vertices = self.vertices.clone();
        for (old, v) in self.vertices.iter().enumerate() {
            vertices[perm[old]] = v.clone();
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: perm[e.u],
                v: perm[e.v],
                label: e.label,
            })
            .collect();
        LabeledGraph { vertices, edges }
    }

    /// Same graph with every value replaced by `map(value)`.
    pub fn map_values(&self, map: impl Fn(&Rational) -> Rational) -> LabeledGraph {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex {
                name: v.name.clone(),
                value: map(&v.value),
            })
            .collect();
        LabeledGraph {
            vertices,
            edges: self.edges.clone(),
        }
    }

    /// Same graph with edge `index` relabeled. Skips validation; labels carry no invariant.
    pub fn with_label(&self, index: usize, label: SurfaceLabel) -> LabeledGraph {
        let mut g = self.clone();
        g.edges[index].label = label;
        g
    }
}

pub fn parse_graph(text: &str) -> Result<LabeledGraph, ParseError> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let mut index = HashMap::new();
    let mut vertices = Vec::with_capacity(doc.vertices.len());
    for v in &doc.vertices {
        if index.insert(v.id.clone(), vertices.len()).is_some() {
            return Err(ParseError::DuplicateVertex(v.id.clone()));
        }
        vertices.push(Vertex {
            name: v.id.clone(),
            value: parse_rational(&v.value)?,
        });
    }
    let lookup = |id: &str| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| ParseError::UnknownVertex(id.into()))
    };
    let edges = doc
        .edges
        .iter()
        .map(|e| {
            Ok(Edge {
                u: lookup(&e.u)?,
                v: lookup(&e.v)?,
                label: SurfaceLabel(e.r),
            })
        })
        .collect::<Result<Vec<_>, ParseError>>()?;
    LabeledGraph::new(vertices, edges)
}

pub fn serialize_graph(graph: &LabeledGraph) -> String {
    let doc = GraphDoc {
        vertices: graph
            .vertices
            .iter()
            .map(|v| VertexDoc {
                id: v.name.clone(),
                value: format_rational(&v.value),
            })
            .collect(),
        edges: graph
            .edges
            .iter()
            .map(|e| EdgeDoc {
                u: graph.vertices[e.u].name.clone(),
                v: graph.vertices[e.v].name.clone(),
                r: e.label.0,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph document serializes")
}

pub(crate) fn escape_dot(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz text; one `--` line per edge so parallel edges stay visible.
pub fn graph_to_dot(graph: &LabeledGraph) -> String {
    let mut out = String::from("graph G {\n");
    for (i, v) in graph.vertices.iter().enumerate() {
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\\ng={}\"];",
            escape_dot(&v.name),
            format_rational(&v.value)
        );
    }
    for e in &graph.edges {
        let _ = writeln!(out, "  n{} -- n{} [label=\"r={}\"];", e.u, e.v, e.label.0);
    }
    out.push_str("}\n");
    out
}

/// Edge multiplicities keyed by unordered endpoint pair, labels sorted.
pub fn edge_bundles(edges: &[Edge]) -> BTreeMap<(usize, usize), Vec<SurfaceLabel>> {
    let mut map: BTreeMap<(usize, usize), Vec<SurfaceLabel>> = BTreeMap::new();
    for e in edges {
        map.entry((e.u.min(e.v), e.u.max(e.v)))
            .or_default()
            .push(e.label);
    }
    for labels in map.values_mut() {
        labels.sort();
    }
    map
}
