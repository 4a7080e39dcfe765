//! Labeled isomorphism between an extracted Reeb graph and a target graph.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use super::extract::ReebGraph;
use crate::model::graph::escape_dot;
use crate::model::{LabeledGraph, SurfaceLabel};
use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Mismatch {
    NodeCount {
        expected: usize,
        found: usize,
    },
    EdgeCount {
        expected: usize,
        found: usize,
    },
    /// Sorted vertex values differ.
    Values {
        expected: Vec<String>,
        found: Vec<String>,
    },
    /// No extracted node with the vertex's value has its degree.
    Degree {
        vertex: String,
        expected: usize,
        found: Vec<usize>,
    },
    /// An edge whose label is not matched at any candidate node.
    Label {
        edge: usize,
        u: String,
        v: String,
        expected: SurfaceLabel,
        found: Vec<SurfaceLabel>,
    },
    /// Local data agrees but no global bijection exists.
    Structure,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::NodeCount { expected, found } => {
                write!(f, "node count: expected {expected}, found {found}")
            }
            Mismatch::EdgeCount { expected, found } => {
                write!(f, "edge count: expected {expected}, found {found}")
            }
            Mismatch::Values { expected, found } => {
                write!(
                    f,
                    "value multiset: expected [{}], found [{}]",
                    expected.join(", "),
                    found.join(", ")
                )
            }
            Mismatch::Degree {
                vertex,
                expected,
                found,
            } => {
                write!(
                    f,
                    "degree of `{vertex}`: expected {expected}, candidates have {found:?}"
                )
            }
            Mismatch::Label {
                edge,
                u,
                v,
                expected,
                found,
            } => {
                let found: Vec<String> = found.iter().map(|l| l.to_string()).collect();
                write!(
                    f,
                    "label of edge {edge} (`{u}` -- `{v}`): expected {expected}, found [{}]",
                    found.join(", ")
                )
            }
            Mismatch::Structure => write!(f, "no adjacency-preserving bijection exists"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoResult {
    /// `mapping[v]` is the Reeb node matched to graph vertex `v`.
    Isomorphic(Vec<usize>),
    Mismatch(Mismatch),
}

impl IsoResult {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoResult::Isomorphic(_))
    }
}

type Bundles = BTreeMap<(usize, usize), Vec<SurfaceLabel>>;

fn bundles(pairs: impl Iterator<Item = (usize, usize, SurfaceLabel)>) -> Bundles {
    let mut map: Bundles = BTreeMap::new();
    for (a, b, l) in pairs {
        map.entry((a.min(b), a.max(b))).or_default().push(l);
    }
    for v in map.values_mut() {
        v.sort();
    }
    map
}

/// Sorted (neighbor value, label) pairs around each vertex.
fn signatures(
    n: usize,
    values: &[&Rational],
    edges: &[(usize, usize, SurfaceLabel)],
) -> Vec<Vec<(Rational, SurfaceLabel)>> {
    let mut sig = vec![Vec::new(); n];
    for &(a, b, l) in edges {
        sig[a].push((values[b].clone(), l));
        sig[b].push((values[a].clone(), l));
    }
    for s in &mut sig {
        s.sort();
    }
    sig
}

pub fn labeled_isomorphic(r: &ReebGraph, g: &LabeledGraph) -> IsoResult {
    let n = g.vertex_count();
    if r.nodes.len() != n {
        return IsoResult::Mismatch(Mismatch::NodeCount {
            expected: n,
            found: r.nodes.len(),
        });
    }
    let gv: Vec<&Rational> = g.vertices().iter().map(|v| &v.value).collect();
    let rv: Vec<&Rational> = r.nodes.iter().map(|v| &v.value).collect();
    let sorted = |v: &[&Rational]| {
        let mut s: Vec<&Rational> = v.to_vec();
        s.sort();
        s.into_iter().map(format_rational).collect::<Vec<_>>()
    };
    if sorted(&gv) != sorted(&rv) {
        return IsoResult::Mismatch(Mismatch::Values {
            expected: sorted(&gv),
            found: sorted(&rv),
        });
    }
    if r.edges.len() != g.edges().len() {
        return IsoResult::Mismatch(Mismatch::EdgeCount {
            expected: g.edges().len(),
            found: r.edges.len(),
        });
    }
    let ge: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.label)).collect();
    let re: Vec<_> = r.edges.iter().map(|e| (e.lo, e.hi, e.label)).collect();
    let gsig = signatures(n, &gv, &ge);
    let rsig = signatures(n, &rv, &re);
    let rdeg: Vec<usize> = rsig.iter().map(Vec::len).collect();

    let mut candidates = Vec::with_capacity(n);
    for v in 0..n {
        let same_value: Vec<usize> = (0..n).filter(|&x| rv[x] == gv[v]).collect();
        let c: Vec<usize> = same_value
            .iter()
            .copied()
            .filter(|&x| rsig[x] == gsig[v])
            .collect();
        if c.is_empty() {
            let degree = gsig[v].len();
            if !same_value.iter().any(|&x| rdeg[x] == degree) {
                return IsoResult::Mismatch(Mismatch::Degree {
                    vertex: g.vertices()[v].name.clone(),
                    expected: degree,
                    found: same_value.iter().map(|&x| rdeg[x]).collect(),
                });
            }
            return IsoResult::Mismatch(label_mismatch(g, v, &same_value, &rsig));
        }
        candidates.push(c);
    }

    let gb = bundles(ge.iter().copied());
    let rb = bundles(re.iter().copied());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (candidates[v].len(), v));
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if search(0, &order, &candidates, &gb, &rb, &mut mapping, &mut used) {
        IsoResult::Isomorphic(mapping)
    } else {
        IsoResult::Mismatch(Mismatch::Structure)
    }
}

fn label_mismatch(
    g: &LabeledGraph,
    v: usize,
    nodes: &[usize],
    rsig: &[Vec<(Rational, SurfaceLabel)>],
) -> Mismatch {
    for (k, e) in g.incident(v) {
        let w = e.other(v);
        let target = (g.value(w).clone(), e.label);
        let present = nodes.iter().any(|&x| rsig[x].contains(&target));
        if !present {
            let mut found: Vec<SurfaceLabel> = nodes
                .iter()
                .flat_map(|&x| {
                    rsig[x]
                        .iter()
                        .filter(|(val, _)| val == g.value(w))
                        .map(|(_, l)| *l)
                })
                .collect();
            found.sort();
            found.dedup();
            return Mismatch::Label {
                edge: k,
                u: g.vertices()[e.u].name.clone(),
                v: g.vertices()[e.v].name.clone(),
                expected: e.label,
                found,
            };
        }
    }
    // multiplicities differ without any single missing label
    Mismatch::Structure
}

fn search(
    depth: usize,
    order: &[usize],
    candidates: &[Vec<usize>],
    gb: &Bundles,
    rb: &Bundles,
    mapping: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    for &x in &candidates[v] {
        if used[x] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&w| {
            let gk = (v.min(w), v.max(w));
            let (a, b) = (x, mapping[w]);
            gb.get(&gk) == rb.get(&(a.min(b), a.max(b)))
        });
        if !consistent {
            continue;
        }
        mapping[v] = x;
        used[x] = true;
        if search(depth + 1, order, candidates, gb, rb, mapping, used) {
            return true;
        }
        used[x] = false;
        mapping[v] = usize::MAX;
    }
    false
}

pub fn reeb_to_dot(r: &ReebGraph) -> String {
    let mut out = String::from("graph R {\n");
    for (i, node) in r.nodes.iter().enumerate() {
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\\ng={}\"];",
            escape_dot(&format!("n{i}")),
            format_rational(&node.value)
        );
    }
    for e in &r.edges {
        let _ = writeln!(out, "  n{} -- n{} [label=\"r={}\"];", e.lo, e.hi, e.label.0);
    }
    out.push_str("}\n");
    out
}

/// JSON in the input graph schema, so extracted graphs can be fed back to the checker.
pub fn reeb_to_json(r: &ReebGraph) -> String {
    let vertices: Vec<_> = r
        .nodes
        .iter()
        .enumerate()
        .map(
            |(i, n)| serde_json::json!({"id": format!("n{i}"), "value": format_rational(&n.value)}),
        )
        .collect();
    let edges: Vec<_> = r
        .edges
        .iter()
        .map(|e| serde_json::json!({"u": format!("n{}", e.lo), "v": format!("n{}", e.hi), "r": e.label.0}))
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({"vertices": vertices, "edges": edges}))
        .expect("json")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_graph;
    use crate::rational::int;
    use crate::reeb::{ReebEdge, ReebNode};

    fn reeb(values: &[i64], edges: &[(usize, usize, i64)]) -> ReebGraph {
        ReebGraph {
            nodes: values
                .iter()
                .map(|&v| ReebNode {
                    value: int(v),
                    essential: true,
                    plateau: false,
                })
                .collect(),
            edges: edges
                .iter()
                .map(|&(lo, hi, l)| ReebEdge {
                    lo,
                    hi,
                    label: SurfaceLabel(l),
                })
                .collect(),
        }
    }

    fn graph(values: &[i64], edges: &[(usize, usize, i64)]) -> LabeledGraph {
        let values: Vec<_> = values.iter().map(|&v| int(v)).collect();
        LabeledGraph::from_parts(&values, edges).unwrap()
    }

    #[test]
    fn finds_mapping() {
        let g = graph(&[1, 0, 2, 2], &[(0, 1, 0), (0, 2, -1), (0, 3, -1)]);
        let r = reeb(&[0, 1, 2, 2], &[(0, 1, 0), (1, 2, -1), (1, 3, -1)]);
        assert_eq!(
            labeled_isomorphic(&r, &g),
            IsoResult::Isomorphic(vec![1, 0, 2, 3])
        );
    }

    #[test]
    fn perturbed_label_cites_edge() {
        let g = graph(&[0, 1, 2], &[(0, 1, 1), (1, 2, 0)]);
        let r = reeb(&[0, 1, 2], &[(0, 1, 3), (1, 2, 0)]);
        match labeled_isomorphic(&r, &g) {
            IsoResult::Mismatch(Mismatch::Label {
                edge,
                expected,
                found,
                ..
            }) => {
                assert_eq!(
                    (edge, expected, found),
                    (0, SurfaceLabel(1), vec![SurfaceLabel(3)])
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multiplicity_matters() {
        let g = graph(&[0, 1], &[(0, 1, -1), (0, 1, -1)]);
        let r = reeb(&[0, 1], &[(0, 1, -1)]);
        assert_eq!(
            labeled_isomorphic(&r, &g),
            IsoResult::Mismatch(Mismatch::EdgeCount {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn value_mismatch() {
        let g = graph(&[0, 1], &[(0, 1, 0)]);
        let r = reeb(&[0, 2], &[(0, 1, 0)]);
        assert!(matches!(
            labeled_isomorphic(&r, &g),
            IsoResult::Mismatch(Mismatch::Values { .. })
        ));
    }

    #[test]
    fn json_feeds_back_into_parser() {
        let r = reeb(&[0, 1, 2, 2], &[(0, 1, 0), (1, 2, -1), (1, 3, -1)]);
        let g = parse_graph(&reeb_to_json(&r)).unwrap();
        assert!(labeled_isomorphic(&r, &g).is_isomorphic());
        assert!(reeb_to_dot(&r).contains("n1 -- n2 [label=\"r=-1\"]"));
    }
}
