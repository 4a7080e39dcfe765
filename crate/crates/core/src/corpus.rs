//! Seeded random graphs for round-trip testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{check_realizable, Edge, LabeledGraph, SurfaceLabel, Vertex};
use crate::rational::{int, ratio};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusParams {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Labels are drawn from `-max_label..=max_label`.
    pub max_label: i64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_vertices: 8,
            max_edges: 10,
            max_label: 3,
        }
    }
}

/// A graph failing the parity conditions at exactly the endpoints of one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolatingCase {
    pub graph: LabeledGraph,
    pub edge: usize,
    /// Failing vertices in increasing order.
    pub vertices: Vec<usize>,
}

/// Label of opposite chi parity, staying within `-3..=3`.
pub fn flip_parity(label: SurfaceLabel) -> SurfaceLabel {
    match label.0 {
        r if label.is_odd_chi() => SurfaceLabel(r + 1),
        r if r < 0 => SurfaceLabel(r - 1),
        r if r % 2 == 0 => SurfaceLabel(-1),
        _ => SurfaceLabel(-3),
    }
}

/// Connected good multigraph with arbitrary labels.
pub fn random_graph(rng: &mut impl Rng, p: &CorpusParams) -> LabeledGraph {
    loop {
        let n = rng.gen_range(2..=p.max_vertices);
        let m = rng.gen_range(n - 1..=p.max_edges.max(n - 1));
        // half-integers keep values exact but not all integral
        let values: Vec<_> = (0..n)
            .map(|_| ratio(rng.gen_range(0..4 * n as i64), 2))
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut edges = Vec::with_capacity(m);
        for i in 1..n {
            let parent = order[rng.gen_range(0..i)];
            edges.push(Edge {
                u: parent,
                v: order[i],
                label: SurfaceLabel(rng.gen_range(-p.max_label..=p.max_label)),
            });
        }
        while edges.len() < m {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v {
                edges.push(Edge {
                    u,
                    v,
                    label: SurfaceLabel(rng.gen_range(-p.max_label..=p.max_label)),
                });
            }
        }
        let vertices = values
            .into_iter()
            .enumerate()
            .map(|(i, value)| Vertex {
                name: format!("v{i}"),
                value,
            })
            .collect();
        if let Ok(g) = LabeledGraph::new(vertices, edges) {
            return g;
        }
    }
}

/// Flips labels along a spanning tree until every vertex has an even number of
/// incident odd-chi edges.
pub fn repair_parity(g: &LabeledGraph) -> LabeledGraph {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = vec![0];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        for (ei, e) in g.incident(x) {
            let y = e.other(x);
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(ei);
                order.push(y);
            }
        }
    }
    let mut out = g.clone();
    let mut odd = vec![false; n];
    for e in g.edges() {
        if e.label.is_odd_chi() {
            odd[e.u] ^= true;
            odd[e.v] ^= true;
        }
    }
    for &v in order.iter().skip(1).rev() {
        if odd[v] {
            let ei = parent[v].expect("non-root vertex has a tree edge");
            let e = out.edges()[ei];
            out = out.with_label(ei, flip_parity(e.label));
            odd[e.u] ^= true;
            odd[e.v] ^= true;
        }
    }
    out
}

/// Accepted graph determined by `seed`.
pub fn realizable_graph(seed: u64, p: &CorpusParams) -> LabeledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = repair_parity(&random_graph(&mut rng, p));
        if check_realizable(&g).accepted() {
            return g;
        }
    }
}

pub fn realizable_corpus(seed: u64, count: usize, p: &CorpusParams) -> Vec<LabeledGraph> {
    (0..count as u64)
        .map(|i| realizable_graph(seed.wrapping_mul(1_000_003).wrapping_add(i), p))
        .collect()
}

/// Accepted graph with the parity of one random edge flipped.
pub fn violating_case(seed: u64, p: &CorpusParams) -> ViolatingCase {
    let g = realizable_graph(seed, p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let edge = rng.gen_range(0..g.edges().len());
    let e = g.edges()[edge];
    let mut vertices = vec![e.u, e.v];
    vertices.sort();
    ViolatingCase {
        graph: g.with_label(edge, flip_parity(e.label)),
        edge,
        vertices,
    }
}

pub fn violating_corpus(seed: u64, count: usize, p: &CorpusParams) -> Vec<ViolatingCase> {
    (0..count as u64)
        .map(|i| violating_case(seed.wrapping_mul(1_000_003).wrapping_add(i), p))
        .collect()
}

/// Fixed small graphs covering each vertex-block kind.
pub fn named_examples() -> Vec<(&'static str, LabeledGraph)> {
    let g = |values: &[i64], edges: &[(usize, usize, i64)]| {
        let values: Vec<_> = values.iter().map(|&v| int(v)).collect();
        LabeledGraph::from_parts(&values, edges).expect("example graphs are valid")
    };
    vec![
        ("path", g(&[0, 1], &[(0, 1, 0)])),
        ("theta", g(&[0, 1], &[(0, 1, -1), (0, 1, -1)])),
        ("klein-caps", g(&[0, 1], &[(0, 1, -2)])),
        (
            "split",
            g(&[0, 1, 2, 2], &[(0, 1, 1), (1, 2, 0), (1, 3, 1)]),
        ),
        (
            "projective-pair",
            g(
                &[0, 1, 2, 3],
                &[(0, 1, 0), (1, 2, -1), (1, 2, -1), (2, 3, 2)],
            ),
        ),
    ]
}
