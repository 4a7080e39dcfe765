//! Reeb graph extraction by a sweep over layer values.
//!
//! Levels and open slabs between consecutive layer values are split into
//! connected components with union-find; level components become nodes,
//! slab components become edge segments. A node is then contracted when it
//! joins exactly one segment from below to one from above with equal labels
//! and its level component contains no top-dimensional cell.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::level::check_values;
use crate::complex::{TetMesh, Tri};
use crate::error::{ReebError, SurfaceError};
use crate::model::SurfaceLabel;
use crate::rational::{self, Rational};
use crate::surface::{classify_triangles, SurfaceMesh};
use crate::unionfind::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReebNode {
    #[serde(with = "rational")]
    pub value: Rational,
    pub essential: bool,
    /// The level component contains a whole top-dimensional cell.
    pub plateau: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReebEdge {
    /// Endpoint with the smaller value.
    pub lo: usize,
    pub hi: usize,
    pub label: SurfaceLabel,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReebGraph {
    pub nodes: Vec<ReebNode>,
    pub edges: Vec<ReebEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Elem {
    Vertex(usize),
    Edge(usize, usize),
}

struct Sweep<'a> {
    cells: Vec<&'a [usize]>,
    values: &'a [Rational],
    layers: Vec<Rational>,
    rank: Vec<usize>,
    span: Vec<(usize, usize)>,
}

struct Level {
    comp_of: HashMap<Elem, usize>,
    plateau: Vec<bool>,
}

struct Slab {
    labels: Vec<SurfaceLabel>,
    bottom: Vec<usize>,
    top: Vec<usize>,
}

impl<'a> Sweep<'a> {
    fn new(cells: Vec<&'a [usize]>, values: &'a [Rational]) -> Self {
        let used: BTreeSet<&Rational> = cells
            .iter()
            .flat_map(|c| c.iter().map(|&v| &values[v]))
            .collect();
        let layers: Vec<Rational> = used.into_iter().cloned().collect();
        let mut rank = vec![usize::MAX; values.len()];
        for c in &cells {
            for &v in c.iter() {
                if rank[v] == usize::MAX {
                    rank[v] = layers.binary_search(&values[v]).unwrap();
                }
            }
        }
        let span = cells
            .iter()
            .map(|c| {
                let r = c.iter().map(|&v| rank[v]);
                (r.clone().min().unwrap(), r.max().unwrap())
            })
            .collect();
        Sweep {
            cells,
            values,
            layers,
            rank,
            span,
        }
    }

    fn buckets(&self, slabs: bool) -> Vec<Vec<usize>> {
        let count = if slabs {
            self.layers.len().saturating_sub(1)
        } else {
            self.layers.len()
        };
        let mut out = vec![Vec::new(); count];
        for (i, &(lo, hi)) in self.span.iter().enumerate() {
            let end = if slabs { hi } else { hi + 1 };
            for bucket in &mut out[lo..end] {
                bucket.push(i);
            }
        }
        out
    }

    /// An element of the cell lying on level `i`.
    fn level_elems(&self, cell: usize, i: usize) -> impl Iterator<Item = Elem> + '_ {
        let c = self.cells[cell];
        let rank = &self.rank;
        let verts = c
            .iter()
            .filter(move |&&v| rank[v] == i)
            .map(|&v| Elem::Vertex(v));
        let crossing = pairs(c).filter_map(move |(a, b)| {
            let (lo, hi) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
            (rank[lo] < i && i < rank[hi]).then_some(Elem::Edge(a.min(b), a.max(b)))
        });
        verts.chain(crossing)
    }

    fn crossing(&self, cell: usize, i: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let rank = &self.rank;
        pairs(self.cells[cell]).filter_map(move |(a, b)| {
            let (lo, hi) = (rank[a].min(rank[b]), rank[a].max(rank[b]));
            (lo <= i && i < hi).then_some((a.min(b), a.max(b)))
        })
    }

    fn level(&self, i: usize, cells: &[usize]) -> Level {
        let mut local: HashMap<Elem, usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut groups = Vec::with_capacity(cells.len());
        for &c in cells {
            let ids: Vec<usize> = self
                .level_elems(c, i)
                .map(|e| intern(&mut local, &mut keys, e))
                .collect();
            groups.push(ids);
        }
        let mut uf = UnionFind::new(local.len());
        for ids in &groups {
            for w in ids.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let (roots, comp_of) = dense_components(&mut uf, &local);
        let mut plateau = vec![false; roots];
        for (&c, ids) in cells.iter().zip(&groups) {
            let (lo, hi) = self.span[c];
            if lo == hi {
                plateau[comp_of[&keys[ids[0]]]] = true;
            }
        }
        Level { comp_of, plateau }
    }

    fn slab(
        &self,
        i: usize,
        cells: &[usize],
        levels: &[Level],
        dim: Dim,
    ) -> Result<(Slab, usize), ReebError> {
        let mut local: HashMap<Elem, usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut groups = Vec::with_capacity(cells.len());
        for &c in cells {
            let ids: Vec<usize> = self
                .crossing(c, i)
                .map(|(a, b)| intern(&mut local, &mut keys, Elem::Edge(a, b)))
                .collect();
            groups.push(ids);
        }
        let mut uf = UnionFind::new(local.len());
        for ids in &groups {
            for w in ids.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let (count, comp_of) = dense_components(&mut uf, &local);
        let mut bottom = vec![BTreeSet::new(); count];
        let mut top = vec![BTreeSet::new(); count];
        for (&c, ids) in cells.iter().zip(&groups) {
            let s = comp_of[&keys[ids[0]]];
            let b = self
                .level_elems(c, i)
                .next()
                .expect("cell meets its lower level");
            let t = self
                .level_elems(c, i + 1)
                .next()
                .expect("cell meets its upper level");
            bottom[s].insert(levels[i].comp_of[&b]);
            top[s].insert(levels[i + 1].comp_of[&t]);
        }
        let single = |sets: Vec<BTreeSet<usize>>| -> Result<Vec<usize>, ReebError> {
            sets.into_iter()
                .enumerate()
                .map(|(s, set)| match set.len() {
                    1 => Ok(*set.iter().next().unwrap()),
                    n => Err(ReebError::Incidence { slab: s, count: n }),
                })
                .collect()
        };
        let labels = self.slab_labels(i, cells, &comp_of, count, dim)?;
        Ok((
            Slab {
                labels,
                bottom: single(bottom)?,
                top: single(top)?,
            },
            count,
        ))
    }

    fn slab_labels(
        &self,
        i: usize,
        cells: &[usize],
        comp_of: &HashMap<Elem, usize>,
        count: usize,
        dim: Dim,
    ) -> Result<Vec<SurfaceLabel>, ReebError> {
        let t = rational::midpoint(&self.layers[i], &self.layers[i + 1]);
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut vertex = |a: usize, b: usize| {
            let next = keys.len();
            *index.entry((a.min(b), a.max(b))).or_insert_with(|| {
                keys.push((a.min(b), a.max(b)));
                next
            })
        };
        let mut labels = vec![None; count];
        match dim {
            Dim::Three => {
                let mut tris: Vec<Tri> = Vec::new();
                for &c in cells {
                    let cell = self.cells[c];
                    let (below, above): (Vec<usize>, Vec<usize>) =
                        cell.iter().partition(|&&v| self.values[v] < t);
                    match (below.len(), above.len()) {
                        (1, 3) | (3, 1) => {
                            let (apex, rest) = if below.len() == 1 {
                                (below[0], &above)
                            } else {
                                (above[0], &below)
                            };
                            tris.push([
                                vertex(apex, rest[0]),
                                vertex(apex, rest[1]),
                                vertex(apex, rest[2]),
                            ]);
                        }
                        (2, 2) => {
                            let q = [
                                vertex(below[0], above[0]),
                                vertex(below[0], above[1]),
                                vertex(below[1], above[1]),
                                vertex(below[1], above[0]),
                            ];
                            tris.push([q[0], q[1], q[2]]);
                            tris.push([q[0], q[2], q[3]]);
                        }
                        _ => unreachable!("slab cells cross the midpoint"),
                    }
                }
                for comp in classify_triangles(keys.len(), &tris)? {
                    let (a, b) = keys[comp.vertices[0]];
                    labels[comp_of[&Elem::Edge(a, b)]] = Some(comp.label);
                }
            }
            Dim::Two => {
                let mut degree = HashMap::new();
                for &c in cells {
                    let ends: Vec<usize> = pairs(self.cells[c])
                        .filter(|&(a, b)| (self.values[a] < t) != (self.values[b] < t))
                        .map(|(a, b)| vertex(a, b))
                        .collect();
                    for &e in &ends {
                        *degree.entry(e).or_insert(0usize) += 1;
                    }
                }
                if let Some((&v, &d)) = degree.iter().find(|(_, &d)| d != 2) {
                    let (a, b) = keys[v];
                    return Err(SurfaceError::Invalid(format!(
                        "slice point on edge ({a}, {b}) has degree {d}"
                    ))
                    .into());
                }
                for (a, b) in keys {
                    labels[comp_of[&Elem::Edge(a, b)]] = Some(SurfaceLabel::SPHERE);
                }
            }
        }
        Ok(labels
            .into_iter()
            .map(|l| l.expect("every slab component is sliced"))
            .collect())
    }
}

fn intern(local: &mut HashMap<Elem, usize>, keys: &mut Vec<Elem>, e: Elem) -> usize {
    *local.entry(e).or_insert_with(|| {
        keys.push(e);
        keys.len() - 1
    })
}

fn pairs(c: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..c.len()).flat_map(move |i| (i + 1..c.len()).map(move |j| (c[i], c[j])))
}

/// Dense component ids numbered by smallest element.
fn dense_components(
    uf: &mut UnionFind,
    local: &HashMap<Elem, usize>,
) -> (usize, HashMap<Elem, usize>) {
    let mut elems: Vec<(&Elem, &usize)> = local.iter().collect();
    elems.sort();
    let mut dense = HashMap::new();
    let mut comp_of = HashMap::with_capacity(local.len());
    for (e, &id) in elems {
        let root = uf.find(id);
        let next = dense.len();
        comp_of.insert(*e, *dense.entry(root).or_insert(next));
    }
    (dense.len(), comp_of)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dim {
    Two,
    Three,
}

fn extract(cells: Vec<&[usize]>, values: &[Rational], dim: Dim) -> Result<ReebGraph, ReebError> {
    let sweep = Sweep::new(cells, values);
    let level_cells = sweep.buckets(false);
    let slab_cells = sweep.buckets(true);
    let levels: Vec<Level> = level_cells
        .par_iter()
        .enumerate()
        .map(|(i, c)| sweep.level(i, c))
        .collect();
    let slabs: Vec<(Slab, usize)> = slab_cells
        .par_iter()
        .enumerate()
        .map(|(i, c)| sweep.slab(i, c, &levels, dim))
        .collect::<Result<_, _>>()?;

    let mut node_base = Vec::with_capacity(levels.len());
    let mut nodes = Vec::new();
    for (i, level) in levels.iter().enumerate() {
        node_base.push(nodes.len());
        for &plateau in &level.plateau {
            nodes.push(ReebNode {
                value: sweep.layers[i].clone(),
                essential: true,
                plateau,
            });
        }
    }
    let mut edges = Vec::new();
    for (i, (slab, count)) in slabs.iter().enumerate() {
        for s in 0..*count {
            edges.push(ReebEdge {
                lo: node_base[i] + slab.bottom[s],
                hi: node_base[i + 1] + slab.top[s],
                label: slab.labels[s],
            });
        }
    }
    let raw = ReebGraph { nodes, edges };
    Ok(raw.contracted())
}

impl ReebGraph {
    /// Merges segments across inessential nodes and drops those nodes.
    pub fn contracted(&self) -> ReebGraph {
        let n = self.nodes.len();
        let mut down = vec![Vec::new(); n];
        let mut up = vec![Vec::new(); n];
        for (k, e) in self.edges.iter().enumerate() {
            up[e.lo].push(k);
            down[e.hi].push(k);
        }
        let essential: Vec<bool> = (0..n)
            .map(|v| {
                !(down[v].len() == 1
                    && up[v].len() == 1
                    && self.edges[down[v][0]].label == self.edges[up[v][0]].label
                    && !self.nodes[v].plateau)
            })
            .collect();
        let mut new_id = vec![usize::MAX; n];
        let mut nodes = Vec::new();
        for v in 0..n {
            if essential[v] {
                new_id[v] = nodes.len();
                nodes.push(ReebNode {
                    essential: true,
                    ..self.nodes[v].clone()
                });
            }
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            if !essential[e.lo] {
                continue;
            }
            let mut hi = e.hi;
            while !essential[hi] {
                hi = self.edges[up[hi][0]].hi;
            }
            edges.push(ReebEdge {
                lo: new_id[e.lo],
                hi: new_id[hi],
                label: e.label,
            });
        }
        edges.sort();
        ReebGraph { nodes, edges }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.lo == v || e.hi == v).count()
    }

    /// Distinct node values in increasing order.
    pub fn node_values(&self) -> Vec<Rational> {
        let set: BTreeSet<&Rational> = self.nodes.iter().map(|n| &n.value).collect();
        set.into_iter().cloned().collect()
    }

    /// Star shape: one center adjacent to every other node, all of which are leaves.
    pub fn star_center(&self) -> Option<usize> {
        if self.nodes.len() < 2 || self.edges.len() != self.nodes.len() - 1 {
            return None;
        }
        (0..self.nodes.len()).find(|&c| {
            self.edges.iter().all(|e| e.lo == c || e.hi == c)
                && (0..self.nodes.len()).all(|v| v == c || self.degree(v) == 1)
        })
    }
}

/// Reeb graph of a PL function on a tetrahedral complex.
pub fn reeb_graph(mesh: &TetMesh, values: &[Rational]) -> Result<ReebGraph, ReebError> {
    check_values(mesh, values)?;
    extract(
        mesh.tets.iter().map(|t| &t[..]).collect(),
        values,
        Dim::Three,
    )
}

/// Same as [`reeb_graph`] on a dedicated pool of `threads` workers.
pub fn reeb_graph_with_threads(
    mesh: &TetMesh,
    values: &[Rational],
    threads: usize,
) -> Result<ReebGraph, ReebError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| reeb_graph(mesh, values))
}

/// Reeb graph of a PL function on a closed triangulated surface. Level sets
/// are closed curves; every edge carries label 0 (one circle per slice component).
pub fn surface_reeb_graph(mesh: &SurfaceMesh, values: &[Rational]) -> Result<ReebGraph, ReebError> {
    if values.len() != mesh.n_vertices {
        return Err(ReebError::ValueCount(values.len(), mesh.n_vertices));
    }
    extract(
        mesh.triangles.iter().map(|t| &t[..]).collect(),
        values,
        Dim::Two,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::prism_stack;
    use crate::rational::{int, ratio};
    use crate::surface::generate_surface;

    fn octahedron_height() -> (SurfaceMesh, Vec<Rational>) {
        let s = generate_surface(SurfaceLabel(0), 1);
        // vertex 4 is +z, 5 is -z
        let values = [0, 0, 0, 0, 1, -1].map(int).to_vec();
        (s, values)
    }

    #[test]
    fn sphere_height_is_a_path() {
        let (s, values) = octahedron_height();
        let g = surface_reeb_graph(&s, &values).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(
            g.edges,
            vec![ReebEdge {
                lo: 0,
                hi: 1,
                label: SurfaceLabel(0)
            }]
        );
        assert_eq!(g.node_values(), vec![int(-1), int(1)]);
    }

    #[test]
    fn product_is_single_edge() {
        for r in [-2, -1, 0, 1, 3] {
            let s = generate_surface(SurfaceLabel(r), 1);
            let mesh = prism_stack(&s.triangles, s.n_vertices, 3);
            let values: Vec<_> = (0..mesh.n_vertices)
                .map(|v| int((v / s.n_vertices) as i64))
                .collect();
            let g = reeb_graph(&mesh, &values).unwrap();
            // the two ends are plateaus of dimension two, not three, so only the ends survive
            assert_eq!(g.nodes.len(), 2, "r={r}");
            assert_eq!(
                g.edges,
                vec![ReebEdge {
                    lo: 0,
                    hi: 1,
                    label: SurfaceLabel(r)
                }]
            );
        }
    }

    /// Standing torus on an 8 x 6 grid, heights perturbed to be distinct.
    fn standing_torus() -> (SurfaceMesh, Vec<Rational>) {
        let (n, m) = (8usize, 6usize);
        let id = |i: usize, j: usize| (i % n) * m + (j % m);
        let mut tris = Vec::new();
        for i in 0..n {
            for j in 0..m {
                tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut values = vec![int(0); n * m];
        for i in 0..n {
            for j in 0..m {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let z = (3.0 + phi.cos()) * theta.cos();
                let scaled = (z * 1000.0).round() as i64 * 100 + (i * m + j) as i64;
                values[id(i, j)] = ratio(scaled, 100_000);
            }
        }
        (SurfaceMesh::new(n * m, tris), values)
    }

    #[test]
    fn standing_torus_has_two_saddles() {
        let (s, values) = standing_torus();
        let g = surface_reeb_graph(&s, &values).unwrap();
        assert_eq!(g.nodes.len(), 4);
        let degrees: Vec<usize> = (0..4).map(|v| g.degree(v)).collect();
        assert_eq!(degrees, vec![1, 3, 3, 1]);
        assert_eq!(g.edges.iter().filter(|e| e.lo == 1 && e.hi == 2).count(), 2);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let s = generate_surface(SurfaceLabel(1), 2);
        let mesh = prism_stack(&s.triangles, s.n_vertices, 4);
        let values: Vec<_> = (0..mesh.n_vertices)
            .map(|v| int((v / s.n_vertices) as i64))
            .collect();
        let one = reeb_graph_with_threads(&mesh, &values, 1).unwrap();
        let four = reeb_graph_with_threads(&mesh, &values, 4).unwrap();
        assert_eq!(one, four);
    }
}
