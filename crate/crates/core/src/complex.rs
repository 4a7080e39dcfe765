//! Pure tetrahedral complexes: storage, face incidence, gluing and product layers.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::surface::{is_disk, is_sphere};
use crate::unionfind::UnionFind;

pub type Tri = [usize; 3];
pub type Tet = [usize; 4];

pub fn sorted3(mut t: Tri) -> Tri {
    t.sort_unstable();
    t
}

pub fn sorted4(mut t: Tet) -> Tet {
    t.sort_unstable();
    t
}

/// The four faces of a tetrahedron, each sorted; face `i` omits vertex `i` of the sorted tet.
pub fn tet_faces(tet: Tet) -> [Tri; 4] {
    let [a, b, c, d] = sorted4(tet);
    [[b, c, d], [a, c, d], [a, b, d], [a, b, c]]
}

pub fn tet_edges(tet: Tet) -> [(usize, usize); 6] {
    let [a, b, c, d] = sorted4(tet);
    [(a, b), (a, c), (a, d), (b, c), (b, d), (c, d)]
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TetMesh {
    pub n_vertices: usize,
    pub tets: Vec<Tet>,
}

impl TetMesh {
    pub fn new(n_vertices: usize, tets: Vec<Tet>) -> Self {
        TetMesh { n_vertices, tets }
    }

    /// Sorted triangle -> incident tetrahedra.
    pub fn triangle_map(&self) -> HashMap<Tri, Vec<usize>> {
        let mut map: HashMap<Tri, Vec<usize>> = HashMap::with_capacity(self.tets.len() * 2);
        for (i, &t) in self.tets.iter().enumerate() {
            for f in tet_faces(t) {
                map.entry(f).or_default().push(i);
            }
        }
        map
    }

    /// Triangles lying in exactly one tetrahedron, in sorted order.
    pub fn boundary_triangles(&self) -> Vec<Tri> {
        let mut out: Vec<Tri> = self
            .triangle_map()
            .into_iter()
            .filter(|(_, ts)| ts.len() == 1)
            .map(|(f, _)| f)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_vertices];
        for t in self.boundary_triangles() {
            for v in t {
                mask[v] = true;
            }
        }
        mask
    }

    pub fn used_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_vertices];
        for t in &self.tets {
            for &v in t {
                mask[v] = true;
            }
        }
        mask
    }

    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.tets.iter().flat_map(|&t| tet_edges(t)).collect()
    }

    /// V - E + F - T over simplices that appear in some tetrahedron.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.used_vertex_mask().iter().filter(|&&u| u).count() as i64;
        let e = self.edges().len() as i64;
        let f = self.triangle_map().len() as i64;
        v - e + f - self.tets.len() as i64
    }

    /// Connected components of the vertices used by tetrahedra.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.n_vertices);
        for t in &self.tets {
            uf.union(t[0], t[1]);
            uf.union(t[0], t[2]);
            uf.union(t[0], t[3]);
        }
        let used = self.used_vertex_mask();
        let (labels, _) = uf.labels();
        let mut dense = HashMap::new();
        let mut out = vec![usize::MAX; self.n_vertices];
        for v in 0..self.n_vertices {
            if used[v] {
                let next = dense.len();
                out[v] = *dense.entry(labels[v]).or_insert(next);
            }
        }
        let count = dense.len();
        (out, count)
    }

    /// Link of every vertex as a list of opposite triangles.
    pub fn vertex_links(&self) -> Vec<Vec<Tri>> {
        let mut links = vec![Vec::new(); self.n_vertices];
        for &t in &self.tets {
            let s = sorted4(t);
            for (i, f) in tet_faces(s).into_iter().enumerate() {
                links[s[i]].push(f);
            }
        }
        links
    }

    /// Degenerate or repeated tetrahedra.
    pub fn simplicial_defects(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashMap::new();
        for (i, &t) in self.tets.iter().enumerate() {
            let s = sorted4(t);
            if s[0] == s[1] || s[1] == s[2] || s[2] == s[3] {
                out.push(format!("tetrahedron {i} has a repeated vertex {t:?}"));
                continue;
            }
            if s[3] >= self.n_vertices {
                out.push(format!(
                    "tetrahedron {i} refers to vertex {} out of range",
                    s[3]
                ));
                continue;
            }
            if let Some(j) = seen.insert(s, i) {
                out.push(format!("tetrahedra {j} and {i} share all vertices {s:?}"));
            }
        }
        out
    }

    /// Appends `other` as a disjoint piece; returns the vertex offset.
    pub fn append(&mut self, other: &TetMesh) -> usize {
        let offset = self.n_vertices;
        self.n_vertices += other.n_vertices;
        self.tets.extend(
            other
                .tets
                .iter()
                .map(|t| [t[0] + offset, t[1] + offset, t[2] + offset, t[3] + offset]),
        );
        offset
    }

    /// Identifies vertex pairs and compacts numbering. Returns `old -> new`.
    pub fn identify(&mut self, pairs: &[(usize, usize)]) -> Vec<usize> {
        let mut uf = UnionFind::new(self.n_vertices);
        for &(a, b) in pairs {
            uf.union(a, b);
        }
        let mut rep_new = vec![usize::MAX; self.n_vertices];
        let mut next = 0;
        let remap: Vec<usize> = (0..self.n_vertices)
            .map(|v| {
                let r = uf.find(v);
                if rep_new[r] == usize::MAX {
                    rep_new[r] = next;
                    next += 1;
                }
                rep_new[r]
            })
            .collect();
        for t in &mut self.tets {
            for v in t.iter_mut() {
                *v = remap[*v];
            }
        }
        self.n_vertices = next;
        remap
    }

    pub fn remove_tet(&mut self, index: usize) -> Tet {
        self.tets.remove(index)
    }
}

/// A vertex whose link is not a sphere (interior) or a disk (boundary).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkDefect {
    pub vertex: usize,
    pub boundary: bool,
}

impl std::fmt::Display for LinkDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let want = if self.boundary { "a disk" } else { "a sphere" };
        write!(f, "link of vertex {} is not {want}", self.vertex)
    }
}

impl TetMesh {
    /// Vertices violating the 3-manifold link condition.
    pub fn link_defects(&self) -> Vec<LinkDefect> {
        let boundary = self.boundary_vertex_mask();
        let used = self.used_vertex_mask();
        let links = self.vertex_links();
        let mut out = Vec::new();
        for v in 0..self.n_vertices {
            if !used[v] {
                continue;
            }
            let mut local: HashMap<usize, usize> = HashMap::new();
            let tris: Vec<Tri> = links[v]
                .iter()
                .map(|t| {
                    t.map(|x| {
                        let next = local.len();
                        *local.entry(x).or_insert(next)
                    })
                })
                .collect();
            let ok = if boundary[v] {
                is_disk(local.len(), &tris)
            } else {
                is_sphere(local.len(), &tris)
            };
            if !ok {
                out.push(LinkDefect {
                    vertex: v,
                    boundary: boundary[v],
                });
            }
        }
        out
    }
}

/// Product triangulation of a triangulated surface with a subdivided interval.
///
/// Vertex `x` of layer `i` gets index `i * n + x`. Each prism is split by the
/// global vertex order, so neighbouring prisms agree on shared quads.
pub fn prism_stack(triangles: &[Tri], n: usize, layers: usize) -> TetMesh {
    let mut tets = Vec::with_capacity(triangles.len() * 3 * layers);
    for i in 0..layers {
        let lo = |x: usize| i * n + x;
        let hi = |x: usize| (i + 1) * n + x;
        for &t in triangles {
            tets.extend(staircase(sorted3(t), lo, hi));
        }
    }
    TetMesh::new(n * (layers + 1), tets)
}

/// Product of a surface with a circle of `layers` segments, closing the last
/// layer back to the first through the simplicial automorphism `twist`.
pub fn prism_cycle(triangles: &[Tri], n: usize, layers: usize, twist: &[usize]) -> TetMesh {
    assert!(layers >= 3, "a cycle needs at least three layers");
    let mut tets = Vec::with_capacity(triangles.len() * 3 * layers);
    for i in 0..layers {
        let lo = |x: usize| i * n + x;
        let last = i + 1 == layers;
        let hi = |x: usize| if last { twist[x] } else { (i + 1) * n + x };
        for &t in triangles {
            tets.extend(staircase(sorted3(t), lo, hi));
        }
    }
    TetMesh::new(n * layers, tets)
}

fn staircase(t: Tri, lo: impl Fn(usize) -> usize, hi: impl Fn(usize) -> usize) -> [Tet; 3] {
    let [a, b, c] = t;
    [
        [lo(a), lo(b), lo(c), hi(c)],
        [lo(a), lo(b), hi(b), hi(c)],
        [lo(a), hi(a), hi(b), hi(c)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octahedron() -> Vec<Tri> {
        // +x=0 -x=1 +y=2 -y=3 +z=4 -z=5
        let mut out = Vec::new();
        for x in [0, 1] {
            for y in [2, 3] {
                for z in [4, 5] {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }

    #[test]
    fn single_tet() {
        let m = TetMesh::new(4, vec![[0, 1, 2, 3]]);
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.boundary_triangles().len(), 4);
        assert!(m.simplicial_defects().is_empty());
    }

    #[test]
    fn prism_stack_counts() {
        let m = prism_stack(&octahedron(), 6, 2);
        assert_eq!(m.tets.len(), 8 * 3 * 2);
        // S^2 x I has chi 2
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.boundary_triangles().len(), 16);
        assert!(m.simplicial_defects().is_empty());
        let (_, k) = m.components();
        assert_eq!(k, 1);
    }

    #[test]
    fn solid_torus_cycle() {
        let m = prism_cycle(&[[0, 1, 2]], 3, 4, &[0, 1, 2]);
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.boundary_triangles().len(), 24);
        assert!(m.simplicial_defects().is_empty());
    }

    #[test]
    fn identify_compacts() {
        let mut m = TetMesh::new(8, vec![[0, 1, 2, 3], [4, 5, 6, 7]]);
        let remap = m.identify(&[(1, 5), (2, 6), (3, 7)]);
        assert_eq!(m.n_vertices, 5);
        assert_eq!(remap[5], remap[1]);
        assert_eq!(
            m.triangle_map().values().filter(|t| t.len() == 2).count(),
            1
        );
    }

    #[test]
    fn link_condition() {
        let m = prism_stack(&octahedron(), 6, 2);
        assert!(m.link_defects().is_empty());
        let t = TetMesh::new(4, vec![[0, 1, 2, 3]]);
        assert!(t.link_defects().is_empty());
        // two tetrahedra sharing only a vertex
        let pinched = TetMesh::new(7, vec![[0, 1, 2, 3], [0, 4, 5, 6]]);
        assert_eq!(
            pinched.link_defects(),
            vec![LinkDefect {
                vertex: 0,
                boundary: true
            }]
        );
    }
}
