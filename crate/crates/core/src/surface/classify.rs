//! Validity checks and classification of triangulated surfaces.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::complex::{sorted3, Tri};
use crate::error::SurfaceError;
use crate::model::SurfaceLabel;
use crate::unionfind::UnionFind;

/// Invariants of one connected component of a (possibly bounded) surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentInfo {
    /// Vertices of the component, sorted.
    pub vertices: Vec<usize>,
    pub triangles: Vec<usize>,
    pub chi: i64,
    pub orientable: bool,
    pub boundary_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifiedComponent {
    pub vertices: Vec<usize>,
    pub label: SurfaceLabel,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Checks the combinatorial surface conditions and computes per-component
/// invariants. With `closed` every edge must lie in exactly two triangles and
/// every vertex link must be one cycle; otherwise edges may lie in one or two
/// triangles and links may also be a single path.
pub fn analyze(
    n_vertices: usize,
    triangles: &[Tri],
    closed: bool,
) -> Result<Vec<ComponentInfo>, SurfaceError> {
    let mut seen = HashSet::new();
    let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, &t) in triangles.iter().enumerate() {
        let s = sorted3(t);
        if s[0] == s[1] || s[1] == s[2] {
            return Err(SurfaceError::DegenerateTriangle(i));
        }
        if s[2] >= n_vertices {
            return Err(SurfaceError::Invalid(format!(
                "triangle {i} refers to vertex {}",
                s[2]
            )));
        }
        if !seen.insert(s) {
            return Err(SurfaceError::DuplicateTriangle(i));
        }
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            edges.entry(edge_key(a, b)).or_default().push(i);
        }
    }
    let mut sorted_edges: Vec<_> = edges.iter().collect();
    sorted_edges.sort();
    for (&(a, b), ts) in &sorted_edges {
        let ok = if closed {
            ts.len() == 2
        } else {
            ts.len() == 1 || ts.len() == 2
        };
        if !ok {
            return Err(SurfaceError::NonManifoldEdge(a, b, ts.len()));
        }
    }

    // vertex links: opposite edges must form a single cycle or path
    let mut link: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for &t in triangles {
        for k in 0..3 {
            link.entry(t[k])
                .or_default()
                .push((t[(k + 1) % 3], t[(k + 2) % 3]));
        }
    }
    let mut link_vertices: Vec<_> = link.keys().copied().collect();
    link_vertices.sort_unstable();
    for v in link_vertices {
        if !link_is_cycle_or_path(&link[&v], closed) {
            return Err(SurfaceError::BadVertexLink(v));
        }
    }

    let mut uf = UnionFind::new(triangles.len());
    for ts in edges.values() {
        for w in ts.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let (labels, k) = uf.labels();
    let mut comps: Vec<ComponentInfo> = (0..k)
        .map(|_| ComponentInfo {
            vertices: vec![],
            triangles: vec![],
            chi: 0,
            orientable: true,
            boundary_edges: 0,
        })
        .collect();
    for (i, &t) in triangles.iter().enumerate() {
        let c = &mut comps[labels[i]];
        c.triangles.push(i);
        c.vertices.extend_from_slice(&t);
    }
    for c in &mut comps {
        c.vertices.sort_unstable();
        c.vertices.dedup();
    }
    let mut comp_edges = vec![0i64; k];
    for ((_, _), ts) in &edges {
        let c = labels[ts[0]];
        comp_edges[c] += 1;
        if ts.len() == 1 {
            comps[c].boundary_edges += 1;
        }
    }
    for (ci, c) in comps.iter_mut().enumerate() {
        c.chi = c.vertices.len() as i64 - comp_edges[ci] + c.triangles.len() as i64;
    }

    // orientation propagation; a conflict marks the component non-orientable
    let mut orient: Vec<Option<Tri>> = vec![None; triangles.len()];
    for start in 0..triangles.len() {
        if orient[start].is_some() {
            continue;
        }
        orient[start] = Some(triangles[start]);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let t = orient[i].unwrap();
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                for &j in &edges[&edge_key(a, b)] {
                    if j == i {
                        continue;
                    }
                    // neighbour must traverse the shared edge as b -> a
                    match orient[j] {
                        None => {
                            let u = triangles[j];
                            let fixed = if has_directed(u, b, a) {
                                u
                            } else {
                                [u[0], u[2], u[1]]
                            };
                            orient[j] = Some(fixed);
                            queue.push_back(j);
                        }
                        Some(u) => {
                            if !has_directed(u, b, a) {
                                comps[labels[j]].orientable = false;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(comps)
}

fn has_directed(t: Tri, a: usize, b: usize) -> bool {
    (t[0] == a && t[1] == b) || (t[1] == a && t[2] == b) || (t[2] == a && t[0] == b)
}

fn link_is_cycle_or_path(edges: &[(usize, usize)], closed: bool) -> bool {
    let mut deg: HashMap<usize, usize> = HashMap::new();
    for &(a, b) in edges {
        if a == b {
            return false;
        }
        *deg.entry(a).or_default() += 1;
        *deg.entry(b).or_default() += 1;
    }
    let ones = deg.values().filter(|&&d| d == 1).count();
    if deg.values().any(|&d| d > 2) {
        return false;
    }
    if closed && ones > 0 {
        return false;
    }
    if ones != 0 && ones != 2 {
        return false;
    }
    // connected?
    let verts: Vec<usize> = deg.keys().copied().collect();
    let index: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(verts.len());
    for &(a, b) in edges {
        uf.union(index[&a], index[&b]);
    }
    let root = uf.find(0);
    (0..verts.len()).all(|i| uf.find(i) == root)
}

/// Classifies every connected component of a closed surface.
pub fn classify_triangles(
    n_vertices: usize,
    triangles: &[Tri],
) -> Result<Vec<ClassifiedComponent>, SurfaceError> {
    let comps = analyze(n_vertices, triangles, true)?;
    let mut out = Vec::with_capacity(comps.len());
    for c in comps {
        let label = SurfaceLabel::from_invariants(c.chi, c.orientable).ok_or(
            SurfaceError::ImpossibleSurface {
                chi: c.chi,
                orientable: c.orientable,
            },
        )?;
        out.push(ClassifiedComponent {
            vertices: c.vertices,
            label,
        });
    }
    out.sort_by(|a, b| a.vertices[0].cmp(&b.vertices[0]));
    Ok(out)
}

/// True when the triangles form a single disk.
pub fn is_disk(n_vertices: usize, triangles: &[Tri]) -> bool {
    match analyze(n_vertices, triangles, false) {
        Ok(c) => c.len() == 1 && c[0].chi == 1 && c[0].boundary_edges > 0,
        Err(_) => false,
    }
}

/// True when the triangles form a single 2-sphere.
pub fn is_sphere(n_vertices: usize, triangles: &[Tri]) -> bool {
    matches!(classify_triangles(n_vertices, triangles).as_deref(), Ok([c]) if c.label == SurfaceLabel::SPHERE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra_boundary() -> Vec<Tri> {
        vec![[0, 1, 2], [0, 3, 1], [1, 3, 2], [0, 2, 3]]
    }

    /// Seven-vertex torus.
    pub(crate) fn torus7() -> Vec<Tri> {
        let mut t = Vec::new();
        for i in 0..7 {
            t.push([i, (i + 1) % 7, (i + 3) % 7]);
            t.push([i, (i + 2) % 7, (i + 3) % 7]);
        }
        t
    }

    #[test]
    fn tetrahedron_is_sphere() {
        let c = classify_triangles(4, &tetra_boundary()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].label, SurfaceLabel(0));
    }

    #[test]
    fn seven_vertex_torus() {
        // chi = 7 - 21 + 14 = 0 and propagation succeeds
        let comps = analyze(7, &torus7(), true).unwrap();
        assert_eq!(comps[0].chi, 0);
        assert!(comps[0].orientable);
        assert_eq!(
            classify_triangles(7, &torus7()).unwrap()[0].label,
            SurfaceLabel(1)
        );
    }

    #[test]
    fn non_manifold_edge_detected() {
        let mut t = tetra_boundary();
        t.push([0, 1, 4]);
        assert!(matches!(
            classify_triangles(5, &t),
            Err(SurfaceError::NonManifoldEdge(0, 1, 3))
        ));
    }

    #[test]
    fn pinched_vertex_detected() {
        // two tetrahedron boundaries sharing vertex 0
        let mut t = tetra_boundary();
        t.extend([[0, 4, 5], [0, 6, 4], [4, 6, 5], [0, 5, 6]]);
        assert!(matches!(
            classify_triangles(7, &t),
            Err(SurfaceError::BadVertexLink(0))
        ));
    }

    #[test]
    fn disk_check() {
        assert!(is_disk(4, &[[0, 1, 2], [0, 2, 3]]));
        assert!(!is_disk(4, &tetra_boundary()));
    }
}
