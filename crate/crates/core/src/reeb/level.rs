//! Marching-tetrahedra level sets at regular values.

use std::collections::HashMap;

use crate::complex::{sorted3, TetMesh, Tri};
use crate::error::ReebError;
use crate::model::SurfaceLabel;
use crate::rational::{format_rational, Rational};
use crate::surface::{classify_triangles, SurfaceMesh};

/// A level set `f = t`. Vertex `i` sits on mesh edge `edges[i]` at parameter
/// `params[i]` measured from the lower-indexed endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    pub mesh: SurfaceMesh,
    pub edges: Vec<(usize, usize)>,
    pub params: Vec<Rational>,
}

impl LevelSet {
    /// Labels of the components, ordered by their smallest slice vertex.
    pub fn labels(&self) -> Result<Vec<SurfaceLabel>, ReebError> {
        Ok(
            classify_triangles(self.mesh.n_vertices, &self.mesh.triangles)?
                .into_iter()
                .map(|c| c.label)
                .collect(),
        )
    }
}

pub(crate) fn check_values(mesh: &TetMesh, values: &[Rational]) -> Result<(), ReebError> {
    if values.len() != mesh.n_vertices {
        return Err(ReebError::ValueCount(values.len(), mesh.n_vertices));
    }
    Ok(())
}

/// Slice of the PL function `values` on `mesh` at the regular value `t`.
pub fn level_set(mesh: &TetMesh, values: &[Rational], t: &Rational) -> Result<LevelSet, ReebError> {
    check_values(mesh, values)?;
    if mesh
        .used_vertex_mask()
        .iter()
        .zip(values)
        .any(|(&u, v)| u && v == t)
    {
        return Err(ReebError::LayerValue(format_rational(t)));
    }
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut slice_vertex = |a: usize, b: usize| -> usize {
        let key = (a.min(b), a.max(b));
        let next = edges.len();
        *index.entry(key).or_insert_with(|| {
            edges.push(key);
            next
        })
    };
    let mut triangles: Vec<Tri> = Vec::new();
    for tet in &mesh.tets {
        let (below, above): (Vec<usize>, Vec<usize>) = tet.iter().partition(|&&v| &values[v] < t);
        match (below.len(), above.len()) {
            (1, 3) | (3, 1) => {
                let (apex, rest) = if below.len() == 1 {
                    (below[0], &above)
                } else {
                    (above[0], &below)
                };
                triangles.push([
                    slice_vertex(apex, rest[0]),
                    slice_vertex(apex, rest[1]),
                    slice_vertex(apex, rest[2]),
                ]);
            }
            (2, 2) => {
                let (b, c) = (&below, &above);
                let corners = [(b[0], c[0]), (b[0], c[1]), (b[1], c[1]), (b[1], c[0])];
                let quad = corners.map(|(x, y)| slice_vertex(x, y));
                // split along the diagonal through the corner on the lowest mesh edge
                let start = (0..4)
                    .min_by_key(|&k| {
                        (
                            corners[k].0.min(corners[k].1),
                            corners[k].0.max(corners[k].1),
                        )
                    })
                    .unwrap();
                let q = |k: usize| quad[(start + k) % 4];
                triangles.push([q(0), q(1), q(2)]);
                triangles.push([q(0), q(2), q(3)]);
            }
            _ => {}
        }
    }
    let params = edges
        .iter()
        .map(|&(a, b)| (t - &values[a]) / (&values[b] - &values[a]))
        .collect();
    let n = edges.len();
    debug_assert!(triangles.iter().all(|t| sorted3(*t)[0] != sorted3(*t)[1]));
    Ok(LevelSet {
        mesh: SurfaceMesh::new(n, triangles),
        edges,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::prism_stack;
    use crate::rational::{int, ratio};
    use crate::surface::generate_surface;

    fn layered(label: i64, layers: usize) -> (TetMesh, Vec<Rational>) {
        let s = generate_surface(SurfaceLabel(label), 1);
        let mesh = prism_stack(&s.triangles, s.n_vertices, layers);
        let values = (0..mesh.n_vertices)
            .map(|v| int((v / s.n_vertices) as i64))
            .collect();
        (mesh, values)
    }

    #[test]
    fn product_slices_classify() {
        for r in [-3, -2, -1, 0, 1, 2] {
            let (mesh, values) = layered(r, 2);
            for t in [ratio(1, 2), ratio(3, 2), ratio(1, 7)] {
                let l = level_set(&mesh, &values, &t).unwrap();
                assert_eq!(l.labels().unwrap(), vec![SurfaceLabel(r)]);
            }
        }
    }

    #[test]
    fn layer_value_rejected() {
        let (mesh, values) = layered(0, 2);
        assert_eq!(
            level_set(&mesh, &values, &int(1)).unwrap_err(),
            ReebError::LayerValue("1".into())
        );
    }

    #[test]
    fn slice_parameters_exact() {
        let (mesh, values) = layered(0, 1);
        let l = level_set(&mesh, &values, &ratio(1, 3)).unwrap();
        assert!(l.params.iter().all(|p| *p == ratio(1, 3)));
    }
}
