//! Primitive surfaces every canonical triangulation is chained from.
//!
//! The torus and Klein bottle pieces are the boundaries of a solid torus and a
//! solid Klein bottle built as a triangle times a 4-cycle, so the matching
//! solids reuse the vertex numbering unchanged.

use serde::{Deserialize, Serialize};

use crate::complex::{prism_cycle, TetMesh, Tri};
use crate::model::SurfaceLabel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Piece {
    Sphere,
    Torus,
    Klein,
    Projective,
}

impl Piece {
    pub fn label(self) -> SurfaceLabel {
        match self {
            Piece::Sphere => SurfaceLabel::SPHERE,
            Piece::Torus => SurfaceLabel::TORUS,
            Piece::Klein => SurfaceLabel::KLEIN_BOTTLE,
            Piece::Projective => SurfaceLabel::PROJECTIVE_PLANE,
        }
    }
}

/// A primitive surface with two vertex-disjoint gluing triangles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceSurface {
    pub n_vertices: usize,
    pub triangles: Vec<Tri>,
    /// Triangle consumed when something is chained on the left.
    pub left: Tri,
    pub right: Tri,
}

pub(crate) const CYCLE_LAYERS: usize = 4;

/// Solid torus (`twisted = false`) or solid Klein bottle as triangle x 4-cycle.
pub fn solid_handle(twisted: bool) -> TetMesh {
    let twist: [usize; 3] = if twisted { [1, 0, 2] } else { [0, 1, 2] };
    prism_cycle(&[[0, 1, 2]], 3, CYCLE_LAYERS, &twist)
}

fn octahedron() -> Vec<Tri> {
    // +x=0 -x=1 +y=2 -y=3 +z=4 -z=5, triangles oriented outward
    let mut out = Vec::new();
    for (x, sx) in [(0, 1), (1, -1)] {
        for (y, sy) in [(2, 1), (3, -1)] {
            for (z, sz) in [(4, 1), (5, -1)] {
                if sx * sy * sz > 0 {
                    out.push([x, y, z]);
                } else {
                    out.push([x, z, y]);
                }
            }
        }
    }
    out
}

/// Six-vertex projective plane.
pub fn projective_plane6() -> Vec<Tri> {
    vec![
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 5, 1],
        [1, 2, 4],
        [2, 3, 5],
        [3, 4, 1],
        [4, 5, 2],
        [5, 1, 3],
    ]
}

/// Splits every triangle into four through edge midpoints.
/// Returns the new triangles, the vertex count and the midpoint map.
pub fn midpoint_subdivide(
    n_vertices: usize,
    triangles: &[Tri],
) -> (
    usize,
    Vec<Tri>,
    std::collections::BTreeMap<(usize, usize), usize>,
) {
    let mut mids = std::collections::BTreeMap::new();
    let mut next = n_vertices;
    for t in triangles {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            mids.entry((a.min(b), a.max(b))).or_insert_with(|| {
                next += 1;
                next - 1
            });
        }
    }
    let mid = |a: usize, b: usize| mids[&(a.min(b), a.max(b))];
    let mut out = Vec::with_capacity(triangles.len() * 4);
    for &[a, b, c] in triangles {
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        out.push([a, ab, ca]);
        out.push([ab, b, bc]);
        out.push([ca, bc, c]);
        out.push([ab, bc, ca]);
    }
    (next, out, mids)
}

fn choose_gluing_triangles(triangles: &[Tri]) -> (Tri, Tri) {
    let left = triangles[0];
    let right = *triangles
        .iter()
        .rev()
        .find(|t| t.iter().all(|v| !left.contains(v)))
        .expect("piece has two vertex-disjoint triangles");
    (left, right)
}

pub fn piece_surface(piece: Piece) -> PieceSurface {
    let (n_vertices, triangles) = match piece {
        Piece::Sphere => (6, octahedron()),
        Piece::Torus | Piece::Klein => {
            let solid = solid_handle(piece == Piece::Klein);
            (solid.n_vertices, solid.boundary_triangles())
        }
        Piece::Projective => {
            let (n, t, _) = midpoint_subdivide(6, &projective_plane6());
            (n, t)
        }
    };
    let (left, right) = choose_gluing_triangles(&triangles);
    PieceSurface {
        n_vertices,
        triangles,
        left,
        right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::classify::classify_triangles;

    #[test]
    fn pieces_classify() {
        for piece in [Piece::Sphere, Piece::Torus, Piece::Klein, Piece::Projective] {
            let s = piece_surface(piece);
            let c = classify_triangles(s.n_vertices, &s.triangles).unwrap();
            assert_eq!(c.len(), 1, "{piece:?}");
            assert_eq!(c[0].label, piece.label(), "{piece:?}");
            assert!(s.left.iter().all(|v| !s.right.contains(v)));
        }
    }

    #[test]
    fn minimal_projective_plane() {
        let c = classify_triangles(6, &projective_plane6()).unwrap();
        assert_eq!(c[0].label, SurfaceLabel(-1));
    }
}
