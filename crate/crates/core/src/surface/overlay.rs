//! Overlay of two subdivisions of the same anchored base mesh.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::mesh::{recipe_layout, Anchor, AnchorPoint, SurfaceMesh};
use crate::complex::{sorted3, Tri};
use crate::error::SurfaceError;
use crate::rational::{self, Rational};

/// Canonical name of a point of the base mesh, independent of which base
/// triangle it is expressed in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointKey {
    Vertex(usize),
    /// `(1 - t) * u + t * w` with `u < w` and `0 < t < 1`.
    Edge(usize, usize, Rational),
    Interior(usize, [Rational; 3]),
}

impl PointKey {
    /// Barycentric coordinates in base triangle `index` with corners `tri`,
    /// or `None` if the point is not in its closure.
    pub fn coords_in(&self, index: usize, tri: &Tri) -> Option<Vec<Rational>> {
        let mut out = vec![rational::zero(); 3];
        match self {
            PointKey::Vertex(v) => {
                out[tri.iter().position(|x| x == v)?] = rational::one();
            }
            PointKey::Edge(u, w, t) => {
                out[tri.iter().position(|x| x == u)?] = rational::one() - t;
                out[tri.iter().position(|x| x == w)?] = t.clone();
            }
            PointKey::Interior(i, bary) => {
                if *i != index {
                    return None;
                }
                out = bary.to_vec();
            }
        }
        Some(out)
    }
}

pub fn point_key(base: &[Tri], point: &AnchorPoint) -> PointKey {
    key_from_bary(point.triangle, &base[point.triangle], &point.bary)
}

fn key_from_bary(index: usize, tri: &Tri, bary: &[Rational]) -> PointKey {
    let nonzero: Vec<usize> = (0..3).filter(|&k| !bary[k].is_zero()).collect();
    match nonzero.as_slice() {
        [k] => PointKey::Vertex(tri[*k]),
        [i, j] => {
            let (u, w, t) = if tri[*i] < tri[*j] {
                (tri[*i], tri[*j], &bary[*j])
            } else {
                (tri[*j], tri[*i], &bary[*i])
            };
            PointKey::Edge(u, w, t.clone())
        }
        _ => PointKey::Interior(index, [bary[0].clone(), bary[1].clone(), bary[2].clone()]),
    }
}

/// Base triangle containing triangle `t`, with the corners' barycentric coordinates there.
pub(crate) fn locate_triangle(
    base: &[Tri],
    anchor: &Anchor,
    t: Tri,
) -> Option<(usize, [Vec<Rational>; 3])> {
    let keys: Vec<PointKey> = t
        .iter()
        .map(|&v| point_key(base, &anchor.points[v]))
        .collect();
    base.iter().enumerate().find_map(|(bi, b)| {
        let c: Vec<Vec<Rational>> = keys
            .iter()
            .map(|k| k.coords_in(bi, b))
            .collect::<Option<_>>()?;
        let [c0, c1, c2]: [Vec<Rational>; 3] = c.try_into().ok()?;
        Some((bi, [c0, c1, c2]))
    })
}

type Point2 = (Rational, Rational);

/// Clipped polygons of one mesh, grouped by base triangle.
type Located = Vec<Vec<(usize, Vec<Point2>)>>;

fn to2(b: &[Rational]) -> Point2 {
    (b[1].clone(), b[2].clone())
}

fn to_bary(p: &Point2) -> Vec<Rational> {
    vec![rational::one() - &p.0 - &p.1, p.0.clone(), p.1.clone()]
}

fn cross(o: &Point2, a: &Point2, b: &Point2) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn ccw(mut poly: Vec<Point2>) -> Vec<Point2> {
    if cross(&poly[0], &poly[1], &poly[2]).is_negative() {
        poly.reverse();
    }
    poly
}

fn area2(poly: &[Point2]) -> Rational {
    let mut s = rational::zero();
    for i in 1..poly.len().saturating_sub(1) {
        s += cross(&poly[0], &poly[i], &poly[i + 1]);
    }
    s
}

/// Intersection of two convex counter-clockwise polygons.
fn clip(subject: &[Point2], clipper: &[Point2]) -> Vec<Point2> {
    let mut out = subject.to_vec();
    for i in 0..clipper.len() {
        if out.is_empty() {
            break;
        }
        let (p, q) = (&clipper[i], &clipper[(i + 1) % clipper.len()]);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let (s, e) = (&input[j], &input[(j + 1) % input.len()]);
            let (ds, de) = (cross(p, q, s), cross(p, q, e));
            if !ds.is_negative() {
                out.push(s.clone());
            }
            if (ds.is_negative() && de.is_positive()) || (ds.is_positive() && de.is_negative()) {
                let t = &ds / (&ds - &de);
                out.push((&s.0 + (&e.0 - &s.0) * &t, &s.1 + (&e.1 - &s.1) * &t));
            }
        }
        out.dedup();
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
    }
    out
}

fn on_segment(a: &Point2, b: &Point2, p: &Point2) -> bool {
    if !cross(a, b, p).is_zero() || p == a || p == b {
        return false;
    }
    let dot = (&p.0 - &a.0) * (&b.0 - &a.0) + (&p.1 - &a.1) * (&b.1 - &a.1);
    let len = (&b.0 - &a.0) * (&b.0 - &a.0) + (&b.1 - &a.1) * (&b.1 - &a.1);
    dot.is_positive() && dot < len
}

/// Common subdivision of two meshes anchored to the same scheme and recipe.
#[derive(Clone, Debug)]
pub struct Overlay {
    pub mesh: SurfaceMesh,
    /// Overlay vertex of each vertex of the first mesh.
    pub from_first: Vec<usize>,
    pub from_second: Vec<usize>,
}

impl Overlay {
    pub fn is_identity(&self) -> bool {
        let id = |m: &[usize]| m.iter().enumerate().all(|(i, &x)| i == x);
        id(&self.from_first)
            && id(&self.from_second)
            && self.from_first.len() == self.mesh.n_vertices
    }
}

struct Builder {
    index: HashMap<PointKey, usize>,
    points: Vec<AnchorPoint>,
}

impl Builder {
    fn vertex(&mut self, key: PointKey, triangle: usize, bary: Vec<Rational>) -> usize {
        let next = self.points.len();
        *self.index.entry(key).or_insert_with(|| {
            self.points.push(AnchorPoint { triangle, bary });
            next
        })
    }
}

pub fn common_refinement(m1: &SurfaceMesh, m2: &SurfaceMesh) -> Result<Overlay, SurfaceError> {
    let (a1, a2) = match (&m1.anchor, &m2.anchor) {
        (Some(a1), Some(a2)) => (a1, a2),
        _ => return Err(SurfaceError::MissingAnchor),
    };
    if a1.scheme != a2.scheme || a1.recipe != a2.recipe {
        return Err(SurfaceError::AnchorMismatch);
    }
    let base = recipe_layout(&a1.recipe).triangles;
    let locate = |mesh: &SurfaceMesh, anchor: &Anchor| -> Result<Located, SurfaceError> {
        let mut per_base = vec![Vec::new(); base.len()];
        for (ti, &t) in mesh.triangles.iter().enumerate() {
            let (bi, corners) =
                locate_triangle(&base, anchor, t).ok_or(SurfaceError::AnchorMismatch)?;
            per_base[bi].push((ti, corners.iter().map(|c| to2(c)).collect()));
        }
        Ok(per_base)
    };
    let cells1 = locate(m1, a1)?;
    let cells2 = locate(m2, a2)?;

    let mut builder = Builder {
        index: HashMap::new(),
        points: Vec::new(),
    };
    for p in &a1.points {
        builder.vertex(point_key(&base, p), p.triangle, p.bary.clone());
    }
    if builder.points.len() != m1.n_vertices {
        return Err(SurfaceError::Invalid(
            "anchor assigns one point to two vertices".into(),
        ));
    }
    let from_first: Vec<usize> = (0..m1.n_vertices).collect();
    let from_second: Vec<usize> = a2
        .points
        .iter()
        .map(|p| builder.vertex(point_key(&base, p), p.triangle, p.bary.clone()))
        .collect();

    // faces of the overlay, grouped by base triangle, tagged with the m1 triangle they refine
    let mut faces: Vec<(usize, usize, Vec<Point2>)> = Vec::new();
    for bi in 0..base.len() {
        for (t1, poly1) in &cells1[bi] {
            let poly1 = ccw(poly1.clone());
            for (_, poly2) in &cells2[bi] {
                let piece = clip(&poly1, &ccw(poly2.clone()));
                if piece.len() >= 3 && area2(&piece).is_positive() {
                    faces.push((*t1, bi, piece));
                }
            }
        }
    }
    faces.sort_by_key(|f| f.0);

    let mut triangles = Vec::new();
    let mut by_base: HashMap<usize, Vec<Point2>> = HashMap::new();
    for (_, bi, piece) in &faces {
        by_base
            .entry(*bi)
            .or_default()
            .extend(piece.iter().cloned());
    }
    for (t1, bi, piece) in &faces {
        let candidates = &by_base[bi];
        let mut ring = Vec::new();
        for i in 0..piece.len() {
            let (a, b) = (&piece[i], &piece[(i + 1) % piece.len()]);
            ring.push(a.clone());
            let mut extra: Vec<&Point2> =
                candidates.iter().filter(|p| on_segment(a, b, p)).collect();
            extra.sort_by(|p, q| {
                let dp = (&p.0 - &a.0).abs() + (&p.1 - &a.1).abs();
                let dq = (&q.0 - &a.0).abs() + (&q.1 - &a.1).abs();
                dp.cmp(&dq)
            });
            extra.dedup();
            ring.extend(extra.into_iter().cloned());
        }
        let tri = &base[*bi];
        let ids: Vec<usize> = ring
            .iter()
            .map(|p| {
                let b = to_bary(p);
                builder.vertex(key_from_bary(*bi, tri, &b), *bi, b)
            })
            .collect();
        let original = m1.triangles[*t1];
        // keep the orientation of the refined m1 triangle
        let flip = {
            let c = locate_triangle(&base, a1, original).unwrap().1;
            cross(&to2(&c[0]), &to2(&c[1]), &to2(&c[2])).is_negative()
        };
        if ids.len() == 3 {
            if sorted3([ids[0], ids[1], ids[2]]) == sorted3(original) {
                triangles.push(original);
            } else if flip {
                triangles.push([ids[0], ids[2], ids[1]]);
            } else {
                triangles.push([ids[0], ids[1], ids[2]]);
            }
            continue;
        }
        let n = ring.len() as i64;
        let centroid = ring
            .iter()
            .fold((rational::zero(), rational::zero()), |acc, p| {
                (acc.0 + &p.0, acc.1 + &p.1)
            });
        let centroid = (centroid.0 / rational::int(n), centroid.1 / rational::int(n));
        let b = to_bary(&centroid);
        let c = builder.vertex(key_from_bary(*bi, tri, &b), *bi, b);
        for i in 0..ids.len() {
            let (x, y) = (ids[i], ids[(i + 1) % ids.len()]);
            triangles.push(if flip { [y, x, c] } else { [x, y, c] });
        }
    }

    let mesh = SurfaceMesh {
        n_vertices: builder.points.len(),
        triangles,
        spares: Vec::new(),
        anchor: Some(Anchor {
            scheme: a1.scheme.clone(),
            recipe: a1.recipe.clone(),
            points: builder.points,
        }),
    };
    Ok(Overlay {
        mesh,
        from_first,
        from_second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SurfaceLabel;
    use crate::surface::mesh::{classify_surface, generate_surface, refine_stellar};

    fn labels(m: &SurfaceMesh) -> Vec<SurfaceLabel> {
        classify_surface(m)
            .unwrap()
            .into_iter()
            .map(|c| c.label)
            .collect()
    }

    #[test]
    fn identical_meshes_give_identity() {
        let m = generate_surface(SurfaceLabel(1), 1);
        let o = common_refinement(&m, &m).unwrap();
        assert!(o.is_identity());
        assert_eq!(o.mesh.triangles, m.triangles);
    }

    #[test]
    fn coarse_vertices_survive_in_fine_overlay() {
        let coarse = generate_surface(SurfaceLabel(0), 1);
        let fine = generate_surface(SurfaceLabel(0), 2);
        let o = common_refinement(&coarse, &fine).unwrap();
        assert_eq!(o.mesh.n_vertices, fine.n_vertices);
        assert_eq!(o.mesh.euler_characteristic(), 2);
        assert_eq!(labels(&o.mesh), vec![SurfaceLabel(0)]);
    }

    #[test]
    fn different_subdivisions_of_a_torus() {
        let base = generate_surface(SurfaceLabel(1), 1);
        let a = generate_surface(SurfaceLabel(1), 2);
        let b = refine_stellar(&base);
        let o = common_refinement(&a, &b).unwrap();
        assert_eq!(o.mesh.euler_characteristic(), 0);
        assert_eq!(labels(&o.mesh), vec![SurfaceLabel(1)]);
        assert!(o.mesh.n_vertices > a.n_vertices.max(b.n_vertices));
    }

    #[test]
    fn refinement_of_projective_plane() {
        let a = generate_surface(SurfaceLabel(-3), 2);
        let b = refine_stellar(&generate_surface(SurfaceLabel(-3), 1));
        let o = common_refinement(&a, &b).unwrap();
        assert_eq!(labels(&o.mesh), vec![SurfaceLabel(-3)]);
    }

    #[test]
    fn mismatched_anchors_rejected() {
        let a = generate_surface(SurfaceLabel(1), 1);
        let b = generate_surface(SurfaceLabel(2), 1);
        assert_eq!(
            common_refinement(&a, &b).unwrap_err(),
            SurfaceError::AnchorMismatch
        );
        let plain = SurfaceMesh::new(a.n_vertices, a.triangles.clone());
        assert_eq!(
            common_refinement(&a, &plain).unwrap_err(),
            SurfaceError::MissingAnchor
        );
    }
}
