use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::classify::{classify_triangles, ClassifiedComponent};
use super::overlay::locate_triangle;
use super::pieces::{midpoint_subdivide, piece_surface, Piece};
use super::scheme::PolygonScheme;
use crate::complex::{sorted3, Tri};
use crate::error::SurfaceError;
use crate::model::{connected_sum_label, SurfaceLabel};
use crate::rational::{self, Rational};

/// Location of a vertex inside the refinement-1 base mesh of its recipe:
/// a base triangle and exact barycentric coordinates with respect to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorPoint {
    pub triangle: usize,
    #[serde(with = "rational::vec")]
    pub bary: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    pub scheme: PolygonScheme,
    /// Chain of primitive pieces the base mesh is glued from.
    pub recipe: Vec<Piece>,
    pub points: Vec<AnchorPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "MeshDoc", try_from = "MeshDoc")]
pub struct SurfaceMesh {
    pub n_vertices: usize,
    pub triangles: Vec<Tri>,
    /// Triangles reserved for connected sums; pairwise vertex-disjoint.
    pub spares: Vec<Tri>,
    pub anchor: Option<Anchor>,
}

/// On-disk layout: vertices are listed explicitly as `0..n`.
#[derive(Serialize, Deserialize)]
struct MeshDoc {
    vertices: Vec<usize>,
    triangles: Vec<Tri>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    spares: Vec<Tri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anchor: Option<Anchor>,
}

impl From<SurfaceMesh> for MeshDoc {
    fn from(m: SurfaceMesh) -> Self {
        MeshDoc {
            vertices: (0..m.n_vertices).collect(),
            triangles: m.triangles,
            spares: m.spares,
            anchor: m.anchor,
        }
    }
}

impl TryFrom<MeshDoc> for SurfaceMesh {
    type Error = SurfaceError;

    fn try_from(d: MeshDoc) -> Result<Self, SurfaceError> {
        let n = d.vertices.len();
        if d.vertices.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(SurfaceError::Invalid(
                "vertices must be listed as 0..n".into(),
            ));
        }
        if let Some(t) = d
            .triangles
            .iter()
            .chain(&d.spares)
            .find(|t| t.iter().any(|&v| v >= n))
        {
            return Err(SurfaceError::Invalid(format!(
                "triangle {t:?} uses an unknown vertex"
            )));
        }
        if let Some(a) = &d.anchor {
            if a.points.len() != n {
                return Err(SurfaceError::Invalid(
                    "anchor must give one point per vertex".into(),
                ));
            }
        }
        Ok(SurfaceMesh {
            n_vertices: n,
            triangles: d.triangles,
            spares: d.spares,
            anchor: d.anchor,
        })
    }
}

impl SurfaceMesh {
    pub fn new(n_vertices: usize, triangles: Vec<Tri>) -> Self {
        SurfaceMesh {
            n_vertices,
            triangles,
            spares: Vec::new(),
            anchor: None,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        let mut used = vec![false; self.n_vertices];
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
                used[t[k]] = true;
            }
        }
        used.iter().filter(|&&u| u).count() as i64 - edges.len() as i64
            + self.triangles.len() as i64
    }
}

pub fn classify_surface(mesh: &SurfaceMesh) -> Result<Vec<ClassifiedComponent>, SurfaceError> {
    classify_triangles(mesh.n_vertices, &mesh.triangles)
}

/// Chain of pieces used for the canonical triangulation of a label.
pub fn canonical_recipe(label: SurfaceLabel) -> Vec<Piece> {
    let r = label.0;
    if r == 0 {
        vec![Piece::Sphere]
    } else if r > 0 {
        vec![Piece::Torus; r as usize]
    } else if r % 2 == 0 {
        vec![Piece::Klein; (-r / 2) as usize]
    } else {
        let mut out = vec![Piece::Projective];
        out.extend(std::iter::repeat_n(Piece::Klein, ((-r - 1) / 2) as usize));
        out
    }
}

pub fn recipe_label(recipe: &[Piece]) -> SurfaceLabel {
    recipe
        .iter()
        .map(|p| p.label())
        .reduce(connected_sum_label)
        .expect("recipe is non-empty")
}

/// Vertex bookkeeping for a chained surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecipeLayout {
    pub n_vertices: usize,
    pub triangles: Vec<Tri>,
    /// `piece_maps[i][x]` is the chain vertex of vertex `x` of piece `i`.
    pub piece_maps: Vec<Vec<usize>>,
    pub left: Tri,
    pub right: Tri,
}

/// Glues the pieces left to right: the right triangle of each piece is
/// identified position-wise with the left triangle of the next, and both are removed.
pub fn recipe_layout(recipe: &[Piece]) -> RecipeLayout {
    assert!(!recipe.is_empty(), "empty recipe");
    let mut next = 0;
    let mut triangles = Vec::new();
    let mut piece_maps = Vec::with_capacity(recipe.len());
    let mut prev_right: Option<Tri> = None;
    let mut left = [0; 3];
    for (i, &piece) in recipe.iter().enumerate() {
        let s = piece_surface(piece);
        let mut map = vec![usize::MAX; s.n_vertices];
        if let Some(pr) = prev_right {
            for k in 0..3 {
                map[s.left[k]] = pr[k];
            }
        }
        for slot in map.iter_mut() {
            if *slot == usize::MAX {
                *slot = next;
                next += 1;
            }
        }
        let last = i + 1 == recipe.len();
        for &t in &s.triangles {
            if (i > 0 && sorted3(t) == sorted3(s.left)) || (!last && sorted3(t) == sorted3(s.right))
            {
                continue;
            }
            triangles.push([map[t[0]], map[t[1]], map[t[2]]]);
        }
        if i == 0 {
            left = s.left.map(|x| map[x]);
        }
        prev_right = Some(s.right.map(|x| map[x]));
        piece_maps.push(map);
    }
    RecipeLayout {
        n_vertices: next,
        triangles,
        piece_maps,
        left,
        right: prev_right.unwrap(),
    }
}

fn vertex_anchor_points(n_vertices: usize, triangles: &[Tri]) -> Vec<AnchorPoint> {
    let mut points: Vec<Option<AnchorPoint>> = vec![None; n_vertices];
    for (ti, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            if points[t[k]].is_none() {
                let mut bary = vec![rational::zero(); 3];
                bary[k] = rational::one();
                points[t[k]] = Some(AnchorPoint { triangle: ti, bary });
            }
        }
    }
    points
        .into_iter()
        .map(|p| p.expect("every vertex lies in a triangle"))
        .collect()
}

/// Refinement-1 mesh of a recipe, anchored to itself.
pub fn recipe_surface(recipe: &[Piece]) -> SurfaceMesh {
    let layout = recipe_layout(recipe);
    let label = recipe_label(recipe);
    let points = vertex_anchor_points(layout.n_vertices, &layout.triangles);
    SurfaceMesh {
        n_vertices: layout.n_vertices,
        spares: vec![layout.left, layout.right],
        triangles: layout.triangles,
        anchor: Some(Anchor {
            scheme: PolygonScheme::canonical(label),
            recipe: recipe.to_vec(),
            points,
        }),
    }
}

/// Canonical anchored closed surface for `label`, midpoint-subdivided
/// `refinement - 1` times.
pub fn generate_surface(label: SurfaceLabel, refinement: usize) -> SurfaceMesh {
    let mut mesh = recipe_surface(&canonical_recipe(label));
    for _ in 1..refinement.max(1) {
        mesh = refine_midpoint(&mesh);
    }
    mesh
}

/// Midpoint subdivision that carries anchors and spare disks along.
pub fn refine_midpoint(mesh: &SurfaceMesh) -> SurfaceMesh {
    let (n, triangles, mids) = midpoint_subdivide(mesh.n_vertices, &mesh.triangles);
    let spares = mesh
        .spares
        .iter()
        .map(|&[a, b, c]| {
            let m = |x: usize, y: usize| mids[&(x.min(y), x.max(y))];
            [m(a, b), m(b, c), m(c, a)]
        })
        .collect();
    let anchor = mesh.anchor.as_ref().map(|anchor| {
        let mut points: Vec<Option<AnchorPoint>> =
            anchor.points.iter().cloned().map(Some).collect();
        points.resize(n, None);
        let base = recipe_layout(&anchor.recipe).triangles;
        for &t in &mesh.triangles {
            let (bi, corners) = locate_triangle(&base, anchor, t).expect("anchored triangle");
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                let m = mids[&(t[i].min(t[j]), t[i].max(t[j]))];
                if points[m].is_none() {
                    let bary = (0..3)
                        .map(|k| rational::midpoint(&corners[i][k], &corners[j][k]))
                        .collect();
                    points[m] = Some(AnchorPoint { triangle: bi, bary });
                }
            }
        }
        Anchor {
            scheme: anchor.scheme.clone(),
            recipe: anchor.recipe.clone(),
            points: points.into_iter().map(Option::unwrap).collect(),
        }
    });
    SurfaceMesh {
        n_vertices: n,
        triangles,
        spares,
        anchor,
    }
}

/// Splits every triangle into three through a new centroid vertex.
pub fn refine_stellar(mesh: &SurfaceMesh) -> SurfaceMesh {
    let mut n = mesh.n_vertices;
    let mut triangles = Vec::with_capacity(mesh.triangles.len() * 3);
    let mut new_points = Vec::new();
    let base = mesh
        .anchor
        .as_ref()
        .map(|a| recipe_layout(&a.recipe).triangles);
    for &t in &mesh.triangles {
        let c = n;
        n += 1;
        triangles.extend([[t[0], t[1], c], [t[1], t[2], c], [t[2], t[0], c]]);
        if let (Some(anchor), Some(base)) = (&mesh.anchor, &base) {
            let (bi, corners) = locate_triangle(base, anchor, t).expect("anchored triangle");
            let third = rational::ratio(1, 3);
            let bary = (0..3)
                .map(|k| (&corners[0][k] + &corners[1][k] + &corners[2][k]) * &third)
                .collect();
            new_points.push(AnchorPoint { triangle: bi, bary });
        }
    }
    let anchor = mesh.anchor.as_ref().map(|a| {
        let mut points = a.points.clone();
        points.extend(new_points);
        Anchor {
            scheme: a.scheme.clone(),
            recipe: a.recipe.clone(),
            points,
        }
    });
    // a spare disk is now three triangles around the centroid; keep the first
    let spares = mesh
        .spares
        .iter()
        .map(|s| {
            let idx = mesh
                .triangles
                .iter()
                .position(|t| sorted3(*t) == sorted3(*s))
                .unwrap();
            triangles[3 * idx]
        })
        .collect();
    SurfaceMesh {
        n_vertices: n,
        triangles,
        spares,
        anchor,
    }
}

fn find_triangle(mesh: &SurfaceMesh, disk: Tri) -> Result<usize, SurfaceError> {
    let key = sorted3(disk);
    mesh.triangles
        .iter()
        .position(|t| sorted3(*t) == key)
        .ok_or(SurfaceError::NotADisk(key[0]))
}

/// Removes the two disks and glues their boundary circles position-wise
/// (`d2[k]` onto `d1[k]`). Vertices of `m1` keep their numbers; the remaining
/// vertices of `m2` follow in increasing order.
pub fn connected_sum_mesh(
    m1: &SurfaceMesh,
    d1: Tri,
    m2: &SurfaceMesh,
    d2: Tri,
) -> Result<SurfaceMesh, SurfaceError> {
    let i1 = find_triangle(m1, d1)?;
    let i2 = find_triangle(m2, d2)?;
    let mut map = vec![usize::MAX; m2.n_vertices];
    for k in 0..3 {
        map[d2[k]] = d1[k];
    }
    let mut next = m1.n_vertices;
    for slot in map.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let mut triangles: Vec<Tri> = m1
        .triangles
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != i1)
        .map(|(_, &t)| t)
        .collect();
    triangles.extend(
        m2.triangles
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != i2)
            .map(|(_, t)| t.map(|x| map[x])),
    );
    let used1 = sorted3(d1);
    let used2 = sorted3(d2);
    let mut spares: Vec<Tri> = m1
        .spares
        .iter()
        .filter(|s| sorted3(**s) != used1)
        .copied()
        .collect();
    spares.extend(
        m2.spares
            .iter()
            .filter(|s| sorted3(**s) != used2)
            .map(|s| s.map(|x| map[x]))
            .filter(|s| s.iter().all(|v| !d1.contains(v))),
    );

    // anchors survive when the sum is exactly a chain concatenation at base level
    let anchor = match (&m1.anchor, &m2.anchor) {
        (Some(a1), Some(a2))
            if m1.n_vertices == recipe_layout(&a1.recipe).n_vertices
                && m2.n_vertices == recipe_layout(&a2.recipe).n_vertices
                && m1.spares.last().map(|s| sorted3(*s)) == Some(used1)
                && m2.spares.first().copied() == Some(d2)
                && m1.spares.last() == Some(&d1) =>
        {
            let mut recipe = a1.recipe.clone();
            recipe.extend(&a2.recipe);
            Some(recipe)
        }
        _ => None,
    };
    let mut out = SurfaceMesh {
        n_vertices: next,
        triangles,
        spares,
        anchor: None,
    };
    if let Some(recipe) = anchor {
        let layout = recipe_surface(&recipe);
        if layout.triangles == out.triangles {
            out.anchor = layout.anchor;
        }
    }
    Ok(out)
}

/// OFF text with cosmetic coordinates on a sphere spiral.
pub fn to_off(mesh: &SurfaceMesh) -> String {
    let mut out = String::from("OFF\n");
    let _ = writeln!(out, "{} {} 0", mesh.n_vertices, mesh.triangles.len());
    let n = mesh.n_vertices.max(1) as f64;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for i in 0..mesh.n_vertices {
        let y = 1.0 - 2.0 * (i as f64 + 0.5) / n;
        let r = (1.0 - y * y).sqrt();
        let theta = golden * i as f64;
        let _ = writeln!(
            out,
            "{:.6} {:.6} {:.6}",
            r * theta.cos(),
            y,
            r * theta.sin()
        );
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn parse_mesh(text: &str) -> Result<SurfaceMesh, SurfaceError> {
    serde_json::from_str(text).map_err(|e| SurfaceError::Invalid(e.to_string()))
}

pub fn mesh_to_json(mesh: &SurfaceMesh) -> String {
    serde_json::to_string(mesh).expect("mesh serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label_of(mesh: &SurfaceMesh) -> Vec<SurfaceLabel> {
        classify_surface(mesh)
            .unwrap()
            .into_iter()
            .map(|c| c.label)
            .collect()
    }

    #[test]
    fn generated_surfaces_classify() {
        for r in -6..=6 {
            for k in 1..=2 {
                let m = generate_surface(SurfaceLabel(r), k);
                assert_eq!(label_of(&m), vec![SurfaceLabel(r)], "r={r} k={k}");
                assert!(m.spares.len() >= 2);
                assert!(m.spares[0].iter().all(|v| !m.spares[1].contains(v)));
            }
        }
    }

    #[test]
    fn examples() {
        let s = generate_surface(SurfaceLabel(0), 1);
        assert_eq!(s.euler_characteristic(), 2);
        assert_eq!(s.n_vertices, 6);
        let k = generate_surface(SurfaceLabel(-2), 1);
        let comps = super::super::classify::analyze(k.n_vertices, &k.triangles, true).unwrap();
        assert_eq!((comps[0].chi, comps[0].orientable), (0, false));
        let p = generate_surface(SurfaceLabel(-1), 1);
        assert_eq!(p.euler_characteristic(), 1);
        assert_eq!(label_of(&p), vec![SurfaceLabel(-1)]);
    }

    #[test]
    fn sums_match_oracle() {
        let cases = [
            (0, 0, 0),
            (1, 1, 2),
            (1, 2, 3),
            (-1, 1, -3),
            (-1, -1, -2),
            (-2, 3, -8),
        ];
        for (a, b, want) in cases {
            let (m1, m2) = (
                generate_surface(SurfaceLabel(a), 1),
                generate_surface(SurfaceLabel(b), 1),
            );
            let s = connected_sum_mesh(&m1, m1.spares[1], &m2, m2.spares[0]).unwrap();
            assert_eq!(label_of(&s), vec![SurfaceLabel(want)], "{a} # {b}");
            assert_eq!(
                s.euler_characteristic(),
                m1.euler_characteristic() + m2.euler_characteristic() - 2
            );
            assert_eq!(
                connected_sum_label(SurfaceLabel(a), SurfaceLabel(b)),
                SurfaceLabel(want)
            );
        }
    }

    #[test]
    fn chain_sum_keeps_anchor() {
        let (m1, m2) = (
            generate_surface(SurfaceLabel(1), 1),
            generate_surface(SurfaceLabel(2), 1),
        );
        let s = connected_sum_mesh(&m1, m1.spares[1], &m2, m2.spares[0]).unwrap();
        assert_eq!(
            s.anchor.as_ref().unwrap().recipe,
            canonical_recipe(SurfaceLabel(3))
        );
        assert_eq!(s.triangles, generate_surface(SurfaceLabel(3), 1).triangles);
    }

    #[test]
    fn sum_rejects_unknown_disk() {
        let m = generate_surface(SurfaceLabel(0), 1);
        assert!(connected_sum_mesh(&m, [0, 1, 9], &m, m.spares[0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = generate_surface(SurfaceLabel(-3), 2);
        let text = mesh_to_json(&m);
        assert!(text.starts_with("{\"vertices\":[0,"));
        assert_eq!(parse_mesh(&text).unwrap(), m);
        assert!(parse_mesh(r#"{"vertices":[0,1],"triangles":[[0,1,2]]}"#).is_err());
    }

    #[test]
    fn off_header() {
        let off = to_off(&generate_surface(SurfaceLabel(0), 1));
        assert!(off.starts_with("OFF\n6 8 0\n"));
    }

    proptest::proptest! {
        #[test]
        fn sum_of_meshes_matches_label_arithmetic(a in -4i64..=4, b in -4i64..=4, k in 1usize..=2) {
            let m1 = generate_surface(SurfaceLabel(a), k);
            let m2 = generate_surface(SurfaceLabel(b), 1);
            let s = connected_sum_mesh(&m1, m1.spares[1], &m2, m2.spares[0]).unwrap();
            proptest::prop_assert_eq!(
                label_of(&s),
                vec![connected_sum_label(SurfaceLabel(a), SurfaceLabel(b))]
            );
            proptest::prop_assert_eq!(
                s.euler_characteristic(),
                m1.euler_characteristic() + m2.euler_characteristic() - 2
            );
        }
    }
}
