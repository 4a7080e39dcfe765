//! Cores: compact 3-manifolds whose boundary components are chained piece
//! surfaces, together with the gluing operations that build them.
//!
//! Every boundary component carries, for each piece of its recipe, the core
//! vertex of every piece-surface vertex. Chaining pieces identifies the right
//! triangle of one piece with the left triangle of the next, exactly as
//! [`recipe_layout`] does for surfaces, so a component's triangulation is
//! always the layout of its recipe.

use serde::{Deserialize, Serialize};

use crate::complex::{prism_stack, sorted3, TetMesh, Tri};
use crate::error::ForgeError;
use crate::model::SurfaceLabel;
use crate::surface::{
    canonical_recipe, piece_surface, recipe_label, recipe_layout, solid_handle, Piece,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bottom,
    Top,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Bottom => Side::Top,
            Side::Top => Side::Bottom,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreComponent {
    pub side: Side,
    pub recipe: Vec<Piece>,
    /// `pieces[i][x]`: core vertex of vertex `x` of piece `i`.
    pub pieces: Vec<Vec<usize>>,
}

impl CoreComponent {
    pub fn label(&self) -> SurfaceLabel {
        recipe_label(&self.recipe)
    }

    pub fn is_canonical(&self) -> bool {
        self.recipe == canonical_recipe(self.label())
    }

    /// Core vertex of each vertex of the recipe layout.
    pub fn layout_map(&self) -> Vec<usize> {
        let layout = recipe_layout(&self.recipe);
        let mut map = vec![usize::MAX; layout.n_vertices];
        for (i, pm) in layout.piece_maps.iter().enumerate() {
            for (x, &v) in pm.iter().enumerate() {
                map[v] = self.pieces[i][x];
            }
        }
        map
    }

    pub fn left(&self) -> Tri {
        piece_surface(self.recipe[0])
            .left
            .map(|x| self.pieces[0][x])
    }

    pub fn right(&self) -> Tri {
        let last = self.recipe.len() - 1;
        piece_surface(self.recipe[last])
            .right
            .map(|x| self.pieces[last][x])
    }

    fn remap(&mut self, remap: &[usize], offset: usize) {
        for p in &mut self.pieces {
            for v in p.iter_mut() {
                *v = remap[*v + offset];
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Core {
    pub mesh: TetMesh,
    pub components: Vec<CoreComponent>,
}

/// A solid with one or two boundary ends, each a copy of a piece surface.
struct Solid {
    mesh: TetMesh,
    ends: Vec<Vec<usize>>,
}

/// Layer 0 of a one-layer collar is the outer surface; layer 1 is glued to `inner`.
fn collared(piece: Piece, inner: TetMesh) -> Solid {
    let s = piece_surface(piece);
    let n = s.n_vertices;
    let mut mesh = prism_stack(&s.triangles, n, 1);
    let offset = mesh.append(&inner);
    let pairs: Vec<(usize, usize)> = (0..n).map(|x| (n + x, offset + x)).collect();
    let remap = mesh.identify(&pairs);
    Solid {
        mesh,
        ends: vec![(0..n).map(|x| remap[x]).collect()],
    }
}

fn solid(piece: Piece) -> Solid {
    match piece {
        Piece::Sphere => {
            let s = piece_surface(Piece::Sphere);
            let inner = TetMesh::new(
                7,
                s.triangles.iter().map(|t| [t[0], t[1], t[2], 6]).collect(),
            );
            collared(piece, inner)
        }
        Piece::Torus => collared(piece, solid_handle(false)),
        Piece::Klein => collared(piece, solid_handle(true)),
        Piece::Projective => {
            let s = piece_surface(Piece::Projective);
            let n = s.n_vertices;
            let mesh = prism_stack(&s.triangles, n, 3);
            Solid {
                mesh,
                ends: vec![(0..n).collect(), (0..n).map(|x| 3 * n + x).collect()],
            }
        }
    }
}

impl Core {
    /// Tetrahedra whose four vertices avoid the boundary.
    pub fn interior_tets(&self) -> Vec<usize> {
        let boundary = self.mesh.boundary_vertex_mask();
        (0..self.mesh.tets.len())
            .filter(|&i| self.mesh.tets[i].iter().all(|&v| !boundary[v]))
            .collect()
    }

    fn identify(&mut self, pairs: &[(usize, usize)]) {
        let remap = self.mesh.identify(pairs);
        for c in &mut self.components {
            c.remap(&remap, 0);
        }
    }

    /// Appends `other` as a disjoint piece; returns the vertex offset.
    fn absorb(&mut self, other: Core) -> usize {
        let offset = self.mesh.append(&other.mesh);
        for mut c in other.components {
            for p in &mut c.pieces {
                for v in p.iter_mut() {
                    *v += offset;
                }
            }
            self.components.push(c);
        }
        offset
    }

    fn check(&self) -> Result<(), ForgeError> {
        if let Some(d) = self.mesh.simplicial_defects().first() {
            return Err(ForgeError::Gluing(d.clone()));
        }
        if let Some(d) = self.mesh.link_defects().first() {
            return Err(ForgeError::Gluing(d.to_string()));
        }
        let boundary = self.mesh.boundary_triangles();
        let mut declared: Vec<Tri> = Vec::new();
        for c in &self.components {
            let map = c.layout_map();
            declared.extend(
                recipe_layout(&c.recipe)
                    .triangles
                    .iter()
                    .map(|t| sorted3(t.map(|x| map[x]))),
            );
        }
        declared.sort_unstable();
        if declared != boundary {
            return Err(ForgeError::Gluing(
                "boundary does not match the declared components".into(),
            ));
        }
        Ok(())
    }
}

/// Joins the connected components of the core by interior connected sums:
/// one tetrahedron with no boundary vertex is removed from each side and the
/// two tetrahedron boundaries are identified.
fn join_components(core: &mut Core) -> Result<(), ForgeError> {
    loop {
        let (labels, count) = core.mesh.components();
        if count <= 1 {
            return Ok(());
        }
        let interior = core.interior_tets();
        let pick = |c: usize| {
            interior
                .iter()
                .copied()
                .find(|&t| labels[core.mesh.tets[t][0]] == c)
                .ok_or(ForgeError::NoInteriorTet)
        };
        let (ta, tb) = (pick(0)?, pick(1)?);
        let (hi, lo) = (ta.max(tb), ta.min(tb));
        let t_hi = core.mesh.remove_tet(hi);
        let t_lo = core.mesh.remove_tet(lo);
        let pairs: Vec<(usize, usize)> = (0..4).map(|k| (t_lo[k], t_hi[k])).collect();
        core.identify(&pairs);
    }
}

/// Connected sum of two cores through the interior; components keep their order.
pub fn interior_sum(mut a: Core, b: Core) -> Result<Core, ForgeError> {
    a.absorb(b);
    join_components(&mut a)?;
    Ok(a)
}

/// Boundary connected sum joining the right end of component `i` of `a` to the
/// left end of component `j` of `b`. The summed component replaces `i`; the other
/// components of `b` follow those of `a`.
pub fn boundary_sum(mut a: Core, i: usize, b: Core, j: usize) -> Result<Core, ForgeError> {
    let (ca, cb) = match (a.components.get(i), b.components.get(j)) {
        (Some(ca), Some(cb)) => (ca, cb),
        _ => return Err(ForgeError::BadPick(format!("components {i} and {j}"))),
    };
    if ca.side != cb.side {
        return Err(ForgeError::BadPick(
            "picked components lie on different sides".into(),
        ));
    }
    let right = ca.right();
    let n_a = a.components.len();
    a.absorb(b);
    let left = a.components[n_a + j].left();
    let pairs: Vec<(usize, usize)> = (0..3).map(|k| (right[k], left[k])).collect();
    a.identify(&pairs);
    let tail = a.components.remove(n_a + j);
    a.components[i].recipe.extend(tail.recipe);
    a.components[i].pieces.extend(tail.pieces);
    Ok(a)
}

/// Glues a one-layer collar onto component `i`; the component then lives on
/// the collar's outer layer.
pub fn add_collar(mut core: Core, i: usize) -> Core {
    let layout = recipe_layout(&core.components[i].recipe);
    let n = layout.n_vertices;
    let inner = core.components[i].layout_map();
    let collar = prism_stack(&layout.triangles, n, 1);
    let offset = core.mesh.append(&collar);
    let pairs: Vec<(usize, usize)> = (0..n).map(|x| (inner[x], offset + n + x)).collect();
    core.components[i].pieces = layout
        .piece_maps
        .iter()
        .map(|pm| pm.iter().map(|&x| offset + x).collect())
        .collect();
    core.identify(&pairs);
    core
}

/// A core whose boundary components have the given recipes. Each sphere,
/// torus and Klein piece is filled by a ball, solid torus or solid Klein
/// bottle; projective pieces are paired in order by copies of RP^2 x I.
/// Pieces are chained along their gluing triangles and the resulting pieces
/// are joined by interior connected sums.
pub fn realize(components: &[(Side, Vec<Piece>)]) -> Result<Core, ForgeError> {
    if components.iter().any(|(_, r)| r.is_empty()) {
        return Err(ForgeError::Plan("empty recipe".into()));
    }
    let projective: Vec<(usize, usize)> = components
        .iter()
        .enumerate()
        .flat_map(|(c, (_, r))| {
            r.iter()
                .enumerate()
                .filter(|(_, &p)| p == Piece::Projective)
                .map(move |(i, _)| (c, i))
        })
        .collect();
    if projective.len() % 2 == 1 {
        return Err(ForgeError::Parity {
            odd: projective.len(),
        });
    }
    let mut core = Core {
        mesh: TetMesh::default(),
        components: components
            .iter()
            .map(|(side, r)| CoreComponent {
                side: *side,
                recipe: r.clone(),
                pieces: vec![Vec::new(); r.len()],
            })
            .collect(),
    };
    for (c, (_, recipe)) in components.iter().enumerate() {
        for (i, &piece) in recipe.iter().enumerate() {
            if piece != Piece::Projective {
                let s = solid(piece);
                let offset = core.mesh.append(&s.mesh);
                core.components[c].pieces[i] = s.ends[0].iter().map(|&v| v + offset).collect();
            }
        }
    }
    for pair in projective.chunks(2) {
        let s = solid(Piece::Projective);
        let offset = core.mesh.append(&s.mesh);
        for (&(c, i), end) in pair.iter().zip(&s.ends) {
            core.components[c].pieces[i] = end.iter().map(|&v| v + offset).collect();
        }
    }
    let mut pairs = Vec::new();
    for comp in &core.components {
        for i in 1..comp.recipe.len() {
            let right = piece_surface(comp.recipe[i - 1]).right;
            let left = piece_surface(comp.recipe[i]).left;
            pairs.extend((0..3).map(|k| (comp.pieces[i - 1][right[k]], comp.pieces[i][left[k]])));
        }
    }
    core.identify(&pairs);
    join_components(&mut core)?;
    core.check()?;
    Ok(core)
}

/// Replaces component `i` by the canonical triangulation of its label,
/// gluing a realized cobordism between the two recipes onto it.
pub fn normalize(mut core: Core, i: usize) -> Result<Core, ForgeError> {
    let comp = &core.components[i];
    if comp.is_canonical() {
        return Ok(core);
    }
    let side = comp.side;
    let cobordism = realize(&[
        (side, comp.recipe.clone()),
        (side, canonical_recipe(comp.label())),
    ])?;
    let cobordism = add_collar(cobordism, 0);
    let n = core.components.len();
    let inner = core.components[i].layout_map();
    core.absorb(cobordism);
    let outer = core.components[n].layout_map();
    let pairs: Vec<(usize, usize)> = inner.iter().zip(&outer).map(|(&a, &b)| (a, b)).collect();
    core.identify(&pairs);
    let canonical = core.components.remove(n + 1);
    core.components.remove(n);
    core.components[i] = CoreComponent { side, ..canonical };
    Ok(core)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::classify_triangles;

    fn boundary_labels(core: &Core) -> Vec<SurfaceLabel> {
        let b = core.mesh.boundary_triangles();
        let mut out: Vec<_> = classify_triangles(core.mesh.n_vertices, &b)
            .unwrap()
            .into_iter()
            .map(|c| c.label)
            .collect();
        out.sort();
        out
    }

    fn canon(r: i64) -> Vec<Piece> {
        canonical_recipe(SurfaceLabel(r))
    }

    #[test]
    fn solids_are_manifolds() {
        for piece in [Piece::Sphere, Piece::Torus, Piece::Klein, Piece::Projective] {
            let s = solid(piece);
            assert!(s.mesh.link_defects().is_empty(), "{piece:?}");
            assert!(s.mesh.simplicial_defects().is_empty(), "{piece:?}");
        }
        assert_eq!(solid(Piece::Sphere).mesh.euler_characteristic(), 1);
        assert_eq!(solid(Piece::Torus).mesh.euler_characteristic(), 0);
        assert_eq!(solid(Piece::Klein).mesh.euler_characteristic(), 0);
        assert_eq!(solid(Piece::Projective).mesh.euler_characteristic(), 1);
    }

    #[test]
    fn fillings() {
        for r in [0, 1, 2, 3, -2, -4, -6] {
            let core = realize(&[(Side::Top, canon(r))]).unwrap();
            assert_eq!(boundary_labels(&core), vec![SurfaceLabel(r)]);
            // a compact 3-manifold has chi equal to half the chi of its boundary
            assert_eq!(
                core.mesh.euler_characteristic(),
                SurfaceLabel(r).euler_char() / 2
            );
        }
    }

    #[test]
    fn odd_pairs_and_mixed() {
        let core = realize(&[
            (Side::Bottom, canon(-1)),
            (Side::Top, canon(-3)),
            (Side::Top, canon(2)),
        ])
        .unwrap();
        assert_eq!(
            boundary_labels(&core),
            vec![SurfaceLabel(-3), SurfaceLabel(-1), SurfaceLabel(2)]
        );
        assert_eq!(core.mesh.components().1, 1);
        assert_eq!(
            realize(&[(Side::Top, canon(-1))]).unwrap_err(),
            ForgeError::Parity { odd: 1 }
        );
    }

    #[test]
    fn self_paired_projective_pieces() {
        let core = realize(&[(
            Side::Top,
            vec![Piece::Projective, Piece::Klein, Piece::Projective],
        )])
        .unwrap();
        assert_eq!(boundary_labels(&core), vec![SurfaceLabel(-4)]);
    }

    #[test]
    fn sums_and_normalization() {
        let a = realize(&[(Side::Bottom, canon(0)), (Side::Top, canon(1))]).unwrap();
        let b = realize(&[(Side::Bottom, canon(0)), (Side::Top, canon(-2))]).unwrap();
        let s = interior_sum(a.clone(), b.clone()).unwrap();
        assert_eq!(s.components.len(), 4);
        assert_eq!(s.mesh.components().1, 1);
        s.check().unwrap();

        let t = boundary_sum(a, 1, b, 1).unwrap();
        t.check().unwrap();
        assert_eq!(t.components.len(), 3);
        assert_eq!(t.components[1].recipe, vec![Piece::Torus, Piece::Klein]);
        assert!(!t.components[1].is_canonical());
        let n = normalize(t, 1).unwrap();
        n.check().unwrap();
        assert_eq!(n.components[1].recipe, canon(-4));
        assert_eq!(n.components[1].side, Side::Top);
        assert_eq!(
            boundary_labels(&n),
            vec![SurfaceLabel(-4), SurfaceLabel(0), SurfaceLabel(0)]
        );
    }

    #[test]
    fn collar_keeps_boundary() {
        let a = realize(&[(Side::Top, canon(-3)), (Side::Top, canon(-1))]).unwrap();
        let c = add_collar(a, 1);
        c.check().unwrap();
        assert!(c.components[1].is_canonical());
    }
}
