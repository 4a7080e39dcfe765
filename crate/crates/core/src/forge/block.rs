//! Blocks: cores with product collars and a PL function.
//!
//! A cored block is constant (= its center value) on the core; each boundary
//! component sits at the outer end of its own collar. Level sets strictly
//! between the center and a boundary value are therefore collar slices, which
//! makes the Reeb graph a star centered at the core.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::core::{
    add_collar, boundary_sum, interior_sum, normalize, realize, Core, CoreComponent, Side,
};
use crate::complex::{prism_stack, TetMesh};
use crate::error::ForgeError;
use crate::model::SurfaceLabel;
use crate::rational::{self, Rational};
use crate::reeb::{reeb_graph, ReebGraph};
use crate::surface::{analyze, canonical_recipe, recipe_layout, Piece};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Cylinder,
    Cap,
    Junction,
    Fold,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryComponent {
    pub side: Side,
    pub label: SurfaceLabel,
    #[serde(with = "rational")]
    pub value: Rational,
    /// Anchor: the component is the layout of this recipe.
    pub recipe: Vec<Piece>,
    /// Mesh vertex of each layout vertex.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaf {
    #[serde(with = "rational")]
    pub value: Rational,
    pub label: SurfaceLabel,
}

/// Expected Reeb graph of a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contract {
    Edge {
        #[serde(with = "rational")]
        lo: Rational,
        #[serde(with = "rational")]
        hi: Rational,
        label: SurfaceLabel,
    },
    Star {
        #[serde(with = "rational")]
        center: Rational,
        leaves: Vec<Leaf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub mesh: TetMesh,
    #[serde(with = "rational::vec")]
    pub values: Vec<Rational>,
    #[serde(with = "rational")]
    pub a1: Rational,
    #[serde(with = "rational")]
    pub a2: Rational,
    #[serde(with = "rational::vec")]
    pub singular_values: Vec<Rational>,
    pub boundary: Vec<BoundaryComponent>,
    pub contract: Contract,
    /// Collar of each vertex; `None` on the core (or the middle layer of a cylinder).
    pub region: Vec<Option<usize>>,
    /// Value taken on the core.
    #[serde(with = "opt_rational")]
    pub center: Option<Rational>,
    pub core: Option<Core>,
    /// Intended singularity type; recorded, not verified.
    pub note: String,
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_some(&rational::format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| rational::parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl Block {
    pub fn labels(&self, side: Side) -> Vec<SurfaceLabel> {
        self.boundary
            .iter()
            .filter(|c| c.side == side)
            .map(|c| c.label)
            .collect()
    }

    /// Index into `boundary` of the `k`-th component on `side`.
    pub fn component_index(&self, side: Side, k: usize) -> Option<usize> {
        self.boundary
            .iter()
            .enumerate()
            .filter(|(_, c)| c.side == side)
            .nth(k)
            .map(|(i, _)| i)
    }

    pub fn reeb_graph(&self) -> Result<ReebGraph, crate::error::ReebError> {
        reeb_graph(&self.mesh, &self.values)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("block serializes")
    }

    pub fn from_json(text: &str) -> Result<Block, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn leaf_contract(center: &Rational, boundary: &[BoundaryComponent]) -> Contract {
    Contract::Star {
        center: center.clone(),
        leaves: boundary
            .iter()
            .map(|c| Leaf {
                value: c.value.clone(),
                label: c.label,
            })
            .collect(),
    }
}

/// Adds a collar to every core component and assigns values: `center` on the
/// core, `leaf(component)` on each collar's outer layer.
pub(crate) fn materialize(
    core: Core,
    kind: BlockKind,
    center: &Rational,
    leaf: impl Fn(&CoreComponent) -> Rational,
    note: &str,
) -> Block {
    let core_n = core.mesh.n_vertices;
    let mut work = core.clone();
    for i in 0..work.components.len() {
        work = add_collar(work, i);
    }
    let mut values = vec![center.clone(); work.mesh.n_vertices];
    let mut region = vec![None; work.mesh.n_vertices];
    let mut boundary = Vec::with_capacity(work.components.len());
    for (i, comp) in work.components.iter().enumerate() {
        let value = leaf(comp);
        let vertices = comp.layout_map();
        for &v in &vertices {
            debug_assert!(v >= core_n);
            values[v] = value.clone();
            region[v] = Some(i);
        }
        boundary.push(BoundaryComponent {
            side: comp.side,
            label: comp.label(),
            value,
            recipe: comp.recipe.clone(),
            vertices,
        });
    }
    let a1 = values.iter().min().unwrap().clone();
    let a2 = values.iter().max().unwrap().clone();
    Block {
        kind,
        contract: leaf_contract(center, &boundary),
        mesh: work.mesh,
        values,
        a1,
        a2,
        singular_values: vec![center.clone()],
        boundary,
        region,
        center: Some(center.clone()),
        core: Some(core),
        note: note.to_string(),
    }
}

/// Product of the canonical surface of `label` with `[a1, a2]` cut into `layers` layers.
pub fn cylinder_block_layers(
    label: SurfaceLabel,
    a1: &Rational,
    a2: &Rational,
    layers: usize,
) -> Result<Block, ForgeError> {
    if a1 >= a2 || layers == 0 {
        return Err(ForgeError::BadInterval);
    }
    let recipe = canonical_recipe(label);
    let layout = recipe_layout(&recipe);
    let n = layout.n_vertices;
    let mesh = prism_stack(&layout.triangles, n, layers);
    let step = (a2 - a1) / rational::int(layers as i64);
    let mid = layers / 2;
    let mut values = Vec::with_capacity(mesh.n_vertices);
    let mut region = Vec::with_capacity(mesh.n_vertices);
    for v in 0..mesh.n_vertices {
        let layer = v / n;
        values.push(a1 + &step * rational::int(layer as i64));
        region.push(if layers < 2 || layer == mid {
            None
        } else if layer < mid {
            Some(0)
        } else {
            Some(1)
        });
    }
    let boundary = vec![
        BoundaryComponent {
            side: Side::Bottom,
            label,
            value: a1.clone(),
            recipe: recipe.clone(),
            vertices: (0..n).collect(),
        },
        BoundaryComponent {
            side: Side::Top,
            label,
            value: a2.clone(),
            recipe,
            vertices: (0..n).map(|x| layers * n + x).collect(),
        },
    ];
    let center = (layers >= 2).then(|| a1 + &step * rational::int(mid as i64));
    Ok(Block {
        kind: BlockKind::Cylinder,
        mesh,
        values,
        a1: a1.clone(),
        a2: a2.clone(),
        singular_values: Vec::new(),
        boundary,
        contract: Contract::Edge {
            lo: a1.clone(),
            hi: a2.clone(),
            label,
        },
        region,
        center,
        core: None,
        note: "trivial bundle".into(),
    })
}

pub fn cylinder_block(
    label: SurfaceLabel,
    a1: &Rational,
    a2: &Rational,
) -> Result<Block, ForgeError> {
    cylinder_block_layers(label, a1, a2, 2)
}

/// Handlebody, ball, or boundary sum of solid Klein bottles bounding `label`,
/// constant `extreme` on the core.
pub fn cap_block(
    label: SurfaceLabel,
    extreme: &Rational,
    boundary_value: &Rational,
) -> Result<Block, ForgeError> {
    if label.is_odd_chi() {
        return Err(ForgeError::OddCap(label.0));
    }
    if extreme == boundary_value {
        return Err(ForgeError::FlatCap);
    }
    let side = if extreme < boundary_value {
        Side::Top
    } else {
        Side::Bottom
    };
    let core = realize(&[(side, canonical_recipe(label))])?;
    let note = match label.0 {
        0 => "Morse extremum",
        r if r > 0 => "Morse-Bott extremum along a handlebody spine",
        _ => "Morse-Bott extremum along the core circles of solid Klein bottles",
    };
    Ok(materialize(
        core,
        BlockKind::Cap,
        extreme,
        |_| boundary_value.clone(),
        note,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ElementaryKind {
    YSplit,
    XPass,
    GenusT,
    GenusK,
    BRp2,
    CSpecial,
}

impl ElementaryKind {
    pub const ALL: [ElementaryKind; 6] = [
        ElementaryKind::YSplit,
        ElementaryKind::XPass,
        ElementaryKind::GenusT,
        ElementaryKind::GenusK,
        ElementaryKind::BRp2,
        ElementaryKind::CSpecial,
    ];

    /// Bottom and top labels of the unflipped block.
    pub fn labels(self) -> (Vec<SurfaceLabel>, Vec<SurfaceLabel>) {
        let s = SurfaceLabel::SPHERE;
        let p = SurfaceLabel::PROJECTIVE_PLANE;
        match self {
            ElementaryKind::YSplit => (vec![s], vec![s, s]),
            ElementaryKind::XPass => (vec![s, s], vec![s, s]),
            ElementaryKind::GenusT => (vec![s], vec![SurfaceLabel::TORUS]),
            ElementaryKind::GenusK => (vec![s], vec![SurfaceLabel::KLEIN_BOTTLE]),
            ElementaryKind::BRp2 => (vec![p], vec![p]),
            ElementaryKind::CSpecial => (vec![s], vec![p, p]),
        }
    }

    pub fn parse(name: &str) -> Option<ElementaryKind> {
        ElementaryKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(name))
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementaryKind::YSplit => "Y_SPLIT",
            ElementaryKind::XPass => "X_PASS",
            ElementaryKind::GenusT => "GENUS_T",
            ElementaryKind::GenusK => "GENUS_K",
            ElementaryKind::BRp2 => "B_RP2",
            ElementaryKind::CSpecial => "C_SPECIAL",
        }
    }
}

impl fmt::Display for ElementaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn check_interval(a1: &Rational, a: &Rational, a2: &Rational) -> Result<(), ForgeError> {
    if a1 < a && a < a2 {
        Ok(())
    } else {
        Err(ForgeError::BadInterval)
    }
}

/// Core with the given bottom and top labels, each canonically triangulated.
pub(crate) fn junction_core(
    bottoms: &[SurfaceLabel],
    tops: &[SurfaceLabel],
) -> Result<Core, ForgeError> {
    let comps: Vec<(Side, Vec<Piece>)> = bottoms
        .iter()
        .map(|&l| (Side::Bottom, canonical_recipe(l)))
        .chain(tops.iter().map(|&l| (Side::Top, canonical_recipe(l))))
        .collect();
    realize(&comps)
}

pub(crate) fn junction_from_core(
    core: Core,
    a1: &Rational,
    a: &Rational,
    a2: &Rational,
    note: &str,
) -> Block {
    materialize(
        core,
        BlockKind::Junction,
        a,
        |c| {
            if c.side == Side::Bottom {
                a1.clone()
            } else {
                a2.clone()
            }
        },
        note,
    )
}

pub fn elementary_junction(
    kind: ElementaryKind,
    flipped: bool,
    a1: &Rational,
    a: &Rational,
    a2: &Rational,
) -> Result<Block, ForgeError> {
    check_interval(a1, a, a2)?;
    let (mut bottoms, mut tops) = kind.labels();
    if flipped {
        std::mem::swap(&mut bottoms, &mut tops);
    }
    let core = junction_core(&bottoms, &tops)?;
    Ok(junction_from_core(
        core,
        a1,
        a,
        a2,
        &format!("{kind}{}", if flipped { " (flipped)" } else { "" }),
    ))
}

/// Core and center of a block that can take part in a merge. A cylinder is
/// promoted to a cored block whose core is a three-layer product.
fn mergeable(b: &Block, center: Option<&Rational>) -> Result<(Core, Rational), ForgeError> {
    match b.kind {
        BlockKind::Junction => Ok((
            b.core.clone().expect("junction has a core"),
            b.center.clone().unwrap(),
        )),
        BlockKind::Cylinder => {
            let center = center
                .cloned()
                .unwrap_or_else(|| rational::midpoint(&b.a1, &b.a2));
            check_interval(&b.a1, &center, &b.a2)?;
            let recipe = b.boundary[0].recipe.clone();
            let layout = recipe_layout(&recipe);
            let n = layout.n_vertices;
            let mesh = prism_stack(&layout.triangles, n, 3);
            let comp = |side, layer: usize| CoreComponent {
                side,
                recipe: recipe.clone(),
                pieces: layout
                    .piece_maps
                    .iter()
                    .map(|pm| pm.iter().map(|&x| layer * n + x).collect())
                    .collect(),
            };
            let components = vec![comp(Side::Bottom, 0), comp(Side::Top, 3)];
            Ok((Core { mesh, components }, center))
        }
        BlockKind::Cap | BlockKind::Fold => Err(ForgeError::NotMergeable(format!(
            "{:?} blocks have no free side",
            b.kind
        ))),
    }
}

fn merge_setup(b1: &Block, b2: &Block) -> Result<(Core, Core, Rational), ForgeError> {
    if b1.a1 != b2.a1 || b1.a2 != b2.a2 {
        return Err(ForgeError::IntervalMismatch);
    }
    let fixed = [b1, b2]
        .iter()
        .find(|b| b.kind == BlockKind::Junction)
        .and_then(|b| b.center.clone());
    let (c1, a) = mergeable(b1, fixed.as_ref())?;
    let (c2, a_other) = mergeable(b2, Some(&a))?;
    if a != a_other {
        return Err(ForgeError::IntervalMismatch);
    }
    Ok((c1, c2, a))
}

/// Keeps all boundary components of both blocks apart.
pub fn merge_fig3(b1: &Block, b2: &Block) -> Result<Block, ForgeError> {
    let (c1, c2, a) = merge_setup(b1, b2)?;
    let core = interior_sum(c1, c2)?;
    Ok(junction_from_core(
        core,
        &b1.a1,
        &a,
        &b1.a2,
        "merge (disjoint)",
    ))
}

/// Replaces the `pick1`-th component of `b1` and the `pick2`-th of `b2` on
/// `side` by their connected sum.
pub fn merge_fig2(
    b1: &Block,
    b2: &Block,
    side: Side,
    pick1: usize,
    pick2: usize,
) -> Result<Block, ForgeError> {
    let (c1, c2, a) = merge_setup(b1, b2)?;
    let index = |core: &Core, k: usize| {
        core.components
            .iter()
            .enumerate()
            .filter(|(_, c)| c.side == side)
            .nth(k)
            .map(|(i, _)| i)
            .ok_or_else(|| ForgeError::BadPick(format!("no component {k} on the {side:?} side")))
    };
    let (i, j) = (index(&c1, pick1)?, index(&c2, pick2)?);
    let core = normalize(boundary_sum(c1, i, c2, j)?, i)?;
    Ok(junction_from_core(
        core,
        &b1.a1,
        &a,
        &b1.a2,
        "merge (connected sum)",
    ))
}

/// Re-assigns values so that the center sits at `vertex_value` and boundary
/// component `k` at `leaf_values[k]`, all on one side. Each collar is mapped
/// affinely; the mesh is unchanged.
pub fn fold_block(
    j: &Block,
    vertex_value: &Rational,
    direction: Direction,
    leaf_values: &[Rational],
) -> Result<Block, ForgeError> {
    let center = j
        .center
        .clone()
        .ok_or_else(|| ForgeError::Fold("block has no center layer".into()))?;
    if leaf_values.len() != j.boundary.len() {
        return Err(ForgeError::Fold(format!(
            "{} leaf values for {} boundary components",
            leaf_values.len(),
            j.boundary.len()
        )));
    }
    let wrong = leaf_values.iter().any(|l| match direction {
        Direction::Min => l <= vertex_value,
        Direction::Max => l >= vertex_value,
    });
    if wrong {
        return Err(ForgeError::Fold(
            "leaf value on the wrong side of the vertex value".into(),
        ));
    }
    let values: Vec<Rational> = j
        .values
        .iter()
        .zip(&j.region)
        .map(|(t, r)| match r {
            None => vertex_value.clone(),
            Some(k) => {
                let b = &j.boundary[*k].value;
                vertex_value + (t - &center) / (b - &center) * (&leaf_values[*k] - vertex_value)
            }
        })
        .collect();
    let side = match direction {
        Direction::Min => Side::Top,
        Direction::Max => Side::Bottom,
    };
    let boundary: Vec<BoundaryComponent> = j
        .boundary
        .iter()
        .zip(leaf_values)
        .map(|(c, l)| BoundaryComponent {
            side,
            value: l.clone(),
            ..c.clone()
        })
        .collect();
    Ok(Block {
        kind: BlockKind::Fold,
        a1: values.iter().min().unwrap().clone(),
        a2: values.iter().max().unwrap().clone(),
        contract: leaf_contract(vertex_value, &boundary),
        mesh: j.mesh.clone(),
        values,
        singular_values: vec![vertex_value.clone()],
        boundary,
        region: j.region.clone(),
        center: Some(vertex_value.clone()),
        core: None,
        note: format!("fold of {}", j.note),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    pub clauses: Vec<Clause>,
    #[serde(skip)]
    pub reeb: Option<ReebGraph>,
}

impl BlockReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Clause> {
        self.clauses.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for BlockReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(
                f,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

fn first_few<T: fmt::Display>(items: &[T]) -> String {
    let shown: Vec<String> = items.iter().take(3).map(|d| d.to_string()).collect();
    let more = if items.len() > 3 {
        format!(" (+{} more)", items.len() - 3)
    } else {
        String::new()
    };
    format!("{}{more}", shown.join("; "))
}

fn check_contract(contract: &Contract, g: &ReebGraph) -> Result<(), String> {
    match contract {
        Contract::Edge { lo, hi, label } => {
            let ok = g.nodes.len() == 2
                && g.edges.len() == 1
                && g.nodes[g.edges[0].lo].value == *lo
                && g.nodes[g.edges[0].hi].value == *hi
                && g.edges[0].label == *label;
            if ok {
                Ok(())
            } else {
                Err(format!(
                    "expected a single edge {label}, got {} nodes and {} edges",
                    g.nodes.len(),
                    g.edges.len()
                ))
            }
        }
        Contract::Star { center, leaves } => {
            if g.nodes.len() != leaves.len() + 1 || g.edges.len() != leaves.len() {
                return Err(format!(
                    "expected a star with {} nodes, got {} nodes and {} edges",
                    leaves.len() + 1,
                    g.nodes.len(),
                    g.edges.len()
                ));
            }
            let c = (0..g.nodes.len())
                .find(|&c| g.nodes[c].value == *center && g.degree(c) == leaves.len())
                .ok_or_else(|| format!("no node of degree {} at the center value", leaves.len()))?;
            let mut found: Vec<(Rational, SurfaceLabel)> = g
                .edges
                .iter()
                .map(|e| {
                    let other = if e.lo == c { e.hi } else { e.lo };
                    (g.nodes[other].value.clone(), e.label)
                })
                .collect();
            if g.edges.iter().any(|e| e.lo != c && e.hi != c) {
                return Err("an edge avoids the center".into());
            }
            let mut want: Vec<(Rational, SurfaceLabel)> =
                leaves.iter().map(|l| (l.value.clone(), l.label)).collect();
            found.sort();
            want.sort();
            if found != want {
                return Err("leaf values or labels differ from the contract".into());
            }
            Ok(())
        }
    }
}

/// Independent checks of a block against its declared data.
pub fn verify_block(b: &Block) -> BlockReport {
    let mut clauses = Vec::new();
    let mut push = |name, passed, detail: String| {
        clauses.push(Clause {
            name,
            passed,
            detail,
        })
    };

    let defects = b.mesh.simplicial_defects();
    push(
        "simplicial",
        defects.is_empty(),
        if defects.is_empty() {
            "ok".into()
        } else {
            first_few(&defects)
        },
    );
    let links = b.mesh.link_defects();
    push(
        "link condition",
        links.is_empty(),
        if links.is_empty() {
            "ok".into()
        } else {
            first_few(&links)
        },
    );

    let boundary = b.mesh.boundary_triangles();
    let boundary_result = analyze(b.mesh.n_vertices, &boundary, true)
        .map_err(|e| e.to_string())
        .and_then(|comps| {
            if comps.len() != b.boundary.len() {
                return Err(format!(
                    "{} boundary components, {} declared",
                    comps.len(),
                    b.boundary.len()
                ));
            }
            for (k, declared) in b.boundary.iter().enumerate() {
                let mut vs = declared.vertices.clone();
                vs.sort_unstable();
                let comp = comps
                    .iter()
                    .find(|c| c.vertices == vs)
                    .ok_or(format!("component {k} is not a boundary component"))?;
                let label = SurfaceLabel::from_invariants(comp.chi, comp.orientable);
                if label != Some(declared.label) {
                    return Err(format!(
                        "component {k} classifies as {label:?}, declared {}",
                        declared.label
                    ));
                }
                if vs.iter().any(|&v| b.values[v] != declared.value) {
                    return Err(format!("component {k} is not a level set"));
                }
            }
            Ok(())
        });
    push(
        "boundary",
        boundary_result.is_ok(),
        boundary_result.err().unwrap_or_else(|| "ok".into()),
    );

    let lo = b.values.iter().min();
    let hi = b.values.iter().max();
    let image_ok = lo == Some(&b.a1) && hi == Some(&b.a2);
    push(
        "image",
        image_ok,
        format!(
            "[{}, {}]",
            rational::format_rational(&b.a1),
            rational::format_rational(&b.a2)
        ),
    );

    let parity = |side| {
        b.boundary
            .iter()
            .filter(|c| c.side == side)
            .map(|c| c.label.euler_char())
            .sum::<i64>()
    };
    let parity_ok = (parity(Side::Bottom) - parity(Side::Top)) % 2 == 0;
    push(
        "parity",
        parity_ok,
        format!(
            "chi bottom {} top {}",
            parity(Side::Bottom),
            parity(Side::Top)
        ),
    );

    let mut reeb = None;
    match b.reeb_graph() {
        Ok(g) => {
            let contract = check_contract(&b.contract, &g);
            push(
                "reeb contract",
                contract.is_ok(),
                contract
                    .err()
                    .unwrap_or_else(|| format!("{} nodes", g.nodes.len())),
            );
            let leaf_values: Vec<&Rational> = b.boundary.iter().map(|c| &c.value).collect();
            let mut singular: Vec<Rational> = g
                .nodes
                .iter()
                .enumerate()
                .filter(|(i, n)| !(g.degree(*i) == 1 && leaf_values.contains(&&n.value)))
                .map(|(_, n)| n.value.clone())
                .collect();
            singular.sort();
            singular.dedup();
            let mut declared = b.singular_values.clone();
            declared.sort();
            let list = |v: &[Rational]| {
                v.iter()
                    .map(rational::format_rational)
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            push(
                "singular values",
                singular == declared,
                format!(
                    "found [{}], declared [{}]",
                    list(&singular),
                    list(&declared)
                ),
            );
            reeb = Some(g);
        }
        Err(e) => push("reeb contract", false, e.to_string()),
    }
    BlockReport { clauses, reeb }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn l(r: i64) -> SurfaceLabel {
        SurfaceLabel(r)
    }

    fn assert_verified(b: &Block) {
        let report = verify_block(b);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn cylinders() {
        for r in [0, -2, 3, -1] {
            let b = cylinder_block(l(r), &int(0), &int(1)).unwrap();
            assert_verified(&b);
        }
        assert_eq!(
            cylinder_block(l(0), &int(1), &int(1)).unwrap_err(),
            ForgeError::BadInterval
        );
    }

    #[test]
    fn caps() {
        for r in [0, 1, 2, -2, -4] {
            let b = cap_block(l(r), &int(0), &int(1)).unwrap();
            assert_verified(&b);
            let top = cap_block(l(r), &int(5), &int(4)).unwrap();
            assert_verified(&top);
        }
        for r in (-9..=-1).step_by(2) {
            assert_eq!(
                cap_block(l(r), &int(0), &int(1)).unwrap_err(),
                ForgeError::OddCap(r)
            );
        }
    }

    #[test]
    fn elementary_blocks() {
        for kind in ElementaryKind::ALL {
            for flipped in [false, true] {
                let b = elementary_junction(kind, flipped, &int(0), &int(1), &int(2)).unwrap();
                assert_verified(&b);
                let (mut bottoms, mut tops) = kind.labels();
                if flipped {
                    std::mem::swap(&mut bottoms, &mut tops);
                }
                assert_eq!(b.labels(Side::Bottom), bottoms);
                assert_eq!(b.labels(Side::Top), tops);
            }
        }
    }

    #[test]
    fn fig3_examples() {
        let (a1, a, a2) = (int(0), int(1), int(2));
        let b = elementary_junction(ElementaryKind::BRp2, false, &a1, &a, &a2).unwrap();
        let m = merge_fig3(&b, &b).unwrap();
        assert_verified(&m);
        assert_eq!(m.labels(Side::Bottom), vec![l(-1), l(-1)]);

        let c = cylinder_block(l(0), &a1, &a2).unwrap();
        let m = merge_fig3(&c, &c).unwrap();
        assert_verified(&m);
        assert_eq!(m.reeb_graph().unwrap().edges.len(), 4);

        let t = elementary_junction(ElementaryKind::GenusT, false, &a1, &a, &a2).unwrap();
        let m = merge_fig3(&b, &t).unwrap();
        assert_verified(&m);
        assert_eq!(
            (m.labels(Side::Bottom), m.labels(Side::Top)),
            (vec![l(-1), l(0)], vec![l(-1), l(1)])
        );
    }

    #[test]
    fn fig2_examples() {
        let (a1, a, a2) = (int(0), int(1), int(2));
        let c = elementary_junction(ElementaryKind::CSpecial, false, &a1, &a, &a2).unwrap();
        let m = merge_fig2(&c, &c, Side::Bottom, 0, 0).unwrap();
        assert_verified(&m);
        assert_eq!(
            (m.labels(Side::Bottom), m.labels(Side::Top)),
            (vec![l(0)], vec![l(-1); 4])
        );

        let m = merge_fig2(
            &cylinder_block(l(1), &a1, &a2).unwrap(),
            &cylinder_block(l(2), &a1, &a2).unwrap(),
            Side::Top,
            0,
            0,
        )
        .unwrap();
        assert_verified(&m);
        assert_eq!(
            (m.labels(Side::Bottom), m.labels(Side::Top)),
            (vec![l(1), l(2)], vec![l(3)])
        );

        let y = elementary_junction(ElementaryKind::YSplit, false, &a1, &a, &a2).unwrap();
        let m = merge_fig2(
            &y,
            &cylinder_block(l(0), &a1, &a2).unwrap(),
            Side::Top,
            0,
            0,
        )
        .unwrap();
        assert_verified(&m);
        assert_eq!(
            (m.labels(Side::Bottom), m.labels(Side::Top)),
            (vec![l(0), l(0)], vec![l(0), l(0)])
        );
    }

    #[test]
    fn merge_preconditions() {
        let b =
            elementary_junction(ElementaryKind::BRp2, false, &int(0), &int(1), &int(2)).unwrap();
        let other =
            elementary_junction(ElementaryKind::BRp2, false, &int(0), &int(1), &int(3)).unwrap();
        assert_eq!(
            merge_fig3(&b, &other).unwrap_err(),
            ForgeError::IntervalMismatch
        );
        assert!(matches!(
            merge_fig2(&b, &b, Side::Top, 3, 0).unwrap_err(),
            ForgeError::BadPick(_)
        ));
        let cap = cap_block(l(0), &int(0), &int(2)).unwrap();
        assert!(matches!(
            merge_fig3(&cap, &b).unwrap_err(),
            ForgeError::NotMergeable(_)
        ));
    }

    #[test]
    fn folds() {
        let y =
            elementary_junction(ElementaryKind::YSplit, false, &int(0), &int(1), &int(2)).unwrap();
        let f = fold_block(&y, &int(0), Direction::Min, &[int(1), int(1), int(1)]).unwrap();
        assert_verified(&f);
        assert_eq!(f.mesh, y.mesh);
        assert_eq!(
            f.reeb_graph().unwrap().edges.len(),
            y.reeb_graph().unwrap().edges.len()
        );

        let c = elementary_junction(ElementaryKind::CSpecial, false, &int(0), &int(1), &int(2))
            .unwrap();
        let f = fold_block(&c, &int(5), Direction::Max, &[int(4), int(4), int(4)]).unwrap();
        assert_verified(&f);
        let mut labels = f.labels(Side::Bottom);
        labels.sort();
        assert_eq!(labels, vec![l(-1), l(-1), l(0)]);

        let cyl = cylinder_block(l(2), &int(0), &int(2)).unwrap();
        let f = fold_block(&cyl, &int(0), Direction::Min, &[int(1), int(1)]).unwrap();
        assert_verified(&f);
        assert!(fold_block(&y, &int(0), Direction::Min, &[int(1), int(-1), int(1)]).is_err());
    }

    #[test]
    fn corrupted_block_fails_link_check() {
        let mut b = cap_block(l(0), &int(0), &int(1)).unwrap();
        let n = b.mesh.n_vertices;
        b.mesh.tets.push([0, n, n + 1, n + 2]);
        b.mesh.n_vertices += 3;
        b.values.extend([int(1), int(1), int(1)]);
        b.region.extend([None, None, None]);
        let report = verify_block(&b);
        assert!(report.failures().iter().any(|c| c.name == "link condition"));
    }

    #[test]
    fn json_round_trip() {
        let b =
            elementary_junction(ElementaryKind::CSpecial, true, &int(0), &int(1), &int(2)).unwrap();
        assert_eq!(Block::from_json(&b.to_json()).unwrap(), b);
    }
}
