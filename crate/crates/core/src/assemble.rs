//! Global assembly: one block per graph vertex, one cylinder per edge, glued
//! along their anchored boundary layouts.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{sorted3, TetMesh, Tri};
use crate::error::{AssembleError, ForgeError};
use crate::forge::{
    build_junction, cap_block, cylinder_block_layers, fold_block, plan_junction, Block, BlockKind,
    Clause, Direction, Side,
};
use crate::model::{check_realizable, LabeledGraph, SurfaceLabel};
use crate::rational::{self, int, Rational};
use crate::surface::{common_refinement, recipe_surface, SurfaceMesh};

/// Graph element a tetrahedron comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Vertex(usize),
    Edge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub element: Element,
    pub block: BlockKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifold3 {
    pub mesh: TetMesh,
    #[serde(with = "rational::vec")]
    pub values: Vec<Rational>,
    /// One entry per tetrahedron.
    pub provenance: Vec<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssembleOptions {
    /// Number of layers in each edge cylinder is twice this.
    pub refinement: usize,
    /// Debug hook: realize this edge with a wrong label of the same chi parity.
    pub mislabel_edge: Option<usize>,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            refinement: 1,
            mislabel_edge: None,
        }
    }
}

/// A different label with the same chi parity.
pub fn perturb_label(label: SurfaceLabel) -> SurfaceLabel {
    if label.0 >= 0 {
        SurfaceLabel(label.0 + 1)
    } else {
        SurfaceLabel(label.0 - 2)
    }
}

impl Manifold3 {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifold serializes")
    }

    pub fn from_json(text: &str) -> Result<Manifold3, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Disjoint union, used to build negative-control fixtures.
    pub fn disjoint_union(&self, other: &Manifold3) -> Manifold3 {
        let mut out = self.clone();
        out.mesh.append(&other.mesh);
        out.values.extend(other.values.iter().cloned());
        out.provenance.extend(other.provenance.iter().copied());
        out
    }

    pub fn summary(&self) -> String {
        let mut counts: HashMap<BlockKind, usize> = HashMap::new();
        let mut elements: Vec<Element> = self.provenance.iter().map(|p| p.element).collect();
        for p in &self.provenance {
            *counts.entry(p.block).or_default() += 1;
        }
        elements.sort_by_key(|e| match e {
            Element::Vertex(v) => (0, *v),
            Element::Edge(e) => (1, *e),
        });
        elements.dedup();
        let mut layers: Vec<&Rational> = self.values.iter().collect();
        layers.sort();
        layers.dedup();
        let kinds = [
            BlockKind::Cap,
            BlockKind::Junction,
            BlockKind::Fold,
            BlockKind::Cylinder,
        ]
        .iter()
        .map(|k| format!("{k:?}={}", counts.get(k).copied().unwrap_or(0)).to_lowercase())
        .collect::<Vec<_>>()
        .join(" ");
        format!(
            "vertices: {}\ntetrahedra: {}\nlayers: {}\nparts: {}\ntetrahedra by block: {kinds}\neuler characteristic: {}",
            self.mesh.n_vertices,
            self.mesh.tets.len(),
            layers.len(),
            elements.len(),
            self.mesh.euler_characteristic()
        )
    }
}

fn epsilons(g: &LabeledGraph) -> Vec<Rational> {
    (0..g.vertex_count())
        .map(|v| {
            let gap = g
                .incident(v)
                .map(|(_, e)| rational::abs(&(g.value(e.other(v)) - g.value(v))))
                .min()
                .expect("graph vertices have incident edges");
            gap / int(3)
        })
        .collect()
}

/// Splits the labels at an extremum into two sides with equal odd-chi counts:
/// odd labels alternate, even labels go to an empty side first, then to the
/// side with the smaller total Euler characteristic.
pub fn split_extremum(labels: &[SurfaceLabel]) -> (Vec<SurfaceLabel>, Vec<SurfaceLabel>) {
    let mut sorted = labels.to_vec();
    sorted.sort();
    let (odd, even): (Vec<_>, Vec<_>) = sorted.into_iter().partition(|l| l.is_odd_chi());
    let (mut f1, mut f2) = (Vec::new(), Vec::new());
    for (i, l) in odd.into_iter().enumerate() {
        if i % 2 == 0 {
            f1.push(l);
        } else {
            f2.push(l);
        }
    }
    let chi = |v: &[SurfaceLabel]| v.iter().map(|l| l.euler_char()).sum::<i64>();
    for l in even {
        let to_first = if f1.is_empty() {
            true
        } else if f2.is_empty() {
            false
        } else {
            chi(&f1) <= chi(&f2)
        };
        if to_first {
            f1.push(l);
        } else {
            f2.push(l);
        }
    }
    (f1, f2)
}

fn vertex_block(g: &LabeledGraph, v: usize, eps: &Rational) -> Result<Block, ForgeError> {
    let p = g.vertex_profile(v).expect("vertex in range");
    let gv = g.value(v);
    let (lo, hi) = (gv - eps, gv + eps);
    if !p.is_extremum {
        let plan = plan_junction(&p.down, &p.up)?;
        return build_junction(&plan, &lo, gv, &hi);
    }
    let (labels, leaf, direction) = if p.down.is_empty() {
        (&p.up, &hi, Direction::Min)
    } else {
        (&p.down, &lo, Direction::Max)
    };
    if labels.len() == 1 {
        return cap_block(labels[0], gv, leaf);
    }
    let (f1, f2) = split_extremum(labels);
    let plan = plan_junction(&f1, &f2)?;
    let j = build_junction(&plan, &int(0), &int(1), &int(2))?;
    fold_block(&j, gv, direction, &vec![leaf.clone(); j.boundary.len()])
}

/// Boundary surface of component `k` of `part` in layout numbering.
fn layout_surface(part: &Block, k: usize) -> Result<SurfaceMesh, String> {
    let comp = &part.boundary[k];
    let inverse: HashMap<usize, usize> = comp
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut triangles: Vec<Tri> = part
        .mesh
        .boundary_triangles()
        .into_iter()
        .filter(|t| t.iter().any(|v| inverse.contains_key(v)))
        .map(|t| {
            let mut out = [0; 3];
            for (o, v) in out.iter_mut().zip(t) {
                *o = *inverse
                    .get(&v)
                    .ok_or("boundary triangle leaves the component")?;
            }
            Ok(sorted3(out))
        })
        .collect::<Result<_, String>>()?;
    triangles.sort();
    let reference = recipe_surface(&comp.recipe);
    let mut expected: Vec<Tri> = reference.triangles.iter().map(|&t| sorted3(t)).collect();
    expected.sort();
    if triangles != expected {
        return Err("boundary triangles differ from the anchored layout".into());
    }
    Ok(reference)
}

fn check_anchors(a: &Block, ka: usize, b: &Block, kb: usize) -> Result<(), String> {
    let (sa, sb) = (layout_surface(a, ka)?, layout_surface(b, kb)?);
    let overlay = common_refinement(&sa, &sb).map_err(|e| e.to_string())?;
    if !overlay.is_identity() {
        return Err("common refinement is not the identity".into());
    }
    Ok(())
}

/// Builds a closed 3-manifold and PL function whose Reeb graph is `g`.
pub fn assemble(g: &LabeledGraph, options: &AssembleOptions) -> Result<Manifold3, AssembleError> {
    let perturbed;
    let g = match options.mislabel_edge {
        None => g,
        Some(e) if e < g.edges().len() => {
            perturbed = g.with_label(e, perturb_label(g.edges()[e].label));
            &perturbed
        }
        Some(e) => return Err(AssembleError::NoSuchEdge(e)),
    };
    let report = check_realizable(g);
    if !report.accepted() {
        let text = report
            .failures
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(AssembleError::NotRealizable(text));
    }
    let eps = epsilons(g);
    let layers = 2 * options.refinement.max(1);
    let vertex_blocks: Vec<Block> = (0..g.vertex_count())
        .into_par_iter()
        .map(|v| vertex_block(g, v, &eps[v]))
        .collect::<Result<_, _>>()?;
    let cylinders: Vec<Block> = g
        .edges()
        .par_iter()
        .map(|e| {
            let (lo, hi) = if g.value(e.u) < g.value(e.v) {
                (e.u, e.v)
            } else {
                (e.v, e.u)
            };
            cylinder_block_layers(
                e.label,
                &(g.value(lo) + &eps[lo]),
                &(g.value(hi) - &eps[hi]),
                layers,
            )
        })
        .collect::<Result<_, _>>()?;

    let mut mesh = TetMesh::new(0, Vec::new());
    let mut values = Vec::new();
    let mut provenance = Vec::new();
    let mut offsets = Vec::new();
    let parts = vertex_blocks
        .iter()
        .enumerate()
        .map(|(v, b)| (Element::Vertex(v), b))
        .chain(
            cylinders
                .iter()
                .enumerate()
                .map(|(e, b)| (Element::Edge(e), b)),
        );
    for (element, b) in parts {
        offsets.push(mesh.append(&b.mesh));
        values.extend(b.values.iter().cloned());
        provenance.extend(std::iter::repeat_n(
            Provenance {
                element,
                block: b.kind,
            },
            b.mesh.tets.len(),
        ));
    }

    // Block components not yet matched to an edge, per (side, label).
    let mut free: Vec<HashMap<(Side, SurfaceLabel), Vec<usize>>> = vertex_blocks
        .iter()
        .map(|b| {
            let mut m: HashMap<(Side, SurfaceLabel), Vec<usize>> = HashMap::new();
            for (k, c) in b.boundary.iter().enumerate().rev() {
                m.entry((c.side, c.label)).or_default().push(k);
            }
            m
        })
        .collect();
    let nv = g.vertex_count();
    let mut pairs = Vec::new();
    for (ei, e) in g.edges().iter().enumerate() {
        let (lo, hi) = if g.value(e.u) < g.value(e.v) {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        };
        let cyl = &cylinders[ei];
        for (vertex, side, cyl_k) in [(lo, Side::Top, 0), (hi, Side::Bottom, 1)] {
            let mismatch = |reason: String| AssembleError::AnchorMismatch { edge: ei, reason };
            let k = free[vertex]
                .get_mut(&(side, e.label))
                .and_then(|v| v.pop())
                .ok_or_else(|| {
                    mismatch(format!(
                        "vertex block has no free {side:?} component labeled {}",
                        e.label.0
                    ))
                })?;
            let block = &vertex_blocks[vertex];
            check_anchors(block, k, cyl, cyl_k).map_err(mismatch)?;
            let (bc, cc) = (&block.boundary[k], &cyl.boundary[cyl_k]);
            if bc.value != cc.value {
                return Err(mismatch("boundary values differ".into()));
            }
            for (&x, &y) in bc.vertices.iter().zip(&cc.vertices) {
                pairs.push((offsets[vertex] + x, offsets[nv + ei] + y));
            }
        }
    }
    if let Some((v, _)) = free
        .iter()
        .enumerate()
        .find(|(_, m)| m.values().any(|k| !k.is_empty()))
    {
        return Err(AssembleError::Forge(ForgeError::Gluing(format!(
            "vertex block {v} has unmatched boundary"
        ))));
    }
    let remap = mesh.identify(&pairs);
    let mut glued = vec![None; mesh.n_vertices];
    for (old, new) in remap.into_iter().enumerate() {
        match &glued[new] {
            None => glued[new] = Some(values[old].clone()),
            Some(x) if *x == values[old] => {}
            Some(_) => {
                return Err(AssembleError::Forge(ForgeError::Gluing(
                    "glued vertices carry different values".into(),
                )))
            }
        }
    }
    let values = glued
        .into_iter()
        .map(|v| v.expect("every vertex has a value"))
        .collect();
    Ok(Manifold3 {
        mesh,
        values,
        provenance,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifoldReport {
    pub clauses: Vec<Clause>,
    /// Triangles lying in only one tetrahedron.
    pub boundary_triangles: Vec<Tri>,
    pub euler_characteristic: i64,
}

impl ManifoldReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Clause> {
        self.clauses.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for ManifoldReport {
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

fn clause(name: &'static str, problems: Vec<String>, ok: &str) -> Clause {
    const SHOWN: usize = 8;
    let passed = problems.is_empty();
    let detail = if passed {
        ok.to_string()
    } else {
        let mut d = problems
            .iter()
            .take(SHOWN)
            .cloned()
            .collect::<Vec<_>>()
            .join("; ");
        if problems.len() > SHOWN {
            d.push_str(&format!("; and {} more", problems.len() - SHOWN));
        }
        d
    };
    Clause {
        name,
        passed,
        detail,
    }
}

pub fn validate_manifold(m: &Manifold3) -> ManifoldReport {
    let mut clauses = vec![clause(
        "simplicial",
        m.mesh.simplicial_defects(),
        "no degenerate or repeated tetrahedra",
    )];
    let tri_map = m.mesh.triangle_map();
    let mut boundary: Vec<Tri> = Vec::new();
    let mut overfull = Vec::new();
    for (t, tets) in &tri_map {
        match tets.len() {
            1 => boundary.push(*t),
            2 => {}
            n => overfull.push(format!("triangle {t:?} lies in {n} tetrahedra")),
        }
    }
    boundary.sort();
    overfull.sort();
    let mut closed = boundary
        .iter()
        .map(|t| format!("boundary triangle {t:?}"))
        .collect::<Vec<_>>();
    closed.extend(overfull);
    clauses.push(clause(
        "closed",
        closed,
        "every triangle lies in exactly two tetrahedra",
    ));
    let links = m
        .mesh
        .link_defects()
        .into_iter()
        .map(|d| d.to_string())
        .collect();
    clauses.push(clause("links", links, "every vertex link is a sphere"));
    let (_, count) = m.mesh.components();
    let connected = if count == 1 {
        Vec::new()
    } else {
        vec![format!("{count} connected components")]
    };
    clauses.push(clause("connected", connected, "one connected component"));
    let chi = m.mesh.euler_characteristic();
    let euler = if chi == 0 {
        Vec::new()
    } else {
        vec![format!("euler characteristic {chi}, expected 0")]
    };
    clauses.push(clause("euler", euler, "euler characteristic 0"));
    let counts = vec![
        (m.values.len() != m.mesh.n_vertices).then(|| {
            format!(
                "{} values for {} vertices",
                m.values.len(),
                m.mesh.n_vertices
            )
        }),
        (m.provenance.len() != m.mesh.tets.len()).then(|| {
            format!(
                "{} provenance entries for {} tetrahedra",
                m.provenance.len(),
                m.mesh.tets.len()
            )
        }),
    ];
    clauses.push(clause(
        "provenance",
        counts.into_iter().flatten().collect(),
        "values and provenance complete",
    ));
    ManifoldReport {
        clauses,
        boundary_triangles: boundary,
        euler_characteristic: chi,
    }
}
