//! Junction planning: a tree of elementary constructors joined by the two
//! merge operations, following the case analysis on odd-chi counts.

use serde::{Deserialize, Serialize};

use super::block::{elementary_junction, junction_core, junction_from_core, Block, ElementaryKind};
use super::core::{boundary_sum, interior_sum, normalize, Core, Side};
use crate::error::ForgeError;
use crate::model::{connected_sum_label, odd_count, SurfaceLabel};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Elementary {
    Kind {
        kind: ElementaryKind,
        flipped: bool,
    },
    /// Even-chi components only: spheres, handlebodies and solid Klein bottles joined.
    Even {
        bottoms: Vec<SurfaceLabel>,
        tops: Vec<SurfaceLabel>,
    },
    /// One odd-chi component on each side.
    OddPair {
        bottom: SurfaceLabel,
        top: SurfaceLabel,
    },
    /// One even component against two odd ones; `flipped` puts the odd pair at the bottom.
    Mixed {
        even: SurfaceLabel,
        odd: (SurfaceLabel, SurfaceLabel),
        flipped: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanNode {
    Leaf(Elementary),
    Fig3(Box<PlanNode>, Box<PlanNode>),
    Fig2 {
        left: Box<PlanNode>,
        right: Box<PlanNode>,
        side: Side,
        picks: (usize, usize),
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub root: PlanNode,
    pub bottoms: Vec<SurfaceLabel>,
    pub tops: Vec<SurfaceLabel>,
}

impl Elementary {
    pub fn labels(&self) -> (Vec<SurfaceLabel>, Vec<SurfaceLabel>) {
        match self {
            Elementary::Kind { kind, flipped } => {
                let (b, t) = kind.labels();
                if *flipped {
                    (t, b)
                } else {
                    (b, t)
                }
            }
            Elementary::Even { bottoms, tops } => (bottoms.clone(), tops.clone()),
            Elementary::OddPair { bottom, top } => (vec![*bottom], vec![*top]),
            Elementary::Mixed { even, odd, flipped } => {
                let (e, o) = (vec![*even], vec![odd.0, odd.1]);
                if *flipped {
                    (o, e)
                } else {
                    (e, o)
                }
            }
        }
    }

    fn flipped(&self) -> Elementary {
        match self.clone() {
            Elementary::Kind { kind, flipped } => Elementary::Kind {
                kind,
                flipped: !flipped,
            },
            Elementary::Even { bottoms, tops } => Elementary::Even {
                bottoms: tops,
                tops: bottoms,
            },
            Elementary::OddPair { bottom, top } => Elementary::OddPair {
                bottom: top,
                top: bottom,
            },
            Elementary::Mixed { even, odd, flipped } => Elementary::Mixed {
                even,
                odd,
                flipped: !flipped,
            },
        }
    }

    fn validate(&self) -> Result<(), ForgeError> {
        let (b, t) = self.labels();
        let bad = |msg: &str| Err(ForgeError::Plan(format!("{msg}: {self:?}")));
        match self {
            Elementary::Even { .. } if b.iter().chain(&t).any(|l| l.is_odd_chi()) => {
                bad("odd label in an even leaf")
            }
            Elementary::Even { .. } if b.is_empty() || t.is_empty() => bad("empty side"),
            Elementary::OddPair { bottom, top } if !bottom.is_odd_chi() || !top.is_odd_chi() => {
                bad("even label in an odd-pair leaf")
            }
            Elementary::Mixed { even, odd, .. }
                if even.is_odd_chi() || !odd.0.is_odd_chi() || !odd.1.is_odd_chi() =>
            {
                bad("parity of a mixed leaf")
            }
            _ => Ok(()),
        }
    }
}

impl PlanNode {
    /// Bottom and top labels in component order.
    pub fn labels(&self) -> Result<(Vec<SurfaceLabel>, Vec<SurfaceLabel>), ForgeError> {
        match self {
            PlanNode::Leaf(e) => {
                e.validate()?;
                Ok(e.labels())
            }
            PlanNode::Fig3(a, b) => {
                let (mut ab, mut at) = a.labels()?;
                let (bb, bt) = b.labels()?;
                ab.extend(bb);
                at.extend(bt);
                Ok((ab, at))
            }
            PlanNode::Fig2 {
                left,
                right,
                side,
                picks,
            } => {
                let (mut lb, mut lt) = left.labels()?;
                let (mut rb, mut rt) = right.labels()?;
                let (ls, rs) = match side {
                    Side::Bottom => (&mut lb, &mut rb),
                    Side::Top => (&mut lt, &mut rt),
                };
                if picks.0 >= ls.len() || picks.1 >= rs.len() {
                    return Err(ForgeError::Plan(format!("pick {picks:?} out of range")));
                }
                let other = rs.remove(picks.1);
                ls[picks.0] = connected_sum_label(ls[picks.0], other);
                lb.extend(rb);
                lt.extend(rt);
                Ok((lb, lt))
            }
        }
    }

    fn flipped(&self) -> PlanNode {
        match self {
            PlanNode::Leaf(e) => PlanNode::Leaf(e.flipped()),
            PlanNode::Fig3(a, b) => PlanNode::Fig3(Box::new(a.flipped()), Box::new(b.flipped())),
            PlanNode::Fig2 {
                left,
                right,
                side,
                picks,
            } => PlanNode::Fig2 {
                left: Box::new(left.flipped()),
                right: Box::new(right.flipped()),
                side: side.flip(),
                picks: *picks,
            },
        }
    }

    /// Number of elementary leaves.
    pub fn leaf_count(&self) -> usize {
        match self {
            PlanNode::Leaf(_) => 1,
            PlanNode::Fig3(a, b) => a.leaf_count() + b.leaf_count(),
            PlanNode::Fig2 { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }
}

impl Plan {
    /// Checks that the label arithmetic reproduces the targets as multisets.
    pub fn type_check(&self) -> Result<(), ForgeError> {
        let (mut b, mut t) = self.root.labels()?;
        let (mut wb, mut wt) = (self.bottoms.clone(), self.tops.clone());
        for v in [&mut b, &mut t, &mut wb, &mut wt] {
            v.sort();
        }
        if b != wb || t != wt {
            return Err(ForgeError::Plan(format!(
                "plan yields {b:?} / {t:?}, target {wb:?} / {wt:?}"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(text: &str) -> Result<Plan, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn sorted(v: &[SurfaceLabel]) -> Vec<SurfaceLabel> {
    let mut v = v.to_vec();
    v.sort();
    v
}

fn leaf(e: Elementary) -> PlanNode {
    PlanNode::Leaf(e)
}

fn fig3(a: PlanNode, b: PlanNode) -> PlanNode {
    PlanNode::Fig3(Box::new(a), Box::new(b))
}

fn fig2(a: PlanNode, b: PlanNode, side: Side, picks: (usize, usize)) -> PlanNode {
    PlanNode::Fig2 {
        left: Box::new(a),
        right: Box::new(b),
        side,
        picks,
    }
}

/// Index of the smallest label on `side` of `node` (first one on ties).
fn pick(node: &PlanNode, side: Side) -> usize {
    let (b, t) = node.labels().expect("planner builds well-typed nodes");
    let labels = if side == Side::Bottom { b } else { t };
    (0..labels.len())
        .min_by_key(|&i| (labels[i], i))
        .expect("side is non-empty")
}

fn merge_on(a: PlanNode, b: PlanNode, side: Side) -> PlanNode {
    let picks = (pick(&a, side), pick(&b, side));
    fig2(a, b, side, picks)
}

fn split(labels: &[SurfaceLabel]) -> (Vec<SurfaceLabel>, Vec<SurfaceLabel>) {
    sorted(labels).into_iter().partition(|l| l.is_odd_chi())
}

fn exact_kind(down: &[SurfaceLabel], up: &[SurfaceLabel]) -> Option<PlanNode> {
    let (d, u) = (sorted(down), sorted(up));
    for kind in ElementaryKind::ALL {
        let (b, t) = kind.labels();
        if (sorted(&b), sorted(&t)) == (d.clone(), u.clone()) {
            return Some(leaf(Elementary::Kind {
                kind,
                flipped: false,
            }));
        }
        if (sorted(&t), sorted(&b)) == (d.clone(), u.clone()) {
            return Some(leaf(Elementary::Kind {
                kind,
                flipped: true,
            }));
        }
    }
    None
}

fn equal_odd(down: &[SurfaceLabel], up: &[SurfaceLabel]) -> PlanNode {
    let (d_odd, d_even) = split(down);
    let (u_odd, u_even) = split(up);
    debug_assert_eq!(d_odd.len(), u_odd.len());
    if d_odd.is_empty() {
        return leaf(Elementary::Even {
            bottoms: d_even,
            tops: u_even,
        });
    }
    let family = d_odd
        .iter()
        .zip(&u_odd)
        .map(|(&bottom, &top)| leaf(Elementary::OddPair { bottom, top }))
        .reduce(fig3)
        .unwrap();
    let sphere = vec![SurfaceLabel::SPHERE];
    match (d_even.is_empty(), u_even.is_empty()) {
        (true, true) => family,
        (false, false) => fig3(
            family,
            leaf(Elementary::Even {
                bottoms: d_even,
                tops: u_even,
            }),
        ),
        (false, true) => merge_on(
            family,
            leaf(Elementary::Even {
                bottoms: d_even,
                tops: sphere,
            }),
            Side::Top,
        ),
        (true, false) => merge_on(
            family,
            leaf(Elementary::Even {
                bottoms: sphere,
                tops: u_even,
            }),
            Side::Bottom,
        ),
    }
}

/// Plan for more odd-chi components below than above.
fn more_odd_below(down: &[SurfaceLabel], up: &[SurfaceLabel]) -> PlanNode {
    let (d_odd, d_even) = split(down);
    let u_odd = up.iter().filter(|l| l.is_odd_chi()).count();
    let c = (d_odd.len() - u_odd) / 2;
    let (consumed, kept_odd) = d_odd.split_at(2 * c);
    let mut rest: Vec<SurfaceLabel> = kept_odd.to_vec();
    rest.extend(d_even);
    let mixed = |pair: &[SurfaceLabel], even: SurfaceLabel| {
        leaf(Elementary::Mixed {
            even,
            odd: (pair[0], pair[1]),
            flipped: true,
        })
    };
    let pairs: Vec<&[SurfaceLabel]> = consumed.chunks(2).collect();
    if !rest.is_empty() {
        let cm = pairs
            .iter()
            .map(|p| mixed(p, SurfaceLabel::SPHERE))
            .reduce(|a, b| merge_on(a, b, Side::Top))
            .unwrap();
        return merge_on(cm, plan_node(&rest, up), Side::Top);
    }
    let ups = sorted(up);
    let mut node = mixed(pairs[0], ups[0]);
    for p in &pairs[1..] {
        node = merge_on(node, mixed(p, SurfaceLabel::SPHERE), Side::Top);
    }
    for &x in &ups[1..] {
        let extra = leaf(Elementary::Even {
            bottoms: vec![SurfaceLabel::SPHERE],
            tops: vec![x],
        });
        node = merge_on(node, extra, Side::Bottom);
    }
    node
}

fn plan_node(down: &[SurfaceLabel], up: &[SurfaceLabel]) -> PlanNode {
    if let Some(node) = exact_kind(down, up) {
        return node;
    }
    let od = odd_count(down);
    let ou = odd_count(up);
    if od == ou {
        equal_odd(down, up)
    } else if od > ou {
        more_odd_below(down, up)
    } else {
        more_odd_below(up, down).flipped()
    }
}

/// Plan realizing `down` as bottom and `up` as top boundary labels.
pub fn plan_junction(down: &[SurfaceLabel], up: &[SurfaceLabel]) -> Result<Plan, ForgeError> {
    if down.is_empty() || up.is_empty() {
        return Err(ForgeError::EmptySide);
    }
    let odd = odd_count(down) + odd_count(up);
    if odd % 2 == 1 {
        return Err(ForgeError::Parity { odd });
    }
    let plan = Plan {
        root: plan_node(down, up),
        bottoms: down.to_vec(),
        tops: up.to_vec(),
    };
    plan.type_check()?;
    Ok(plan)
}

fn leaf_core(e: &Elementary) -> Result<Core, ForgeError> {
    let (b, t) = e.labels();
    junction_core(&b, &t)
}

fn build_core(node: &PlanNode) -> Result<Core, ForgeError> {
    match node {
        PlanNode::Leaf(e) => {
            e.validate()?;
            leaf_core(e)
        }
        PlanNode::Fig3(a, b) => interior_sum(build_core(a)?, build_core(b)?),
        PlanNode::Fig2 {
            left,
            right,
            side,
            picks,
        } => {
            let (a, b) = (build_core(left)?, build_core(right)?);
            let index = |core: &Core, k: usize| {
                core.components
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.side == *side)
                    .nth(k)
                    .map(|(i, _)| i)
                    .ok_or_else(|| {
                        ForgeError::BadPick(format!("no component {k} on the {side:?} side"))
                    })
            };
            let (i, j) = (index(&a, picks.0)?, index(&b, picks.1)?);
            normalize(boundary_sum(a, i, b, j)?, i)
        }
    }
}

/// Evaluates a plan into a junction block on `[a1, a2]` with center `a`.
pub fn build_junction(
    plan: &Plan,
    a1: &Rational,
    a: &Rational,
    a2: &Rational,
) -> Result<Block, ForgeError> {
    super::block::check_interval(a1, a, a2)?;
    plan.type_check()?;
    if let PlanNode::Leaf(Elementary::Kind { kind, flipped }) = &plan.root {
        return elementary_junction(*kind, *flipped, a1, a, a2);
    }
    let core = build_core(&plan.root)?;
    Ok(junction_from_core(
        core,
        a1,
        a,
        a2,
        &format!("planned junction ({} leaves)", plan.root.leaf_count()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::verify_block;
    use crate::rational::int;

    fn ls(v: &[i64]) -> Vec<SurfaceLabel> {
        v.iter().map(|&r| SurfaceLabel(r)).collect()
    }

    #[test]
    fn elementary_matches() {
        let p = plan_junction(&ls(&[0]), &ls(&[0, 0])).unwrap();
        assert_eq!(
            p.root,
            PlanNode::Leaf(Elementary::Kind {
                kind: ElementaryKind::YSplit,
                flipped: false
            })
        );
        let p = plan_junction(&ls(&[0]), &ls(&[-1, -1])).unwrap();
        assert_eq!(
            p.root,
            PlanNode::Leaf(Elementary::Kind {
                kind: ElementaryKind::CSpecial,
                flipped: false
            })
        );
        let p = plan_junction(&ls(&[-1, -1]), &ls(&[0])).unwrap();
        assert_eq!(
            p.root,
            PlanNode::Leaf(Elementary::Kind {
                kind: ElementaryKind::CSpecial,
                flipped: true
            })
        );
    }

    #[test]
    fn unequal_odd_counts() {
        let p = plan_junction(&ls(&[-1, -1]), &ls(&[-2])).unwrap();
        assert!(matches!(
            p.root,
            PlanNode::Leaf(Elementary::Mixed { flipped: true, .. })
        ));
        let b = build_junction(&p, &int(0), &int(1), &int(2)).unwrap();
        assert!(verify_block(&b).passed());
    }

    #[test]
    fn rejects_bad_requests() {
        assert_eq!(
            plan_junction(&ls(&[-1]), &ls(&[0])).unwrap_err(),
            ForgeError::Parity { odd: 1 }
        );
        assert_eq!(
            plan_junction(&ls(&[]), &ls(&[0])).unwrap_err(),
            ForgeError::EmptySide
        );
    }

    #[test]
    fn builds_verify() {
        let cases: &[(&[i64], &[i64])] = &[
            (&[-1, -1], &[-1, -1]),
            (&[0], &[-1, -1]),
            (&[-3, 2], &[-1, 1]),
            (&[-1], &[-3, 0]),
            (&[1, -1], &[-1, 2]),
            (&[-1, -3, -1, -1], &[1]),
        ];
        for (d, u) in cases {
            let p = plan_junction(&ls(d), &ls(u)).unwrap();
            let b = build_junction(&p, &int(0), &int(1), &int(2)).unwrap();
            let report = verify_block(&b);
            assert!(report.passed(), "{d:?} {u:?}\n{report}");
            let g = report.reeb.unwrap();
            assert_eq!(g.nodes.len(), d.len() + u.len() + 1);
        }
    }

    #[test]
    fn plan_json_round_trip() {
        let p = plan_junction(&ls(&[-1, -1, 2]), &ls(&[-3, -1, 0])).unwrap();
        assert_eq!(Plan::from_json(&p.to_json()).unwrap(), p);
    }

    fn arb_request(
    ) -> impl proptest::strategy::Strategy<Value = (Vec<SurfaceLabel>, Vec<SurfaceLabel>)> {
        use proptest::prelude::*;
        (
            proptest::collection::vec(-3i64..=2, 1..=3),
            proptest::collection::vec(-3i64..=2, 1..=3),
        )
            .prop_map(|(d, mut u)| {
                let odd = d
                    .iter()
                    .chain(&u)
                    .filter(|&&r| SurfaceLabel(r).is_odd_chi())
                    .count();
                if odd % 2 == 1 {
                    // fix parity on the last top label
                    let last = u.last_mut().unwrap();
                    *last = if SurfaceLabel(*last).is_odd_chi() {
                        *last + 1
                    } else {
                        -1
                    };
                }
                (ls(&d), ls(&u))
            })
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn plans_build_the_requested_boundary((d, u) in arb_request()) {
            let p = plan_junction(&d, &u).unwrap();
            let b = build_junction(&p, &int(0), &int(1), &int(2)).unwrap();
            let report = verify_block(&b);
            proptest::prop_assert!(report.passed(), "{}", report);
            let mut got = (b.labels(Side::Bottom), b.labels(Side::Top));
            got.0.sort();
            got.1.sort();
            proptest::prop_assert_eq!(got, (sorted(&d), sorted(&u)));
        }
    }
}
