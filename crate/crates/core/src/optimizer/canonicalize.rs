//! Canonicalization: local rewrites applied to a fixpoint, followed by
//! dead-code removal.

use std::collections::{BTreeSet, HashSet};

use crate::interp::apply_pure;
use crate::ir::{reachable, ArithOp, IRGraph, IRNode, NodeId, Role};
use crate::stamp::{constant_stamp, Stamp};
use crate::value::{int, BinaryOp, Value};

/// Individually switchable rewrite rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// `If` on a constant condition becomes its taken branch.
    ConstantBranch,
    /// Pure operators over constants become constants.
    ConstantFold,
    /// Algebraic identities such as `x + 0` and `x ^ x`.
    Identities,
    /// `Conditional` on a constant condition becomes the selected input.
    ConstantConditional,
}

impl Rule {
    pub const ALL: [Rule; 4] = [
        Rule::ConstantBranch,
        Rule::ConstantFold,
        Rule::Identities,
        Rule::ConstantConditional,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet(BTreeSet<Rule>);

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet(Rule::ALL.into_iter().collect())
    }
}

impl RuleSet {
    pub fn only(rules: &[Rule]) -> Self {
        RuleSet(rules.iter().copied().collect())
    }

    pub fn contains(&self, r: Rule) -> bool {
        self.0.contains(&r)
    }
}

pub fn canonicalize(g: &IRGraph) -> IRGraph {
    canonicalize_with(g, &RuleSet::default()).0
}

/// Returns the rewritten graph and the number of rewrites applied.
pub fn canonicalize_with(g: &IRGraph, rules: &RuleSet) -> (IRGraph, usize) {
    let mut g = g.clone();
    let mut rewrites = 0;
    loop {
        let mut changed = false;
        let ids: Vec<NodeId> = g.ids().collect();
        for id in ids {
            if !g.contains(id) {
                continue;
            }
            if let Some(next) = rewrite(&g, id, rules) {
                g = next;
                rewrites += 1;
                changed = true;
            }
        }
        let cleaned = remove_dead(&g);
        if cleaned != g {
            g = cleaned;
            changed = true;
        }
        if !changed {
            return (g, rewrites);
        }
    }
}

fn constant(g: &IRGraph, id: NodeId) -> Option<Value> {
    match g.node(id)? {
        IRNode::Constant {
            value: v @ Value::Int(_),
        } => Some(*v),
        _ => None,
    }
}

/// Width of `id` if its stamp says it is a 32- or 64-bit integer, the only
/// widths unaffected by numeric promotion.
fn full_width(g: &IRGraph, id: NodeId) -> Option<u8> {
    let bits = g.stamp(id)?.as_integer()?.bits();
    matches!(bits, 32 | 64).then_some(bits as u8)
}

fn rewrite(g: &IRGraph, id: NodeId, rules: &RuleSet) -> Option<IRGraph> {
    let node = g.node(id)?;
    if rules.contains(Rule::ConstantBranch) {
        if let IRNode::If {
            condition,
            true_succ,
            false_succ,
        } = node
        {
            let taken = constant(g, *condition)?.truthy()?;
            let live = if taken { *true_succ } else { *false_succ };
            let (pred, role) = g.control_predecessor(id)?;
            return Some(set_successor(g, pred, role, live));
        }
    }
    if rules.contains(Rule::ConstantConditional) {
        if let IRNode::Conditional {
            cond,
            true_val,
            false_val,
        } = node
        {
            let taken = constant(g, *cond)?.truthy()?;
            return Some(replace_uses(g, id, if taken { *true_val } else { *false_val }));
        }
    }
    if rules.contains(Rule::ConstantFold) {
        let operands = match node {
            IRNode::Arith { x, y, .. } | IRNode::Compare { x, y, .. } => vec![*x, *y],
            IRNode::Unary { x, .. } | IRNode::Convert { x, .. } => vec![*x],
            _ => Vec::new(),
        };
        let inputs: Option<Vec<Value>> = if operands.is_empty() {
            None
        } else {
            operands.iter().map(|o| constant(g, *o)).collect()
        };
        if let Some(inputs) = inputs {
            let v = apply_pure(node, &inputs).filter(|v| *v != Value::Undef)?;
            return Some(make_constant(g, id, v));
        }
    }
    if rules.contains(Rule::Identities) {
        return identity(g, id, node);
    }
    None
}

fn identity(g: &IRGraph, id: NodeId, node: &IRNode) -> Option<IRGraph> {
    let IRNode::Arith { op, x, y } = *node else {
        return None;
    };
    let is = |n: NodeId, k: i128, bits: u8| constant(g, n) == Some(int(u32::from(bits), k));
    match op {
        ArithOp::Binary(b) => {
            if x == y {
                let bits = full_width(g, x)?;
                return match b {
                    BinaryOp::Xor => Some(make_constant(g, id, int(u32::from(bits), 0))),
                    BinaryOp::And | BinaryOp::Or => Some(replace_uses(g, id, x)),
                    _ => None,
                };
            }
            let commutative = matches!(b, BinaryOp::Add | BinaryOp::Mul);
            let orders: &[(NodeId, NodeId)] = if commutative { &[(x, y), (y, x)] } else { &[(x, y)] };
            for &(v, k) in orders {
                let Some(bits) = full_width(g, v) else { continue };
                match b {
                    BinaryOp::Add | BinaryOp::Sub if is(k, 0, bits) => return Some(replace_uses(g, id, v)),
                    BinaryOp::Mul if is(k, 1, bits) => return Some(replace_uses(g, id, v)),
                    BinaryOp::Mul if is(k, 0, bits) => return Some(make_constant(g, id, int(u32::from(bits), 0))),
                    _ => {}
                }
            }
            None
        }
        ArithOp::Shift(_) => {
            full_width(g, x)?;
            // only the masked distance matters, and 0 masks to 0 at any width
            constant(g, y)?.as_int().filter(|k| k.is_zero())?;
            Some(replace_uses(g, id, x))
        }
    }
}

fn make_constant(g: &IRGraph, id: NodeId, v: Value) -> IRGraph {
    let stamp = constant_stamp(v).map_or(Stamp::Void, Stamp::Integer);
    g.with_node(id, IRNode::Constant { value: v }, stamp)
}

fn set_successor(g: &IRGraph, at: NodeId, role: Role, target: NodeId) -> IRGraph {
    let (node, stamp) = (
        g.node(at).expect("predecessor exists").clone(),
        g.stamp(at).expect("exists"),
    );
    let mut node = node;
    *node.slot_mut(role).expect("successor role") = target;
    g.with_node(at, node, stamp)
}

/// Redirects every input reference to `old` onto `new`.
fn replace_uses(g: &IRGraph, old: NodeId, new: NodeId) -> IRGraph {
    let mut out = g.clone();
    for (node, _) in out.nodes_mut().values_mut() {
        for (role, r) in node.inputs() {
            if r == old {
                *node.slot_mut(role).expect("listed input") = new;
            }
        }
    }
    out
}

/// Control nodes reachable from start along successor, End→merge and
/// LoopEnd→LoopBegin edges.
fn control_reachable(g: &IRGraph) -> HashSet<NodeId> {
    let owners = g.end_owners();
    let mut seen = HashSet::from([g.start()]);
    let mut stack = vec![g.start()];
    while let Some(n) = stack.pop() {
        for s in g.cfg_successors(&owners, n) {
            if g.contains(s) && seen.insert(s) {
                stack.push(s);
            }
        }
    }
    seen
}

/// Drops ends that can no longer execute from their merges, collapses
/// merges left with one predecessor, and removes unreachable nodes.
pub fn remove_dead(g: &IRGraph) -> IRGraph {
    let mut g = g.clone();
    loop {
        let live = control_reachable(&g);
        let mut changed = false;

        let merges: Vec<NodeId> = g
            .iter()
            .filter(|(id, n, _)| n.is_merge_like() && live.contains(id))
            .map(|(id, _, _)| id)
            .collect();
        for m in merges {
            let ends = match g.node(m) {
                Some(IRNode::Merge { ends, .. } | IRNode::LoopBegin { ends, .. }) => ends.clone(),
                _ => continue,
            };
            let keep: Vec<bool> = ends.iter().map(|e| live.contains(e)).collect();
            if keep.iter().all(|k| *k) {
                continue;
            }
            changed = true;
            for phi in g.phis_of(m) {
                let (mut node, stamp) = (g.node(phi).unwrap().clone(), g.stamp(phi).unwrap());
                if let IRNode::ValuePhi { values, .. } = &mut node {
                    *values = values.iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| *v).collect();
                }
                g = g.with_node(phi, node, stamp);
            }
            let (mut node, stamp) = (g.node(m).unwrap().clone(), g.stamp(m).unwrap());
            if let IRNode::Merge { ends, .. } | IRNode::LoopBegin { ends, .. } = &mut node {
                *ends = ends.iter().zip(&keep).filter(|(_, k)| **k).map(|(e, _)| *e).collect();
            }
            g = g.with_node(m, node, stamp);
        }
        if changed {
            continue;
        }

        // a merge with a single remaining end is a straight-line pass-through
        let collapsible = g.iter().find_map(|(id, n, _)| match n {
            IRNode::Merge { ends, next, .. } if ends.len() == 1 && live.contains(&id) => Some((id, ends[0], *next)),
            IRNode::LoopBegin { ends, next }
                if ends.len() == 1 && live.contains(&id) && matches!(g.node(ends[0]), Some(IRNode::End)) =>
            {
                Some((id, ends[0], *next))
            }
            _ => None,
        });
        if let Some((m, end, next)) = collapsible {
            g = collapse_merge(&g, m, end, next);
            continue;
        }
        break;
    }
    let keep = reachable(&g);
    g.retain(&keep)
}

fn collapse_merge(g: &IRGraph, merge: NodeId, end: NodeId, next: NodeId) -> IRGraph {
    let mut g = g.clone();
    for phi in g.phis_of(merge) {
        if let Some(IRNode::ValuePhi { values, .. }) = g.node(phi) {
            let v = values[0];
            g = replace_uses(&g, phi, v);
        }
    }
    let exits: Vec<(NodeId, NodeId)> = g
        .iter()
        .filter_map(|(id, n, _)| match n {
            IRNode::LoopExit { loop_begin, next } if *loop_begin == merge => Some((id, *next)),
            _ => None,
        })
        .collect();
    for (exit, after) in exits {
        if let Some((pred, role)) = g.control_predecessor(exit) {
            g = set_successor(&g, pred, role, after);
        }
        g.nodes_mut().remove(&exit);
    }
    if let Some((pred, role)) = g.control_predecessor(end) {
        g = set_successor(&g, pred, role, next);
    }
    let nodes = g.nodes_mut();
    nodes.remove(&end);
    nodes.remove(&merge);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::equivalence::structurally_equivalent;
    use crate::interp::run;
    use crate::ir::{build_graph, validate, Program};
    use crate::optimizer::conditional_elimination;
    use crate::stamp::unrestricted;

    fn param_graph(op: ArithOp, rhs: IRNode) -> IRGraph {
        let s32 = Stamp::Integer(unrestricted(32));
        build_graph(vec![
            (
                NodeId(0),
                IRNode::Start {
                    frame_state: None,
                    next: NodeId(4),
                },
                Stamp::Void,
            ),
            (NodeId(1), IRNode::Parameter { index: 0 }, s32),
            (NodeId(2), rhs, s32),
            (
                NodeId(3),
                IRNode::Arith {
                    op,
                    x: NodeId(1),
                    y: NodeId(2),
                },
                s32,
            ),
            (NodeId(4), IRNode::Return { value: Some(NodeId(3)) }, s32),
        ])
        .unwrap()
    }

    #[test]
    fn decided_branch_is_removed() {
        let g = conditional_elimination(&corpus::test1_initial());
        let out = canonicalize(&g);
        assert!(validate(&out).is_empty(), "{:?}", validate(&out));
        assert!(!out.contains(NodeId(13)));
        assert!(!out.contains(NodeId(9)));
        assert_eq!(out.node(NodeId(6)), Some(&IRNode::Begin { next: NodeId(11) }));
        assert_eq!(out.node(NodeId(5)), Some(&IRNode::Begin { next: NodeId(18) }));
        let golden = corpus::test1_program()
            .goldens
            .iter()
            .find(|gd| gd.phases.len() == 2)
            .unwrap()
            .graph
            .clone();
        assert!(structurally_equivalent(&out, &golden).equivalent);
    }

    #[test]
    fn add_zero_is_dropped() {
        let g = param_graph(ArithOp::Binary(BinaryOp::Add), IRNode::Constant { value: int(32, 0) });
        let out = canonicalize(&g);
        assert_eq!(out.node(NodeId(4)), Some(&IRNode::Return { value: Some(NodeId(1)) }));
        assert!(!out.contains(NodeId(3)));
    }

    #[test]
    fn xor_self_is_zero() {
        let g = param_graph(ArithOp::Binary(BinaryOp::Xor), IRNode::Parameter { index: 0 });
        let g = crate::ir::replace_input(&g, NodeId(3), Role::Y, NodeId(1)).unwrap();
        let out = canonicalize(&g);
        assert_eq!(out.node(NodeId(3)), Some(&IRNode::Constant { value: int(32, 0) }));
        let (before, after) = (Program::single("m", g), Program::single("m", out));
        for v in crate::harness::boundary_values(32) {
            let args = [int(32, v)];
            assert_eq!(run(&before, "m", &args), run(&after, "m", &args));
        }
    }

    #[test]
    fn wrong_width_constant_is_not_an_identity() {
        // x + 0L widens x, so it is not x
        let g = param_graph(ArithOp::Binary(BinaryOp::Add), IRNode::Constant { value: int(64, 0) });
        let out = canonicalize_with(&g, &RuleSet::only(&[Rule::Identities])).0;
        assert!(out.contains(NodeId(3)));
    }

    #[test]
    fn rules_can_be_disabled() {
        let g = conditional_elimination(&corpus::test1_initial());
        let (out, n) = canonicalize_with(&g, &RuleSet::only(&[Rule::Identities]));
        assert_eq!(n, 0);
        assert!(out.contains(NodeId(13)));
    }

    #[test]
    fn idempotent_on_corpus() {
        for (_, p) in corpus::all() {
            for g in p.methods.values() {
                let once = canonicalize(g);
                let twice = canonicalize(&once);
                assert!(structurally_equivalent(&once, &twice).equivalent);
                assert!(validate(&once).is_empty());
            }
        }
    }
}
