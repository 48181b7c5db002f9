//! Conditional elimination: replaces `If` conditions that are decided by the
//! dominating branch conditions with constant true/false. Control flow is
//! never restructured; that is left to canonicalization.

use std::collections::HashMap;

use crate::ir::{fresh_id, replace_input, IRGraph, IRNode, NodeId, Role};
use crate::stamp::{fold_compare, refine_by_condition, IntegerStamp, RefineBase, Refinement, Stamp};
use crate::value::{int, CompareOp};

use super::dominators::{dominator_tree, DominatorTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CondElimConfig {
    pub refine_base: RefineBase,
    /// Also decide `y < x` and `x == y` from a known `x < y` (and the
    /// like) on the same operand nodes.
    pub implications: bool,
}

impl Default for CondElimConfig {
    fn default() -> Self {
        CondElimConfig {
            refine_base: RefineBase::Original,
            implications: true,
        }
    }
}

/// A branch condition known to hold (or not) on the current dominator path,
/// and the stamps it tightened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionEntry {
    pub condition: NodeId,
    pub polarity: bool,
    pub stamp_updates: Vec<(NodeId, IntegerStamp)>,
}

struct Walk<'g> {
    g: &'g IRGraph,
    config: CondElimConfig,
    tree: DominatorTree,
    branch_of: HashMap<NodeId, (NodeId, bool)>,
    stack: Vec<ConditionEntry>,
    /// Refined stamps, innermost last.
    refined: HashMap<NodeId, Vec<IntegerStamp>>,
    decisions: Vec<(NodeId, bool)>,
}

impl Walk<'_> {
    fn original(&self, n: NodeId) -> Option<IntegerStamp> {
        self.g.stamp(n).and_then(|s| s.as_integer())
    }

    fn current(&self, n: NodeId) -> Option<IntegerStamp> {
        self.refined
            .get(&n)
            .and_then(|v| v.last().copied())
            .or_else(|| self.original(n))
    }

    fn visit(&mut self, n: NodeId) {
        let entered = self.branch_of.get(&n).copied();
        if let Some((cond, polarity)) = entered {
            self.push(cond, polarity);
        }
        if let Some(IRNode::If { condition, .. }) = self.g.node(n) {
            if let Some(v) = self.decide(*condition) {
                self.decisions.push((n, v));
            }
        }
        let children = self.tree.children(n).to_vec();
        for c in children {
            self.visit(c);
        }
        if entered.is_some() {
            self.pop();
        }
    }

    fn push(&mut self, cond: NodeId, polarity: bool) {
        let updates = match self.g.node(cond) {
            Some(node @ IRNode::Compare { .. }) => {
                let refinement = match self.config.refine_base {
                    RefineBase::Original => refine_by_condition(node, polarity, |id| self.original(id)),
                    RefineBase::StackTop => refine_by_condition(node, polarity, |id| self.current(id)),
                };
                match refinement {
                    Refinement::Stamps(s) => s,
                    // unreachable branch; nothing useful to record
                    Refinement::Infeasible => Vec::new(),
                }
            }
            _ => Vec::new(),
        };
        for (id, s) in &updates {
            self.refined.entry(*id).or_default().push(*s);
        }
        self.stack.push(ConditionEntry {
            condition: cond,
            polarity,
            stamp_updates: updates,
        });
    }

    fn pop(&mut self) {
        let entry = self.stack.pop().expect("balanced condition stack");
        for (id, _) in entry.stamp_updates {
            if let Some(v) = self.refined.get_mut(&id) {
                v.pop();
            }
        }
    }

    fn decide(&self, cond: NodeId) -> Option<bool> {
        let node = self.g.node(cond)?;
        if matches!(node, IRNode::Constant { .. }) {
            return None;
        }
        // the same condition node already decided on this path
        if let Some(e) = self.stack.iter().rev().find(|e| e.condition == cond) {
            return Some(e.polarity);
        }
        let IRNode::Compare { op, x, y } = *node else {
            return None;
        };
        if self.config.implications {
            for e in self.stack.iter().rev() {
                if let Some(IRNode::Compare { op: kop, x: kx, y: ky }) = self.g.node(e.condition) {
                    if let Some(v) = implied((*kop, *kx, *ky, e.polarity), (op, x, y)) {
                        return Some(v);
                    }
                }
            }
        }
        let (sx, sy) = (self.current(x)?, self.current(y)?);
        fold_compare(op, sx, sy).decided()
    }
}

type Cmp = (CompareOp, NodeId, NodeId);

/// What a known comparison outcome says about another comparison of the
/// same operands.
fn implied(known: (CompareOp, NodeId, NodeId, bool), query: Cmp) -> Option<bool> {
    use CompareOp::*;
    let (kop, kx, ky, holds) = known;
    let (qop, qx, qy) = query;
    let same = qx == kx && qy == ky;
    let swapped = qx == ky && qy == kx;
    if !same && !swapped {
        return None;
    }
    match (kop, holds, qop) {
        (IntegerEquals, h, IntegerEquals) => Some(h),
        // x < y excludes y < x and x == y
        (IntegerLessThan, true, IntegerLessThan) if swapped => Some(false),
        (IntegerLessThan, true, IntegerEquals) => Some(false),
        // x == y excludes both orders
        (IntegerEquals, true, IntegerLessThan) => Some(false),
        _ => None,
    }
}

/// Decided `If` nodes and their outcome, in dominator-tree preorder.
pub fn decide_conditions(g: &IRGraph, config: CondElimConfig) -> Vec<(NodeId, bool)> {
    let tree = dominator_tree(g);
    let mut branch_of = HashMap::new();
    for (id, node, _) in g.iter() {
        if let IRNode::If {
            condition,
            true_succ,
            false_succ,
        } = node
        {
            if true_succ == false_succ {
                continue;
            }
            for (succ, polarity) in [(*true_succ, true), (*false_succ, false)] {
                // entering the successor's dominator subtree implies the branch was taken
                if tree.idom(succ) == Some(id) && !matches!(g.node(succ), Some(n) if n.is_merge_like()) {
                    branch_of.insert(succ, (*condition, polarity));
                }
            }
        }
    }
    let root = tree.root();
    let mut walk = Walk {
        g,
        config,
        tree,
        branch_of,
        stack: Vec::new(),
        refined: HashMap::new(),
        decisions: Vec::new(),
    };
    walk.visit(root);
    debug_assert!(walk.stack.is_empty(), "condition stack not empty after traversal");
    walk.decisions
}

pub fn conditional_elimination(g: &IRGraph) -> IRGraph {
    conditional_elimination_with(g, CondElimConfig::default()).0
}

/// Returns the rewritten graph and the number of conditions replaced.
pub fn conditional_elimination_with(g: &IRGraph, config: CondElimConfig) -> (IRGraph, usize) {
    let decisions = decide_conditions(g, config);
    let mut out = g.clone();
    let mut constants: HashMap<bool, NodeId> = HashMap::new();
    for &(if_id, value) in &decisions {
        let c = match constants.get(&value) {
            Some(c) => *c,
            None => {
                let c = find_or_add_bool(&mut out, value);
                constants.insert(value, c);
                c
            }
        };
        out = replace_input(&out, if_id, Role::Condition, c).expect("If has a condition input");
    }
    (out, decisions.len())
}

fn find_or_add_bool(g: &mut IRGraph, value: bool) -> NodeId {
    let want = int(1, value as i128);
    if let Some(id) = g
        .iter()
        .find(|(_, n, _)| matches!(n, IRNode::Constant { value: v } if *v == want))
        .map(|(id, _, _)| id)
    {
        return id;
    }
    let id = fresh_id(g);
    *g = g.with_node(id, IRNode::Constant { value: want }, Stamp::Void);
    id
}
