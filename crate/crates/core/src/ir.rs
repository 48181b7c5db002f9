//! The sea-of-nodes graph model: node catalog, graphs, programs, and graph
//! editing primitives. Graphs are immutable values; every edit returns a new
//! graph.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::optimizer::Phase;
use crate::stamp::Stamp;
use crate::value::{BinaryOp, CompareOp, ConvertOp, DivRemOp, ShiftOp, UnaryOp, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arithmetic and logic operators that float in the data-flow graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Binary(BinaryOp),
    Shift(ShiftOp),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IRNode {
    Start {
        frame_state: Option<NodeId>,
        next: NodeId,
    },
    Parameter {
        index: u32,
    },
    Constant {
        value: Value,
    },
    FrameState,
    Return {
        value: Option<NodeId>,
    },
    If {
        condition: NodeId,
        true_succ: NodeId,
        false_succ: NodeId,
    },
    Begin {
        next: NodeId,
    },
    End,
    Merge {
        ends: Vec<NodeId>,
        frame_state: Option<NodeId>,
        next: NodeId,
    },
    LoopBegin {
        ends: Vec<NodeId>,
        next: NodeId,
    },
    LoopEnd {
        loop_begin: NodeId,
    },
    LoopExit {
        loop_begin: NodeId,
        next: NodeId,
    },
    ValuePhi {
        merge: NodeId,
        values: Vec<NodeId>,
    },
    Arith {
        op: ArithOp,
        x: NodeId,
        y: NodeId,
    },
    /// `SignedDiv` / `SignedRem`: may trap, so they sit on the control path.
    DivRem {
        op: DivRemOp,
        x: NodeId,
        y: NodeId,
        next: NodeId,
    },
    Unary {
        op: UnaryOp,
        x: NodeId,
    },
    Compare {
        op: CompareOp,
        x: NodeId,
        y: NodeId,
    },
    Conditional {
        cond: NodeId,
        true_val: NodeId,
        false_val: NodeId,
    },
    Convert {
        op: ConvertOp,
        in_bits: u32,
        out_bits: u32,
        x: NodeId,
    },
    Invoke {
        method: String,
        args: Vec<NodeId>,
        next: NodeId,
    },
    LoadField {
        field: String,
    },
    StoreField {
        field: String,
        value: NodeId,
        next: NodeId,
    },
}

/// Named reference slot of a node, as used by [`replace_input`] and the text
/// format. List slots carry their position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Next,
    TrueSucc,
    FalseSucc,
    FrameState,
    Value,
    Condition,
    EndList(usize),
    LoopBegin,
    Merge,
    InputList(usize),
    X,
    Y,
    Cond,
    TrueVal,
    FalseVal,
    ArgList(usize),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Next => f.write_str("next"),
            Role::TrueSucc => f.write_str("trueSucc"),
            Role::FalseSucc => f.write_str("falseSucc"),
            Role::FrameState => f.write_str("frameState"),
            Role::Value => f.write_str("value"),
            Role::Condition => f.write_str("condition"),
            Role::EndList(i) => write!(f, "endList[{i}]"),
            Role::LoopBegin => f.write_str("loopBegin"),
            Role::Merge => f.write_str("merge"),
            Role::InputList(i) => write!(f, "inputList[{i}]"),
            Role::X => f.write_str("x"),
            Role::Y => f.write_str("y"),
            Role::Cond => f.write_str("cond"),
            Role::TrueVal => f.write_str("trueVal"),
            Role::FalseVal => f.write_str("falseVal"),
            Role::ArgList(i) => write!(f, "argList[{i}]"),
        }
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let indexed = |prefix: &str| -> Option<usize> {
            s.strip_prefix(prefix)?
                .strip_prefix('[')?
                .strip_suffix(']')?
                .parse()
                .ok()
        };
        Ok(match s {
            "next" => Role::Next,
            "trueSucc" => Role::TrueSucc,
            "falseSucc" => Role::FalseSucc,
            "frameState" => Role::FrameState,
            "value" => Role::Value,
            "condition" => Role::Condition,
            "loopBegin" => Role::LoopBegin,
            "merge" => Role::Merge,
            "x" => Role::X,
            "y" => Role::Y,
            "cond" => Role::Cond,
            "trueVal" => Role::TrueVal,
            "falseVal" => Role::FalseVal,
            _ => {
                if let Some(i) = indexed("endList") {
                    Role::EndList(i)
                } else if let Some(i) = indexed("inputList") {
                    Role::InputList(i)
                } else if let Some(i) = indexed("argList") {
                    Role::ArgList(i)
                } else {
                    return Err(format!("unknown role {s:?}"));
                }
            }
        })
    }
}

impl IRNode {
    /// Node kind name as written in program files.
    pub fn kind_name(&self) -> &'static str {
        match self {
            IRNode::Start { .. } => "Start",
            IRNode::Parameter { .. } => "Parameter",
            IRNode::Constant { .. } => "Constant",
            IRNode::FrameState => "FrameState",
            IRNode::Return { .. } => "Return",
            IRNode::If { .. } => "If",
            IRNode::Begin { .. } => "Begin",
            IRNode::End => "End",
            IRNode::Merge { .. } => "Merge",
            IRNode::LoopBegin { .. } => "LoopBegin",
            IRNode::LoopEnd { .. } => "LoopEnd",
            IRNode::LoopExit { .. } => "LoopExit",
            IRNode::ValuePhi { .. } => "ValuePhi",
            IRNode::Arith { op, .. } => match op {
                ArithOp::Binary(BinaryOp::Add) => "Add",
                ArithOp::Binary(BinaryOp::Sub) => "Sub",
                ArithOp::Binary(BinaryOp::Mul) => "Mul",
                ArithOp::Binary(BinaryOp::And) => "And",
                ArithOp::Binary(BinaryOp::Or) => "Or",
                ArithOp::Binary(BinaryOp::Xor) => "Xor",
                ArithOp::Shift(ShiftOp::LeftShift) => "LeftShift",
                ArithOp::Shift(ShiftOp::RightShift) => "RightShift",
                ArithOp::Shift(ShiftOp::UnsignedRightShift) => "UnsignedRightShift",
            },
            IRNode::DivRem { op, .. } => match op {
                DivRemOp::SignedDiv => "SignedDiv",
                DivRemOp::SignedRem => "SignedRem",
            },
            IRNode::Unary { op, .. } => match op {
                UnaryOp::Negate => "Negate",
                UnaryOp::Not => "Not",
                UnaryOp::Abs => "Abs",
            },
            IRNode::Compare { op, .. } => match op {
                CompareOp::IntegerEquals => "IntegerEquals",
                CompareOp::IntegerLessThan => "IntegerLessThan",
            },
            IRNode::Conditional { .. } => "Conditional",
            IRNode::Convert { op, .. } => match op {
                ConvertOp::SignExtend => "SignExtend",
                ConvertOp::ZeroExtend => "ZeroExtend",
                ConvertOp::Narrow => "Narrow",
            },
            IRNode::Invoke { .. } => "Invoke",
            IRNode::LoadField { .. } => "LoadField",
            IRNode::StoreField { .. } => "StoreField",
        }
    }

    /// Nodes that live on the control-flow path.
    pub fn is_control(&self) -> bool {
        matches!(
            self,
            IRNode::Start { .. }
                | IRNode::Return { .. }
                | IRNode::If { .. }
                | IRNode::Begin { .. }
                | IRNode::End
                | IRNode::Merge { .. }
                | IRNode::LoopBegin { .. }
                | IRNode::LoopEnd { .. }
                | IRNode::LoopExit { .. }
                | IRNode::DivRem { .. }
                | IRNode::Invoke { .. }
                | IRNode::StoreField { .. }
        )
    }

    pub fn is_merge_like(&self) -> bool {
        matches!(self, IRNode::Merge { .. } | IRNode::LoopBegin { .. })
    }

    /// Declared control-flow successors, in role order.
    pub fn successors(&self) -> Vec<(Role, NodeId)> {
        match self {
            IRNode::Start { next, .. }
            | IRNode::Begin { next }
            | IRNode::Merge { next, .. }
            | IRNode::LoopBegin { next, .. }
            | IRNode::LoopExit { next, .. }
            | IRNode::DivRem { next, .. }
            | IRNode::Invoke { next, .. }
            | IRNode::StoreField { next, .. } => vec![(Role::Next, *next)],
            IRNode::If {
                true_succ, false_succ, ..
            } => vec![(Role::TrueSucc, *true_succ), (Role::FalseSucc, *false_succ)],
            _ => Vec::new(),
        }
    }

    /// Input (data-flow and bookkeeping) references, frame state first.
    pub fn inputs(&self) -> Vec<(Role, NodeId)> {
        let mut out = Vec::new();
        match self {
            IRNode::Start { frame_state, .. } => {
                out.extend(frame_state.map(|f| (Role::FrameState, f)));
            }
            IRNode::Return { value } => out.extend(value.map(|v| (Role::Value, v))),
            IRNode::If { condition, .. } => out.push((Role::Condition, *condition)),
            IRNode::Merge { ends, frame_state, .. } => {
                out.extend(frame_state.map(|f| (Role::FrameState, f)));
                out.extend(ends.iter().enumerate().map(|(i, e)| (Role::EndList(i), *e)));
            }
            IRNode::LoopBegin { ends, .. } => {
                out.extend(ends.iter().enumerate().map(|(i, e)| (Role::EndList(i), *e)));
            }
            IRNode::LoopEnd { loop_begin } | IRNode::LoopExit { loop_begin, .. } => {
                out.push((Role::LoopBegin, *loop_begin));
            }
            IRNode::ValuePhi { merge, values } => {
                out.push((Role::Merge, *merge));
                out.extend(values.iter().enumerate().map(|(i, v)| (Role::InputList(i), *v)));
            }
            IRNode::Arith { x, y, .. } | IRNode::DivRem { x, y, .. } | IRNode::Compare { x, y, .. } => {
                out.push((Role::X, *x));
                out.push((Role::Y, *y));
            }
            IRNode::Unary { x, .. } | IRNode::Convert { x, .. } => out.push((Role::X, *x)),
            IRNode::Conditional {
                cond,
                true_val,
                false_val,
            } => {
                out.push((Role::Cond, *cond));
                out.push((Role::TrueVal, *true_val));
                out.push((Role::FalseVal, *false_val));
            }
            IRNode::Invoke { args, .. } => {
                out.extend(args.iter().enumerate().map(|(i, a)| (Role::ArgList(i), *a)));
            }
            IRNode::StoreField { value, .. } => out.push((Role::Value, *value)),
            IRNode::Parameter { .. }
            | IRNode::Constant { .. }
            | IRNode::FrameState
            | IRNode::Begin { .. }
            | IRNode::End
            | IRNode::LoadField { .. } => {}
        }
        out
    }

    /// Every reference, successors then inputs.
    pub fn references(&self) -> Vec<(Role, NodeId)> {
        let mut refs = self.successors();
        refs.extend(self.inputs());
        refs
    }

    /// Mutable access to the reference slot named by `role`.
    pub fn slot_mut(&mut self, role: Role) -> Option<&mut NodeId> {
        match (self, role) {
            (IRNode::Start { next, .. }, Role::Next)
            | (IRNode::Begin { next }, Role::Next)
            | (IRNode::Merge { next, .. }, Role::Next)
            | (IRNode::LoopBegin { next, .. }, Role::Next)
            | (IRNode::LoopExit { next, .. }, Role::Next)
            | (IRNode::DivRem { next, .. }, Role::Next)
            | (IRNode::Invoke { next, .. }, Role::Next)
            | (IRNode::StoreField { next, .. }, Role::Next) => Some(next),
            (IRNode::Start { frame_state, .. }, Role::FrameState)
            | (IRNode::Merge { frame_state, .. }, Role::FrameState) => frame_state.as_mut(),
            (IRNode::Return { value }, Role::Value) => value.as_mut(),
            (IRNode::StoreField { value, .. }, Role::Value) => Some(value),
            (IRNode::If { condition, .. }, Role::Condition) => Some(condition),
            (IRNode::If { true_succ, .. }, Role::TrueSucc) => Some(true_succ),
            (IRNode::If { false_succ, .. }, Role::FalseSucc) => Some(false_succ),
            (IRNode::Merge { ends, .. }, Role::EndList(i)) | (IRNode::LoopBegin { ends, .. }, Role::EndList(i)) => {
                ends.get_mut(i)
            }
            (IRNode::LoopEnd { loop_begin }, Role::LoopBegin)
            | (IRNode::LoopExit { loop_begin, .. }, Role::LoopBegin) => Some(loop_begin),
            (IRNode::ValuePhi { merge, .. }, Role::Merge) => Some(merge),
            (IRNode::ValuePhi { values, .. }, Role::InputList(i)) => values.get_mut(i),
            (IRNode::Arith { x, .. }, Role::X)
            | (IRNode::DivRem { x, .. }, Role::X)
            | (IRNode::Compare { x, .. }, Role::X)
            | (IRNode::Unary { x, .. }, Role::X)
            | (IRNode::Convert { x, .. }, Role::X) => Some(x),
            (IRNode::Arith { y, .. }, Role::Y)
            | (IRNode::DivRem { y, .. }, Role::Y)
            | (IRNode::Compare { y, .. }, Role::Y) => Some(y),
            (IRNode::Conditional { cond, .. }, Role::Cond) => Some(cond),
            (IRNode::Conditional { true_val, .. }, Role::TrueVal) => Some(true_val),
            (IRNode::Conditional { false_val, .. }, Role::FalseVal) => Some(false_val),
            (IRNode::Invoke { args, .. }, Role::ArgList(i)) => args.get_mut(i),
            _ => None,
        }
    }

    /// Applies `f` to every reference, in place.
    pub fn map_refs(&mut self, mut f: impl FnMut(NodeId) -> NodeId) {
        for (role, _) in self.references() {
            if let Some(slot) = self.slot_mut(role) {
                *slot = f(*slot);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("no Start node")]
    NoStart,
    #[error("multiple Start nodes: {0:?}")]
    MultipleStarts(Vec<u32>),
    #[error("duplicate id {0}")]
    DuplicateId(NodeId),
    #[error("no node {0}")]
    MissingNode(NodeId),
    #[error("node {id} ({kind}) has no input role {role}")]
    InvalidRole {
        id: NodeId,
        kind: &'static str,
        role: String,
    },
}

/// A method graph: node id to (node, stamp), plus the start node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IRGraph {
    start: NodeId,
    nodes: BTreeMap<NodeId, (IRNode, Stamp)>,
}

pub fn build_graph(entries: impl IntoIterator<Item = (NodeId, IRNode, Stamp)>) -> Result<IRGraph, GraphError> {
    let mut nodes = BTreeMap::new();
    for (id, node, stamp) in entries {
        if nodes.insert(id, (node, stamp)).is_some() {
            return Err(GraphError::DuplicateId(id));
        }
    }
    let starts: Vec<u32> = nodes
        .iter()
        .filter(|(_, (n, _))| matches!(n, IRNode::Start { .. }))
        .map(|(id, _)| id.0)
        .collect();
    match starts.as_slice() {
        [] => Err(GraphError::NoStart),
        [s] => Ok(IRGraph {
            start: NodeId(*s),
            nodes,
        }),
        _ => Err(GraphError::MultipleStarts(starts)),
    }
}

impl IRGraph {
    /// Assembles a graph without any checks. Used to construct malformed
    /// graphs for [`validate`].
    pub fn from_parts_unchecked(start: NodeId, nodes: BTreeMap<NodeId, (IRNode, Stamp)>) -> Self {
        IRGraph { start, nodes }
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Option<&IRNode> {
        self.nodes.get(&id).map(|(n, _)| n)
    }

    pub fn stamp(&self, id: NodeId) -> Option<Stamp> {
        self.nodes.get(&id).map(|(_, s)| *s)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &IRNode, Stamp)> + '_ {
        self.nodes.iter().map(|(id, (n, s))| (*id, n, *s))
    }

    /// Replaces (or inserts) a node, returning the edited graph.
    pub fn with_node(&self, id: NodeId, node: IRNode, stamp: Stamp) -> IRGraph {
        let mut g = self.clone();
        g.nodes.insert(id, (node, stamp));
        g
    }

    /// Drops every node not in `keep`.
    pub fn retain(&self, keep: &BTreeSet<NodeId>) -> IRGraph {
        let mut g = self.clone();
        g.nodes.retain(|id, _| keep.contains(id));
        g
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut BTreeMap<NodeId, (IRNode, Stamp)> {
        &mut self.nodes
    }

    /// Renames every node id through `map`. Ids missing from the map keep
    /// their number.
    pub fn renumber(&self, map: &HashMap<NodeId, NodeId>) -> IRGraph {
        let rename = |id: NodeId| map.get(&id).copied().unwrap_or(id);
        let nodes = self
            .nodes
            .iter()
            .map(|(id, (node, stamp))| {
                let mut node = node.clone();
                node.map_refs(rename);
                (rename(*id), (node, *stamp))
            })
            .collect();
        IRGraph {
            start: rename(self.start),
            nodes,
        }
    }

    /// The merge (or loop begin) listing `end` in its end list, with the
    /// list position.
    pub fn end_owner(&self, end: NodeId) -> Option<(NodeId, usize)> {
        self.nodes.iter().find_map(|(id, (n, _))| match n {
            IRNode::Merge { ends, .. } | IRNode::LoopBegin { ends, .. } => {
                ends.iter().position(|e| *e == end).map(|i| (*id, i))
            }
            _ => None,
        })
    }

    /// Map from every listed end to its owner and position.
    pub fn end_owners(&self) -> HashMap<NodeId, (NodeId, usize)> {
        let mut out = HashMap::new();
        for (id, (n, _)) in &self.nodes {
            if let IRNode::Merge { ends, .. } | IRNode::LoopBegin { ends, .. } = n {
                for (i, e) in ends.iter().enumerate() {
                    out.entry(*e).or_insert((*id, i));
                }
            }
        }
        out
    }

    /// Control-flow successors including the implicit End→merge and
    /// LoopEnd→LoopBegin edges.
    pub fn cfg_successors(&self, owners: &HashMap<NodeId, (NodeId, usize)>, id: NodeId) -> Vec<NodeId> {
        match self.node(id) {
            Some(IRNode::End) => owners.get(&id).map(|(m, _)| *m).into_iter().collect(),
            Some(IRNode::LoopEnd { loop_begin }) => vec![*loop_begin],
            Some(n) => n.successors().into_iter().map(|(_, s)| s).collect(),
            None => Vec::new(),
        }
    }

    /// The control node whose successor slot points at `id`.
    pub fn control_predecessor(&self, id: NodeId) -> Option<(NodeId, Role)> {
        self.nodes.iter().find_map(|(pid, (n, _))| {
            n.successors()
                .into_iter()
                .find(|(_, s)| *s == id)
                .map(|(role, _)| (*pid, role))
        })
    }

    /// Ids of the ValuePhis attached to `merge`, in id order.
    pub fn phis_of(&self, merge: NodeId) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|(_, (n, _))| matches!(n, IRNode::ValuePhi { merge: m, .. } if *m == merge))
            .map(|(id, _)| *id)
            .collect()
    }

    /// Largest `Parameter` index plus one.
    pub fn parameter_count(&self) -> usize {
        self.nodes
            .values()
            .filter_map(|(n, _)| match n {
                IRNode::Parameter { index } => Some(*index as usize + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn parameter_stamp(&self, index: usize) -> Option<Stamp> {
        self.nodes.values().find_map(|(n, s)| match n {
            IRNode::Parameter { index: i } if *i as usize == index => Some(*s),
            _ => None,
        })
    }
}

/// Well-formedness violations; empty when every graph invariant holds.
pub fn validate(g: &IRGraph) -> Vec<String> {
    let mut out = Vec::new();

    let starts: Vec<NodeId> = g
        .iter()
        .filter(|(_, n, _)| matches!(n, IRNode::Start { .. }))
        .map(|(id, _, _)| id)
        .collect();
    match starts.as_slice() {
        [] => out.push("no Start node".to_string()),
        [_] => {}
        many => {
            let ids: Vec<String> = many.iter().map(ToString::to_string).collect();
            out.push(format!("nodes {}: multiple Start nodes", ids.join(", ")));
        }
    }
    match g.node(g.start()) {
        Some(IRNode::Start { .. }) => {}
        _ => out.push(format!("node {}: start id is not a Start node", g.start())),
    }

    let owners = g.end_owners();
    let mut preds: HashMap<NodeId, Vec<NodeId>> = HashMap::new();

    for (id, node, _) in g.iter() {
        for (role, r) in node.references() {
            if !g.contains(r) {
                out.push(format!("node {id}: unresolved reference {r}"));
                continue;
            }
            let target = g.node(r).expect("checked");
            let is_succ = matches!(role, Role::Next | Role::TrueSucc | Role::FalseSucc);
            if is_succ {
                preds.entry(r).or_default().push(id);
                if !target.is_control() {
                    out.push(format!("node {id}: {role} targets non-control node {r}"));
                } else if target.is_merge_like() {
                    out.push(format!("node {id}: {role} targets merge {r} directly"));
                }
            }
            match role {
                Role::FrameState if !matches!(target, IRNode::FrameState) => {
                    out.push(format!("node {id}: frameState {r} is not a FrameState"));
                }
                Role::EndList(_) => {
                    let ok = match node {
                        IRNode::Merge { .. } => matches!(target, IRNode::End),
                        _ => matches!(target, IRNode::End | IRNode::LoopEnd { .. }),
                    };
                    if !ok {
                        out.push(format!("node {id}: end list entry {r} is not an end"));
                    }
                }
                Role::LoopBegin if !matches!(target, IRNode::LoopBegin { .. }) => {
                    out.push(format!("node {id}: loopBegin {r} is not a LoopBegin"));
                }
                Role::Merge if !target.is_merge_like() => {
                    out.push(format!("node {id}: merge {r} is not a merge"));
                }
                Role::X
                | Role::Y
                | Role::Value
                | Role::Condition
                | Role::Cond
                | Role::TrueVal
                | Role::FalseVal
                | Role::InputList(_)
                | Role::ArgList(_)
                    if target.is_control() && !produces_value(target) =>
                {
                    out.push(format!("node {id}: {role} {r} is a control node without a value"));
                }
                _ => {}
            }
        }

        match node {
            IRNode::End => {
                let n = g
                    .iter()
                    .filter(|(_, m, _)| match m {
                        IRNode::Merge { ends, .. } | IRNode::LoopBegin { ends, .. } => ends.contains(&id),
                        _ => false,
                    })
                    .count();
                if n != 1 {
                    out.push(format!("node {id}: End listed by {n} merges"));
                }
            }
            IRNode::LoopEnd { loop_begin } => {
                if let Some(IRNode::LoopBegin { ends, .. }) = g.node(*loop_begin) {
                    if !ends.contains(&id) {
                        out.push(format!("node {id}: LoopEnd not listed by its LoopBegin {loop_begin}"));
                    }
                }
            }
            IRNode::ValuePhi { merge, values } => {
                if let Some(IRNode::Merge { ends, .. } | IRNode::LoopBegin { ends, .. }) = g.node(*merge) {
                    if ends.len() != values.len() {
                        out.push(format!(
                            "node {id}: phi has {} inputs but merge {merge} has {} ends",
                            values.len(),
                            ends.len()
                        ));
                    }
                }
            }
            IRNode::If {
                true_succ, false_succ, ..
            } if true_succ == false_succ => {
                out.push(format!("node {id}: If has identical successors"));
            }
            _ => {}
        }
    }

    for (target, ps) in &preds {
        if ps.len() > 1 {
            out.push(format!("node {target}: {} control predecessors", ps.len()));
        }
    }

    // forward control flow must be acyclic; loops close only through LoopEnd
    let mut state: HashMap<NodeId, u8> = HashMap::new();
    for root in g.ids() {
        if !g.node(root).is_some_and(IRNode::is_control) || state.contains_key(&root) {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state.insert(root, 1);
        while let Some((n, i)) = stack.pop() {
            let succs: Vec<NodeId> = match g.node(n) {
                Some(IRNode::End) => owners.get(&n).map(|(m, _)| *m).into_iter().collect(),
                Some(node) => node.successors().into_iter().map(|(_, s)| s).collect(),
                None => Vec::new(),
            };
            if let Some(&s) = succs.get(i) {
                stack.push((n, i + 1));
                match state.get(&s) {
                    None if g.contains(s) => {
                        state.insert(s, 1);
                        stack.push((s, 0));
                    }
                    Some(1) => out.push(format!("node {n}: control-flow cycle through {s}")),
                    _ => {}
                }
            } else {
                state.insert(n, 2);
            }
        }
    }

    out
}

fn produces_value(n: &IRNode) -> bool {
    matches!(n, IRNode::DivRem { .. } | IRNode::Invoke { .. })
}

/// One past the largest id in use.
pub fn fresh_id(g: &IRGraph) -> NodeId {
    g.ids().last().map_or(NodeId(0), |NodeId(n)| NodeId(n + 1))
}

/// Redirects one input reference of node `at`.
pub fn replace_input(g: &IRGraph, at: NodeId, role: Role, new: NodeId) -> Result<IRGraph, GraphError> {
    let (node, stamp) = g.nodes.get(&at).ok_or(GraphError::MissingNode(at))?;
    if !g.contains(new) {
        return Err(GraphError::MissingNode(new));
    }
    if !node.inputs().iter().any(|(r, _)| *r == role) {
        return Err(GraphError::InvalidRole {
            id: at,
            kind: node.kind_name(),
            role: role.to_string(),
        });
    }
    let mut node = node.clone();
    *node.slot_mut(role).expect("role listed in inputs") = new;
    Ok(g.with_node(at, node, *stamp))
}

/// Everything reachable from start over successor and input edges, plus the
/// implicit End→merge edge.
pub fn reachable(g: &IRGraph) -> BTreeSet<NodeId> {
    let owners = g.end_owners();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([g.start()]);
    while let Some(id) = queue.pop_front() {
        let Some(node) = g.node(id) else { continue };
        if !seen.insert(id) {
            continue;
        }
        if let Some((m, _)) = owners.get(&id).filter(|_| matches!(node, IRNode::End)) {
            queue.push_back(*m);
        }
        queue.extend(node.references().into_iter().map(|(_, r)| r));
    }
    seen
}

/// A single embedded test vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub method: String,
    pub args: Vec<Value>,
    pub expect: Value,
}

/// An expected optimization result for one method and phase pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Golden {
    pub method: String,
    pub phases: Vec<Phase>,
    pub graph: IRGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub methods: BTreeMap<String, IRGraph>,
    pub fields: BTreeMap<String, Value>,
    pub tests: Vec<TestCase>,
    pub goldens: Vec<Golden>,
}

impl Program {
    pub fn single(name: impl Into<String>, graph: IRGraph) -> Self {
        let mut p = Program::default();
        p.methods.insert(name.into(), graph);
        p
    }

    pub fn method(&self, name: &str) -> Option<&IRGraph> {
        self.methods.get(name)
    }

    /// Graph violations per method plus unresolved invoke targets.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, g) in &self.methods {
            out.extend(validate(g).into_iter().map(|v| format!("{name}: {v}")));
            for (id, node, _) in g.iter() {
                if let IRNode::Invoke { method, .. } = node {
                    if !self.methods.contains_key(method) {
                        out.push(format!("{name}: node {id}: unresolved invoke target {method}"));
                    }
                }
            }
        }
        for t in &self.tests {
            if !self.methods.contains_key(&t.method) {
                out.push(format!("test names unknown method {}", t.method));
            }
        }
        out
    }

    pub fn tests_for<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a TestCase> + 'a {
        self.tests.iter().filter(move |t| t.method == method)
    }
}
