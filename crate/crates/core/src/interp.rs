//! Executable semantics: control flow is stepped one transition at a time,
//! data-flow expressions are evaluated on demand by walking input edges.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::ir::{ArithOp, IRGraph, IRNode, NodeId, Program};
use crate::stamp::Stamp;
use crate::value::{eval_binary, eval_compare, eval_convert, eval_divrem, eval_shift, eval_unary, ConvertOp, Value};

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("unknown method {0}")]
    UnknownMethod(String),
    #[error("{method}: no node {node}")]
    MissingNode { method: String, node: NodeId },
    #[error("{method}: node {node}: division by zero")]
    DivisionByZero { method: String, node: NodeId },
    #[error("step limit {0} exceeded")]
    StepLimit(u64),
    #[error("{method}: node {node}: data-flow use before control-flow execution")]
    MissingFixedResult { method: String, node: NodeId },
    #[error("{method}: node {node}: phi read before its merge was entered")]
    UnboundPhi { method: String, node: NodeId },
    #[error("unknown field {0}")]
    UnknownField(String),
    #[error("{method}: node {node}: {kind} is not a data node")]
    NotData {
        method: String,
        node: NodeId,
        kind: &'static str,
    },
    #[error("{method}: node {node}: {kind} is not a control node")]
    NotControl {
        method: String,
        node: NodeId,
        kind: &'static str,
    },
    #[error("{method}: parameter {index} not supplied")]
    MissingParameter { method: String, index: u32 },
    #[error("{method}: node {node}: End has no owning merge")]
    UnownedEnd { method: String, node: NodeId },
    #[error("{method}: node {node}: branch condition is undefined")]
    UndefinedCondition { method: String, node: NodeId },
}

impl ExecError {
    /// Coarse class used when comparing outcomes of two runs.
    pub fn class(&self) -> &'static str {
        match self {
            ExecError::DivisionByZero { .. } => "division-by-zero",
            ExecError::StepLimit(_) => "step-limit",
            _ => "error",
        }
    }
}

/// A suspended caller while a callee runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub method: String,
    pub invoke: NodeId,
    pub params: Vec<Value>,
    pub fixed_results: HashMap<NodeId, Value>,
    pub phi_values: HashMap<NodeId, Value>,
    pub last_end_index: HashMap<NodeId, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecState {
    pub current: NodeId,
    pub method: String,
    pub params: Vec<Value>,
    /// Values produced by control-path data nodes (division, invokes).
    pub fixed_results: HashMap<NodeId, Value>,
    pub phi_values: HashMap<NodeId, Value>,
    /// Which end list position last entered each merge.
    pub last_end_index: HashMap<NodeId, usize>,
    pub static_fields: BTreeMap<String, Value>,
    pub call_stack: Vec<Frame>,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Step {
    Continue(ExecState),
    Finished(Value),
}

/// Executes methods of one program.
#[derive(Debug)]
pub struct Interpreter<'p> {
    program: &'p Program,
    step_limit: u64,
    indices: HashMap<&'p str, MethodIndex>,
}

#[derive(Debug, Default)]
struct MethodIndex {
    end_owner: HashMap<NodeId, (NodeId, usize)>,
    phis: HashMap<NodeId, Vec<NodeId>>,
}

impl MethodIndex {
    fn build(g: &IRGraph) -> Self {
        let mut phis: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for (id, node, _) in g.iter() {
            if let IRNode::ValuePhi { merge, .. } = node {
                phis.entry(*merge).or_default().push(id);
            }
        }
        MethodIndex {
            end_owner: g.end_owners(),
            phis,
        }
    }
}

impl<'p> Interpreter<'p> {
    pub fn new(program: &'p Program) -> Self {
        let indices = program
            .methods
            .iter()
            .map(|(name, g)| (name.as_str(), MethodIndex::build(g)))
            .collect();
        Interpreter {
            program,
            step_limit: DEFAULT_STEP_LIMIT,
            indices,
        }
    }

    pub fn with_step_limit(mut self, limit: u64) -> Self {
        self.step_limit = limit;
        self
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    fn graph(&self, method: &str) -> Result<&'p IRGraph, ExecError> {
        self.program
            .method(method)
            .ok_or_else(|| ExecError::UnknownMethod(method.to_string()))
    }

    fn node<'g>(&self, g: &'g IRGraph, s: &ExecState, id: NodeId) -> Result<&'g IRNode, ExecError> {
        g.node(id).ok_or_else(|| ExecError::MissingNode {
            method: s.method.clone(),
            node: id,
        })
    }

    /// Initial state for `method` with `args` already widened.
    pub fn initial_state(&self, method: &str, args: Vec<Value>) -> Result<ExecState, ExecError> {
        let g = self.graph(method)?;
        Ok(ExecState {
            current: g.start(),
            method: method.to_string(),
            params: args,
            fixed_results: HashMap::new(),
            phi_values: HashMap::new(),
            last_end_index: HashMap::new(),
            static_fields: self.program.fields.clone(),
            call_stack: Vec::new(),
            steps: 0,
        })
    }

    /// Value of data node `n` in state `s`.
    pub fn eval_expr(&self, g: &IRGraph, s: &ExecState, n: NodeId) -> Result<Value, ExecError> {
        let node = self.node(g, s, n)?;
        let eval = |id| self.eval_expr(g, s, id);
        match node {
            IRNode::Constant { value } => Ok(*value),
            IRNode::Parameter { index } => {
                s.params
                    .get(*index as usize)
                    .copied()
                    .ok_or_else(|| ExecError::MissingParameter {
                        method: s.method.clone(),
                        index: *index,
                    })
            }
            IRNode::ValuePhi { .. } => s.phi_values.get(&n).copied().ok_or_else(|| ExecError::UnboundPhi {
                method: s.method.clone(),
                node: n,
            }),
            IRNode::DivRem { .. } | IRNode::Invoke { .. } => {
                s.fixed_results
                    .get(&n)
                    .copied()
                    .ok_or_else(|| ExecError::MissingFixedResult {
                        method: s.method.clone(),
                        node: n,
                    })
            }
            IRNode::LoadField { field } => s
                .static_fields
                .get(field)
                .copied()
                .ok_or_else(|| ExecError::UnknownField(field.clone())),
            IRNode::Conditional {
                cond,
                true_val,
                false_val,
            } => match eval(*cond)?.truthy() {
                Some(true) => eval(*true_val),
                Some(false) => eval(*false_val),
                None => Ok(Value::Undef),
            },
            IRNode::Arith { x, y, .. } | IRNode::Compare { x, y, .. } => {
                Ok(apply_pure(node, &[eval(*x)?, eval(*y)?]).unwrap_or(Value::Undef))
            }
            IRNode::Unary { x, .. } | IRNode::Convert { x, .. } => {
                Ok(apply_pure(node, &[eval(*x)?]).unwrap_or(Value::Undef))
            }
            other => Err(ExecError::NotData {
                method: s.method.clone(),
                node: n,
                kind: other.kind_name(),
            }),
        }
    }

    /// One control-flow transition.
    pub fn step(&self, mut s: ExecState) -> Result<Step, ExecError> {
        if s.steps >= self.step_limit {
            return Err(ExecError::StepLimit(self.step_limit));
        }
        s.steps += 1;
        let g = self.graph(&s.method)?;
        let id = s.current;
        let node = self.node(g, &s, id)?;
        match node {
            IRNode::Start { next, .. } | IRNode::Begin { next } | IRNode::LoopExit { next, .. } => {
                s.current = *next;
            }
            IRNode::If {
                condition,
                true_succ,
                false_succ,
            } => {
                let taken =
                    self.eval_expr(g, &s, *condition)?
                        .truthy()
                        .ok_or_else(|| ExecError::UndefinedCondition {
                            method: s.method.clone(),
                            node: id,
                        })?;
                s.current = if taken { *true_succ } else { *false_succ };
            }
            IRNode::End | IRNode::LoopEnd { .. } => {
                let index = &self.indices[s.method.as_str()];
                let (merge, pos) = match node {
                    IRNode::LoopEnd { loop_begin } => {
                        let pos = match g.node(*loop_begin) {
                            Some(IRNode::LoopBegin { ends, .. }) => ends.iter().position(|e| *e == id),
                            _ => None,
                        };
                        pos.map(|p| (*loop_begin, p))
                    }
                    _ => index.end_owner.get(&id).copied(),
                }
                .ok_or_else(|| ExecError::UnownedEnd {
                    method: s.method.clone(),
                    node: id,
                })?;
                // all phis read the pre-transition state, then bind together
                let phis = index.phis.get(&merge).map(Vec::as_slice).unwrap_or(&[]);
                let mut bound = Vec::with_capacity(phis.len());
                for &phi in phis {
                    let Some(IRNode::ValuePhi { values, .. }) = g.node(phi) else {
                        continue;
                    };
                    let input = *values.get(pos).ok_or_else(|| ExecError::MissingNode {
                        method: s.method.clone(),
                        node: phi,
                    })?;
                    bound.push((phi, self.eval_expr(g, &s, input)?));
                }
                s.phi_values.extend(bound);
                s.last_end_index.insert(merge, pos);
                s.current = match self.node(g, &s, merge)? {
                    IRNode::Merge { next, .. } | IRNode::LoopBegin { next, .. } => *next,
                    other => {
                        return Err(ExecError::NotControl {
                            method: s.method.clone(),
                            node: merge,
                            kind: other.kind_name(),
                        })
                    }
                };
            }
            IRNode::Merge { next, .. } | IRNode::LoopBegin { next, .. } => {
                // only reached if a graph jumps straight at a merge
                s.current = *next;
            }
            IRNode::DivRem { op, x, y, next } => {
                let a = self.eval_expr(g, &s, *x)?;
                let b = self.eval_expr(g, &s, *y)?;
                let (a, b) = promote_binary(a, b);
                let v = eval_divrem(*op, a, b).map_err(|_| ExecError::DivisionByZero {
                    method: s.method.clone(),
                    node: id,
                })?;
                s.fixed_results.insert(id, v);
                s.current = *next;
            }
            IRNode::StoreField { field, value, next } => {
                let v = self.eval_expr(g, &s, *value)?;
                s.static_fields.insert(field.clone(), v);
                s.current = *next;
            }
            IRNode::Invoke { method, args, .. } => {
                let callee = self.graph(method)?;
                let args = args
                    .iter()
                    .map(|a| self.eval_expr(g, &s, *a))
                    .collect::<Result<Vec<_>, _>>()?;
                let args = widen_args(callee, args);
                let frame = Frame {
                    method: std::mem::replace(&mut s.method, method.clone()),
                    invoke: id,
                    params: std::mem::replace(&mut s.params, args),
                    fixed_results: std::mem::take(&mut s.fixed_results),
                    phi_values: std::mem::take(&mut s.phi_values),
                    last_end_index: std::mem::take(&mut s.last_end_index),
                };
                s.call_stack.push(frame);
                s.current = callee.start();
            }
            IRNode::Return { value } => {
                let v = match value {
                    Some(v) => self.eval_expr(g, &s, *v)?,
                    None => Value::Undef,
                };
                let Some(frame) = s.call_stack.pop() else {
                    return Ok(Step::Finished(coerce_boolean(v)));
                };
                s.method = frame.method;
                s.params = frame.params;
                s.fixed_results = frame.fixed_results;
                s.phi_values = frame.phi_values;
                s.last_end_index = frame.last_end_index;
                s.fixed_results.insert(frame.invoke, v);
                let caller = self.graph(&s.method)?;
                s.current = match self.node(caller, &s, frame.invoke)? {
                    IRNode::Invoke { next, .. } => *next,
                    other => {
                        return Err(ExecError::NotControl {
                            method: s.method.clone(),
                            node: frame.invoke,
                            kind: other.kind_name(),
                        })
                    }
                };
            }
            other => {
                return Err(ExecError::NotControl {
                    method: s.method.clone(),
                    node: id,
                    kind: other.kind_name(),
                })
            }
        }
        Ok(Step::Continue(s))
    }

    /// Runs `method` to completion. Narrow arguments are widened to 32 bits
    /// first, as Java does for `byte`, `short`, `char` and `boolean`.
    pub fn run(&self, method: &str, args: &[Value]) -> Result<Value, ExecError> {
        let g = self.graph(method)?;
        let mut state = self.initial_state(method, widen_args(g, args.to_vec()))?;
        loop {
            match self.step(state)? {
                Step::Continue(next) => state = next,
                Step::Finished(v) => return Ok(v),
            }
        }
    }

    pub fn static_test(&self, method: &str, args: &[Value], expected: Value) -> TestOutcome {
        let actual = self.run(method, args);
        let pass = actual.as_ref().is_ok_and(|v| *v == expected);
        TestOutcome {
            method: method.to_string(),
            args: args.to_vec(),
            expected,
            actual,
            pass,
        }
    }
}

/// Result of one `static_test`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestOutcome {
    pub method: String,
    pub args: Vec<Value>,
    pub expected: Value,
    pub actual: Result<Value, ExecError>,
    pub pass: bool,
}

pub fn run(p: &Program, method: &str, args: &[Value]) -> Result<Value, ExecError> {
    Interpreter::new(p).run(method, args)
}

pub fn static_test(p: &Program, method: &str, args: &[Value], expected: Value) -> TestOutcome {
    Interpreter::new(p).static_test(method, args, expected)
}

/// 1-bit method results are returned as 32-bit 0/1.
fn coerce_boolean(v: Value) -> Value {
    match v {
        Value::Int(i) if i.bits() == 1 => eval_convert(ConvertOp::ZeroExtend, 1, 32, v),
        _ => v,
    }
}

fn widen_args(g: &IRGraph, args: Vec<Value>) -> Vec<Value> {
    args.into_iter()
        .enumerate()
        .map(|(i, v)| {
            let Some(bits) = v.bits().filter(|b| *b < 32) else {
                return v;
            };
            let unsigned = bits == 1 || matches!(g.parameter_stamp(i), Some(Stamp::Integer(s)) if s.lo() >= 0);
            let op = if unsigned {
                ConvertOp::ZeroExtend
            } else {
                ConvertOp::SignExtend
            };
            eval_convert(op, u32::from(bits), 32, v)
        })
        .collect()
}

fn widen_to(v: Value, bits: u8) -> Value {
    match v.bits() {
        Some(b) if b < bits => eval_convert(ConvertOp::SignExtend, u32::from(b), u32::from(bits), v),
        _ => v,
    }
}

/// Binary numeric promotion: both operands to 64 bits if either is, else 32.
pub fn promote_binary(a: Value, b: Value) -> (Value, Value) {
    let target = if a.bits() == Some(64) || b.bits() == Some(64) {
        64
    } else {
        32
    };
    (widen_to(a, target), widen_to(b, target))
}

/// Unary numeric promotion: to at least 32 bits.
pub fn promote_unary(a: Value) -> Value {
    widen_to(a, 32)
}

/// Evaluates a side-effect-free operator node over already-computed inputs,
/// applying Java numeric promotion. `None` for nodes that are not pure
/// operators or when the input count is wrong.
pub fn apply_pure(node: &IRNode, inputs: &[Value]) -> Option<Value> {
    match (node, inputs) {
        (
            IRNode::Arith {
                op: ArithOp::Binary(op),
                ..
            },
            [a, b],
        ) => {
            let (a, b) = promote_binary(*a, *b);
            Some(eval_binary(*op, a, b))
        }
        (
            IRNode::Arith {
                op: ArithOp::Shift(op), ..
            },
            [a, b],
        ) => Some(eval_shift(*op, promote_unary(*a), *b)),
        (IRNode::Compare { op, .. }, [a, b]) => {
            let (a, b) = promote_binary(*a, *b);
            Some(eval_compare(*op, a, b))
        }
        (IRNode::Unary { op, .. }, [a]) => Some(eval_unary(*op, promote_unary(*a))),
        (
            IRNode::Convert {
                op, in_bits, out_bits, ..
            },
            [a],
        ) => Some(eval_convert(*op, *in_bits, *out_bits, *a)),
        _ => None,
    }
}
