//! JSON program files.
//!
//! ```text
//! {"methods": {NAME: {"start": 0, "nodes": [[ID, {"kind": KIND, ROLE: REF, ...}, {"stamp": STAMP}], ...]}},
//!  "fields": {NAME: VALUE},
//!  "tests": [{"method": NAME, "args": [VALUE, ...], "expect": VALUE}],
//!  "goldens": [{"method": NAME, "phases": ["condelim", ...], "graph": GRAPH}]}
//! ```
//!
//! Values are `["int", bits, raw]` with `raw` the masked unsigned payload, or
//! `"undef"`. Stamps are `"void"`, `"illegal"` or `["int", bits, lo, hi]`.
//! Missing optional references are `null`. `goldens` is omitted when empty.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::ir::{build_graph, ArithOp, Golden, IRGraph, IRNode, NodeId, Program, TestCase};
use crate::optimizer::Phase;
use crate::stamp::Stamp;
use crate::value::{is_supported_bits, BinaryOp, CompareOp, ConvertOp, DivRemOp, IntVal, ShiftOp, UnaryOp, Value};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{context}: unknown node kind {kind:?}")]
    UnknownKind { context: String, kind: String },
    #[error("{context}: {msg}")]
    Invalid { context: String, msg: String },
}

fn invalid(context: &str, msg: impl Into<String>) -> FormatError {
    FormatError::Invalid {
        context: context.to_string(),
        msg: msg.into(),
    }
}

pub fn parse_program(text: &str) -> Result<Program, FormatError> {
    let root: Json = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let root = root
        .as_object()
        .ok_or_else(|| invalid("program", "expected an object"))?;

    let mut program = Program::default();
    if let Some(methods) = root.get("methods") {
        let methods = methods
            .as_object()
            .ok_or_else(|| invalid("methods", "expected an object"))?;
        for (name, g) in methods {
            program.methods.insert(name.clone(), parse_graph(name, g)?);
        }
    }
    if let Some(fields) = root.get("fields") {
        let fields = fields
            .as_object()
            .ok_or_else(|| invalid("fields", "expected an object"))?;
        for (name, v) in fields {
            program
                .fields
                .insert(name.clone(), parse_value(&format!("field {name}"), v)?);
        }
    }
    if let Some(tests) = root.get("tests") {
        let tests = tests.as_array().ok_or_else(|| invalid("tests", "expected an array"))?;
        for (i, t) in tests.iter().enumerate() {
            let ctx = format!("test {i}");
            let method = t
                .get("method")
                .and_then(Json::as_str)
                .ok_or_else(|| invalid(&ctx, "missing method"))?
                .to_string();
            let args = t
                .get("args")
                .and_then(Json::as_array)
                .ok_or_else(|| invalid(&ctx, "missing args"))?
                .iter()
                .map(|a| parse_value(&ctx, a))
                .collect::<Result<Vec<_>, _>>()?;
            let expect = parse_value(&ctx, t.get("expect").ok_or_else(|| invalid(&ctx, "missing expect"))?)?;
            program.tests.push(TestCase { method, args, expect });
        }
    }
    if let Some(goldens) = root.get("goldens") {
        let goldens = goldens
            .as_array()
            .ok_or_else(|| invalid("goldens", "expected an array"))?;
        for (i, gd) in goldens.iter().enumerate() {
            let ctx = format!("golden {i}");
            let method = gd
                .get("method")
                .and_then(Json::as_str)
                .ok_or_else(|| invalid(&ctx, "missing method"))?
                .to_string();
            let phases = gd
                .get("phases")
                .and_then(Json::as_array)
                .ok_or_else(|| invalid(&ctx, "missing phases"))?
                .iter()
                .map(|p| {
                    p.as_str()
                        .ok_or_else(|| invalid(&ctx, "phase must be a string"))?
                        .parse::<Phase>()
                        .map_err(|e| invalid(&ctx, e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let graph = parse_graph(&ctx, gd.get("graph").ok_or_else(|| invalid(&ctx, "missing graph"))?)?;
            program.goldens.push(Golden { method, phases, graph });
        }
    }
    Ok(program)
}

fn parse_graph(ctx: &str, g: &Json) -> Result<IRGraph, FormatError> {
    let start = g
        .get("start")
        .and_then(Json::as_u64)
        .ok_or_else(|| invalid(ctx, "missing start"))?;
    let entries = g
        .get("nodes")
        .and_then(Json::as_array)
        .ok_or_else(|| invalid(ctx, "missing nodes"))?;
    let mut parsed = Vec::with_capacity(entries.len());
    for e in entries {
        let e = e
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| invalid(ctx, "node entry must be [id, node, stamp]"))?;
        let id = e[0]
            .as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| invalid(ctx, "node id must be a natural number"))?;
        let nctx = format!("{ctx}: node {id}");
        let node = parse_node(&nctx, &e[1])?;
        let stamp = parse_stamp(&nctx, e[2].get("stamp").ok_or_else(|| invalid(&nctx, "missing stamp"))?)?;
        parsed.push((NodeId(id), node, stamp));
    }
    let graph = build_graph(parsed).map_err(|e| invalid(ctx, e.to_string()))?;
    if graph.start().0 as u64 != start {
        return Err(invalid(ctx, format!("start {start} is not the Start node")));
    }
    Ok(graph)
}

fn parse_value(ctx: &str, v: &Json) -> Result<Value, FormatError> {
    if v.as_str() == Some("undef") {
        return Ok(Value::Undef);
    }
    let bad = || invalid(ctx, format!("bad value {v}"));
    let a = v.as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
    if a[0].as_str() != Some("int") {
        return Err(bad());
    }
    let bits = a[1].as_u64().ok_or_else(bad)?;
    let raw = a[2].as_u64().ok_or_else(bad)?;
    IntVal::from_raw(bits as u32, raw)
        .map(Value::Int)
        .map_err(|e| invalid(ctx, e.to_string()))
}

fn parse_stamp(ctx: &str, s: &Json) -> Result<Stamp, FormatError> {
    match s.as_str() {
        Some("void") => return Ok(Stamp::Void),
        Some("illegal") => return Ok(Stamp::Illegal),
        _ => {}
    }
    let bad = || invalid(ctx, format!("bad stamp {s}"));
    let a = s.as_array().filter(|a| a.len() == 4).ok_or_else(bad)?;
    if a[0].as_str() != Some("int") {
        return Err(bad());
    }
    let bits = a[1].as_u64().ok_or_else(bad)? as u32;
    if !is_supported_bits(bits) {
        return Err(invalid(ctx, format!("unsupported stamp width {bits}")));
    }
    let lo = a[2].as_i64().ok_or_else(bad)?;
    let hi = a[3].as_i64().ok_or_else(bad)?;
    Stamp::integer(bits, lo, hi).map_err(|e| invalid(ctx, e.to_string()))
}

struct Fields<'a> {
    ctx: &'a str,
    obj: &'a Map<String, Json>,
}

impl Fields<'_> {
    fn get(&self, key: &str) -> Result<&Json, FormatError> {
        self.obj
            .get(key)
            .ok_or_else(|| invalid(self.ctx, format!("missing field {key:?}")))
    }

    fn id(&self, key: &str) -> Result<NodeId, FormatError> {
        self.get(key)?
            .as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .map(NodeId)
            .ok_or_else(|| invalid(self.ctx, format!("{key} must be a node id")))
    }

    fn opt_id(&self, key: &str) -> Result<Option<NodeId>, FormatError> {
        match self.obj.get(key) {
            None | Some(Json::Null) => Ok(None),
            Some(_) => self.id(key).map(Some),
        }
    }

    fn ids(&self, key: &str) -> Result<Vec<NodeId>, FormatError> {
        self.get(key)?
            .as_array()
            .ok_or_else(|| invalid(self.ctx, format!("{key} must be a list")))?
            .iter()
            .map(|v| {
                v.as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .map(NodeId)
                    .ok_or_else(|| invalid(self.ctx, format!("{key} entries must be node ids")))
            })
            .collect()
    }

    fn nat(&self, key: &str) -> Result<u32, FormatError> {
        self.get(key)?
            .as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| invalid(self.ctx, format!("{key} must be a natural number")))
    }

    fn string(&self, key: &str) -> Result<String, FormatError> {
        self.get(key)?
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| invalid(self.ctx, format!("{key} must be a string")))
    }
}

fn arith_op(kind: &str) -> Option<ArithOp> {
    Some(match kind {
        "Add" => ArithOp::Binary(BinaryOp::Add),
        "Sub" => ArithOp::Binary(BinaryOp::Sub),
        "Mul" => ArithOp::Binary(BinaryOp::Mul),
        "And" => ArithOp::Binary(BinaryOp::And),
        "Or" => ArithOp::Binary(BinaryOp::Or),
        "Xor" => ArithOp::Binary(BinaryOp::Xor),
        "LeftShift" => ArithOp::Shift(ShiftOp::LeftShift),
        "RightShift" => ArithOp::Shift(ShiftOp::RightShift),
        "UnsignedRightShift" => ArithOp::Shift(ShiftOp::UnsignedRightShift),
        _ => return None,
    })
}

fn parse_node(ctx: &str, n: &Json) -> Result<IRNode, FormatError> {
    let obj = n.as_object().ok_or_else(|| invalid(ctx, "node must be an object"))?;
    let f = Fields { ctx, obj };
    let kind = f.string("kind")?;
    if let Some(op) = arith_op(&kind) {
        return Ok(IRNode::Arith {
            op,
            x: f.id("x")?,
            y: f.id("y")?,
        });
    }
    Ok(match kind.as_str() {
        "Start" => IRNode::Start {
            frame_state: f.opt_id("frameState")?,
            next: f.id("next")?,
        },
        "Parameter" => IRNode::Parameter { index: f.nat("index")? },
        "Constant" => IRNode::Constant {
            value: parse_value(ctx, f.get("value")?)?,
        },
        "FrameState" => IRNode::FrameState,
        "Return" => IRNode::Return {
            value: f.opt_id("value")?,
        },
        "If" => IRNode::If {
            condition: f.id("condition")?,
            true_succ: f.id("trueSucc")?,
            false_succ: f.id("falseSucc")?,
        },
        "Begin" => IRNode::Begin { next: f.id("next")? },
        "End" => IRNode::End,
        "Merge" => IRNode::Merge {
            ends: f.ids("endList")?,
            frame_state: f.opt_id("frameState")?,
            next: f.id("next")?,
        },
        "LoopBegin" => IRNode::LoopBegin {
            ends: f.ids("endList")?,
            next: f.id("next")?,
        },
        "LoopEnd" => IRNode::LoopEnd {
            loop_begin: f.id("loopBegin")?,
        },
        "LoopExit" => IRNode::LoopExit {
            loop_begin: f.id("loopBegin")?,
            next: f.id("next")?,
        },
        "ValuePhi" => IRNode::ValuePhi {
            merge: f.id("merge")?,
            values: f.ids("inputList")?,
        },
        "SignedDiv" | "SignedRem" => IRNode::DivRem {
            op: if kind == "SignedDiv" {
                DivRemOp::SignedDiv
            } else {
                DivRemOp::SignedRem
            },
            x: f.id("x")?,
            y: f.id("y")?,
            next: f.id("next")?,
        },
        "Negate" | "Not" | "Abs" => IRNode::Unary {
            op: match kind.as_str() {
                "Negate" => UnaryOp::Negate,
                "Not" => UnaryOp::Not,
                _ => UnaryOp::Abs,
            },
            x: f.id("x")?,
        },
        "IntegerEquals" | "IntegerLessThan" => IRNode::Compare {
            op: if kind == "IntegerEquals" {
                CompareOp::IntegerEquals
            } else {
                CompareOp::IntegerLessThan
            },
            x: f.id("x")?,
            y: f.id("y")?,
        },
        "Conditional" => IRNode::Conditional {
            cond: f.id("cond")?,
            true_val: f.id("trueVal")?,
            false_val: f.id("falseVal")?,
        },
        "SignExtend" | "ZeroExtend" | "Narrow" => IRNode::Convert {
            op: match kind.as_str() {
                "SignExtend" => ConvertOp::SignExtend,
                "ZeroExtend" => ConvertOp::ZeroExtend,
                _ => ConvertOp::Narrow,
            },
            in_bits: f.nat("inBits")?,
            out_bits: f.nat("outBits")?,
            x: f.id("x")?,
        },
        "Invoke" => IRNode::Invoke {
            method: f.string("methodName")?,
            args: f.ids("argList")?,
            next: f.id("next")?,
        },
        "LoadField" => IRNode::LoadField {
            field: f.string("fieldName")?,
        },
        "StoreField" => IRNode::StoreField {
            field: f.string("fieldName")?,
            value: f.id("value")?,
            next: f.id("next")?,
        },
        _ => {
            return Err(FormatError::UnknownKind {
                context: ctx.to_string(),
                kind,
            })
        }
    })
}

pub fn value_json(v: Value) -> Json {
    match v {
        Value::Undef => json!("undef"),
        Value::Int(i) => json!(["int", i.bits(), i.raw()]),
    }
}

fn stamp_json(s: Stamp) -> Json {
    match s {
        Stamp::Void => json!("void"),
        Stamp::Illegal => json!("illegal"),
        Stamp::Integer(i) => json!(["int", i.bits(), i.lo(), i.hi()]),
    }
}

fn opt(id: Option<NodeId>) -> Json {
    id.map_or(Json::Null, |i| json!(i.0))
}

fn ids(list: &[NodeId]) -> Json {
    Json::Array(list.iter().map(|i| json!(i.0)).collect())
}

/// The node object: `kind` plus one field per role.
pub fn node_json(node: &IRNode) -> Json {
    let mut m = Map::new();
    m.insert("kind".into(), json!(node.kind_name()));
    let mut put = |k: &str, v: Json| {
        m.insert(k.into(), v);
    };
    match node {
        IRNode::Start { frame_state, next } => {
            put("frameState", opt(*frame_state));
            put("next", json!(next.0));
        }
        IRNode::Parameter { index } => put("index", json!(index)),
        IRNode::Constant { value } => put("value", value_json(*value)),
        IRNode::FrameState | IRNode::End => {}
        IRNode::Return { value } => put("value", opt(*value)),
        IRNode::If {
            condition,
            true_succ,
            false_succ,
        } => {
            put("condition", json!(condition.0));
            put("trueSucc", json!(true_succ.0));
            put("falseSucc", json!(false_succ.0));
        }
        IRNode::Begin { next } => put("next", json!(next.0)),
        IRNode::Merge {
            ends,
            frame_state,
            next,
        } => {
            put("endList", ids(ends));
            put("frameState", opt(*frame_state));
            put("next", json!(next.0));
        }
        IRNode::LoopBegin { ends, next } => {
            put("endList", ids(ends));
            put("next", json!(next.0));
        }
        IRNode::LoopEnd { loop_begin } => put("loopBegin", json!(loop_begin.0)),
        IRNode::LoopExit { loop_begin, next } => {
            put("loopBegin", json!(loop_begin.0));
            put("next", json!(next.0));
        }
        IRNode::ValuePhi { merge, values } => {
            put("merge", json!(merge.0));
            put("inputList", ids(values));
        }
        IRNode::Arith { x, y, .. } | IRNode::Compare { x, y, .. } => {
            put("x", json!(x.0));
            put("y", json!(y.0));
        }
        IRNode::DivRem { x, y, next, .. } => {
            put("x", json!(x.0));
            put("y", json!(y.0));
            put("next", json!(next.0));
        }
        IRNode::Unary { x, .. } => put("x", json!(x.0)),
        IRNode::Conditional {
            cond,
            true_val,
            false_val,
        } => {
            put("cond", json!(cond.0));
            put("trueVal", json!(true_val.0));
            put("falseVal", json!(false_val.0));
        }
        IRNode::Convert {
            in_bits, out_bits, x, ..
        } => {
            put("inBits", json!(in_bits));
            put("outBits", json!(out_bits));
            put("x", json!(x.0));
        }
        IRNode::Invoke { method, args, next } => {
            put("methodName", json!(method));
            put("argList", ids(args));
            put("next", json!(next.0));
        }
        IRNode::LoadField { field } => put("fieldName", json!(field)),
        IRNode::StoreField { field, value, next } => {
            put("fieldName", json!(field));
            put("value", json!(value.0));
            put("next", json!(next.0));
        }
    }
    Json::Object(m)
}

fn write_graph(out: &mut String, g: &IRGraph, indent: &str) {
    out.push_str(&format!("{{\"start\": {}, \"nodes\": [\n", g.start().0));
    let lines: Vec<String> = g
        .iter()
        .map(|(id, node, stamp)| {
            let entry = json!([id.0, node_json(node), {"stamp": stamp_json(stamp)}]);
            format!("{indent}  {entry}")
        })
        .collect();
    out.push_str(&lines.join(",\n"));
    out.push_str(&format!("\n{indent}]}}"));
}

/// Deterministic rendering: methods and fields by name, nodes by id, one node
/// per line.
pub fn serialize_program(p: &Program) -> String {
    let mut out = String::from("{\n  \"methods\": {");
    let methods: Vec<String> = p
        .methods
        .iter()
        .map(|(name, g)| {
            let mut s = format!("\n    {}: ", json!(name));
            write_graph(&mut s, g, "    ");
            s
        })
        .collect();
    out.push_str(&methods.join(","));
    out.push_str(if p.methods.is_empty() { "},\n" } else { "\n  },\n" });

    let fields: BTreeMap<&String, Json> = p.fields.iter().map(|(k, v)| (k, value_json(*v))).collect();
    out.push_str(&format!("  \"fields\": {},\n", json!(fields)));

    out.push_str("  \"tests\": [");
    let tests: Vec<String> = p
        .tests
        .iter()
        .map(|t| {
            let args: Vec<Json> = t.args.iter().map(|a| value_json(*a)).collect();
            format!(
                "\n    {}",
                json!({"method": t.method, "args": args, "expect": value_json(t.expect)})
            )
        })
        .collect();
    out.push_str(&tests.join(","));
    out.push_str(if p.tests.is_empty() { "]" } else { "\n  ]" });

    if !p.goldens.is_empty() {
        out.push_str(",\n  \"goldens\": [");
        let goldens: Vec<String> = p
            .goldens
            .iter()
            .map(|gd| {
                let phases: Vec<&str> = gd.phases.iter().map(|ph| ph.name()).collect();
                let mut s = format!(
                    "\n    {{\"method\": {}, \"phases\": {}, \"graph\": ",
                    json!(gd.method),
                    json!(phases)
                );
                write_graph(&mut s, &gd.graph, "    ");
                s.push('}');
                s
            })
            .collect();
        out.push_str(&goldens.join(","));
        out.push_str("\n  ]");
    }
    out.push_str("\n}\n");
    out
}
