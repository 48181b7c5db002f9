//! Structural equivalence of graphs up to node renumbering.
//!
//! Both graphs are renumbered by a breadth-first walk from their start node
//! that visits control successors before inputs. Unreachable nodes are
//! dropped, so two graphs are equivalent exactly when their renumbered forms
//! are equal.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ir::{IRGraph, IRNode, NodeId};
use crate::stamp::Stamp;

/// Target for references to nodes that do not exist.
const DANGLING: NodeId = NodeId(u32::MAX);

/// Original id to canonical id, in visit order.
pub fn canonical_numbering(g: &IRGraph) -> HashMap<NodeId, NodeId> {
    let owners = g.end_owners();
    let mut map = HashMap::new();
    let mut queue = VecDeque::new();
    if g.contains(g.start()) {
        map.insert(g.start(), NodeId(0));
        queue.push_back(g.start());
    }
    while let Some(id) = queue.pop_front() {
        let node = g.node(id).expect("only present nodes are queued");
        let mut next: Vec<NodeId> = match node {
            IRNode::End => owners.get(&id).map(|(m, _)| *m).into_iter().collect(),
            n => n.successors().into_iter().map(|(_, s)| s).collect(),
        };
        next.extend(node.inputs().into_iter().map(|(_, r)| r));
        for r in next {
            if g.contains(r) && !map.contains_key(&r) {
                map.insert(r, NodeId(map.len() as u32));
                queue.push_back(r);
            }
        }
    }
    map
}

/// The reachable part of `g`, renumbered canonically.
pub fn canonical_form(g: &IRGraph) -> IRGraph {
    let map = canonical_numbering(g);
    let keep: BTreeSet<NodeId> = map.keys().copied().collect();
    let nodes = g
        .retain(&keep)
        .iter()
        .map(|(id, node, stamp)| {
            let mut node = node.clone();
            node.map_refs(|r| map.get(&r).copied().unwrap_or(DANGLING));
            (map[&id], (node, stamp))
        })
        .collect();
    IRGraph::from_parts_unchecked(NodeId(0), nodes)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Difference {
    pub canonical_id: NodeId,
    /// Original ids on each side, if the node exists there.
    pub left: Option<NodeId>,
    pub right: Option<NodeId>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivReport {
    pub equivalent: bool,
    pub first_difference: Option<Difference>,
}

pub fn structurally_equivalent(a: &IRGraph, b: &IRGraph) -> EquivReport {
    compare(a, b, false)
}

/// Equivalence ignoring stamps.
pub fn structurally_equivalent_ignoring_stamps(a: &IRGraph, b: &IRGraph) -> EquivReport {
    compare(a, b, true)
}

fn describe(n: Option<(&IRNode, Stamp)>) -> String {
    match n {
        Some((node, stamp)) => format!("{node:?} : {stamp}"),
        None => "nothing".to_string(),
    }
}

fn compare(a: &IRGraph, b: &IRGraph, ignore_stamps: bool) -> EquivReport {
    let (ma, mb) = (canonical_numbering(a), canonical_numbering(b));
    let (ca, cb) = (canonical_form(a), canonical_form(b));
    let invert = |m: &HashMap<NodeId, NodeId>| -> HashMap<NodeId, NodeId> { m.iter().map(|(k, v)| (*v, *k)).collect() };
    let (ia, ib) = (invert(&ma), invert(&mb));
    let count = ca.len().max(cb.len()) as u32;
    for i in 0..count {
        let id = NodeId(i);
        let na = ca.node(id).map(|n| (n, ca.stamp(id).unwrap()));
        let nb = cb.node(id).map(|n| (n, cb.stamp(id).unwrap()));
        let same = match (na, nb) {
            (Some((x, sx)), Some((y, sy))) => x == y && (ignore_stamps || sx == sy),
            _ => false,
        };
        if !same {
            return EquivReport {
                equivalent: false,
                first_difference: Some(Difference {
                    canonical_id: id,
                    left: ia.get(&id).copied(),
                    right: ib.get(&id).copied(),
                    detail: format!("{} vs {}", describe(na), describe(nb)),
                }),
            };
        }
    }
    EquivReport {
        equivalent: true,
        first_difference: None,
    }
}

/// Renames every node with a random permutation of `0..len`.
pub fn permute_ids(g: &IRGraph, rng: &mut impl Rng) -> IRGraph {
    let ids: Vec<NodeId> = g.ids().collect();
    let mut targets: Vec<NodeId> = (0..ids.len() as u32).map(NodeId).collect();
    targets.shuffle(rng);
    let map: HashMap<NodeId, NodeId> = ids.into_iter().zip(targets).collect();
    g.renumber(&map)
}

impl std::fmt::Display for Difference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |o: Option<NodeId>| o.map_or("-".to_string(), |n| n.to_string());
        write!(
            f,
            "first difference at canonical node {} (left {}, right {}): {}",
            self.canonical_id,
            show(self.left),
            show(self.right),
            self.detail
        )
    }
}
