//! Immediate dominators over the control-flow graph, computed with the
//! iterative data-flow algorithm of Cooper, Harvey and Kennedy.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::ir::{IRGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatorTree {
    root: NodeId,
    idom: BTreeMap<NodeId, NodeId>,
    children: BTreeMap<NodeId, Vec<NodeId>>,
    /// Reverse postorder of the reachable control nodes.
    rpo: Vec<NodeId>,
}

impl DominatorTree {
    pub fn root(&self) -> NodeId {
        self.root
    }

    /// `None` for the root and for unreachable nodes.
    pub fn idom(&self, n: NodeId) -> Option<NodeId> {
        self.idom.get(&n).copied()
    }

    /// Dominator-tree children in id order.
    pub fn children(&self, n: NodeId) -> &[NodeId] {
        self.children.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn reverse_postorder(&self) -> &[NodeId] {
        &self.rpo
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n == self.root || self.idom.contains_key(&n)
    }

    pub fn dominates(&self, a: NodeId, mut b: NodeId) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.idom(b) {
                Some(up) => b = up,
                None => return false,
            }
        }
    }
}

pub fn dominator_tree(g: &IRGraph) -> DominatorTree {
    let owners = g.end_owners();
    let root = g.start();

    // postorder DFS over control successors
    let mut post = Vec::new();
    let mut seen = HashSet::from([root]);
    let mut stack = vec![(root, g.cfg_successors(&owners, root), 0usize)];
    while let Some(top) = stack.last_mut() {
        let next = top.1.get(top.2).copied();
        top.2 += 1;
        match next {
            Some(s) => {
                if g.contains(s) && seen.insert(s) {
                    let ss = g.cfg_successors(&owners, s);
                    stack.push((s, ss, 0));
                }
            }
            None => {
                post.push(top.0);
                stack.pop();
            }
        }
    }
    let rpo: Vec<NodeId> = post.iter().rev().copied().collect();
    let order: HashMap<NodeId, usize> = rpo.iter().enumerate().map(|(i, n)| (*n, i)).collect();

    let mut preds: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for &n in &rpo {
        for s in g.cfg_successors(&owners, n) {
            if order.contains_key(&s) {
                preds.entry(s).or_default().push(n);
            }
        }
    }

    let mut idom: HashMap<NodeId, NodeId> = HashMap::from([(root, root)]);
    let intersect = |idom: &HashMap<NodeId, NodeId>, mut a: NodeId, mut b: NodeId| {
        while a != b {
            while order[&a] > order[&b] {
                a = idom[&a];
            }
            while order[&b] > order[&a] {
                b = idom[&b];
            }
        }
        a
    };
    let mut changed = true;
    while changed {
        changed = false;
        for &n in rpo.iter().skip(1) {
            let mut new_idom: Option<NodeId> = None;
            for &p in preds.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
                if !idom.contains_key(&p) {
                    continue;
                }
                new_idom = Some(match new_idom {
                    None => p,
                    Some(cur) => intersect(&idom, p, cur),
                });
            }
            if let Some(d) = new_idom {
                if idom.get(&n) != Some(&d) {
                    idom.insert(n, d);
                    changed = true;
                }
            }
        }
    }

    idom.remove(&root);
    let idom: BTreeMap<NodeId, NodeId> = idom.into_iter().collect();
    let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (&n, &d) in &idom {
        children.entry(d).or_default().push(n);
    }
    DominatorTree {
        root,
        idom,
        children,
        rpo,
    }
}
