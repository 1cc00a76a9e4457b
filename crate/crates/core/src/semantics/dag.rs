use std::collections::HashMap;
use std::sync::Arc;

use crate::formula::Formula;

pub type NodeId = usize;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Node {
    Var(Arc<str>),
    Top,
    Bot,
    Neg(NodeId),
    And(NodeId, NodeId),
    Dia(u8, NodeId),
}

/// A formula with structurally equal subformulas merged. Children always
/// precede their parents, so a forward pass evaluates bottom-up.
#[derive(Clone, Debug)]
pub struct Dag {
    pub nodes: Vec<Node>,
    pub root: NodeId,
    index: HashMap<Node, NodeId>,
}

impl Dag {
    pub fn new() -> Self {
        Dag { nodes: Vec::new(), root: 0, index: HashMap::new() }
    }

    pub fn from_formula(f: &Formula) -> Self {
        let mut d = Dag::new();
        d.root = d.add(f);
        d
    }

    /// Adds `f` (sharing already present subformulas) and returns its node.
    pub fn add(&mut self, f: &Formula) -> NodeId {
        let mut by_ptr: HashMap<*const Formula, NodeId> = HashMap::new();
        self.add_rec(f, &mut by_ptr)
    }

    fn add_rec(&mut self, f: &Formula, by_ptr: &mut HashMap<*const Formula, NodeId>) -> NodeId {
        let key = f as *const Formula;
        if let Some(&id) = by_ptr.get(&key) {
            return id;
        }
        let node = match f {
            Formula::Var(v) => Node::Var(v.clone()),
            Formula::Top => Node::Top,
            Formula::Bot => Node::Bot,
            Formula::Neg(a) => Node::Neg(self.add_rec(a, by_ptr)),
            Formula::And(a, b) => {
                let a = self.add_rec(a, by_ptr);
                Node::And(a, self.add_rec(b, by_ptr))
            }
            Formula::Dia0(a) => Node::Dia(0, self.add_rec(a, by_ptr)),
            Formula::Dia1(a) => Node::Dia(1, self.add_rec(a, by_ptr)),
        };
        let id = self.intern(node);
        by_ptr.insert(key, id);
        id
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl Default for Dag {
    fn default() -> Self {
        Dag::new()
    }
}
