//! AND–OR trees of arbitrary shape.
//!
//! Nodes live in an arena in pre-order, so the root is node 0, every parent
//! precedes its children and the leaves below a node form a contiguous range
//! of leaf ids. Leaf ids run left to right from 0.

use std::fmt;
use std::ops::Range;

use crate::assignment::{Assignment, Filter, TType};
use crate::error::{Error, Result};
use crate::sexpr::{self, syntax_error, SExpr};

/// Upper bound on leaves, imposed by the 64-bit assignment masks.
pub const MAX_LEAVES: usize = 64;

/// Upper bound on leaves for exhaustive enumeration of assignments.
pub const ENUMERATION_GUARD: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    And,
    Or,
}

impl Gate {
    /// The child value that decides the gate on its own.
    pub fn controlling(self) -> bool {
        matches!(self, Gate::Or)
    }

    pub fn dual(self) -> Gate {
        match self {
            Gate::And => Gate::Or,
            Gate::Or => Gate::And,
        }
    }

    pub fn apply(self, values: impl IntoIterator<Item = bool>) -> bool {
        let mut values = values.into_iter();
        match self {
            Gate::And => values.all(|v| v),
            Gate::Or => values.any(|v| v),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::And => "and",
            Gate::Or => "or",
        }
    }
}

/// Position of a node as the 1-based child indices from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "root" {
            return Ok(NodePath::root());
        }
        text.split('.')
            .map(|part| match part.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(Error::UnknownPath(text.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(NodePath)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

/// Recursive description of a tree, used to build and rebuild arenas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Leaf(Option<String>),
    Gate(Gate, Vec<Shape>),
}

impl Shape {
    pub fn leaf() -> Self {
        Shape::Leaf(None)
    }

    pub fn and(children: Vec<Shape>) -> Self {
        Shape::Gate(Gate::And, children)
    }

    pub fn or(children: Vec<Shape>) -> Self {
        Shape::Gate(Gate::Or, children)
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Shape::Leaf(_) => 1,
            Shape::Gate(_, children) => children.iter().map(Shape::leaf_count).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub gate: Option<Gate>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    pub path: NodePath,
    pub leaves: Range<usize>,
    pub name: Option<String>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.gate.is_none()
    }

    pub fn mask(&self) -> u64 {
        range_mask(&self.leaves)
    }
}

pub(crate) fn range_mask(r: &Range<usize>) -> u64 {
    let width = r.end - r.start;
    if width >= 64 {
        u64::MAX
    } else {
        ((1u64 << width) - 1) << r.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    nodes: Vec<Node>,
    leaf_nodes: Vec<usize>,
}

impl Tree {
    pub fn parse(text: &str) -> Result<Tree> {
        let expr = sexpr::parse_one(text)?;
        let shape = shape_from_sexpr(&expr, &mut Vec::new())?;
        Tree::from_shape(&shape)
    }

    pub fn leaf() -> Tree {
        Tree::from_shape(&Shape::leaf()).expect("single leaf is valid")
    }

    pub fn from_shape(shape: &Shape) -> Result<Tree> {
        let count = shape.leaf_count();
        if count > MAX_LEAVES {
            return Err(Error::BoundExceeded {
                what: "leaf count",
                actual: count as u128,
                bound: MAX_LEAVES as u128,
            });
        }
        let mut tree = Tree {
            nodes: Vec::new(),
            leaf_nodes: Vec::new(),
        };
        tree.push(shape, None, NodePath::root())?;
        Ok(tree)
    }

    fn push(&mut self, shape: &Shape, parent: Option<usize>, path: NodePath) -> Result<usize> {
        let idx = self.nodes.len();
        let start = self.leaf_nodes.len();
        match shape {
            Shape::Leaf(name) => {
                self.leaf_nodes.push(idx);
                self.nodes.push(Node {
                    gate: None,
                    children: Vec::new(),
                    parent,
                    path,
                    leaves: start..start + 1,
                    name: name.clone(),
                });
            }
            Shape::Gate(gate, children) => {
                if children.len() < 2 {
                    return Err(Error::Arity {
                        path: path.to_string(),
                        arity: children.len(),
                    });
                }
                self.nodes.push(Node {
                    gate: Some(*gate),
                    children: Vec::new(),
                    parent,
                    path: path.clone(),
                    leaves: start..start,
                    name: None,
                });
                let mut ids = Vec::with_capacity(children.len());
                for (j, child) in children.iter().enumerate() {
                    let mut child_path = path.0.clone();
                    child_path.push(j + 1);
                    ids.push(self.push(child, Some(idx), NodePath(child_path))?);
                }
                let end = self.leaf_nodes.len();
                let node = &mut self.nodes[idx];
                node.children = ids;
                node.leaves = start..end;
            }
        }
        Ok(idx)
    }

    pub fn to_shape(&self) -> Shape {
        self.shape_at(0)
    }

    fn shape_at(&self, idx: usize) -> Shape {
        let node = &self.nodes[idx];
        match node.gate {
            None => Shape::Leaf(node.name.clone()),
            Some(g) => Shape::Gate(g, node.children.iter().map(|&c| self.shape_at(c)).collect()),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_nodes.len()
    }

    /// Arena index of the node holding leaf `leaf`.
    pub fn leaf_node(&self, leaf: usize) -> usize {
        self.leaf_nodes[leaf]
    }

    pub fn is_leaf(&self) -> bool {
        self.nodes[0].is_leaf()
    }

    pub fn gate(&self) -> Option<Gate> {
        self.nodes[0].gate
    }

    /// Arena indices of the root's children.
    pub fn root_children(&self) -> &[usize] {
        &self.nodes[0].children
    }

    pub fn arity(&self) -> usize {
        self.nodes[0].children.len()
    }

    pub fn all_mask(&self) -> u64 {
        self.nodes[0].mask()
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.path.0.len()).max().unwrap_or(0)
    }

    /// Leaf ranges of the root's children.
    pub fn child_ranges(&self) -> Vec<Range<usize>> {
        self.root_children()
            .iter()
            .map(|&c| self.nodes[c].leaves.clone())
            .collect()
    }

    pub fn node_at(&self, path: &NodePath) -> Result<usize> {
        let mut idx = 0;
        for &step in &path.0 {
            let children = &self.nodes[idx].children;
            if step == 0 || step > children.len() {
                return Err(Error::UnknownPath(path.to_string()));
            }
            idx = children[step - 1];
        }
        Ok(idx)
    }

    pub fn check(&self, omega: &Assignment) -> Result<()> {
        if omega.len() != self.leaf_count() {
            return Err(Error::LengthMismatch {
                expected: self.leaf_count(),
                got: omega.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, omega: &Assignment) -> Result<bool> {
        self.check(omega)?;
        Ok(self.eval_bits(omega.bits()))
    }

    pub fn eval_bits(&self, bits: u64) -> bool {
        self.eval_node(0, bits)
    }

    pub fn eval_node(&self, idx: usize, bits: u64) -> bool {
        let node = &self.nodes[idx];
        match node.gate {
            None => bits >> node.leaves.start & 1 == 1,
            Some(g) => {
                let c = g.controlling();
                for &child in &node.children {
                    if self.eval_node(child, bits) == c {
                        return c;
                    }
                }
                !c
            }
        }
    }

    /// Value of every node under a partial assignment; `None` while undetermined.
    pub fn statuses(&self, known: u64, vals: u64) -> Vec<Option<bool>> {
        let mut status = vec![None; self.nodes.len()];
        for idx in (0..self.nodes.len()).rev() {
            let node = &self.nodes[idx];
            status[idx] = match node.gate {
                None => {
                    let leaf = node.leaves.start;
                    (known >> leaf & 1 == 1).then_some(vals >> leaf & 1 == 1)
                }
                Some(g) => {
                    let c = g.controlling();
                    let mut all_decided = true;
                    let mut result = None;
                    for &child in &node.children {
                        match status[child] {
                            Some(v) if v == c => {
                                result = Some(c);
                                break;
                            }
                            Some(_) => {}
                            None => all_decided = false,
                        }
                    }
                    result.or(all_decided.then_some(!c))
                }
            };
        }
        status
    }

    /// Unqueried leaves none of whose ancestors are determined.
    pub fn live_leaves(&self, known: u64, vals: u64) -> u64 {
        let status = self.statuses(known, vals);
        self.live_from_status(&status)
    }

    pub(crate) fn live_from_status(&self, status: &[Option<bool>]) -> u64 {
        let mut live = vec![false; self.nodes.len()];
        let mut mask = 0u64;
        for idx in 0..self.nodes.len() {
            let parent_live = self.nodes[idx].parent.is_none_or(|p| live[p]);
            live[idx] = parent_live && status[idx].is_none();
            if live[idx] && self.nodes[idx].is_leaf() {
                mask |= 1 << self.nodes[idx].leaves.start;
            }
        }
        mask
    }

    /// Leaves that a depth-first algorithm may query next: live leaves below
    /// every started but undetermined node.
    pub fn depth_first_candidates(&self, known: u64, vals: u64) -> u64 {
        let status = self.statuses(known, vals);
        let mut mask = self.live_from_status(&status);
        for (idx, node) in self.nodes.iter().enumerate() {
            if !node.is_leaf() && status[idx].is_none() && known & node.mask() != 0 {
                mask &= node.mask();
            }
        }
        mask
    }

    pub fn enumerate_assignments(&self, filter: Filter) -> Result<Vec<Assignment>> {
        let n = self.leaf_count();
        if n > ENUMERATION_GUARD {
            return Err(Error::BoundExceeded {
                what: "leaves for assignment enumeration",
                actual: n as u128,
                bound: ENUMERATION_GUARD as u128,
            });
        }
        Ok(Assignment::all(n)
            .filter(|w| filter.admits(self.eval_bits(w.bits())))
            .collect())
    }

    pub fn ttype(&self, omega: &Assignment) -> Result<TType> {
        self.check(omega)?;
        Ok(self.ttype_bits(omega.bits()))
    }

    pub fn ttype_bits(&self, bits: u64) -> TType {
        if self.is_leaf() {
            return TType(vec![self.eval_bits(bits)]);
        }
        TType(
            self.root_children()
                .iter()
                .map(|&c| self.eval_node(c, bits))
                .collect(),
        )
    }

    /// The subtree at `path`, renumbered from 0, with the map from its leaf
    /// ids to leaf ids of `self`.
    pub fn subtree(&self, path: &NodePath) -> Result<(Tree, Vec<usize>)> {
        let idx = self.node_at(path)?;
        Ok(self.subtree_at(idx))
    }

    pub fn subtree_at(&self, idx: usize) -> (Tree, Vec<usize>) {
        let tree = Tree::from_shape(&self.shape_at(idx)).expect("subtree of a valid tree");
        (tree, self.nodes[idx].leaves.clone().collect())
    }

    /// Subtrees under the root, in child order.
    pub fn children_trees(&self) -> Vec<Tree> {
        self.root_children()
            .iter()
            .map(|&c| self.subtree_at(c).0)
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_at(0, &mut out);
        out
    }

    fn render_at(&self, idx: usize, out: &mut String) {
        let node = &self.nodes[idx];
        match node.gate {
            None => out.push_str(node.name.as_deref().unwrap_or("*")),
            Some(g) => {
                out.push('(');
                out.push_str(g.name());
                for &c in &node.children {
                    out.push(' ');
                    self.render_at(c, out);
                }
                out.push(')');
            }
        }
    }

    /// Rendering that ignores names and the order of siblings.
    pub fn canonical_key(&self) -> String {
        self.canonical_at(0)
    }

    fn canonical_at(&self, idx: usize) -> String {
        let node = &self.nodes[idx];
        match node.gate {
            None => "*".to_string(),
            Some(g) => {
                let mut parts: Vec<String> = node
                    .children
                    .iter()
                    .map(|&c| self.canonical_at(c))
                    .collect();
                parts.sort();
                format!("({} {})", g.name(), parts.join(" "))
            }
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tree> {
        Tree::parse(s)
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn shape_from_sexpr(expr: &SExpr, path: &mut Vec<usize>) -> Result<Shape> {
    match expr {
        SExpr::Atom(a, pos) => {
            if a == "*" {
                Ok(Shape::Leaf(None))
            } else if is_ident(a) {
                Ok(Shape::Leaf(Some(a.clone())))
            } else {
                Err(syntax_error(*pos, format!("invalid leaf name {a:?}")))
            }
        }
        SExpr::Bar(pos) => Err(syntax_error(*pos, "unexpected '|'")),
        SExpr::List(sexpr::Bracket::Square, _, pos) => {
            Err(syntax_error(*pos, "expected '(' but found '['"))
        }
        SExpr::List(_, items, pos) => {
            let Some((head, rest)) = items.split_first() else {
                return Err(syntax_error(*pos, "empty list"));
            };
            let gate = match head.as_atom() {
                Some("and") => Gate::And,
                Some("or") => Gate::Or,
                _ => return Err(syntax_error(head.pos(), "expected gate 'and' or 'or'")),
            };
            if rest.len() < 2 {
                return Err(Error::Arity {
                    path: NodePath(path.clone()).to_string(),
                    arity: rest.len(),
                });
            }
            let mut children = Vec::with_capacity(rest.len());
            for (j, child) in rest.iter().enumerate() {
                path.push(j + 1);
                children.push(shape_from_sexpr(child, path)?);
                path.pop();
            }
            Ok(Shape::Gate(gate, children))
        }
    }
}

pub fn parse_tree(text: &str) -> Result<Tree> {
    Tree::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> Tree {
        Tree::parse("(and (or * *) (or * *))").unwrap()
    }

    fn w(s: &str) -> Assignment {
        s.parse().unwrap()
    }

    #[test]
    fn parse_smallest_tree() {
        let t = Tree::parse("(and * *)").unwrap();
        assert_eq!(t.gate(), Some(Gate::And));
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.node(t.leaf_node(0)).leaves, 0..1);
        assert_eq!(t.node(t.leaf_node(1)).leaves, 1..2);
    }

    #[test]
    fn parse_two_by_two() {
        let t = two_by_two();
        assert_eq!(t.leaf_count(), 4);
        assert_eq!(t.arity(), 2);
        assert_eq!(t.child_ranges(), vec![0..2, 2..4]);
        assert_eq!(t.node(t.root_children()[1]).path, NodePath(vec![2]));
        assert_eq!(t.height(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Tree::parse("(and *)"),
            Err(Error::Arity { arity: 1, .. })
        ));
        assert!(matches!(
            Tree::parse("(or * (and *))"),
            Err(Error::Arity { ref path, arity: 1 }) if path == "2"
        ));
        assert_eq!(Tree::parse("   "), Err(Error::EmptyInput));
        assert!(matches!(
            Tree::parse("(and * *)\n(xor * *)"),
            Err(Error::Syntax {
                line: 2,
                column: 1,
                ..
            })
        ));
        assert!(matches!(
            Tree::parse("(nand * *)"),
            Err(Error::Syntax {
                line: 1,
                column: 2,
                ..
            })
        ));
        assert!(matches!(
            Tree::parse("(and * 1x)"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn names_are_cosmetic() {
        let t = Tree::parse("(or a (and b_1 c) ; comment\n d)").unwrap();
        assert_eq!(t.leaf_count(), 4);
        assert_eq!(t.render(), "(or a (and b_1 c) d)");
        assert_eq!(t.canonical_key(), "(or (and * *) * *)");
    }

    #[test]
    fn eval_examples() {
        let and2 = Tree::parse("(and * *)").unwrap();
        assert!(and2.eval(&w("11")).unwrap());
        assert!(!two_by_two().eval(&w("1100")).unwrap());
        let or3 = Tree::parse("(or * * *)").unwrap();
        assert!(!or3.eval(&w("000")).unwrap());
        assert!(matches!(
            and2.eval(&w("111")),
            Err(Error::LengthMismatch {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn enumerate_examples() {
        let and2 = Tree::parse("(and * *)").unwrap();
        assert_eq!(
            and2.enumerate_assignments(Filter::One).unwrap(),
            vec![w("11")]
        );
        assert_eq!(
            and2.enumerate_assignments(Filter::Zero).unwrap(),
            vec![w("00"), w("01"), w("10")]
        );
        assert_eq!(
            two_by_two()
                .enumerate_assignments(Filter::Zero)
                .unwrap()
                .len(),
            7
        );
        let all = two_by_two().enumerate_assignments(Filter::All).unwrap();
        assert_eq!(all.len(), 16);
        assert_eq!(all[1], w("0001"));
    }

    #[test]
    fn enumeration_guard() {
        let shape = Shape::or((0..25).map(|_| Shape::leaf()).collect());
        let t = Tree::from_shape(&shape).unwrap();
        assert!(matches!(
            t.enumerate_assignments(Filter::All),
            Err(Error::BoundExceeded { .. })
        ));
        let shape = Shape::or((0..65).map(|_| Shape::leaf()).collect());
        assert!(Tree::from_shape(&shape).is_err());
    }

    #[test]
    fn ttype_examples() {
        let t = two_by_two();
        assert_eq!(t.ttype(&w("1100")).unwrap(), TType(vec![true, false]));
        assert_eq!(t.ttype(&w("0101")).unwrap(), TType(vec![true, true]));
        let and2 = Tree::parse("(and * *)").unwrap();
        assert_eq!(and2.ttype(&w("01")).unwrap(), TType(vec![false, true]));
    }

    #[test]
    fn subtree_examples() {
        let t = two_by_two();
        let (s1, m1) = t.subtree(&NodePath(vec![1])).unwrap();
        assert_eq!(s1.render(), "(or * *)");
        assert_eq!(m1, vec![0, 1]);
        let (s2, m2) = t.subtree(&NodePath(vec![2])).unwrap();
        assert_eq!(s2.render(), "(or * *)");
        assert_eq!(m2, vec![2, 3]);
        let (s0, m0) = t.subtree(&NodePath::root()).unwrap();
        assert_eq!(s0, t);
        assert_eq!(m0, vec![0, 1, 2, 3]);
        assert!(matches!(
            t.subtree(&NodePath(vec![3])),
            Err(Error::UnknownPath(_))
        ));
        assert_eq!(NodePath::parse("2.1").unwrap(), NodePath(vec![2, 1]));
    }

    #[test]
    fn partial_statuses_and_candidates() {
        let t = two_by_two();
        // x1 = 1 settles the first OR; x3, x4 remain live.
        let live = t.live_leaves(0b0001, 0b0001);
        assert_eq!(live, 0b1100);
        // x1 = 0 leaves the first OR open, so depth-first must take x2.
        assert_eq!(t.depth_first_candidates(0b0001, 0b0000), 0b0010);
        assert_eq!(t.live_leaves(0b0001, 0b0000), 0b1110);
        // Both leaves of the first OR are 0: the root is decided.
        assert_eq!(t.statuses(0b0011, 0)[0], Some(false));
        assert_eq!(t.live_leaves(0b0011, 0), 0);
    }
}
