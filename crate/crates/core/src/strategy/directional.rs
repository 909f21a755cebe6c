//! Directional algorithms: a permutation of the children at every internal
//! node, hence a fixed priority order on the leaves.

use std::fmt;

use crate::error::{Error, Result};
use crate::sexpr::{self, syntax_error, Bracket, SExpr};
use crate::strategy::decision::GeneralAlgorithm;
use crate::tree::Tree;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DirectionalAlgorithm {
    Leaf,
    /// `order` lists 0-based child indices in evaluation order; `children`
    /// are indexed by child position, not by evaluation rank.
    Node {
        order: Vec<usize>,
        children: Vec<DirectionalAlgorithm>,
    },
}

impl DirectionalAlgorithm {
    /// Left-to-right evaluation at every node.
    pub fn identity(tree: &Tree) -> Self {
        Self::identity_at(tree, 0)
    }

    pub(crate) fn identity_at(tree: &Tree, idx: usize) -> Self {
        let node = tree.node(idx);
        if node.is_leaf() {
            return DirectionalAlgorithm::Leaf;
        }
        DirectionalAlgorithm::Node {
            order: (0..node.children.len()).collect(),
            children: node
                .children
                .iter()
                .map(|&c| Self::identity_at(tree, c))
                .collect(),
        }
    }

    pub fn compose(order: Vec<usize>, children: Vec<DirectionalAlgorithm>) -> Self {
        DirectionalAlgorithm::Node { order, children }
    }

    /// Root permutation, empty for a leaf.
    pub fn order(&self) -> &[usize] {
        match self {
            DirectionalAlgorithm::Leaf => &[],
            DirectionalAlgorithm::Node { order, .. } => order,
        }
    }

    /// Part of the algorithm acting on root child `j` (0-based).
    pub fn child(&self, j: usize) -> &DirectionalAlgorithm {
        match self {
            DirectionalAlgorithm::Leaf => panic!("a leaf algorithm has no children"),
            DirectionalAlgorithm::Node { children, .. } => &children[j],
        }
    }

    pub fn children(&self) -> &[DirectionalAlgorithm] {
        match self {
            DirectionalAlgorithm::Leaf => &[],
            DirectionalAlgorithm::Node { children, .. } => children,
        }
    }

    pub fn with_child(&self, j: usize, part: DirectionalAlgorithm) -> Self {
        match self {
            DirectionalAlgorithm::Leaf => panic!("a leaf algorithm has no children"),
            DirectionalAlgorithm::Node { order, children } => {
                let mut children = children.clone();
                children[j] = part;
                DirectionalAlgorithm::Node {
                    order: order.clone(),
                    children,
                }
            }
        }
    }

    pub fn validate(&self, tree: &Tree) -> Result<()> {
        self.validate_at(tree, 0)
    }

    fn validate_at(&self, tree: &Tree, idx: usize) -> Result<()> {
        let node = tree.node(idx);
        match self {
            DirectionalAlgorithm::Leaf if node.is_leaf() => Ok(()),
            DirectionalAlgorithm::Node { order, children } if !node.is_leaf() => {
                let n = node.children.len();
                if children.len() != n || !is_permutation(order, n) {
                    return Err(Error::ShapeMismatch(format!(
                        "directional algorithm does not match node {}",
                        node.path
                    )));
                }
                for (part, &c) in children.iter().zip(&node.children) {
                    part.validate_at(tree, c)?;
                }
                Ok(())
            }
            _ => Err(Error::ShapeMismatch(format!(
                "directional algorithm does not match node {}",
                node.path
            ))),
        }
    }

    /// Leaves in priority order.
    pub fn priority(&self, tree: &Tree) -> Vec<usize> {
        let mut out = Vec::with_capacity(tree.leaf_count());
        self.priority_at(tree, 0, &mut out);
        out
    }

    fn priority_at(&self, tree: &Tree, idx: usize, out: &mut Vec<usize>) {
        let node = tree.node(idx);
        match self {
            DirectionalAlgorithm::Leaf => out.push(node.leaves.start),
            DirectionalAlgorithm::Node { order, children } => {
                for &j in order {
                    children[j].priority_at(tree, node.children[j], out);
                }
            }
        }
    }

    /// Evaluates the subtree at arena index `idx`; returns its value and
    /// appends queried leaves to `probes`.
    pub(crate) fn run(&self, tree: &Tree, idx: usize, bits: u64, probes: &mut Vec<usize>) -> bool {
        let node = tree.node(idx);
        match (self, node.gate) {
            (DirectionalAlgorithm::Leaf, _) => {
                let leaf = node.leaves.start;
                probes.push(leaf);
                bits >> leaf & 1 == 1
            }
            (DirectionalAlgorithm::Node { order, children }, Some(g)) => {
                let c = g.controlling();
                for &j in order {
                    if children[j].run(tree, node.children[j], bits, probes) == c {
                        return c;
                    }
                }
                !c
            }
            _ => unreachable!("algorithm validated against tree"),
        }
    }

    pub(crate) fn cost_at(&self, tree: &Tree, idx: usize, bits: u64) -> (bool, u32) {
        let node = tree.node(idx);
        match (self, node.gate) {
            (DirectionalAlgorithm::Leaf, _) => (bits >> node.leaves.start & 1 == 1, 1),
            (DirectionalAlgorithm::Node { order, children }, Some(g)) => {
                let c = g.controlling();
                let mut total = 0;
                for &j in order {
                    let (v, k) = children[j].cost_at(tree, node.children[j], bits);
                    total += k;
                    if v == c {
                        return (c, total);
                    }
                }
                (!c, total)
            }
            _ => unreachable!("algorithm validated against tree"),
        }
    }

    pub fn cost_bits(&self, tree: &Tree, bits: u64) -> u32 {
        self.cost_at(tree, 0, bits).1
    }

    pub fn probe_bits(&self, tree: &Tree, bits: u64) -> Vec<usize> {
        let mut probes = Vec::new();
        self.run(tree, 0, bits, &mut probes);
        probes
    }

    /// The equivalent decision tree.
    pub fn lower(&self, tree: &Tree) -> GeneralAlgorithm {
        let priority = self.priority(tree);
        GeneralAlgorithm::from_policy(tree, |known, vals| {
            let live = tree.live_leaves(known, vals);
            *priority
                .iter()
                .find(|&&l| live >> l & 1 == 1)
                .expect("an undetermined tree has a live leaf")
        })
    }

    pub fn encode(&self) -> String {
        match self {
            DirectionalAlgorithm::Leaf => "*".to_string(),
            DirectionalAlgorithm::Node { order, children } => {
                let ranks: Vec<String> = order.iter().map(|j| (j + 1).to_string()).collect();
                let mut out = format!("[{}", ranks.join(" "));
                if children
                    .iter()
                    .any(|c| matches!(c, DirectionalAlgorithm::Node { .. }))
                {
                    out.push_str(" |");
                    for c in children {
                        out.push(' ');
                        out.push_str(&c.encode());
                    }
                }
                out.push(']');
                out
            }
        }
    }

    /// Parses the bracket encoding and checks it against `tree`.
    pub fn decode(text: &str, tree: &Tree) -> Result<Self> {
        let expr = sexpr::parse_one(text)?;
        let alg = Self::from_sexpr(&expr)?;
        alg.fill_leaves(tree, 0)
    }

    fn from_sexpr(expr: &SExpr) -> Result<Self> {
        match expr {
            SExpr::Atom(a, _) if a == "*" => Ok(DirectionalAlgorithm::Leaf),
            SExpr::List(Bracket::Square, items, pos) => {
                let split = items.iter().position(|e| matches!(e, SExpr::Bar(_)));
                let (head, tail) = match split {
                    Some(i) => (&items[..i], Some(&items[i + 1..])),
                    None => (&items[..], None),
                };
                let mut order = Vec::with_capacity(head.len());
                for e in head {
                    let rank: usize = e
                        .as_atom()
                        .and_then(|a| a.parse().ok())
                        .filter(|&r| r >= 1)
                        .ok_or_else(|| syntax_error(e.pos(), "expected a 1-based child index"))?;
                    order.push(rank - 1);
                }
                if !is_permutation(&order, order.len()) || order.len() < 2 {
                    return Err(syntax_error(*pos, "root order is not a permutation"));
                }
                let children = match tail {
                    None => vec![DirectionalAlgorithm::Leaf; order.len()],
                    Some(parts) => {
                        if parts.len() != order.len() {
                            return Err(syntax_error(
                                *pos,
                                "number of sub-orders differs from the permutation length",
                            ));
                        }
                        parts.iter().map(Self::from_sexpr).collect::<Result<_>>()?
                    }
                };
                Ok(DirectionalAlgorithm::Node { order, children })
            }
            other => Err(syntax_error(other.pos(), "expected '*' or '[...]'")),
        }
    }

    /// `[2 1]` abbreviates leaf children; check arity and shape against the tree.
    fn fill_leaves(self, tree: &Tree, idx: usize) -> Result<Self> {
        let node = tree.node(idx);
        match self {
            DirectionalAlgorithm::Leaf if node.is_leaf() => Ok(DirectionalAlgorithm::Leaf),
            DirectionalAlgorithm::Node { order, children }
                if !node.is_leaf() && order.len() == node.children.len() =>
            {
                let children = children
                    .into_iter()
                    .zip(&node.children)
                    .map(|(c, &ci)| c.fill_leaves(tree, ci))
                    .collect::<Result<_>>()?;
                Ok(DirectionalAlgorithm::Node { order, children })
            }
            _ => Err(Error::ShapeMismatch(format!(
                "directional algorithm does not match node {}",
                node.path
            ))),
        }
    }
}

impl fmt::Display for DirectionalAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

pub(crate) fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &j in order {
        if j >= n || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> Tree {
        Tree::parse("(and (or * *) (or * *))").unwrap()
    }

    #[test]
    fn permutations_are_lexicographic() {
        assert_eq!(permutations(1), vec![vec![0]]);
        assert_eq!(
            permutations(3),
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
    }

    #[test]
    fn encoding_round_trip() {
        let t = two_by_two();
        let a = DirectionalAlgorithm::decode("[2 1 | [1 2] [2 1]]", &t).unwrap();
        assert_eq!(a.order(), &[1, 0]);
        assert_eq!(a.child(1).order(), &[1, 0]);
        assert_eq!(a.encode(), "[2 1 | [1 2] [2 1]]");
        assert_eq!(a.priority(&t), vec![3, 2, 0, 1]);

        let and2 = Tree::parse("(and * *)").unwrap();
        let b = DirectionalAlgorithm::decode("[2 1]", &and2).unwrap();
        assert_eq!(b.encode(), "[2 1]");

        let mixed = Tree::parse("(or * (and * *))").unwrap();
        let c = DirectionalAlgorithm::decode("[2 1 | * [2 1]]", &mixed).unwrap();
        assert_eq!(c.encode(), "[2 1 | * [2 1]]");

        let leaf = Tree::leaf();
        assert_eq!(
            DirectionalAlgorithm::decode("*", &leaf).unwrap().encode(),
            "*"
        );
    }

    #[test]
    fn decoding_rejects_mismatches() {
        let t = two_by_two();
        assert!(DirectionalAlgorithm::decode("[2 1]", &t).is_err());
        assert!(DirectionalAlgorithm::decode("[1 1 | [1 2] [2 1]]", &t).is_err());
        assert!(DirectionalAlgorithm::decode("[1 2 3 | [1 2] [2 1] *]", &t).is_err());
        assert!(DirectionalAlgorithm::decode("[1 2 | [1 2 3] [2 1]]", &t).is_err());
    }

    #[test]
    fn cost_follows_short_circuits() {
        let t = two_by_two();
        let a = DirectionalAlgorithm::identity(&t);
        // (1,1,0,0): x1 settles v1, x3 and x4 settle v2 = 0.
        assert_eq!(a.probe_bits(&t, 0b0011), vec![0, 2, 3]);
        assert_eq!(a.cost_bits(&t, 0b0011), 3);
        // all zero: v1 = 0 after x1, x2.
        assert_eq!(a.probe_bits(&t, 0), vec![0, 1]);
    }

    #[test]
    fn lowering_matches_direct_run() {
        let t = Tree::parse("(or (and * * *) (or * (and * *)))").unwrap();
        let a = DirectionalAlgorithm::decode("[2 1 | [3 1 2] [2 1 | * [2 1]]]", &t).unwrap();
        let g = a.lower(&t);
        for w in crate::Assignment::all(t.leaf_count()) {
            assert_eq!(g.probe_bits(w.bits()), a.probe_bits(&t, w.bits()));
        }
        assert!(g.is_depth_first(&t));
        assert!(g.is_directional(&t));
    }
}
