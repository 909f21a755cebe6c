//! The weak-balance condition on sibling subtrees.

use std::collections::HashMap;

use serde::Serialize;

use crate::assignment::Filter;
use crate::error::Result;
use crate::game::double_oracle::double_oracle;
use crate::rational::{self, Rational};
use crate::strategy::randomized::Class;
use crate::tree::{NodePath, Tree};

/// One sibling inequality at an internal node. With `c` the gate's
/// controlling value it reads `R_c(j) <= R_c(k) + R_{1-c}(j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub node: String,
    pub gate: String,
    pub j: usize,
    pub k: usize,
    #[serde(with = "rational::serde_rational")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_rational")]
    pub rhs: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakBalanceVerdict {
    pub checks: Vec<PairCheck>,
    pub balanced: bool,
}

/// General-class values of a tree restricted to each root value.
pub fn root_value_complexities(tree: &Tree) -> Result<[Rational; 2]> {
    if tree.is_leaf() {
        return Ok([rational::one(), rational::one()]);
    }
    Ok([
        double_oracle(tree, Class::General, Filter::Zero)?
            .value()
            .clone(),
        double_oracle(tree, Class::General, Filter::One)?
            .value()
            .clone(),
    ])
}

pub fn is_weakly_balanced(tree: &Tree) -> Result<WeakBalanceVerdict> {
    let mut cache: HashMap<String, [Rational; 2]> = HashMap::new();
    let mut checks = Vec::new();
    visit(tree, 0, &mut Vec::new(), &mut cache, &mut checks)?;
    let balanced = checks.iter().all(|c| c.holds);
    Ok(WeakBalanceVerdict { checks, balanced })
}

fn visit(
    tree: &Tree,
    idx: usize,
    path: &mut Vec<usize>,
    cache: &mut HashMap<String, [Rational; 2]>,
    checks: &mut Vec<PairCheck>,
) -> Result<()> {
    let node = tree.node(idx);
    let Some(gate) = node.gate else {
        return Ok(());
    };
    let mut values = Vec::with_capacity(node.children.len());
    for &c in &node.children {
        let sub = tree.subtree_at(c).0;
        let key = sub.canonical_key();
        if !cache.contains_key(&key) {
            let r = root_value_complexities(&sub)?;
            cache.insert(key.clone(), r);
        }
        values.push(cache[&key].clone());
    }
    let c = usize::from(gate.controlling());
    for (j, rj) in values.iter().enumerate() {
        for (k, rk) in values.iter().enumerate() {
            let lhs = rj[c].clone();
            let rhs = &rk[c] + &rj[1 - c];
            checks.push(PairCheck {
                node: NodePath(path.clone()).to_string(),
                gate: gate.name().to_string(),
                j: j + 1,
                k: k + 1,
                holds: lhs <= rhs,
                lhs,
                rhs,
            });
        }
    }
    for (j, &c) in node.children.iter().enumerate() {
        path.push(j + 1);
        visit(tree, c, path, cache, checks)?;
        path.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn single_leaf_is_vacuous() {
        let v = is_weakly_balanced(&Tree::leaf()).unwrap();
        assert!(v.balanced);
        assert!(v.checks.is_empty());
    }

    #[test]
    fn complete_binary_height_two() {
        let v = is_weakly_balanced(&Tree::parse("(and (or * *) (or * *))").unwrap()).unwrap();
        assert!(v.balanced);
        // 4 pairs at the root and 4 at each child.
        assert_eq!(v.checks.len(), 12);
    }

    #[test]
    fn skewed_tree_follows_computed_values() {
        let t = Tree::parse("(and * (or * (and * *)))").unwrap();
        let v = is_weakly_balanced(&t).unwrap();
        let inner = Tree::parse("(or * (and * *))").unwrap();
        let r = root_value_complexities(&inner).unwrap();
        // Both children must be shown to be 0: the leaf costs 1 and the AND 3/2.
        assert_eq!(r[0], ratio(5, 2));
        let root: Vec<_> = v.checks.iter().filter(|c| c.node == "root").collect();
        assert_eq!(root.len(), 4);
        let tight = root.iter().find(|c| c.j == 2 && c.k == 1).unwrap();
        assert_eq!(tight.lhs, ratio(5, 2));
        assert_eq!(tight.rhs, ratio(1, 1) + &r[1]);
        assert_eq!(tight.holds, ratio(3, 2) <= r[1]);
    }
}
