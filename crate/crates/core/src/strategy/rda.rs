//! Randomized directional algorithms with independent choices at every node.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::sexpr::{self, syntax_error, SExpr};
use crate::strategy::directional::{is_permutation, permutations, DirectionalAlgorithm};
use crate::strategy::randomized::{Class, DirectionalMix};
use crate::tree::Tree;

/// Bound on the support size produced by [`Rda::expand`].
pub const DEFAULT_EXPANSION_BOUND: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rda {
    Leaf,
    /// `perms` is sorted by permutation with no zero weights.
    Node {
        perms: Vec<(Vec<usize>, Rational)>,
        children: Vec<Rda>,
    },
}

impl Rda {
    pub fn node(
        perms: impl IntoIterator<Item = (Vec<usize>, Rational)>,
        children: Vec<Rda>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (sigma, p) in perms {
            if !is_permutation(&sigma, children.len()) {
                return Err(Error::InvalidAlgorithm(format!(
                    "{sigma:?} is not a permutation of {} children",
                    children.len()
                )));
            }
            *map.entry(sigma).or_insert_with(Rational::zero) += p;
        }
        rational::check_probabilities(map.values())?;
        map.retain(|_, p| !p.is_zero());
        Ok(Rda::Node {
            perms: map.into_iter().collect(),
            children,
        })
    }

    /// Uniform permutation at every node.
    pub fn uniform(tree: &Tree) -> Self {
        Self::uniform_at(tree, 0)
    }

    fn uniform_at(tree: &Tree, idx: usize) -> Self {
        let node = tree.node(idx);
        if node.is_leaf() {
            return Rda::Leaf;
        }
        let perms = permutations(node.children.len());
        let p = rational::ratio(1, perms.len() as i64);
        Rda::Node {
            perms: perms.into_iter().map(|s| (s, p.clone())).collect(),
            children: node
                .children
                .iter()
                .map(|&c| Self::uniform_at(tree, c))
                .collect(),
        }
    }

    /// The RDA that always plays `alg`.
    pub fn point(alg: &DirectionalAlgorithm) -> Self {
        match alg {
            DirectionalAlgorithm::Leaf => Rda::Leaf,
            DirectionalAlgorithm::Node { order, children } => Rda::Node {
                perms: vec![(order.clone(), Rational::one())],
                children: children.iter().map(Rda::point).collect(),
            },
        }
    }

    pub fn children(&self) -> &[Rda] {
        match self {
            Rda::Leaf => &[],
            Rda::Node { children, .. } => children,
        }
    }

    pub fn perms(&self) -> &[(Vec<usize>, Rational)] {
        match self {
            Rda::Leaf => &[],
            Rda::Node { perms, .. } => perms,
        }
    }

    pub fn validate(&self, tree: &Tree) -> Result<()> {
        self.validate_at(tree, 0)
    }

    fn validate_at(&self, tree: &Tree, idx: usize) -> Result<()> {
        let node = tree.node(idx);
        let mismatch = || Error::ShapeMismatch(format!("RDA does not match node {}", node.path));
        match self {
            Rda::Leaf if node.is_leaf() => Ok(()),
            Rda::Node { perms, children } if children.len() == node.children.len() => {
                for (sigma, _) in perms {
                    if !is_permutation(sigma, children.len()) {
                        return Err(mismatch());
                    }
                }
                rational::check_probabilities(perms.iter().map(|(_, p)| p))?;
                for (c, &ci) in children.iter().zip(&node.children) {
                    c.validate_at(tree, ci)?;
                }
                Ok(())
            }
            _ => Err(mismatch()),
        }
    }

    /// Size of the expanded support, saturating.
    pub fn support_bound(&self) -> u128 {
        match self {
            Rda::Leaf => 1,
            Rda::Node { perms, children } => children.iter().fold(perms.len() as u128, |acc, c| {
                acc.saturating_mul(c.support_bound())
            }),
        }
    }

    /// The induced distribution over directional algorithms.
    pub fn expand(&self, bound: u128) -> Result<DirectionalMix> {
        let size = self.support_bound();
        if size > bound {
            return Err(Error::BoundExceeded {
                what: "RDA expansion support",
                actual: size,
                bound,
            });
        }
        DirectionalMix::from_weights(Class::Directional, self.expand_map())
    }

    fn expand_map(&self) -> Vec<(DirectionalAlgorithm, Rational)> {
        match self {
            Rda::Leaf => vec![(DirectionalAlgorithm::Leaf, Rational::one())],
            Rda::Node { perms, children } => {
                let parts: Vec<_> = children.iter().map(Rda::expand_map).collect();
                let mut combos: Vec<(Vec<DirectionalAlgorithm>, Rational)> =
                    vec![(Vec::new(), Rational::one())];
                for part in &parts {
                    let mut next = Vec::with_capacity(combos.len() * part.len());
                    for (prefix, p) in &combos {
                        for (a, q) in part {
                            let mut v = prefix.clone();
                            v.push(a.clone());
                            next.push((v, p * q));
                        }
                    }
                    combos = next;
                }
                let mut out = Vec::new();
                for (sigma, p) in perms {
                    for (children, q) in &combos {
                        out.push((
                            DirectionalAlgorithm::Node {
                                order: sigma.clone(),
                                children: children.clone(),
                            },
                            p * q,
                        ));
                    }
                }
                out
            }
        }
    }

    /// Expected cost on one assignment, computed without expansion.
    pub fn cost_bits(&self, tree: &Tree, bits: u64) -> Rational {
        self.cost_at(tree, 0, bits)
    }

    fn cost_at(&self, tree: &Tree, idx: usize, bits: u64) -> Rational {
        let node = tree.node(idx);
        match (self, node.gate) {
            (Rda::Leaf, _) => Rational::one(),
            (Rda::Node { perms, children }, Some(g)) => {
                let c = g.controlling();
                let costs: Vec<Rational> = children
                    .iter()
                    .zip(&node.children)
                    .map(|(r, &ci)| r.cost_at(tree, ci, bits))
                    .collect();
                let values: Vec<bool> = node
                    .children
                    .iter()
                    .map(|&ci| tree.eval_node(ci, bits))
                    .collect();
                let mut total = Rational::zero();
                for (sigma, p) in perms {
                    let mut sum = Rational::zero();
                    for &j in sigma {
                        sum += &costs[j];
                        if values[j] == c {
                            break;
                        }
                    }
                    total += p * sum;
                }
                total
            }
            _ => unreachable!("RDA validated against tree"),
        }
    }

    pub fn encode(&self) -> String {
        match self {
            Rda::Leaf => "*".to_string(),
            Rda::Node { perms, children } => {
                let entries: Vec<String> = perms
                    .iter()
                    .map(|(sigma, p)| {
                        let s: Vec<String> = sigma.iter().map(|j| (j + 1).to_string()).collect();
                        format!("(({}) {})", s.join(" "), rational::fmt(p))
                    })
                    .collect();
                let kids: Vec<String> = children.iter().map(Rda::encode).collect();
                format!("(perm-dist ({}) {})", entries.join(" "), kids.join(" "))
            }
        }
    }

    pub fn decode(text: &str, tree: &Tree) -> Result<Self> {
        let rda = Self::from_sexpr(&sexpr::parse_one(text)?)?;
        rda.validate(tree)?;
        Ok(rda)
    }

    fn from_sexpr(e: &SExpr) -> Result<Self> {
        if e.as_atom() == Some("*") {
            return Ok(Rda::Leaf);
        }
        let bad = |e: &SExpr, m: &str| syntax_error(e.pos(), m.to_string());
        let (head, rest) = e
            .as_form()
            .filter(|(h, r)| *h == "perm-dist" && r.len() >= 3)
            .ok_or_else(|| bad(e, "expected '*' or (perm-dist ((sigma p/q) ...) child ...)"))?;
        debug_assert_eq!(head, "perm-dist");
        let entries = rest[0]
            .as_list()
            .ok_or_else(|| bad(&rest[0], "expected a list of entries"))?;
        let mut perms = Vec::new();
        for entry in entries {
            let Some([sigma, p]) = entry.as_list() else {
                return Err(bad(entry, "expected ((permutation) p/q)"));
            };
            let sigma = sigma
                .as_list()
                .ok_or_else(|| bad(sigma, "expected a permutation list"))?
                .iter()
                .map(|x| {
                    x.as_atom()
                        .and_then(|a| a.parse::<usize>().ok())
                        .filter(|&r| r >= 1)
                        .map(|r| r - 1)
                        .ok_or_else(|| bad(x, "expected a 1-based child index"))
                })
                .collect::<Result<Vec<_>>>()?;
            let p = rational::parse(p.as_atom().ok_or_else(|| bad(p, "expected p/q"))?)?;
            perms.push((sigma, p));
        }
        let children = rest[1..]
            .iter()
            .map(Self::from_sexpr)
            .collect::<Result<Vec<_>>>()?;
        Rda::node(perms, children)
    }
}

impl fmt::Display for Rda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Root-order marginal of a directional mixture.
pub fn order_marginal(mix: &DirectionalMix) -> BTreeMap<Vec<usize>, Rational> {
    let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for (a, p) in mix.iter() {
        *out.entry(a.order().to_vec()).or_insert_with(Rational::zero) += p;
    }
    out
}

/// Marginal of the part acting on root child `j`.
pub fn child_marginal(mix: &DirectionalMix, j: usize) -> BTreeMap<DirectionalAlgorithm, Rational> {
    let mut out: BTreeMap<DirectionalAlgorithm, Rational> = BTreeMap::new();
    for (a, p) in mix.iter() {
        *out.entry(a.child(j).clone()).or_insert_with(Rational::zero) += p;
    }
    out
}

/// Returns an RDA whose expansion equals `mix`, if one exists.
pub fn is_rda_expressible(tree: &Tree, mix: &DirectionalMix) -> Option<Rda> {
    if mix.support().any(|a| a.validate(tree).is_err()) {
        return None;
    }
    factor(tree, mix)
}

fn factor(tree: &Tree, mix: &DirectionalMix) -> Option<Rda> {
    if tree.is_leaf() {
        return Some(Rda::Leaf);
    }
    let n = tree.arity();
    let pi = order_marginal(mix);
    let marginals: Vec<_> = (0..n).map(|j| child_marginal(mix, j)).collect();
    for (a, p) in mix.iter() {
        let product = marginals
            .iter()
            .enumerate()
            .fold(pi[a.order()].clone(), |acc, (j, m)| acc * &m[a.child(j)]);
        if product != *p {
            return None;
        }
    }
    // Every support member matches its product weight and the products over
    // all combinations sum to one, so nothing lies outside the support.
    let children = tree.children_trees();
    let mut parts = Vec::with_capacity(n);
    for (j, m) in marginals.into_iter().enumerate() {
        let sub = DirectionalMix::from_weights(Class::Directional, m).ok()?;
        parts.push(factor(&children[j], &sub)?);
    }
    Rda::node(pi, parts).ok()
}
