//! A randomized directional algorithm that copies how a depth-first
//! algorithm moves between root subtrees on average and plays fixed
//! randomized parts inside each subtree.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::constructs::sdelta::ProductMixture;
use crate::error::{Error, Result};
use crate::game::best_response::{best_response_depth_first, best_response_directional};
use crate::rational::{self, Rational};
use crate::rda_engine::replacement::event_holds;
use crate::strategy::decision::GeneralAlgorithm;
use crate::strategy::directional::DirectionalAlgorithm;
use crate::strategy::enumerate::cartesian;
use crate::strategy::randomized::{Class, DirectionalMix};
use crate::tree::Tree;
use crate::verdict::Verdict;

/// Root orders drawn from a chain, with independent parts below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chimera {
    pub orders: BTreeMap<Vec<usize>, Rational>,
    pub parts: Vec<DirectionalMix>,
}

/// Root children in the order a pure algorithm first probes them on `bits`.
pub fn visit_sequence(tree: &Tree, alpha: &GeneralAlgorithm, bits: u64) -> Vec<usize> {
    let ranges = tree.child_ranges();
    let mut seq: Vec<usize> = Vec::new();
    for leaf in alpha.probe_bits(bits) {
        let j = ranges
            .iter()
            .position(|r| r.contains(&leaf))
            .expect("leaf under some child");
        if !seq.contains(&j) {
            seq.push(j);
        }
    }
    seq
}

fn sequences(
    tree: &Tree,
    alpha: &GeneralAlgorithm,
    mixture: &ProductMixture,
) -> Vec<(Vec<usize>, Rational)> {
    mixture
        .realized
        .iter()
        .map(|(w, p)| (visit_sequence(tree, alpha, w.bits()), p.clone()))
        .collect()
}

fn prefix_mass(seqs: &[(Vec<usize>, Rational)], prefix: &[usize]) -> Rational {
    seqs.iter()
        .filter(|(s, _)| s.starts_with(prefix))
        .fold(Rational::zero(), |acc, (_, p)| acc + p)
}

/// Builds the chimera of a depth-first `alpha` against `mixture` with part
/// `parts[j]` on child `j`. After a visited prefix the next child is drawn
/// with the probability that `alpha` visits it next given that it goes on;
/// prefixes `alpha` never continues from get a uniform choice.
pub fn build_chimera(
    tree: &Tree,
    alpha: &GeneralAlgorithm,
    mixture: &ProductMixture,
    parts: &[DirectionalMix],
) -> Result<Chimera> {
    alpha.validate(tree)?;
    if !alpha.is_depth_first(tree) {
        return Err(Error::InvalidAlgorithm(
            "the chimera needs a depth-first algorithm".into(),
        ));
    }
    let subtrees = tree.children_trees();
    if parts.len() != subtrees.len() {
        return Err(Error::LengthMismatch {
            expected: subtrees.len(),
            got: parts.len(),
        });
    }
    for (part, sub) in parts.iter().zip(&subtrees) {
        if part.class() != Class::Directional {
            return Err(Error::InvalidAlgorithm(
                "chimera parts must be directional".into(),
            ));
        }
        for a in part.support() {
            a.validate(sub)?;
        }
    }
    let seqs = sequences(tree, alpha, mixture);
    let n = subtrees.len();
    let mut orders = BTreeMap::new();
    extend(&seqs, n, &mut Vec::new(), rational::one(), &mut orders);
    Ok(Chimera {
        orders,
        parts: parts.to_vec(),
    })
}

fn extend(
    seqs: &[(Vec<usize>, Rational)],
    n: usize,
    prefix: &mut Vec<usize>,
    weight: Rational,
    out: &mut BTreeMap<Vec<usize>, Rational>,
) {
    if prefix.len() == n {
        out.insert(prefix.clone(), weight);
        return;
    }
    let next: Vec<usize> = (0..n).filter(|c| !prefix.contains(c)).collect();
    let masses: Vec<Rational> = next
        .iter()
        .map(|&c| {
            prefix.push(c);
            let m = prefix_mass(seqs, prefix);
            prefix.pop();
            m
        })
        .collect();
    let total: Rational = masses.iter().sum();
    for (&c, m) in next.iter().zip(&masses) {
        let p = if total.is_zero() {
            rational::ratio(1, next.len() as i64)
        } else {
            m / &total
        };
        if p.is_zero() {
            continue;
        }
        prefix.push(c);
        extend(seqs, n, prefix, &weight * p, out);
        prefix.pop();
    }
}

impl Chimera {
    /// The induced distribution over directional algorithms.
    pub fn expand(&self, bound: u128) -> Result<DirectionalMix> {
        let size = self.parts.iter().fold(self.orders.len() as u128, |acc, p| {
            acc.saturating_mul(p.support_len() as u128)
        });
        if size > bound {
            return Err(Error::BoundExceeded {
                what: "chimera expansion support",
                actual: size,
                bound,
            });
        }
        let lists: Vec<Vec<(DirectionalAlgorithm, Rational)>> = self
            .parts
            .iter()
            .map(|p| p.iter().map(|(a, q)| (a.clone(), q.clone())).collect())
            .collect();
        let combos = cartesian(&lists);
        let mut weights = Vec::new();
        for (sigma, p) in &self.orders {
            for combo in &combos {
                let w = combo.iter().fold(p.clone(), |acc, (_, q)| acc * q);
                let children = combo.iter().map(|(a, _)| a.clone()).collect();
                weights.push((DirectionalAlgorithm::compose(sigma.clone(), children), w));
            }
        }
        DirectionalMix::from_weights(Class::Directional, weights)
    }

    pub fn cost_bits(&self, tree: &Tree, bits: u64) -> Rational {
        let gate = tree.gate().expect("chimera on an internal root");
        let t = tree.ttype_bits(bits).0;
        let ranges = tree.child_ranges();
        let subtrees = tree.children_trees();
        let part_costs: Vec<Rational> = self
            .parts
            .iter()
            .zip(ranges.iter().zip(&subtrees))
            .map(|(part, (r, sub))| {
                part.cost_bits(sub, (bits >> r.start) & ((1u64 << r.len()) - 1))
            })
            .collect();
        self.orders
            .iter()
            .fold(Rational::zero(), |acc, (sigma, p)| {
                let c: Rational = (0..t.len())
                    .filter(|&j| event_holds(gate, sigma, &t, j))
                    .map(|j| part_costs[j].clone())
                    .sum();
                acc + p * c
            })
    }

    pub fn cost_vs(&self, tree: &Tree, mixture: &ProductMixture) -> Rational {
        mixture
            .realized
            .expectation(|w| self.cost_bits(tree, w.bits()))
    }

    /// Probability that child `j` is evaluated and has value `value`.
    pub fn joint_probability(
        &self,
        tree: &Tree,
        mixture: &ProductMixture,
        j: usize,
        value: Option<bool>,
    ) -> Rational {
        let gate = tree.gate().expect("chimera on an internal root");
        mixture.realized.expectation(|w| {
            let t = tree.ttype_bits(w.bits()).0;
            if value.is_some_and(|v| t[j] != v) {
                return Rational::zero();
            }
            self.orders
                .iter()
                .filter(|(sigma, _)| event_holds(gate, sigma, &t, j))
                .map(|(_, p)| p.clone())
                .sum()
        })
    }
}

/// Probability that `alpha` enters child `j`, restricted to child value
/// `value` when given.
pub fn alpha_joint_probability(
    tree: &Tree,
    alpha: &GeneralAlgorithm,
    mixture: &ProductMixture,
    j: usize,
    value: Option<bool>,
) -> Rational {
    mixture.realized.probability_of(|w| {
        value.is_none_or(|v| tree.ttype_bits(w.bits()).0[j] == v)
            && visit_sequence(tree, alpha, w.bits()).contains(&j)
    })
}

/// The chimera enters every child with the same probability as `alpha` and
/// sees the same child-value law once there.
pub fn check_chimera_properties(
    tree: &Tree,
    alpha: &GeneralAlgorithm,
    mixture: &ProductMixture,
    chimera: &Chimera,
) -> Result<Verdict> {
    let mut v = Verdict::new("chimera matches evaluation and value probabilities");
    let total: Rational = chimera.orders.values().sum();
    v.require(total == rational::one(), || {
        format!("order probabilities sum to {}", rational::fmt(&total))
    });
    for j in 0..tree.root_children().len() {
        let b = chimera.joint_probability(tree, mixture, j, None);
        let a = alpha_joint_probability(tree, alpha, mixture, j, None);
        v.require(a == b, || {
            format!(
                "child {} evaluated with probability {} by the algorithm and {} by the chimera",
                j + 1,
                rational::fmt(&a),
                rational::fmt(&b)
            )
        });
        if a.is_zero() || b.is_zero() {
            continue;
        }
        for value in [false, true] {
            let ca = alpha_joint_probability(tree, alpha, mixture, j, Some(value)) / &a;
            let cb = chimera.joint_probability(tree, mixture, j, Some(value)) / &b;
            v.require(ca == cb, || {
                format!(
                    "child {} has value {} with conditional probability {} under the algorithm and {} under the chimera",
                    j + 1,
                    u8::from(value),
                    rational::fmt(&ca),
                    rational::fmt(&cb)
                )
            });
        }
    }
    Ok(v)
}

/// Costs entering the chimera inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChimeraCosts {
    pub algorithm: Rational,
    pub bound: Rational,
    pub chimera: Rational,
}

pub fn chimera_costs(
    tree: &Tree,
    alpha: &GeneralAlgorithm,
    mixture: &ProductMixture,
    chimera: &Chimera,
) -> ChimeraCosts {
    let algorithm = mixture
        .realized
        .expectation(|w| rational::int(i64::from(alpha.cost_bits(w.bits()))));
    let subtrees = tree.children_trees();
    let mut bound = Rational::zero();
    for (j, sub) in subtrees.iter().enumerate() {
        for value in [false, true] {
            let p = alpha_joint_probability(tree, alpha, mixture, j, Some(value));
            if !p.is_zero() {
                bound += p * chimera.parts[j].cost_vs(sub, mixture.family.get(j, value));
            }
        }
    }
    ChimeraCosts {
        algorithm,
        bound,
        chimera: chimera.cost_vs(tree, mixture),
    }
}

/// The algorithm costs at least the part-wise bound against the mixture,
/// the bound equals the chimera's cost, and so the chimera is no worse.
/// Also records whether each part is optimal against both family members,
/// which the bound relies on.
pub fn check_chimera_inequality(
    tree: &Tree,
    alpha: &GeneralAlgorithm,
    mixture: &ProductMixture,
    parts: &[DirectionalMix],
) -> Result<Verdict> {
    let chimera = build_chimera(tree, alpha, mixture, parts)?;
    let mut v = Verdict::new("chimera is no more expensive than the algorithm");
    for (j, sub) in tree.children_trees().iter().enumerate() {
        for value in [false, true] {
            let s = mixture.family.get(j, value);
            let own = parts[j].cost_vs(sub, s);
            let dir = best_response_directional(sub, s)?.1;
            let df = best_response_depth_first(sub, s)?.1;
            v.require(own == dir && dir == df, || {
                format!(
                    "part {} costs {} against value {} but the best directional and depth-first costs are {} and {}",
                    j + 1,
                    rational::fmt(&own),
                    u8::from(value),
                    rational::fmt(&dir),
                    rational::fmt(&df)
                )
            });
        }
    }
    let costs = chimera_costs(tree, alpha, mixture, &chimera);
    v.require(costs.bound <= costs.algorithm, || {
        format!(
            "part-wise bound {} exceeds the algorithm's cost {}",
            rational::fmt(&costs.bound),
            rational::fmt(&costs.algorithm)
        )
    });
    v.require(costs.bound == costs.chimera, || {
        format!(
            "part-wise bound {} differs from the chimera's cost {}",
            rational::fmt(&costs.bound),
            rational::fmt(&costs.chimera)
        )
    });
    v.require(costs.chimera <= costs.algorithm, || {
        format!(
            "chimera costs {} above the algorithm's {}",
            rational::fmt(&costs.chimera),
            rational::fmt(&costs.algorithm)
        )
    });
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{AssignmentDistribution, Filter};
    use crate::constructs::family::build_optimal_family;
    use crate::constructs::sdelta::{extract_delta, make_sdelta};
    use crate::rational::ratio;
    use crate::strategy::rda::DEFAULT_EXPANSION_BOUND;

    use crate::strategy::decision::tests::NON_DIRECTIONAL;

    fn two_by_two() -> Tree {
        Tree::parse("(and (or * *) (or * *))").unwrap()
    }

    fn optimal_parts(t: &Tree) -> Vec<DirectionalMix> {
        let fam = build_optimal_family(t).unwrap();
        fam.children
            .iter()
            .map(|c| DirectionalMix::point(Class::Directional, c.alpha.clone()))
            .collect()
    }

    fn uniform_zero_mixture(t: &Tree) -> ProductMixture {
        let zeros = t.enumerate_assignments(Filter::Zero).unwrap();
        let s = AssignmentDistribution::uniform(t.leaf_count(), &zeros).unwrap();
        let fam = build_optimal_family(t).unwrap().family(t).unwrap();
        make_sdelta(t, &extract_delta(t, &s).unwrap(), &fam).unwrap()
    }

    #[test]
    fn directional_algorithm_gives_a_point_chimera() {
        let t = two_by_two();
        let a = DirectionalAlgorithm::decode("[2 1 | [1 2] [2 1]]", &t).unwrap();
        let m = uniform_zero_mixture(&t);
        let parts: Vec<DirectionalMix> = a
            .children()
            .iter()
            .map(|c| DirectionalMix::point(Class::Directional, c.clone()))
            .collect();
        let b = build_chimera(&t, &a.lower(&t), &m, &parts).unwrap();
        assert_eq!(
            b.expand(DEFAULT_EXPANSION_BOUND).unwrap(),
            DirectionalMix::point(Class::Directional, a)
        );
    }

    #[test]
    fn non_directional_algorithm() {
        let t = two_by_two();
        let alpha = GeneralAlgorithm::decode(NON_DIRECTIONAL, &t).unwrap();
        let m = uniform_zero_mixture(&t);
        let parts = optimal_parts(&t);
        let b = build_chimera(&t, &alpha, &m, &parts).unwrap();
        let mix = b.expand(DEFAULT_EXPANSION_BOUND).unwrap();
        assert!(mix.support().all(|a| a.validate(&t).is_ok()));
        let v = check_chimera_properties(&t, &alpha, &m, &b).unwrap();
        assert!(v.passed, "{v}");
        let v = check_chimera_inequality(&t, &alpha, &m, &parts).unwrap();
        assert!(v.passed, "{v}");
        let direct = m.realized.expectation(|w| mix.cost_bits(&t, w.bits()));
        assert_eq!(direct, b.cost_vs(&t, &m));
    }

    #[test]
    fn rejects_non_depth_first() {
        let t = two_by_two();
        let alpha = GeneralAlgorithm::from_policy(&t, |known, vals| {
            let live = t.live_leaves(known, vals);
            [0usize, 2, 1, 3]
                .into_iter()
                .find(|&l| live >> l & 1 == 1)
                .unwrap()
        });
        assert!(!alpha.is_depth_first(&t));
        let m = uniform_zero_mixture(&t);
        assert!(build_chimera(&t, &alpha, &m, &optimal_parts(&t)).is_err());
    }

    #[test]
    fn optimal_directional_gives_equality() {
        let t = two_by_two();
        let m = uniform_zero_mixture(&t);
        let (best, _) = best_response_directional(&t, &m.realized).unwrap();
        let fam = build_optimal_family(&t).unwrap();
        let alpha = DirectionalAlgorithm::compose(
            best.order().to_vec(),
            fam.children.iter().map(|c| c.alpha.clone()).collect(),
        );
        let parts = optimal_parts(&t);
        let b = build_chimera(&t, &alpha.lower(&t), &m, &parts).unwrap();
        let costs = chimera_costs(&t, &alpha.lower(&t), &m, &b);
        assert_eq!(costs.algorithm, costs.chimera);
        assert_eq!(costs.bound, costs.chimera);
        assert!(costs.chimera > ratio(0, 1));
    }
}
