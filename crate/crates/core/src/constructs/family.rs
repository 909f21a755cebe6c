//! Recursively built hard distributions for directional algorithms and the
//! conditional identities they satisfy.

use num_traits::{One, Zero};

use crate::assignment::{Assignment, AssignmentDistribution, Filter};
use crate::constructs::sdelta::{
    extract_delta, make_sdelta, DepthOneDistribution, SubtreeDistributionFamily,
};
use crate::error::{Error, Result};
use crate::game::best_response::best_response_directional;
use crate::game::double_oracle::double_oracle;
use crate::rational::{self, Rational};
use crate::rda_engine::replacement::event_holds;
use crate::strategy::directional::{permutations, DirectionalAlgorithm};
use crate::strategy::randomized::{Class, PureAlgorithm};
use crate::tree::Tree;
use crate::verdict::Verdict;

/// Hard distributions for each root value and a directional algorithm that
/// is a best response to both, with the same data for every subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalFamily {
    pub s0: AssignmentDistribution,
    pub s1: AssignmentDistribution,
    pub alpha: DirectionalAlgorithm,
    /// Child-value laws of `s0` and `s1`; absent for a leaf.
    pub deltas: Option<[DepthOneDistribution; 2]>,
    pub children: Vec<OptimalFamily>,
}

impl OptimalFamily {
    pub fn get(&self, value: bool) -> &AssignmentDistribution {
        if value {
            &self.s1
        } else {
            &self.s0
        }
    }

    /// The children's hard distributions as a family for this node.
    pub fn family(&self, tree: &Tree) -> Result<SubtreeDistributionFamily> {
        SubtreeDistributionFamily::new(
            tree,
            self.children
                .iter()
                .map(|c| [c.s0.clone(), c.s1.clone()])
                .collect(),
        )
    }
}

pub fn build_optimal_family(tree: &Tree) -> Result<OptimalFamily> {
    let Some(gate) = tree.gate() else {
        return Ok(OptimalFamily {
            s0: AssignmentDistribution::point(Assignment::new(1, 0)),
            s1: AssignmentDistribution::point(Assignment::new(1, 1)),
            alpha: DirectionalAlgorithm::Leaf,
            deltas: None,
            children: Vec::new(),
        });
    };
    let subtrees = tree.children_trees();
    let children = subtrees
        .iter()
        .map(build_optimal_family)
        .collect::<Result<Vec<_>>>()?;
    let family = SubtreeDistributionFamily::new(
        tree,
        children
            .iter()
            .map(|c| [c.s0.clone(), c.s1.clone()])
            .collect(),
    )?;
    let n = children.len();
    // The value reached only when every child has it is a plain product; the
    // other comes from an equilibrium distribution of the whole tree.
    let pass = !gate.controlling();
    let product = DepthOneDistribution::point(&vec![pass; n]);
    let hard = double_oracle(tree, Class::Directional, Filter::root(!pass))?;
    let mixed = extract_delta(tree, hard.col_mix())?;
    let s_pass = make_sdelta(tree, &product, &family)?.realized;
    let s_stop = make_sdelta(tree, &mixed, &family)?.realized;
    let parts: Vec<DirectionalAlgorithm> = children.iter().map(|c| c.alpha.clone()).collect();
    let mut best: Option<(Rational, DirectionalAlgorithm)> = None;
    for sigma in permutations(n) {
        let a = DirectionalAlgorithm::compose(sigma, parts.clone());
        let c = s_stop.expectation(|w| rational::int(i64::from(a.cost_bits(tree, w.bits()))));
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, a));
        }
    }
    let alpha = best.expect("at least one order").1;
    let (s0, s1, deltas) = if pass {
        (s_stop, s_pass, [mixed, product])
    } else {
        (s_pass, s_stop, [product, mixed])
    };
    Ok(OptimalFamily {
        s0,
        s1,
        alpha,
        deltas: Some(deltas),
        children,
    })
}

/// Checks at every node that both distributions are equilibrium
/// distributions for directional algorithms, have the product-mixture
/// shape over the children's family, and share the best response `alpha`.
pub fn verify_optimal_family(tree: &Tree, fam: &OptimalFamily) -> Result<Verdict> {
    let mut v = Verdict::new("hard distribution family");
    verify_at(tree, fam, "root", &mut v)?;
    Ok(v)
}

fn verify_at(tree: &Tree, fam: &OptimalFamily, at: &str, v: &mut Verdict) -> Result<()> {
    for value in [false, true] {
        let s = fam.get(value);
        v.require(s.check_filter(tree, Filter::root(value)).is_ok(), || {
            format!(
                "{at}: distribution for root value {} has the wrong support",
                u8::from(value)
            )
        });
        let equilibrium = double_oracle(tree, Class::Directional, Filter::root(value))?;
        let (_, best) = best_response_directional(tree, s)?;
        v.require(&best == equilibrium.value(), || {
            format!(
                "{at}: best directional cost {} against root value {} but the equilibrium value is {}",
                rational::fmt(&best),
                u8::from(value),
                rational::fmt(equilibrium.value())
            )
        });
        let own = fam.alpha.cost_vs(tree, s);
        v.require(own == best, || {
            format!(
                "{at}: the shared response costs {} against root value {} instead of {}",
                rational::fmt(&own),
                u8::from(value),
                rational::fmt(&best)
            )
        });
    }
    if let Some(deltas) = &fam.deltas {
        let family = fam.family(tree)?;
        for (value, delta) in [false, true].into_iter().zip(deltas) {
            v.require(delta.forces_root(tree, value), || {
                format!(
                    "{at}: child-value law for root value {} does not force it",
                    u8::from(value)
                )
            });
            let rebuilt = make_sdelta(tree, delta, &family)?.realized;
            v.require(&rebuilt == fam.get(value), || {
                format!(
                    "{at}: distribution for root value {} is not a product mixture",
                    u8::from(value)
                )
            });
        }
        for (j, (sub, child)) in tree.children_trees().iter().zip(&fam.children).enumerate() {
            let path = if at == "root" {
                format!("{}", j + 1)
            } else {
                format!("{at}.{}", j + 1)
            };
            verify_at(sub, child, &path, v)?;
        }
    }
    Ok(())
}

/// Per-child quantities seen by a directional algorithm with root order
/// `sigma`: the probability of evaluating child `j`, the probability its
/// value is 0 given that, and the conditional child distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildConditionals {
    pub evaluated: Rational,
    pub zero_given_evaluated: Option<Rational>,
    pub given_evaluated: Option<AssignmentDistribution>,
    pub given_value: [Option<AssignmentDistribution>; 2],
}

pub fn child_conditionals(
    tree: &Tree,
    sigma: &[usize],
    dist: &AssignmentDistribution,
    j: usize,
) -> Result<ChildConditionals> {
    let gate = tree
        .gate()
        .ok_or_else(|| Error::ShapeMismatch("a single leaf has no root children".into()))?;
    let n = tree.root_children().len();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    let range = tree.child_ranges()[j].clone();
    let reached = |w: &Assignment| event_holds(gate, sigma, &tree.ttype_bits(w.bits()).0, j);
    let child_value = |w: &Assignment| tree.ttype_bits(w.bits()).0[j];
    let evaluated = dist.probability_of(reached);
    let given = dist.conditional(reached);
    let zero = given
        .as_ref()
        .map(|g| g.probability_of(|w| !child_value(w)));
    let given_value = [false, true].map(|value| {
        dist.conditional(|w| reached(w) && child_value(w) == value)
            .map(|d| d.marginal(&range))
    });
    Ok(ChildConditionals {
        evaluated,
        zero_given_evaluated: zero,
        given_evaluated: given.map(|d| d.marginal(&range)),
        given_value,
    })
}

/// `q·first + (1−q)·second`, dropping a side whose weight is zero.
fn weighted(
    q: &Rational,
    first: Option<&AssignmentDistribution>,
    second: Option<&AssignmentDistribution>,
) -> Option<AssignmentDistribution> {
    if q.is_zero() {
        second.cloned()
    } else if q.is_one() {
        first.cloned()
    } else {
        first?.mix(q, second?).ok()
    }
}

/// For a directional order `sigma`, the per-child conditionals of `dist`
/// split by child value, and the product mixture of `dist`'s child-value law
/// has the same evaluation and zero probabilities with the family's members
/// as its value-conditioned parts.
pub fn check_conditional_split(
    tree: &Tree,
    sigma: &[usize],
    dist: &AssignmentDistribution,
    family: &SubtreeDistributionFamily,
) -> Result<Verdict> {
    let mixture = make_sdelta(tree, &extract_delta(tree, dist)?, family)?.realized;
    let mut v = Verdict::new(format!("conditional split for order {sigma:?}"));
    for j in 0..tree.root_children().len() {
        let a = child_conditionals(tree, sigma, dist, j)?;
        let b = child_conditionals(tree, sigma, &mixture, j)?;
        v.require(a.evaluated == b.evaluated, || {
            format!(
                "child {}: evaluated with probability {} but {} under the mixture",
                j + 1,
                rational::fmt(&a.evaluated),
                rational::fmt(&b.evaluated)
            )
        });
        v.require(a.zero_given_evaluated == b.zero_given_evaluated, || {
            format!("child {}: zero probabilities differ", j + 1)
        });
        let Some(q) = a.zero_given_evaluated.clone() else {
            continue;
        };
        let split = weighted(&q, a.given_value[0].as_ref(), a.given_value[1].as_ref());
        v.require(split.as_ref() == a.given_evaluated.as_ref(), || {
            format!(
                "child {}: conditional distribution is not the value split",
                j + 1
            )
        });
        let expected = weighted(&q, Some(family.get(j, false)), Some(family.get(j, true)));
        v.require(expected.as_ref() == b.given_evaluated.as_ref(), || {
            format!(
                "child {}: mixture conditional is not the family split",
                j + 1
            )
        });
    }
    Ok(v)
}

/// For child `j` under order `sigma`, rebuilds the child's conditional
/// distribution from its own child-value law over `child_family` and checks
/// it splits into the pure-product member and the rebuilt value-conditioned
/// part.
pub fn check_sprime_decomposition(
    tree: &Tree,
    sigma: &[usize],
    dist: &AssignmentDistribution,
    j: usize,
    child_family: &OptimalFamily,
) -> Result<Verdict> {
    let subtrees = tree.children_trees();
    let sub = subtrees.get(j).ok_or(Error::IndexOutOfRange {
        index: j,
        len: subtrees.len(),
    })?;
    let mut v = Verdict::new(format!("child {} decomposition for order {sigma:?}", j + 1));
    let Some(sub_gate) = sub.gate() else {
        return Ok(v);
    };
    let cond = child_conditionals(tree, sigma, dist, j)?;
    let (Some(s_j), Some(q)) = (cond.given_evaluated, cond.zero_given_evaluated) else {
        return Ok(v);
    };
    let fam = child_family.family(sub)?;
    let rebuilt = make_sdelta(sub, &extract_delta(sub, &s_j)?, &fam)?.realized;
    // `pass` is the child value reached only when all its children have it.
    let pass = !sub_gate.controlling();
    let p_pass = if pass { Rational::one() - &q } else { q };
    let product = child_family.get(pass);
    let other = cond.given_value[usize::from(!pass)]
        .as_ref()
        .map(|u| -> Result<AssignmentDistribution> {
            Ok(make_sdelta(sub, &extract_delta(sub, u)?, &fam)?.realized)
        })
        .transpose()?;
    let expected = weighted(&p_pass, Some(product), other.as_ref());
    v.require(expected.as_ref() == Some(&rebuilt), || {
        format!(
            "rebuilt child distribution {} is not the split with weight {}",
            rebuilt.encode(),
            rational::fmt(&p_pass)
        )
    });
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn two_by_two() -> Tree {
        Tree::parse("(and (or * *) (or * *))").unwrap()
    }

    #[test]
    fn and_of_two_family() {
        let t = Tree::parse("(and * *)").unwrap();
        let fam = build_optimal_family(&t).unwrap();
        assert!(fam.s0.check_filter(&t, Filter::Zero).is_ok());
        assert_eq!(
            best_response_directional(&t, &fam.s0).unwrap().1,
            ratio(3, 2)
        );
        assert_eq!(fam.s1.support_len(), 1);
        let v = verify_optimal_family(&t, &fam).unwrap();
        assert!(v.passed, "{v}");
    }

    #[test]
    fn two_by_two_family_is_consistent() {
        let t = two_by_two();
        let fam = build_optimal_family(&t).unwrap();
        let v = verify_optimal_family(&t, &fam).unwrap();
        assert!(v.passed, "{v}");
    }

    #[test]
    fn mixed_tree_family_is_consistent() {
        let t = Tree::parse("(or (and * * *) (and * (or * *)))").unwrap();
        let fam = build_optimal_family(&t).unwrap();
        let v = verify_optimal_family(&t, &fam).unwrap();
        assert!(v.passed, "{v}");
    }

    #[test]
    fn conditional_split_examples() {
        let t = Tree::parse("(and * *)").unwrap();
        let fam = SubtreeDistributionFamily::uniform(&t).unwrap();
        let point = AssignmentDistribution::point("10".parse().unwrap());
        assert!(
            check_conditional_split(&t, &[0, 1], &point, &fam)
                .unwrap()
                .passed
        );

        let t = two_by_two();
        let zeros = t.enumerate_assignments(Filter::Zero).unwrap();
        let s = AssignmentDistribution::uniform(4, &zeros).unwrap();
        let fam = build_optimal_family(&t).unwrap().family(&t).unwrap();
        for sigma in [[0, 1], [1, 0]] {
            let v = check_conditional_split(&t, &sigma, &s, &fam).unwrap();
            assert!(v.passed, "{v}");
        }
        let c = child_conditionals(&t, &[0, 1], &s, 1).unwrap();
        assert_eq!(c.evaluated, ratio(3, 7));
        assert_eq!(c.zero_given_evaluated, Some(ratio(1, 1)));
    }

    #[test]
    fn sprime_decomposition_examples() {
        let t = two_by_two();
        let fam = build_optimal_family(&t).unwrap();
        let all = t.enumerate_assignments(Filter::All).unwrap();
        let s = AssignmentDistribution::uniform(4, &all).unwrap();
        for j in 0..2 {
            let v = check_sprime_decomposition(&t, &[0, 1], &s, j, &fam.children[j]).unwrap();
            assert!(v.passed, "{v}");
        }
        let zeros = t.enumerate_assignments(Filter::Zero).unwrap();
        let s0 = AssignmentDistribution::uniform(4, &zeros).unwrap();
        let v = check_sprime_decomposition(&t, &[1, 0], &s0, 0, &fam.children[0]).unwrap();
        assert!(v.passed, "{v}");
    }
}
