//! Seeded random instances for the replacement calculus, product mixtures,
//! chimera algorithms and the product lower bound.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::assignment::{Assignment, Filter};
use crate::constructs::{
    build_chimera, build_optimal_family, check_chimera_inequality, check_chimera_properties,
    check_conditional_split, check_posterior_invariance, check_product_lower_bound,
    check_sdelta_dominance, check_sprime_decomposition, extract_delta, make_sdelta,
    verify_optimal_family, DepthOneDistribution, OptimalFamily,
};
use crate::error::{Error, Result};
use crate::rda_engine::{
    build_joint_optimal_rda, check_cost_decomposition, check_improvement, check_order_invariance,
    check_sibling_masses,
};
use crate::strategy::directional::permutations;
use crate::strategy::randomized::{Class, RandomizedAlgorithm};
use crate::strategy::rda::Rda;
use crate::suite::corpus::{corpus, CorpusSpec};
use crate::suite::random::{
    random_depth_first, random_depth_first_mix, random_directional_mix, random_distribution,
    random_rda, random_weights, rng,
};
use crate::tree::Tree;
use crate::verdict::Verdict;

pub const REPLACEMENT: &str = "replacement calculus";
pub const MIXTURE: &str = "mixture identities";
pub const CHIMERA: &str = "chimera";
pub const PRODUCT_BOUND: &str = "product lower bound";

/// Outcome of one seeded suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub seed: u64,
    pub instances: usize,
    pub verdict: Verdict,
}

/// Internal corpus trees, the pool the suites draw from.
pub fn instance_pool(max_leaves: usize) -> Vec<Tree> {
    corpus(&CorpusSpec::with_max_leaves(max_leaves))
        .into_iter()
        .filter(|t| !t.is_leaf())
        .collect()
}

fn check_pool(pool: &[Tree]) -> Result<()> {
    if pool.is_empty() || pool.iter().any(|t| t.is_leaf()) {
        return Err(Error::ShapeMismatch(
            "instances need a nonempty pool of trees with internal roots".into(),
        ));
    }
    Ok(())
}

fn pick<'a>(r: &mut impl Rng, pool: &'a [Tree]) -> &'a Tree {
    &pool[r.random_range(0..pool.len())]
}

fn random_assignment(r: &mut impl Rng, tree: &Tree) -> Assignment {
    Assignment::new(tree.leaf_count(), r.random::<u64>() & tree.all_mask())
}

fn random_ttype(r: &mut impl Rng, arity: usize) -> Vec<bool> {
    (0..arity).map(|_| r.random::<bool>()).collect()
}

fn random_delta(r: &mut impl Rng, arity: usize) -> Result<DepthOneDistribution> {
    let mut types: Vec<Vec<bool>> = (0..1u32 << arity)
        .map(|m| (0..arity).map(|j| m >> j & 1 == 1).collect())
        .collect();
    types.shuffle(r);
    types.truncate(r.random_range(1..=types.len()));
    let weights = random_weights(r, types.len());
    DepthOneDistribution::new(arity, types.into_iter().zip(weights))
}

fn record(suite: &mut Verdict, i: usize, tree: &Tree, v: Verdict) {
    let mut v = v;
    v.name = format!("instance {i} {} {}", tree.render(), v.name);
    suite.absorb(v);
}

struct Families(HashMap<String, OptimalFamily>);

impl Families {
    fn get(&mut self, tree: &Tree) -> Result<&OptimalFamily> {
        let key = tree.render();
        if !self.0.contains_key(&key) {
            let fam = build_optimal_family(tree)?;
            self.0.insert(key.clone(), fam);
        }
        Ok(&self.0[&key])
    }
}

/// Replacement of one child's algorithm: the closed form, the per-order cost
/// split, unchanged masses on the other children, and improvement to the optimum.
pub fn replacement_suite(pool: &[Tree], seed: u64, samples: usize) -> Result<SuiteOutcome> {
    check_pool(pool)?;
    let mut r = rng(seed);
    let mut suite = Verdict::new(REPLACEMENT);
    let mut optimal: HashMap<String, Vec<Rda>> = HashMap::new();
    for i in 0..samples {
        let t = pick(&mut r, pool);
        let n = t.arity();
        let subtrees = t.children_trees();
        let x = random_directional_mix(&mut r, t, 4);
        let k = r.random_range(0..n);
        let j = (k + r.random_range(1..n)) % n;
        let y = random_rda(&mut r, &subtrees[k], 2);
        let tt = random_ttype(&mut r, n);
        let omega = random_assignment(&mut r, t);
        record(&mut suite, i, t, check_order_invariance(t, &x, k, &y)?);
        record(&mut suite, i, t, check_cost_decomposition(t, &x, &omega)?);
        record(
            &mut suite,
            i,
            t,
            check_sibling_masses(t, &x, j, k, &y, &tt)?,
        );
        let key = t.render();
        if !optimal.contains_key(&key) {
            let parts = subtrees
                .iter()
                .map(|s| Ok(build_joint_optimal_rda(s)?.rda))
                .collect::<Result<Vec<_>>>()?;
            optimal.insert(key.clone(), parts);
        }
        record(&mut suite, i, t, check_improvement(t, &x, &optimal[&key])?);
    }
    Ok(SuiteOutcome {
        seed,
        instances: samples,
        verdict: suite,
    })
}

/// Conditional splits of arbitrary distributions under directional orders,
/// the child decomposition, posterior invariance and mixture dominance.
pub fn mixture_suite(pool: &[Tree], seed: u64, samples: usize) -> Result<SuiteOutcome> {
    check_pool(pool)?;
    let mut r = rng(seed);
    let mut suite = Verdict::new(MIXTURE);
    let mut families = Families(HashMap::new());
    let mut verified: HashMap<String, ()> = HashMap::new();
    for i in 0..samples {
        let t = pick(&mut r, pool);
        let n = t.arity();
        let fam = families.get(t)?.clone();
        if verified.insert(t.render(), ()).is_none() {
            record(&mut suite, i, t, verify_optimal_family(t, &fam)?);
        }
        let family = fam.family(t)?;
        let dist = random_distribution(&mut r, t, Filter::All, 8)?;
        let perms = permutations(n);
        let sigma = perms[r.random_range(0..perms.len())].clone();
        record(
            &mut suite,
            i,
            t,
            check_conditional_split(t, &sigma, &dist, &family)?,
        );
        for (j, child) in fam.children.iter().enumerate() {
            record(
                &mut suite,
                i,
                t,
                check_sprime_decomposition(t, &sigma, &dist, j, child)?,
            );
        }
        record(&mut suite, i, t, check_sdelta_dominance(t, &dist, &family)?);

        let mixture = make_sdelta(
            t,
            &extract_delta(t, &random_distribution(&mut r, t, Filter::All, 8)?)?,
            &family,
        )?;
        let k = r.random_range(0..n);
        let mut others: Vec<usize> = (0..n).filter(|&c| c != k).collect();
        others.shuffle(&mut r);
        others.truncate(r.random_range(0..=others.len()));
        let prefix: Vec<(usize, bool)> = others
            .into_iter()
            .map(|c| (c, r.random::<bool>()))
            .collect();
        let alpha = random_depth_first(&mut r, t);
        let value = r.random::<bool>();
        record(
            &mut suite,
            i,
            t,
            check_posterior_invariance(t, &mixture, k, value, &prefix, Some(&alpha))?,
        );
        // Mixture of the child-value law alone: the rebuilt law is the same.
        let again = extract_delta(t, &mixture.realized)?;
        let mut v = Verdict::new("child-value law survives the mixture");
        v.require(again == mixture.delta, || {
            format!("law {} became {}", mixture.delta, again)
        });
        record(&mut suite, i, t, v);
    }
    Ok(SuiteOutcome {
        seed,
        instances: samples,
        verdict: suite,
    })
}

/// Chimera of a random depth-first algorithm against a random product
/// mixture over the optimal family.
pub fn chimera_suite(pool: &[Tree], seed: u64, samples: usize) -> Result<SuiteOutcome> {
    check_pool(pool)?;
    let mut r = rng(seed);
    let mut suite = Verdict::new(CHIMERA);
    let mut families = Families(HashMap::new());
    for i in 0..samples {
        let t = pick(&mut r, pool);
        let fam = families.get(t)?.clone();
        let family = fam.family(t)?;
        let delta = random_delta(&mut r, t.arity())?;
        let mixture = make_sdelta(t, &delta, &family)?;
        let alpha = random_depth_first(&mut r, t);
        let parts: Vec<_> = fam
            .children
            .iter()
            .map(|c| RandomizedAlgorithm::point(Class::Directional, c.alpha.clone()))
            .collect();
        let chimera = build_chimera(t, &alpha, &mixture, &parts)?;
        record(
            &mut suite,
            i,
            t,
            check_chimera_properties(t, &alpha, &mixture, &chimera)?,
        );
        record(
            &mut suite,
            i,
            t,
            check_chimera_inequality(t, &alpha, &mixture, &parts)?,
        );
    }
    Ok(SuiteOutcome {
        seed,
        instances: samples,
        verdict: suite,
    })
}

/// Random depth-first mixes against independent children that all let the
/// root continue; instances alternate between AND and OR roots.
pub fn product_bound_suite(pool: &[Tree], seed: u64, samples: usize) -> Result<SuiteOutcome> {
    check_pool(pool)?;
    let (ands, ors): (Vec<Tree>, Vec<Tree>) = pool
        .iter()
        .cloned()
        .partition(|t| t.gate().is_some_and(|g| !g.controlling()));
    let mut r = rng(seed);
    let mut suite = Verdict::new(PRODUCT_BOUND);
    for i in 0..samples {
        let side = if (i % 2 == 0 && !ands.is_empty()) || ors.is_empty() {
            &ands
        } else {
            &ors
        };
        let t = pick(&mut r, side);
        let pass = !t.gate().expect("internal").controlling();
        let parts = t
            .children_trees()
            .iter()
            .map(|s| random_distribution(&mut r, s, Filter::root(pass), 4))
            .collect::<Result<Vec<_>>>()?;
        let x = random_depth_first_mix(&mut r, t, 3);
        record(&mut suite, i, t, check_product_lower_bound(t, &parts, &x)?);
    }
    Ok(SuiteOutcome {
        seed,
        instances: samples,
        verdict: suite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_trees() {
        let pool = instance_pool(4);
        for outcome in [
            replacement_suite(&pool, 1, 6).unwrap(),
            mixture_suite(&pool, 2, 6).unwrap(),
            chimera_suite(&pool, 3, 6).unwrap(),
            product_bound_suite(&pool, 4, 6).unwrap(),
        ] {
            assert!(outcome.verdict.passed, "{}", outcome.verdict);
            assert_eq!(outcome.instances, 6);
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let pool = instance_pool(4);
        let a = replacement_suite(&pool, 9, 3).unwrap();
        let b = replacement_suite(&pool, 9, 3).unwrap();
        assert_eq!(a.verdict, b.verdict);
    }

    #[test]
    fn single_tree_pool() {
        let pool = vec![Tree::parse("(or (and * *) *)").unwrap()];
        assert!(product_bound_suite(&pool, 5, 4).unwrap().verdict.passed);
        assert!(chimera_suite(&[Tree::leaf()], 5, 4).is_err());
    }
}
