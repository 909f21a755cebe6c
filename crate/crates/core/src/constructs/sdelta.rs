//! Distributions built from a law on the root children's values and one
//! distribution per child and value.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::assignment::{Assignment, AssignmentDistribution, Filter};
use crate::error::{Error, Result};
use crate::game::best_response::best_response_directional;
use crate::rational::{self, Rational};
use crate::strategy::enumerate::cartesian;
use crate::tree::Tree;
use crate::verdict::Verdict;

/// Distribution over the value vectors of the root's children. Bit `j` of
/// each key is the value of child `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthOneDistribution {
    dist: AssignmentDistribution,
}

impl DepthOneDistribution {
    pub fn new(
        arity: usize,
        weights: impl IntoIterator<Item = (Vec<bool>, Rational)>,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        for (t, p) in weights {
            if t.len() != arity {
                return Err(Error::LengthMismatch {
                    expected: arity,
                    got: t.len(),
                });
            }
            entries.push((Assignment::from_bools(&t), p));
        }
        Ok(DepthOneDistribution {
            dist: AssignmentDistribution::new(arity, entries)?,
        })
    }

    pub fn point(t: &[bool]) -> Self {
        DepthOneDistribution {
            dist: AssignmentDistribution::point(Assignment::from_bools(t)),
        }
    }

    pub fn arity(&self) -> usize {
        self.dist.leaves()
    }

    pub fn prob(&self, t: &[bool]) -> Rational {
        if t.len() != self.arity() {
            return Rational::zero();
        }
        self.dist.prob(&Assignment::from_bools(t))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<bool>, &Rational)> {
        self.dist.iter().map(|(w, p)| (w.to_bools(), p))
    }

    pub fn as_distribution(&self) -> &AssignmentDistribution {
        &self.dist
    }

    /// Whether every supported vector forces the root of `tree` to `value`.
    pub fn forces_root(&self, tree: &Tree, value: bool) -> bool {
        let Some(gate) = tree.gate() else {
            return false;
        };
        self.iter()
            .all(|(t, _)| gate.apply(t.iter().copied()) == value)
    }

    pub fn encode(&self) -> String {
        self.dist.encode()
    }
}

impl fmt::Display for DepthOneDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// For every root child `j` and value `i`, a distribution on the child's
/// assignments giving it value `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeDistributionFamily {
    parts: Vec<[AssignmentDistribution; 2]>,
}

impl SubtreeDistributionFamily {
    pub fn new(tree: &Tree, parts: Vec<[AssignmentDistribution; 2]>) -> Result<Self> {
        let subtrees = tree.children_trees();
        if parts.len() != subtrees.len() {
            return Err(Error::LengthMismatch {
                expected: subtrees.len(),
                got: parts.len(),
            });
        }
        for (sub, pair) in subtrees.iter().zip(&parts) {
            for (i, d) in pair.iter().enumerate() {
                if d.leaves() != sub.leaf_count() {
                    return Err(Error::LengthMismatch {
                        expected: sub.leaf_count(),
                        got: d.leaves(),
                    });
                }
                d.check_filter(sub, Filter::root(i == 1))?;
            }
        }
        Ok(SubtreeDistributionFamily { parts })
    }

    /// Uniform over each child's assignments of each value.
    pub fn uniform(tree: &Tree) -> Result<Self> {
        let parts = tree
            .children_trees()
            .iter()
            .map(|sub| -> Result<[AssignmentDistribution; 2]> {
                let n = sub.leaf_count();
                Ok([
                    AssignmentDistribution::uniform(n, &sub.enumerate_assignments(Filter::Zero)?)?,
                    AssignmentDistribution::uniform(n, &sub.enumerate_assignments(Filter::One)?)?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubtreeDistributionFamily { parts })
    }

    pub fn arity(&self) -> usize {
        self.parts.len()
    }

    pub fn get(&self, j: usize, value: bool) -> &AssignmentDistribution {
        &self.parts[j][usize::from(value)]
    }

    pub fn parts(&self) -> &[[AssignmentDistribution; 2]] {
        &self.parts
    }
}

/// The realized distribution together with the data it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductMixture {
    pub delta: DepthOneDistribution,
    pub family: SubtreeDistributionFamily,
    pub realized: AssignmentDistribution,
}

/// Concatenates per-child assignments into one assignment of `tree`.
pub fn join_children(tree: &Tree, parts: &[Assignment]) -> Assignment {
    let bits = tree
        .child_ranges()
        .iter()
        .zip(parts)
        .fold(0u64, |acc, (r, w)| acc | (w.bits() << r.start));
    Assignment::new(tree.leaf_count(), bits)
}

/// Draws the child values from `delta` and then each child independently
/// from the family member of that value.
pub fn make_sdelta(
    tree: &Tree,
    delta: &DepthOneDistribution,
    family: &SubtreeDistributionFamily,
) -> Result<ProductMixture> {
    let n = tree.root_children().len();
    if n == 0 {
        return Err(Error::ShapeMismatch(
            "a single leaf has no root children".into(),
        ));
    }
    if delta.arity() != n || family.arity() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: if delta.arity() != n {
                delta.arity()
            } else {
                family.arity()
            },
        });
    }
    let mut acc: BTreeMap<Assignment, Rational> = BTreeMap::new();
    for (t, p) in delta.iter() {
        let lists: Vec<Vec<(Assignment, Rational)>> = t
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                family
                    .get(j, v)
                    .iter()
                    .map(|(w, q)| (*w, q.clone()))
                    .collect()
            })
            .collect();
        for combo in cartesian(&lists) {
            let parts: Vec<Assignment> = combo.iter().map(|(w, _)| *w).collect();
            let weight = combo.iter().fold(p.clone(), |acc, (_, q)| acc * q);
            *acc.entry(join_children(tree, &parts))
                .or_insert_with(Rational::zero) += weight;
        }
    }
    let realized = AssignmentDistribution::new(tree.leaf_count(), acc)?;
    let ranges = tree.child_ranges();
    for (w, p) in realized.iter() {
        let t = tree.ttype_bits(w.bits()).0;
        let expected = ranges
            .iter()
            .enumerate()
            .fold(delta.prob(&t), |acc, (j, r)| {
                acc * family.get(j, t[j]).prob(&w.restrict(r))
            });
        if *p != expected {
            return Err(Error::InvalidDistribution(format!(
                "product mixture weight at {w} is {} instead of {}",
                rational::fmt(p),
                rational::fmt(&expected)
            )));
        }
    }
    if extract_delta(tree, &realized)? != *delta {
        return Err(Error::InvalidDistribution(
            "product mixture does not reproduce its child-value law".into(),
        ));
    }
    Ok(ProductMixture {
        delta: delta.clone(),
        family: family.clone(),
        realized,
    })
}

/// Law of the root children's values under `dist`.
pub fn extract_delta(tree: &Tree, dist: &AssignmentDistribution) -> Result<DepthOneDistribution> {
    if dist.leaves() != tree.leaf_count() {
        return Err(Error::LengthMismatch {
            expected: tree.leaf_count(),
            got: dist.leaves(),
        });
    }
    let n = tree.root_children().len();
    if n == 0 {
        return Err(Error::ShapeMismatch(
            "a single leaf has no root children".into(),
        ));
    }
    let mut acc: BTreeMap<Vec<bool>, Rational> = BTreeMap::new();
    for (w, p) in dist.iter() {
        *acc.entry(tree.ttype_bits(w.bits()).0)
            .or_insert_with(Rational::zero) += p;
    }
    DepthOneDistribution::new(n, acc)
}

/// Replacing `dist` by the product mixture of its own child-value law never
/// makes the best directional response cheaper.
pub fn check_sdelta_dominance(
    tree: &Tree,
    dist: &AssignmentDistribution,
    family: &SubtreeDistributionFamily,
) -> Result<Verdict> {
    let mixture = make_sdelta(tree, &extract_delta(tree, dist)?, family)?;
    let before = best_response_directional(tree, dist)?.1;
    let after = best_response_directional(tree, &mixture.realized)?.1;
    let mut v = Verdict::new("best directional cost does not drop under the product mixture");
    v.require(before <= after, || {
        format!(
            "best directional cost {} against the original but {} against the mixture",
            rational::fmt(&before),
            rational::fmt(&after)
        )
    });
    Ok(v)
}

/// Total mass of a realized mixture, for property tests.
pub fn total_mass(dist: &AssignmentDistribution) -> Rational {
    dist.iter().fold(Rational::zero(), |acc, (_, p)| acc + p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use num_traits::One;

    fn two_by_two() -> Tree {
        Tree::parse("(and (or * *) (or * *))").unwrap()
    }

    fn w(s: &str) -> Assignment {
        s.parse().unwrap()
    }

    #[test]
    fn point_delta_gives_the_product() {
        let t = two_by_two();
        let fam = SubtreeDistributionFamily::uniform(&t).unwrap();
        let m = make_sdelta(&t, &DepthOneDistribution::point(&[true, true]), &fam).unwrap();
        assert_eq!(m.realized.support_len(), 9);
        assert_eq!(m.realized.prob(&w("0110")), ratio(1, 9));
        assert!(total_mass(&m.realized).is_one());
    }

    #[test]
    fn uniform_delta_with_point_family() {
        let t = Tree::parse("(and * *)").unwrap();
        let fam = SubtreeDistributionFamily::uniform(&t).unwrap();
        let delta = DepthOneDistribution::new(
            2,
            [
                (vec![false, false], ratio(1, 4)),
                (vec![false, true], ratio(1, 4)),
                (vec![true, false], ratio(1, 4)),
                (vec![true, true], ratio(1, 4)),
            ],
        )
        .unwrap();
        let m = make_sdelta(&t, &delta, &fam).unwrap();
        for s in ["00", "01", "10", "11"] {
            assert_eq!(m.realized.prob(&w(s)), ratio(1, 4));
        }
    }

    #[test]
    fn delta_of_uniform_root_zero() {
        let t = two_by_two();
        let zeros = t.enumerate_assignments(Filter::Zero).unwrap();
        assert_eq!(zeros.len(), 7);
        let s = AssignmentDistribution::uniform(4, &zeros).unwrap();
        let d = extract_delta(&t, &s).unwrap();
        assert_eq!(d.prob(&[false, false]), ratio(1, 7));
        assert_eq!(d.prob(&[false, true]), ratio(3, 7));
        assert_eq!(d.prob(&[true, false]), ratio(3, 7));
        assert_eq!(d.prob(&[true, true]), ratio(0, 1));
        assert!(d.forces_root(&t, false));
        let fam = SubtreeDistributionFamily::uniform(&t).unwrap();
        let m = make_sdelta(&t, &d, &fam).unwrap();
        assert_eq!(extract_delta(&t, &m.realized).unwrap(), d);
        assert!(check_sdelta_dominance(&t, &s, &fam).unwrap().passed);
    }

    #[test]
    fn point_delta_of_point_distribution() {
        let t = two_by_two();
        let d = extract_delta(&t, &AssignmentDistribution::point(w("1000"))).unwrap();
        assert_eq!(d, DepthOneDistribution::point(&[true, false]));
    }

    #[test]
    fn family_rejects_wrong_root_value() {
        let t = Tree::parse("(and * *)").unwrap();
        let p = |s: &str| AssignmentDistribution::point(w(s));
        let bad = SubtreeDistributionFamily::new(&t, vec![[p("1"), p("1")], [p("0"), p("1")]]);
        assert!(bad.is_err());
        assert!(
            SubtreeDistributionFamily::new(&t, vec![[p("0"), p("1")], [p("0"), p("1")]]).is_ok()
        );
    }

    #[test]
    fn arity_mismatch() {
        let t = two_by_two();
        let fam = SubtreeDistributionFamily::uniform(&t).unwrap();
        let d = DepthOneDistribution::point(&[true, true, true]);
        assert!(matches!(
            make_sdelta(&t, &d, &fam),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
