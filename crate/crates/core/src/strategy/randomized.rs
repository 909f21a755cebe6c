//! Finite mixtures of pure algorithms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::assignment::{Assignment, AssignmentDistribution, Filter};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::strategy::decision::GeneralAlgorithm;
use crate::strategy::directional::DirectionalAlgorithm;
use crate::tree::Tree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    General,
    DepthFirst,
    Directional,
}

impl Class {
    pub const ALL: [Class; 3] = [Class::General, Class::DepthFirst, Class::Directional];

    pub fn name(self) -> &'static str {
        match self {
            Class::General => "general",
            Class::DepthFirst => "df",
            Class::Directional => "dir",
        }
    }
}

impl serde::Serialize for Class {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "general" => Ok(Class::General),
            "df" | "depth-first" => Ok(Class::DepthFirst),
            "dir" | "directional" => Ok(Class::Directional),
            other => Err(Error::Parse(format!("unknown class {other:?}"))),
        }
    }
}

/// Common interface of deterministic algorithms.
pub trait PureAlgorithm: Clone + Ord + fmt::Debug + Send + Sync {
    fn cost_bits(&self, tree: &Tree, bits: u64) -> u32;
    fn probe_bits(&self, tree: &Tree, bits: u64) -> Vec<usize>;
    fn belongs_to(&self, tree: &Tree, class: Class) -> bool;
    fn encode(&self) -> String;

    fn cost(&self, tree: &Tree, omega: &Assignment) -> Result<u32> {
        tree.check(omega)?;
        Ok(self.cost_bits(tree, omega.bits()))
    }

    fn probe_sequence(&self, tree: &Tree, omega: &Assignment) -> Result<Vec<usize>> {
        tree.check(omega)?;
        Ok(self.probe_bits(tree, omega.bits()))
    }

    fn cost_vs(&self, tree: &Tree, dist: &AssignmentDistribution) -> Rational {
        dist.expectation(|w| rational::int(i64::from(self.cost_bits(tree, w.bits()))))
    }
}

impl PureAlgorithm for DirectionalAlgorithm {
    fn cost_bits(&self, tree: &Tree, bits: u64) -> u32 {
        DirectionalAlgorithm::cost_bits(self, tree, bits)
    }

    fn probe_bits(&self, tree: &Tree, bits: u64) -> Vec<usize> {
        DirectionalAlgorithm::probe_bits(self, tree, bits)
    }

    fn belongs_to(&self, tree: &Tree, _class: Class) -> bool {
        self.validate(tree).is_ok()
    }

    fn encode(&self) -> String {
        DirectionalAlgorithm::encode(self)
    }
}

impl PureAlgorithm for GeneralAlgorithm {
    fn cost_bits(&self, _tree: &Tree, bits: u64) -> u32 {
        GeneralAlgorithm::cost_bits(self, bits)
    }

    fn probe_bits(&self, _tree: &Tree, bits: u64) -> Vec<usize> {
        GeneralAlgorithm::probe_bits(self, bits)
    }

    fn belongs_to(&self, tree: &Tree, class: Class) -> bool {
        match class {
            Class::General => self.validate(tree).is_ok(),
            Class::DepthFirst => self.is_depth_first(tree),
            Class::Directional => self.is_directional(tree),
        }
    }

    fn encode(&self) -> String {
        GeneralAlgorithm::encode(self)
    }
}

/// Probability distribution over pure algorithms of one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomizedAlgorithm<A: PureAlgorithm> {
    class: Class,
    weights: BTreeMap<A, Rational>,
}

pub type DirectionalMix = RandomizedAlgorithm<DirectionalAlgorithm>;

impl<A: PureAlgorithm> RandomizedAlgorithm<A> {
    /// Validates weights and class membership of the support.
    pub fn new(
        tree: &Tree,
        class: Class,
        weights: impl IntoIterator<Item = (A, Rational)>,
    ) -> Result<Self> {
        let mix = Self::from_weights(class, weights)?;
        for a in mix.weights.keys() {
            if !a.belongs_to(tree, class) {
                return Err(Error::InvalidAlgorithm(format!(
                    "{} is not in the {class} class",
                    a.encode()
                )));
            }
        }
        Ok(mix)
    }

    /// Validates the weights only; members are trusted.
    pub fn from_weights(
        class: Class,
        weights: impl IntoIterator<Item = (A, Rational)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<A, Rational> = BTreeMap::new();
        for (a, p) in weights {
            *map.entry(a).or_insert_with(Rational::zero) += p;
        }
        rational::check_probabilities(map.values())?;
        map.retain(|_, p| !p.is_zero());
        Ok(RandomizedAlgorithm {
            class,
            weights: map,
        })
    }

    pub fn point(class: Class, alg: A) -> Self {
        RandomizedAlgorithm {
            class,
            weights: BTreeMap::from([(alg, Rational::one())]),
        }
    }

    pub fn uniform(class: Class, algs: &[A]) -> Result<Self> {
        if algs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let p = rational::ratio(1, algs.len() as i64);
        Self::from_weights(class, algs.iter().map(|a| (a.clone(), p.clone())))
    }

    pub fn class(&self) -> Class {
        self.class
    }

    pub fn iter(&self) -> impl Iterator<Item = (&A, &Rational)> {
        self.weights.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &A> {
        self.weights.keys()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn prob(&self, alg: &A) -> Rational {
        self.weights
            .get(alg)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn cost_bits(&self, tree: &Tree, bits: u64) -> Rational {
        self.weights.iter().fold(Rational::zero(), |acc, (a, p)| {
            acc + p * rational::int(i64::from(a.cost_bits(tree, bits)))
        })
    }

    pub fn cost(&self, tree: &Tree, omega: &Assignment) -> Result<Rational> {
        tree.check(omega)?;
        Ok(self.cost_bits(tree, omega.bits()))
    }

    pub fn cost_vs(&self, tree: &Tree, dist: &AssignmentDistribution) -> Rational {
        dist.expectation(|w| self.cost_bits(tree, w.bits()))
    }

    /// Worst case over the filtered assignments, with the first maximizer.
    pub fn max_cost(&self, tree: &Tree, filter: Filter) -> Result<(Rational, Assignment)> {
        let mut best: Option<(Rational, Assignment)> = None;
        for w in tree.enumerate_assignments(filter)? {
            let c = self.cost_bits(tree, w.bits());
            if best.as_ref().is_none_or(|(b, _)| c > *b) {
                best = Some((c, w));
            }
        }
        best.ok_or_else(|| Error::InvalidDistribution("no assignment passes the filter".into()))
    }

    /// `p·self + (1−p)·other`.
    pub fn mix(&self, p: &Rational, other: &Self) -> Result<Self> {
        let q = Rational::one() - p;
        let class = self.class.min(other.class);
        Self::from_weights(
            class,
            self.weights
                .iter()
                .map(|(a, x)| (a.clone(), x * p))
                .chain(other.weights.iter().map(|(a, x)| (a.clone(), x * &q))),
        )
    }

    pub fn map<B: PureAlgorithm>(
        &self,
        class: Class,
        f: impl Fn(&A) -> B,
    ) -> Result<RandomizedAlgorithm<B>> {
        RandomizedAlgorithm::from_weights(
            class,
            self.weights.iter().map(|(a, p)| (f(a), p.clone())),
        )
    }

    pub fn encode(&self) -> String {
        let entries: Vec<String> = self
            .weights
            .iter()
            .map(|(a, p)| format!("({} {})", a.encode(), rational::fmt(p)))
            .collect();
        format!("(mix {} ({}))", self.class, entries.join(" "))
    }
}

impl DirectionalMix {
    /// The same mixture with members lowered to decision trees.
    pub fn lower(&self, tree: &Tree) -> RandomizedAlgorithm<GeneralAlgorithm> {
        self.map(Class::Directional, |a| a.lower(tree))
            .expect("lowering is injective and preserves weights")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::strategy::enumerate::{enumerate_directional, Limits};

    #[test]
    fn uniform_mix_cost() {
        let t = Tree::parse("(and * *)").unwrap();
        let algs = enumerate_directional(&t, &Limits::default()).unwrap();
        let mix = RandomizedAlgorithm::uniform(Class::Directional, &algs).unwrap();
        let w: Assignment = "01".parse().unwrap();
        assert_eq!(mix.cost(&t, &w).unwrap(), ratio(3, 2));
        let (worst, at) = mix.max_cost(&t, Filter::Zero).unwrap();
        assert_eq!(worst, ratio(3, 2));
        assert_eq!(at.to_string(), "01");
    }

    #[test]
    fn point_distribution_cost() {
        let t = Tree::parse("(or (and * *) *)").unwrap();
        let a = DirectionalAlgorithm::identity(&t);
        let w: Assignment = "101".parse().unwrap();
        let d = AssignmentDistribution::point(w);
        assert_eq!(PureAlgorithm::cost_vs(&a, &t, &d), rational::int(3));
    }

    #[test]
    fn class_membership_is_enforced() {
        let t = Tree::parse("(and (or * *) (or * *))").unwrap();
        let g = GeneralAlgorithm::from_policy(&t, |known, vals| {
            if known == 0b0001 && vals == 0 {
                2
            } else {
                t.live_leaves(known, vals).trailing_zeros() as usize
            }
        });
        assert!(RandomizedAlgorithm::new(&t, Class::General, [(g.clone(), ratio(1, 1))]).is_ok());
        assert!(RandomizedAlgorithm::new(&t, Class::DepthFirst, [(g, ratio(1, 1))]).is_err());
    }

    #[test]
    fn class_names() {
        for c in Class::ALL {
            assert_eq!(c.name().parse::<Class>().unwrap(), c);
        }
    }
}
