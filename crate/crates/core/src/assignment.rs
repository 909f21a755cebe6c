//! Assignments of leaf values and exact distributions over them.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::sexpr::{self, syntax_error, SExpr};
use crate::tree::{range_mask, Tree};

/// Leaf values packed into a word; bit `i` is leaf `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: u64,
    len: u8,
}

impl Assignment {
    pub fn new(len: usize, bits: u64) -> Self {
        assert!(len <= 64, "assignments hold at most 64 leaves");
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Assignment {
            bits: bits & mask,
            len: len as u8,
        }
    }

    pub fn from_bools(values: &[bool]) -> Self {
        let bits = values
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc | (u64::from(v) << i));
        Assignment::new(values.len(), bits)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, leaf: usize) -> bool {
        self.bits >> leaf & 1 == 1
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    /// The restriction to a contiguous block of leaves, renumbered from 0.
    pub fn restrict(&self, range: &Range<usize>) -> Assignment {
        Assignment::new(range.len(), (self.bits & range_mask(range)) >> range.start)
    }

    /// Sort key that orders assignments lexicographically with leaf 0 first.
    fn lex_key(&self) -> u64 {
        if self.len == 0 {
            0
        } else {
            self.bits.reverse_bits() >> (64 - self.len as u32)
        }
    }

    /// All assignments of `len` leaves in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = Assignment> {
        assert!(len < 64);
        (0..1u64 << len).map(move |k| {
            let bits = if len == 0 {
                0
            } else {
                k.reverse_bits() >> (64 - len as u32)
            };
            Assignment::new(len, bits)
        })
    }
}

impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.lex_key().cmp(&other.lex_key()))
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > 64 {
            return Err(Error::Parse(format!("assignment too long: {s:?}")));
        }
        let values = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("not a bitstring: {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Assignment::from_bools(&values))
    }
}

/// Restriction of the assignment space by root value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Filter {
    All,
    Zero,
    One,
}

impl Filter {
    pub const ALL: [Filter; 3] = [Filter::All, Filter::Zero, Filter::One];

    pub fn root(value: bool) -> Filter {
        if value {
            Filter::One
        } else {
            Filter::Zero
        }
    }

    pub fn admits(self, root_value: bool) -> bool {
        match self {
            Filter::All => true,
            Filter::Zero => !root_value,
            Filter::One => root_value,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Filter::All => "all",
            Filter::Zero => "0",
            Filter::One => "1",
        }
    }
}

impl serde::Serialize for Filter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(Filter::All),
            "0" | "root0" => Ok(Filter::Zero),
            "1" | "root1" => Ok(Filter::One),
            other => Err(Error::Parse(format!("unknown filter {other:?}"))),
        }
    }
}

/// Values of the root's children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TType(pub Vec<bool>);

impl TType {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_assignment(&self) -> Assignment {
        Assignment::from_bools(&self.0)
    }
}

impl fmt::Display for TType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.as_assignment().fmt(f)
    }
}

/// Exact probability distribution over assignments of a fixed length.
/// Zero weights are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentDistribution {
    leaves: usize,
    weights: BTreeMap<Assignment, Rational>,
}

impl AssignmentDistribution {
    pub fn new(
        leaves: usize,
        weights: impl IntoIterator<Item = (Assignment, Rational)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Assignment, Rational> = BTreeMap::new();
        for (omega, p) in weights {
            if omega.len() != leaves {
                return Err(Error::LengthMismatch {
                    expected: leaves,
                    got: omega.len(),
                });
            }
            *map.entry(omega).or_insert_with(Rational::zero) += p;
        }
        rational::check_probabilities(map.values())?;
        map.retain(|_, p| !p.is_zero());
        Ok(AssignmentDistribution {
            leaves,
            weights: map,
        })
    }

    pub fn point(omega: Assignment) -> Self {
        AssignmentDistribution {
            leaves: omega.len(),
            weights: BTreeMap::from([(omega, Rational::one())]),
        }
    }

    pub fn uniform(leaves: usize, support: &[Assignment]) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let p = rational::ratio(1, support.len() as i64);
        Self::new(leaves, support.iter().map(|w| (*w, p.clone())))
    }

    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn prob(&self, omega: &Assignment) -> Rational {
        self.weights
            .get(omega)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Assignment, &Rational)> {
        self.weights.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Assignment> {
        self.weights.keys()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Errors unless every supported assignment passes `filter` on `tree`.
    pub fn check_filter(&self, tree: &Tree, filter: Filter) -> Result<()> {
        tree.check(&Assignment::new(self.leaves, 0))?;
        for omega in self.weights.keys() {
            if !filter.admits(tree.eval_bits(omega.bits())) {
                return Err(Error::InvalidDistribution(format!(
                    "assignment {omega} is outside the {filter} filter"
                )));
            }
        }
        Ok(())
    }

    pub fn expectation(&self, mut f: impl FnMut(&Assignment) -> Rational) -> Rational {
        self.weights
            .iter()
            .fold(Rational::zero(), |acc, (w, p)| acc + p * f(w))
    }

    pub fn probability_of(&self, mut event: impl FnMut(&Assignment) -> bool) -> Rational {
        self.weights
            .iter()
            .filter(|(w, _)| event(w))
            .fold(Rational::zero(), |acc, (_, p)| acc + p)
    }

    /// Marginal on a block of leaves.
    pub fn marginal(&self, range: &Range<usize>) -> AssignmentDistribution {
        let mut map: BTreeMap<Assignment, Rational> = BTreeMap::new();
        for (w, p) in &self.weights {
            *map.entry(w.restrict(range)).or_insert_with(Rational::zero) += p;
        }
        AssignmentDistribution {
            leaves: range.len(),
            weights: map,
        }
    }

    /// Conditional distribution given an event of positive probability.
    pub fn conditional(
        &self,
        mut event: impl FnMut(&Assignment) -> bool,
    ) -> Option<AssignmentDistribution> {
        let kept: Vec<_> = self.weights.iter().filter(|(w, _)| event(w)).collect();
        let mass = kept.iter().fold(Rational::zero(), |acc, (_, p)| acc + *p);
        if mass.is_zero() {
            return None;
        }
        Some(AssignmentDistribution {
            leaves: self.leaves,
            weights: kept.into_iter().map(|(w, p)| (*w, p / &mass)).collect(),
        })
    }

    /// Convex combination `p·self + (1−p)·other`.
    pub fn mix(&self, p: &Rational, other: &AssignmentDistribution) -> Result<Self> {
        if self.leaves != other.leaves {
            return Err(Error::LengthMismatch {
                expected: self.leaves,
                got: other.leaves,
            });
        }
        let q = Rational::one() - p;
        Self::new(
            self.leaves,
            self.weights
                .iter()
                .map(|(w, x)| (*w, x * p))
                .chain(other.weights.iter().map(|(w, x)| (*w, x * &q))),
        )
    }

    pub fn encode(&self) -> String {
        let entries: Vec<String> = self
            .weights
            .iter()
            .map(|(w, p)| format!("({w} {})", rational::fmt(p)))
            .collect();
        format!("(dist ({}))", entries.join(" "))
    }

    pub fn decode(text: &str) -> Result<Self> {
        let expr = sexpr::parse_one(text)?;
        let bad = |e: &SExpr, m: &str| syntax_error(e.pos(), m.to_string());
        let (head, rest) = expr
            .as_form()
            .ok_or_else(|| bad(&expr, "expected (dist ...)"))?;
        if head != "dist" || rest.len() != 1 {
            return Err(bad(&expr, "expected (dist ((bits p/q) ...))"));
        }
        let entries = rest[0]
            .as_list()
            .ok_or_else(|| bad(&rest[0], "expected a list of entries"))?;
        let mut weights = Vec::new();
        let mut leaves = None;
        for e in entries {
            let pair = e.as_list().ok_or_else(|| bad(e, "expected (bits p/q)"))?;
            let [bits, p] = pair else {
                return Err(bad(e, "expected (bits p/q)"));
            };
            let omega: Assignment = bits
                .as_atom()
                .ok_or_else(|| bad(bits, "expected a bitstring"))?
                .parse()?;
            let p = rational::parse(p.as_atom().ok_or_else(|| bad(p, "expected p/q"))?)?;
            leaves.get_or_insert(omega.len());
            weights.push((omega, p));
        }
        let leaves = leaves.ok_or_else(|| Error::InvalidDistribution("empty support".into()))?;
        Self::new(leaves, weights)
    }
}

impl fmt::Display for AssignmentDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}
