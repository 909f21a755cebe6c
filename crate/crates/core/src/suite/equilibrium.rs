//! Equilibrium values of every class and filter, with witnesses.

use serde::Serialize;

use crate::assignment::Filter;
use crate::error::{Error, Result};
use crate::game::best_response::{min_cost, MAX_DP_LEAVES};
use crate::game::double_oracle::{double_oracle, ClassSolution};
use crate::rational::{self, Rational};
use crate::rda_engine::{d_values, DValues};
use crate::strategy::randomized::Class;
use crate::suite::balance::{is_weakly_balanced, WeakBalanceVerdict};
use crate::suite::verify::{chain_verdicts, weak_balance_collapse_verdict, yao_verdict};
use crate::tree::Tree;
use crate::verdict::Verdict;

/// A strategy and its probability, in text form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Weighted {
    pub item: String,
    #[serde(with = "rational::serde_rational")]
    pub weight: Rational,
}

/// Solved game of one class against one filter. `r_value` is the worst
/// case of the algorithm mix, `p_value` the best response cost against the
/// assignment mix; both are recomputed from the witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equilibrium {
    pub class: Class,
    pub filter: Filter,
    #[serde(with = "rational::serde_rational")]
    pub value: Rational,
    #[serde(with = "rational::serde_rational")]
    pub r_value: Rational,
    #[serde(with = "rational::serde_rational")]
    pub p_value: Rational,
    pub algorithms: Vec<Weighted>,
    pub assignments: Vec<Weighted>,
    #[serde(skip)]
    pub solution: ClassSolution,
}

pub fn check_feasible(tree: &Tree) -> Result<()> {
    if tree.leaf_count() > MAX_DP_LEAVES {
        return Err(Error::BoundExceeded {
            what: "leaves",
            actual: tree.leaf_count() as u128,
            bound: MAX_DP_LEAVES as u128,
        });
    }
    Ok(())
}

pub fn equilibrium(tree: &Tree, class: Class, filter: Filter) -> Result<Equilibrium> {
    check_feasible(tree)?;
    let solution = double_oracle(tree, class, filter)?;
    let r_value = solution.row_worst_case(tree, filter)?;
    let p_value = min_cost(tree, class, solution.col_mix())?;
    Ok(Equilibrium {
        class,
        filter,
        value: solution.value().clone(),
        r_value,
        p_value,
        algorithms: solution
            .row_mix_entries()
            .into_iter()
            .map(|(item, weight)| Weighted { item, weight })
            .collect(),
        assignments: solution
            .col_mix()
            .iter()
            .map(|(w, p)| Weighted {
                item: w.to_string(),
                weight: p.clone(),
            })
            .collect(),
        solution,
    })
}

/// Everything computed for one tree.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumReport {
    pub tree: String,
    pub leaves: usize,
    pub equilibria: Vec<Equilibrium>,
    pub d: DValues,
    pub weak_balance: Option<WeakBalanceVerdict>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

impl EquilibriumReport {
    pub fn get(&self, class: Class, filter: Filter) -> Option<&Equilibrium> {
        self.equilibria
            .iter()
            .find(|e| e.class == class && e.filter == filter)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

pub fn analyze(tree: &Tree, classes: &[Class], filters: &[Filter]) -> Result<EquilibriumReport> {
    check_feasible(tree)?;
    let mut equilibria = Vec::new();
    for &class in classes {
        for &filter in filters {
            equilibria.push(equilibrium(tree, class, filter)?);
        }
    }
    let d = d_values(tree)?;
    let weak_balance = if classes.contains(&Class::General) {
        Some(is_weakly_balanced(tree)?)
    } else {
        None
    };
    let mut verdicts = Vec::new();
    for e in &equilibria {
        verdicts.push(yao_verdict(tree, e)?);
    }
    verdicts.extend(chain_verdicts(&equilibria, &d));
    if let Some(wb) = &weak_balance {
        if let Some(v) = weak_balance_collapse_verdict(wb, &equilibria, &d) {
            verdicts.push(v);
        }
    }
    let passed = verdicts.iter().all(|v| v.passed);
    Ok(EquilibriumReport {
        tree: tree.render(),
        leaves: tree.leaf_count(),
        equilibria,
        d,
        weak_balance,
        verdicts,
        passed,
    })
}

impl std::fmt::Display for EquilibriumReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "tree {} ({} leaves)", self.tree, self.leaves)?;
        for e in &self.equilibria {
            writeln!(
                f,
                "  {:<8} {:<4} value {}  R {}  P {}  ({} algorithms, {} assignments)",
                e.class.name(),
                e.filter.name(),
                rational::fmt(&e.value),
                rational::fmt(&e.r_value),
                rational::fmt(&e.p_value),
                e.algorithms.len(),
                e.assignments.len()
            )?;
        }
        writeln!(
            f,
            "  d0 {}  d1 {}  d {}",
            rational::fmt(&self.d.d0),
            rational::fmt(&self.d.d1),
            rational::fmt(&self.d.d)
        )?;
        if let Some(wb) = &self.weak_balance {
            writeln!(f, "  weakly balanced: {}", wb.balanced)?;
        }
        for v in &self.verdicts {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn single_leaf_is_one() {
        let t = Tree::leaf();
        for class in Class::ALL {
            for filter in Filter::ALL {
                let e = equilibrium(&t, class, filter).unwrap();
                assert_eq!(e.value, ratio(1, 1));
                assert_eq!(e.r_value, e.p_value);
            }
        }
    }

    #[test]
    fn and_of_two_directional_root_zero() {
        let t = Tree::parse("(and * *)").unwrap();
        let e = equilibrium(&t, Class::Directional, Filter::Zero).unwrap();
        assert_eq!(e.value, ratio(3, 2));
        assert_eq!(e.r_value, ratio(3, 2));
        assert_eq!(e.p_value, ratio(3, 2));
    }

    #[test]
    fn two_by_two_depth_first_matches_directional() {
        let t = Tree::parse("(and (or * *) (or * *))").unwrap();
        for filter in Filter::ALL {
            let df = equilibrium(&t, Class::DepthFirst, filter).unwrap();
            let dir = equilibrium(&t, Class::Directional, filter).unwrap();
            assert_eq!(df.value, dir.value, "filter {filter}");
        }
    }

    #[test]
    fn report_passes_and_serializes() {
        let t = Tree::parse("(or * (and * *))").unwrap();
        let r = analyze(&t, &Class::ALL, &Filter::ALL).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.equilibria.len(), 9);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"class\":\"dir\""));
        assert_eq!(
            json,
            serde_json::to_string(&analyze(&t, &Class::ALL, &Filter::ALL).unwrap()).unwrap()
        );
    }

    #[test]
    fn too_many_leaves() {
        let leaves = vec!["*"; MAX_DP_LEAVES + 1].join(" ");
        let t = Tree::parse(&format!("(and {leaves})")).unwrap();
        assert!(matches!(
            equilibrium(&t, Class::General, Filter::All),
            Err(Error::BoundExceeded { .. })
        ));
    }
}
