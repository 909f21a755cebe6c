//! Verdicts over solved games: minimax equality, the class chain and its
//! collapse, weak balance, and convex combinations of optimal mixes.

use num_traits::Zero;

use crate::assignment::{AssignmentDistribution, Filter};
use crate::error::{Error, Result};
use crate::game::best_response::min_cost;
use crate::game::double_oracle::{full_lp, ClassSolution};
use crate::rational::{self, ratio, Rational};
use crate::rda_engine::{build_joint_optimal_rda, d_values, DValues};
use crate::strategy::decision::GeneralAlgorithm;
use crate::strategy::enumerate::{count_depth_first, count_directional, count_general, Limits};
use crate::strategy::randomized::{Class, RandomizedAlgorithm};
use crate::strategy::rda::DEFAULT_EXPANSION_BOUND;
use crate::suite::balance::{is_weakly_balanced, WeakBalanceVerdict};
use crate::suite::equilibrium::{equilibrium, Equilibrium};
use crate::tree::Tree;
use crate::verdict::Verdict;

/// Largest class solved a second time by full enumeration.
pub const ENUMERATION_CROSS_CHECK: u128 = 300;

pub const CHAIN: &str = "class chain";
pub const COLLAPSE: &str = "collapse";
pub const RDA_MATCHES_DIRECTIONAL: &str = "rda matches directional";
pub const WEAKLY_BALANCED_COLLAPSE: &str = "weakly balanced collapse";

pub fn yao_name(class: Class, filter: Filter) -> String {
    format!("yao {class} {filter}")
}

fn class_count(tree: &Tree, class: Class) -> u128 {
    match class {
        Class::General => count_general(tree),
        Class::DepthFirst => count_depth_first(tree),
        Class::Directional => count_directional(tree),
    }
}

/// Minimax equality for one solved game, plus the reductions of both sides
/// to pure opponents.
pub fn yao_verdict(tree: &Tree, e: &Equilibrium) -> Result<Verdict> {
    let mut v = Verdict::new(yao_name(e.class, e.filter));
    let show = rational::fmt;
    v.require(e.r_value == e.p_value, || {
        format!(
            "R side {} differs from P side {}",
            show(&e.r_value),
            show(&e.p_value)
        )
    });
    v.require(e.value == e.r_value, || {
        format!(
            "game value {} differs from R side {}",
            show(&e.value),
            show(&e.r_value)
        )
    });
    let col = e.solution.col_mix();
    let (saddle, worst_point) = match &e.solution {
        ClassSolution::Directional(s) => (
            s.row_mix.cost_vs(tree, col),
            s.row_mix.max_cost(tree, e.filter)?,
        ),
        ClassSolution::Decision(s) => (
            s.row_mix.cost_vs(tree, col),
            s.row_mix.max_cost(tree, e.filter)?,
        ),
    };
    v.require(saddle == e.value, || {
        format!("witnesses meet at {} instead of the value", show(&saddle))
    });
    // The worst distribution for a fixed mix may be taken to be a point, and
    // the best algorithm against a fixed distribution may be taken pure.
    let point = AssignmentDistribution::point(worst_point.1);
    let at_point = match &e.solution {
        ClassSolution::Directional(s) => s.row_mix.cost_vs(tree, &point),
        ClassSolution::Decision(s) => s.row_mix.cost_vs(tree, &point),
    };
    v.require(at_point == worst_point.0 && saddle <= at_point, || {
        format!(
            "worst case {} is not attained by a point distribution",
            show(&worst_point.0)
        )
    });
    v.require(e.p_value <= saddle, || {
        format!(
            "a pure response costs {} above the mix's {}",
            show(&e.p_value),
            show(&saddle)
        )
    });
    if class_count(tree, e.class) <= ENUMERATION_CROSS_CHECK {
        let full = full_lp(tree, e.class, e.filter, &Limits::default())?;
        v.require(full.value() == &e.value, || {
            format!(
                "full enumeration gives {} instead of {}",
                show(full.value()),
                show(&e.value)
            )
        });
    }
    Ok(v)
}

pub fn verify_yao(tree: &Tree, class: Class, filter: Filter) -> Result<Verdict> {
    yao_verdict(tree, &equilibrium(tree, class, filter)?)
}

fn value_of(equilibria: &[Equilibrium], class: Class, filter: Filter) -> Option<&Rational> {
    equilibria
        .iter()
        .find(|e| e.class == class && e.filter == filter)
        .map(|e| &e.value)
}

/// The ordering general <= depth-first <= directional <= d for each filter,
/// equality of the last three, and the whole-space value as the larger of
/// the two root-value values.
pub fn chain_verdicts(equilibria: &[Equilibrium], d: &DValues) -> Vec<Verdict> {
    let show = rational::fmt;
    let mut chain = Verdict::new(CHAIN);
    let mut collapse = Verdict::new(COLLAPSE);
    let mut rda = Verdict::new(RDA_MATCHES_DIRECTIONAL);
    for filter in Filter::ALL {
        let g = value_of(equilibria, Class::General, filter);
        let df = value_of(equilibria, Class::DepthFirst, filter);
        let dir = value_of(equilibria, Class::Directional, filter);
        let dv = d.get(filter);
        if let (Some(g), Some(df)) = (g, df) {
            chain.require(g <= df, || {
                format!(
                    "filter {filter}: general {} above depth-first {}",
                    show(g),
                    show(df)
                )
            });
        }
        if let (Some(df), Some(dir)) = (df, dir) {
            chain.require(df <= dir, || {
                format!(
                    "filter {filter}: depth-first {} above directional {}",
                    show(df),
                    show(dir)
                )
            });
            collapse.require(df == dir, || {
                format!(
                    "filter {filter}: depth-first {} but directional {}",
                    show(df),
                    show(dir)
                )
            });
        }
        if let Some(dir) = dir {
            chain.require(dir <= dv, || {
                format!(
                    "filter {filter}: directional {} above d {}",
                    show(dir),
                    show(dv)
                )
            });
            rda.require(dir == dv, || {
                format!(
                    "filter {filter}: directional {} but d {}",
                    show(dir),
                    show(dv)
                )
            });
        }
        if let Some(df) = df {
            collapse.require(df == dv, || {
                format!(
                    "filter {filter}: depth-first {} but d {}",
                    show(df),
                    show(dv)
                )
            });
        }
    }
    for class in Class::ALL {
        let vals: Vec<_> = Filter::ALL
            .iter()
            .map(|&f| value_of(equilibria, class, f))
            .collect();
        if let [Some(all), Some(zero), Some(one)] = vals[..] {
            let larger = zero.max(one);
            if class == Class::General {
                chain.require(all >= larger, || {
                    format!(
                        "general value {} below a root-value value {}",
                        show(all),
                        show(larger)
                    )
                });
            } else {
                collapse.require(all == larger, || {
                    format!(
                        "{class} value {} is not the larger of {} and {}",
                        show(all),
                        show(zero),
                        show(one)
                    )
                });
            }
        }
    }
    vec![chain, collapse, rda]
}

/// For a weakly balanced tree, the general value equals d. `None` unless the
/// tree is weakly balanced and the general whole-space value is present.
pub fn weak_balance_collapse_verdict(
    wb: &WeakBalanceVerdict,
    equilibria: &[Equilibrium],
    d: &DValues,
) -> Option<Verdict> {
    if !wb.balanced {
        return None;
    }
    let r = value_of(equilibria, Class::General, Filter::All)?;
    let mut v = Verdict::new(WEAKLY_BALANCED_COLLAPSE);
    v.require(*r == d.d, || {
        format!(
            "general value {} differs from d {}",
            rational::fmt(r),
            rational::fmt(&d.d)
        )
    });
    Some(v)
}

/// Depth-first and directional values equal d for every filter.
pub fn verify_collapse(tree: &Tree) -> Result<Verdict> {
    let mut equilibria = Vec::new();
    for class in [Class::DepthFirst, Class::Directional] {
        for filter in Filter::ALL {
            equilibria.push(equilibrium(tree, class, filter)?);
        }
    }
    let mut v = Verdict::new(COLLAPSE);
    for part in chain_verdicts(&equilibria, &d_values(tree)?) {
        v.absorb(part);
    }
    Ok(v)
}

/// The general value equals d on a weakly balanced tree.
pub fn verify_weakly_balanced_collapse(tree: &Tree) -> Result<Verdict> {
    let wb = is_weakly_balanced(tree)?;
    if !wb.balanced {
        return Err(Error::ShapeMismatch(format!(
            "{} is not weakly balanced",
            tree.render()
        )));
    }
    let equilibria = vec![equilibrium(tree, Class::General, Filter::All)?];
    Ok(
        weak_balance_collapse_verdict(&wb, &equilibria, &d_values(tree)?)
            .expect("balanced with a general value"),
    )
}

/// Mixing weights tried by the convexity probe.
pub fn probe_weights() -> Vec<Rational> {
    (0..=4).map(|i| ratio(i, 4)).collect()
}

/// Two optimal depth-first mixes and the worst case of their combinations.
#[derive(Debug, Clone)]
pub struct ConvexityProbe {
    pub value: Rational,
    pub first: RandomizedAlgorithm<GeneralAlgorithm>,
    pub second: RandomizedAlgorithm<GeneralAlgorithm>,
    pub distinct: bool,
    pub combinations: Vec<(Rational, Rational)>,
    pub verdict: Verdict,
}

/// Looks for two different depth-first mixes attaining the general value
/// and checks every tested combination of them attains it too. Requires the
/// general and depth-first values to agree.
pub fn probe_optimal_set_convexity(tree: &Tree) -> Result<ConvexityProbe> {
    let general = equilibrium(tree, Class::General, Filter::All)?;
    let df = equilibrium(tree, Class::DepthFirst, Filter::All)?;
    let r = general.value.clone();
    if df.value != r {
        return Err(Error::ShapeMismatch(format!(
            "general value {} differs from the depth-first value {}",
            rational::fmt(&r),
            rational::fmt(&df.value)
        )));
    }
    let dir = equilibrium(tree, Class::Directional, Filter::All)?;
    let mut candidates: Vec<RandomizedAlgorithm<GeneralAlgorithm>> = Vec::new();
    if let ClassSolution::Decision(s) = &df.solution {
        candidates.push(s.row_mix.clone());
    }
    if let ClassSolution::Directional(s) = &dir.solution {
        candidates.push(s.row_mix.map(Class::DepthFirst, |a| a.lower(tree))?);
    }
    let rda = build_joint_optimal_rda(tree)?
        .rda
        .expand(DEFAULT_EXPANSION_BOUND)?;
    candidates.push(rda.map(Class::DepthFirst, |a| a.lower(tree))?);
    let mut optimal = Vec::new();
    for c in candidates {
        if c.max_cost(tree, Filter::All)?.0 == r && !optimal.contains(&c) {
            optimal.push(c);
        }
    }
    let mut v = Verdict::new("optimal depth-first mixes are closed under mixing");
    v.require(!optimal.is_empty(), || {
        "no candidate attains the value".to_string()
    });
    let first = optimal
        .first()
        .cloned()
        .unwrap_or_else(|| match &df.solution {
            ClassSolution::Decision(s) => s.row_mix.clone(),
            ClassSolution::Directional(_) => {
                unreachable!("depth-first solutions are decision trees")
            }
        });
    let distinct = optimal.len() >= 2;
    v.require(distinct, || {
        "the probe found a single optimal mix".to_string()
    });
    let second = optimal.get(1).cloned().unwrap_or_else(|| first.clone());
    let mut combinations = Vec::new();
    for p in probe_weights() {
        let m = first.mix(&p, &second)?;
        let worst = m.max_cost(tree, Filter::All)?.0;
        v.require(worst == r && m.class() == Class::DepthFirst, || {
            format!(
                "weight {} gives worst case {}",
                rational::fmt(&p),
                rational::fmt(&worst)
            )
        });
        combinations.push((p, worst));
    }
    // An optimal mix is also a best response to the hard distribution.
    let hard = general.solution.col_mix();
    let best = min_cost(tree, Class::General, hard)?;
    for m in [&first, &second] {
        let c = m.cost_vs(tree, hard);
        v.require(c == best && !best.is_zero(), || {
            format!(
                "mix costs {} against the hard distribution, best is {}",
                rational::fmt(&c),
                rational::fmt(&best)
            )
        });
    }
    Ok(ConvexityProbe {
        value: r,
        first,
        second,
        distinct,
        combinations,
        verdict: v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yao_on_small_trees() {
        for text in ["*", "(and (or * *) (or * *))"] {
            let t = Tree::parse(text).unwrap();
            for class in [Class::DepthFirst, Class::Directional] {
                for filter in Filter::ALL {
                    let v = verify_yao(&t, class, filter).unwrap();
                    assert!(v.passed, "{text}: {v}");
                }
            }
        }
    }

    #[test]
    fn collapse_on_small_trees() {
        for text in [
            "*",
            "(and * *)",
            "(or * (and * *))",
            "(and (or * *) (or * *))",
        ] {
            let v = verify_collapse(&Tree::parse(text).unwrap()).unwrap();
            assert!(v.passed, "{text}: {v}");
        }
    }

    #[test]
    fn weakly_balanced_collapse() {
        for text in ["(and * *)", "(or * * *)", "(and (or * *) (or * *))"] {
            let v = verify_weakly_balanced_collapse(&Tree::parse(text).unwrap()).unwrap();
            assert!(v.passed, "{text}: {v}");
        }
    }

    #[test]
    fn convexity_probe_on_two_by_two() {
        let t = Tree::parse("(and (or * *) (or * *))").unwrap();
        let p = probe_optimal_set_convexity(&t).unwrap();
        assert!(p.verdict.passed, "{}", p.verdict);
        assert!(p.distinct);
        assert_eq!(p.combinations.len(), 5);
        assert_eq!(p.combinations[0].0, rational::zero());
        assert!(p.combinations.iter().all(|(_, w)| *w == p.value));
    }
}
