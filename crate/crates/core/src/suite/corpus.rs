//! Exhaustive small-tree corpus and its parallel verification.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::assignment::Filter;
use crate::error::{Error, Result};
use crate::strategy::randomized::Class;
use crate::suite::equilibrium::{analyze, EquilibriumReport};
use crate::tree::{Shape, Tree};
use crate::verdict::Verdict;

/// Bounds for corpus enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSpec {
    pub max_leaves: usize,
    pub max_depth: usize,
    pub arities: &'static [usize],
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            max_leaves: 6,
            max_depth: 3,
            arities: &[2, 3],
        }
    }
}

impl CorpusSpec {
    pub fn with_max_leaves(max_leaves: usize) -> Self {
        CorpusSpec {
            max_leaves,
            ..CorpusSpec::default()
        }
    }
}

/// Every tree within the bounds up to sibling order, with both gates at every
/// internal node, sorted by leaf count and then canonical form.
pub fn corpus(spec: &CorpusSpec) -> Vec<Tree> {
    // shapes[d][n]: canonical forms of height <= d with n leaves.
    let mut by_key: BTreeMap<(usize, String), Shape> = BTreeMap::new();
    let table = shapes(spec);
    for (n, list) in table[spec.max_depth].iter().enumerate() {
        for (key, shape) in list {
            by_key
                .entry((n, key.clone()))
                .or_insert_with(|| shape.clone());
        }
    }
    by_key
        .into_values()
        .map(|s| Tree::from_shape(&s).expect("generated shapes are valid"))
        .collect()
}

type Table = Vec<Vec<Vec<(String, Shape)>>>;

fn shapes(spec: &CorpusSpec) -> Table {
    let max = spec.max_leaves;
    let mut table: Table = Vec::new();
    for depth in 0..=spec.max_depth {
        let mut row: Vec<Vec<(String, Shape)>> = vec![Vec::new(); max + 1];
        if max >= 1 {
            row[1].push(("*".to_string(), Shape::leaf()));
        }
        if depth > 0 {
            let below = &table[depth - 1];
            let pool: Vec<(usize, &(String, Shape))> = (1..=max)
                .flat_map(|n| below[n].iter().map(move |e| (n, e)))
                .collect();
            for &arity in spec.arities {
                // Children as nondecreasing index sequences into `pool`.
                let mut stack: Vec<usize> = Vec::new();
                multisets(&pool, arity, max, 0, 0, &mut stack, &mut |picked| {
                    let n: usize = picked.iter().map(|&i| pool[i].0).sum();
                    let mut keys: Vec<&str> =
                        picked.iter().map(|&i| pool[i].1 .0.as_str()).collect();
                    keys.sort_unstable();
                    let children: Vec<Shape> =
                        picked.iter().map(|&i| pool[i].1 .1.clone()).collect();
                    for (gate, shape) in [
                        ("and", Shape::and(children.clone())),
                        ("or", Shape::or(children)),
                    ] {
                        row[n].push((format!("({gate} {})", keys.join(" ")), shape));
                    }
                });
            }
            for list in &mut row {
                list.sort_by(|a, b| a.0.cmp(&b.0));
                list.dedup_by(|a, b| a.0 == b.0);
            }
        }
        table.push(row);
    }
    table
}

fn multisets(
    pool: &[(usize, &(String, Shape))],
    arity: usize,
    budget: usize,
    start: usize,
    used: usize,
    stack: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if stack.len() == arity {
        emit(stack);
        return;
    }
    let remaining = arity - stack.len() - 1;
    for i in start..pool.len() {
        let n = pool[i].0;
        if used + n + remaining > budget {
            continue;
        }
        stack.push(i);
        multisets(pool, arity, budget, i, used + n, stack, emit);
        stack.pop();
    }
}

/// Verdicts for one corpus tree.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusEntry {
    pub tree: String,
    pub leaves: usize,
    pub weakly_balanced: bool,
    pub passed: bool,
    pub verdicts: Vec<Verdict>,
    #[serde(skip)]
    pub report: Option<EquilibriumReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusReport {
    pub trees: usize,
    pub weakly_balanced: usize,
    pub passed: bool,
    pub failures: Vec<String>,
    pub entries: Vec<CorpusEntry>,
}

impl CorpusReport {
    /// Verdicts with `name` across the corpus, folded into one.
    pub fn combined(&self, name: &str) -> Verdict {
        let mut v = Verdict::new(name);
        for e in &self.entries {
            for x in e
                .verdicts
                .iter()
                .filter(|x| x.name == name || x.name.starts_with(&format!("{name} ")))
            {
                let mut x = x.clone();
                x.name = format!("{} {}", e.tree, x.name);
                v.absorb(x);
            }
        }
        v
    }
}

pub fn verify_tree(tree: &Tree) -> Result<CorpusEntry> {
    let report = analyze(tree, &Class::ALL, &Filter::ALL)?;
    Ok(CorpusEntry {
        tree: report.tree.clone(),
        leaves: report.leaves,
        weakly_balanced: report.weak_balance.as_ref().is_some_and(|w| w.balanced),
        passed: report.passed,
        verdicts: report.verdicts.clone(),
        report: Some(report),
    })
}

/// Analyzes every corpus tree on `jobs` threads (all cores when `None`).
/// Entries keep corpus order whatever the thread count.
pub fn verify_corpus(spec: &CorpusSpec, jobs: Option<usize>) -> Result<CorpusReport> {
    let trees = corpus(spec);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidAlgorithm(format!("thread pool: {e}")))?;
    let entries = pool.install(|| {
        trees
            .par_iter()
            .map(verify_tree)
            .collect::<Result<Vec<_>>>()
    })?;
    let failures: Vec<String> = entries
        .iter()
        .filter(|e| !e.passed)
        .map(|e| e.tree.clone())
        .collect();
    Ok(CorpusReport {
        trees: entries.len(),
        weakly_balanced: entries.iter().filter(|e| e.weakly_balanced).count(),
        passed: failures.is_empty(),
        failures,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_corpus_counts() {
        // One leaf; two gates over two leaves; over three leaves two flat
        // trees and four nested ones.
        let sizes: Vec<usize> = (1..=3)
            .map(|n| corpus(&CorpusSpec::with_max_leaves(n)).len())
            .collect();
        assert_eq!(sizes, vec![1, 3, 9]);
    }

    #[test]
    fn corpus_is_deduplicated_and_bounded() {
        let spec = CorpusSpec::default();
        let trees = corpus(&spec);
        let mut keys: Vec<String> = trees.iter().map(|t| t.canonical_key()).collect();
        let n = keys.len();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), n);
        assert!(trees.iter().all(|t| t.leaf_count() <= 6 && t.height() <= 3));
        assert!(trees.iter().any(|t| t.leaf_count() == 6 && t.height() == 3));
    }

    #[test]
    fn parallel_order_is_stable() {
        let spec = CorpusSpec::with_max_leaves(3);
        let a = verify_corpus(&spec, Some(1)).unwrap();
        let b = verify_corpus(&spec, Some(3)).unwrap();
        assert!(a.passed);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
