//! Deterministic algorithms as Boolean decision trees over the leaves.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sexpr::{self, syntax_error, SExpr};
use crate::tree::Tree;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decision {
    /// The root value is determined.
    Done(bool),
    Query {
        leaf: usize,
        on0: Arc<Decision>,
        on1: Arc<Decision>,
    },
}

/// A decision tree that only queries live leaves and stops as soon as the
/// root value is known. Distinct trees of this form have distinct behavior.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneralAlgorithm {
    root: Arc<Decision>,
}

impl GeneralAlgorithm {
    pub fn new(root: Arc<Decision>) -> Self {
        GeneralAlgorithm { root }
    }

    pub fn root(&self) -> &Decision {
        &self.root
    }

    /// Builds the decision tree that queries `policy(known, vals)` in every
    /// undetermined state.
    pub fn from_policy(tree: &Tree, mut policy: impl FnMut(u64, u64) -> usize) -> Self {
        fn build(
            tree: &Tree,
            known: u64,
            vals: u64,
            policy: &mut impl FnMut(u64, u64) -> usize,
        ) -> Arc<Decision> {
            if let Some(v) = tree.statuses(known, vals)[0] {
                return Arc::new(Decision::Done(v));
            }
            let leaf = policy(known, vals);
            let bit = 1u64 << leaf;
            let on0 = build(tree, known | bit, vals, policy);
            let on1 = build(tree, known | bit, vals | bit, policy);
            Arc::new(Decision::Query { leaf, on0, on1 })
        }
        GeneralAlgorithm {
            root: build(tree, 0, 0, &mut policy),
        }
    }

    pub fn probe_bits(&self, bits: u64) -> Vec<usize> {
        let mut probes = Vec::new();
        let mut node = &*self.root;
        while let Decision::Query { leaf, on0, on1 } = node {
            probes.push(*leaf);
            node = if bits >> leaf & 1 == 1 { on1 } else { on0 };
        }
        probes
    }

    pub fn cost_bits(&self, bits: u64) -> u32 {
        let mut cost = 0;
        let mut node = &*self.root;
        while let Decision::Query { leaf, on0, on1 } = node {
            cost += 1;
            node = if bits >> leaf & 1 == 1 { on1 } else { on0 };
        }
        cost
    }

    pub fn output_bits(&self, bits: u64) -> bool {
        let mut node = &*self.root;
        loop {
            match node {
                Decision::Done(v) => return *v,
                Decision::Query { leaf, on0, on1 } => {
                    node = if bits >> leaf & 1 == 1 { on1 } else { on0 };
                }
            }
        }
    }

    /// Number of query nodes.
    pub fn size(&self) -> usize {
        fn count(d: &Decision) -> usize {
            match d {
                Decision::Done(_) => 0,
                Decision::Query { on0, on1, .. } => 1 + count(on0) + count(on1),
            }
        }
        count(&self.root)
    }

    /// Visits every query node with the partial assignment reaching it.
    fn visit(&self, mut f: impl FnMut(u64, u64, &Decision) -> bool) -> bool {
        fn walk(
            d: &Decision,
            known: u64,
            vals: u64,
            f: &mut impl FnMut(u64, u64, &Decision) -> bool,
        ) -> bool {
            if !f(known, vals, d) {
                return false;
            }
            match d {
                Decision::Done(_) => true,
                Decision::Query { leaf, on0, on1 } => {
                    let bit = 1u64 << leaf;
                    walk(on0, known | bit, vals, f) && walk(on1, known | bit, vals | bit, f)
                }
            }
        }
        walk(&self.root, 0, 0, &mut f)
    }

    /// Checks pruning discipline, completeness and correctness.
    pub fn validate(&self, tree: &Tree) -> Result<()> {
        let n = tree.leaf_count();
        let mut problem = None;
        self.visit(|known, vals, d| {
            let status = tree.statuses(known, vals)[0];
            let err = match d {
                Decision::Done(v) => match status {
                    Some(s) if s == *v => None,
                    Some(_) => Some("wrong output".to_string()),
                    None => Some("stops before the root value is determined".to_string()),
                },
                Decision::Query { leaf, .. } => {
                    if *leaf >= n {
                        Some(format!("leaf {} does not exist", leaf + 1))
                    } else if status.is_some() {
                        Some("queries after the root value is determined".to_string())
                    } else if tree.live_leaves(known, vals) >> leaf & 1 == 0 {
                        Some(format!("queries leaf {} which is not live", leaf + 1))
                    } else {
                        None
                    }
                }
            };
            if let Some(e) = err {
                problem = Some(e);
                return false;
            }
            true
        });
        match problem {
            Some(e) => Err(Error::InvalidAlgorithm(e)),
            None => Ok(()),
        }
    }

    pub fn is_depth_first(&self, tree: &Tree) -> bool {
        self.validate(tree).is_ok()
            && self.visit(|known, vals, d| match d {
                Decision::Done(_) => true,
                Decision::Query { leaf, .. } => {
                    tree.depth_first_candidates(known, vals) >> leaf & 1 == 1
                }
            })
    }

    /// Depth-first, and every query goes to the first live leaf of one fixed
    /// priority order. Such an order exists iff the relation "queried before
    /// another live leaf" is acyclic.
    pub fn is_directional(&self, tree: &Tree) -> bool {
        if !self.is_depth_first(tree) {
            return false;
        }
        let n = tree.leaf_count();
        let mut before = vec![0u64; n];
        self.visit(|known, vals, d| {
            if let Decision::Query { leaf, .. } = d {
                before[*leaf] |= tree.live_leaves(known, vals) & !(1u64 << leaf);
            }
            true
        });
        priority_from_precedence(&before).is_some()
    }

    pub fn encode(&self) -> String {
        fn enc(d: &Decision, out: &mut String) {
            match d {
                Decision::Done(v) => out.push_str(if *v { "(done 1)" } else { "(done 0)" }),
                Decision::Query { leaf, on0, on1 } => {
                    out.push_str(&format!("(query {} (on0 ", leaf + 1));
                    enc(on0, out);
                    out.push_str(") (on1 ");
                    enc(on1, out);
                    out.push_str("))");
                }
            }
        }
        let mut out = String::new();
        enc(&self.root, &mut out);
        out
    }

    pub fn decode(text: &str, tree: &Tree) -> Result<Self> {
        fn dec(e: &SExpr) -> Result<Arc<Decision>> {
            let bad = |m: &str| syntax_error(e.pos(), m.to_string());
            let (head, rest) = e
                .as_form()
                .ok_or_else(|| bad("expected (query ...) or (done ...)"))?;
            match (head, rest) {
                ("done", [v]) => match v.as_atom() {
                    Some("0") => Ok(Arc::new(Decision::Done(false))),
                    Some("1") => Ok(Arc::new(Decision::Done(true))),
                    _ => Err(bad("done takes 0 or 1")),
                },
                ("query", [leaf, b0, b1]) => {
                    let leaf: usize = leaf
                        .as_atom()
                        .and_then(|a| a.parse().ok())
                        .filter(|&l| l >= 1)
                        .ok_or_else(|| bad("expected a 1-based leaf number"))?;
                    let branch = |b: &SExpr, name: &str| -> Result<Arc<Decision>> {
                        match b.as_form() {
                            Some((h, [inner])) if h == name => dec(inner),
                            _ => Err(syntax_error(b.pos(), format!("expected ({name} ...)"))),
                        }
                    };
                    Ok(Arc::new(Decision::Query {
                        leaf: leaf - 1,
                        on0: branch(b0, "on0")?,
                        on1: branch(b1, "on1")?,
                    }))
                }
                _ => Err(bad("expected (query leaf (on0 ...) (on1 ...)) or (done v)")),
            }
        }
        let alg = GeneralAlgorithm {
            root: dec(&sexpr::parse_one(text)?)?,
        };
        alg.validate(tree)?;
        Ok(alg)
    }
}

impl fmt::Display for GeneralAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Topological order of leaves where `before[l]` holds the leaves that must
/// come after `l`; `None` on a cycle. Ties go to the smallest leaf.
pub(crate) fn priority_from_precedence(before: &[u64]) -> Option<Vec<usize>> {
    let n = before.len();
    let mut indegree = vec![0usize; n];
    for succ in before {
        for (m, d) in indegree.iter_mut().enumerate() {
            if succ >> m & 1 == 1 {
                *d += 1;
            }
        }
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let l = (0..n).find(|&l| !placed[l] && indegree[l] == 0)?;
        placed[l] = true;
        order.push(l);
        for (m, d) in indegree.iter_mut().enumerate() {
            if before[l] >> m & 1 == 1 {
                *d -= 1;
            }
        }
    }
    Some(order)
}
