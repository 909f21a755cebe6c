//! Equilibrium reports and the verification suites built on them.

pub mod balance;
pub mod corpus;
pub mod equilibrium;
pub mod random;
pub mod seeded;
pub mod verify;

pub use balance::{is_weakly_balanced, root_value_complexities, PairCheck, WeakBalanceVerdict};
pub use corpus::{corpus, verify_corpus, verify_tree, CorpusEntry, CorpusReport, CorpusSpec};
pub use equilibrium::{analyze, equilibrium, Equilibrium, EquilibriumReport, Weighted};
pub use random::random_tree;
pub use seeded::{
    chimera_suite, instance_pool, mixture_suite, product_bound_suite, replacement_suite,
    SuiteOutcome,
};
pub use verify::{
    probe_optimal_set_convexity, verify_collapse, verify_weakly_balanced_collapse, verify_yao,
    ConvexityProbe,
};
