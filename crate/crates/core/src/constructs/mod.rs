//! Product mixtures, hard distribution families and chimera algorithms.

pub mod checks;
pub mod chimera;
pub mod family;
pub mod sdelta;

pub use checks::{check_posterior_invariance, check_product_lower_bound, product_of};
pub use chimera::{
    alpha_joint_probability, build_chimera, check_chimera_inequality, check_chimera_properties,
    chimera_costs, visit_sequence, Chimera, ChimeraCosts,
};
pub use family::{
    build_optimal_family, check_conditional_split, check_sprime_decomposition, child_conditionals,
    verify_optimal_family, ChildConditionals, OptimalFamily,
};
pub use sdelta::{
    check_sdelta_dominance, extract_delta, join_children, make_sdelta, total_mass,
    DepthOneDistribution, ProductMixture, SubtreeDistributionFamily,
};
