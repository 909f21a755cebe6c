//! Jointly optimal randomized directional algorithms and subtree replacement.

pub mod joint;
pub mod replacement;

pub use joint::{build_joint_optimal_rda, d_values, DValues, JointOptimal, MAX_JOINT_ARITY};
pub use replacement::{
    check_cost_decomposition, check_improvement, check_order_invariance, check_sibling_masses,
    equivalence_probability, event_holds, event_probability, filtered_child_mass,
    replace_closed_form, replace_in_algorithm, replace_subalgorithm, EquivClassKey,
};
