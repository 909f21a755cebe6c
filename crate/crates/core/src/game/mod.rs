pub mod best_response;
pub mod double_oracle;
pub mod lp;
pub mod matrix;

pub use best_response::{
    best_response_depth_first, best_response_directional, best_response_general, min_cost,
};
pub use double_oracle::{double_oracle, double_oracle_with, full_lp, ClassSolution};
pub use lp::{solve_matrix, LpSolution};
pub use matrix::{read_csv, solve_zero_sum, GameSolution, MatrixGame};
