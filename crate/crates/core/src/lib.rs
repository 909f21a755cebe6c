pub mod assignment;
pub mod constructs;
pub mod error;
pub mod game;
pub mod rational;
pub mod rda_engine;
pub mod sexpr;
pub mod strategy;
pub mod suite;
pub mod tree;
pub mod verdict;

pub use assignment::{Assignment, AssignmentDistribution, Filter, TType};
pub use error::{Error, Result};
pub use rational::Rational;
pub use tree::{parse_tree, Gate, NodePath, Shape, Tree};
pub use verdict::Verdict;
