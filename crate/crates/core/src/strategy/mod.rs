pub mod decision;
pub mod directional;
pub mod enumerate;
pub mod randomized;
pub mod rda;

pub use decision::{Decision, GeneralAlgorithm};
pub use directional::{permutations, DirectionalAlgorithm};
pub use enumerate::{
    count_depth_first, count_directional, count_general, enumerate_depth_first,
    enumerate_directional, enumerate_general, Limits,
};
pub use randomized::{Class, DirectionalMix, PureAlgorithm, RandomizedAlgorithm};
pub use rda::{is_rda_expressible, Rda};
