pub mod cli;
pub mod convolutions;
pub mod error;
pub mod measures;
pub mod quad;
pub mod risk;
pub mod ruin;
pub mod rng;
pub mod stats;
pub mod walks;
pub mod williamson;
