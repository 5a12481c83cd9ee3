pub mod adversary;
pub mod detect;
pub mod error;
pub mod game;
pub mod graph;
pub mod harness;
pub mod lowerbound;
pub mod seed;
pub mod sizes;

pub use error::{Error, Result};
