pub mod algebra;
pub mod cache;
pub mod config;
pub mod engine;
pub mod graphs;
pub mod hodge;
pub mod lefschetz;
pub mod relations;

pub use engine::{Engine, EngineError};
