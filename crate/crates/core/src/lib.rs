pub mod circle;
pub mod classify;
pub mod cocycle;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod runner;
pub mod splitting;

pub use error::{Error, Result};
