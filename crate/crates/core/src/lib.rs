pub mod base;
pub mod error;
pub mod exact;
pub mod fibration;
pub mod geometry;
pub mod poset;
pub mod rep;
pub mod sample;
pub mod strategy;
pub mod total;

pub use error::{Error, Result};
