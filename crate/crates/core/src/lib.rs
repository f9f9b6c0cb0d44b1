//! Exact combinatorics of Iwahori-Weyl groups with a Frobenius twist.

pub mod admissible;
pub mod classes;
pub mod cli;
pub mod error;
pub mod frobenius;
pub mod mazur;
pub mod report;
pub mod rootdata;
pub mod weyl;

pub use error::{Error, Result};
