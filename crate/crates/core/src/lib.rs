#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod assumptions;
pub mod cli;
pub mod conformal;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod inequalities;
pub mod jet;
pub mod levelset;
pub mod models;
pub mod numerics;
pub mod odegen;
pub mod report;

pub use error::{Error, Result};
