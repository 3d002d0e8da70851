#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod lorentz;
pub mod refinement;
pub mod sharpness;
pub mod xray;

pub use error::{Error, Result};
