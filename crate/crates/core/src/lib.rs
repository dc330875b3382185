#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod eigen;
pub mod error;
pub mod export;
pub mod geometry;
pub mod gf2;
pub mod homology;
pub mod operator;
pub mod report;
pub mod scenarios;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
