//! Exact-arithmetic engine for stratifications of de Rham prismatic crystals over a totally ramified extension of ℚ_p.
#![allow(clippy::needless_range_loop)]
pub mod coefficients;
pub mod error;
pub mod matrix;

pub use error::{Error, Result};
pub mod par;
pub mod rings;
pub mod cosimplicial;
pub mod stratification;
pub mod closedform;
pub mod cohomology;
pub mod sen;
