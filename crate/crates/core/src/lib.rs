//! Finite approximations of homogeneous structures, their automorphism
//! groups, and consistent random orderings over them.

pub mod builder;
pub mod cro;
pub mod error;
pub mod format;
pub mod group;
pub mod sampler;
pub mod search;
pub mod stats;
pub mod structure;
pub mod tau_path;

pub use error::{Error, Result};
