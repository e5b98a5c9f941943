//! Local similarity groups on word spaces and finite ultrametric spaces.

pub mod error;
pub mod freeness;
pub mod group;
pub mod perm;
pub mod poset;
pub mod sample;
pub mod simstruct;
pub mod ultrametric;

pub use error::{Error, Result};
