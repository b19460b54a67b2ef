//! Rough-surface topography as a statistical ensemble in phase space.

pub mod energetics;
pub mod error;
pub mod phasespace;
pub mod scatter;
pub mod statistics;
pub mod surface;
pub mod synthesis;

pub use error::{Error, Result};
