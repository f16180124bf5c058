pub mod error;
pub mod exact;
pub mod mub;
pub mod restriction;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
