pub mod caratheodory;
pub mod conformal;
pub mod domains;
pub mod error;
pub mod export;
pub mod geometry;
pub mod grid;
pub mod kobayashi;
pub(crate) mod paths;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};
