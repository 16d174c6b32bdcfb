pub mod config;
pub mod density;
pub mod dilog;
pub mod error;
pub mod hypgeom;
pub mod montecarlo;
pub mod output;
pub mod polygon;
pub mod quad;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
