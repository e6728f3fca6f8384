pub mod analytic;
pub mod counting;
pub mod eig;
pub mod error;
pub mod geom;
pub mod fem;
pub mod mesh;
pub mod specfun;

pub use error::{Error, Result};
