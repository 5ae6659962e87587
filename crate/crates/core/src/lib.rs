pub mod acceptance;
pub mod domain;
pub mod error;
pub mod homogeneous;
pub mod incremental;
pub mod ode;
mod roots;
pub mod scenario;
pub mod shear1d;
pub mod softening;
pub mod tensor;

pub use error::{Error, Result};
