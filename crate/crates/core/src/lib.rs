// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ctrw;
pub mod diffusion;
pub mod error;
pub mod field;
pub mod fourier;
pub mod legendre;
pub mod params;
pub mod quad;
pub mod specfun;
pub mod spectral;
pub mod subordination;
pub mod transport;
pub mod validation;

pub use error::{Error, Result};
pub use params::MediumParams;
