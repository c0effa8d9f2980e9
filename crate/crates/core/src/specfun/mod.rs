//! Special functions: Mittag-Leffler, M-Wright, one-sided stable densities.

pub mod gamma;
mod mittag_leffler;
mod mwright;
mod stable;

pub use mittag_leffler::{mittag_leffler, mittag_leffler_real, mittag_leffler_with, MlConfig};
pub use mwright::m_wright;
pub use stable::{stable_density, stable_density_half, talbot_inverse};
