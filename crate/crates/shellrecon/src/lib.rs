//! Spectral Neumann-to-Dirichlet maps for concentric core-shell Schrödinger
//! problems, coefficient recovery from one boundary measurement, and
//! construction of indistinguishable configurations.

pub mod cross_products;
pub mod error;
pub mod forward;
pub mod inverse;
pub mod nd_map;
pub mod oracle;
mod quadrature;
pub mod special_fn;

pub use error::{Error, Result};
pub use nd_map::{Dimension, ShellConfig};
