//! Gowers uniformity norms for finite complex measures on the torus, computed
//! entirely in frequency space.
//!
//! A measure never appears as a sample grid here; it is a coefficient oracle
//! `xi -> mu_hat(xi)`. Difference towers, norms and inner products are built
//! by truncating the lattice to a box `{-M..M}^d` per block and cross-correlating
//! coefficient slices. A brute-force oracle on `Z_N^d` provides the independent
//! cross-check for everything the tower computes.

pub mod bench;
pub mod corr;
pub mod delta;
pub mod discrete;
pub mod error;
pub mod freq;
pub mod measure;
pub mod mollify;
pub mod sum;
pub mod verify;

pub use corr::{cross_correlate, Backend};
pub use delta::{build_tower, inner_product, tail_report, uk_norm, DeltaTower, NormReport};
pub use error::{Budget, Error, Result};
pub use freq::{plancherel_mass, FreqBox, SpectralTensor};
pub use measure::{embed_tensor, CoeffOracle, MeasureSpec};

/// Complex scalar used throughout: all coefficient arithmetic is f64.
pub type C64 = num_complex::Complex64;

/// Options threaded through tower construction and checks.
#[derive(Debug, Clone, Copy)]
pub struct EngineOpts {
    pub backend: Backend,
    pub budget: Budget,
}

impl Default for EngineOpts {
    fn default() -> Self {
        EngineOpts { backend: Backend::Auto, budget: Budget::default() }
    }
}
