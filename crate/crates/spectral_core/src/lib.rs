//! Spectral representation of real, mean-zero fields on the torus `[0, 2π]`:
//! diagonal operators, dealiased products, Bony splitting, Littlewood-Paley
//! blocks and Besov-Hölder exponent estimation.

pub mod besov;
pub mod bony;
mod error;
pub mod field;
pub mod fit;
pub mod grid;
pub mod io;
pub mod partition;
mod real;

pub use besov::{
    band_blocks, besov_exponent_fit, block_l2_norms, block_norms, block_statistic, BlockStatistic,
    RegularityFit,
};
pub use bony::{bony_decompose, resonant_product, BonyParts};
pub use error::{Result, SpectralError};
pub use field::{symbol, DeathState, FieldPath, FieldState, SpectralField};
pub use fit::{linear_fit, power_law_fit, LinearFit};
pub use grid::{pointwise_product, SpectralGrid};
pub use num_complex::Complex;
pub use partition::{DyadicPartition, PartitionMode};
pub use real::Real;

pub type SpectralField64 = SpectralField<f64>;
pub type SpectralField32 = SpectralField<f32>;
pub type FieldPath64 = FieldPath<f64>;
pub type FieldState64 = FieldState<f64>;
pub type SpectralGrid64 = SpectralGrid<f64>;
