//! Gaussian building blocks for the stochastic Burgers toolkit: exact OU
//! sampling driven by counter-addressed noise, Wick squares, `J(z)` and
//! resonant products, and closed-form second-moment oracles.

pub mod chaos;
pub mod moments;
mod noise;
pub mod ou;

pub use chaos::{
    b_nonlinearity, chaos_decay, convolution_sum_bruteforce, j_convolve, sample_jz,
    sample_jz_circ_z, wick2_oracle, wick_square, ChaosKind, ChaosParams, DecaySpec, Etd1, SumMode,
    WickSquare,
};
pub use moments::{mean_stderr, write_moments_csv, MomentRow};
pub use noise::{NoiseStream, StreamId, REMAINDER_LEVEL};
pub use ou::{
    ou_covariance_oracle, ou_increment_variance_oracle, ou_sample, ou_step, ou_step_variance,
    wick_constant, NoiseAddress, OUSpec, OuPropagator, Regularization,
};

#[derive(Debug, thiserror::Error)]
pub enum GaussianError {
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
    #[error("noise amplitude at k = {k} is negative or not finite")]
    NegativeSpectrum { k: usize },
    #[error("{kind} is outside its existence range: requires {condition}")]
    OutOfRegime {
        kind: &'static str,
        condition: String,
    },
    #[error("time grid is not uniform")]
    NonUniformGrid,
    #[error("path is dead from t = {time}")]
    DeadNode { time: f64 },
}

pub type OUSpec64 = OUSpec<f64>;
pub type Etd1_64 = Etd1<f64>;
pub type WickSquare64 = WickSquare<f64>;
