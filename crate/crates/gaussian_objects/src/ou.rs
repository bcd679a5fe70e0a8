//! Ornstein-Uhlenbeck processes `dẑ(k) = -k² ẑ(k) dt + q_k dW(k)`, sampled
//! exactly in distribution.

use serde::{Deserialize, Serialize};
use spectral_core::{Complex, Real, SpectralField};

use crate::noise::NoiseStream;
use crate::GaussianError;

#[derive(Clone, Debug, PartialEq)]
pub struct OUSpec<T> {
    /// Nominal roughness: `q_k ≍ |k|^γ`.
    pub gamma: f64,
    spectrum: Vec<T>,
    initial: Option<SpectralField<T>>,
}

impl<T: Real> OUSpec<T> {
    /// `q_k = |k|^γ` for `k = 1..=cutoff`.
    pub fn power(gamma: f64, cutoff: usize) -> Self {
        Self {
            gamma,
            spectrum: (1..=cutoff)
                .map(|k| T::lit((k as f64).powf(gamma)))
                .collect(),
            initial: None,
        }
    }

    /// `q_k = ψ(k/K)|k|^γ`.
    pub fn regularized(gamma: f64, cutoff: usize, psi: Regularization) -> Self {
        Self {
            gamma,
            spectrum: (1..=cutoff)
                .map(|k| T::lit((k as f64).powf(gamma) * psi.weight(k, cutoff)))
                .collect(),
            initial: None,
        }
    }

    /// Arbitrary nonnegative spectrum (zero entries switch the noise off).
    pub fn with_spectrum(gamma: f64, spectrum: Vec<T>) -> Result<Self, GaussianError> {
        if spectrum.is_empty() {
            return Err(GaussianError::Spectral(
                spectral_core::SpectralError::EmptyField,
            ));
        }
        if let Some(i) = spectrum
            .iter()
            .position(|q| !(q.is_finite() && *q >= T::zero()))
        {
            return Err(GaussianError::NegativeSpectrum { k: i + 1 });
        }
        Ok(Self {
            gamma,
            spectrum,
            initial: None,
        })
    }

    pub fn with_initial(mut self, z0: SpectralField<T>) -> Result<Self, GaussianError> {
        if z0.cutoff() != self.cutoff() {
            return Err(GaussianError::Spectral(
                spectral_core::SpectralError::CutoffMismatch {
                    left: z0.cutoff(),
                    right: self.cutoff(),
                },
            ));
        }
        self.initial = Some(z0);
        Ok(self)
    }

    pub fn cutoff(&self) -> usize {
        self.spectrum.len()
    }

    pub fn q(&self, k: usize) -> T {
        self.spectrum[k - 1]
    }

    pub fn spectrum(&self) -> &[T] {
        &self.spectrum
    }

    pub fn initial(&self) -> SpectralField<T> {
        self.initial
            .clone()
            .unwrap_or_else(|| SpectralField::zeros(self.cutoff()))
    }
}

/// Fourier regularization of the noise at cutoff `K`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularization {
    /// Plain truncation `ψ = 1_{|k| ≤ K}`.
    #[default]
    Sharp,
    /// Gaussian bump `ψ(k/K) = exp(-(3k/K)²/2)`.
    Gaussian,
}

impl Regularization {
    pub fn weight(self, k: usize, cutoff: usize) -> f64 {
        match self {
            Self::Sharp => 1.0,
            Self::Gaussian => {
                let x = 3.0 * k as f64 / cutoff as f64;
                (-0.5 * x * x).exp()
            }
        }
    }
}

/// Where an increment's draws live in the noise space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseAddress {
    pub stream: NoiseStream,
    pub level: u32,
    pub step: u64,
}

/// `σ_k(h)² = (1 - e^{-2k²h}) / (2k²)`, the variance a unit-amplitude mode
/// accumulates over time `h`.
pub fn ou_step_variance(k: usize, h: f64) -> f64 {
    let k2 = (k * k) as f64;
    -(-2.0 * k2 * h).exp_m1() / (2.0 * k2)
}

/// Exact one-step transition factors for a fixed step `h`.
#[derive(Clone, Debug)]
pub struct OuPropagator<T> {
    pub h: f64,
    decay: Vec<T>,
    sigma: Vec<T>,
}

impl<T: Real> OuPropagator<T> {
    pub fn new(cutoff: usize, h: f64) -> Self {
        Self {
            h,
            decay: (1..=cutoff)
                .map(|k| T::lit((-((k * k) as f64) * h).exp()))
                .collect(),
            sigma: (1..=cutoff)
                .map(|k| T::lit(ou_step_variance(k, h).sqrt()))
                .collect(),
        }
    }

    pub fn decay(&self) -> &[T] {
        &self.decay
    }

    /// Stochastic-convolution increment over a coarse step made of
    /// `substeps` fine steps of length `h`, written into `out`.
    ///
    /// Fine draws sit at step indices `coarse·substeps + j`, so runs with
    /// different `substeps` share one Brownian path.
    pub fn increment(
        &self,
        q: &[T],
        addr: NoiseAddress,
        substeps: u64,
        scratch: &mut Vec<Complex<f64>>,
        out: &mut SpectralField<T>,
    ) {
        let k_max = out.cutoff();
        scratch.resize(k_max, Complex::new(0.0, 0.0));
        for c in out.coeffs_mut() {
            *c = Complex::new(T::zero(), T::zero());
        }
        for j in 0..substeps {
            addr.stream
                .fill(addr.level, addr.step * substeps + j, scratch);
            for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
                let a = q[i] * self.sigma[i];
                let xi = scratch[i];
                *c = *c * self.decay[i] + Complex::new(a * T::lit(xi.re), a * T::lit(xi.im));
            }
        }
    }
}

/// `c_k ← e^{-k²dt} c_k + q_k σ_k(dt) ξ_k`, the exact transition law.
pub fn ou_step<T: Real>(
    state: &SpectralField<T>,
    spec: &OUSpec<T>,
    dt: f64,
    noise: NoiseAddress,
) -> SpectralField<T> {
    assert!(dt > 0.0, "dt must be positive");
    let prop = OuPropagator::new(spec.cutoff(), dt);
    let mut inc = SpectralField::zeros(spec.cutoff());
    prop.increment(spec.spectrum(), noise, 1, &mut Vec::new(), &mut inc);
    let mut next = state.clone();
    for (i, c) in next.coeffs_mut().iter_mut().enumerate() {
        *c = *c * prop.decay[i];
    }
    next += &inc;
    next
}

/// A draw of `ẑ_t` from the spec's initial condition in one exact step.
pub fn ou_sample<T: Real>(spec: &OUSpec<T>, t: f64, noise: NoiseAddress) -> SpectralField<T> {
    ou_step(&spec.initial(), spec, t, noise).with_time_tag(T::lit(t))
}

/// `E[ẑ_s(k) conj(ẑ_t(k))] = q_k² (e^{-k²|t-s|} - e^{-k²(t+s)}) / (2k²)`
/// for the zero initial condition.
pub fn ou_covariance_oracle<T: Real>(spec: &OUSpec<T>, k: usize, s: f64, t: f64) -> f64 {
    let k2 = (k * k) as f64;
    let q2 = spec.q(k).as_f64().powi(2);
    q2 * ((-k2 * (t - s).abs()).exp() - (-k2 * (t + s)).exp()) / (2.0 * k2)
}

/// `E|ẑ_t(k) - ẑ_s(k)|²` for the zero initial condition.
pub fn ou_increment_variance_oracle<T: Real>(spec: &OUSpec<T>, k: usize, s: f64, t: f64) -> f64 {
    ou_covariance_oracle(spec, k, t, t) + ou_covariance_oracle(spec, k, s, s)
        - 2.0 * ou_covariance_oracle(spec, k, s, t)
}

/// `E[z_t(x)²] = Σ_{0<|k|≤K} q_k² (1 - e^{-2k²t}) / (2k²)`; `t = ∞` allowed.
pub fn wick_constant<T: Real>(spec: &OUSpec<T>, t: f64) -> f64 {
    (1..=spec.cutoff())
        .map(|k| 2.0 * spec.q(k).as_f64().powi(2) * ou_step_variance(k, t))
        .sum()
}
