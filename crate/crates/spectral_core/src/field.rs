//! Truncated Fourier representation of real, mean-zero fields on [0, 2π].
//!
//! A field is `u(x) = Σ_{0<|k|≤K} c_k e^{ikx}` with `c_{-k} = conj(c_k)`;
//! only `c_1..c_K` are stored and `c_0` is identically zero.

use std::ops::{AddAssign, Mul, SubAssign};

use num_complex::Complex;

use crate::error::{Result, SpectralError};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T> {
    coeffs: Vec<Complex<T>>,
    time_tag: Option<T>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(cutoff: usize) -> Self {
        assert!(cutoff >= 1, "cutoff must be positive");
        Self {
            coeffs: vec![Complex::new(T::zero(), T::zero()); cutoff],
            time_tag: None,
        }
    }

    /// Builds a field from `c_1..c_K`, rejecting non-finite amplitudes.
    pub fn from_coeffs(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(SpectralError::EmptyField);
        }
        if let Some(i) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(SpectralError::NonFinite { mode: i + 1 });
        }
        Ok(Self {
            coeffs,
            time_tag: None,
        })
    }

    pub fn from_fn(cutoff: usize, mut f: impl FnMut(usize) -> Complex<T>) -> Self {
        assert!(cutoff >= 1, "cutoff must be positive");
        Self {
            coeffs: (1..=cutoff).map(&mut f).collect(),
            time_tag: None,
        }
    }

    /// The field with a single nonzero amplitude `c_k = c`.
    pub fn single_mode(cutoff: usize, k: usize, c: Complex<T>) -> Self {
        let mut f = Self::zeros(cutoff);
        f.set_mode(k, c);
        f
    }

    #[inline]
    pub fn cutoff(&self) -> usize {
        self.coeffs.len()
    }

    /// Stored amplitudes; index `i` holds mode `k = i + 1`.
    #[inline]
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// Amplitude of any integer mode, completed by Hermitian symmetry.
    pub fn mode(&self, k: i64) -> Complex<T> {
        let m = k.unsigned_abs() as usize;
        if k == 0 || m > self.cutoff() {
            return Complex::new(T::zero(), T::zero());
        }
        let c = self.coeffs[m - 1];
        if k > 0 {
            c
        } else {
            c.conj()
        }
    }

    pub fn set_mode(&mut self, k: usize, c: Complex<T>) {
        assert!(
            (1..=self.cutoff()).contains(&k),
            "mode {k} outside 1..={}",
            self.cutoff()
        );
        self.coeffs[k - 1] = c;
    }

    pub fn time_tag(&self) -> Option<T> {
        self.time_tag
    }

    pub fn set_time_tag(&mut self, t: Option<T>) {
        self.time_tag = t;
    }

    pub fn with_time_tag(mut self, t: T) -> Self {
        self.time_tag = Some(t);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Multiplies mode `k` by `symbol(k)`; the symbol on negative modes is
    /// taken to be the conjugate, so reality is preserved.
    pub fn apply_diagonal(&self, symbol: impl Fn(usize) -> Complex<T>) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| symbol(i + 1) * c)
            .collect();
        Self {
            coeffs,
            time_tag: self.time_tag,
        }
    }

    /// In-place real diagonal multiplier.
    pub fn scale_modes(&mut self, factor: impl Fn(usize) -> T) {
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c = *c * factor(i + 1);
        }
    }

    /// Zeroes every mode above `k_max` while keeping the cutoff.
    pub fn low_pass(&self, k_max: usize) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().skip(k_max) {
            *c = Complex::new(T::zero(), T::zero());
        }
        out
    }

    /// Re-embeds the field with a new cutoff, dropping or zero-filling modes.
    pub fn resized(&self, cutoff: usize) -> Self {
        let mut out = Self::zeros(cutoff);
        let m = cutoff.min(self.cutoff());
        out.coeffs[..m].copy_from_slice(&self.coeffs[..m]);
        out.time_tag = self.time_tag;
        out
    }

    /// Mean square `(1/2π)∫u² = Σ_{k≠0} |c_k|²`.
    pub fn l2_norm_sq(&self) -> T {
        let two = T::lit(2.0);
        self.coeffs.iter().map(|c| two * c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> T {
        self.l2_norm_sq().sqrt()
    }

    /// `self += a · x`.
    pub fn axpy(&mut self, a: T, x: &Self) {
        check_cutoffs(self, x).expect("axpy operands share a cutoff");
        for (c, &d) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *c = *c + d * a;
        }
    }

    pub fn cast<U: Real>(&self) -> SpectralField<U> {
        SpectralField {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex::new(U::lit(c.re.as_f64()), U::lit(c.im.as_f64())))
                .collect(),
            time_tag: self.time_tag.map(|t| U::lit(t.as_f64())),
        }
    }
}

impl<T: Real> AddAssign<&SpectralField<T>> for SpectralField<T> {
    fn add_assign(&mut self, rhs: &SpectralField<T>) {
        self.axpy(T::one(), rhs);
    }
}

impl<T: Real> SubAssign<&SpectralField<T>> for SpectralField<T> {
    fn sub_assign(&mut self, rhs: &SpectralField<T>) {
        self.axpy(-T::one(), rhs);
    }
}

impl<T: Real> Mul<T> for &SpectralField<T> {
    type Output = SpectralField<T>;
    fn mul(self, a: T) -> SpectralField<T> {
        let mut out = self.clone();
        out.scale_modes(|_| a);
        out
    }
}

pub(crate) fn check_cutoffs<T: Real>(a: &SpectralField<T>, b: &SpectralField<T>) -> Result<()> {
    if a.cutoff() != b.cutoff() {
        return Err(SpectralError::CutoffMismatch {
            left: a.cutoff(),
            right: b.cutoff(),
        });
    }
    Ok(())
}

/// Common diagonal symbols.
pub mod symbol {
    use super::*;

    /// Heat semigroup `e^{-tA}`: `e^{-k² t}`.
    pub fn heat<T: Real>(t: T) -> impl Fn(usize) -> Complex<T> {
        move |k| {
            let k = T::lit(k as f64);
            Complex::new((-k * k * t).exp(), T::zero())
        }
    }

    /// `A^δ = (-∂ₓₓ)^δ`: `|k|^{2δ}`.
    pub fn frac_laplacian<T: Real>(delta: T) -> impl Fn(usize) -> Complex<T> {
        move |k| Complex::new(T::lit(k as f64).powf(T::lit(2.0) * delta), T::zero())
    }

    /// `∂ₓ`: `ik`.
    pub fn derivative<T: Real>() -> impl Fn(usize) -> Complex<T> {
        |k| Complex::new(T::zero(), T::lit(k as f64))
    }
}

/// The isolated cemetery state a path enters at blow-up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeathState<T> {
    pub blowup_time: T,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldState<T> {
    Alive(SpectralField<T>),
    Dead(DeathState<T>),
}

impl<T: Real> FieldState<T> {
    pub fn is_dead(&self) -> bool {
        matches!(self, FieldState::Dead(_))
    }

    pub fn field(&self) -> Option<&SpectralField<T>> {
        match self {
            FieldState::Alive(f) => Some(f),
            FieldState::Dead(_) => None,
        }
    }

    pub fn into_field(self) -> Result<SpectralField<T>> {
        match self {
            FieldState::Alive(f) => Ok(f),
            FieldState::Dead(d) => Err(SpectralError::Dead {
                blowup_time: d.blowup_time.as_f64(),
            }),
        }
    }

    /// Applies `op` to a live field; death passes through untouched.
    pub fn map(&self, op: impl FnOnce(&SpectralField<T>) -> SpectralField<T>) -> Self {
        match self {
            FieldState::Alive(f) => FieldState::Alive(op(f)),
            FieldState::Dead(d) => FieldState::Dead(*d),
        }
    }

    pub fn apply_diagonal(&self, symbol: impl Fn(usize) -> Complex<T>) -> Self {
        self.map(|f| f.apply_diagonal(symbol))
    }

    /// Sum of two states; any dead operand makes the result dead, keeping
    /// the earlier blow-up time.
    pub fn combine(&self, other: &Self) -> Self {
        match (self, other) {
            (FieldState::Alive(a), FieldState::Alive(b)) => {
                let mut s = a.clone();
                s += b;
                FieldState::Alive(s)
            }
            (FieldState::Dead(a), FieldState::Dead(b)) => FieldState::Dead(DeathState {
                blowup_time: a.blowup_time.min(b.blowup_time),
            }),
            (FieldState::Dead(d), _) | (_, FieldState::Dead(d)) => FieldState::Dead(*d),
        }
    }
}

/// States on a strictly increasing time grid; absorbed at the first death.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPath<T> {
    times: Vec<T>,
    states: Vec<FieldState<T>>,
    death_time: Option<T>,
}

impl<T: Real> Default for FieldPath<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> FieldPath<T> {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            death_time: None,
        }
    }

    /// Appends a node. After the first dead node every later node is
    /// recorded as dead with the original blow-up time.
    pub fn push(&mut self, t: T, state: FieldState<T>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(SpectralError::NonIncreasingTime {
                    previous: last.as_f64(),
                    next: t.as_f64(),
                });
            }
        }
        let state = match (self.death_time, state) {
            (Some(tau), _) => FieldState::Dead(DeathState { blowup_time: tau }),
            (None, FieldState::Dead(_)) => {
                self.death_time = Some(t);
                FieldState::Dead(DeathState { blowup_time: t })
            }
            (None, alive) => alive,
        };
        self.times.push(t);
        self.states.push(state);
        Ok(())
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &[FieldState<T>] {
        &self.states
    }

    pub fn death_time(&self) -> Option<T> {
        self.death_time
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(T, &FieldState<T>)> {
        self.times.last().copied().zip(self.states.last())
    }

    /// Step of a uniform grid, or `None` when spacings differ by more than
    /// `rel_tol` relative to the first one.
    pub fn uniform_step(&self, rel_tol: T) -> Option<T> {
        if self.times.len() < 2 {
            return None;
        }
        let dt = self.times[1] - self.times[0];
        self.times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= rel_tol * dt)
            .then_some(dt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn heat_on_first_mode() {
        let e1 = SpectralField::single_mode(4, 1, c(1.0, 0.0));
        let out = e1.apply_diagonal(symbol::heat(1.0));
        assert_relative_eq!(out.mode(1).re, (-1.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn half_laplacian_doubles_second_mode() {
        let e2 = SpectralField::single_mode(4, 2, c(1.0, 0.0));
        let out = e2.apply_diagonal(symbol::frac_laplacian(0.5));
        assert_relative_eq!(out.mode(2).re, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn derivative_of_imaginary_third_mode() {
        let f = SpectralField::single_mode(4, 3, c(0.0, 1.0));
        let out = f.apply_diagonal(symbol::derivative());
        assert_eq!(out.mode(3), c(-3.0, 0.0));
    }

    #[test]
    fn hermitian_completion() {
        let f = SpectralField::single_mode(3, 2, c(1.0, 2.0));
        assert_eq!(f.mode(-2), c(1.0, -2.0));
        assert_eq!(f.mode(0), c(0.0, 0.0));
        assert_eq!(f.mode(7), c(0.0, 0.0));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            SpectralField::from_coeffs(vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(SpectralError::NonFinite { mode: 2 })
        ));
    }

    #[test]
    fn cosine_has_unit_half_mean_square() {
        let f = SpectralField::single_mode(2, 1, c(0.5, 0.0));
        assert_relative_eq!(f.l2_norm_sq(), 0.5);
    }

    #[test]
    fn death_absorbs_path() {
        let mut p = FieldPath::new();
        p.push(0.0, FieldState::Alive(SpectralField::<f64>::zeros(2)))
            .unwrap();
        p.push(0.5, FieldState::Dead(DeathState { blowup_time: 0.5 }))
            .unwrap();
        p.push(1.0, FieldState::Alive(SpectralField::zeros(2)))
            .unwrap();
        assert_eq!(p.death_time(), Some(0.5));
        assert!(p.states()[2].is_dead());
        assert!(p
            .push(1.0, FieldState::Alive(SpectralField::zeros(2)))
            .is_err());
    }

    #[test]
    fn death_propagates_through_arithmetic() {
        let a = FieldState::Alive(SpectralField::<f64>::zeros(2));
        let d = FieldState::Dead(DeathState { blowup_time: 0.3 });
        assert!(a.combine(&d).is_dead());
        assert!(d.apply_diagonal(symbol::heat(1.0)).is_dead());
    }

    #[test]
    fn f32_instantiation() {
        let f = SpectralField::<f32>::single_mode(2, 1, Complex::new(1.0, 0.0));
        let g = f.apply_diagonal(symbol::heat(1.0f32));
        assert!((g.mode(1).re - (-1.0f32).exp()).abs() < 1e-6);
    }
}
