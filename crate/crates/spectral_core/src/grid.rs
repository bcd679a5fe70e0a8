//! Grid transforms and the dealiased pseudospectral product.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::field::{check_cutoffs, SpectralField};
use crate::real::Real;

/// FFT plans for one cutoff `K`.
///
/// Products run on `N = next_pow2(3K+1)` points: the full convolution of two
/// band-`K` spectra reaches `2K`, and wrapping at `N ≥ 3K+1` keeps `|k| ≤ K`
/// alias-free. Sup-norms use the `4(2K+1)`-point grid. The plans are
/// immutable and shareable across threads.
#[derive(Clone)]
pub struct SpectralGrid<T: Real> {
    cutoff: usize,
    product_len: usize,
    sup_len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    sup_inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for SpectralGrid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("cutoff", &self.cutoff)
            .field("product_len", &self.product_len)
            .field("sup_len", &self.sup_len)
            .finish()
    }
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn is_zero<T: Real>(f: &SpectralField<T>) -> bool {
    f.coeffs()
        .iter()
        .all(|c| c.re == T::zero() && c.im == T::zero())
}

impl<T: Real> SpectralGrid<T> {
    pub fn new(cutoff: usize) -> Self {
        assert!(cutoff >= 1, "cutoff must be positive");
        let product_len = (3 * cutoff + 1).next_power_of_two();
        let sup_len = 4 * (2 * cutoff + 1);
        let mut planner = FftPlanner::new();
        Self {
            cutoff,
            product_len,
            sup_len,
            forward: planner.plan_fft_forward(product_len),
            inverse: planner.plan_fft_inverse(product_len),
            sup_inverse: planner.plan_fft_inverse(sup_len),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn product_len(&self) -> usize {
        self.product_len
    }

    pub fn sup_len(&self) -> usize {
        self.sup_len
    }

    fn run(plan: &Arc<dyn Fft<T>>, buf: &mut [Complex<T>]) {
        let mut scratch = vec![zero(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
    }

    /// Loads `f` (and optionally `g` as the imaginary part) into a
    /// length-`n` spectrum so the inverse transform yields `f(x) + i g(x)`.
    fn load(n: usize, f: &SpectralField<T>, g: Option<&SpectralField<T>>) -> Vec<Complex<T>> {
        let mut buf = vec![zero(); n];
        let i = Complex::new(T::zero(), T::one());
        for k in 1..=f.cutoff() {
            let fk = f.coeffs()[k - 1];
            let gk = g.map_or(zero(), |g| g.coeffs()[k - 1]);
            buf[k] = fk + i * gk;
            buf[n - k] = fk.conj() + i * gk.conj();
        }
        buf
    }

    /// Point values on the product grid `x_j = 2πj/N`.
    pub fn to_grid(&self, f: &SpectralField<T>) -> Vec<T> {
        let mut buf = Self::load(self.product_len, f, None);
        Self::run(&self.inverse, &mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Projects product-grid values onto modes `1..=K` (the mean is dropped).
    pub fn from_grid(&self, values: &[T]) -> SpectralField<T> {
        assert_eq!(values.len(), self.product_len, "grid length");
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        Self::run(&self.forward, &mut buf);
        let scale = T::one() / T::lit(self.product_len as f64);
        SpectralField::from_fn(self.cutoff, |k| buf[k] * scale)
    }

    /// Dealiased `fg` with the zero mode projected out.
    pub fn product(&self, f: &SpectralField<T>, g: &SpectralField<T>) -> Result<SpectralField<T>> {
        check_cutoffs(f, g)?;
        if f.cutoff() != self.cutoff {
            return Err(crate::SpectralError::CutoffMismatch {
                left: f.cutoff(),
                right: self.cutoff,
            });
        }
        if is_zero(f) || is_zero(g) {
            let mut out = SpectralField::zeros(self.cutoff);
            out.set_time_tag(f.time_tag());
            return Ok(out);
        }
        // One inverse transform carries both real factors: h = f + i g.
        let mut buf = Self::load(self.product_len, f, Some(g));
        Self::run(&self.inverse, &mut buf);
        for c in buf.iter_mut() {
            *c = Complex::new(c.re * c.im, T::zero());
        }
        Self::run(&self.forward, &mut buf);
        let scale = T::one() / T::lit(self.product_len as f64);
        let mut out = SpectralField::from_fn(self.cutoff, |k| buf[k] * scale);
        out.set_time_tag(f.time_tag());
        Ok(out)
    }

    /// `f²` with the zero mode projected out.
    pub fn square(&self, f: &SpectralField<T>) -> Result<SpectralField<T>> {
        self.product(f, f)
    }

    /// Point values on the oversampled `4(2K+1)`-point grid.
    pub fn to_fine_grid(&self, f: &SpectralField<T>) -> Vec<T> {
        let mut buf = Self::load(self.sup_len, &f.resized(self.cutoff.min(f.cutoff())), None);
        Self::run(&self.sup_inverse, &mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Maximum of `|f|` over the oversampled grid.
    pub fn sup_norm(&self, f: &SpectralField<T>) -> T {
        self.to_fine_grid(f)
            .into_iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Point values of `f` on an arbitrary `n ≥ 2K+1` point grid.
pub fn synthesize<T: Real>(f: &SpectralField<T>, n: usize) -> Vec<T> {
    assert!(n > 2 * f.cutoff(), "grid too coarse for the cutoff");
    let mut buf = SpectralGrid::load(n, f, None);
    let plan = FftPlanner::new().plan_fft_inverse(n);
    SpectralGrid::run(&plan, &mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Modes `1..=cutoff` of real samples on an `n`-point grid.
pub fn analyze<T: Real>(values: &[T], cutoff: usize) -> SpectralField<T> {
    let n = values.len();
    let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
    let plan = FftPlanner::new().plan_fft_forward(n);
    SpectralGrid::run(&plan, &mut buf);
    let scale = T::one() / T::lit(n as f64);
    SpectralField::from_fn(cutoff, |k| buf[k] * scale)
}

/// Dealiased product with a one-off plan.
pub fn pointwise_product<T: Real>(
    f: &SpectralField<T>,
    g: &SpectralField<T>,
) -> Result<SpectralField<T>> {
    check_cutoffs(f, g)?;
    SpectralGrid::new(f.cutoff()).product(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(k: usize, seed: u64) -> SpectralField<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpectralField::from_fn(k, |_| {
            Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn cosine_squared() {
        let cos = SpectralField::single_mode(4, 1, Complex::new(0.5, 0.0));
        let p = pointwise_product(&cos, &cos).unwrap();
        assert!((p.mode(2) - Complex::new(0.25, 0.0)).norm() < 1e-15);
        assert!(p.mode(1).norm() < 1e-15);
        assert!(p.mode(3).norm() < 1e-15);
    }

    #[test]
    fn zero_annihilates() {
        let f = random_field(8, 1);
        let p = pointwise_product(&f, &SpectralField::zeros(8)).unwrap();
        assert!(p.coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn mismatched_cutoffs_rejected() {
        assert!(pointwise_product(&random_field(8, 1), &random_field(9, 2)).is_err());
    }

    #[test]
    fn matches_64_point_grid_oracle() {
        // Direct grid multiplication on 64 points is alias-free for K = 8
        // (the product band 16 stays below 64/2).
        let f = random_field(8, 3);
        let g = random_field(8, 4);
        let fv = synthesize(&f, 64);
        let gv = synthesize(&g, 64);
        let pv: Vec<f64> = fv.iter().zip(&gv).map(|(a, b)| a * b).collect();
        let oracle = analyze(&pv, 8);
        let p = pointwise_product(&f, &g).unwrap();
        let scale = oracle.l2_norm();
        for k in 1..=8 {
            assert!((p.mode(k) - oracle.mode(k)).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn sup_of_cosine_mode() {
        let grid = SpectralGrid::new(8);
        let e5 = SpectralField::<f64>::single_mode(8, 5, Complex::new(1.0, 0.0));
        assert!((grid.sup_norm(&e5) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn f32_product() {
        let cos = SpectralField::<f32>::single_mode(4, 1, Complex::new(0.5, 0.0));
        let p = pointwise_product(&cos, &cos).unwrap();
        assert!((p.mode(2).re - 0.25).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn reality_round_trip(seed in any::<u64>(), k in 1usize..40) {
            let f = random_field(k, seed);
            let grid = SpectralGrid::new(k);
            let back = grid.from_grid(&grid.to_grid(&f));
            let scale = f.l2_norm().max(1e-300);
            for m in 1..=k as i64 {
                prop_assert!((back.mode(m) - f.mode(m)).norm() <= 1e-12 * scale);
            }
        }

        #[test]
        fn parseval(seed in any::<u64>(), k in 1usize..40) {
            let f = random_field(k, seed);
            let v = SpectralGrid::new(k).to_grid(&f);
            let grid_ms = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
            prop_assert!((grid_ms - f.l2_norm_sq()).abs() <= 1e-12 * f.l2_norm_sq().max(1e-300));
        }

        #[test]
        fn product_symmetric(seed in any::<u64>(), k in 1usize..24) {
            let f = random_field(k, seed);
            let g = random_field(k, seed.wrapping_add(1));
            let a = pointwise_product(&f, &g).unwrap();
            let b = pointwise_product(&g, &f).unwrap();
            for m in 1..=k as i64 {
                prop_assert!((a.mode(m) - b.mode(m)).norm() <= 1e-12 * (1.0 + a.mode(m).norm()));
            }
        }
    }
}
