//! Exponential-Euler steppers for the direct equation and both level
//! systems. Drifts are frozen at the left end of each step and every noise
//! term is an exact OU increment, so the level sum obeys the direct
//! recursion up to rounding.

use serde::{Deserialize, Serialize};

use gaussian_objects::{
    b_nonlinearity, Etd1, NoiseAddress, NoiseStream, OuPropagator, REMAINDER_LEVEL,
};
use spectral_core::{
    Complex, DeathState, FieldPath, FieldState, Real, SpectralField, SpectralGrid,
};

use crate::config::{InitialPlacement, NoiseMode, SystemConfig};
use crate::regime::{remainder_regime, Regime};
use crate::SolverError;

/// Which level system hosts the remainder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Host {
    /// Levels forced by the Gaussian partial sums `Z^{(0,i)}`.
    Frak,
    /// Levels forced by their own partial sums `X^{(0,i)}`.
    X,
}

impl Host {
    pub fn name(self) -> &'static str {
        match self {
            Self::Frak => "frak",
            Self::X => "x",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LevelRun<T> {
    pub host: Host,
    pub levels: Vec<FieldPath<T>>,
    pub remainder: FieldPath<T>,
    /// `Z^{(0..n)}`.
    pub gaussians: Vec<FieldPath<T>>,
    /// `Z̃`, started from `z0`.
    pub z_tilde: FieldPath<T>,
    pub eta: Option<FieldPath<T>>,
    pub rho: Option<FieldPath<T>>,
    /// `Σ levels + remainder`, node by node.
    pub sum: FieldPath<T>,
    pub regime: Regime,
}

impl<T: Real> LevelRun<T> {
    /// Named paths in a fixed order.
    pub fn named_paths(&self) -> Vec<(String, &FieldPath<T>)> {
        let rem = match self.host {
            Host::Frak => "S",
            Host::X => "R",
        };
        let mut out: Vec<(String, &FieldPath<T>)> = Vec::new();
        for (i, p) in self.levels.iter().enumerate() {
            out.push((format!("level{i}"), p));
        }
        out.push((rem.to_owned(), &self.remainder));
        for (i, p) in self.gaussians.iter().enumerate() {
            out.push((format!("Z{i}"), p));
        }
        out.push(("Ztilde".to_owned(), &self.z_tilde));
        if let Some(p) = &self.eta {
            out.push(("eta".to_owned(), p));
        }
        if let Some(p) = &self.rho {
            out.push(("rho".to_owned(), p));
        }
        out.push(("sum".to_owned(), &self.sum));
        out
    }
}

/// `true` once the field is non-finite or its oversampled sup exceeds the
/// threshold. `Σ 2|c_k|` bounds the sup and skips the transform when small.
pub fn blown_up<T: Real>(grid: &SpectralGrid<T>, f: &SpectralField<T>, threshold: f64) -> bool {
    if !f.is_finite() {
        return true;
    }
    let bound: f64 = f.coeffs().iter().map(|c| 2.0 * c.norm().as_f64()).sum();
    if bound <= threshold {
        return false;
    }
    let sup = grid.sup_norm(f).as_f64();
    !(sup <= threshold)
}

/// Exact OU increments for every level and the remainder noise.
struct LevelNoise<T> {
    prop: OuPropagator<T>,
    levels: Vec<(Vec<T>, NoiseStream, u32)>,
    remainder: (Vec<T>, NoiseStream),
    substeps: u64,
    scratch: Vec<Complex<f64>>,
}

impl<T: Real> LevelNoise<T> {
    fn new(cfg: &SystemConfig) -> Result<Self, SolverError> {
        let spectra = cfg.spectra()?;
        let to_t = |v: &[f64]| v.iter().map(|&q| T::lit(q)).collect::<Vec<T>>();
        Ok(Self {
            prop: OuPropagator::new(cfg.cutoff, cfg.dt / cfg.substeps as f64),
            levels: spectra
                .levels
                .iter()
                .enumerate()
                .map(|(i, q)| (to_t(q), cfg.stream(i as u32), i as u32))
                .collect(),
            remainder: (to_t(&spectra.remainder), cfg.stream(REMAINDER_LEVEL)),
            substeps: cfg.substeps,
            scratch: Vec::new(),
        })
    }

    fn level(&mut self, i: usize, step: u64, out: &mut SpectralField<T>) {
        let (q, stream, level) = &self.levels[i];
        let addr = NoiseAddress {
            stream: *stream,
            level: *level,
            step,
        };
        self.prop
            .increment(q, addr, self.substeps, &mut self.scratch, out);
    }

    fn remainder(&mut self, step: u64, out: &mut SpectralField<T>) {
        let (q, stream) = &self.remainder;
        let addr = NoiseAddress {
            stream: *stream,
            level: REMAINDER_LEVEL,
            step,
        };
        self.prop
            .increment(q, addr, self.substeps, &mut self.scratch, out);
    }
}

struct Snapshots {
    every: usize,
    steps: u64,
}

impl Snapshots {
    fn new(cfg: &SystemConfig) -> Self {
        Self {
            every: cfg.snapshot_every,
            steps: cfg.steps(),
        }
    }

    fn keep(&self, m: u64) -> bool {
        m == self.steps || m % self.every as u64 == 0
    }
}

fn alive<T: Real>(f: &SpectralField<T>) -> FieldState<T> {
    FieldState::Alive(f.clone())
}

fn dead<T: Real>(t: T) -> FieldState<T> {
    FieldState::Dead(DeathState { blowup_time: t })
}

/// The direct equation `du = (-Au + ∂ₓu²)dt + Q dW`.
///
/// In coupled mode the increment is the sum of every level's increment, so
/// it shares its Brownian path with the level systems of the same config.
pub fn run_direct_burgers<T: Real>(cfg: &SystemConfig) -> Result<FieldPath<T>, SolverError> {
    cfg.validate()?;
    let k_max = cfg.cutoff;
    let grid = SpectralGrid::<T>::new(k_max);
    let etd = Etd1::<T>::new(k_max, cfg.dt);
    let snaps = Snapshots::new(cfg);
    let mut noise = LevelNoise::<T>::new(cfg)?;
    let base: Vec<T> = cfg.spectra()?.base.iter().map(|&q| T::lit(q)).collect();
    let direct_stream = cfg.direct_stream();
    let direct_prop = OuPropagator::<T>::new(k_max, cfg.dt / cfg.substeps as f64);
    let mut scratch = Vec::new();

    let mut u: SpectralField<T> = cfg.u0.field(k_max);
    let mut path = FieldPath::new();
    path.push(T::zero(), alive(&u))?;
    let mut inc = SpectralField::zeros(k_max);
    let mut part = SpectralField::zeros(k_max);
    let mut death: Option<T> = None;
    for m in 0..snaps.steps {
        let t = T::lit((m + 1) as f64 * cfg.dt);
        if death.is_none() {
            let drift = b_nonlinearity(&grid, &u, &u)?;
            etd.step(&mut u, &drift);
            match cfg.noise {
                NoiseMode::Coupled => {
                    inc.coeffs_mut()
                        .iter_mut()
                        .for_each(|c| *c = Complex::new(T::zero(), T::zero()));
                    for i in 0..noise.levels.len() {
                        noise.level(i, m, &mut part);
                        inc += &part;
                    }
                    noise.remainder(m, &mut part);
                    inc += &part;
                }
                NoiseMode::Independent => {
                    let addr = NoiseAddress {
                        stream: direct_stream,
                        level: 0,
                        step: m,
                    };
                    direct_prop.increment(&base, addr, cfg.substeps, &mut scratch, &mut inc);
                }
            }
            u += &inc;
            if blown_up(&grid, &u, cfg.blowup_threshold) {
                death = Some(t);
            }
        }
        if snaps.keep(m + 1) || death == Some(t) {
            path.push(t, death.map_or_else(|| alive(&u), dead))?;
        }
    }
    Ok(path)
}

/// Initial values of the levels and the remainder under the placement rule.
fn initial_split<T: Real>(cfg: &SystemConfig) -> (Vec<SpectralField<T>>, SpectralField<T>) {
    let k_max = cfg.cutoff;
    let n = cfg.plan.n;
    let u0: SpectralField<T> = cfg.u0.field(k_max);
    let zero = SpectralField::zeros(k_max);
    match cfg.placement {
        InitialPlacement::Remainder => (vec![zero; n + 1], u0),
        InitialPlacement::FirstLevel => {
            let mut lv = vec![zero.clone(); n + 1];
            lv[0] = u0;
            (lv, zero)
        }
        InitialPlacement::Spread => {
            let share = &u0 * T::lit(1.0 / (n + 1) as f64);
            (vec![share; n + 1], zero)
        }
    }
}

fn sum_of<T: Real>(fields: &[SpectralField<T>], cutoff: usize) -> SpectralField<T> {
    let mut s = SpectralField::zeros(cutoff);
    for f in fields {
        s += f;
    }
    s
}

/// Remainder drift pieces shared by the host and the `η/ρ` split.
struct Drifts<T> {
    /// `B(P_j)` for the partial sums `P_j`, `j = 0..n-1`.
    partial: Vec<SpectralField<T>>,
}

impl<T: Real> Drifts<T> {
    /// Level `i ≥ 1` forcing `B(P_{i-1}) - B(P_{i-2})`.
    fn level(&self, i: usize) -> SpectralField<T> {
        let mut d = self.partial[i - 1].clone();
        if i >= 2 {
            d -= &self.partial[i - 2];
        }
        d
    }

    fn top(&self) -> &SpectralField<T> {
        self.partial.last().expect("n >= 1")
    }
}

struct Engine<'a, T: Real> {
    cfg: &'a SystemConfig,
    host: Host,
    split: bool,
    grid: SpectralGrid<T>,
    etd: Etd1<T>,
}

impl<'a, T: Real> Engine<'a, T> {
    fn b(
        &self,
        f: &SpectralField<T>,
        g: &SpectralField<T>,
    ) -> Result<SpectralField<T>, SolverError> {
        Ok(b_nonlinearity(&self.grid, f, g)?)
    }

    fn drifts(
        &self,
        z: &[SpectralField<T>],
        lv: &[SpectralField<T>],
    ) -> Result<Drifts<T>, SolverError> {
        let n = self.cfg.plan.n;
        let source = match self.host {
            Host::Frak => z,
            Host::X => lv,
        };
        let mut partial = Vec::with_capacity(n);
        let mut p = SpectralField::zeros(self.cfg.cutoff);
        for f in &source[..n] {
            p += f;
            partial.push(self.b(&p, &p)?);
        }
        Ok(Drifts { partial })
    }

    /// `B(L) - B(P_{n-1}) + 2B(L,η) + 2B(L,ρ) + B(ρ) + 2B(ρ,η) + B(η)`.
    fn rho_drift(
        &self,
        d: &Drifts<T>,
        l: &SpectralField<T>,
        eta: &SpectralField<T>,
        rho: &SpectralField<T>,
    ) -> Result<SpectralField<T>, SolverError> {
        let two = T::lit(2.0);
        let mut out = self.b(l, l)?;
        out -= d.top();
        out.axpy(two, &self.b(l, eta)?);
        out.axpy(two, &self.b(l, rho)?);
        out += &self.b(rho, rho)?;
        out.axpy(two, &self.b(rho, eta)?);
        out += &self.b(eta, eta)?;
        Ok(out)
    }

    fn run(&self) -> Result<LevelRun<T>, SolverError> {
        let cfg = self.cfg;
        cfg.validate()?;
        let n = cfg.plan.n;
        if n == 0 {
            return Err(SolverError::Config(
                "level systems need a plan with n >= 1".into(),
            ));
        }
        let k_max = cfg.cutoff;
        let snaps = Snapshots::new(cfg);
        let mut noise = LevelNoise::<T>::new(cfg)?;
        let threshold = cfg.blowup_threshold;

        let (mut lv, rem0) = initial_split::<T>(cfg);
        let mut z: Vec<SpectralField<T>> = vec![SpectralField::zeros(k_max); n + 1];
        let mut z_tilde: SpectralField<T> = cfg.z0.field(k_max);
        let mut rem = Some(rem0.clone());
        let mut eta = SpectralField::zeros(k_max);
        let mut rho = Some(rem0);

        let new_paths = |count: usize| vec![FieldPath::<T>::new(); count];
        let mut level_paths = new_paths(n + 1);
        let mut z_paths = new_paths(n + 1);
        let mut rem_path = FieldPath::new();
        let mut zt_path = FieldPath::new();
        let mut eta_path = FieldPath::new();
        let mut rho_path = FieldPath::new();
        let mut sum_path = FieldPath::new();
        let mut rem_death: Option<T> = None;
        let mut rho_death: Option<T> = None;

        let mut inc = vec![SpectralField::zeros(k_max); n + 1];
        let mut inc_rem = SpectralField::zeros(k_max);

        let mut record = |t: T,
                          lv: &[SpectralField<T>],
                          z: &[SpectralField<T>],
                          z_tilde: &SpectralField<T>,
                          rem: &Option<SpectralField<T>>,
                          eta: &SpectralField<T>,
                          rho: &Option<SpectralField<T>>,
                          rem_death: Option<T>,
                          rho_death: Option<T>|
         -> Result<(), SolverError> {
            for (p, f) in level_paths.iter_mut().zip(lv) {
                p.push(t, alive(f))?;
            }
            for (p, f) in z_paths.iter_mut().zip(z) {
                p.push(t, alive(f))?;
            }
            zt_path.push(t, alive(z_tilde))?;
            match rem {
                Some(r) => {
                    rem_path.push(t, alive(r))?;
                    let mut s = sum_of(lv, k_max);
                    s += r;
                    sum_path.push(t, alive(&s))?;
                }
                None => {
                    let td = rem_death.expect("dead remainder has a death time");
                    rem_path.push(t, dead(td))?;
                    sum_path.push(t, dead(td))?;
                }
            }
            eta_path.push(t, alive(eta))?;
            match rho {
                Some(r) => rho_path.push(t, alive(r))?,
                None => rho_path.push(t, dead(rho_death.expect("dead rho has a death time")))?,
            }
            Ok(())
        };

        record(T::zero(), &lv, &z, &z_tilde, &rem, &eta, &rho, None, None)?;
        for m in 0..snaps.steps {
            let t = T::lit((m + 1) as f64 * cfg.dt);
            let d = self.drifts(&z, &lv)?;
            let l = sum_of(&lv, k_max);
            let rem_drift = match &rem {
                Some(r) => {
                    let mut full = l.clone();
                    full += r;
                    let mut dr = self.b(&full, &full)?;
                    dr -= d.top();
                    Some(dr)
                }
                None => None,
            };
            let rho_drift = match (&rho, self.split) {
                (Some(r), true) => Some(self.rho_drift(&d, &l, &eta, r)?),
                _ => None,
            };

            for (i, inc_i) in inc.iter_mut().enumerate() {
                noise.level(i, m, inc_i);
            }
            noise.remainder(m, &mut inc_rem);

            for i in 0..=n {
                self.etd.decay_only(&mut z[i]);
                z[i] += &inc[i];
                if i == 0 {
                    self.etd.decay_only(&mut lv[0]);
                } else {
                    self.etd.step(&mut lv[i], &d.level(i));
                }
                lv[i] += &inc[i];
            }
            self.etd.decay_only(&mut z_tilde);
            z_tilde += &inc_rem;
            if let (Some(r), Some(dr)) = (rem.as_mut(), rem_drift) {
                self.etd.step(r, &dr);
                *r += &inc_rem;
                if blown_up(&self.grid, r, threshold) {
                    rem = None;
                    rem_death = Some(t);
                }
            }
            if self.split {
                self.etd.decay_only(&mut eta);
                eta += &inc_rem;
                if let (Some(r), Some(dr)) = (rho.as_mut(), rho_drift) {
                    self.etd.step(r, &dr);
                    if blown_up(&self.grid, r, threshold) {
                        rho = None;
                        rho_death = Some(t);
                    }
                }
            }
            let fresh_death = rem_death == Some(t) || rho_death == Some(t);
            if snaps.keep(m + 1) || fresh_death {
                record(t, &lv, &z, &z_tilde, &rem, &eta, &rho, rem_death, rho_death)?;
            }
        }

        Ok(LevelRun {
            host: self.host,
            levels: level_paths,
            remainder: rem_path,
            gaussians: z_paths,
            z_tilde: zt_path,
            eta: self.split.then_some(eta_path),
            rho: self.split.then_some(rho_path),
            sum: sum_path,
            regime: remainder_regime(&cfg.plan, cfg.u0_regularity),
        })
    }
}

fn run_host<T: Real>(
    cfg: &SystemConfig,
    host: Host,
    split: bool,
) -> Result<LevelRun<T>, SolverError> {
    Engine {
        cfg,
        host,
        split,
        grid: SpectralGrid::new(cfg.cutoff),
        etd: Etd1::new(cfg.cutoff, cfg.dt),
    }
    .run()
}

/// Levels forced by `B(Z^{(0,i-1)}) - B(Z^{(0,i-2)})`, remainder `S`.
pub fn run_frak_system<T: Real>(cfg: &SystemConfig) -> Result<LevelRun<T>, SolverError> {
    run_host(cfg, Host::Frak, false)
}

/// Levels forced by `B(X^{(0,i-1)}) - B(X^{(0,i-2)})`, remainder `R`.
pub fn run_x_system<T: Real>(cfg: &SystemConfig) -> Result<LevelRun<T>, SolverError> {
    run_host(cfg, Host::X, false)
}

/// Host run with the remainder also split as `η + ρ`: `η` is the pure
/// remainder-noise OU from zero, `ρ` carries the seven-term drift from the
/// remainder's initial value. The returned run has `eta` and `rho` set.
pub fn run_split_remainder<T: Real>(
    cfg: &SystemConfig,
    host: Host,
) -> Result<LevelRun<T>, SolverError> {
    run_host(cfg, host, true)
}
