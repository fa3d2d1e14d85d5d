//! Cavity battery: a single mode charged by a stream of thermal atoms.
//!
//! Each crossing applies a column-stochastic tridiagonal kernel to the photon
//! number distribution. The formal invariant vector grows like
//! `(p_g_th / p_e_th)^n` and is not normalizable, so the cavity never
//! equilibrates; in the high-selectivity limit (`g >> rabi`, integer n0) a
//! metastable inverted state appears on the {n0, n0+1} sector.

use crate::error::{Error, Result};
use crate::model::{sector_frequencies, ModelParams};

/// Photon number distribution on the truncated ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityState {
    pub probs: Vec<f64>,
}

impl CavityState {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        for (i, &p) in probs.iter().enumerate() {
            if p < -1e-12 {
                return Err(Error::NegativeProbability { value: p, index: i });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized((sum - 1.0).abs()));
        }
        Ok(CavityState { probs })
    }

    /// Uniform weight on levels `a..=b` (inclusive at both ends).
    pub fn uniform(a: usize, b: usize, n_max: usize) -> Result<Self> {
        if b < a || b > n_max {
            return Err(Error::InvalidParams(format!(
                "uniform range {a}..={b} does not fit below n_max = {n_max}"
            )));
        }
        let mut probs = vec![0.0; n_max + 1];
        let w = 1.0 / (b - a + 1) as f64;
        probs[a..=b].iter_mut().for_each(|p| *p = w);
        Ok(CavityState { probs })
    }

    /// Truncated, renormalized Gibbs distribution at inverse temperature `beta`.
    pub fn thermal(beta: f64, omega: f64, n_max: usize) -> Self {
        let x = (-beta * omega).exp();
        Self::geometric(x, n_max)
    }

    /// Thermal photon statistics with mean `n_bar`: `p_n ~ (n_bar/(n_bar+1))^n`.
    pub fn thermal_with_mean(n_bar: f64, n_max: usize) -> Self {
        Self::geometric(n_bar / (n_bar + 1.0), n_max)
    }

    fn geometric(x: f64, n_max: usize) -> Self {
        let mut probs = Vec::with_capacity(n_max + 1);
        let mut w = 1.0;
        for _ in 0..=n_max {
            probs.push(w);
            w *= x;
        }
        let z: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= z);
        CavityState { probs }
    }

    /// All weight on the two resonant levels {n0, n0+1}.
    pub fn sector(n0: usize, p_n0: f64, p_n0_plus_1: f64, n_max: usize) -> Result<Self> {
        if n0 + 1 > n_max {
            return Err(Error::InvalidParams(format!(
                "sector {{{n0}, {}}} does not fit below n_max = {n_max}",
                n0 + 1
            )));
        }
        let mut probs = vec![0.0; n_max + 1];
        probs[n0] = p_n0;
        probs[n0 + 1] = p_n0_plus_1;
        Self::new(probs)
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Probability sitting on the top three levels of the truncation.
    pub fn boundary_mass(&self) -> f64 {
        let n = self.probs.len();
        self.probs[n.saturating_sub(3)..].iter().sum()
    }
}

/// Thermal qubit populations `(p_g_th, p_e_th)` across the gap.
pub fn thermal_qubit(params: &ModelParams) -> (f64, f64) {
    let y = (-params.beta * params.omega_eg()).exp();
    (1.0 / (1.0 + y), y / (1.0 + y))
}

/// Column-stochastic tridiagonal map for one atom crossing.
///
/// `sub[n]` feeds level n from n-1, `super_[n]` feeds it from n+1, `diag[n]`
/// is the stay probability. The upward gain out of `n_max` is folded back into
/// that column's diagonal so every column still sums to one.
#[derive(Debug, Clone)]
pub struct TridiagonalKernel {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub super_: Vec<f64>,
    pub tau: f64,
    pub qubit_thermal: (f64, f64),
}

impl TridiagonalKernel {
    pub fn n_max(&self) -> usize {
        self.diag.len() - 1
    }

    /// Worst deviation of any column sum from one.
    pub fn stochasticity_residual(&self) -> f64 {
        let n_max = self.n_max();
        let mut worst = 0.0_f64;
        for n in 0..=n_max {
            let up = if n < n_max { self.sub[n + 1] } else { 0.0 };
            let down = if n > 0 { self.super_[n - 1] } else { 0.0 };
            worst = worst.max((self.diag[n] + up + down - 1.0).abs());
        }
        worst
    }

    /// Detailed-balance ratio `p_{n+1}/p_n` of the formal invariant vector at
    /// level `n`, where defined: equals `p_g_th / p_e_th >= 1` for every `n`,
    /// which is why no normalizable invariant state exists.
    pub fn invariant_ratio(&self, n: usize) -> Option<f64> {
        let up = self.sub.get(n + 1)?;
        let down = self.super_.get(n)?;
        if *down == 0.0 {
            return None;
        }
        Some(up / down)
    }
}

/// Build the one-collision kernel at duration `tau`.
pub fn build_kernel(params: &ModelParams, n_max: usize, tau: f64) -> TridiagonalKernel {
    let (pg, pe) = thermal_qubit(params);
    // exchange weight a_n = (g_n/omega_n)^2 sin^2(omega_n tau) per sector
    let a: Vec<f64> =
        (0..=n_max).map(|n| sector_frequencies(params, n).exchange_weight(tau)).collect();

    let mut sub = vec![0.0; n_max + 1];
    let mut diag = vec![0.0; n_max + 1];
    let mut super_ = vec![0.0; n_max + 1];
    for n in 0..=n_max {
        let a_below = if n > 0 { a[n - 1] } else { 0.0 };
        sub[n] = if n > 0 { pg * a_below } else { 0.0 };
        super_[n] = if n < n_max { pe * a[n] } else { 0.0 };
        diag[n] = pg * (1.0 - a[n]) + pe * (1.0 - a_below);
    }
    // boundary closure: the upward flux out of n_max stays on the diagonal
    diag[n_max] += pg * a[n_max];

    TridiagonalKernel { sub, diag, super_, tau, qubit_thermal: (pg, pe) }
}

/// One tridiagonal multiply.
pub fn cavity_step(state: &CavityState, kernel: &TridiagonalKernel) -> CavityState {
    let n_max = kernel.n_max();
    let p = &state.probs;
    let mut out = vec![0.0; n_max + 1];
    for n in 0..=n_max {
        let mut v = kernel.diag[n] * p[n];
        if n > 0 {
            v += kernel.sub[n] * p[n - 1];
        }
        if n < n_max {
            v += kernel.super_[n] * p[n + 1];
        }
        out[n] = v.max(0.0);
    }
    CavityState { probs: out }
}

/// Per-snapshot sector populations and spill diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetastabilitySnapshot {
    pub collision: usize,
    pub p_n0: f64,
    pub p_n0_plus_1: f64,
    /// Mass above the resonant sector, `sum_{n >= n0+2} p_n`.
    pub p_up: f64,
    /// Mass below the resonant sector, `sum_{n < n0} p_n`.
    pub p_down: f64,
    /// `p_{n0+1} / p_{n0}`; infinite marker when the denominator is < 1e-14.
    pub ratio: f64,
    pub mean_n: f64,
}

/// Diagnostics of one distribution around the resonant sector `n0`.
pub fn metastability_diagnostics(
    state: &CavityState,
    n0: usize,
    collision: usize,
) -> MetastabilitySnapshot {
    let p = &state.probs;
    let p_n0 = p.get(n0).copied().unwrap_or(0.0);
    let p_n0_plus_1 = p.get(n0 + 1).copied().unwrap_or(0.0);
    let p_down: f64 = p[..n0.min(p.len())].iter().sum();
    let p_up: f64 = if n0 + 2 < p.len() { p[n0 + 2..].iter().sum() } else { 0.0 };
    let ratio = if p_n0 < 1e-14 { f64::INFINITY } else { p_n0_plus_1 / p_n0 };
    MetastabilitySnapshot {
        collision,
        p_n0,
        p_n0_plus_1,
        p_up,
        p_down,
        ratio,
        mean_n: state.mean_photon_number(),
    }
}

/// Trajectory of a charging run: sampled distributions plus diagnostics.
#[derive(Debug, Clone)]
pub struct CavityRun {
    /// `(collision index, distribution)` at the initial state and every stride.
    pub snapshots: Vec<(usize, Vec<f64>)>,
    /// Present when `n0` is integer.
    pub diagnostics: Vec<MetastabilitySnapshot>,
    /// Worst top-three-levels mass seen over the run.
    pub max_boundary_mass: f64,
    /// Set when `max_boundary_mass` exceeded 1e-6: the truncation should grow.
    pub leakage_warning: bool,
}

/// Iterate the kernel `n_collisions` times, recording every `snapshot_stride`.
pub fn run_cavity_charging(
    params: &ModelParams,
    initial: &CavityState,
    n_collisions: usize,
    snapshot_stride: usize,
    n_max: usize,
) -> Result<CavityRun> {
    if initial.n_max() != n_max {
        return Err(Error::DimensionMismatch(format!(
            "initial state has n_max = {}, run wants {}",
            initial.n_max(),
            n_max
        )));
    }
    let stride = snapshot_stride.max(1);
    let kernel = build_kernel(params, n_max, params.tau);
    let n0 = params.integer_n0().ok();

    let mut state = initial.clone();
    let mut run = CavityRun {
        snapshots: vec![(0, state.probs.clone())],
        diagnostics: Vec::new(),
        max_boundary_mass: state.boundary_mass(),
        leakage_warning: false,
    };
    if let Some(n0) = n0 {
        run.diagnostics.push(metastability_diagnostics(&state, n0, 0));
    }

    for i in 1..=n_collisions {
        state = cavity_step(&state, &kernel);
        let sum: f64 = state.probs.iter().sum();
        let drift = (sum - 1.0).abs();
        if drift > 1e-8 {
            return Err(Error::NormalizationDrift { drift, collision: i });
        }
        if i % stride == 0 || i == n_collisions {
            run.snapshots.push((i, state.probs.clone()));
            if let Some(n0) = n0 {
                run.diagnostics.push(metastability_diagnostics(&state, n0, i));
            }
            run.max_boundary_mass = run.max_boundary_mass.max(state.boundary_mass());
        }
    }
    run.leakage_warning = run.max_boundary_mass > 1e-6;
    Ok(run)
}

/// The 2x2 sector map of the high-selectivity limit, acting on
/// `(p_n0, p_n0+1)`: `[[1 - p_g s^2, (1-p_g) s^2], [p_g s^2, 1 - (1-p_g) s^2]]`
/// with `s^2 = sin^2(g_n0 tau)`.
pub fn selective_kernel(params: &ModelParams, tau: f64) -> Result<[[f64; 2]; 2]> {
    let n0 = params.integer_n0()?;
    let (pg, _) = thermal_qubit(params);
    let sf = sector_frequencies(params, n0);
    let s2 = (sf.g_n * tau).sin().powi(2);
    Ok([[1.0 - pg * s2, (1.0 - pg) * s2], [pg * s2, 1.0 - (1.0 - pg) * s2]])
}

/// Invariant sector distribution `(1 - p_g_th, p_g_th)`: population inversion
/// pinned by the thermal atom statistics.
pub fn selective_fixed_point(params: &ModelParams) -> (f64, f64) {
    let (pg, _) = thermal_qubit(params);
    (1.0 - pg, pg)
}

/// Subdominant eigenvalue `(1 + cos(2 g_n0 tau)) / 2` of the sector map; its
/// negative log is the selective charging rate.
pub fn selective_contraction(params: &ModelParams, tau: f64) -> Result<f64> {
    let n0 = params.integer_n0()?;
    let sf = sector_frequencies(params, n0);
    Ok((1.0 + (2.0 * sf.g_n * tau).cos()) / 2.0)
}

/// Selective-regime figures of merit from the sector populations of the
/// initial and final distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityFiguresOfMerit {
    /// `omega_l (p_{n0+1}^final - p_{n0+1}^initial)`.
    pub w_tot: f64,
    /// `omega (p_{n0+1} - p_{n0})` of the final state.
    pub ergotropy: f64,
    /// `(omega/omega_l) (p_{n0+1} - p_{n0}) / (p_{n0+1} - p_{n0+1}^initial)`;
    /// infinite marker when no charge flowed into `n0+1`.
    pub eta: f64,
}

pub fn cavity_figures_of_merit(
    params: &ModelParams,
    initial: &CavityState,
    final_state: &CavityState,
) -> Result<CavityFiguresOfMerit> {
    let n0 = params.integer_n0()?;
    if initial.probs.len() <= n0 + 1 || final_state.probs.len() <= n0 + 1 {
        return Err(Error::DimensionMismatch(
            "states do not cover the resonant sector".into(),
        ));
    }
    let p0 = initial.probs[n0 + 1];
    let pf = final_state.probs[n0 + 1];
    let inversion = final_state.probs[n0 + 1] - final_state.probs[n0];
    let w_tot = params.omega_l * (pf - p0);
    let ergotropy = params.omega * inversion;
    let eta = if (pf - p0).abs() < 1e-15 {
        f64::INFINITY
    } else {
        params.omega / params.omega_l * inversion / (pf - p0)
    };
    Ok(CavityFiguresOfMerit { w_tot, ergotropy, eta })
}
