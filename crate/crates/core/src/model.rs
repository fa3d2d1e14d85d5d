//! Model parameters and the effective joint dynamics on a truncated Fock space.
//!
//! The working frame is a driven atom whose far-detuned upper level has been
//! eliminated, leaving a qubit {|g>, |e>} coupled to one cavity mode with an
//! anti-Jaynes-Cummings structure: |g,n> pairs with |e,n+1>. Natural units
//! hbar = k_B = 1 throughout; all frequencies share one arbitrary unit.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// All physical rates and the inverse temperature, in natural units.
///
/// Couplings `rabi` (laser) and `g` (cavity) are real and non-negative;
/// relative phases are gauge and never enter observables. The laser frequency
/// is fixed by the two-channel resonance condition `omega_l = omega_eg + omega`
/// and the Stark shift `epsilon` is bijectively tied to the resonance index
/// `n0` (see [`epsilon_from_n0`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Qubit ground level frequency.
    pub omega_g: f64,
    /// Qubit excited level frequency.
    pub omega_e: f64,
    /// Cavity mode frequency.
    pub omega: f64,
    /// Laser frequency (derived: `omega_eg + omega`).
    pub omega_l: f64,
    /// Laser coupling strength.
    pub rabi: f64,
    /// Atom-cavity coupling strength.
    pub g: f64,
    /// Detuning of the eliminated level.
    pub delta: f64,
    /// DC Stark shift on |g>, active only during a collision.
    pub epsilon: f64,
    /// Resonance index; integer when selectivity is intended.
    pub n0: f64,
    /// Inverse temperature.
    pub beta: f64,
    /// Interaction duration per collision.
    pub tau: f64,
}

/// Stark shift from the resonance index: `epsilon = rabi^2/delta - g^2 (n0+1)/delta`.
pub fn epsilon_from_n0(rabi: f64, g: f64, delta: f64, n0: f64) -> f64 {
    (rabi * rabi - g * g * (n0 + 1.0)) / delta
}

/// Resonance index from the Stark shift; undefined when `g = 0`.
pub fn n0_from_epsilon(rabi: f64, g: f64, delta: f64, epsilon: f64) -> Result<f64> {
    if g == 0.0 {
        return Err(Error::DegenerateCoupling);
    }
    Ok((rabi * rabi - epsilon * delta) / (g * g) - 1.0)
}

impl ModelParams {
    /// Build from the physically meaningful knob set with `n0` independent.
    /// The ground level is gauged to zero; energy offsets cancel in every
    /// ledger quantity.
    #[allow(clippy::too_many_arguments)]
    pub fn with_n0(
        omega_eg: f64,
        omega: f64,
        rabi: f64,
        g: f64,
        delta: f64,
        n0: f64,
        beta: f64,
        tau: f64,
    ) -> Result<Self> {
        let p = ModelParams {
            omega_g: 0.0,
            omega_e: omega_eg,
            omega,
            omega_l: omega_eg + omega,
            rabi,
            g,
            delta,
            epsilon: epsilon_from_n0(rabi, g, delta, n0),
            n0,
            beta,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    /// Build with `epsilon` as the independent knob (`n0` derived; needs `g != 0`).
    #[allow(clippy::too_many_arguments)]
    pub fn with_epsilon(
        omega_eg: f64,
        omega: f64,
        rabi: f64,
        g: f64,
        delta: f64,
        epsilon: f64,
        beta: f64,
        tau: f64,
    ) -> Result<Self> {
        let n0 = n0_from_epsilon(rabi, g, delta, epsilon)?;
        let p = ModelParams {
            omega_g: 0.0,
            omega_e: omega_eg,
            omega,
            omega_l: omega_eg + omega,
            rabi,
            g,
            delta,
            epsilon,
            n0,
            beta,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_e > self.omega_g) {
            return Err(Error::InvalidParams(format!(
                "omega_e ({}) must exceed omega_g ({})",
                self.omega_e, self.omega_g
            )));
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidParams(format!("omega must be > 0, got {}", self.omega)));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParams(format!("delta must be > 0, got {}", self.delta)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParams(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.tau < 0.0 {
            return Err(Error::InvalidParams(format!("tau must be >= 0, got {}", self.tau)));
        }
        if self.rabi < 0.0 || self.g < 0.0 {
            return Err(Error::InvalidParams(
                "couplings rabi and g are taken real non-negative".into(),
            ));
        }
        let laser = self.omega_e - self.omega_g + self.omega;
        if (self.omega_l - laser).abs() > 1e-12 * laser.abs().max(1.0) {
            return Err(Error::InvalidParams(format!(
                "omega_l = {} violates omega_l = omega_eg + omega = {}",
                self.omega_l, laser
            )));
        }
        let eps = epsilon_from_n0(self.rabi, self.g, self.delta, self.n0);
        if (self.epsilon - eps).abs() > 1e-12 * eps.abs().max(1.0) {
            return Err(Error::InvalidParams(format!(
                "epsilon = {} inconsistent with n0 = {} (expected {})",
                self.epsilon, self.n0, eps
            )));
        }
        Ok(())
    }

    /// Qubit gap `omega_e - omega_g`.
    pub fn omega_eg(&self) -> f64 {
        self.omega_e - self.omega_g
    }

    /// `n0` rounded to the nearest integer, if it is one (within 1e-9).
    pub fn integer_n0(&self) -> Result<usize> {
        let rounded = self.n0.round();
        if (self.n0 - rounded).abs() > 1e-9 || rounded < 0.0 {
            return Err(Error::NonIntegerN0(self.n0));
        }
        Ok(rounded as usize)
    }

    /// Thermal mean photon number of the cavity mode.
    pub fn mean_photon_number(&self) -> f64 {
        1.0 / ((self.beta * self.omega).exp() - 1.0)
    }

    /// Default Fock truncation: generous for both the resonance window and the
    /// thermal tail (keeps tails below 1e-12 for the figure presets).
    pub fn default_n_max(&self) -> usize {
        let from_n0 = (4.0 * self.n0.max(0.0)).ceil() as usize;
        let from_thermal = (self.mean_photon_number().ceil() as usize) * 10;
        from_n0.max(from_thermal).max(64)
    }
}

/// Detuning, coupling and Rabi frequency of one anti-Jaynes-Cummings sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorFrequencies {
    pub n: usize,
    /// `g^2 (n - n0) / delta`
    pub delta_n: f64,
    /// `rabi * g * sqrt(n+1) / delta`
    pub g_n: f64,
    /// `sqrt(delta_n^2/4 + g_n^2)`
    pub omega_n: f64,
}

/// Auxiliary frequencies of the sector {|g,n>, |e,n+1>}.
pub fn sector_frequencies(params: &ModelParams, n: usize) -> SectorFrequencies {
    let delta_n = params.g * params.g / params.delta * (n as f64 - params.n0);
    let g_n = params.rabi * params.g / params.delta * ((n as f64) + 1.0).sqrt();
    let omega_n = (delta_n * delta_n / 4.0 + g_n * g_n).sqrt();
    SectorFrequencies { n, delta_n, g_n, omega_n }
}

impl SectorFrequencies {
    /// Probability weight `(g_n/omega_n)^2 sin^2(omega_n t)` of a |g,n> <-> |e,n+1>
    /// exchange, evaluated through `sinc` so the `omega_n -> 0` sector is exact.
    pub fn exchange_weight(&self, t: f64) -> f64 {
        let amp = self.g_n * t * sinc(self.omega_n * t);
        amp * amp
    }
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Basis ordering over the truncated joint space: all |g,n> first, then all
/// |e,n>, with n = 0..=n_max. Dimension is `2 (n_max + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLayout {
    pub n_max: usize,
}

impl BasisLayout {
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn g_index(&self, n: usize) -> usize {
        debug_assert!(n <= self.n_max);
        n
    }

    pub fn e_index(&self, n: usize) -> usize {
        debug_assert!(n <= self.n_max);
        self.n_max + 1 + n
    }
}

/// Dense unitary on the truncated joint space, together with its layout.
#[derive(Debug, Clone)]
pub struct JointUnitary {
    pub layout: BasisLayout,
    pub matrix: Array2<C64>,
}

impl JointUnitary {
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Max-norm unitarity defect; stays below 1e-12 for all builders here.
    pub fn unitarity_residual(&self) -> f64 {
        crate::linalg::unitarity_residual(&self.matrix)
    }
}

/// Endpoint propagator of one collision in the interaction picture.
///
/// Each sector {|g,n>, |e,n+1>} carries the 2x2 block
/// `[[cos + i (delta_n/2 omega_n) sin, -i (g_n/omega_n) sin],
///   [-i (g_n/omega_n) sin,  cos - i (delta_n/2 omega_n) sin]]`
/// at phase `omega_n tau`; |e,0> is an exact fixed vector. The block that
/// would couple |g,n_max> out of the truncated space is replaced by the
/// identity on |g,n_max>, which keeps the matrix exactly unitary.
pub fn build_effective_unitary(params: &ModelParams, n_max: usize) -> JointUnitary {
    assert!(n_max >= 1, "n_max must be at least 1");
    let layout = BasisLayout { n_max };
    let mut u = Array2::<C64>::zeros((layout.dim(), layout.dim()));
    let tau = params.tau;

    u[[layout.e_index(0), layout.e_index(0)]] = C64::new(1.0, 0.0);
    u[[layout.g_index(n_max), layout.g_index(n_max)]] = C64::new(1.0, 0.0);

    for n in 0..n_max {
        let sf = sector_frequencies(params, n);
        let phase = sf.omega_n * tau;
        let cos = phase.cos();
        // (x / omega_n) sin(omega_n tau) written as x * tau * sinc, exact at omega_n = 0
        let half_det = sf.delta_n / 2.0 * tau * sinc(phase);
        let exch = sf.g_n * tau * sinc(phase);
        let gi = layout.g_index(n);
        let ei = layout.e_index(n + 1);
        u[[gi, gi]] = C64::new(cos, half_det);
        u[[ei, ei]] = C64::new(cos, -half_det);
        u[[gi, ei]] = C64::new(0.0, -exch);
        u[[ei, gi]] = C64::new(0.0, -exch);
    }
    JointUnitary { layout, matrix: u }
}

/// High-selectivity limit of the collision propagator (`g >> rabi`, integer n0):
/// a Rabi block at `g_n0 tau` on {|g,n0>, |e,n0+1>}, pure phases
/// `exp(+-i delta_n tau / 2)` on every other sector, |e,0> fixed.
pub fn build_selective_unitary(params: &ModelParams, n_max: usize) -> Result<JointUnitary> {
    let n0 = params.integer_n0()?;
    if n0 >= n_max {
        return Err(Error::InvalidParams(format!(
            "selective unitary needs n0 < n_max, got n0 = {n0}, n_max = {n_max}"
        )));
    }
    let layout = BasisLayout { n_max };
    let mut u = Array2::<C64>::zeros((layout.dim(), layout.dim()));
    let tau = params.tau;

    u[[layout.e_index(0), layout.e_index(0)]] = C64::new(1.0, 0.0);
    u[[layout.g_index(n_max), layout.g_index(n_max)]] = C64::new(1.0, 0.0);

    for n in 0..n_max {
        let gi = layout.g_index(n);
        let ei = layout.e_index(n + 1);
        if n == n0 {
            let sf = sector_frequencies(params, n);
            let angle = sf.g_n * tau;
            u[[gi, gi]] = C64::new(angle.cos(), 0.0);
            u[[ei, ei]] = C64::new(angle.cos(), 0.0);
            u[[gi, ei]] = C64::new(0.0, -angle.sin());
            u[[ei, gi]] = C64::new(0.0, -angle.sin());
        } else {
            let sf = sector_frequencies(params, n);
            let half = sf.delta_n * tau / 2.0;
            u[[gi, gi]] = C64::new(half.cos(), half.sin());
            u[[ei, ei]] = C64::new(half.cos(), -half.sin());
        }
    }
    Ok(JointUnitary { layout, matrix: u })
}

/// Diagonal of the free Hamiltonian `omega_g |g><g| + omega_e |e><e| + omega n`.
pub fn free_hamiltonian(params: &ModelParams, n_max: usize) -> Array1<f64> {
    let layout = BasisLayout { n_max };
    let mut h = Array1::<f64>::zeros(layout.dim());
    for n in 0..=n_max {
        h[layout.g_index(n)] = params.omega_g + n as f64 * params.omega;
        h[layout.e_index(n)] = params.omega_e + n as f64 * params.omega;
    }
    h
}

/// Qubit energies `[omega_g, omega_e]`.
pub fn qubit_energies(params: &ModelParams) -> Vec<f64> {
    vec![params.omega_g, params.omega_e]
}

/// Cavity energies `[0, omega, 2 omega, ...]` up to `n_max`.
pub fn cavity_energies(params: &ModelParams, n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| n as f64 * params.omega).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig2_params() -> ModelParams {
        ModelParams::with_n0(1.3, 1.0, 1.0, 1.8, 8.0, 10.5, 10.0, 1.0).unwrap()
    }

    #[test]
    fn sector_frequencies_at_resonance_index() {
        // integer n0: detuning vanishes and omega_n = g_n
        let p = ModelParams::with_n0(1.0, 1.0, 0.7, 1.2, 9.0, 4.0, 1.0, 1.0).unwrap();
        let sf = sector_frequencies(&p, 4);
        assert_abs_diff_eq!(sf.delta_n, 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(sf.omega_n, sf.g_n, epsilon = 1e-15);
    }

    #[test]
    fn sector_frequencies_without_laser() {
        let p = ModelParams::with_n0(1.0, 1.0, 0.0, 1.2, 9.0, 4.0, 1.0, 1.0).unwrap();
        for n in [0, 1, 7] {
            let sf = sector_frequencies(&p, n);
            assert_eq!(sf.g_n, 0.0);
            assert_abs_diff_eq!(sf.omega_n, sf.delta_n.abs() / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn sector_frequencies_fig2_point() {
        // frozen from an independent high-precision evaluation of the formulas
        let sf = sector_frequencies(&fig2_params(), 10);
        assert_abs_diff_eq!(sf.delta_n, -0.2025, epsilon = 1e-15);
        assert_abs_diff_eq!(sf.g_n, 0.7462405778299650, epsilon = 1e-14);
        assert_abs_diff_eq!(sf.omega_n, 0.7530780587030803, epsilon = 1e-14);
        // cross-check the quadrature identity
        assert_abs_diff_eq!(
            sf.omega_n * sf.omega_n,
            sf.delta_n * sf.delta_n / 4.0 + sf.g_n * sf.g_n,
            epsilon = 1e-16
        );
    }

    #[test]
    fn quadrature_identity_large_n() {
        let p = fig2_params();
        for n in [0usize, 1, 17, 1_000, 250_000, 1_000_000] {
            let sf = sector_frequencies(&p, n);
            let lhs = sf.omega_n * sf.omega_n;
            let rhs = sf.delta_n * sf.delta_n / 4.0 + sf.g_n * sf.g_n;
            assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn epsilon_n0_round_trip() {
        // direct substitution example: rabi = 0, g = delta = 1, n0 = 0 -> epsilon = -1
        assert_abs_diff_eq!(epsilon_from_n0(0.0, 1.0, 1.0, 0.0), -1.0, epsilon = 0.0);
        // bijection on assorted values
        for (rabi, g, delta, n0) in [(1.0, 1.8, 8.0, 10.5), (0.3, 0.9, 40.0, 2.0), (2.0, 0.1, 12.0, 0.25)]
        {
            let eps = epsilon_from_n0(rabi, g, delta, n0);
            let back = n0_from_epsilon(rabi, g, delta, eps).unwrap();
            assert_abs_diff_eq!(back, n0, epsilon = 1e-10);
        }
        assert!(matches!(
            n0_from_epsilon(1.0, 0.0, 8.0, 0.1),
            Err(Error::DegenerateCoupling)
        ));
    }

    #[test]
    fn effective_unitary_identity_at_tau_zero() {
        let mut p = fig2_params();
        p.tau = 0.0;
        let u = build_effective_unitary(&p, 12);
        for i in 0..u.dim() {
            for j in 0..u.dim() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(u.matrix[[i, j]].re, expect, epsilon = 0.0);
                assert_abs_diff_eq!(u.matrix[[i, j]].im, 0.0, epsilon = 0.0);
            }
        }
    }

    #[test]
    fn e0_column_is_fixed() {
        let p = fig2_params();
        let u = build_effective_unitary(&p, 20);
        let e0 = u.layout.e_index(0);
        for i in 0..u.dim() {
            let expect = if i == e0 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(u.matrix[[i, e0]].norm(), expect, epsilon = 0.0);
        }
    }

    #[test]
    fn engineered_pi_pulse_flips_sign() {
        // single resonant sector with g_n tau = pi gives block = -identity
        let n0 = 3.0;
        // choose rabi, g, delta so g_3 * tau = pi: g_3 = rabi*g*2/delta
        let tau = 1.0;
        let rabi = std::f64::consts::PI / 2.0;
        let p = ModelParams::with_n0(1.0, 1.0, rabi, 1.0, 1.0, n0, 1.0, tau).unwrap();
        let sf = sector_frequencies(&p, 3);
        assert_abs_diff_eq!(sf.g_n * tau, std::f64::consts::PI, epsilon = 1e-12);
        let u = build_effective_unitary(&p, 8);
        let gi = u.layout.g_index(3);
        let ei = u.layout.e_index(4);
        assert_abs_diff_eq!(u.matrix[[gi, gi]].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.matrix[[ei, ei]].re, -1.0, epsilon = 1e-12);
        assert!(u.matrix[[gi, ei]].norm() < 1e-12);
    }

    #[test]
    fn unitarity_of_builders() {
        let p = fig2_params();
        let u = build_effective_unitary(&p, 40);
        assert!(u.unitarity_residual() < 1e-12);

        let ps = ModelParams::with_n0(1.3, 1.0, 0.1, 58.0, 94.0, 5.0, 1.0, 1.0).unwrap();
        let us = build_selective_unitary(&ps, 40).unwrap();
        assert!(us.unitarity_residual() < 1e-12);
    }

    #[test]
    fn selective_swap_at_quarter_period() {
        // g_n0 tau = pi/2 exchanges |g,n0> and |e,n0+1> up to a -i phase
        let n0 = 5.0;
        let g = 10.0;
        let delta = 20.0;
        // g_n0 = rabi*g*sqrt(6)/delta = pi/2 with tau = 1
        let rabi = std::f64::consts::FRAC_PI_2 * delta / (g * 6.0_f64.sqrt());
        let p = ModelParams::with_n0(1.0, 1.0, rabi, g, delta, n0, 1.0, 1.0).unwrap();
        let u = build_selective_unitary(&p, 12).unwrap();
        let gi = u.layout.g_index(5);
        let ei = u.layout.e_index(6);
        assert!(u.matrix[[gi, gi]].norm() < 1e-12);
        assert_abs_diff_eq!(u.matrix[[ei, gi]].im, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.matrix[[gi, ei]].im, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn selective_requires_integer_n0() {
        let p = fig2_params(); // n0 = 10.5
        assert!(matches!(build_selective_unitary(&p, 20), Err(Error::NonIntegerN0(_))));
    }

    #[test]
    fn selective_matches_effective_in_strong_coupling_limit() {
        // g/rabi = 1e3: the resonant-sector block agrees to 1e-4 (it is exact
        // up to rounding since delta_n0 = 0), and the whole-matrix deviation is
        // controlled by the largest off-sector mixing ratio g_n/omega_n.
        let n0 = 3.0;
        let delta = 4000.0;
        let g = 60.0;
        let rabi = 0.06;
        let n_max = 10;
        let p = ModelParams::with_n0(1.0, 1.0, rabi, g, delta, n0, 1.0, 1.0).unwrap();
        let eff = build_effective_unitary(&p, n_max);
        let sel = build_selective_unitary(&p, n_max).unwrap();

        let gi = eff.layout.g_index(3);
        let ei = eff.layout.e_index(4);
        for (i, j) in [(gi, gi), (gi, ei), (ei, gi), (ei, ei)] {
            assert!(
                (eff.matrix[[i, j]] - sel.matrix[[i, j]]).norm() < 1e-4,
                "resonant sector entry ({i},{j}) deviates"
            );
        }

        let mixing = (0..n_max)
            .filter(|&n| n != 3)
            .map(|n| {
                let sf = sector_frequencies(&p, n);
                sf.g_n / sf.omega_n
            })
            .fold(0.0_f64, f64::max);
        let mut worst = 0.0_f64;
        for i in 0..eff.dim() {
            for j in 0..eff.dim() {
                worst = worst.max((eff.matrix[[i, j]] - sel.matrix[[i, j]]).norm());
            }
        }
        assert!(
            worst < 5.0 * mixing,
            "whole-matrix deviation {worst} not controlled by mixing {mixing}"
        );
    }

    #[test]
    fn free_hamiltonian_entries() {
        let p = fig2_params();
        let h = free_hamiltonian(&p, 6);
        let layout = BasisLayout { n_max: 6 };
        assert_abs_diff_eq!(h[layout.g_index(0)], p.omega_g, epsilon = 0.0);
        assert_abs_diff_eq!(h[layout.e_index(3)], p.omega_e + 3.0 * p.omega, epsilon = 0.0);
    }

    #[test]
    fn thermal_fock_energy_matches_geometric_series() {
        // Tr[H rho_th] over |g,n> pattern = omega_g + omega * nbar
        let p = ModelParams::with_n0(1.3, 0.7, 1.0, 1.8, 8.0, 10.5, 0.9, 1.0).unwrap();
        let n_max = 220;
        let h = free_hamiltonian(&p, n_max);
        let layout = BasisLayout { n_max };
        let z: f64 = (0..=n_max).map(|n| (-p.beta * p.omega * n as f64).exp()).sum();
        let energy: f64 = (0..=n_max)
            .map(|n| (-p.beta * p.omega * n as f64).exp() / z * h[layout.g_index(n)])
            .sum();
        let nbar = p.mean_photon_number();
        assert_abs_diff_eq!(energy, p.omega_g + p.omega * nbar, epsilon = 1e-10);
    }

    #[test]
    fn determinant_magnitude_is_one() {
        let p = fig2_params();
        let u = build_effective_unitary(&p, 30); // dim 62
        assert_abs_diff_eq!(crate::linalg::determinant(&u.matrix).norm(), 1.0, epsilon = 1e-10);
        let ps = ModelParams::with_n0(1.3, 1.0, 0.1, 58.0, 94.0, 5.0, 1.0, 1.0).unwrap();
        let us = build_selective_unitary(&ps, 63).unwrap(); // dim 128
        assert_abs_diff_eq!(crate::linalg::determinant(&us.matrix).norm(), 1.0, epsilon = 1e-10);
    }
}
