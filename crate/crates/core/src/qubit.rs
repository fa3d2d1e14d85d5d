//! Qubit battery: an atom crossing a sequence of thermal cavities.
//!
//! Tracing the cavity out of one collision leaves a 2x2 column-stochastic map
//! on the diagonal qubit populations whose single parameter is the exchange
//! probability `A_tau`. Iterating drives the qubit to the population-inverted
//! Gibbs state of `H* = omega |g><g|` regardless of the collision times.

use crate::error::{Error, Result};
use crate::model::{
    build_effective_unitary, cavity_energies, qubit_energies, sector_frequencies, ModelParams,
};
use crate::thermo::{
    collision_step, ergotropy, DiagonalState, SystemSlot, ThermoLedger,
};

/// Thermal-averaged exchange probability
/// `A_tau = sum_n (g_n/omega_n)^2 sin^2(omega_n tau) e^{-beta omega n} / Z`.
///
/// The geometric partition function is exact; the sum is truncated once the
/// remaining thermal tail drops below 1e-12, extending past `n_max` if needed.
pub fn a_tau(params: &ModelParams, tau: f64, n_max: usize) -> f64 {
    let x = (-params.beta * params.omega).exp();
    let z = 1.0 / (1.0 - x);
    let tail_tol = 1e-12;
    let mut total = 0.0;
    let mut weight = 1.0 / z; // e^{-beta omega n} / Z at n = 0
    let mut n = 0usize;
    let hard_cap = n_max.max(64) * 64;
    loop {
        total += weight * sector_frequencies(params, n).exchange_weight(tau);
        n += 1;
        weight *= x;
        // remaining thermal mass above n is x^n = weight / (1 - x)
        if n > n_max && weight / (1.0 - x) < tail_tol {
            break;
        }
        if n >= hard_cap {
            break;
        }
    }
    total
}

/// The 2x2 transition matrix `[[1-A, A e^{-beta omega}], [A, 1 - A e^{-beta omega}]]`
/// acting on `(p_g, p_e)`.
pub fn transition_matrix(a: f64, beta_omega: f64) -> [[f64; 2]; 2] {
    let x = (-beta_omega).exp();
    [[1.0 - a, a * x], [a, 1.0 - a * x]]
}

/// One application of the transition matrix.
pub fn qubit_step(state: (f64, f64), a: f64, beta_omega: f64) -> (f64, f64) {
    let m = transition_matrix(a, beta_omega);
    (
        m[0][0] * state.0 + m[0][1] * state.1,
        m[1][0] * state.0 + m[1][1] * state.1,
    )
}

/// Stationary populations `(p_g, p_e) = (e^{-beta omega}, 1) / (1 + e^{-beta omega})`.
pub fn fixed_point(beta_omega: f64) -> (f64, f64) {
    let x = (-beta_omega).exp();
    (x / (1.0 + x), 1.0 / (1.0 + x))
}

/// Execution mode of a charging run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Iterate the 2x2 population map.
    Fast,
    /// Evolve the full joint state each collision and fill a thermodynamic
    /// ledger; `compute_sigma` controls the entropy-production eigensolve.
    FullLedger { compute_sigma: bool },
}

/// Initial qubit preparation; only diagonal states are admitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitInitial {
    /// `omega_beta(H_qubit)`.
    Thermal,
    /// The passive state left after discharging the charged equilibrium state.
    Passive,
    /// Explicit populations `(p_g, p_e)`.
    Probs(f64, f64),
}

impl QubitInitial {
    pub fn populations(&self, params: &ModelParams) -> Result<(f64, f64)> {
        match *self {
            QubitInitial::Thermal => {
                let y = (-params.beta * params.omega_eg()).exp();
                Ok((1.0 / (1.0 + y), y / (1.0 + y)))
            }
            QubitInitial::Passive => {
                let (pg, pe) = fixed_point(params.beta * params.omega);
                Ok((pe, pg))
            }
            QubitInitial::Probs(pg, pe) => {
                if pg < 0.0 || pe < 0.0 || (pg + pe - 1.0).abs() > 1e-12 {
                    return Err(Error::NotNormalized((pg + pe - 1.0).abs()));
                }
                Ok((pg, pe))
            }
        }
    }
}

/// Closed-form figures of merit of the qubit battery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitFiguresOfMerit {
    /// Ergotropy of the charged state, `omega_eg tanh(beta omega / 2)`.
    pub ergotropy: f64,
    /// Total charging work from the thermal initial state.
    pub w_tot_thermal: f64,
    /// Total charging work from the passive initial state, `omega_l tanh(beta omega / 2)`.
    pub w_tot_passive: f64,
    pub eta_thermal: f64,
    pub eta_passive: f64,
    /// Convergence rate `-ln |1 - A_tau (e^{-beta omega} + 1)|`; infinite when
    /// a single collision reaches the fixed point exactly.
    pub rate: f64,
}

/// Evaluate all six closed forms at the params' own `tau`.
pub fn qubit_figures_of_merit(params: &ModelParams, n_max: usize) -> QubitFiguresOfMerit {
    let bw = params.beta * params.omega;
    let gap = params.omega_eg();
    let erg = gap * (bw / 2.0).tanh();

    let x = (-bw).exp();
    let y = (-params.beta * gap).exp();
    let w_thermal = ((params.omega_g - params.omega) * x + params.omega_e) / (1.0 + x)
        - ((params.omega_g - params.omega) + params.omega_e * y) / (1.0 + y);
    let w_passive = params.omega_l * (bw / 2.0).tanh();

    let a = a_tau(params, params.tau, n_max);
    let contraction = 1.0 - a * (x + 1.0);
    let rate = if contraction == 0.0 { f64::INFINITY } else { -contraction.abs().ln() };

    QubitFiguresOfMerit {
        ergotropy: erg,
        w_tot_thermal: w_thermal,
        w_tot_passive: w_passive,
        eta_thermal: erg / w_thermal,
        eta_passive: erg / w_passive,
        rate,
    }
}

/// Trajectory and headline numbers of one charging run.
#[derive(Debug, Clone)]
pub struct QubitChargeReport {
    /// `(p_g, p_e)` per collision, beginning with the initial state.
    pub trajectory: Vec<(f64, f64)>,
    /// Exchange probability at the params' nominal `tau`.
    pub a_tau: f64,
    pub fixed_point: (f64, f64),
    pub figures: QubitFiguresOfMerit,
}

/// Iterate the charging map over the given collision times.
///
/// In `FullLedger` mode each collision also evolves the dense joint state via
/// the effective unitary, records the ledger entries, and uses the partial
/// trace itself as the next population vector (the 2x2 map is its exact
/// restriction, which the tests cross-validate).
pub fn run_qubit_charging(
    params: &ModelParams,
    initial: QubitInitial,
    collision_times: &[f64],
    mode: RunMode,
    n_max: usize,
) -> Result<(QubitChargeReport, Option<ThermoLedger>)> {
    let (pg0, pe0) = initial.populations(params)?;
    let bw = params.beta * params.omega;
    let mut trajectory = Vec::with_capacity(collision_times.len() + 1);
    trajectory.push((pg0, pe0));

    let mut ledger = None;
    match mode {
        RunMode::Fast => {
            let mut state = (pg0, pe0);
            // collisions sharing a duration reuse one A_tau
            let mut cache: Option<(f64, f64)> = None;
            for &t in collision_times {
                let a = match cache {
                    Some((ct, ca)) if ct == t => ca,
                    _ => {
                        let a = a_tau(params, t, n_max);
                        cache = Some((t, a));
                        a
                    }
                };
                state = qubit_step(state, a, bw);
                trajectory.push(state);
            }
        }
        RunMode::FullLedger { compute_sigma } => {
            let mut led = ThermoLedger::default();
            let bath = cavity_energies(params, n_max);
            let mut state =
                DiagonalState::new(vec![pg0, pe0], qubit_energies(params))?;
            let mut cached_t = f64::NAN;
            let mut cached_u = ndarray::Array2::<num_complex::Complex64>::eye(1);
            for &t in collision_times {
                if t != cached_t {
                    let mut p = *params;
                    p.tau = t;
                    cached_u = build_effective_unitary(&p, n_max).matrix;
                    cached_t = t;
                }
                let (next, rec) = collision_step(
                    &state,
                    &bath,
                    params.beta,
                    &cached_u,
                    SystemSlot::First,
                    compute_sigma,
                )?;
                led.push(rec);
                trajectory.push((next.probs[0], next.probs[1]));
                state = next;
            }
            ledger = Some(led);
        }
    }

    let report = QubitChargeReport {
        trajectory,
        a_tau: a_tau(params, params.tau, n_max),
        fixed_point: fixed_point(bw),
        figures: qubit_figures_of_merit(params, n_max),
    };
    Ok((report, ledger))
}

/// Running ergotropy of a population pair across the qubit gap.
pub fn running_ergotropy(params: &ModelParams, pg: f64, pe: f64) -> f64 {
    let state = DiagonalState {
        probs: vec![pg, pe],
        energies: qubit_energies(params),
    };
    ergotropy(&state).0
}
