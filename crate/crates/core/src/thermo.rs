//! Per-collision thermodynamic ledger: energy/work/heat splits, entropy
//! production, ergotropy and passive states for diagonal battery states.
//!
//! Sign conventions: `heat` is the energy flowing from the fresh thermal
//! ancilla into the battery, `work` is the energy change of the joint
//! (battery + ancilla) closed system, so `d_energy = work + heat` holds per
//! step by construction and the entropy balance reads
//! `d_entropy = sigma + beta * heat` with `sigma >= 0`.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// Floor for probabilities inside logarithms; `0 ln 0 := 0`.
const LOG_FLOOR: f64 = 1e-300;

/// Probability vector over an energy eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    pub probs: Vec<f64>,
    pub energies: Vec<f64>,
}

impl DiagonalState {
    pub fn new(probs: Vec<f64>, energies: Vec<f64>) -> Result<Self> {
        if probs.len() != energies.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities vs {} energies",
                probs.len(),
                energies.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if p < -1e-12 {
                return Err(Error::NegativeProbability { value: p, index: i });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized((sum - 1.0).abs()));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParams("non-finite energy".into()));
        }
        Ok(DiagonalState { probs, energies })
    }

    /// Gibbs state `exp(-beta H) / Z` over the given energies.
    pub fn thermal(beta: f64, energies: Vec<f64>) -> Self {
        let probs = thermal_probs(beta, &energies);
        DiagonalState { probs, energies }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn mean_energy(&self) -> f64 {
        self.probs.iter().zip(&self.energies).map(|(p, e)| p * e).sum()
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.probs)
    }
}

/// Normalized Boltzmann weights for an energy list.
pub fn thermal_probs(beta: f64, energies: &[f64]) -> Vec<f64> {
    // subtract the ground energy before exponentiating to avoid under/overflow
    let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// Shannon entropy with the `0 ln 0 := 0` convention.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .map(|&p| if p > LOG_FLOOR { p * p.ln() } else { 0.0 })
        .sum::<f64>()
}

/// Von Neumann entropy of a dense Hermitian density matrix.
pub fn von_neumann_entropy(rho: &Array2<C64>) -> Result<f64> {
    let w = linalg::eigvalsh(rho)?;
    Ok(shannon_entropy(&w.to_vec()))
}

/// Relative entropy `D(a || b) = Tr[a ln a - a ln b]`, via eigendecomposition.
///
/// Returns `f64::INFINITY` when the support of `a` escapes the support of `b`.
pub fn relative_entropy(a: &Array2<C64>, b: &Array2<C64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy between {:?} and {:?}",
            a.dim(),
            b.dim()
        )));
    }
    let wa = linalg::eigvalsh(a)?;
    let (wb, vb) = linalg::eigh(b)?;
    let n = wa.len();
    let support_tol = 1e-13;

    // Tr[a ln a]
    let tr_a_ln_a: f64 = wa
        .iter()
        .map(|&p| if p > LOG_FLOOR { p * p.ln() } else { 0.0 })
        .sum();

    // Tr[a ln b] = sum_k <b_k| a |b_k> ln(wb_k), with a support check on the way
    let mut tr_a_ln_b = 0.0;
    for k in 0..n {
        let mut col = Array1::<C64>::zeros(n);
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += a[[i, j]] * vb[[j, k]];
            }
            col[i] = acc;
        }
        let mut w = 0.0;
        for i in 0..n {
            w += (vb[[i, k]].conj() * col[i]).re;
        }
        let w = w.max(0.0);
        if wb[k] <= support_tol {
            if w > 1e-10 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        tr_a_ln_b += w * wb[k].ln();
    }
    Ok(tr_a_ln_a - tr_a_ln_b)
}

/// One collision's entries in the ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// Battery energy change.
    pub d_energy: f64,
    /// Work done on the joint battery + ancilla system.
    pub work: f64,
    /// Heat received from the ancilla.
    pub heat: f64,
    /// Battery von Neumann entropy change.
    pub d_entropy: f64,
    /// Entropy production; NaN when its computation was disabled.
    pub sigma: f64,
}

impl StepRecord {
    /// `(|dE - W - Q|, |dS - Sigma - beta Q|)`; the second is NaN when sigma is.
    pub fn law_residuals(&self, beta: f64) -> (f64, f64) {
        (
            (self.d_energy - self.work - self.heat).abs(),
            (self.d_entropy - self.sigma - beta * self.heat).abs(),
        )
    }
}

/// Which tensor factor of the joint unitary is the battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemSlot {
    /// Joint index `i_sys * d_bath + i_bath`.
    First,
    /// Joint index `i_bath * d_sys + i_sys`.
    Second,
}

/// One repeated-interaction collision, evaluated on the full joint state.
///
/// Forms `rho_sys (x) thermal(bath)`, applies `u`, partial-traces both ways
/// and assembles the ledger entries. The battery state must come back diagonal
/// (true for the block-structured collision unitaries built in this crate);
/// a non-diagonal marginal is reported as an error rather than dephased.
pub fn collision_step(
    system: &DiagonalState,
    bath_energies: &[f64],
    beta: f64,
    u: &Array2<C64>,
    slot: SystemSlot,
    compute_sigma: bool,
) -> Result<(DiagonalState, StepRecord)> {
    let d_sys = system.len();
    let d_bath = bath_energies.len();
    let dim = d_sys * d_bath;
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "unitary is {}x{}, expected {dim}x{dim}",
            u.nrows(),
            u.ncols()
        )));
    }
    let sum: f64 = system.probs.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized((sum - 1.0).abs()));
    }

    let bath_probs = thermal_probs(beta, bath_energies);
    let joint_index = |s: usize, b: usize| match slot {
        SystemSlot::First => s * d_bath + b,
        SystemSlot::Second => b * d_sys + s,
    };

    // rho = rho_sys (x) omega_beta, diagonal
    let mut rho = Array2::<C64>::zeros((dim, dim));
    for s in 0..d_sys {
        for b in 0..d_bath {
            let k = joint_index(s, b);
            rho[[k, k]] = C64::new(system.probs[s] * bath_probs[b], 0.0);
        }
    }

    let rho_after = u.dot(&rho).dot(&linalg::dagger(u));

    let (sys_marginal, bath_marginal) = match slot {
        SystemSlot::First => (
            linalg::trace_out_second(&rho_after, d_sys, d_bath),
            linalg::trace_out_first(&rho_after, d_sys, d_bath),
        ),
        SystemSlot::Second => (
            linalg::trace_out_first(&rho_after, d_bath, d_sys),
            linalg::trace_out_second(&rho_after, d_bath, d_sys),
        ),
    };

    let offdiag = linalg::max_offdiagonal(&sys_marginal);
    if offdiag > 1e-10 {
        return Err(Error::NonDiagonalState(offdiag));
    }

    let new_probs: Vec<f64> = (0..d_sys).map(|s| sys_marginal[[s, s]].re.max(0.0)).collect();
    let new_state = DiagonalState { probs: new_probs, energies: system.energies.clone() };

    let d_energy = new_state.mean_energy() - system.mean_energy();
    let heat: f64 = (0..d_bath)
        .map(|b| bath_energies[b] * (bath_probs[b] - bath_marginal[[b, b]].re))
        .sum();
    // W = Tr[(H_S + H_B)(rho' - rho)] = dE_S + dE_B
    let bath_energy_after: f64 =
        (0..d_bath).map(|b| bath_energies[b] * bath_marginal[[b, b]].re).sum();
    let bath_energy_before: f64 =
        (0..d_bath).map(|b| bath_energies[b] * bath_probs[b]).sum();
    let work = d_energy + (bath_energy_after - bath_energy_before);

    let d_entropy = new_state.entropy() - system.entropy();

    let sigma = if compute_sigma {
        // D(rho' || rho'_S (x) omega_beta) = -S(rho') - Tr[rho' ln(product)]
        // with a diagonal second argument.
        let s_joint = von_neumann_entropy(&rho_after)?;
        let mut tr_ln = 0.0;
        let mut support_violation = false;
        for s in 0..d_sys {
            for b in 0..d_bath {
                let k = joint_index(s, b);
                let diag = rho_after[[k, k]].re;
                let target = new_state.probs[s] * bath_probs[b];
                if target > LOG_FLOOR {
                    tr_ln += diag * target.ln();
                } else if diag > 1e-12 {
                    support_violation = true;
                }
            }
        }
        if support_violation {
            f64::INFINITY
        } else {
            -s_joint - tr_ln
        }
    } else {
        f64::NAN
    };

    Ok((new_state, StepRecord { d_energy, work, heat, d_entropy, sigma }))
}

/// Maximum extractable work by a unitary, plus the passive state left behind.
///
/// Sorts populations descending against energies ascending; the ergotropy is
/// the mean-energy gap to that rearrangement.
pub fn ergotropy(state: &DiagonalState) -> (f64, DiagonalState) {
    let n = state.len();
    let mut energy_order: Vec<usize> = (0..n).collect();
    energy_order.sort_by(|&i, &j| state.energies[i].partial_cmp(&state.energies[j]).unwrap());
    let mut prob_order: Vec<usize> = (0..n).collect();
    prob_order.sort_by(|&i, &j| state.probs[j].partial_cmp(&state.probs[i]).unwrap());

    let mut passive_probs = vec![0.0; n];
    for k in 0..n {
        passive_probs[energy_order[k]] = state.probs[prob_order[k]];
    }
    let passive = DiagonalState { probs: passive_probs, energies: state.energies.clone() };
    let value = state.mean_energy() - passive.mean_energy();
    (value, passive)
}

/// Closed-form total charging work
/// `W_tot = Tr[(H_S - H_S*)(omega_beta(H_S*) - rho_initial)]`
/// for commuting (co-diagonal) `H_S`, `H_S*`.
pub fn total_work_closed_form(
    h_s: &[f64],
    h_s_star: &[f64],
    initial: &DiagonalState,
    beta: f64,
) -> Result<f64> {
    let n = h_s.len();
    if h_s_star.len() != n || initial.len() != n {
        return Err(Error::DimensionMismatch(
            "total_work_closed_form needs co-diagonal operators and state".into(),
        ));
    }
    let equilibrium = thermal_probs(beta, h_s_star);
    Ok((0..n)
        .map(|i| (h_s[i] - h_s_star[i]) * (equilibrium[i] - initial.probs[i]))
        .sum())
}

/// Accumulated per-step records of a charging run.
#[derive(Debug, Clone, Default)]
pub struct ThermoLedger {
    pub steps: Vec<StepRecord>,
}

impl ThermoLedger {
    pub fn push(&mut self, record: StepRecord) {
        self.steps.push(record);
    }

    pub fn cumulative_work(&self) -> f64 {
        self.steps.iter().map(|s| s.work).sum()
    }

    pub fn cumulative_heat(&self) -> f64 {
        self.steps.iter().map(|s| s.heat).sum()
    }

    /// Rows of `(step, dE, W, Q, dS_vN, Sigma, W_cum, Q_cum)`.
    pub fn rows(&self) -> Vec<(usize, StepRecord, f64, f64)> {
        let mut out = Vec::with_capacity(self.steps.len());
        let mut w_cum = 0.0;
        let mut q_cum = 0.0;
        for (i, s) in self.steps.iter().enumerate() {
            w_cum += s.work;
            q_cum += s.heat;
            out.push((i + 1, *s, w_cum, q_cum));
        }
        out
    }
}
