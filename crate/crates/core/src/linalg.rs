//! Dense complex linear algebra for joint qubit-cavity states.
//!
//! Everything here operates on `ndarray::Array2<Complex64>` at desk scale
//! (dimension a few hundred), so a cyclic Jacobi eigensolver and plain
//! Gaussian elimination are plenty; no external LAPACK is linked.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Max absolute entry of `U^dag U - I`.
pub fn unitarity_residual(u: &Array2<C64>) -> f64 {
    let n = u.nrows();
    let gram = dagger(u).dot(u);
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((gram[[i, j]] - expect).norm());
        }
    }
    worst
}

/// Max absolute entry of the commutator `[a, b]`.
pub fn commutator_max_norm(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let c = a.dot(b) - b.dot(a);
    c.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Commutator norm with a diagonal operator, skipping rows/columns in `excluded`.
pub fn commutator_with_diagonal_excluding(
    u: &Array2<C64>,
    diag: &[f64],
    excluded: &[usize],
) -> f64 {
    // [U, D]_{ij} = U_{ij} (D_jj - D_ii)
    let n = u.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        if excluded.contains(&i) {
            continue;
        }
        for j in 0..n {
            if excluded.contains(&j) {
                continue;
            }
            worst = worst.max((u[[i, j]] * (diag[j] - diag[i])).norm());
        }
    }
    worst
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &Array2<C64>) -> C64 {
    let n = a.nrows();
    let mut m = a.clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[[col, col]].norm();
        for row in col + 1..n {
            let mag = m[[row, col]].norm();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[[col, k]];
                m[[col, k]] = m[[pivot, k]];
                m[[pivot, k]] = tmp;
            }
            det = -det;
        }
        let d = m[[col, col]];
        det *= d;
        for row in col + 1..n {
            let f = m[[row, col]] / d;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let sub = f * m[[col, k]];
                m[[row, k]] -= sub;
            }
        }
    }
    det
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues ascending and the matching unitary of column
/// eigenvectors, so `a = v diag(w) v^dag`.
pub fn eigh(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut m = a.clone();
    let mut v = Array2::<C64>::eye(n);
    let scale: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let tol = 1e-14 * scale;
    let max_sweeps = 60;

    for sweep in 0..=max_sweeps {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    s += m[[p, q]].norm_sqr();
                }
            }
            s.sqrt()
        };
        if off < tol {
            break;
        }
        if sweep == max_sweeps {
            return Err(Error::EigenNoConvergence(max_sweeps));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                let b = apq.norm();
                if b < tol / (n as f64) {
                    continue;
                }
                let phase = apq / b;
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                // zero the (p,q) entry of the 2x2 Hermitian block
                let theta = (aqq - app) / (2.0 * b);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_ph = phase * s;
                // column update: M <- M * U, with U_pp = c, U_qp = s e^{-i phi},
                // U_pq = -s e^{i phi}, U_qq = c
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = mkp * c + mkq * s_ph.conj();
                    m[[k, q]] = -mkp * s_ph + mkq * c;
                }
                // row update: M <- U^dag * M
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = mpk * c + mqk * s_ph;
                    m[[q, k]] = -mpk * s_ph.conj() + mqk * c;
                }
                // accumulate eigenvectors
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * c + vkq * s_ph.conj();
                    v[[k, q]] = -vkp * s_ph + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let w = Array1::from_iter(order.iter().map(|&i| vals[i]));
    let mut vs = Array2::<C64>::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vs[[k, new_col]] = v[[k, old_col]];
        }
    }
    Ok((w, vs))
}

/// Eigenvalues only; see [`eigh`].
pub fn eigvalsh(a: &Array2<C64>) -> Result<Array1<f64>> {
    eigh(a).map(|(w, _)| w)
}

/// Partial trace over the second tensor factor; joint index is `i1 * d2 + i2`.
pub fn trace_out_second(rho: &Array2<C64>, d1: usize, d2: usize) -> Array2<C64> {
    let mut out = Array2::<C64>::zeros((d1, d1));
    for i in 0..d1 {
        for j in 0..d1 {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d2 {
                acc += rho[[i * d2 + k, j * d2 + k]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Partial trace over the first tensor factor; joint index is `i1 * d2 + i2`.
pub fn trace_out_first(rho: &Array2<C64>, d1: usize, d2: usize) -> Array2<C64> {
    let mut out = Array2::<C64>::zeros((d2, d2));
    for k in 0..d2 {
        for l in 0..d2 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d1 {
                acc += rho[[i * d2 + k, i * d2 + l]];
            }
            out[[k, l]] = acc;
        }
    }
    out
}

/// Largest off-diagonal magnitude, used to certify states that must be diagonal.
pub fn max_offdiagonal(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(a[[i, j]].norm());
            }
        }
    }
    worst
}
