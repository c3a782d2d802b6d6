//! Iterative spectral norm and propagator action for registers beyond the dense limit.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{apply_kernel, kernel_terms};
use super::{to_dense, Numerics, PauliSum, StateVector, MAX_STATE_QUBITS};
use crate::error::{Error, Result};

/// Registers up to this size use a dense eigensolve or SVD for norms.
const DENSE_NORM_QUBITS: usize = 7;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).fold(0.0, |a, b| a + b).sqrt()
}

/// Largest `|λ|` of a Hermitian operator given only its action, by Lanczos.
pub fn hermitian_extremal_norm<F>(dim: usize, op: F, num: &Numerics) -> Result<f64>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let start = StateVector::random(dim.trailing_zeros() as usize, num.seed)?;
    let mut v = start.into_amplitudes();
    let mut v_prev = vec![Complex64::default(); dim];
    let mut w = vec![Complex64::default(); dim];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut beta_prev = 0.0;
    let mut next_check = 4;
    for k in 0..num.max_iterations {
        op(&v, &mut w);
        let alpha = dot(&v, &w).re;
        for i in 0..dim {
            w[i] -= v[i] * alpha + v_prev[i] * beta_prev;
        }
        let beta = norm(&w);
        alphas.push(alpha);
        let scale = alphas.iter().map(|a| a.abs()).fold(beta, f64::max);
        let breakdown = beta <= 1e-13 * scale.max(1e-300) || k + 1 == dim;
        if breakdown || k + 1 >= next_check {
            let m = alphas.len();
            let t = DMatrix::from_fn(m, m, |r, c| {
                if r == c {
                    alphas[r]
                } else if r + 1 == c {
                    betas[r]
                } else if c + 1 == r {
                    betas[c]
                } else {
                    0.0
                }
            });
            let eig = t.symmetric_eigen();
            let (j, theta) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(j, th)| (j, th.abs()))
                .unwrap_or((0, 0.0));
            let resid = beta * eig.eigenvectors[(m - 1, j)].abs();
            if breakdown || resid <= num.tol * theta {
                return Ok(theta);
            }
            next_check = k + 1 + (m / 8).max(4);
        }
        betas.push(beta);
        std::mem::swap(&mut v_prev, &mut v);
        for i in 0..dim {
            v[i] = w[i] / beta;
        }
        beta_prev = beta;
    }
    Err(Error::NoConvergence {
        what: "Lanczos spectral norm",
        iterations: num.max_iterations,
    })
}

/// Operator 2-norm of `h` with default numerics.
pub fn spectral_norm(h: &PauliSum) -> Result<f64> {
    spectral_norm_with(h, &Numerics::default())
}

/// Operator 2-norm of `h`. Hermitian and anti-Hermitian sums use Lanczos on
/// `h` or `i h`; any other sum uses `h† h`.
pub fn spectral_norm_with(h: &PauliSum, num: &Numerics) -> Result<f64> {
    if h.is_zero() {
        return Ok(0.0);
    }
    let n = h.nqubits();
    if n <= DENSE_NORM_QUBITS.min(num.dense_limit) {
        let m = to_dense(h, num.dense_limit)?;
        return Ok(if h.is_hermitian() {
            m.hermitian_eigenvalues().into_iter().fold(0.0, |a, l| a.max(l.abs()))
        } else {
            m.spectral_norm()
        });
    }
    if n > MAX_STATE_QUBITS {
        return Err(Error::StateLimit {
            nqubits: n,
            limit: MAX_STATE_QUBITS,
        });
    }
    let dim = 1usize << n;
    if h.is_hermitian() {
        let t = kernel_terms(h);
        hermitian_extremal_norm(dim, |v, o| apply_kernel(&t, v, o), num)
    } else if h.is_anti_hermitian() {
        let t = kernel_terms(&h.scale(Complex64::new(0.0, 1.0)));
        hermitian_extremal_norm(dim, |v, o| apply_kernel(&t, v, o), num)
    } else {
        let t = kernel_terms(h);
        let td = kernel_terms(&h.adjoint());
        let mut tmp = vec![Complex64::default(); dim];
        let tmp_cell = std::cell::RefCell::new(&mut tmp);
        let sq = hermitian_extremal_norm(
            dim,
            |v, o| {
                let mut buf = tmp_cell.borrow_mut();
                apply_kernel(&t, v, &mut buf);
                apply_kernel(&td, &buf, o);
            },
            num,
        )?;
        Ok(sq.sqrt())
    }
}

/// `exp(−i t h)|ψ>` by substepped Taylor series.
pub fn expm_multiply(h: &PauliSum, t: f64, psi: &StateVector) -> Result<StateVector> {
    if h.nqubits() != psi.nqubits() {
        return Err(Error::SizeMismatch {
            left: h.nqubits(),
            right: psi.nqubits(),
        });
    }
    let terms = kernel_terms(h);
    let steps = (h.one_norm() * t.abs()).ceil().max(1.0) as usize;
    let tau = t / steps as f64;
    let dim = psi.amplitudes().len();
    let mut cur = psi.amplitudes().to_vec();
    let mut term = vec![Complex64::default(); dim];
    let mut next = vec![Complex64::default(); dim];
    for _ in 0..steps {
        term.copy_from_slice(&cur);
        let mut k = 1;
        loop {
            apply_kernel(&terms, &term, &mut next);
            let f = Complex64::new(0.0, -tau / k as f64);
            for i in 0..dim {
                term[i] = next[i] * f;
                cur[i] += term[i];
            }
            let tn = norm(&term);
            if tn <= 1e-17 * norm(&cur).max(1e-300) {
                break;
            }
            k += 1;
            if k > 80 {
                return Err(Error::NoConvergence {
                    what: "Taylor propagator",
                    iterations: k,
                });
            }
        }
    }
    StateVector::from_amplitudes(cur)
}
