//! Matrix-free action of Pauli sums on state vectors.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::dense::Mat2;
use super::{check_qubits, i_pow, PauliSum, MAX_STATE_QUBITS};
use crate::error::{Error, Result};

/// Amplitudes over `2^n` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: u64) -> Result<Self> {
        check_qubits(n)?;
        if n > MAX_STATE_QUBITS {
            return Err(Error::StateLimit {
                nqubits: n,
                limit: MAX_STATE_QUBITS,
            });
        }
        let mut amps = vec![Complex64::default(); 1usize << n];
        let i = index as usize;
        if i >= amps.len() {
            return Err(Error::Params(format!("basis index {index} out of range")));
        }
        amps[i] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Basis state from a bitstring written site 1 leftmost.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let mut idx = 0u64;
        for (q, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => idx |= 1 << q,
                _ => return Err(Error::Params(format!("bad bitstring {bits:?}"))),
            }
        }
        Self::basis(bits.len(), idx)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let d = amps.len();
        if !d.is_power_of_two() || d < 2 {
            return Err(Error::Params(format!("amplitude count {d} is not 2^n")));
        }
        let n = d.trailing_zeros() as usize;
        Ok(Self { n, amps })
    }

    /// Normalized state with i.i.d. Gaussian-like amplitudes from a seeded stream.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        check_qubits(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let mut s = Self { n, amps };
        s.normalize();
        Ok(s)
    }

    pub fn nqubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).fold(0.0, |a, b| a + b).sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `<ψ|h|ψ>`.
    pub fn expectation(&self, h: &PauliSum) -> Result<Complex64> {
        Ok(self.inner(&apply(h, self)?))
    }

    /// `min_θ ‖self − e^{iθ} other‖`.
    pub fn phase_insensitive_distance(&self, other: &StateVector) -> f64 {
        let ov = other.inner(self);
        let ph = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * ph).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Applies a single-qubit matrix to qubit `q` in place.
    pub fn apply_single(&mut self, q: usize, g: &Mat2) {
        let bit = 1usize << q;
        self.amps.par_chunks_mut(bit << 1).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(bit);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (v0, v1) = (*a0, *a1);
                *a0 = g[0][0] * v0 + g[0][1] * v1;
                *a1 = g[1][0] * v0 + g[1][1] * v1;
            }
        });
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= c);
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: Complex64, other: &StateVector) {
        self.amps.iter_mut().zip(&other.amps).for_each(|(a, b)| *a += c * b);
    }
}

/// Term table used by the matrix-free kernels: `(x, z, c·i^{#Y})`.
pub(crate) fn kernel_terms(h: &PauliSum) -> Vec<(u64, u64, Complex64)> {
    h.iter()
        .map(|(p, c)| {
            let ys = (p.x_bits() & p.z_bits()).count_ones();
            (p.x_bits(), p.z_bits(), *c * i_pow(ys as u8))
        })
        .collect()
}

pub(crate) fn apply_kernel(terms: &[(u64, u64, Complex64)], v: &[Complex64], out: &mut [Complex64]) {
    out.par_iter_mut().enumerate().for_each(|(r, o)| {
        let r = r as u64;
        let mut acc = Complex64::default();
        for &(x, z, c) in terms {
            let b = r ^ x;
            let amp = v[b as usize];
            if (b & z).count_ones() % 2 == 1 {
                acc -= c * amp;
            } else {
                acc += c * amp;
            }
        }
        *o = acc;
    });
}

/// `h|ψ>` without forming a matrix.
pub fn apply(h: &PauliSum, v: &StateVector) -> Result<StateVector> {
    if h.nqubits() != v.n {
        return Err(Error::SizeMismatch {
            left: h.nqubits(),
            right: v.n,
        });
    }
    let terms = kernel_terms(h);
    let mut out = vec![Complex64::default(); v.amps.len()];
    apply_kernel(&terms, &v.amps, &mut out);
    Ok(StateVector { n: v.n, amps: out })
}
