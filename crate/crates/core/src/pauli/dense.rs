//! Dense matrix backend for small registers.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_qubits, PauliSum};
use crate::error::{Error, Result};

/// Square complex matrix acting on `2^n` amplitudes, basis index bit `q` = qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix(pub DMatrix<Complex64>);

/// Single-qubit 2×2 matrix in row-major order.
pub type Mat2 = [[Complex64; 2]; 2];

impl DenseMatrix {
    pub fn identity(nqubits: usize) -> Self {
        let d = 1usize << nqubits;
        Self(DMatrix::identity(d, d))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn nqubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).fold(0.0, |a, b| a + b).sqrt()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.0.clone().singular_values().iter().copied().fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        (&self.0 - &other.0).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U†U − 1|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.0.adjoint() * &self.0;
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        (p - id).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Tensor product of single-qubit matrices, `gates[q]` acting on qubit `q`.
    pub fn product_of_singles(gates: &[Mat2]) -> Result<Self> {
        check_qubits(gates.len())?;
        let d = 1usize << gates.len();
        Ok(Self(DMatrix::from_fn(d, d, |r, c| {
            let mut v = Complex64::new(1.0, 0.0);
            for (q, g) in gates.iter().enumerate() {
                v *= g[(r >> q) & 1][(c >> q) & 1];
                if v == Complex64::default() {
                    break;
                }
            }
            v
        })))
    }

    /// `exp(−i t H)` for Hermitian `H` via eigendecomposition.
    pub fn expm_hermitian(&self, t: f64) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > 1e-10 * (1.0 + self.frobenius_norm()) {
            return Err(Error::NonHermitian(defect));
        }
        let herm = Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0));
        let eig = herm.0.symmetric_eigen();
        let v = eig.eigenvectors;
        let mut w = v.clone();
        for (j, lam) in eig.eigenvalues.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -lam * t);
            for x in w.column_mut(j).iter_mut() {
                *x *= ph;
            }
        }
        Ok(Self(w * v.adjoint()))
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: DenseMatrix) -> DenseMatrix {
        DenseMatrix(self.0 * rhs.0)
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 - &rhs.0)
    }
}

/// Dense matrix of `h`, refusing registers above `limit` qubits.
pub fn to_dense(h: &PauliSum, limit: usize) -> Result<DenseMatrix> {
    let n = h.nqubits();
    if n > limit {
        return Err(Error::DenseLimit { nqubits: n, limit });
    }
    let d = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (p, c) in h.iter() {
        for b in 0..d as u64 {
            let (ph, r) = p.apply_to_basis(b);
            m[(r as usize, b as usize)] += *c * ph;
        }
    }
    Ok(DenseMatrix(m))
}

/// `exp(−i t h)` for a Hermitian Pauli sum.
pub fn expm_hermitian(h: &PauliSum, t: f64, limit: usize) -> Result<DenseMatrix> {
    if !h.is_hermitian() {
        return Err(Error::NonHermitian(h.max_imag()));
    }
    to_dense(h, limit)?.expm_hermitian(t)
}

/// `min_θ ‖U − e^{iθ} V‖₂` with θ taken from the phase of `tr(V†U)`.
pub fn phase_insensitive_distance(u: &DenseMatrix, v: &DenseMatrix) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::SizeMismatch {
            left: u.nqubits(),
            right: v.nqubits(),
        });
    }
    let tr = (v.0.adjoint() * &u.0).trace();
    let ph = if tr.norm() > 0.0 {
        tr / tr.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(DenseMatrix(&u.0 - &v.0 * ph).spectral_norm())
}
