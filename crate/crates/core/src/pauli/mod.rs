//! Pauli-string operator algebra.
//!
//! Strings use the symplectic encoding: bit `q` of `x` and `z` describes the
//! factor on qubit `q` as `I = (0,0)`, `X = (1,0)`, `Z = (0,1)`, `Y = (1,1)`.
//! Qubit 0 is the least significant bit of a computational-basis index and
//! corresponds to site 1 in labels, which are written site 1 leftmost.

mod dense;
mod json;
mod krylov;
mod state;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use dense::{expm_hermitian, phase_insensitive_distance, to_dense, DenseMatrix, Mat2};
pub use krylov::{expm_multiply, hermitian_extremal_norm, spectral_norm, spectral_norm_with};
pub use state::{apply, StateVector};

/// Coefficients with magnitude below this are dropped from a [`PauliSum`].
pub const PRUNE_TOL: f64 = 1e-14;

/// Largest imaginary coefficient part tolerated for a sum to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Upper bound on qubit count imposed by the 64-bit symplectic encoding.
pub const MAX_QUBITS: usize = 64;

/// Largest register held as a full state vector (1 GiB of amplitudes).
pub const MAX_STATE_QUBITS: usize = 26;

/// Default largest qubit count for which dense matrices are built.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

/// Knobs shared by the numerical backends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub dense_limit: usize,
    /// Relative tolerance of iterative spectral norms.
    pub tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            dense_limit: DEFAULT_DENSE_LIMIT,
            tol: 1e-8,
            max_iterations: 10_000,
            seed: 0x5eed_c0de,
        }
    }
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        Err(Error::QubitCount(n))
    } else {
        Ok(())
    }
}

/// Single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of Pauli letters without a coefficient.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x: u64,
    z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn from_bits(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    /// String with the given letters on the given qubit indices (0-based).
    pub fn from_sites<I: IntoIterator<Item = (usize, Pauli)>>(sites: I) -> Self {
        let mut s = Self::IDENTITY;
        for (q, p) in sites {
            s.set(q, p);
        }
        s
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        Self::from_sites([(q, p)])
    }

    pub fn two(q1: usize, p1: Pauli, q2: usize, p2: Pauli) -> Self {
        Self::from_sites([(q1, p1), (q2, p2)])
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        let mask = 1u64 << q;
        self.x = (self.x & !mask) | if x { mask } else { 0 };
        self.z = (self.z & !mask) | if z { mask } else { 0 };
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubit indices carrying a non-identity letter, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.x | self.z;
        (0..64).filter(move |q| (mask >> q) & 1 == 1)
    }

    /// Highest qubit index touched, if any.
    pub fn max_site(&self) -> Option<usize> {
        let mask = self.x | self.z;
        (mask != 0).then(|| 63 - mask.leading_zeros() as usize)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones().is_multiple_of(2)
    }

    /// Matrix product `self · other`, returned as `(k, s)` with the product
    /// equal to `i^k · s`.
    pub fn product(&self, other: &PauliString) -> (u8, PauliString) {
        let (ax, ay, az) = self.letter_masks();
        let (bx, by, bz) = other.letter_masks();
        let pos = (ax & by).count_ones() + (ay & bz).count_ones() + (az & bx).count_ones();
        let neg = (ay & bx).count_ones() + (az & by).count_ones() + (ax & bz).count_ones();
        let k = ((pos + 4 * 64 - neg) % 4) as u8;
        (
            k,
            PauliString {
                x: self.x ^ other.x,
                z: self.z ^ other.z,
            },
        )
    }

    fn letter_masks(&self) -> (u64, u64, u64) {
        (self.x & !self.z, self.x & self.z, !self.x & self.z)
    }

    /// Action on a computational basis state: `P|b> = phase · |b'>`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        let ys = (self.x & self.z).count_ones();
        let sign = (b & self.z).count_ones() % 2;
        let k = (ys + 2 * sign) % 4;
        (i_pow(k as u8), b ^ self.x)
    }

    /// Label over `n` sites, site 1 leftmost.
    pub fn label(&self, n: usize) -> String {
        (0..n).map(|q| self.get(q).letter()).collect()
    }

    /// Parses a label written site 1 leftmost.
    pub fn parse(label: &str) -> Result<(usize, PauliString)> {
        let mut s = PauliString::IDENTITY;
        let mut n = 0;
        for (q, c) in label.chars().enumerate() {
            let p = Pauli::from_letter(c).ok_or_else(|| Error::Pattern(label.to_string()))?;
            s.set(q, p);
            n = q + 1;
        }
        check_qubits(n).map_err(|_| Error::Pattern(label.to_string()))?;
        Ok((n, s))
    }
}

/// `i^k` for `k` taken mod 4.
#[inline]
pub fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A single Pauli string with a complex coefficient on a fixed register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub nqubits: usize,
    pub pattern: PauliString,
    pub coeff: Complex64,
}

impl PauliTerm {
    pub fn new(nqubits: usize, pattern: PauliString, coeff: Complex64) -> Result<Self> {
        check_qubits(nqubits)?;
        if pattern.max_site().is_some_and(|m| m >= nqubits) {
            return Err(Error::Pattern(format!("{pattern:?} on {nqubits} qubits")));
        }
        if !coeff.re.is_finite() || !coeff.im.is_finite() {
            return Err(Error::NonFinite(pattern.label(nqubits)));
        }
        Ok(Self {
            nqubits,
            pattern,
            coeff,
        })
    }

    pub fn parse(label: &str, coeff: Complex64) -> Result<Self> {
        let (n, p) = PauliString::parse(label)?;
        Self::new(n, p, coeff)
    }
}

/// Product of two Pauli terms with the phase folded into the coefficient.
pub fn multiply(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    if a.nqubits != b.nqubits {
        return Err(Error::SizeMismatch {
            left: a.nqubits,
            right: b.nqubits,
        });
    }
    let (k, pattern) = a.pattern.product(&b.pattern);
    Ok(PauliTerm {
        nqubits: a.nqubits,
        pattern,
        coeff: a.coeff * b.coeff * i_pow(k),
    })
}

/// Canonical linear combination of Pauli strings on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        s.add_term(PauliString::IDENTITY, Complex64::new(1.0, 0.0));
        Ok(s)
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        let mut s = Self::zero(n)?;
        for (p, c) in terms {
            s.try_add_term(p, c)?;
        }
        Ok(s)
    }

    /// Parses `(label, coefficient)` pairs; every label must have the same length.
    pub fn from_labels<'a, I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut out: Option<PauliSum> = None;
        for (label, c) in terms {
            let (n, p) = PauliString::parse(label)?;
            let sum = match out.as_mut() {
                Some(s) => s,
                None => out.insert(PauliSum::zero(n)?),
            };
            if sum.n != n {
                return Err(Error::SizeMismatch { left: sum.n, right: n });
            }
            sum.try_add_term(p, Complex64::new(c, 0.0))?;
        }
        out.ok_or_else(|| Error::Pattern(String::new()))
    }

    pub fn from_term(t: &PauliTerm) -> Self {
        let mut s = Self {
            n: t.nqubits,
            terms: BTreeMap::new(),
        };
        s.add_term(t.pattern, t.coeff);
        s
    }

    pub fn nqubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no term survives pruning.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn coeff_of(&self, label: &str) -> Result<Complex64> {
        let (n, p) = PauliString::parse(label)?;
        if n != self.n {
            return Err(Error::SizeMismatch { left: self.n, right: n });
        }
        Ok(self.coeff(&p))
    }

    /// Accumulates `c · p`, dropping the entry if the result is below [`PRUNE_TOL`].
    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        debug_assert!(p.max_site().is_none_or(|m| m < self.n));
        let e = self.terms.entry(p).or_default();
        *e += c;
        if e.norm() < PRUNE_TOL {
            self.terms.remove(&p);
        }
    }

    fn try_add_term(&mut self, p: PauliString, c: Complex64) -> Result<()> {
        if p.max_site().is_some_and(|m| m >= self.n) {
            return Err(Error::Pattern(format!("{:?} on {} qubits", p, self.n)));
        }
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::NonFinite(p.label(self.n)));
        }
        self.add_term(p, c);
        Ok(())
    }

    pub fn add_real(&mut self, p: PauliString, c: f64) {
        self.add_term(p, Complex64::new(c, 0.0));
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, *c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, -*c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> PauliSum {
        let mut out = PauliSum {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (p, v) in &self.terms {
            out.add_term(*p, *v * c);
        }
        out
    }

    /// Operator product `self · other`.
    pub fn product(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = PauliSum::zero(self.n)?;
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                let (k, p) = pa.product(pb);
                out.add_term(p, *ca * *cb * i_pow(k));
            }
        }
        Ok(out)
    }

    /// `self† `: Pauli strings are Hermitian so only coefficients conjugate.
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            n: self.n,
            terms: self.terms.iter().map(|(p, c)| (*p, c.conj())).collect(),
        }
    }

    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_real(&self) -> f64 {
        self.terms.values().map(|c| c.re.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_imag() <= HERMITIAN_TOL
    }

    pub fn is_anti_hermitian(&self) -> bool {
        self.max_real() <= HERMITIAN_TOL
    }

    /// Frobenius norm. `normalized` uses the trace convention `tr(1) = 1`.
    pub fn frobenius_norm(&self, normalized: bool) -> f64 {
        let s = self.terms.values().map(|c| c.norm_sqr()).fold(0.0, |a, b| a + b).sqrt();
        if normalized {
            s
        } else {
            s * 2f64.powf(self.n as f64 / 2.0)
        }
    }

    /// Sum of coefficient magnitudes; an upper bound on the spectral norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, |a, b| a + b)
    }

    /// Keeps the terms whose string satisfies `keep`.
    pub fn filter<F: Fn(&PauliString) -> bool>(&self, keep: F) -> PauliSum {
        PauliSum {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(p, _)| keep(p))
                .map(|(p, c)| (*p, *c))
                .collect(),
        }
    }

    /// Relabels qubit `q` as `perm[q]`.
    pub fn permute_sites(&self, perm: &[usize]) -> Result<PauliSum> {
        if perm.len() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: perm.len(),
            });
        }
        let mut out = PauliSum::zero(self.n)?;
        for (p, c) in &self.terms {
            let q = PauliString::from_sites(p.support().map(|q| (perm[q], p.get(q))));
            out.try_add_term(q, *c)?;
        }
        Ok(out)
    }

    /// Largest coefficient difference against `other`.
    pub fn max_abs_diff(&self, other: &PauliSum) -> Result<f64> {
        Ok(self
            .try_sub(other)?
            .terms
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &PauliSum, tol: f64) -> bool {
        self.max_abs_diff(other).is_ok_and(|d| d <= tol)
    }

    /// Terms as `(label, coefficient)` sorted by label.
    pub fn sorted_labels(&self) -> Vec<(String, Complex64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(p, c)| (p.label(self.n), *c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

/// `ab − ba` in canonical form. Only anticommuting pairs contribute.
pub fn commutator(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    a.check_same(b)?;
    let mut out = PauliSum::zero(a.n)?;
    for (pa, ca) in &a.terms {
        for (pb, cb) in &b.terms {
            if pa.commutes_with(pb) {
                continue;
            }
            let (k, p) = pa.product(pb);
            out.add_term(p, *ca * *cb * i_pow(k) * 2.0);
        }
    }
    Ok(out)
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (label, c)) in self.sorted_labels().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}*{}", c.re, label)?;
            } else {
                write!(f, "({}{:+}i)*{}", c.re, c.im, label)?;
            }
        }
        Ok(())
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;
    /// Panics on a qubit-count mismatch; use [`PauliSum::try_add`] otherwise.
    fn add(self, rhs: &PauliSum) -> PauliSum {
        self.try_add(rhs).expect("qubit count mismatch")
    }
}

impl Add for PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: PauliSum) -> PauliSum {
        &self + &rhs
    }
}

impl AddAssign<&PauliSum> for PauliSum {
    fn add_assign(&mut self, rhs: &PauliSum) {
        assert_eq!(self.n, rhs.n, "qubit count mismatch");
        for (p, c) in &rhs.terms {
            self.add_term(*p, *c);
        }
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: &PauliSum) -> PauliSum {
        self.try_sub(rhs).expect("qubit count mismatch")
    }
}

impl Sub for PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: PauliSum) -> PauliSum {
        &self - &rhs
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<f64> for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: f64) -> PauliSum {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Mul<f64> for PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: f64) -> PauliSum {
        &self * rhs
    }
}

impl Mul<Complex64> for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: Complex64) -> PauliSum {
        self.scale(rhs)
    }
}
