//! Hamiltonian constructors: lab frame, quad-frame effective forms, the
//! toggled families used by the compiler, and the explicit time-dependent
//! "original" Hamiltonians behind the synthesis-error estimates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{Boundary, DeviceParams, DriveConfig, Driven, Lattice};
use crate::error::{Error, Result};
use crate::pauli::{i_pow, Pauli, PauliString, PauliSum};

/// Frequencies closer than this (absolute, or relative above 1) are merged; smaller ones count as static.
const FREQ_TOL: f64 = 1e-9;

/// Real trigonometric polynomial `c₀ + Σ (aᵢ cos ωᵢt + bᵢ sin ωᵢt)` with `ωᵢ > 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Signal {
    /// `(ω, a, b)` sorted by `ω`; the `ω = 0` entry holds the constant in `a`.
    parts: Vec<(f64, f64, f64)>,
}

impl Signal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut s = Self::zero();
        s.push(0.0, c, 0.0);
        s
    }

    /// `a cos(ωt + φ)`.
    pub fn cos(a: f64, omega: f64, phase: f64) -> Self {
        let mut s = Self::zero();
        s.push(omega, a * phase.cos(), -a * phase.sin());
        s
    }

    /// `a sin(ωt + φ)`.
    pub fn sin(a: f64, omega: f64, phase: f64) -> Self {
        let mut s = Self::zero();
        s.push(omega, a * phase.sin(), a * phase.cos());
        s
    }

    fn push(&mut self, omega: f64, a: f64, b: f64) {
        let (w, b) = if omega < 0.0 { (-omega, -b) } else { (omega, b) };
        let b = if w <= FREQ_TOL { 0.0 } else { b };
        let w = if w <= FREQ_TOL { 0.0 } else { w };
        let pos = self
            .parts
            .iter()
            .position(|&(f, _, _)| (f - w).abs() <= FREQ_TOL * f.max(w).max(1.0));
        match pos {
            Some(i) => {
                self.parts[i].1 += a;
                self.parts[i].2 += b;
            }
            None => {
                let at = self.parts.partition_point(|&(f, _, _)| f < w);
                self.parts.insert(at, (w, a, b));
            }
        }
    }

    fn pruned(mut self) -> Self {
        self.parts
            .retain(|&(_, a, b)| a.abs() > crate::pauli::PRUNE_TOL || b.abs() > crate::pauli::PRUNE_TOL);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[(f64, f64, f64)] {
        &self.parts
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.parts
            .iter()
            .map(|&(w, a, b)| {
                if w == 0.0 {
                    a
                } else {
                    let (s, c) = (w * t).sin_cos();
                    a * c + b * s
                }
            })
            .sum()
    }

    /// `∫_{t0}^{t1}` evaluated exactly.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        self.parts
            .iter()
            .map(|&(w, a, b)| {
                if w == 0.0 {
                    a * (t1 - t0)
                } else {
                    (a * ((w * t1).sin() - (w * t0).sin()) - b * ((w * t1).cos() - (w * t0).cos())) / w
                }
            })
            .sum()
    }

    /// Time derivative.
    pub fn derivative(&self) -> Self {
        let mut s = Self::zero();
        for &(w, a, b) in &self.parts {
            if w != 0.0 {
                s.push(w, b * w, -a * w);
            }
        }
        s.pruned()
    }

    /// Upper bound on `|s(t)|`.
    pub fn amplitude_bound(&self) -> f64 {
        self.parts.iter().map(|&(_, a, b)| a.abs() + b.abs()).sum()
    }

    pub fn max_frequency(&self) -> f64 {
        self.parts.last().map_or(0.0, |p| p.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            parts: self.parts.iter().map(|&(w, a, b)| (w, a * c, b * c)).collect(),
        }
        .pruned()
    }

    pub fn add(&self, other: &Signal) -> Self {
        let mut s = self.clone();
        for &(w, a, b) in &other.parts {
            s.push(w, a, b);
        }
        s.pruned()
    }

    /// Product, expanded by product-to-sum identities.
    pub fn mul(&self, other: &Signal) -> Self {
        let mut s = Self::zero();
        for &(w1, a1, b1) in &self.parts {
            for &(w2, a2, b2) in &other.parts {
                // cos·cos, sin·sin, cos·sin, sin·cos
                s.push(w1 - w2, 0.5 * (a1 * a2 + b1 * b2), 0.5 * (b1 * a2 - a1 * b2));
                s.push(w1 + w2, 0.5 * (a1 * a2 - b1 * b2), 0.5 * (a1 * b2 + b1 * a2));
            }
        }
        s.pruned()
    }

    /// Drops every component with frequency above `cutoff`.
    pub fn low_pass(&self, cutoff: f64) -> Self {
        Self {
            parts: self.parts.iter().copied().filter(|p| p.0 <= cutoff).collect(),
        }
    }
}

/// `Σ_P s_P(t) · P`: a Pauli sum whose real coefficients are trigonometric polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDependentHamiltonian {
    n: usize,
    terms: BTreeMap<PauliString, Signal>,
}

impl TimeDependentHamiltonian {
    pub fn new(n: usize) -> Result<Self> {
        crate::pauli::check_qubits(n)?;
        Ok(Self {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_static(h: &PauliSum) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::NonHermitian(h.max_imag()));
        }
        let mut td = Self::new(h.nqubits())?;
        for (p, c) in h.iter() {
            td.add(*p, Signal::constant(c.re));
        }
        Ok(td)
    }

    pub fn nqubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Signal)> {
        self.terms.iter()
    }

    pub fn add(&mut self, p: PauliString, s: Signal) {
        let merged = match self.terms.get(&p) {
            Some(old) => old.add(&s),
            None => s.pruned(),
        };
        if merged.is_zero() {
            self.terms.remove(&p);
        } else {
            self.terms.insert(p, merged);
        }
    }

    pub fn add_all(&mut self, other: &TimeDependentHamiltonian) {
        for (p, s) in &other.terms {
            self.add(*p, s.clone());
        }
    }

    pub fn sub_static(&self, h: &PauliSum) -> Result<Self> {
        let mut out = self.clone();
        out.add_all(&Self::from_static(h)?.scale(-1.0));
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (p, s) in &self.terms {
            out.add(*p, s.scale(c));
        }
        out
    }

    /// Instantaneous operator `H(t)`.
    pub fn at(&self, t: f64) -> PauliSum {
        let mut out = PauliSum::zero(self.n).expect("validated qubit count");
        for (p, s) in &self.terms {
            out.add_real(*p, s.eval(t));
        }
        out
    }

    /// `∫_{t0}^{t1} H(s) ds`.
    pub fn integral(&self, t0: f64, t1: f64) -> PauliSum {
        let mut out = PauliSum::zero(self.n).expect("validated qubit count");
        for (p, s) in &self.terms {
            out.add_real(*p, s.integral(t0, t1));
        }
        out
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (p, s) in &self.terms {
            out.add(*p, s.derivative());
        }
        out
    }

    /// Time-independent part.
    pub fn static_part(&self) -> PauliSum {
        self.low_pass(0.0).at(0.0)
    }

    pub fn low_pass(&self, cutoff: f64) -> Self {
        let mut out = Self {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (p, s) in &self.terms {
            out.add(*p, s.low_pass(cutoff));
        }
        out
    }

    /// Distinct nonzero frequencies, ascending.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut all = Signal::zero();
        for s in self.terms.values() {
            for &(w, _, _) in s.parts() {
                all.push(w, 1.0, 0.0);
            }
        }
        all.parts.iter().map(|p| p.0).filter(|&w| w > 0.0).collect()
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.values().map(Signal::max_frequency).fold(0.0, f64::max)
    }

    /// Bound on `‖H(t)‖` valid for every `t`.
    pub fn norm_bound(&self) -> f64 {
        self.terms.values().map(Signal::amplitude_bound).sum()
    }

    /// Conjugation `U† H U` by `U = exp(−i α(t) A_q / 2)` with `α = ω t + α₀`,
    /// plus the frame term `−i U† dU/dt = −(ω/2) A_q`.
    pub fn rotate_site(&self, q: usize, axis: Pauli, omega: f64, alpha0: f64) -> Self {
        let a = PauliString::single(q, axis);
        let mut out = Self {
            n: self.n,
            terms: BTreeMap::new(),
        };
        let (cos, sin) = (Signal::cos(1.0, omega, alpha0), Signal::sin(1.0, omega, alpha0));
        for (p, s) in &self.terms {
            if p.commutes_with(&a) {
                out.add(*p, s.clone());
                continue;
            }
            // U† L U = L cos α − i sin α · L A
            out.add(*p, s.mul(&cos));
            let (k, la) = p.product(&a);
            let f = (Complex64::new(0.0, -1.0) * i_pow(k)).re;
            out.add(la, s.mul(&sin).scale(f));
        }
        if omega != 0.0 {
            out.add(a, Signal::constant(-omega / 2.0));
        }
        out
    }
}

/// Every Hamiltonian family the crate can build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    LabFrame2q,
    LabFrameNq,
    QfEffective,
    QfEffectiveOdd,
    QfEffectiveEven,
    Control,
    Org,
    DeltaH,
    HEven,
    HOdd,
    HEvenPrime,
    HOddPrime,
    H1,
    H2,
    HZz,
    HXy1d,
    /// Two-dimensional analogue of `Control`: `J Σ x_s (z_{s+î} + z_{s+ĵ})`.
    HQf2d,
    H2dOdd,
    H2dEven,
    HI,
    HIi,
    HXy2d,
    HE,
    HEPrime,
    HEDoublePrime,
    HHeis,
    OrgXy,
    DeltaXy,
    OrgZz,
    DeltaZz,
}

impl HamiltonianKind {
    pub const ALL: [HamiltonianKind; 30] = [
        Self::LabFrame2q,
        Self::LabFrameNq,
        Self::QfEffective,
        Self::QfEffectiveOdd,
        Self::QfEffectiveEven,
        Self::Control,
        Self::Org,
        Self::DeltaH,
        Self::HEven,
        Self::HOdd,
        Self::HEvenPrime,
        Self::HOddPrime,
        Self::H1,
        Self::H2,
        Self::HZz,
        Self::HXy1d,
        Self::HQf2d,
        Self::H2dOdd,
        Self::H2dEven,
        Self::HI,
        Self::HIi,
        Self::HXy2d,
        Self::HE,
        Self::HEPrime,
        Self::HEDoublePrime,
        Self::HHeis,
        Self::OrgXy,
        Self::DeltaXy,
        Self::OrgZz,
        Self::DeltaZz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::LabFrame2q => "lab_frame_2q",
            Self::LabFrameNq => "lab_frame_nq",
            Self::QfEffective => "qf_effective",
            Self::QfEffectiveOdd => "qf_effective_odd",
            Self::QfEffectiveEven => "qf_effective_even",
            Self::Control => "control",
            Self::Org => "org",
            Self::DeltaH => "delta_h",
            Self::HEven => "h_even",
            Self::HOdd => "h_odd",
            Self::HEvenPrime => "h_even_prime",
            Self::HOddPrime => "h_odd_prime",
            Self::H1 => "h1",
            Self::H2 => "h2",
            Self::HZz => "h_zz",
            Self::HXy1d => "h_xy_1d",
            Self::HQf2d => "h_qf_2d",
            Self::H2dOdd => "h_2d_odd",
            Self::H2dEven => "h_2d_even",
            Self::HI => "h_i",
            Self::HIi => "h_ii",
            Self::HXy2d => "h_xy_2d",
            Self::HE => "h_e",
            Self::HEPrime => "h_e_prime",
            Self::HEDoublePrime => "h_e_double_prime",
            Self::HHeis => "h_heis",
            Self::OrgXy => "org_xy",
            Self::DeltaXy => "delta_xy",
            Self::OrgZz => "org_zz",
            Self::DeltaZz => "delta_zz",
        }
    }

    /// Families that need device parameters (and possibly a time).
    pub fn needs_device(self) -> bool {
        matches!(
            self,
            Self::LabFrame2q
                | Self::LabFrameNq
                | Self::QfEffective
                | Self::Org
                | Self::DeltaH
                | Self::OrgXy
                | Self::DeltaXy
                | Self::OrgZz
                | Self::DeltaZz
        )
    }

    pub fn is_2d(self) -> bool {
        matches!(
            self,
            Self::HQf2d | Self::H2dOdd | Self::H2dEven | Self::HI | Self::HIi | Self::HXy2d
        )
    }
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HamiltonianKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::Params(format!("unknown Hamiltonian kind {s:?}")))
    }
}

fn two(q1: usize, p1: Pauli, q2: usize, p2: Pauli) -> PauliString {
    PauliString::two(q1, p1, q2, p2)
}

/// Nearest-neighbour chain bonds as `(k, q, q')` with `k` the 1-based left site.
pub fn chain_bonds(lat: &Lattice) -> Vec<(usize, usize, usize)> {
    let n = lat.nqubits();
    let last = match lat.boundary {
        Boundary::Open => n.saturating_sub(1),
        Boundary::Periodic if n > 2 => n,
        Boundary::Periodic => n.saturating_sub(1),
    };
    (1..=last).map(|k| (k, k - 1, k % n)).collect()
}

/// Square-lattice bonds `((a, b), s, s')` from site `(a, b)` towards `+î` and `+ĵ`.
pub fn square_bonds(lat: &Lattice) -> Vec<((usize, usize), usize, usize)> {
    let mut out = Vec::new();
    for b in 1..=lat.ny {
        for a in 1..=lat.nx {
            let s = lat.site(a, b).expect("in range");
            for (c, d) in [(a + 1, b), (a, b + 1)] {
                if let Some(t) = lat.site(c, d) {
                    out.push(((a, b), s, t));
                }
            }
        }
    }
    out
}

fn chain_family<F>(lat: &Lattice, j: f64, letters: F) -> Result<PauliSum>
where
    F: Fn(usize) -> Vec<Pauli>,
{
    if lat.dim != 1 {
        return Err(Error::Params("chain family requested on a 2D lattice".into()));
    }
    let n = lat.nqubits();
    if lat.boundary == Boundary::Periodic && n % 2 == 1 {
        return Err(Error::Params(format!(
            "periodic chain of odd length {n} breaks the even/odd bond alternation"
        )));
    }
    let mut h = PauliSum::zero(n)?;
    for (k, q1, q2) in chain_bonds(lat) {
        for l in letters(k) {
            h.add_real(two(q1, l, q2, l), j);
        }
    }
    Ok(h)
}

fn square_family<F>(lat: &Lattice, j: f64, letters: F) -> Result<PauliSum>
where
    F: Fn(usize, usize) -> Vec<Pauli>,
{
    if lat.dim != 2 {
        return Err(Error::Params("2D family requested on a chain".into()));
    }
    lat.require_even_tiling()?;
    let mut h = PauliSum::zero(lat.nqubits())?;
    for ((a, b), s, t) in square_bonds(lat) {
        for l in letters(a, b) {
            h.add_real(two(s, l, t, l), j);
        }
    }
    Ok(h)
}

/// Odd/even-driven quad-frame Hamiltonian `J Σ x_c (x_t cos φ + y_t sin φ)` over
/// control sites `c` of the given parity (1-based: odd → 1, 3, …).
pub fn qf_parity(lat: &Lattice, j: f64, phi: f64, driven: Driven) -> Result<PauliSum> {
    if lat.dim != 1 {
        return Err(Error::Params("driven-parity forms are defined on chains".into()));
    }
    let n = lat.nqubits();
    let mut h = PauliSum::zero(n)?;
    for (k, q1, q2) in chain_bonds(lat) {
        let control = match driven {
            Driven::OddOnly => k % 2 == 1,
            Driven::EvenOnly => k % 2 == 0,
            Driven::All => true,
        };
        if control {
            h.add_real(two(q1, Pauli::X, q2, Pauli::X), j * phi.cos());
            h.add_real(two(q1, Pauli::X, q2, Pauli::Y), j * phi.sin());
        }
    }
    Ok(h)
}

/// Time-independent families with a single coupling `J`.
pub fn build_canonical(kind: HamiltonianKind, lat: &Lattice, j: f64) -> Result<PauliSum> {
    use HamiltonianKind as K;
    use Pauli::{X, Y, Z};
    let odd = |k: usize| k % 2 == 1;
    match kind {
        K::Control => {
            if lat.dim != 1 {
                return Err(Error::Params("control Hamiltonian is a chain form".into()));
            }
            let mut h = PauliSum::zero(lat.nqubits())?;
            for (_, q1, q2) in chain_bonds(lat) {
                h.add_real(two(q1, X, q2, Z), j);
            }
            Ok(h)
        }
        K::QfEffectiveOdd => qf_parity(lat, j, 0.0, Driven::OddOnly),
        K::QfEffectiveEven => qf_parity(lat, j, 0.0, Driven::EvenOnly),
        K::HEven | K::HE => chain_family(lat, j, |k| vec![if odd(k) { X } else { Z }]),
        K::HOdd => chain_family(lat, j, |k| vec![if odd(k) { Z } else { X }]),
        K::HEvenPrime => chain_family(lat, j, |k| vec![if odd(k) { X } else { Y }]),
        K::HOddPrime => chain_family(lat, j, |k| vec![if odd(k) { Y } else { X }]),
        K::HEPrime => chain_family(lat, j, |k| vec![if odd(k) { Z } else { Y }]),
        K::HEDoublePrime => chain_family(lat, j, |k| vec![if odd(k) { Y } else { X }]),
        K::H1 => chain_family(lat, j, |k| if odd(k) { vec![Z] } else { vec![] }),
        K::H2 => chain_family(lat, j, |k| if odd(k) { vec![] } else { vec![Z] }),
        K::HZz => chain_family(lat, j, |_| vec![Z]),
        K::HXy1d => chain_family(lat, j, |_| vec![X, Y]),
        K::HHeis => chain_family(lat, j, |_| vec![X, Y, Z]),
        K::HQf2d => {
            if lat.dim != 2 {
                return Err(Error::Params("2D family requested on a chain".into()));
            }
            lat.require_even_tiling()?;
            let mut h = PauliSum::zero(lat.nqubits())?;
            for (_, s, t) in square_bonds(lat) {
                h.add_real(two(s, X, t, Z), j);
            }
            Ok(h)
        }
        K::H2dOdd => square_family(lat, j, |a, b| vec![if (a + b) % 2 == 0 { Z } else { X }]),
        K::H2dEven => square_family(lat, j, |a, b| vec![if (a + b) % 2 == 0 { X } else { Z }]),
        K::HI => square_family(lat, j, |a, b| vec![if (a + b) % 2 == 0 { X } else { Y }]),
        K::HIi => square_family(lat, j, |a, b| vec![if (a + b) % 2 == 0 { Y } else { X }]),
        K::HXy2d => square_family(lat, j, |_, _| vec![X, Y]),
        other => Err(Error::Params(format!(
            "{other} depends on device parameters; use the device-aware builders"
        ))),
    }
}

/// Lab-frame Hamiltonian `Σ [ω_q z/2 + Ω cos(ωt + φ) x] + Σ g x x / 2` as a signal map.
pub fn lab_frame(p: &DeviceParams) -> Result<TimeDependentHamiltonian> {
    p.validate()?;
    let n = p.n();
    let mut h = TimeDependentHamiltonian::new(n)?;
    for k in 0..n {
        h.add(PauliString::single(k, Pauli::Z), Signal::constant(p.omega_q[k] / 2.0));
        if p.drive[k] != 0.0 {
            h.add(
                PauliString::single(k, Pauli::X),
                Signal::cos(p.drive[k], p.omega[k], p.phi[k]),
            );
        }
    }
    for k in 0..p.nbonds() {
        let k2 = (k + 1) % n;
        if k2 != k {
            h.add(two(k, Pauli::X, k2, Pauli::X), Signal::constant(p.g[k] / 2.0));
        }
    }
    Ok(h)
}

/// Lab-frame Hamiltonian evaluated at time `t`.
pub fn build_lab_frame(p: &DeviceParams, t: f64) -> Result<PauliSum> {
    Ok(lab_frame(p)?.at(t))
}

/// Effective quad-frame Hamiltonian for a drive pattern.
///
/// All driven: `Σ J_k x_k (z_{k+1} cos Δφ_k − y_{k+1} sin Δφ_k)` with the signed
/// `J_k = −g_k Ω_k/(4δ_k)`. Odd or even only: `Σ (g Ω/4δ) x_c (x_t cos φ_c + y_t sin φ_c)`
/// over the driven controls.
pub fn build_qf_effective(p: &DeviceParams, d: DriveConfig) -> Result<PauliSum> {
    p.validate()?;
    let n = p.n();
    let mut h = PauliSum::zero(n)?;
    for k in 0..p.nbonds() {
        let k2 = (k + 1) % n;
        let control = match d.driven {
            Driven::All => true,
            _ => d.driven.is_control(k, n),
        };
        if !control {
            if d.driven != Driven::All && p.drive[k] != 0.0 {
                return Err(Error::Params(format!(
                    "qubit {} is driven but is not a control of the {:?} pattern",
                    k + 1,
                    d.driven
                )));
            }
            continue;
        }
        let jk = crate::device::effective_coupling(p, k)?;
        if jk == 0.0 {
            continue;
        }
        match d.driven {
            Driven::All => {
                let dphi = p.phi[k] - p.phi[k2];
                h.add_real(two(k, Pauli::X, k2, Pauli::Z), jk * dphi.cos());
                h.add_real(two(k, Pauli::X, k2, Pauli::Y), -jk * dphi.sin());
            }
            _ => {
                let phi = p.phi[k] - p.phi[k2];
                h.add_real(two(k, Pauli::X, k2, Pauli::X), -jk * phi.cos());
                h.add_real(two(k, Pauli::X, k2, Pauli::Y), -jk * phi.sin());
            }
        }
    }
    if d.driven != Driven::All && p.drive.last().is_some_and(|&o| o != 0.0) && p.boundary == Boundary::Open {
        return Err(Error::Params("last qubit of an open chain has no target".into()));
    }
    Ok(h)
}

/// Quad-frame Hamiltonian after the first rotating-wave approximation only,
/// with exact mixing angles: every bond term is the doubly rotated coupling
/// conjugated by the `U_3`, `U_4` rotations of both qubits.
pub fn qf_exact(p: &DeviceParams) -> Result<TimeDependentHamiltonian> {
    p.validate()?;
    let n = p.n();
    let mut out = TimeDependentHamiltonian::new(n)?;
    for k in 0..p.nbonds() {
        let k2 = (k + 1) % n;
        if k2 == k {
            continue;
        }
        let g4 = p.g[k] / 4.0;
        let w = p.omega[k] - p.omega[k2];
        let ph = p.phi[k] - p.phi[k2];
        let mut b = TimeDependentHamiltonian::new(n)?;
        let cos = Signal::cos(g4, w, ph);
        let sin = Signal::sin(g4, w, ph);
        b.add(two(k, Pauli::X, k2, Pauli::X), cos.clone());
        b.add(two(k, Pauli::Y, k2, Pauli::Y), cos);
        b.add(two(k, Pauli::X, k2, Pauli::Y), sin.clone());
        b.add(two(k, Pauli::Y, k2, Pauli::X), sin.scale(-1.0));
        for q in [k, k2] {
            b = b.rotate_site(q, Pauli::Y, 0.0, -p.xi(q));
            b = rotate_without_frame_term(&b, q, Pauli::X, p.eta(q));
        }
        out.add_all(&b);
    }
    Ok(out)
}

/// Conjugation by `exp(−i ω t A_q/2)` without the `−(ω/2) A_q` frame term;
/// used where the local terms that the frame term cancels are not carried.
fn rotate_without_frame_term(
    h: &TimeDependentHamiltonian,
    q: usize,
    axis: Pauli,
    omega: f64,
) -> TimeDependentHamiltonian {
    let mut r = h.rotate_site(q, axis, omega, 0.0);
    if omega != 0.0 {
        r.add(PauliString::single(q, axis), Signal::constant(omega / 2.0));
    }
    r
}

fn uniform_ratio(p: &DeviceParams) -> Result<(f64, f64, f64)> {
    let (g, d, om) = p.uniform()?;
    if d == 0.0 {
        return Err(Error::ZeroDetuning(1));
    }
    Ok((g, d, om / d))
}

fn open_bonds(p: &DeviceParams) -> Vec<(usize, usize)> {
    let n = p.n();
    (0..p.nbonds())
        .map(|k| (k, (k + 1) % n))
        .filter(|(a, b)| a != b)
        .collect()
}

/// Original-Hamiltonian families as explicit signal maps (uniform parameters).
pub fn org_td(kind: HamiltonianKind, p: &DeviceParams) -> Result<TimeDependentHamiltonian> {
    use Pauli::{X, Y, Z};
    let (g, d, r) = uniform_ratio(p)?;
    let g4 = g / 4.0;
    let n = p.n();
    let mut h = TimeDependentHamiltonian::new(n)?;
    let c1 = Signal::cos(g4, d, 0.0);
    let s1 = Signal::sin(g4, d, 0.0);
    let c2 = Signal::cos(g4 * r, 2.0 * d, 0.0);
    let s2 = Signal::sin(g4 * r, 2.0 * d, 0.0);
    let k0 = Signal::constant(g4 * r);
    for (a, b) in open_bonds(p) {
        let t = |l1: Pauli, l2: Pauli| two(a, l1, b, l2);
        match kind {
            HamiltonianKind::Org | HamiltonianKind::DeltaH => {
                h.add(t(Z, Z), c1.clone());
                h.add(t(Y, Y), c1.clone());
                h.add(t(Y, Z), s1.clone());
                h.add(t(Z, Y), s1.scale(-1.0));
                h.add(t(X, Z), k0.scale(-1.0));
                h.add(t(Z, X), c2.scale(-1.0));
                h.add(t(Y, X), s2.scale(-1.0));
            }
            HamiltonianKind::OrgXy | HamiltonianKind::DeltaXy => {
                h.add(t(Y, Y), k0.scale(-1.0));
                h.add(t(X, X), k0.scale(-1.0));
                h.add(t(X, Y), c1.clone());
                h.add(t(Y, X), c1.clone());
                h.add(t(Z, Z), c1.scale(-2.0));
                h.add(t(Z, Y), s1.clone());
                h.add(t(Z, X), s1.scale(-1.0));
                h.add(t(X, Z), s1.clone());
                h.add(t(Y, Z), s1.scale(-1.0));
                h.add(t(Z, Y), s2.clone());
                h.add(t(Z, X), s2.scale(-1.0));
                h.add(t(Y, Y), c2.scale(-1.0));
                h.add(t(X, X), c2.scale(-1.0));
            }
            HamiltonianKind::OrgZz | HamiltonianKind::DeltaZz => {
                let dphi = p.phi[a] - p.phi[b];
                // φ_k(t) = δt + Δφ_k
                let cphi = Signal::cos(1.0, d, dphi);
                let sphi = Signal::sin(1.0, d, dphi);
                let cd = Signal::cos(g4, d, 0.0);
                let sd = Signal::sin(g4, d, 0.0);
                h.add(t(Z, Z), k0.clone());
                h.add(t(X, Z), cd.scale(-1.0));
                h.add(t(Y, Z), sd.clone());
                h.add(t(Y, Y), cd.clone());
                h.add(t(X, Y), sd.clone());
                // cos φ_k [ z(z r − x cos δt + y sin δt) + y(y cos δt + x sin δt) ]
                h.add(t(Z, Z), cphi.mul(&k0));
                h.add(t(Z, X), cphi.mul(&cd).scale(-1.0));
                h.add(t(Z, Y), cphi.mul(&sd));
                h.add(t(Y, Y), cphi.mul(&cd));
                h.add(t(Y, X), cphi.mul(&sd));
                // sin φ_k [ −z(y cos δt + x sin δt) + y(z r − x cos δt + y sin δt) ]
                h.add(t(Z, Y), sphi.mul(&cd).scale(-1.0));
                h.add(t(Z, X), sphi.mul(&sd).scale(-1.0));
                h.add(t(Y, Z), sphi.mul(&k0));
                h.add(t(Y, X), sphi.mul(&cd).scale(-1.0));
                h.add(t(Y, Y), sphi.mul(&sd));
            }
            other => return Err(Error::Params(format!("{other} is not an original-Hamiltonian family"))),
        }
    }
    let delta_kind = matches!(
        kind,
        HamiltonianKind::DeltaH | HamiltonianKind::DeltaXy | HamiltonianKind::DeltaZz
    );
    if delta_kind {
        h = h.sub_static(&effective_for(kind, p)?)?;
    }
    Ok(h)
}

/// Effective Hamiltonian subtracted from each original family.
pub fn effective_for(kind: HamiltonianKind, p: &DeviceParams) -> Result<PauliSum> {
    use Pauli::{X, Y, Z};
    let (g, _, r) = uniform_ratio(p)?;
    let j = -g * r / 4.0;
    let mut h = PauliSum::zero(p.n())?;
    for (a, b) in open_bonds(p) {
        match kind {
            HamiltonianKind::Org | HamiltonianKind::DeltaH => h.add_real(two(a, X, b, Z), j),
            HamiltonianKind::OrgXy | HamiltonianKind::DeltaXy => {
                h.add_real(two(a, X, b, X), j);
                h.add_real(two(a, Y, b, Y), j);
            }
            HamiltonianKind::OrgZz | HamiltonianKind::DeltaZz => h.add_real(two(a, Z, b, Z), -j),
            other => return Err(Error::Params(format!("{other} has no effective counterpart"))),
        }
    }
    Ok(h)
}

pub fn build_org(kind: HamiltonianKind, p: &DeviceParams, t: f64) -> Result<PauliSum> {
    match kind {
        HamiltonianKind::Org | HamiltonianKind::OrgXy | HamiltonianKind::OrgZz => Ok(org_td(kind, p)?.at(t)),
        other => Err(Error::Params(format!("{other} is not an original-Hamiltonian family"))),
    }
}

pub fn build_delta(kind: HamiltonianKind, p: &DeviceParams, t: f64) -> Result<PauliSum> {
    match kind {
        HamiltonianKind::DeltaH | HamiltonianKind::DeltaXy | HamiltonianKind::DeltaZz => Ok(org_td(kind, p)?.at(t)),
        other => Err(Error::Params(format!("{other} is not a synthesis-error family"))),
    }
}

/// Single entry point used by the CLI.
pub fn build(kind: HamiltonianKind, lat: &Lattice, j: f64, device: Option<&DeviceParams>, t: f64) -> Result<PauliSum> {
    if !kind.needs_device() {
        return build_canonical(kind, lat, j);
    }
    let p = device.ok_or_else(|| Error::Params(format!("{kind} needs device parameters")))?;
    match kind {
        HamiltonianKind::LabFrame2q => {
            if p.n() != 2 {
                return Err(Error::Params("lab_frame_2q needs n = 2".into()));
            }
            build_lab_frame(p, t)
        }
        HamiltonianKind::LabFrameNq => build_lab_frame(p, t),
        HamiltonianKind::QfEffective => build_qf_effective(p, DriveConfig::new(Driven::All)),
        HamiltonianKind::Org | HamiltonianKind::OrgXy | HamiltonianKind::OrgZz => build_org(kind, p, t),
        _ => build_delta(kind, p, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::Boundary;
    use crate::pauli::commutator;

    fn chain(n: usize) -> Lattice {
        Lattice::chain(n, Boundary::Open).unwrap()
    }

    fn sum(terms: &[(&str, f64)]) -> PauliSum {
        PauliSum::from_labels(terms.iter().copied()).unwrap()
    }

    #[test]
    fn signal_product_and_integral() {
        let a = Signal::cos(2.0, 3.0, 0.4);
        let b = Signal::sin(-1.5, 1.0, 0.2);
        let p = a.mul(&b);
        for t in [0.0, 0.3, 1.7, -2.2] {
            assert!((p.eval(t) - a.eval(t) * b.eval(t)).abs() < 1e-13);
        }
        // Trapezoid oracle on a fine grid.
        let m = 200_000;
        let (t0, t1) = (0.1, 2.3);
        let hstep = (t1 - t0) / m as f64;
        let num: f64 = (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                w * p.eval(t0 + i as f64 * hstep)
            })
            .sum::<f64>()
            * hstep;
        assert!((num - p.integral(t0, t1)).abs() < 1e-9);
        let d = p.derivative();
        let fd = (p.eval(0.5 + 1e-6) - p.eval(0.5 - 1e-6)) / 2e-6;
        assert!((d.eval(0.5) - fd).abs() < 1e-6);
    }

    #[test]
    fn h_even_example() {
        let h = build_canonical(HamiltonianKind::HEven, &chain(4), 1.0).unwrap();
        assert_eq!(h, sum(&[("XXII", 1.0), ("IZZI", 1.0), ("IIXX", 1.0)]));
    }

    #[test]
    fn heisenberg_example() {
        let h = build_canonical(HamiltonianKind::HHeis, &chain(3), 1.0).unwrap();
        let e = sum(&[
            ("XXI", 1.0),
            ("YYI", 1.0),
            ("ZZI", 1.0),
            ("IXX", 1.0),
            ("IYY", 1.0),
            ("IZZ", 1.0),
        ]);
        assert_eq!(h, e);
    }

    #[test]
    fn decompositions_are_exact() {
        for n in 2..9 {
            let l = chain(n);
            let b = |k| build_canonical(k, &l, 0.7).unwrap();
            use HamiltonianKind as K;
            assert_eq!(&b(K::H1) + &b(K::H2), b(K::HZz));
            assert_eq!(&b(K::HEvenPrime) + &b(K::HOddPrime), b(K::HXy1d));
            assert_eq!(&(&b(K::HE) + &b(K::HEPrime)) + &b(K::HEDoublePrime), b(K::HHeis));
            assert!(commutator(&b(K::H1), &b(K::H2)).unwrap().is_zero());
        }
    }

    #[test]
    fn h_i_counts_on_4x4() {
        let l = Lattice::square(4, 4, Boundary::Periodic).unwrap();
        let h = build_canonical(HamiltonianKind::HI, &l, 1.0).unwrap();
        assert_eq!(h.len(), 32);
        let xx = h.iter().filter(|(p, _)| p.z_bits() == 0).count();
        assert_eq!(xx, 16);
        let sum2 = &h + &build_canonical(HamiltonianKind::HIi, &l, 1.0).unwrap();
        assert_eq!(sum2, build_canonical(HamiltonianKind::HXy2d, &l, 1.0).unwrap());
    }

    #[test]
    fn qf_effective_examples() {
        let p = DeviceParams::cr_chain(2, Driven::All, 1.0, 10.0, 0.04, 100.0).unwrap();
        let h = build_qf_effective(&p, DriveConfig::new(Driven::All)).unwrap();
        assert!(h.approx_eq(&sum(&[("XZ", -0.01)]), 1e-15));

        let p = DeviceParams::cr_chain(4, Driven::OddOnly, 1.0, 10.0, 0.04, 100.0).unwrap();
        let h = build_qf_effective(&p, DriveConfig::new(Driven::OddOnly)).unwrap();
        assert!(h.approx_eq(&sum(&[("XXII", 0.01), ("IIXX", 0.01)]), 1e-15));

        let mut p = DeviceParams::cr_chain(4, Driven::All, 1.0, 10.0, 0.04, 100.0).unwrap();
        p.phi = vec![
            3.0 * std::f64::consts::FRAC_PI_2,
            std::f64::consts::PI,
            std::f64::consts::FRAC_PI_2,
            0.0,
        ];
        let h = build_qf_effective(&p, DriveConfig::new(Driven::All)).unwrap();
        // J_k x_k(z cos Δφ − y sin Δφ) with Δφ = π/2 and J = −0.01.
        let e = sum(&[("XYII", 0.01), ("IXYI", 0.01), ("IIXY", 0.01)]);
        assert!(h.approx_eq(&e, 1e-15), "{h}");
    }

    #[test]
    fn lab_frame_at_zero() {
        let p = DeviceParams::new(
            vec![5.0, 4.0],
            vec![4.0, 4.0],
            vec![0.3, 0.2],
            vec![0.0, 0.0],
            vec![0.1],
            Boundary::Open,
        )
        .unwrap();
        let h = build_lab_frame(&p, 0.0).unwrap();
        let e = sum(&[("ZI", 2.5), ("IZ", 2.0), ("XI", 0.3), ("IX", 0.2), ("XX", 0.05)]);
        assert!(h.approx_eq(&e, 1e-15));
        let h2 = build_lab_frame(&p, 2.0 * std::f64::consts::PI / 4.0).unwrap();
        assert!(h2.approx_eq(&e, 1e-14));
    }

    #[test]
    fn org_examples() {
        let p = DeviceParams::cr_chain(2, Driven::All, 1.0, 10.0, 0.1, 100.0).unwrap();
        let g4 = 0.25;
        let r = 0.1;
        let h0 = build_org(HamiltonianKind::Org, &p, 0.0).unwrap();
        let e0 = sum(&[("ZZ", g4), ("YY", g4), ("XZ", -g4 * r), ("ZX", -g4 * r)]);
        assert!(h0.approx_eq(&e0, 1e-15));
        let t = std::f64::consts::FRAC_PI_2 / 10.0;
        let h1 = build_org(HamiltonianKind::Org, &p, t).unwrap();
        let e1 = sum(&[("YZ", g4), ("ZY", -g4), ("XZ", -g4 * r), ("ZX", g4 * r)]);
        assert!(h1.approx_eq(&e1, 1e-14));
        let xy0 = build_org(HamiltonianKind::OrgXy, &p, 0.0).unwrap();
        let exy = sum(&[
            ("YY", -2.0 * g4 * r),
            ("XX", -2.0 * g4 * r),
            ("XY", g4),
            ("YX", g4),
            ("ZZ", -2.0 * g4),
        ]);
        assert!(xy0.approx_eq(&exy, 1e-15));
    }

    #[test]
    fn delta_is_org_minus_control() {
        let p = DeviceParams::cr_chain(4, Driven::All, 1.0, 10.0, 0.1, 100.0).unwrap();
        let (g, d, om) = p.uniform().unwrap();
        let ctrl = build_canonical(HamiltonianKind::Control, &chain(4), -g * om / (4.0 * d)).unwrap();
        for t in [0.0, 0.13, 0.9] {
            let o = build_org(HamiltonianKind::Org, &p, t).unwrap();
            let dh = build_delta(HamiltonianKind::DeltaH, &p, t).unwrap();
            assert!((&o - &ctrl).approx_eq(&dh, 1e-15));
        }
        let dh0 = build_delta(HamiltonianKind::DeltaH, &p, 0.0).unwrap();
        let e = sum(&[
            ("ZZII", 0.25),
            ("YYII", 0.25),
            ("IZZI", 0.25),
            ("IYYI", 0.25),
            ("IIZZ", 0.25),
            ("IIYY", 0.25),
            ("ZXII", -0.025),
            ("IZXI", -0.025),
            ("IIZX", -0.025),
        ]);
        assert!(dh0.approx_eq(&e, 1e-15));
    }

    #[test]
    fn rotate_site_matches_dense_conjugation() {
        use crate::pauli::to_dense;
        let h = TimeDependentHamiltonian::from_static(&sum(&[("XY", 0.4), ("ZX", -1.0), ("YI", 0.3)])).unwrap();
        let alpha = 0.77;
        let r = h.rotate_site(0, Pauli::Z, 0.0, alpha);
        let u = to_dense(&sum(&[("ZI", 1.0)]), 12)
            .unwrap()
            .expm_hermitian(alpha / 2.0)
            .unwrap();
        let hd = to_dense(&h.at(0.0), 12).unwrap();
        let expect = &(&u.adjoint() * &hd) * &u;
        assert!(to_dense(&r.at(0.0), 12).unwrap().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in HamiltonianKind::ALL {
            assert_eq!(k.name().parse::<HamiltonianKind>().unwrap(), k);
        }
        assert!("h_foo".parse::<HamiltonianKind>().is_err());
    }
}
