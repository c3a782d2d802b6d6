//! Single-qubit gate layers, toggling, the rotating-frame pipeline and
//! numerical checks of the effective quad-frame Hamiltonian.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, DriveConfig, Driven};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_qf_effective, lab_frame, TimeDependentHamiltonian};
use crate::pauli::{phase_insensitive_distance, to_dense, DenseMatrix, Mat2, Pauli, PauliSum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit gate applied uniformly across a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Identity,
    Hadamard,
    /// `exp(−iπx/4)`.
    Rx90,
    Rx90Dag,
    /// `diag(1, i)`.
    S,
    SDag,
    /// `½[𝟙 − i(x + y + z)]`.
    UE,
    UEDag,
    /// `U_E²`, equal to `−U_E†`.
    UE2,
}

impl GateKind {
    pub fn matrix(self) -> Mat2 {
        let h = FRAC_1_SQRT_2;
        match self {
            GateKind::Identity => [[ONE, ZERO], [ZERO, ONE]],
            GateKind::Hadamard => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            GateKind::Rx90 => [[c(h, 0.0), c(0.0, -h)], [c(0.0, -h), c(h, 0.0)]],
            GateKind::Rx90Dag => [[c(h, 0.0), c(0.0, h)], [c(0.0, h), c(h, 0.0)]],
            GateKind::S => [[ONE, ZERO], [ZERO, I]],
            GateKind::SDag => [[ONE, ZERO], [ZERO, -I]],
            // ½[𝟙 − i(x + y + z)]
            GateKind::UE => [[c(0.5, -0.5), c(-0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            GateKind::UEDag => [[c(0.5, 0.5), c(0.5, 0.5)], [c(-0.5, 0.5), c(0.5, -0.5)]],
            GateKind::UE2 => [[c(-0.5, -0.5), c(-0.5, -0.5)], [c(0.5, -0.5), c(-0.5, 0.5)]],
        }
    }

    /// `U† P U = sign · P'` for a single-qubit Pauli letter.
    pub fn conjugate(self, p: Pauli) -> (f64, Pauli) {
        use Pauli::{I as Id, X, Y, Z};
        if p == Id {
            return (1.0, Id);
        }
        match (self, p) {
            (GateKind::Identity, p) => (1.0, p),
            (GateKind::Hadamard, X) => (1.0, Z),
            (GateKind::Hadamard, Y) => (-1.0, Y),
            (GateKind::Hadamard, Z) => (1.0, X),
            (GateKind::Rx90, X) => (1.0, X),
            (GateKind::Rx90, Y) => (-1.0, Z),
            (GateKind::Rx90, Z) => (1.0, Y),
            (GateKind::Rx90Dag, X) => (1.0, X),
            (GateKind::Rx90Dag, Y) => (1.0, Z),
            (GateKind::Rx90Dag, Z) => (-1.0, Y),
            (GateKind::S, X) => (-1.0, Y),
            (GateKind::S, Y) => (1.0, X),
            (GateKind::S, Z) => (1.0, Z),
            (GateKind::SDag, X) => (1.0, Y),
            (GateKind::SDag, Y) => (-1.0, X),
            (GateKind::SDag, Z) => (1.0, Z),
            (GateKind::UE, X) => (1.0, Z),
            (GateKind::UE, Y) => (1.0, X),
            (GateKind::UE, Z) => (1.0, Y),
            (GateKind::UEDag | GateKind::UE2, X) => (1.0, Y),
            (GateKind::UEDag | GateKind::UE2, Y) => (1.0, Z),
            (GateKind::UEDag | GateKind::UE2, Z) => (1.0, X),
            (_, Id) => unreachable!(),
        }
    }

    /// Inverse gate, up to a global phase.
    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::Identity => GateKind::Identity,
            GateKind::Hadamard => GateKind::Hadamard,
            GateKind::Rx90 => GateKind::Rx90Dag,
            GateKind::Rx90Dag => GateKind::Rx90,
            GateKind::S => GateKind::SDag,
            GateKind::SDag => GateKind::S,
            GateKind::UE => GateKind::UEDag,
            GateKind::UEDag | GateKind::UE2 => GateKind::UE,
        }
    }
}

/// Sites a layer acts on. `Odd`/`Even` refer to 1-based site numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    All,
    Odd,
    Even,
    /// Explicit 0-based qubit indices.
    Sites(Vec<usize>),
}

impl Support {
    pub fn sites(&self, n: usize) -> Result<Vec<usize>> {
        Ok(match self {
            Support::All => (0..n).collect(),
            Support::Odd => (0..n).step_by(2).collect(),
            Support::Even => (1..n).step_by(2).collect(),
            Support::Sites(s) => {
                if let Some(&bad) = s.iter().find(|&&q| q >= n) {
                    return Err(Error::Params(format!("layer site {bad} outside {n} qubits")));
                }
                let mut s = s.clone();
                s.sort_unstable();
                s.dedup();
                s
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateLayer {
    pub kind: GateKind,
    pub support: Support,
}

impl GateLayer {
    pub fn new(kind: GateKind, support: Support) -> Self {
        Self { kind, support }
    }

    pub fn all(kind: GateKind) -> Self {
        Self::new(kind, Support::All)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.kind.inverse(), self.support.clone())
    }
}

/// Dense `⊗_q U_q` with `U_q` the layer gate on its support and `𝟙` elsewhere.
pub fn layer_unitary(l: &GateLayer, n: usize, dense_limit: usize) -> Result<DenseMatrix> {
    if n > dense_limit {
        return Err(Error::DenseLimit {
            nqubits: n,
            limit: dense_limit,
        });
    }
    let mut gates = vec![GateKind::Identity.matrix(); n];
    for q in l.support.sites(n)? {
        gates[q] = l.kind.matrix();
    }
    DenseMatrix::product_of_singles(&gates)
}

/// Symbolic `U† h U` for a layer `U`.
pub fn toggle(h: &PauliSum, l: &GateLayer) -> Result<PauliSum> {
    let n = h.nqubits();
    let sites = l.support.sites(n)?;
    let mut out = PauliSum::zero(n)?;
    for (p, coeff) in h.iter() {
        let mut q = *p;
        let mut sign = 1.0;
        for &s in &sites {
            let (sg, letter) = l.kind.conjugate(p.get(s));
            sign *= sg;
            q.set(s, letter);
        }
        out.add_term(q, *coeff * sign);
    }
    Ok(out)
}

/// Applies layers in order: `toggle(…toggle(h, l₁)…, lₖ)`.
pub fn toggle_chain(h: &PauliSum, layers: &[GateLayer]) -> Result<PauliSum> {
    layers.iter().try_fold(h.clone(), |acc, l| toggle(&acc, l))
}

fn rotation(axis: Pauli, alpha: f64) -> Mat2 {
    // exp(−iαA/2) = cos(α/2) 𝟙 − i sin(α/2) A
    let (s, co) = (alpha / 2.0).sin_cos();
    match axis {
        Pauli::X => [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]],
        Pauli::Y => [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]],
        Pauli::Z => [[c(co, -s), ZERO], [ZERO, c(co, s)]],
        Pauli::I => [[c(co, -s), ZERO], [ZERO, c(co, -s)]],
    }
}

fn rotation_derivative(axis: Pauli, alpha: f64, rate: f64) -> Mat2 {
    // d/dt exp(−iαA/2) = −(i α̇/2) A exp(−iαA/2)
    let r = rotation(axis, alpha);
    let a = crate::frames::pauli_matrix(axis);
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (0..2).map(|k| a[i][k] * r[k][j]).sum::<Complex64>() * c(0.0, -rate / 2.0);
        }
    }
    out
}

pub(crate) fn pauli_matrix(p: Pauli) -> Mat2 {
    match p {
        Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -I], [I, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// One per-qubit factor of the frame pipeline: `exp(−i α_q(t) A / 2)` with
/// `α_q(t) = rate_q t + offset_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFactor {
    pub axis: Pauli,
    pub rate: Vec<f64>,
    pub offset: Vec<f64>,
}

impl FrameFactor {
    pub fn unitary(&self, t: f64) -> Result<DenseMatrix> {
        let gates: Vec<Mat2> = self
            .rate
            .iter()
            .zip(&self.offset)
            .map(|(&w, &a)| rotation(self.axis, w * t + a))
            .collect();
        DenseMatrix::product_of_singles(&gates)
    }

    pub fn derivative(&self, t: f64) -> Result<DenseMatrix> {
        let n = self.rate.len();
        let mut out = DenseMatrix::zeros(1 << n);
        for q in 0..n {
            if self.rate[q] == 0.0 {
                continue;
            }
            let gates: Vec<Mat2> = (0..n)
                .map(|k| {
                    let a = self.rate[k] * t + self.offset[k];
                    if k == q {
                        rotation_derivative(self.axis, a, self.rate[k])
                    } else {
                        rotation(self.axis, a)
                    }
                })
                .collect();
            out = &out + &DenseMatrix::product_of_singles(&gates)?;
        }
        Ok(out)
    }

    /// Symbolic `U† H U − i U† dU/dt`.
    pub fn transform(&self, h: &TimeDependentHamiltonian) -> TimeDependentHamiltonian {
        let mut out = h.clone();
        for q in 0..self.rate.len() {
            out = out.rotate_site(q, self.axis, self.rate[q], self.offset[q]);
        }
        out
    }
}

/// The three frame factors `U_12(t)`, `U_3`, `U_4(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePipeline {
    pub u12: FrameFactor,
    pub u3: FrameFactor,
    pub u4: FrameFactor,
}

impl FramePipeline {
    pub fn new(p: &DeviceParams) -> Result<Self> {
        p.validate()?;
        let n = p.n();
        Ok(Self {
            u12: FrameFactor {
                axis: Pauli::Z,
                rate: p.omega.clone(),
                offset: p.phi.clone(),
            },
            // exp(+iξy/2) is a y rotation by −ξ.
            u3: FrameFactor {
                axis: Pauli::Y,
                rate: vec![0.0; n],
                offset: (0..n).map(|k| -p.xi(k)).collect(),
            },
            u4: FrameFactor {
                axis: Pauli::X,
                rate: (0..n).map(|k| p.eta(k)).collect(),
                offset: vec![0.0; n],
            },
        })
    }

    pub fn factors(&self) -> [&FrameFactor; 3] {
        [&self.u12, &self.u3, &self.u4]
    }

    /// `U_3 · U_4(t)`.
    pub fn u34(&self, t: f64) -> Result<DenseMatrix> {
        Ok(&self.u3.unitary(t)? * &self.u4.unitary(t)?)
    }
}

/// `U_12(t) · U_3 · U_4(t)` as a dense unitary.
pub fn frame_pipeline_unitary(p: &DeviceParams, t: f64) -> Result<DenseMatrix> {
    let f = FramePipeline::new(p)?;
    Ok(&f.u12.unitary(t)? * &f.u34(t)?)
}

/// Lab Hamiltonian in the `U_12` frame. With `counter_rotating = false` the
/// first rotating-wave approximation drops every component faster than half
/// the slowest drive frequency.
pub fn to_drive_frame(p: &DeviceParams, counter_rotating: bool) -> Result<TimeDependentHamiltonian> {
    let f = FramePipeline::new(p)?;
    let h = f.u12.transform(&lab_frame(p)?);
    if counter_rotating {
        Ok(h)
    } else {
        let slowest = p.omega.iter().fold(f64::INFINITY, |a, &w| a.min(w.abs()));
        Ok(h.low_pass(0.5 * slowest))
    }
}

/// Full pipeline applied symbolically to the lab Hamiltonian.
pub fn to_quad_frame(p: &DeviceParams, counter_rotating: bool) -> Result<TimeDependentHamiltonian> {
    let f = FramePipeline::new(p)?;
    Ok(f.u4.transform(&f.u3.transform(&to_drive_frame(p, counter_rotating)?)))
}

/// Largest deviation, over the three factors, between the symbolic frame
/// Hamiltonian and the dense `U† H U − i U† dU/dt` at time `t`.
pub fn frame_identity_defect(p: &DeviceParams, t: f64, dense_limit: usize) -> Result<f64> {
    if p.n() > dense_limit {
        return Err(Error::DenseLimit {
            nqubits: p.n(),
            limit: dense_limit,
        });
    }
    let f = FramePipeline::new(p)?;
    let mut h = lab_frame(p)?;
    let mut worst = 0.0f64;
    for factor in f.factors() {
        let u = factor.unitary(t)?;
        let du = factor.derivative(t)?;
        let hd = to_dense(&h.at(t), dense_limit)?;
        let expect = &(&(&u.adjoint() * &hd) * &u) + &(&u.adjoint() * &du).scale(-I);
        h = factor.transform(&h);
        let got = to_dense(&h.at(t), dense_limit)?;
        let scale = 1.0 + expect.frobenius_norm();
        worst = worst.max(got.max_abs_diff(&expect) / scale);
    }
    Ok(worst)
}

/// Weak-drive closed form of `U_3 U_4(t)` per driven qubit,
/// `(1/√2)[𝟙 + iy + (Ω/2δ)((𝟙 − iy) cos δt + i(z − x) sin δt)]`; undriven qubits get `𝟙`.
pub fn uqf_approx(p: &DeviceParams, t: f64) -> Result<DenseMatrix> {
    p.validate()?;
    let mut gates = Vec::with_capacity(p.n());
    for k in 0..p.n() {
        if !p.is_driven(k) {
            gates.push(GateKind::Identity.matrix());
            continue;
        }
        let d = p.delta(k);
        if d == 0.0 {
            return Err(Error::ZeroDetuning(k + 1));
        }
        let r = p.drive[k] / (2.0 * d);
        let (s, co) = (d * t).sin_cos();
        let [x, y, z, id] = [Pauli::X, Pauli::Y, Pauli::Z, Pauli::I].map(pauli_matrix);
        let mut m = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let lead = id[i][j] + I * y[i][j];
                let corr = (id[i][j] - I * y[i][j]) * co + I * (z[i][j] - x[i][j]) * s;
                m[i][j] = (lead + corr * r) * FRAC_1_SQRT_2;
            }
        }
        gates.push(m);
    }
    DenseMatrix::product_of_singles(&gates)
}

/// `max_t ‖U_QF U_QF† − 𝟙‖` over `samples` points of one detuning period.
pub fn uqf_unitarity_defect(p: &DeviceParams, samples: usize) -> Result<f64> {
    let d = (0..p.n())
        .filter(|&k| p.is_driven(k))
        .map(|k| p.delta(k).abs())
        .fold(0.0, f64::max);
    let period = if d > 0.0 { 2.0 * PI / d } else { 1.0 };
    let mut worst = 0.0f64;
    for i in 0..samples.max(1) {
        let t = period * i as f64 / samples.max(1) as f64;
        let u = uqf_approx(p, t)?;
        let e = &(&u * &u.adjoint()) - &DenseMatrix::identity(p.n());
        worst = worst.max(e.spectral_norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Piecewise-constant exponential at the step midpoint.
    Midpoint,
    /// Fourth-order Magnus with two Gauss–Legendre nodes.
    #[default]
    Magnus4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub integrator: Integrator,
    /// Upper bound on `h · max‖H(t)‖`.
    pub norm_step: f64,
    /// Steps per period of the fastest frequency.
    pub steps_per_period: f64,
    /// Largest accepted change when the step is halved.
    pub tol: f64,
    pub max_steps: usize,
    /// Integrate one common period and take powers when the frequencies allow it.
    #[serde(default = "yes")]
    pub use_periodicity: bool,
}

fn yes() -> bool {
    true
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::Magnus4,
            norm_step: 0.05,
            steps_per_period: 40.0,
            tol: 1e-8,
            max_steps: 4_000_000,
            use_periodicity: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub unitary: DenseMatrix,
    pub steps: usize,
    /// `‖U_h − U_{h/2}‖` at the accepted step.
    pub halving_change: f64,
}

/// `H(t) = Σ_ω (A_ω cos ωt + B_ω sin ωt)` with one dense pair per frequency.
struct FourierDense {
    dim: usize,
    parts: Vec<(f64, DenseMatrix, DenseMatrix)>,
}

impl FourierDense {
    fn new(h: &TimeDependentHamiltonian, dense_limit: usize) -> Result<Self> {
        let n = h.nqubits();
        let dim = 1usize << n;
        let mut by_freq: std::collections::BTreeMap<u64, (PauliSum, PauliSum)> = Default::default();
        for (p, s) in h.terms() {
            for &(w, a, b) in s.parts() {
                let e = by_freq.entry(w.to_bits()).or_insert_with(|| {
                    (
                        PauliSum::zero(n).expect("valid size"),
                        PauliSum::zero(n).expect("valid size"),
                    )
                });
                e.0.add_real(*p, a);
                e.1.add_real(*p, b);
            }
        }
        let mut parts = Vec::with_capacity(by_freq.len());
        for (w, (a, b)) in by_freq {
            parts.push((
                f64::from_bits(w),
                to_dense(&a, dense_limit)?,
                to_dense(&b, dense_limit)?,
            ));
        }
        Ok(Self { dim, parts })
    }

    fn eval(&self, t: f64) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim);
        for (w, a, b) in &self.parts {
            if *w == 0.0 {
                m.0 += &a.0;
            } else {
                let (s, co) = (w * t).sin_cos();
                m.0 += &a.0 * c(co, 0.0);
                m.0 += &b.0 * c(s, 0.0);
            }
        }
        m
    }
}

/// `exp(−iK)` for Hermitian `K` by scaling and squaring a Taylor series.
fn expm_step(k: &DenseMatrix) -> DenseMatrix {
    let dim = k.dim();
    let norm = (0..dim)
        .map(|j| k.0.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let x = k.0.scale(1.0 / 2f64.powi(squarings)) * c(0.0, -1.0);
    let mut u = nalgebra::DMatrix::<Complex64>::identity(dim, dim);
    let mut term = u.clone();
    for j in 1..=20 {
        term = &term * &x * c(1.0 / j as f64, 0.0);
        u += &term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        u = &u * &u;
    }
    DenseMatrix(u)
}

fn step_unitaries(h: &FourierDense, t0: f64, t1: f64, steps: usize, integrator: Integrator) -> DenseMatrix {
    let dt = (t1 - t0) / steps as f64;
    let mut u = DenseMatrix::identity(h.dim.trailing_zeros() as usize);
    let g = 3f64.sqrt() / 6.0;
    for i in 0..steps {
        let t = t0 + i as f64 * dt;
        let k = match integrator {
            Integrator::Midpoint => h.eval(t + 0.5 * dt).scale(c(dt, 0.0)),
            Integrator::Magnus4 => {
                let a1 = h.eval(t + (0.5 - g) * dt);
                let a2 = h.eval(t + (0.5 + g) * dt);
                let comm = &(&a1 * &a2) - &(&a2 * &a1);
                // exp(−iK), K = (h/2)(H₁ + H₂) + i(√3/12)h²[H₁, H₂]
                &(&a1 + &a2).scale(c(0.5 * dt, 0.0)) + &comm.scale(c(0.0, (3f64.sqrt() / 12.0) * dt * dt))
            }
        };
        u = &expm_step(&k) * &u;
    }
    u
}

/// Common period of all frequencies in `h`, if they are integer multiples of
/// `min(ω)/m` for some small `m`.
pub fn common_period(h: &TimeDependentHamiltonian) -> Option<f64> {
    let freqs = h.frequencies();
    let wmin = freqs.iter().copied().filter(|&w| w > 0.0).fold(f64::INFINITY, f64::min);
    if !wmin.is_finite() {
        return None;
    }
    (1..=8).find_map(|m| {
        let base = wmin / m as f64;
        let ok = freqs.iter().all(|&w| {
            let q = w / base;
            q < 1e6 && (q - q.round()).abs() <= 1e-9 * q.max(1.0)
        });
        ok.then_some(2.0 * PI / base)
    })
}

/// Time-ordered propagator of `h` on `[t0, t1]`, refined until halving the
/// step changes it by less than `opts.tol`. Periodic Hamiltonians spanning
/// several periods are integrated over one period and raised to a power.
pub fn propagate(
    h: &TimeDependentHamiltonian,
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
    dense_limit: usize,
) -> Result<Propagation> {
    let n = h.nqubits();
    if n > dense_limit {
        return Err(Error::DenseLimit {
            nqubits: n,
            limit: dense_limit,
        });
    }
    let terms = FourierDense::new(h, dense_limit)?;
    if opts.use_periodicity && t1 > t0 {
        if let Some(period) = common_period(h) {
            let k = ((t1 - t0) / period).floor() as usize;
            if k >= 2 {
                let one = refine(h, &terms, t0, t0 + period, opts, opts.tol / k as f64)?;
                let rest = refine(h, &terms, t0, t1 - k as f64 * period, opts, opts.tol)?;
                let mut power = DenseMatrix::identity(n);
                let mut base = one.unitary;
                let mut e = k;
                while e > 0 {
                    if e & 1 == 1 {
                        power = &power * &base;
                    }
                    base = &base * &base;
                    e >>= 1;
                }
                return Ok(Propagation {
                    unitary: &rest.unitary * &power,
                    steps: one.steps * k + rest.steps,
                    halving_change: (one.halving_change * k as f64).max(rest.halving_change),
                });
            }
        }
    }
    refine(h, &terms, t0, t1, opts, opts.tol)
}

fn refine(
    h: &TimeDependentHamiltonian,
    terms: &FourierDense,
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
    tol: f64,
) -> Result<Propagation> {
    let n = h.nqubits();
    let span = (t1 - t0).abs();
    if span == 0.0 {
        return Ok(Propagation {
            unitary: DenseMatrix::identity(n),
            steps: 0,
            halving_change: 0.0,
        });
    }
    let mut hmax = span;
    let bound = h.norm_bound();
    if bound > 0.0 {
        hmax = hmax.min(opts.norm_step / bound);
    }
    let wmax = h.max_frequency();
    if wmax > 0.0 {
        hmax = hmax.min(2.0 * PI / (opts.steps_per_period * wmax));
    }
    let mut steps = (span / hmax).ceil().max(1.0) as usize;
    let mut coarse = step_unitaries(terms, t0, t1, steps, opts.integrator);
    loop {
        if 2 * steps > opts.max_steps {
            return Err(Error::NoConvergence {
                what: "time integrator",
                iterations: steps,
            });
        }
        let fine = step_unitaries(terms, t0, t1, 2 * steps, opts.integrator);
        let change = (&fine - &coarse).spectral_norm();
        steps *= 2;
        if change < tol {
            return Ok(Propagation {
                unitary: fine,
                steps,
                halving_change: change,
            });
        }
        coarse = fine;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub n: usize,
    pub driven: Driven,
    pub g_over_delta: f64,
    pub omega_over_delta: f64,
    pub t_final: f64,
    pub counter_rotating: bool,
    pub integrator: Integrator,
    pub steps: usize,
    pub halving_change: f64,
    /// Phase-insensitive distance between the integrated quad-frame propagator
    /// and `exp(−i H_QF t_final)`.
    pub distance: f64,
    /// Largest symbolic-vs-dense frame identity defect at `t = 0` and `t_final`.
    pub frame_identity_defect: f64,
}

/// Integrates the drive-frame evolution of `p`, maps it to the quad frame and
/// compares with the effective Hamiltonian of the odd or even drive pattern.
pub fn verify_effective(
    p: &DeviceParams,
    driven: Driven,
    t_final: f64,
    counter_rotating: bool,
    opts: &IntegratorOptions,
    dense_limit: usize,
) -> Result<FrameReport> {
    if p.n() < 2 {
        return Err(Error::QubitCount(p.n()));
    }
    if driven == Driven::All {
        return Err(Error::Unsupported(
            "effective comparison needs an odd- or even-only drive pattern".into(),
        ));
    }
    let heff = build_qf_effective(p, DriveConfig::new(driven))?;
    let h12 = to_drive_frame(p, counter_rotating)?;
    let prop = propagate(&h12, 0.0, t_final, opts, dense_limit)?;
    let f = FramePipeline::new(p)?;
    let qf = &(&f.u34(t_final)?.adjoint() * &prop.unitary) * &f.u34(0.0)?;
    let reference = to_dense(&heff, dense_limit)?.expm_hermitian(t_final)?;
    let distance = phase_insensitive_distance(&qf, &reference)?;
    let defect = frame_identity_defect(p, 0.0, dense_limit)?.max(frame_identity_defect(p, t_final, dense_limit)?);
    let (g, d, om) = p.uniform()?;
    Ok(FrameReport {
        n: p.n(),
        driven,
        g_over_delta: g / d,
        omega_over_delta: om / d,
        t_final,
        counter_rotating,
        integrator: opts.integrator,
        steps: prop.steps,
        halving_change: prop.halving_change,
        distance,
        frame_identity_defect: defect,
    })
}

/// Two-qubit odd-driven device in detuning units: `δ = 1`, control at
/// `ω_q = 101`, target at `100`, so every fast frequency is an integer.
pub fn reference_device(g_over_delta: f64, omega_over_delta: f64) -> Result<DeviceParams> {
    DeviceParams::cr_chain(2, Driven::OddOnly, g_over_delta, 1.0, omega_over_delta, 101.0)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Params("power-law fit needs at least two matched points".into()));
    }
    if xs.iter().chain(ys).any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(Error::Params("power-law fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}
