//! Digital-analog block schedules for the Ising, XY and Heisenberg models,
//! their exact unitaries and state-vector simulation.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::device::{Boundary, DeviceParams, DriveConfig, Driven, Lattice};
use crate::error::{Error, Result};
use crate::frames::{layer_unitary, propagate, toggle, toggle_chain, GateKind, GateLayer, IntegratorOptions, Support};
use crate::hamiltonian::{build_canonical, qf_exact, qf_parity, HamiltonianKind as K};
use crate::pauli::{
    expm_multiply, phase_insensitive_distance, to_dense, DenseMatrix, Numerics, Pauli, PauliString, PauliSum,
    StateVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[serde(alias = "ising")]
    Ising1d,
    #[serde(alias = "xy1d")]
    Xy1d,
    #[serde(alias = "xy2d")]
    Xy2d,
    #[serde(alias = "heisenberg")]
    Heisenberg1d,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ising1d => "ising",
            ModelKind::Xy1d => "xy1d",
            ModelKind::Xy2d => "xy2d",
            ModelKind::Heisenberg1d => "heisenberg",
        }
    }

    /// Whether one block reproduces the target propagator exactly.
    pub fn is_exact(self) -> bool {
        matches!(self, ModelKind::Ising1d | ModelKind::Xy1d)
    }

    /// Analog segments per block.
    pub fn segments(self) -> usize {
        match self {
            ModelKind::Heisenberg1d => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "ising" | "ising1d" => Ok(ModelKind::Ising1d),
            "xy" | "xy1d" => Ok(ModelKind::Xy1d),
            "xy2d" => Ok(ModelKind::Xy2d),
            "heisenberg" | "heis" | "heisenberg1d" => Ok(ModelKind::Heisenberg1d),
            _ => Err(Error::Params(format!("unknown model {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetModel {
    pub kind: ModelKind,
    pub lattice: Lattice,
    #[serde(rename = "J")]
    pub j: f64,
    pub tau: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

impl TargetModel {
    pub fn new(kind: ModelKind, lattice: Lattice, j: f64, tau: f64, m: usize) -> Result<Self> {
        let t = Self {
            kind,
            lattice,
            j,
            tau,
            m,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn chain(kind: ModelKind, n: usize, j: f64, tau: f64, m: usize) -> Result<Self> {
        Self::new(kind, Lattice::chain(n, Boundary::Open)?, j, tau, m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.j.is_finite() || !self.tau.is_finite() || self.tau < 0.0 {
            return Err(Error::Params("J must be finite and tau finite and non-negative".into()));
        }
        match (self.kind, self.lattice.dim) {
            (ModelKind::Xy2d, 2) => self.lattice.require_even_tiling(),
            (ModelKind::Xy2d, _) => Err(Error::Unsupported("xy2d needs a square lattice".into())),
            (_, 1) => {
                if self.lattice.nqubits() < 2 {
                    return Err(Error::QubitCount(self.lattice.nqubits()));
                }
                if self.lattice.boundary == Boundary::Periodic && self.lattice.nqubits() % 2 == 1 {
                    return Err(Error::Unsupported("periodic chains need an even length".into()));
                }
                Ok(())
            }
            (k, _) => Err(Error::Unsupported(format!("{k} is a chain model"))),
        }
    }

    pub fn nqubits(&self) -> usize {
        self.lattice.nqubits()
    }

    /// The Hamiltonian the schedule is meant to simulate.
    pub fn target(&self) -> Result<PauliSum> {
        let kind = match self.kind {
            ModelKind::Ising1d => K::HZz,
            ModelKind::Xy1d => K::HXy1d,
            ModelKind::Xy2d => K::HXy2d,
            ModelKind::Heisenberg1d => K::HHeis,
        };
        build_canonical(kind, &self.lattice, self.j)
    }

    /// Native quad-frame Hamiltonian for a drive pattern at coupling `J`.
    pub fn native(&self, drive: DriveConfig) -> Result<PauliSum> {
        match (self.kind, drive.driven) {
            (ModelKind::Xy2d, Driven::All) => build_canonical(K::HQf2d, &self.lattice, self.j),
            (ModelKind::Xy2d, _) => Err(Error::Unsupported("xy2d uses the fully driven lattice".into())),
            (_, Driven::All) => {
                let mut h = PauliSum::zero(self.nqubits())?;
                for (_, q1, q2) in crate::hamiltonian::chain_bonds(&self.lattice) {
                    let (c, s) = (drive.phi.cos(), drive.phi.sin());
                    h.add_real(PauliString::two(q1, Pauli::X, q2, Pauli::Z), self.j * c);
                    h.add_real(PauliString::two(q1, Pauli::X, q2, Pauli::Y), -self.j * s);
                }
                Ok(h)
            }
            (_, d) => qf_parity(&self.lattice, self.j, drive.phi, d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    Gate {
        layer: GateLayer,
    },
    Analog {
        duration: f64,
        drive: DriveConfig,
        hamiltonian: PauliSum,
    },
    /// Drive reassignment between analog segments; no unitary action.
    Reconfigure {
        driven: Driven,
    },
}

impl Step {
    fn gate(kind: GateKind, support: Support) -> Self {
        Step::Gate {
            layer: GateLayer::new(kind, support),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub model: TargetModel,
    pub block: Vec<Step>,
    pub repetitions: usize,
    pub fused: bool,
}

impl Schedule {
    pub fn nqubits(&self) -> usize {
        self.model.nqubits()
    }

    pub fn analog_time_per_block(&self) -> f64 {
        self.block
            .iter()
            .map(|s| match s {
                Step::Analog { duration, .. } => *duration,
                _ => 0.0,
            })
            .sum()
    }

    pub fn gate_layers_per_block(&self) -> usize {
        self.block.iter().filter(|s| matches!(s, Step::Gate { .. })).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CompileOptions {
    /// Cancel adjacent mutually inverse gate layers.
    pub fuse: bool,
}

fn parity_sites(lat: &Lattice, even: bool) -> Support {
    let mut s = Vec::new();
    for b in 1..=lat.ny {
        for a in 1..=lat.nx {
            if ((a + b) % 2 == 0) == even {
                s.push(lat.site(a, b).expect("in range"));
            }
        }
    }
    Support::Sites(s)
}

/// Builds the block schedule of a target model.
pub fn compile(m: &TargetModel, opts: CompileOptions) -> Result<Schedule> {
    m.validate()?;
    let tau = m.tau;
    let analog = |driven: Driven| -> Result<Step> {
        let drive = DriveConfig::new(driven);
        Ok(Step::Analog {
            duration: tau,
            drive,
            hamiltonian: m.native(drive)?,
        })
    };
    use GateKind::{Hadamard as H, Rx90 as R, Rx90Dag as Rd, UE};
    let g = Step::gate;
    let block = match m.kind {
        ModelKind::Ising1d => vec![
            g(H, Support::All),
            analog(Driven::OddOnly)?,
            g(H, Support::All),
            Step::Reconfigure {
                driven: Driven::EvenOnly,
            },
            g(H, Support::All),
            analog(Driven::EvenOnly)?,
            g(H, Support::All),
        ],
        // The rotation precedes the Hadamards so each segment sees R†U†HUR.
        ModelKind::Xy1d => vec![
            g(R, Support::All),
            g(H, Support::Even),
            analog(Driven::All)?,
            g(H, Support::Even),
            g(Rd, Support::All),
            g(R, Support::All),
            g(H, Support::Odd),
            analog(Driven::All)?,
            g(H, Support::Odd),
            g(Rd, Support::All),
        ],
        ModelKind::Xy2d => {
            let odd = parity_sites(&m.lattice, false);
            let even = parity_sites(&m.lattice, true);
            vec![
                g(R, Support::All),
                g(H, odd.clone()),
                analog(Driven::All)?,
                g(H, odd),
                g(Rd, Support::All),
                g(R, Support::All),
                g(H, even.clone()),
                analog(Driven::All)?,
                g(H, even),
                g(Rd, Support::All),
            ]
        }
        // Each analog step sits between even-site Hadamards; U_E advances
        // the cyclic x → z → y relabelling between segments.
        ModelKind::Heisenberg1d => vec![
            g(H, Support::Even),
            analog(Driven::All)?,
            g(H, Support::Even),
            g(UE, Support::All),
            g(H, Support::Even),
            analog(Driven::All)?,
            g(H, Support::Even),
            g(UE, Support::All),
            g(H, Support::Even),
            analog(Driven::All)?,
            g(H, Support::Even),
            g(UE, Support::All),
        ],
    };
    let block = if opts.fuse { fuse(block) } else { block };
    let s = Schedule {
        model: m.clone(),
        block,
        repetitions: m.m,
        fused: opts.fuse,
    };
    check_structure(&s)?;
    Ok(s)
}

/// Cancels adjacent gate layers that are mutual inverses on the same support.
/// Drive reconfigurations are transparent; analog steps block cancellation.
pub fn fuse(steps: Vec<Step>) -> Vec<Step> {
    let mut out: Vec<Step> = Vec::with_capacity(steps.len());
    for s in steps {
        if let Step::Gate { layer } = &s {
            let prev = out.iter().rposition(|p| !matches!(p, Step::Reconfigure { .. }));
            if let Some(i) = prev {
                if let Step::Gate { layer: pl } = &out[i] {
                    if pl.support == layer.support && pl.kind.inverse() == layer.kind {
                        out.remove(i);
                        continue;
                    }
                }
            }
        }
        out.push(s);
    }
    out
}

/// Hamiltonian seen by each analog segment, `W† H W` with `W` the product of
/// all earlier layers of the block.
pub fn segment_hamiltonians(block: &[Step]) -> Result<Vec<PauliSum>> {
    let mut layers: Vec<GateLayer> = Vec::new();
    let mut out = Vec::new();
    for s in block {
        match s {
            Step::Gate { layer } => layers.push(layer.clone()),
            Step::Analog { hamiltonian, .. } => {
                let rev: Vec<GateLayer> = layers.iter().rev().cloned().collect();
                out.push(toggle_chain(hamiltonian, &rev)?);
            }
            Step::Reconfigure { .. } => {}
        }
    }
    Ok(out)
}

/// Whether the product of all gate layers of a block is a global phase.
pub fn frame_closes(block: &[Step], n: usize) -> Result<bool> {
    let layers: Vec<GateLayer> = block
        .iter()
        .rev()
        .filter_map(|s| match s {
            Step::Gate { layer } => Some(layer.clone()),
            _ => None,
        })
        .collect();
    for q in 0..n {
        for p in [Pauli::X, Pauli::Z] {
            let single = PauliSum::from_term(&crate::pauli::PauliTerm::new(
                n,
                PauliString::single(q, p),
                num_complex::Complex64::new(1.0, 0.0),
            )?);
            if toggle_chain(&single, &layers)? != single {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Structural validity: every analog step carries the native Hamiltonian of
/// its drive pattern, the block's layers multiply to a phase, and the toggled
/// segment Hamiltonians sum to the target term by term.
pub fn check_structure(s: &Schedule) -> Result<Vec<PauliSum>> {
    let n = s.nqubits();
    let mut time = 0.0;
    for step in &s.block {
        if let Step::Analog {
            drive,
            hamiltonian,
            duration,
        } = step
        {
            if *hamiltonian != s.model.native(*drive)? {
                return Err(Error::Structure(format!(
                    "analog segment under {:?} driving is not the native quad-frame Hamiltonian",
                    drive.driven
                )));
            }
            time += duration;
        }
    }
    let expect = s.model.tau * s.model.kind.segments() as f64;
    if (time - expect).abs() > 1e-12 * expect.max(1.0) {
        return Err(Error::Structure(format!(
            "analog time {time} per block, expected {expect}"
        )));
    }
    if !frame_closes(&s.block, n)? {
        return Err(Error::Structure(
            "gate layers of the block do not multiply to a phase".into(),
        ));
    }
    let segs = segment_hamiltonians(&s.block)?;
    let mut total = PauliSum::zero(n)?;
    for h in &segs {
        total = &total + h;
    }
    if !total.approx_eq(&s.model.target()?, 1e-14) {
        return Err(Error::Structure(
            "toggled segments do not sum to the target Hamiltonian".into(),
        ));
    }
    Ok(segs)
}

fn analog_unitaries(s: &Schedule, limit: usize) -> Result<HashMap<String, DenseMatrix>> {
    let mut cache = HashMap::new();
    for step in &s.block {
        if let Step::Analog {
            duration, hamiltonian, ..
        } = step
        {
            let key = format!("{duration}:{}", hamiltonian.to_json()?);
            if let Entry::Vacant(e) = cache.entry(key) {
                e.insert(to_dense(hamiltonian, limit)?.expm_hermitian(*duration)?);
            }
        }
    }
    Ok(cache)
}

/// Dense unitary of one block.
pub fn block_unitary(s: &Schedule, limit: usize) -> Result<DenseMatrix> {
    let n = s.nqubits();
    if n > limit {
        return Err(Error::DenseLimit { nqubits: n, limit });
    }
    let cache = analog_unitaries(s, limit)?;
    let mut u = DenseMatrix::identity(n);
    for step in &s.block {
        match step {
            Step::Gate { layer } => u = &layer_unitary(layer, n, limit)? * &u,
            Step::Analog {
                duration, hamiltonian, ..
            } => {
                let key = format!("{duration}:{}", hamiltonian.to_json()?);
                u = &cache[&key] * &u;
            }
            Step::Reconfigure { .. } => {}
        }
    }
    Ok(u)
}

/// Dense unitary of the whole schedule, `block^M`.
pub fn schedule_unitary(s: &Schedule, limit: usize) -> Result<DenseMatrix> {
    let b = block_unitary(s, limit)?;
    let mut u = DenseMatrix::identity(s.nqubits());
    for _ in 0..s.repetitions {
        u = &b * &u;
    }
    Ok(u)
}

/// Device parameters used to replace effective segments by the exact
/// first-RWA quad-frame Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealisticOptions {
    /// `Ω/δ` on driven qubits.
    pub omega_over_delta: f64,
    /// `g/δ` on every bond.
    pub g_over_delta: f64,
    pub integrator: IntegratorOptions,
}

impl Default for RealisticOptions {
    fn default() -> Self {
        Self {
            omega_over_delta: 0.05,
            g_over_delta: 0.02,
            integrator: IntegratorOptions::default(),
        }
    }
}

/// Cross-resonance chain whose effective coupling equals `j` for the given pattern.
pub fn realistic_device(n: usize, j: f64, driven: Driven, o: &RealisticOptions) -> Result<DeviceParams> {
    let r = o.omega_over_delta;
    if r.is_nan() || r <= 0.0 || o.g_over_delta.is_nan() || o.g_over_delta <= 0.0 {
        return Err(Error::Params("realistic ratios must be positive".into()));
    }
    if j == 0.0 {
        return Err(Error::Params("realistic mode needs J ≠ 0".into()));
    }
    // |J| = g r / 4, so g = 4|J|/r and δ = g / (g/δ).
    let g = 4.0 * j.abs() / r;
    let delta = g / o.g_over_delta;
    // All driven: J = −gΩ/4δ. Odd/even: J = +gΩ/4δ.
    let sign = match driven {
        Driven::All => -j.signum(),
        _ => j.signum(),
    };
    let mut p = DeviceParams::cr_chain(n, driven, g, delta, sign * r, 10.0 * delta * n as f64)?;
    if driven == Driven::All {
        // Every qubit carries the same detuned drive, and qubits are spaced by
        // η = √(δ² + Ω²) so the bond frequency matches the dressed frame rate.
        let eta = delta.hypot(p.drive[0]);
        let top = p.omega_q[0];
        for k in 0..n {
            p.omega_q[k] = top - k as f64 * eta;
            p.omega[k] = p.omega_q[k] - delta;
            p.drive[k] = p.drive[0];
        }
    }
    p.validate()?;
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub block: usize,
    pub time: f64,
    pub norm: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub observables: Vec<String>,
    pub rows: Vec<SimRow>,
}

/// Runs the schedule on a state, recording `⟨O⟩` after every block.
/// With `realistic`, analog segments evolve under the exact first-RWA
/// quad-frame Hamiltonian of a device tuned to the same `J` (dense, chains only).
pub fn simulate(
    s: &Schedule,
    psi0: &StateVector,
    observables: &[(String, PauliSum)],
    realistic: Option<&RealisticOptions>,
    num: &Numerics,
) -> Result<Simulation> {
    let n = s.nqubits();
    if psi0.nqubits() != n {
        return Err(Error::SizeMismatch {
            left: psi0.nqubits(),
            right: n,
        });
    }
    for (_, o) in observables {
        if o.nqubits() != n {
            return Err(Error::SizeMismatch {
                left: o.nqubits(),
                right: n,
            });
        }
    }
    if realistic.is_some() && s.model.kind == ModelKind::Xy2d {
        return Err(Error::Unsupported("realistic mode is defined for chains".into()));
    }
    if realistic.is_some() && n > num.dense_limit {
        return Err(Error::DenseLimit {
            nqubits: n,
            limit: num.dense_limit,
        });
    }
    let mut psi = psi0.clone();
    let mut rows = Vec::with_capacity(s.repetitions);
    let mut t_analog = 0.0;
    let mut devices: HashMap<u8, (DeviceParams, crate::hamiltonian::TimeDependentHamiltonian)> = HashMap::new();
    for b in 0..s.repetitions {
        for step in &s.block {
            match step {
                Step::Gate { layer } => {
                    let m = layer.kind.matrix();
                    for q in layer.support.sites(n)? {
                        psi.apply_single(q, &m);
                    }
                }
                Step::Analog {
                    duration,
                    hamiltonian,
                    drive,
                } => {
                    match realistic {
                        None => psi = expm_multiply(hamiltonian, *duration, &psi)?,
                        Some(o) => {
                            let key = drive.driven as u8;
                            if let Entry::Vacant(e) = devices.entry(key) {
                                let p = realistic_device(n, s.model.j, drive.driven, o)?;
                                let h = qf_exact(&p)?;
                                e.insert((p, h));
                            }
                            let h = &devices[&key].1;
                            let u = propagate(h, t_analog, t_analog + duration, &o.integrator, num.dense_limit)?;
                            let v = &u.unitary.0 * nalgebra::DVector::from_column_slice(psi.amplitudes());
                            psi = StateVector::from_amplitudes(v.as_slice().to_vec())?;
                        }
                    }
                    t_analog += duration;
                }
                Step::Reconfigure { .. } => {}
            }
        }
        let mut values = Vec::with_capacity(observables.len());
        for (_, o) in observables {
            values.push(psi.expectation(o)?.re);
        }
        rows.push(SimRow {
            block: b + 1,
            time: (b + 1) as f64 * s.model.tau,
            norm: psi.norm(),
            values,
        });
    }
    Ok(Simulation {
        observables: observables.iter().map(|(k, _)| k.clone()).collect(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMethod {
    /// Phase-insensitive operator distance of dense unitaries.
    Dense,
    /// `min_θ ‖(U_block − e^{iθ} U_target)ψ‖` on a seeded random state, a lower
    /// bound on the operator distance.
    RandomState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockError {
    pub tau: f64,
    pub distance: f64,
    pub method: ErrorMethod,
}

/// Distance between one compiled block and `exp(−i H_target τ_total)`, with
/// `τ_total` the block's analog time divided over the target pieces.
pub fn block_error(m: &TargetModel, tau: f64, num: &Numerics) -> Result<BlockError> {
    let mut one = m.clone();
    one.tau = tau;
    one.m = 1;
    let s = compile(&one, CompileOptions::default())?;
    let h = one.target()?;
    let n = one.nqubits();
    if n <= num.dense_limit {
        let u = block_unitary(&s, num.dense_limit)?;
        let v = to_dense(&h, num.dense_limit)?.expm_hermitian(tau)?;
        return Ok(BlockError {
            tau,
            distance: phase_insensitive_distance(&u, &v)?,
            method: ErrorMethod::Dense,
        });
    }
    let psi = StateVector::random(n, num.seed)?;
    let sim_target = expm_multiply(&h, tau, &psi)?;
    let mut out = psi.clone();
    for step in &s.block {
        match step {
            Step::Gate { layer } => {
                let g = layer.kind.matrix();
                for q in layer.support.sites(n)? {
                    out.apply_single(q, &g);
                }
            }
            Step::Analog {
                duration, hamiltonian, ..
            } => out = expm_multiply(hamiltonian, *duration, &out)?,
            Step::Reconfigure { .. } => {}
        }
    }
    Ok(BlockError {
        tau,
        distance: out.phase_insensitive_distance(&sim_target),
        method: ErrorMethod::RandomState,
    })
}

/// Reference propagation of the target Hamiltonian, for comparison with `simulate`.
pub fn exact_evolution(
    m: &TargetModel,
    psi0: &StateVector,
    observables: &[(String, PauliSum)],
    t: f64,
) -> Result<Vec<f64>> {
    let psi = expm_multiply(&m.target()?, t, psi0)?;
    observables.iter().map(|(_, o)| Ok(psi.expectation(o)?.re)).collect()
}

/// Toggles the native Hamiltonian by a single layer; convenience for reports.
pub fn toggled_native(m: &TargetModel, drive: DriveConfig, l: &GateLayer) -> Result<PauliSum> {
    toggle(&m.native(drive)?, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num() -> Numerics {
        Numerics::default()
    }

    #[test]
    fn ising_block_shape() {
        let m = TargetModel::chain(ModelKind::Ising1d, 4, 1.0, 0.3, 1).unwrap();
        let s = compile(&m, CompileOptions::default()).unwrap();
        assert_eq!(s.block.len(), 7);
        assert!(matches!(
            s.block[3],
            Step::Reconfigure {
                driven: Driven::EvenOnly
            }
        ));
        let f = compile(&m, CompileOptions { fuse: true }).unwrap();
        assert_eq!(f.gate_layers_per_block(), 2);
        assert!((s.analog_time_per_block() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn xy_block_shape() {
        let m = TargetModel::chain(ModelKind::Xy1d, 4, 1.0, 0.7, 2).unwrap();
        let s = compile(&m, CompileOptions::default()).unwrap();
        assert_eq!(s.block.len(), 10);
        assert_eq!(s.gate_layers_per_block(), 8);
        assert_eq!(s.repetitions, 2);
        let f = compile(&m, CompileOptions { fuse: true }).unwrap();
        assert_eq!(f.gate_layers_per_block(), 6);
    }

    #[test]
    fn heisenberg_segments_are_the_cyclic_family() {
        let m = TargetModel::chain(ModelKind::Heisenberg1d, 5, 0.8, 0.1, 1).unwrap();
        let s = compile(&m, CompileOptions::default()).unwrap();
        let segs = segment_hamiltonians(&s.block).unwrap();
        let l = &m.lattice;
        assert_eq!(segs[0], build_canonical(K::HE, l, 0.8).unwrap());
        assert_eq!(segs[1], build_canonical(K::HEPrime, l, 0.8).unwrap());
        assert_eq!(segs[2], build_canonical(K::HEDoublePrime, l, 0.8).unwrap());
    }

    #[test]
    fn exact_models_match_target() {
        for kind in [ModelKind::Ising1d, ModelKind::Xy1d] {
            let m = TargetModel::chain(kind, 4, 1.0, 0.7, 1).unwrap();
            let e = block_error(&m, 0.7, &num()).unwrap();
            assert!(e.distance < 1e-10, "{kind} {e:?}");
        }
    }

    #[test]
    fn fusion_preserves_unitary() {
        for kind in [ModelKind::Ising1d, ModelKind::Xy1d, ModelKind::Heisenberg1d] {
            let m = TargetModel::chain(kind, 4, 1.0, 0.3, 1).unwrap();
            let a = block_unitary(&compile(&m, CompileOptions::default()).unwrap(), 12).unwrap();
            let b = block_unitary(&compile(&m, CompileOptions { fuse: true }).unwrap(), 12).unwrap();
            assert!(phase_insensitive_distance(&a, &b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn broken_block_is_rejected() {
        let m = TargetModel::chain(ModelKind::Xy1d, 4, 1.0, 0.7, 1).unwrap();
        let mut s = compile(&m, CompileOptions::default()).unwrap();
        s.block.remove(0);
        assert!(matches!(check_structure(&s), Err(Error::Structure(_))));
    }

    #[test]
    fn schedule_json_roundtrip() {
        let sq = Lattice::square(2, 2, Boundary::Periodic).unwrap();
        let m = TargetModel::new(ModelKind::Xy2d, sq, 1.0, 0.1, 3).unwrap();
        let s = compile(&m, CompileOptions::default()).unwrap();
        let back = Schedule::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn empty_schedule_is_identity() {
        let m = TargetModel::chain(ModelKind::Ising1d, 3, 1.0, 0.1, 0).unwrap();
        let s = compile(&m, CompileOptions::default()).unwrap();
        let u = schedule_unitary(&s, 12).unwrap();
        assert!(u.max_abs_diff(&DenseMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn simulation_conserves_magnetization() {
        let m = TargetModel::chain(ModelKind::Xy1d, 5, 1.0, 0.2, 6).unwrap();
        let s = compile(&m, CompileOptions::default()).unwrap();
        let mut sz = PauliSum::zero(5).unwrap();
        for q in 0..5 {
            sz.add_real(PauliString::single(q, Pauli::Z), 1.0);
        }
        let psi = StateVector::from_bitstring("10000").unwrap();
        let r = simulate(&s, &psi, &[("sz".into(), sz)], None, &num()).unwrap();
        assert_eq!(r.rows.len(), 6);
        for row in &r.rows {
            assert!((row.norm - 1.0).abs() < 1e-10);
            assert!((row.values[0] - 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn realistic_device_matches_coupling() {
        for (driven, j) in [(Driven::All, 1.0), (Driven::All, -0.5), (Driven::OddOnly, 0.7)] {
            let o = RealisticOptions::default();
            let p = realistic_device(4, j, driven, &o).unwrap();
            let c = crate::device::effective_coupling(&p, 0).unwrap();
            let eff = match driven {
                Driven::All => c,
                _ => -c,
            };
            assert!((eff - j).abs() < 1e-12, "{driven:?} {eff}");
        }
    }
}
