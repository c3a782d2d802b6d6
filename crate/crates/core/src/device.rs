//! Device parameters, drive configurations and lattice geometry.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::check_qubits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "open" => Ok(Boundary::Open),
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            _ => Err(Error::Params(format!("unknown boundary {s:?}"))),
        }
    }
}

/// Which qubits carry a cross-resonance drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Driven {
    #[default]
    All,
    OddOnly,
    EvenOnly,
}

impl Driven {
    /// Whether qubit index `q` (0-based) acts as a control on an `n`-qubit open chain.
    pub fn is_control(self, q: usize, n: usize) -> bool {
        if q + 1 >= n {
            return false;
        }
        match self {
            Driven::All => true,
            // Site k = q + 1; odd sites have even indices.
            Driven::OddOnly => q.is_multiple_of(2),
            Driven::EvenOnly => q % 2 == 1,
        }
    }
}

impl std::str::FromStr for Driven {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "all" => Ok(Driven::All),
            "odd" | "odd_only" => Ok(Driven::OddOnly),
            "even" | "even_only" => Ok(Driven::EvenOnly),
            _ => Err(Error::Params(format!("unknown drive pattern {s:?}"))),
        }
    }
}

/// Drive pattern plus the uniform drive phase used by the model builders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct DriveConfig {
    pub driven: Driven,
    pub phi: f64,
}

impl DriveConfig {
    pub fn new(driven: Driven) -> Self {
        Self { driven, phi: 0.0 }
    }

    pub fn with_phase(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }
}

/// Per-qubit and per-bond physical parameters. Angular frequencies, ħ = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub omega_q: Vec<f64>,
    pub omega: Vec<f64>,
    #[serde(rename = "Omega")]
    pub drive: Vec<f64>,
    pub phi: Vec<f64>,
    /// `g[k]` couples qubits `k` and `k+1` (the last entry wraps when periodic).
    pub g: Vec<f64>,
    pub boundary: Boundary,
}

impl DeviceParams {
    /// Checks array lengths and finiteness.
    pub fn new(
        omega_q: Vec<f64>,
        omega: Vec<f64>,
        drive: Vec<f64>,
        phi: Vec<f64>,
        g: Vec<f64>,
        boundary: Boundary,
    ) -> Result<Self> {
        let p = Self {
            omega_q,
            omega,
            drive,
            phi,
            g,
            boundary,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.omega_q.len();
        check_qubits(n)?;
        for (name, v) in [("omega", &self.omega), ("Omega", &self.drive), ("phi", &self.phi)] {
            if v.len() != n {
                return Err(Error::Params(format!("{name} has {} entries, expected {n}", v.len())));
            }
        }
        let nb = self.nbonds();
        if self.g.len() != nb {
            return Err(Error::Params(format!("g has {} entries, expected {nb}", self.g.len())));
        }
        let all = self
            .omega_q
            .iter()
            .chain(&self.omega)
            .chain(&self.drive)
            .chain(&self.phi)
            .chain(&self.g);
        if all.clone().any(|x| !x.is_finite()) {
            return Err(Error::Params("non-finite device parameter".into()));
        }
        Ok(())
    }

    /// Cross-resonance tuned chain with uniform `g`, detuning `delta` and
    /// `Omega = ratio · delta` on every control; targets are left undriven
    /// (`omega = omega_q`, `Omega = 0`). Qubit frequencies step down by
    /// `delta` from `omega0` so each control sits at its right neighbour's
    /// resonance.
    pub fn cr_chain(n: usize, driven: Driven, g: f64, delta: f64, ratio: f64, omega0: f64) -> Result<Self> {
        check_qubits(n)?;
        let omega_q: Vec<f64> = (0..n).map(|k| omega0 - delta * k as f64).collect();
        let mut omega = omega_q.clone();
        let mut drive = vec![0.0; n];
        for q in 0..n {
            if driven.is_control(q, n) {
                omega[q] = omega_q[q + 1];
                drive[q] = ratio * delta;
            }
        }
        Self::new(omega_q, omega, drive, vec![0.0; n], vec![g; n - 1], Boundary::Open)
    }

    pub fn with_uniform_phase(mut self, phi: f64) -> Self {
        self.phi = vec![phi; self.n()];
        self
    }

    pub fn n(&self) -> usize {
        self.omega_q.len()
    }

    pub fn nbonds(&self) -> usize {
        match self.boundary {
            Boundary::Open => self.n() - 1,
            Boundary::Periodic => self.n(),
        }
    }

    /// `delta[k] = omega_q[k] − omega[k]`.
    pub fn delta(&self, k: usize) -> f64 {
        self.omega_q[k] - self.omega[k]
    }

    /// Mixing angle with `tan ξ = δ/Ω`, via `atan2` so `Ω = 0` is regular.
    pub fn xi(&self, k: usize) -> f64 {
        self.delta(k).atan2(self.drive[k])
    }

    pub fn eta(&self, k: usize) -> f64 {
        self.delta(k).hypot(self.drive[k])
    }

    pub fn is_driven(&self, k: usize) -> bool {
        self.drive[k] != 0.0
    }

    /// Largest angular frequency appearing in the lab-frame Hamiltonian.
    pub fn max_frequency(&self) -> f64 {
        self.omega_q
            .iter()
            .chain(&self.omega)
            .fold(0.0f64, |a, w| a.max(w.abs()))
    }

    /// Returns `(g, delta, Omega)` when every control shares them.
    pub fn uniform(&self) -> Result<(f64, f64, f64)> {
        let controls: Vec<usize> = (0..self.n()).filter(|&k| self.is_driven(k)).collect();
        let first = *controls
            .first()
            .ok_or_else(|| Error::Params("no driven qubit".into()))?;
        let (d0, o0) = (self.delta(first), self.drive[first]);
        let g0 = self.g[0];
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        let same = controls
            .iter()
            .all(|&k| close(self.delta(k), d0) && close(self.drive[k], o0))
            && self.g.iter().all(|&g| close(g, g0));
        if same {
            Ok((g0, d0, o0))
        } else {
            Err(Error::Params("parameters are not uniform".into()))
        }
    }
}

/// Effective coupling `J_k = −g_k Ω_k / (4 δ_k)` of the bond driven from qubit `k`.
pub fn effective_coupling(p: &DeviceParams, k: usize) -> Result<f64> {
    let om = p.drive[k];
    if om == 0.0 {
        return Ok(0.0);
    }
    let d = p.delta(k);
    if d == 0.0 {
        return Err(Error::ZeroDetuning(k + 1));
    }
    Ok(-p.g[k] * om / (4.0 * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    pub omega_over_delta: f64,
    pub g_over_delta: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            omega_over_delta: 0.1,
            g_over_delta: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitRegime {
    /// 1-based site.
    pub site: usize,
    pub omega_over_delta: Option<f64>,
    pub g_over_delta: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub thresholds: RegimeThresholds,
    pub qubits: Vec<QubitRegime>,
}

impl RegimeReport {
    pub fn ok(&self) -> bool {
        self.qubits.iter().all(|q| q.warnings.is_empty())
    }
}

/// Flags weak-driving ratios. Only a driven qubit with zero detuning is an error.
pub fn validate_regime(p: &DeviceParams, th: RegimeThresholds) -> Result<RegimeReport> {
    let mut qubits = Vec::with_capacity(p.n());
    for k in 0..p.n() {
        let d = p.delta(k);
        if p.is_driven(k) && d == 0.0 {
            return Err(Error::ZeroDetuning(k + 1));
        }
        let mut q = QubitRegime {
            site: k + 1,
            omega_over_delta: None,
            g_over_delta: None,
            warnings: Vec::new(),
        };
        if d != 0.0 {
            let r = (p.drive[k] / d).abs();
            q.omega_over_delta = Some(r);
            if r > th.omega_over_delta {
                q.warnings
                    .push(format!("Omega/delta = {r:.4} exceeds {}", th.omega_over_delta));
            }
            if k < p.g.len() {
                let r = (p.g[k] / d).abs();
                q.g_over_delta = Some(r);
                if r > th.g_over_delta {
                    q.warnings.push(format!("g/delta = {r:.4} exceeds {}", th.g_over_delta));
                }
            }
        }
        qubits.push(q);
    }
    Ok(RegimeReport { thresholds: th, qubits })
}

/// Chain or square lattice. Site `(i, j)` (1-based) has index `(j−1)·nx + (i−1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub nx: usize,
    /// 1 for a chain.
    pub ny: usize,
    pub dim: u8,
    pub boundary: Boundary,
}

impl Lattice {
    pub fn chain(n: usize, boundary: Boundary) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self {
            nx: n,
            ny: 1,
            dim: 1,
            boundary,
        })
    }

    pub fn square(nx: usize, ny: usize, boundary: Boundary) -> Result<Self> {
        check_qubits(nx * ny)?;
        if nx < 2 || ny < 2 {
            return Err(Error::Params(format!(
                "square lattice {nx}x{ny} needs both extents ≥ 2"
            )));
        }
        Ok(Self {
            nx,
            ny,
            dim: 2,
            boundary,
        })
    }

    pub fn nqubits(&self) -> usize {
        self.nx * self.ny
    }

    /// Index of 1-based site `(i, j)`, wrapping when periodic; `None` off an open edge.
    pub fn site(&self, i: usize, j: usize) -> Option<usize> {
        let wrap = |v: usize, n: usize| -> Option<usize> {
            if (1..=n).contains(&v) {
                Some(v - 1)
            } else if self.boundary == Boundary::Periodic {
                Some((v - 1) % n)
            } else {
                None
            }
        };
        Some(wrap(j, self.ny)? * self.nx + wrap(i, self.nx)?)
    }

    /// Chain index of 1-based site `k`, with the same wrapping rule.
    pub fn chain_site(&self, k: usize) -> Option<usize> {
        self.site(k, 1)
    }

    /// 2D families tile a two-site unit cell, so periodic extents must be even.
    pub fn require_even_tiling(&self) -> Result<()> {
        if self.dim == 2 && self.boundary == Boundary::Periodic && (self.nx % 2 == 1 || self.ny % 2 == 1) {
            return Err(Error::Params(format!(
                "periodic {}x{} lattice cannot close the unit-cell tiling",
                self.nx, self.ny
            )));
        }
        Ok(())
    }
}

/// Target-model parameters: coupling, block duration and block count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(rename = "J")]
    pub j: f64,
    pub tau: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

impl ModelParams {
    pub fn new(j: f64, tau: f64, m: usize) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) || !j.is_finite() {
            return Err(Error::Params(format!("tau must be positive and finite, got {tau}")));
        }
        if m == 0 {
            return Err(Error::Params("M must be at least 1".into()));
        }
        Ok(Self { j, tau, m })
    }

    pub fn total_time(&self) -> f64 {
        self.tau * self.m as f64
    }
}

/// Flat parameter map as read from a `key = value` file or a JSON object.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamMap(pub BTreeMap<String, String>);

impl ParamMap {
    /// `key = value` lines; `#` starts a comment.
    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut m = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| Error::Params(format!("line {}: expected key = value", no + 1)))?;
            m.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(m))
    }

    /// JSON object with the same keys; per-qubit keys may also be arrays.
    pub fn parse_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Params("parameter JSON must be an object".into()))?;
        let mut m = BTreeMap::new();
        for (k, v) in obj {
            match v {
                serde_json::Value::Array(items) => {
                    for (i, it) in items.iter().enumerate() {
                        m.insert(format!("{k}.{}", i + 1), scalar(it)?);
                    }
                }
                other => {
                    m.insert(k.clone(), scalar(other)?);
                }
            }
        }
        Ok(Self(m))
    }

    /// Detects JSON by a leading `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_kv(text)
        }
    }

    /// Entries of `other` replace those of `self`.
    pub fn merged(&self, other: &ParamMap) -> ParamMap {
        let mut m = self.0.clone();
        m.extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        ParamMap(m)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.0.get(key).map(|v| parse_number(key, v)).transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.0
            .get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Params(format!("{key}: expected a non-negative integer, got {v:?}")))
            })
            .transpose()
    }

    /// Builds device parameters. A cross-resonance chain is generated from
    /// `n`, `driven`, `g`, `delta`, `ratio` (Ω/δ) and `omega0`; uniform keys
    /// `omega_q`, `omega`, `Omega`, `phi`, `g` and indexed keys such as
    /// `Omega.2` then override individual entries.
    pub fn device(&self) -> Result<DeviceParams> {
        let n = self
            .get_usize("n")?
            .ok_or_else(|| Error::Params("missing qubit count n".into()))?;
        let boundary: Boundary = self
            .0
            .get("boundary")
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or_default();
        let driven: Driven = self.0.get("driven").map(|s| s.parse()).transpose()?.unwrap_or_default();
        let g = self.get_f64("g")?.unwrap_or(1.0);
        let delta = self.get_f64("delta")?.unwrap_or(50.0);
        let ratio = self.get_f64("ratio")?.unwrap_or(0.05);
        let omega0 = self.get_f64("omega0")?.unwrap_or(2000.0);
        let mut p = DeviceParams::cr_chain(n, driven, g, delta, ratio, omega0)?;
        if boundary == Boundary::Periodic {
            p.boundary = Boundary::Periodic;
            p.g.push(g);
        }
        let nb = p.nbonds();
        let fields: [(&str, &mut Vec<f64>); 5] = [
            ("omega_q", &mut p.omega_q),
            ("omega", &mut p.omega),
            ("Omega", &mut p.drive),
            ("phi", &mut p.phi),
            ("g", &mut p.g),
        ];
        for (name, arr) in fields {
            let len = if name == "g" { nb } else { n };
            if name != "g" {
                if let Some(v) = self.get_f64(name)? {
                    arr.iter_mut().for_each(|x| *x = v);
                }
            }
            for (key, val) in self.0.range(format!("{name}.")..) {
                let Some(idx) = key.strip_prefix(&format!("{name}.")) else {
                    break;
                };
                let k: usize = idx
                    .parse()
                    .map_err(|_| Error::Params(format!("bad index in key {key:?}")))?;
                if k == 0 || k > len {
                    return Err(Error::Params(format!("{key}: index outside 1..={len}")));
                }
                arr[k - 1] = parse_number(key, val)?;
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn model(&self) -> Result<ModelParams> {
        ModelParams::new(
            self.get_f64("J")?.unwrap_or(1.0),
            self.get_f64("tau")?.unwrap_or(0.1),
            self.get_usize("M")?.unwrap_or(1),
        )
    }

    pub fn drive(&self) -> Result<DriveConfig> {
        let driven: Driven = self.0.get("driven").map(|s| s.parse()).transpose()?.unwrap_or_default();
        Ok(DriveConfig {
            driven,
            phi: self.get_f64("phi")?.unwrap_or(0.0),
        })
    }
}

fn scalar(v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Bool(b) => Ok(b.to_string()),
        _ => Err(Error::Params(format!("unsupported parameter value {v}"))),
    }
}

fn parse_number(key: &str, v: &str) -> Result<f64> {
    let t = v.trim();
    let x = match t {
        "pi" => PI,
        "-pi" => -PI,
        "pi/2" => PI / 2.0,
        _ => t
            .parse::<f64>()
            .map_err(|_| Error::Params(format!("{key}: expected a number, got {v:?}")))?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Params(format!("{key}: non-finite value")))
    }
}
