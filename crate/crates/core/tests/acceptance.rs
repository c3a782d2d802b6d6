//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use crda::analysis::{
    dyson_closed_form, dyson_difference, heis_digital_bond_pair, synthesis_closed_form, table1_check, trotter_bound,
    trotter_commutator, unit_cell_report, SynthesisModel, TrotterModel,
};
use crda::compiler::{block_error, ModelKind, TargetModel};
use crda::device::{Boundary, DeviceParams, Driven, Lattice};
use crda::frames::{
    fit_power_law, reference_device, toggle, uqf_unitarity_defect, verify_effective, GateKind, GateLayer,
    IntegratorOptions,
};
use crda::hamiltonian::{build_canonical, org_td, HamiltonianKind as K};
use crda::pauli::{commutator, DenseMatrix, Numerics, Pauli, PauliString, PauliSum, DEFAULT_DENSE_LIMIT};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn c1() -> Outcome {
    let delta = 10.0;
    let period = 2.0 * PI / delta;
    let (mut worst_h, mut worst_xy) = (0.0f64, 0.0f64);
    for n in 2..=8 {
        let p = DeviceParams::cr_chain(n, Driven::All, 1.0, delta, 1e-4, 20.0 * n as f64 * delta).unwrap();
        let dh = org_td(K::DeltaH, &p).unwrap();
        let dxy = org_td(K::DeltaXy, &p).unwrap();
        for i in 0..20 {
            let t = period * i as f64 / 20.0;
            let a = synthesis_closed_form(SynthesisModel::Control, &p, t).unwrap();
            let b = synthesis_closed_form(SynthesisModel::Xy, &p, t).unwrap();
            worst_h = worst_h.max((dh.at(t).frobenius_norm(true) - a).abs());
            worst_xy = worst_xy.max((dxy.at(t).frobenius_norm(true) - b).abs());
        }
    }
    outcome(
        worst_h <= 1e-3 && worst_xy <= 1e-3,
        format!("max |dH - closed| = {worst_h:.2e}, max |dH_xy - closed| = {worst_xy:.2e} (tol 1e-3)"),
    )
}

fn c2() -> Outcome {
    let delta = 10.0;
    let period = 2.0 * PI / delta;
    let mut worst = 0.0f64;
    for n in 2..=6 {
        let p = DeviceParams::cr_chain(n, Driven::All, 1.0, delta, 1e-4, 20.0 * n as f64 * delta).unwrap();
        for i in 0..50 {
            // Interior points of the period, where the closed form is nonzero.
            let t = period * (i as f64 + 0.5) / 50.0;
            let v = dyson_difference(SynthesisModel::Control, &p, t).unwrap();
            let a = dyson_closed_form(&p, t).unwrap();
            worst = worst.max((v - a).abs() / a);
        }
    }
    outcome(worst <= 1e-6, format!("max relative deviation {worst:.2e} (tol 1e-6)"))
}

fn c3() -> Outcome {
    let num = Numerics::default();
    let mut worst = 0.0f64;
    for kind in [ModelKind::Ising1d, ModelKind::Xy1d] {
        for n in 2..=8 {
            for tau in [0.1, 1.0, 5.0] {
                let m = TargetModel::chain(kind, n, 1.0, tau, 1).unwrap();
                worst = worst.max(block_error(&m, tau, &num).unwrap().distance);
            }
        }
    }
    outcome(worst <= 1e-10, format!("max block distance {worst:.2e} (tol 1e-10)"))
}

fn c4() -> Outcome {
    let pairs = [
        (K::H1, K::H2),
        (K::HEven, K::HOdd),
        (K::HEvenPrime, K::HOddPrime),
        (K::QfEffectiveOdd, K::QfEffectiveEven),
    ];
    let mut failures = Vec::new();
    for n in 2..=10 {
        let lat = Lattice::chain(n, Boundary::Open).unwrap();
        for (a, b) in pairs {
            let c = commutator(
                &build_canonical(a, &lat, 1.0).unwrap(),
                &build_canonical(b, &lat, 1.0).unwrap(),
            )
            .unwrap();
            if !c.is_zero() {
                failures.push(format!("[{a},{b}] N={n}: {} terms", c.len()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} nonzero commutators {failures:?}", failures.len()),
    )
}

fn c5() -> Outcome {
    let u = GateKind::UE.matrix();
    let m = DenseMatrix::product_of_singles(&[u]).unwrap();
    let cube = &(&m * &m) * &m;
    let cube_defect = (&cube + &DenseMatrix::identity(1)).spectral_norm();
    let layer = GateLayer::all(GateKind::UE);
    let n = 5;
    let mut perm_ok = true;
    for q in 0..n {
        for (from, to) in [(Pauli::X, Pauli::Z), (Pauli::Y, Pauli::X), (Pauli::Z, Pauli::Y)] {
            let mut h = PauliSum::zero(n).unwrap();
            h.add_real(PauliString::single(q, from), 1.0);
            let mut want = PauliSum::zero(n).unwrap();
            want.add_real(PauliString::single(q, to), 1.0);
            perm_ok &= toggle(&h, &layer).unwrap() == want;
        }
    }
    let lat = Lattice::chain(8, Boundary::Open).unwrap();
    let sum = &(&build_canonical(K::HE, &lat, 1.0).unwrap() + &build_canonical(K::HEPrime, &lat, 1.0).unwrap())
        + &build_canonical(K::HEDoublePrime, &lat, 1.0).unwrap();
    let heis_ok = sum == build_canonical(K::HHeis, &lat, 1.0).unwrap();
    outcome(
        cube_defect <= 1e-12 && perm_ok && heis_ok,
        format!("||U_E^3 + 1|| = {cube_defect:.1e}, permutation exact: {perm_ok}, H_E+H_E'+H_E'' = H_Heis: {heis_ok}"),
    )
}

fn c6() -> Outcome {
    let num = Numerics::default();
    let m = TargetModel::chain(ModelKind::Heisenberg1d, 4, 1.0, 0.02, 1).unwrap();
    let ratios: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&tau| block_error(&m, tau, &num).unwrap().distance / (tau * tau))
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let flat = (hi - lo) / lo <= 0.10;
    let mut bounds_ok = true;
    let mut worst_margin = f64::MAX;
    for n in 3..=8 {
        let lat = Lattice::chain(n, Boundary::Open).unwrap();
        let (_, da) = trotter_commutator(TrotterModel::HeisDa, &lat, 1.0, &num).unwrap();
        let v = da.entries[0].value;
        bounds_ok &= v <= trotter_bound(TrotterModel::HeisDa, n, 1.0);
        worst_margin = worst_margin.min(trotter_bound(TrotterModel::HeisDa, n, 1.0) - v);
    }
    let pair = heis_digital_bond_pair(1.0, &num).unwrap();
    let pair_ok = (pair - 4.0 * 3f64.sqrt()).abs() <= 1e-6 && pair <= 12.0;
    outcome(
        flat && bounds_ok && pair_ok,
        format!(
            "error/tau^2 = {:.4?} (spread {:.1}%), DA norm <= 6J^2N for N=3..8: {bounds_ok} (min margin {worst_margin:.3}), bond pair {pair:.7}",
            ratios,
            100.0 * (hi - lo) / lo
        ),
    )
}

fn c7() -> Outcome {
    let r = table1_check(&Lattice::square(4, 4, Boundary::Periodic).unwrap()).unwrap();
    let per_cell = r.get("nonzero_per_unit_cell").map(|e| e.value).unwrap_or(f64::NAN);
    outcome(
        r.pass(),
        format!("{per_cell} nonzero families per unit cell, all checks: {}", r.pass()),
    )
}

fn c8() -> Outcome {
    let num = Numerics::default();
    let lat = Lattice::square(4, 4, Boundary::Periodic).unwrap();
    let (_, da) = trotter_commutator(TrotterModel::Xy2dDa, &lat, 1.0, &num).unwrap();
    let (_, dig) = trotter_commutator(TrotterModel::Xy2dDigital, &lat, 1.0, &num).unwrap();
    let (a, b) = (da.entries[0].value, dig.entries[0].value);
    let cells = unit_cell_report(1.0, &num).unwrap();
    let cell_text: Vec<String> = cells
        .entries
        .iter()
        .map(|e| format!("{}={:.3}", e.name, e.value))
        .collect();
    outcome(
        a <= 128.0 && b <= 384.0 && b / a >= 1.5,
        format!(
            "||[H_I,H_II]|| = {a:.4} <= 128, ||[H_xx,H_yy]|| = {b:.4} <= 384, ratio {:.4} >= 1.5; reported: {}",
            b / a,
            cell_text.join(" ")
        ),
    )
}

fn c9() -> Outcome {
    let opts = IntegratorOptions::default();
    let t = 20.0 * PI;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..4 {
        let s = 0.5f64.powi(i);
        let p = reference_device(0.02 * s, 0.05 * s).unwrap();
        let r = verify_effective(&p, Driven::OddOnly, t, true, &opts, DEFAULT_DENSE_LIMIT).unwrap();
        xs.push(0.05 * s);
        ys.push(r.distance);
    }
    let slope = fit_power_law(&xs, &ys).unwrap();
    let first_ratio = ys[0] / ys[1];
    outcome(
        ys[0] <= 0.05 && (slope - 2.0).abs() <= 0.3,
        format!(
            "distances [{}], first halving x{first_ratio:.2}, fit exponent {slope:.3}",
            ys.iter().map(|y| format!("{y:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn c10() -> Outcome {
    let d = |r: f64| uqf_unitarity_defect(&reference_device(0.02, r).unwrap(), 64).unwrap();
    let (a, b) = (d(0.1), d(0.05));
    let ratio = a / b;
    outcome(
        (ratio - 4.0).abs() <= 0.5 && a <= 0.02,
        format!("defect {a:.3e} at 0.1, {b:.3e} at 0.05, ratio {ratio:.3}"),
    )
}

fn c11() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_crda");
    let runs: [&[&str]; 5] = [
        &["errors", "--which", "trotter", "--model", "xy2d_da", "--format", "csv"],
        &[
            "errors",
            "--which",
            "synthesis",
            "--model",
            "zz",
            "--n",
            "4",
            "--sweep",
            "t",
            "--range",
            "0:0.1",
            "--points",
            "7",
        ],
        &[
            "simulate",
            "--model",
            "heisenberg",
            "--n",
            "6",
            "--tau",
            "0.05",
            "--blocks",
            "4",
            "--observable",
            "z1",
            "--state",
            "100000",
            "--out",
            "csv",
        ],
        &["verify-frames", "--rwa", "--sweep", "both", "--points", "3"],
        &["compile", "--model", "xy2d", "--nx", "4", "--ny", "2", "--tau", "0.1"],
    ];
    let mut mismatched = Vec::new();
    for args in runs {
        let once = Command::new(exe).args(args).output().expect("run crda");
        let twice = Command::new(exe)
            .args(args)
            .arg("--threads")
            .arg("1")
            .output()
            .expect("run crda");
        let strip = |b: &[u8]| {
            String::from_utf8_lossy(b)
                .replace("\"threads\":1", "\"threads\":null")
                .replace("\"threads\": 1", "\"threads\": null")
        };
        if !once.status.success() || once.stdout.is_empty() || strip(&once.stdout) != strip(&twice.stdout) {
            mismatched.push(args[0]);
        }
        let again = Command::new(exe).args(args).output().expect("run crda");
        if again.stdout != once.stdout {
            mismatched.push(args[0]);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!("5 commands re-run, differing outputs: {mismatched:?}"),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, f64);
    let criteria: [Criterion; 11] = [
        ("1 synthesis norm", c1, 10.0),
        ("2 dyson propagator", c2, 10.0),
        ("3 exact ising/xy blocks", c3, 30.0),
        ("4 commutation backbone", c4, 60.0),
        ("5 U_E properties", c5, 60.0),
        ("6 heisenberg trotter", c6, 60.0),
        ("7 2D XY structure", c7, 30.0),
        ("8 2D XY bounds", c8, 600.0),
        ("9 frame verification", c9, 60.0),
        ("10 U_QF unitarity", c10, 60.0),
        ("11 determinism", c11, 600.0),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let pass = o.pass && within(elapsed, limit);
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.2}s, limit {limit}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
