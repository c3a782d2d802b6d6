//! Compile, simulate and compare against direct evolution of the target.

use crda::compiler::{
    block_error, block_unitary, check_structure, compile, exact_evolution, simulate, CompileOptions, ModelKind,
    RealisticOptions, Schedule, TargetModel,
};
use crda::device::{Boundary, Lattice};
use crda::pauli::{phase_insensitive_distance, Numerics, PauliSum, StateVector};

fn z_observables(n: usize) -> Vec<(String, PauliSum)> {
    (0..n)
        .map(|k| {
            let label: String = (0..n).map(|q| if q == k { 'z' } else { 'i' }).collect();
            (
                format!("z{}", k + 1),
                PauliSum::from_labels([(label.as_str(), 1.0)]).unwrap(),
            )
        })
        .collect()
}

#[test]
fn exact_models_track_the_target_block_by_block() {
    let num = Numerics::default();
    for (kind, n) in [(ModelKind::Ising1d, 6), (ModelKind::Xy1d, 6), (ModelKind::Xy1d, 7)] {
        let m = TargetModel::chain(kind, n, 0.8, 0.3, 4).unwrap();
        let s = compile(&m, CompileOptions::default()).unwrap();
        let psi = StateVector::random(n, 11).unwrap();
        let obs = z_observables(n);
        let sim = simulate(&s, &psi, &obs, None, &num).unwrap();
        for row in &sim.rows {
            let exact = exact_evolution(&m, &psi, &obs, row.time).unwrap();
            for (a, b) in row.values.iter().zip(&exact) {
                assert!((a - b).abs() < 1e-9, "{kind} block {}: {a} vs {b}", row.block);
            }
            assert!((row.norm - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn square_lattice_xy_block_error_is_second_order() {
    let lat = Lattice::square(2, 2, Boundary::Open).unwrap();
    let m = TargetModel::new(ModelKind::Xy2d, lat, 1.0, 0.2, 1).unwrap();
    let s = compile(&m, CompileOptions::default()).unwrap();
    check_structure(&s).unwrap();
    let num = Numerics::default();
    let ratio = block_error(&m, 0.1, &num).unwrap().distance / block_error(&m, 0.05, &num).unwrap().distance;
    assert!(ratio > 3.6 && ratio < 4.4, "ratio {ratio}");
}

#[test]
fn heisenberg_block_error_is_second_order_in_tau() {
    let m = TargetModel::chain(ModelKind::Heisenberg1d, 5, 1.0, 0.1, 1).unwrap();
    let num = Numerics::default();
    let coarse = block_error(&m, 0.1, &num).unwrap().distance;
    let fine = block_error(&m, 0.05, &num).unwrap().distance;
    let ratio = coarse / fine;
    assert!(ratio > 3.6 && ratio < 4.4, "ratio {ratio}");
}

#[test]
fn large_chains_use_the_state_vector_estimate() {
    let m = TargetModel::chain(ModelKind::Heisenberg1d, 14, 1.0, 0.1, 1).unwrap();
    let e = block_error(&m, 0.1, &Numerics::default()).unwrap();
    assert!(e.distance > 0.0 && e.distance < 0.1);
    assert_eq!(e.method, crda::compiler::ErrorMethod::RandomState);
}

#[test]
fn schedules_survive_json_and_fusion() {
    for kind in [ModelKind::Ising1d, ModelKind::Xy1d, ModelKind::Heisenberg1d] {
        let m = TargetModel::chain(kind, 5, 1.3, 0.15, 2).unwrap();
        let plain = compile(&m, CompileOptions::default()).unwrap();
        let back = Schedule::from_json(&plain.to_json().unwrap()).unwrap();
        assert_eq!(back, plain);
        let fused = compile(&m, CompileOptions { fuse: true }).unwrap();
        assert!(fused.gate_layers_per_block() <= plain.gate_layers_per_block());
        let d = phase_insensitive_distance(&block_unitary(&plain, 12).unwrap(), &block_unitary(&fused, 12).unwrap())
            .unwrap();
        assert!(d < 1e-10, "{kind}: {d}");
    }
}

#[test]
fn device_driven_segments_converge_as_coupling_weakens() {
    let n = 3;
    let m = TargetModel::chain(ModelKind::Xy1d, n, 1.0, 0.25, 2).unwrap();
    let s = compile(&m, CompileOptions::default()).unwrap();
    let psi = StateVector::from_bitstring("100").unwrap();
    let obs = z_observables(n);
    let num = Numerics::default();
    let ideal = simulate(&s, &psi, &obs, None, &num).unwrap();
    let deviation = |g_over_delta: f64| {
        let o = RealisticOptions {
            g_over_delta,
            ..RealisticOptions::default()
        };
        let r = simulate(&s, &psi, &obs, Some(&o), &num).unwrap();
        r.rows
            .iter()
            .zip(&ideal.rows)
            .flat_map(|(a, b)| a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    };
    let strong = deviation(0.02);
    let weak = deviation(0.005);
    assert!(weak < strong, "{weak} vs {strong}");
    assert!(weak < 0.05, "{weak}");
}
