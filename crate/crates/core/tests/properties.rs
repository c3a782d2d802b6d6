//! Randomized algebraic properties of the core types.

use crda::compiler::{block_unitary, compile, fuse, CompileOptions, ModelKind, Schedule, TargetModel};
use crda::frames::{layer_unitary, toggle, GateKind, GateLayer, Support};
use crda::hamiltonian::Signal;
use crda::pauli::{
    commutator, expm_multiply, spectral_norm, to_dense, DenseMatrix, PauliString, PauliSum, StateVector,
};
use num_complex::Complex64;
use proptest::prelude::*;

const N: usize = 4;

fn pauli_sum(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    let mask = (1u64 << n) - 1;
    prop::collection::vec((0..=mask, 0..=mask, -2.0..2.0f64), 1..=max_terms).prop_map(move |ts| {
        PauliSum::from_terms(
            n,
            ts.into_iter()
                .map(|(x, z, c)| (PauliString::from_bits(x, z), Complex64::new(c, 0.0))),
        )
        .unwrap()
    })
}

fn gate_kind() -> impl Strategy<Value = GateKind> {
    prop::sample::select(vec![
        GateKind::Identity,
        GateKind::Hadamard,
        GateKind::Rx90,
        GateKind::Rx90Dag,
        GateKind::S,
        GateKind::SDag,
        GateKind::UE,
        GateKind::UEDag,
        GateKind::UE2,
    ])
}

fn support() -> impl Strategy<Value = Support> {
    prop_oneof![
        Just(Support::All),
        Just(Support::Odd),
        Just(Support::Even),
        prop::collection::btree_set(0..N, 0..=N).prop_map(|s| Support::Sites(s.into_iter().collect())),
    ]
}

fn signal() -> impl Strategy<Value = Signal> {
    prop::collection::vec((-2.0..2.0f64, 0.0..5.0f64, -3.0..3.0f64), 0..4).prop_map(|parts| {
        parts
            .into_iter()
            .fold(Signal::zero(), |acc, (a, w, phi)| acc.add(&Signal::cos(a, w, phi)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_is_antisymmetric(a in pauli_sum(N, 6), b in pauli_sum(N, 6)) {
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        prop_assert!(ab.try_add(&ba).unwrap().is_zero());
    }

    #[test]
    fn commutator_matches_dense_matrices(a in pauli_sum(3, 5), b in pauli_sum(3, 5)) {
        let c = to_dense(&commutator(&a, &b).unwrap(), 12).unwrap();
        let (da, db) = (to_dense(&a, 12).unwrap(), to_dense(&b, 12).unwrap());
        let direct = &da.0 * &db.0 - &db.0 * &da.0;
        prop_assert!(c.max_abs_diff(&DenseMatrix(direct)) < 1e-10);
    }

    #[test]
    fn toggle_is_dense_conjugation(h in pauli_sum(N, 6), kind in gate_kind(), sup in support()) {
        let layer = GateLayer::new(kind, sup);
        let t = toggle(&h, &layer).unwrap();
        prop_assert!((t.frobenius_norm(false) - h.frobenius_norm(false)).abs() < 1e-12);
        let u = layer_unitary(&layer, N, 12).unwrap();
        let conj = u.0.adjoint() * to_dense(&h, 12).unwrap().0 * &u.0;
        prop_assert!(to_dense(&t, 12).unwrap().max_abs_diff(&DenseMatrix(conj)) < 1e-12);
        let back = toggle(&t, &layer.inverse()).unwrap();
        prop_assert!(back.approx_eq(&h, 1e-12));
    }

    #[test]
    fn spectral_norm_sits_between_frobenius_and_one_norm(h in pauli_sum(N, 8)) {
        let s = spectral_norm(&h).unwrap();
        prop_assert!(s <= h.one_norm() * (1.0 + 1e-9) + 1e-12);
        prop_assert!(s >= h.frobenius_norm(true) * (1.0 - 1e-9) - 1e-12);
    }

    #[test]
    fn evolution_is_unitary_and_reversible(h in pauli_sum(N, 6), t in -2.0..2.0f64, seed in any::<u64>()) {
        let psi = StateVector::random(N, seed).unwrap();
        let fwd = expm_multiply(&h, t, &psi).unwrap();
        prop_assert!((fwd.norm() - 1.0).abs() < 1e-10);
        let back = expm_multiply(&h, -t, &fwd).unwrap();
        prop_assert!(back.phase_insensitive_distance(&psi) < 1e-9);
    }

    #[test]
    fn signal_calculus_is_consistent(s in signal(), t0 in -3.0..3.0f64, dt in 0.0..2.0f64) {
        let t1 = t0 + dt;
        // Integral of the derivative recovers the increment.
        let inc = s.derivative().integral(t0, t1);
        prop_assert!((inc - (s.eval(t1) - s.eval(t0))).abs() < 1e-9);
        // Additivity over adjacent intervals.
        let mid = t0 + dt / 3.0;
        prop_assert!((s.integral(t0, mid) + s.integral(mid, t1) - s.integral(t0, t1)).abs() < 1e-9);
        prop_assert!(s.eval(t0).abs() <= s.amplitude_bound() + 1e-12);
    }

    #[test]
    fn fusion_preserves_the_block(kind in prop::sample::select(vec![ModelKind::Ising1d, ModelKind::Xy1d, ModelKind::Heisenberg1d]),
                                  n in 2usize..6, j in -2.0..2.0f64, tau in 0.01..0.5f64) {
        let m = TargetModel::chain(kind, n, j, tau, 1).unwrap();
        let s = compile(&m, CompileOptions::default()).unwrap();
        let fused = Schedule { block: fuse(s.block.clone()), fused: true, ..s.clone() };
        let u = block_unitary(&s, 12).unwrap();
        let v = block_unitary(&fused, 12).unwrap();
        prop_assert!(u.max_abs_diff(&v) < 1e-10);
    }
}
