//! First-order Trotter error of the Heisenberg block and the commutator bounds.
use crda::analysis::{heis_digital_bond_pair, trotter_bound, trotter_commutator, TrotterModel};
use crda::compiler::{block_error, ModelKind, TargetModel};
use crda::device::{Boundary, Lattice};
use crda::pauli::Numerics;

fn main() -> crda::Result<()> {
    let num = Numerics::default();
    let m = TargetModel::chain(ModelKind::Heisenberg1d, 4, 1.0, 0.02, 1)?;
    for tau in [0.02, 0.01, 0.005] {
        let e = block_error(&m, tau, &num)?;
        println!(
            "tau {tau:<6} error {:.4e} error/tau^2 {:.4}",
            e.distance,
            e.distance / (tau * tau)
        );
    }
    for n in 3..=8 {
        let lat = Lattice::chain(n, Boundary::Open)?;
        let (_, da) = trotter_commutator(TrotterModel::HeisDa, &lat, 1.0, &num)?;
        let (_, dig) = trotter_commutator(TrotterModel::HeisDigital, &lat, 1.0, &num)?;
        println!(
            "N={n} DA {:.4} (bound {}) digital {:.4} (bound {})",
            da.entries[0].value,
            trotter_bound(TrotterModel::HeisDa, n, 1.0),
            dig.entries[0].value,
            trotter_bound(TrotterModel::HeisDigital, n, 1.0)
        );
    }
    println!(
        "digital bond pair {:.6} vs 4*sqrt(3) = {:.6}",
        heis_digital_bond_pair(1.0, &num)?,
        4.0 * 3f64.sqrt()
    );
    Ok(())
}
