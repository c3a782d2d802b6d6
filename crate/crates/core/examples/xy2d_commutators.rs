//! Symbolic structure of [H_I, H_II] on a periodic 4x4 lattice, matrix-free
//! commutator norms, and the unit-cell candidates.
use crda::analysis::{table1_check, trotter_commutator, unit_cell_report, TrotterModel};
use crda::device::{Boundary, Lattice};
use crda::pauli::Numerics;

fn main() -> crda::Result<()> {
    let lat = Lattice::square(4, 4, Boundary::Periodic)?;
    let num = Numerics::default();
    let t = table1_check(&lat)?;
    for e in &t.entries {
        println!("{:<24} {}", e.name, e.value);
    }
    let (_, da) = trotter_commutator(TrotterModel::Xy2dDa, &lat, 1.0, &num)?;
    let (_, dig) = trotter_commutator(TrotterModel::Xy2dDigital, &lat, 1.0, &num)?;
    let (a, b) = (da.entries[0].value, dig.entries[0].value);
    println!(
        "||[H_I, H_II]|| = {a:.4} (bound {})",
        da.entries[0].bound.unwrap_or(f64::NAN)
    );
    println!(
        "||[H_xx, H_yy]|| = {b:.4} (bound {})",
        dig.entries[0].bound.unwrap_or(f64::NAN)
    );
    println!("ratio = {:.4}", b / a);
    for e in unit_cell_report(1.0, &num)?.entries {
        println!("{:<26} {:.4}", e.name, e.value);
    }
    Ok(())
}
