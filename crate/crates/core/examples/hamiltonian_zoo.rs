//! Every Hamiltonian kind on a small lattice, and the commuting pairs that
//! make the Ising and XY blocks exact.
use crda::device::{Boundary, DeviceParams, Driven, Lattice};
use crda::hamiltonian::{build, HamiltonianKind as K};
use crda::pauli::commutator;

fn main() -> crda::Result<()> {
    let chain = Lattice::chain(6, Boundary::Open)?;
    let square = Lattice::square(4, 4, Boundary::Periodic)?;
    let dev = DeviceParams::cr_chain(6, Driven::All, 1.0, 50.0, 0.05, 2000.0)?;
    for kind in K::ALL {
        let lat = if kind.is_2d() { &square } else { &chain };
        let dev = match kind {
            K::LabFrame2q => DeviceParams::cr_chain(2, Driven::All, 1.0, 50.0, 0.05, 2000.0)?,
            _ => dev.clone(),
        };
        let h = build(kind, lat, 1.0, Some(&dev), 0.01)?;
        println!("{:<18} {:>3} qubits {:>4} terms", kind.name(), h.nqubits(), h.len());
    }

    for (a, b) in [
        (K::H1, K::H2),
        (K::HEven, K::HOdd),
        (K::HEvenPrime, K::HOddPrime),
        (K::QfEffectiveOdd, K::QfEffectiveEven),
    ] {
        let ha = build(a, &chain, 1.0, None, 0.0)?;
        let hb = build(b, &chain, 1.0, None, 0.0)?;
        println!("[{a}, {b}] = 0: {}", commutator(&ha, &hb)?.is_zero());
    }
    println!(
        "h_even = {}",
        build(K::HEven, &Lattice::chain(4, Boundary::Open)?, 1.0, None, 0.0)?
    );
    Ok(())
}
