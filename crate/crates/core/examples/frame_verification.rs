//! Integrates the two-qubit drive-frame dynamics and compares them with the
//! effective quad-frame Hamiltonian while both small ratios are halved.
//!
//! `cargo run --release --example frame_verification -- --full` keeps the
//! counter-rotating drive terms (slower).
use crda::device::Driven;
use crda::frames::{fit_power_law, reference_device, uqf_unitarity_defect, verify_effective, IntegratorOptions};
use crda::pauli::DEFAULT_DENSE_LIMIT;

fn main() -> crda::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let t = 20.0 * std::f64::consts::PI;
    let opts = IntegratorOptions::default();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    println!("g/delta  Omega/delta  steps    distance    uqf defect");
    for i in 0..4 {
        let s = 0.5f64.powi(i);
        let p = reference_device(0.02 * s, 0.05 * s)?;
        let r = verify_effective(&p, Driven::OddOnly, t, full, &opts, DEFAULT_DENSE_LIMIT)?;
        let u = uqf_unitarity_defect(&p, 64)?;
        println!(
            "{:<8} {:<12} {:<8} {:.4e}  {:.3e}",
            0.02 * s,
            0.05 * s,
            r.steps,
            r.distance,
            u
        );
        xs.push(0.05 * s);
        ys.push(r.distance);
    }
    println!("fitted exponent: {:.3}", fit_power_law(&xs, &ys)?);
    Ok(())
}
