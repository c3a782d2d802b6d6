//! Runs compiled schedules on a product state: ideal segments, exact target
//! evolution, and segments driven by a cross-resonance device.
use crda::compiler::{compile, exact_evolution, simulate, CompileOptions, ModelKind, RealisticOptions, TargetModel};
use crda::pauli::{Numerics, PauliSum, StateVector};

fn main() -> crda::Result<()> {
    let n = 4;
    let m = TargetModel::chain(ModelKind::Xy1d, n, 1.0, 0.25, 8)?;
    let s = compile(&m, CompileOptions::default())?;
    let psi = StateVector::from_bitstring("1000")?;
    let obs: Vec<(String, PauliSum)> = (1..=n)
        .map(|k| {
            let mut label = vec!['i'; n];
            label[k - 1] = 'z';
            let l: String = label.into_iter().collect();
            Ok((format!("z{k}"), PauliSum::from_labels([(l.as_str(), 1.0)])?))
        })
        .collect::<crda::Result<_>>()?;
    let num = Numerics::default();
    let ideal = simulate(&s, &psi, &obs, None, &num)?;
    let coarse = simulate(&s, &psi, &obs, Some(&RealisticOptions::default()), &num)?;
    // Weaker coupling relative to the detuning shrinks the second-order shifts.
    let weak = RealisticOptions {
        g_over_delta: 0.005,
        ..RealisticOptions::default()
    };
    let fine = simulate(&s, &psi, &obs, Some(&weak), &num)?;
    println!("block time   z1 ideal  z1 exact  z1 device(g/d=0.02)  z1 device(g/d=0.005)");
    for ((a, b), c) in ideal.rows.iter().zip(&coarse.rows).zip(&fine.rows) {
        let exact = exact_evolution(&m, &psi, &obs, a.time)?;
        println!(
            "{:<5} {:<6.2} {:+.5}  {:+.5}  {:+.5}             {:+.5}",
            a.block, a.time, a.values[0], exact[0], b.values[0], c.values[0]
        );
    }
    Ok(())
}
