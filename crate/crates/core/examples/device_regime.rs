//! Device parameters from a flat key-value file and weak-driving checks.
use crda::device::{effective_coupling, validate_regime, ParamMap, RegimeThresholds};

const PARAMS: &str = "
n = 4
driven = odd
g = 1
delta = 50
ratio = 0.05
Omega.3 = 8   # strong drive on site 3
";

fn main() -> crda::Result<()> {
    let p = ParamMap::parse(PARAMS)?.device()?;
    println!("omega_q = {:?}", p.omega_q);
    println!("omega   = {:?}", p.omega);
    println!("Omega   = {:?}", p.drive);
    for k in 0..p.nbonds() {
        if p.is_driven(k) {
            println!("bond {}: J_eff = {:+.5}", k + 1, effective_coupling(&p, k)?);
        }
    }
    let r = validate_regime(&p, RegimeThresholds::default())?;
    for q in &r.qubits {
        println!(
            "site {} Omega/delta={:?} g/delta={:?} {:?}",
            q.site, q.omega_over_delta, q.g_over_delta, q.warnings
        );
    }
    println!("weak-driving regime satisfied: {}", r.ok());
    Ok(())
}
