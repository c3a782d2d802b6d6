//! Distance between the original and effective Hamiltonians over one
//! detuning period, and the first-order propagator difference.
use crda::analysis::{dyson_closed_form, dyson_difference, synthesis_closed_form, SynthesisModel};
use crda::device::{DeviceParams, Driven};
use crda::hamiltonian::{org_td, HamiltonianKind as K};

fn main() -> crda::Result<()> {
    let n = 5;
    let delta = 10.0;
    let p = DeviceParams::cr_chain(n, Driven::All, 1.0, delta, 1e-4, 200.0)?;
    let period = 2.0 * std::f64::consts::PI / delta;
    println!("t        dH       closed    dH_xy    closed    dH_zz    closed    dP       closed");
    for i in 0..=8 {
        let t = period * i as f64 / 8.0;
        let mut row = format!("{t:<8.4}");
        for (m, kind) in [
            (SynthesisModel::Control, K::DeltaH),
            (SynthesisModel::Xy, K::DeltaXy),
            (SynthesisModel::Zz, K::DeltaZz),
        ] {
            let v = org_td(kind, &p)?.at(t).frobenius_norm(true);
            row += &format!(" {v:<8.5} {:<8.5}", synthesis_closed_form(m, &p, t)?);
        }
        row += &format!(
            " {:<8.5} {:<8.5}",
            dyson_difference(SynthesisModel::Control, &p, t)?,
            dyson_closed_form(&p, t)?
        );
        println!("{row}");
    }
    Ok(())
}
