//! Compiles each target model into a block schedule, checks its structure and
//! compares one block with the exact target propagator.
use crda::compiler::{block_error, check_structure, compile, CompileOptions, ModelKind, TargetModel};
use crda::device::{Boundary, Lattice};
use crda::pauli::Numerics;

fn main() -> crda::Result<()> {
    let num = Numerics::default();
    let models = [
        TargetModel::chain(ModelKind::Ising1d, 6, 1.0, 1.0, 1)?,
        TargetModel::chain(ModelKind::Xy1d, 6, 1.0, 1.0, 1)?,
        TargetModel::chain(ModelKind::Heisenberg1d, 6, 1.0, 0.05, 1)?,
        TargetModel::new(
            ModelKind::Xy2d,
            Lattice::square(2, 4, Boundary::Periodic)?,
            1.0,
            0.05,
            1,
        )?,
    ];
    for m in &models {
        let s = compile(m, CompileOptions::default())?;
        let fused = compile(m, CompileOptions { fuse: true })?;
        let segs = check_structure(&s)?;
        let e = block_error(m, m.tau, &num)?;
        println!(
            "{:<10} steps {:>2} (fused {:>2}) gate layers {:>2} segments {} block error {:.2e}",
            m.kind.name(),
            s.block.len(),
            fused.block.len(),
            s.gate_layers_per_block(),
            segs.len(),
            e.distance
        );
    }
    let s = compile(
        &TargetModel::chain(ModelKind::Ising1d, 3, 1.0, 0.2, 4)?,
        CompileOptions::default(),
    )?;
    println!("{}", s.to_json()?);
    Ok(())
}
