//! Pauli-string arithmetic, commutators and spectral norms.
use crda::pauli::{commutator, spectral_norm, to_dense, PauliSum};

fn main() -> crda::Result<()> {
    let a = PauliSum::from_labels([("xzi", 1.0), ("izx", 0.5)])?;
    let b = PauliSum::from_labels([("yii", 1.0), ("iiy", -1.0)])?;
    println!("A = {a}");
    println!("B = {b}");
    println!("A·B = {}", a.product(&b)?);
    let c = commutator(&a, &b)?;
    println!("[A, B] = {c}");
    println!("[A, B] anti-Hermitian: {}", c.is_anti_hermitian());

    // Frobenius norm with tr(1) = 1, and the operator norm two ways.
    println!("||A||_F = {:.6}", a.frobenius_norm(true));
    println!("||A|| (Lanczos/dense) = {:.6}", spectral_norm(&a)?);
    println!("||A|| (dense SVD)     = {:.6}", to_dense(&a, 10)?.spectral_norm());

    let json = a.to_json()?;
    println!("json: {json}");
    assert_eq!(PauliSum::from_json(&json)?, a);
    Ok(())
}
