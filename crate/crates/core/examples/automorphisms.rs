//! Integer-matrix automorphisms of finite abelian groups, their duals and `δ`.
//!
//! Run with `cargo run --example automorphisms`.

use nalgebra::DMatrix;
use tauh::{dual_automorphism, Automorphism, FiniteLcaGroup, RealLinearMap};

fn main() -> tauh::Result<()> {
    let k = FiniteLcaGroup::new(&[2, 4])?;
    // (x, y) ↦ (x, 2x + y) is well defined because 2·2 ≡ 0 mod 4
    let alpha = Automorphism::new(&k, vec![vec![1, 0], vec![2, 1]])?;
    let beta = Automorphism::new(&k, vec![vec![1, 0], vec![0, 3]])?;
    println!("α = {alpha}, α̂ = {}", dual_automorphism(&alpha)?);
    println!("β = {beta}, β̂ = {}", dual_automorphism(&beta)?);

    let lhs = dual_automorphism(&alpha.compose(&beta)?)?;
    let rhs = dual_automorphism(&alpha)?.compose(&dual_automorphism(&beta)?)?;
    println!("(αβ)^ = α̂β̂: {}", lhs == rhs);
    println!("δ(α) = {} (finite groups are unimodular)", alpha.delta().value());

    match Automorphism::new(&FiniteLcaGroup::cyclic(4)?, vec![vec![2]]) {
        Ok(_) => println!("unexpected: x ↦ 2x accepted on ℤ_4"),
        Err(e) => println!("x ↦ 2x on ℤ_4 rejected: {e}"),
    }

    let shear = RealLinearMap::new(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]))?;
    println!("on ℝ²: δ(shear) = 1/|det| = {}", shear.delta().value());
    println!("dual (inverse transpose) = {}", shear.dual().matrix());
    Ok(())
}
