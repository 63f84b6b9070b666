//! Characters of `ℤ_2 × ℤ_4` and the Fourier transform on it.
//!
//! Run with `cargo run --example finite_fourier`.

use num_complex::Complex64;
use tauh::{char_eval, fourier_k, inner_k, inverse_fourier_k, Character, FiniteLcaGroup, KFunction, Measure, Role};

fn main() -> tauh::Result<()> {
    let k = FiniteLcaGroup::new(&[2, 4])?;
    println!("K = {k}, |K| = {}, exponent {}", k.order(), k.exponent());

    let omega = Character::new(k.element(&[1, 1])?);
    for x in k.elements().take(4) {
        println!("ω_(1,1)({:?}) = {:.3}", x.coords(), char_eval(&k, &omega, &x)?);
    }

    let v = KFunction::from_fn(k.clone(), Role::Group, |x| {
        let c = x.coords();
        Complex64::new(c[0] as f64 - 0.5, c[1] as f64 * 0.25)
    });
    let phi = fourier_k(&v)?;
    let haar = inner_k(&v, &v, Measure::Haar)?.re;
    let plancherel = inner_k(&phi, &phi, Measure::Plancherel)?.re;
    println!("‖v‖² = {haar:.12}, ‖F_K v‖² under Plancherel measure = {plancherel:.12}");
    println!("round-trip sup error = {:.2e}", inverse_fourier_k(&phi)?.sup_distance(&v));
    Ok(())
}
