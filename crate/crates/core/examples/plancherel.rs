//! The τ-Fourier transforms on a finite Heisenberg group: Plancherel,
//! inversion, the four Parseval identities and explicit preimages.
//!
//! Run with `cargo run --example plancherel`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tauh::catalog::finite_heisenberg;
use tauh::tau_fourier::{inverse_transform, parseval_sides, preimage_generalized, transform};
use tauh::{GroupFunction, ParsevalIdentity, Side, Variant};

fn main() -> tauh::Result<()> {
    let sys = Arc::new(finite_heisenberg(4)?.system);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);

    for v in [Variant::Plain, Variant::Generalized] {
        let big = transform(&f, v)?.function;
        let back = inverse_transform(&big, v)?;
        println!(
            "{v:?}: ‖f‖² = {:.12}, ‖F f‖² = {:.12}, round trip {:.1e}",
            f.norm_sq(),
            big.norm_sq(),
            back.sup_distance(&f)?
        );
    }

    let psi = GroupFunction::random(Arc::clone(&sys), Side::Dual, &mut rng);
    for id in ParsevalIdentity::ALL {
        let (lhs, rhs) = parseval_sides(&f, &psi, id)?;
        println!("{:<16} {:.10} vs {:.10}", id.name(), lhs, rhs);
    }

    let phi = GroupFunction::random(Arc::clone(&sys), Side::Dual, &mut rng);
    let pre = preimage_generalized(&phi)?;
    println!("F^♯(preimage(φ)) = φ up to {:.1e}", transform(&pre, Variant::Generalized)?.function.sup_distance(&phi)?);
    Ok(())
}
