//! The τ-dual group of a semi-direct product and the duality map `Θ`.
//!
//! Builds `ℤ_5^× ⋉ ℤ_5` from its automorphisms, multiplies in both groups
//! and checks `Θ` against the double dual.
//!
//! Run with `cargo run --example tau_dual`.

use tauh::semidirect::verify_duality;
use tauh::{tau_dual, Automorphism, Character, FiniteLcaGroup, GTauHatElement, TauSystem};

fn main() -> tauh::Result<()> {
    let k = FiniteLcaGroup::cyclic(5)?;
    let entries = (1..5).map(|h| Ok((h.to_string(), Automorphism::scalar(&k, h)?))).collect::<tauh::Result<Vec<_>>>()?;
    let sys = TauSystem::from_automorphisms(k.clone(), entries)?;

    let x = sys.element("2", &[1])?;
    let y = sys.element("3", &[4])?;
    let xy = sys.multiply(&x, &y)?;
    println!("(2,1)(3,4) = ({}, {:?})", sys.label(xy.h), xy.k.coords());

    let w = GTauHatElement { h: sys.label_index("2")?, omega: Character::new(k.element(&[1])?) };
    let v = GTauHatElement { h: sys.label_index("3")?, omega: Character::new(k.element(&[4])?) };
    let wv = sys.dual_multiply(&w, &v)?;
    println!("in the τ-dual group: (2,ω_1)(3,ω_4) = ({}, ω_{:?})", sys.label(wv.h), wv.omega.index.coords());

    let dual = tau_dual(&sys)?;
    for h in 0..dual.h_len() {
        println!("τ̂_{} = {}", dual.label(h), dual.tau(h));
    }

    let report = verify_duality(&sys)?;
    println!(
        "Θ: {} pairs, {} failures, bijective {}; lemma: {} points, {} failures",
        report.theta_pairs, report.theta_failures, report.theta_bijective, report.lemma_points, report.lemma_failures
    );
    Ok(())
}
