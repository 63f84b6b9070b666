//! Built-in groups and their closed-form dual laws.
//!
//! Run with `cargo run --example catalog`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tauh::catalog;

fn main() -> tauh::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for name in ["affine:7", "heisenberg:3", "motion:4", "motion:2"] {
        let entry = catalog::lookup(name)?;
        let report = entry.verify_oracle(&mut rng)?;
        println!(
            "{name:<13} |G| = {:>3}  oracle: {} pairs, {} mismatches  ({})",
            entry.system.order(),
            report.pairs,
            report.mismatches,
            entry.notes
        );
    }
    Ok(())
}
