//! The affine group `(0,∞) ⋉ ℝ` by quadrature: Plancherel against the
//! closed form `1/(2√2)`, reconstruction and the dual group law.
//!
//! Run with `cargo run --release --example affine_continuum`.

use tauh::affine::{
    affine_dual_multiply, affine_plancherel, affine_reconstruct, affine_transform, gaussian_strip, AffineGrid,
    GAUSSIAN_STRIP_NORM_SQ,
};
use tauh::Variant;

fn main() -> tauh::Result<()> {
    let grid = AffineGrid::desk();
    let f = gaussian_strip(grid);
    println!("f(a,b) = 1_[1,2](a)·exp(−πb²), target ‖f‖² = {GAUSSIAN_STRIP_NORM_SQ:.10}");

    for v in [Variant::Plain, Variant::Generalized] {
        let sides = affine_plancherel(&f, v)?;
        let back = affine_reconstruct(&affine_transform(&f, v)?, v)?;
        println!(
            "{v:?}: ∫∫|F|² = {:.10}, ∫∫|f|²/a² = {:.10}, round trip L² error {:.1e}",
            sides.transform_side,
            sides.function_side,
            back.relative_l2_error(&f, 4.0)?
        );
    }

    println!("(2,3)·(4,1) = {:?} in the dual group", affine_dual_multiply((2.0, 3.0), (4.0, 1.0))?);
    Ok(())
}
