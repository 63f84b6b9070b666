//! Harmonic analysis on semi-direct products `G_τ = H ⋉_τ K` with an abelian
//! normal factor `K`.
//!
//! The τ-dual group `H ⋉_τ̂ K̂` replaces the unitary dual of `G_τ` by an
//! honest locally compact group, and the τ-Fourier transforms map `L²(G_τ)`
//! isometrically onto `L²` of that group. Everything here is computed
//! exactly on finite abelian factors `K = ∏ ℤ_{n_i}` and by trapezoid
//! quadrature on the continuous affine group `(0,∞) ⋉ ℝ`.
//!
//! | module | contents |
//! |--------|----------|
//! | [`lca`] | finite abelian groups, characters, `F_K` and its inverse |
//! | [`automorphism`] | integer-matrix automorphisms, duals, `δ` |
//! | [`semidirect`] | `G_τ`, the τ-dual group, `Θ`, group functions |
//! | [`tau_fourier`] | `F_τ`, `F_τ^♯`, inverses, Parseval, Plancherel |
//! | [`affine`] | the continuous affine group by quadrature |
//! | [`catalog`] | finite affine, Heisenberg and motion groups |
//! | [`cli`] | the `tauh` command line and its JSON file formats |

pub mod affine;
pub mod automorphism;
pub mod catalog;
pub mod cli;
mod dft;
pub mod error;
pub mod lca;
pub mod semidirect;
pub mod tau_fourier;

pub use automorphism::{dual_automorphism, Automorphism, DeltaValue, RealLinearMap};
pub use error::{Error, Result};
pub use lca::{char_eval, fourier_k, inner_k, inverse_fourier_k, Character, FiniteLcaGroup, GroupElement, KFunction, Measure, Role};
pub use semidirect::{
    double_dual_theta, modular_function, pushforward_check, tau_dual, GTauElement, GTauHatElement, GroupFunction, Side,
    TauSystem,
};
pub use tau_fourier::{
    gen_tau_fourier, gen_tau_fourier_inverse, parseval_residual, synthesize_g, tau_fourier, tau_fourier_inverse,
    ParsevalIdentity, Synthesis, TransformResult, Variant,
};
