//! The τ-Fourier transform `F_τ`, the generalized transform `F_τ^♯`, their
//! inverses, and the Parseval/Plancherel identities as computations.
//!
//! Integrals over `K̂` carry the Plancherel weight `1/|K|`, integrals over
//! `H` counting weight. The δ-factors are applied where the formulas put
//! them and never folded into a measure.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lca;
use crate::semidirect::{GroupFunction, Side, TauSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `F_τ(f)(h,ω) = δ(h)·F_K(f_h)(ω)`.
    Plain,
    /// `F_τ^♯(f)(h,ω) = δ(h)^{3/2}·F_K(f_h)(ω_h)`.
    Generalized,
}

#[derive(Debug, Clone)]
pub struct TransformResult {
    pub function: GroupFunction,
    /// `L²` norm of the input under the primal Haar measure.
    pub source_norm: f64,
}

fn for_each_row(
    values: &mut [Complex64],
    row_len: usize,
    f: impl Fn(usize, &mut [Complex64]) + Sync + Send,
) {
    values.par_chunks_mut(row_len).enumerate().for_each(|(h, row)| f(h, row));
}

/// Reorders a row so that `out[ω] = row[perm[ω]]`.
fn gather(row: &mut [Complex64], perm: &[usize]) {
    let src = row.to_vec();
    for (slot, &p) in row.iter_mut().zip(perm) {
        *slot = src[p];
    }
}

pub fn tau_fourier(f: &GroupFunction) -> Result<TransformResult> {
    f.expect_side(Side::Primal)?;
    let sys = Arc::clone(f.system());
    let mut values = f.values().to_vec();
    for_each_row(&mut values, sys.k().len(), |h, row| {
        lca::forward_in_place(row, sys.k());
        let d = sys.delta(h).value();
        row.iter_mut().for_each(|v| *v *= d);
    });
    Ok(TransformResult {
        function: GroupFunction::from_values(sys, Side::Dual, values)?,
        source_norm: f.norm(),
    })
}

/// `f(h,k) = δ(h)⁻¹·∫_{K̂} F(h,ω)·ω(k) dω`.
pub fn tau_fourier_inverse(big_f: &GroupFunction) -> Result<GroupFunction> {
    big_f.expect_side(Side::Dual)?;
    let sys = Arc::clone(big_f.system());
    let mut values = big_f.values().to_vec();
    let n = sys.k().order() as f64;
    for_each_row(&mut values, sys.k().len(), |h, row| {
        lca::backward_in_place(row, sys.k());
        let s = 1.0 / (sys.delta(h).value() * n);
        row.iter_mut().for_each(|v| *v *= s);
    });
    GroupFunction::from_values(sys, Side::Primal, values)
}

pub fn gen_tau_fourier(f: &GroupFunction) -> Result<TransformResult> {
    f.expect_side(Side::Primal)?;
    let sys = Arc::clone(f.system());
    let mut values = f.values().to_vec();
    for_each_row(&mut values, sys.k().len(), |h, row| {
        lca::forward_in_place(row, sys.k());
        gather(row, sys.dual_perm(h));
        let d = sys.delta(h).powf(1.5);
        row.iter_mut().for_each(|v| *v *= d);
    });
    Ok(TransformResult {
        function: GroupFunction::from_values(sys, Side::Dual, values)?,
        source_norm: f.norm(),
    })
}

/// `f(h,k) = δ(h)^{-1/2}·∫_{K̂} F(h,ω)·ω_h(k) dω`.
///
/// Substituting `ω' = ω_h` turns the sum into an ordinary inverse transform
/// of the row reindexed by `ω' ↦ ω'_{h⁻¹}`.
pub fn gen_tau_fourier_inverse(big_f: &GroupFunction) -> Result<GroupFunction> {
    big_f.expect_side(Side::Dual)?;
    let sys = Arc::clone(big_f.system());
    let mut values = big_f.values().to_vec();
    let n = sys.k().order() as f64;
    for_each_row(&mut values, sys.k().len(), |h, row| {
        gather(row, sys.dual_perm(sys.h_inverse(h)));
        lca::backward_in_place(row, sys.k());
        let s = 1.0 / (sys.delta(h).powf(0.5) * n);
        row.iter_mut().for_each(|v| *v *= s);
    });
    GroupFunction::from_values(sys, Side::Primal, values)
}

pub fn transform(f: &GroupFunction, variant: Variant) -> Result<TransformResult> {
    match variant {
        Variant::Plain => tau_fourier(f),
        Variant::Generalized => gen_tau_fourier(f),
    }
}

pub fn inverse_transform(big_f: &GroupFunction, variant: Variant) -> Result<GroupFunction> {
    match variant {
        Variant::Plain => tau_fourier_inverse(big_f),
        Variant::Generalized => gen_tau_fourier_inverse(big_f),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Synthesis {
    /// `g(h,k) = ∫_{K̂} Ψ(h,ω)·ω(k) dω`.
    Plain,
    /// `g(h,k) = ∫_{K̂} Ψ(h,ω)·ω_h(k) dω`.
    Twisted,
}

/// Direct summation over characters with exact phases. Deliberately does
/// not go through the FFT path so that Parseval residuals compare two
/// independent computations.
pub fn synthesize_g(psi: &GroupFunction, variant: Synthesis) -> Result<GroupFunction> {
    psi.expect_side(Side::Dual)?;
    let sys: &TauSystem = psi.system();
    let k = sys.k();
    let len = k.len();
    let roots: Vec<Complex64> = (0..k.exponent()).map(|p| k.root_of_unity(p)).collect();
    let elems: Vec<_> = k.elements().collect();
    let scale = 1.0 / k.order() as f64;
    let mut values = vec![Complex64::new(0.0, 0.0); sys.order()];
    values.par_chunks_mut(len).enumerate().for_each(|(h, out)| {
        let row = psi.row(h);
        for (kk, slot) in elems.iter().zip(out.iter_mut()) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (wi, psi_w) in row.iter().enumerate() {
                let char_index = match variant {
                    Synthesis::Plain => wi,
                    Synthesis::Twisted => sys.dual_perm(h)[wi],
                };
                let phase = k.pairing_phase_unchecked(&elems[char_index], kk);
                acc += psi_w * roots[phase as usize];
            }
            *slot = acc * scale;
        }
    });
    GroupFunction::from_values(Arc::clone(psi.system()), Side::Primal, values)
}

/// The four orthogonality relations pairing a primal `f` with a dual `Ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParsevalIdentity {
    /// `∫ δ⁻¹ f ḡ dμ = ∫ F_τ(f) Ψ̄ dμ̂`, plain synthesis.
    Plain,
    /// `∫ f ḡ dμ = ∫ δ F_τ(f) Ψ̄ dμ̂`, plain synthesis.
    PlainModular,
    /// `∫ δ^{-1/2} f ḡ dμ = ∫ F_τ^♯(f) Ψ̄ dμ̂`, twisted synthesis.
    Twisted,
    /// `∫ f ḡ dμ = ∫ δ^{1/2} F_τ^♯(f) Ψ̄ dμ̂`, twisted synthesis.
    TwistedModular,
}

impl ParsevalIdentity {
    pub const ALL: [ParsevalIdentity; 4] = [
        ParsevalIdentity::Plain,
        ParsevalIdentity::PlainModular,
        ParsevalIdentity::Twisted,
        ParsevalIdentity::TwistedModular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParsevalIdentity::Plain => "plain",
            ParsevalIdentity::PlainModular => "plain_modular",
            ParsevalIdentity::Twisted => "twisted",
            ParsevalIdentity::TwistedModular => "twisted_modular",
        }
    }

    fn synthesis(self) -> Synthesis {
        match self {
            ParsevalIdentity::Plain | ParsevalIdentity::PlainModular => Synthesis::Plain,
            ParsevalIdentity::Twisted | ParsevalIdentity::TwistedModular => Synthesis::Twisted,
        }
    }

    fn variant(self) -> Variant {
        match self.synthesis() {
            Synthesis::Plain => Variant::Plain,
            Synthesis::Twisted => Variant::Generalized,
        }
    }

    /// Exponents `(a, b)` of the extra factors `δ(h)^a` on the primal side
    /// and `δ(h)^b` on the dual side.
    fn delta_powers(self) -> (f64, f64) {
        match self {
            ParsevalIdentity::Plain => (-1.0, 0.0),
            ParsevalIdentity::PlainModular => (0.0, 1.0),
            ParsevalIdentity::Twisted => (-0.5, 0.0),
            ParsevalIdentity::TwistedModular => (0.0, 0.5),
        }
    }
}

/// Both sides of the selected identity, each summed with its own weights.
pub fn parseval_sides(f: &GroupFunction, psi: &GroupFunction, identity: ParsevalIdentity) -> Result<(Complex64, Complex64)> {
    f.expect_side(Side::Primal)?;
    psi.expect_side(Side::Dual)?;
    if f.system().k() != psi.system().k() || f.system().h_len() != psi.system().h_len() {
        return Err(Error::GroupMismatch);
    }
    let sys = f.system();
    let (a, b) = identity.delta_powers();
    let g = synthesize_g(psi, identity.synthesis())?;
    let lhs: Complex64 = (0..sys.h_len())
        .map(|h| {
            let d = sys.delta(h);
            let s: Complex64 = f.row(h).iter().zip(g.row(h)).map(|(x, y)| x * y.conj()).sum();
            s * d.powf(a) * d.value()
        })
        .sum();
    let big_f = transform(f, identity.variant())?.function;
    let n = sys.k().order() as f64;
    let rhs: Complex64 = (0..sys.h_len())
        .map(|h| {
            let d = sys.delta(h);
            let s: Complex64 = big_f.row(h).iter().zip(psi.row(h)).map(|(x, y)| x * y.conj()).sum();
            s * d.powf(b) / (d.value() * n)
        })
        .sum();
    Ok((lhs, rhs))
}

pub fn parseval_residual(f: &GroupFunction, psi: &GroupFunction, identity: ParsevalIdentity) -> Result<f64> {
    let (l, r) = parseval_sides(f, psi, identity)?;
    Ok((l - r).norm())
}

/// Preimage of `φ` under `F_τ` built row by row: `f(h,k) = δ(h)⁻¹·v^h(k)`
/// with `F_K(v^h) = φ_h`.
pub fn preimage_plain(phi: &GroupFunction) -> Result<GroupFunction> {
    phi.expect_side(Side::Dual)?;
    let sys = Arc::clone(phi.system());
    let mut values = Vec::with_capacity(sys.order());
    for h in 0..sys.h_len() {
        let v = lca::inverse_fourier_k(&phi.row_function(h))?;
        let s = 1.0 / sys.delta(h).value();
        values.extend(v.values().iter().map(|x| x * s));
    }
    GroupFunction::from_values(sys, Side::Primal, values)
}

/// Preimage of `φ` under `F_τ^♯`: `f(h,k) = δ(h)^{-1/2}·v^h(τ_{h⁻¹}(k))`.
pub fn preimage_generalized(phi: &GroupFunction) -> Result<GroupFunction> {
    phi.expect_side(Side::Dual)?;
    let sys = Arc::clone(phi.system());
    let mut values = Vec::with_capacity(sys.order());
    for h in 0..sys.h_len() {
        let v = lca::inverse_fourier_k(&phi.row_function(h))?;
        let s = sys.delta(h).powf(-0.5);
        let perm = sys.k_perm(sys.h_inverse(h));
        values.extend(perm.iter().map(|&i| v.values()[i] * s));
    }
    GroupFunction::from_values(sys, Side::Primal, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::Automorphism;
    use crate::lca::{fourier_k, Character, FiniteLcaGroup, KFunction, Role};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn affine(n: i64) -> Arc<TauSystem> {
        let k = FiniteLcaGroup::cyclic(n).unwrap();
        let entries = (1..n)
            .filter(|u| crate::automorphism::mod_inverse(*u, n).is_some())
            .map(|u| (u.to_string(), Automorphism::scalar(&k, u).unwrap()))
            .collect();
        Arc::new(TauSystem::from_automorphisms(k, entries).unwrap())
    }

    #[test]
    fn trivial_h_reduces_to_fourier_k() {
        let k = FiniteLcaGroup::new(&[2, 3]).unwrap();
        let sys = Arc::new(TauSystem::trivial(k.clone()));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        let expect = fourier_k(&f.row_function(0)).unwrap();
        for v in [Variant::Plain, Variant::Generalized] {
            let got = transform(&f, v).unwrap().function;
            for (a, b) in got.values().iter().zip(expect.values()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_row_on_affine_z4() {
        let sys = affine(4);
        let h3 = sys.label_index("3").unwrap();
        let f = GroupFunction::from_fn(Arc::clone(&sys), Side::Primal, |h, k| {
            if h == h3 && k.coords()[0] == 0 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let big = tau_fourier(&f).unwrap().function;
        for v in big.row(h3) {
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }
        for v in big.row(sys.label_index("1").unwrap()) {
            assert_eq!(*v, c(0.0, 0.0));
        }
    }

    #[test]
    fn generalized_on_character_row_z4() {
        // f̂₃ = 4·[·=ω₁] and (ω_j)₃ = ω_{3j}, so the mass sits at j = 3
        let sys = affine(4);
        let h3 = sys.label_index("3").unwrap();
        let f = GroupFunction::from_fn(Arc::clone(&sys), Side::Primal, |h, k| {
            if h == h3 {
                c(0.0, 1.0).powu(k.coords()[0] as u32)
            } else {
                c(0.0, 0.0)
            }
        });
        let big = gen_tau_fourier(&f).unwrap().function;
        let expect = [0.0, 0.0, 0.0, 4.0];
        for (v, e) in big.row(h3).iter().zip(expect) {
            assert!((v - c(e, 0.0)).norm() < 1e-14);
        }
        assert!(big.row(0).iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn plancherel_and_isometry_on_small_affine_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (n, variant) in [(7, Variant::Plain), (5, Variant::Generalized)] {
            let sys = affine(n);
            let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
            let r = transform(&f, variant).unwrap();
            let lhs = r.function.norm_sq();
            let rhs = f.norm_sq();
            assert!((lhs - rhs).abs() / rhs < 1e-10);
            assert!((r.source_norm - rhs.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_examples() {
        let sys = affine(4);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        for v in [Variant::Plain, Variant::Generalized] {
            let back = inverse_transform(&transform(&f, v).unwrap().function, v).unwrap();
            assert!(back.sup_distance(&f).unwrap() < 1e-12);
            let zero = GroupFunction::zeros(Arc::clone(&sys), Side::Dual);
            assert_eq!(inverse_transform(&zero, v).unwrap().sup_norm(), 0.0);
        }
        let ones = GroupFunction::from_fn(Arc::clone(&sys), Side::Dual, |_, _| c(1.0, 0.0));
        let back = tau_fourier_inverse(&ones).unwrap();
        for h in 0..sys.h_len() {
            let d = sys.delta(h).value();
            for (i, v) in back.row(h).iter().enumerate() {
                let e = if i == 0 { 1.0 / d } else { 0.0 };
                assert!((v - c(e, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn both_inverse_pipelines_agree() {
        let sys = affine(7);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        let a = tau_fourier_inverse(&tau_fourier(&f).unwrap().function).unwrap();
        let b = gen_tau_fourier_inverse(&gen_tau_fourier(&f).unwrap().function).unwrap();
        assert!(a.sup_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn side_mismatch_is_a_contract_error() {
        let sys = affine(5);
        let dual = GroupFunction::zeros(Arc::clone(&sys), Side::Dual);
        let primal = GroupFunction::zeros(Arc::clone(&sys), Side::Primal);
        assert!(matches!(tau_fourier(&dual), Err(Error::SideMismatch { .. })));
        assert!(matches!(gen_tau_fourier(&dual), Err(Error::SideMismatch { .. })));
        assert!(matches!(tau_fourier_inverse(&primal), Err(Error::SideMismatch { .. })));
        assert!(matches!(gen_tau_fourier_inverse(&primal), Err(Error::SideMismatch { .. })));
        assert!(matches!(synthesize_g(&primal, Synthesis::Plain), Err(Error::SideMismatch { .. })));
    }

    #[test]
    fn synthesis_examples() {
        let sys = affine(5);
        let zero = GroupFunction::zeros(Arc::clone(&sys), Side::Dual);
        assert_eq!(synthesize_g(&zero, Synthesis::Plain).unwrap().sup_norm(), 0.0);
        assert_eq!(synthesize_g(&zero, Synthesis::Twisted).unwrap().sup_norm(), 0.0);

        // twisted synthesis at h = e is plain synthesis
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = GroupFunction::random(Arc::clone(&sys), Side::Dual, &mut rng);
        let p = synthesize_g(&psi, Synthesis::Plain).unwrap();
        let t = synthesize_g(&psi, Synthesis::Twisted).unwrap();
        let e = sys.h_identity();
        for (a, b) in p.row(e).iter().zip(t.row(e)) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn plain_synthesis_of_a_real_even_transform_returns_the_function() {
        let k = FiniteLcaGroup::cyclic(6).unwrap();
        let sys = Arc::new(TauSystem::trivial(k.clone()));
        let even = [2.0, 1.0, -0.5, 3.0, -0.5, 1.0];
        let f = KFunction::from_fn(k.clone(), Role::Group, |x| c(even[x.coords()[0] as usize], 0.0));
        let fhat = fourier_k(&f).unwrap();
        let psi = GroupFunction::from_values(Arc::clone(&sys), Side::Dual, fhat.values().to_vec()).unwrap();
        let g = synthesize_g(&psi, Synthesis::Plain).unwrap();
        // direct summation oracle: (1/6) Σ_j f̂(j) e^{+2πi jk/6}
        for kk in 0..6 {
            let mut acc = c(0.0, 0.0);
            for (j, v) in fhat.values().iter().enumerate() {
                acc += v * Complex64::from_polar(1.0, std::f64::consts::TAU * (j * kk) as f64 / 6.0);
            }
            acc /= 6.0;
            assert!((g.row(0)[kk] - acc).norm() < 1e-12);
            assert!((g.row(0)[kk] - c(even[kk], 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_identities_on_affine_z5() {
        let sys = affine(5);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        let psi = GroupFunction::random(Arc::clone(&sys), Side::Dual, &mut rng);
        for id in ParsevalIdentity::ALL {
            assert!(parseval_residual(&f, &psi, id).unwrap() < 1e-10, "{id:?}");
        }
        // Ψ = F_τ(f) turns the plain identity into Plancherel
        let big = tau_fourier(&f).unwrap().function;
        let (l, r) = parseval_sides(&f, &big, ParsevalIdentity::Plain).unwrap();
        assert!((l - r).norm() < 1e-10);
        assert!((r.re - f.norm_sq()).abs() < 1e-10);
        let zero = GroupFunction::zeros(Arc::clone(&sys), Side::Primal);
        for id in ParsevalIdentity::ALL {
            assert_eq!(parseval_residual(&zero, &psi, id).unwrap(), 0.0);
        }
    }

    #[test]
    fn conjugated_synthesis_kernel_breaks_parseval() {
        // With g(h,k) = ∫ Ψ(h,ω)·conj(ω(k)) dω the pairing picks up f̂(ω⁻¹)
        // instead of f̂(ω), so the identity fails for generic Ψ.
        let sys = affine(5);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        let psi = GroupFunction::random(Arc::clone(&sys), Side::Dual, &mut rng);
        let k = sys.k();
        let conj_g = GroupFunction::from_fn(Arc::clone(&sys), Side::Primal, |h, kk| {
            let s: Complex64 = k
                .elements()
                .map(|w| {
                    let wv = crate::lca::char_eval(k, &Character::new(w.clone()), kk).unwrap();
                    psi.get(h, &w) * wv.conj()
                })
                .sum();
            s / k.order() as f64
        });
        let lhs = f.inner(&conj_g).unwrap();
        let (_, rhs) = parseval_sides(&f, &psi, ParsevalIdentity::Plain).unwrap();
        assert!((lhs - rhs).norm() > 1e-3);
    }

    #[test]
    fn surjectivity_witnesses_map_back() {
        let sys = affine(7);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let phi = GroupFunction::random(Arc::clone(&sys), Side::Dual, &mut rng);
        let f = preimage_plain(&phi).unwrap();
        assert!(tau_fourier(&f).unwrap().function.sup_distance(&phi).unwrap() < 1e-10);
        let f = preimage_generalized(&phi).unwrap();
        assert!(gen_tau_fourier(&f).unwrap().function.sup_distance(&phi).unwrap() < 1e-10);
    }

    #[test]
    fn linearity() {
        let sys = affine(7);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        let g = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        let (a, b) = (c(0.3, -1.2), c(2.0, 0.5));
        for v in [Variant::Plain, Variant::Generalized] {
            let lhs = transform(&f.linear_combination(a, &g, b).unwrap(), v).unwrap().function;
            let rhs = transform(&f, v)
                .unwrap()
                .function
                .linear_combination(a, &transform(&g, v).unwrap().function, b)
                .unwrap();
            assert!(lhs.sup_distance(&rhs).unwrap() < 1e-12);
        }
    }
}
