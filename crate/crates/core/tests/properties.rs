use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tauh::affine::{affine_delta, affine_dual_invert, affine_dual_multiply, affine_multiply};
use tauh::catalog;
use tauh::cli::{function_from_file, function_to_file, FunctionFile, GroupSpecFile};
use tauh::semidirect::verify_group_axioms;
use tauh::tau_fourier::{inverse_transform, transform};
use tauh::{
    dual_automorphism, fourier_k, inner_k, inverse_fourier_k, parseval_residual, pushforward_check, tau_dual,
    Automorphism, FiniteLcaGroup, GroupFunction, KFunction, Measure, ParsevalIdentity, Role, Side, TauSystem, Variant,
};

fn system(family: usize, n: i64) -> Arc<TauSystem> {
    let entry = match family {
        0 => catalog::finite_affine(n),
        1 => catalog::finite_heisenberg(n),
        _ => catalog::finite_motion(n),
    };
    Arc::new(entry.unwrap().system)
}

fn small_system() -> impl Strategy<Value = Arc<TauSystem>> {
    (0usize..3, 2i64..7).prop_map(|(family, n)| system(family, n))
}

fn divisors() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1i64..9, 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn finite_fourier_is_unitary_and_invertible(divs in divisors(), seed in any::<u64>()) {
        let k = FiniteLcaGroup::new(&divs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = KFunction::from_fn(k.clone(), Role::Group, |_| {
            Complex64::new(rand::Rng::random_range(&mut rng, -1.0..1.0), rand::Rng::random_range(&mut rng, -1.0..1.0))
        });
        let phi = fourier_k(&v).unwrap();
        let lhs = inner_k(&v, &v, Measure::Haar).unwrap().re;
        let rhs = inner_k(&phi, &phi, Measure::Plancherel).unwrap().re;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
        prop_assert!(inverse_fourier_k(&phi).unwrap().sup_distance(&v) < 1e-12);
    }

    #[test]
    fn dual_is_covariant_on_cyclic_units(n in 2i64..30, a in 1i64..30, b in 1i64..30) {
        let k = FiniteLcaGroup::cyclic(n).unwrap();
        prop_assume!(Automorphism::scalar(&k, a).is_ok() && Automorphism::scalar(&k, b).is_ok());
        let (alpha, beta) = (Automorphism::scalar(&k, a).unwrap(), Automorphism::scalar(&k, b).unwrap());
        let lhs = dual_automorphism(&alpha.compose(&beta).unwrap()).unwrap();
        let rhs = dual_automorphism(&alpha).unwrap().compose(&dual_automorphism(&beta).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(dual_automorphism(&dual_automorphism(&alpha).unwrap()).unwrap(), alpha);
    }

    #[test]
    fn dual_is_covariant_on_shears(n in 2i64..9, s in 0i64..9, t in 0i64..9) {
        let k = FiniteLcaGroup::new(&[n, n]).unwrap();
        let alpha = Automorphism::new(&k, vec![vec![1, s], vec![0, 1]]).unwrap();
        let beta = Automorphism::new(&k, vec![vec![1, 0], vec![t, 1]]).unwrap();
        let lhs = dual_automorphism(&alpha.compose(&beta).unwrap()).unwrap();
        let rhs = dual_automorphism(&alpha).unwrap().compose(&dual_automorphism(&beta).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn group_axioms_hold_on_both_sides(sys in small_system(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for side in [Side::Primal, Side::Dual] {
            prop_assert!(verify_group_axioms(&sys, side, &mut rng, 200).unwrap().passed());
        }
        let double = tau_dual(&tau_dual(&sys).unwrap()).unwrap();
        for h in 0..sys.h_len() {
            prop_assert_eq!(double.tau(h), sys.tau(h));
        }
    }

    #[test]
    fn transforms_are_unitary_and_invertible(sys in small_system(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        for v in [Variant::Plain, Variant::Generalized] {
            let big = transform(&f, v).unwrap().function;
            prop_assert!((big.norm_sq() - f.norm_sq()).abs() <= 1e-10 * f.norm_sq());
            prop_assert!(inverse_transform(&big, v).unwrap().sup_distance(&f).unwrap() < 1e-12);
        }
    }

    #[test]
    fn transforms_are_linear(sys in small_system(), seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        let g = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        let (ca, cb) = (Complex64::new(a, 0.5), Complex64::new(b, -0.25));
        let combo = f.linear_combination(ca, &g, cb).unwrap();
        for v in [Variant::Plain, Variant::Generalized] {
            let lhs = transform(&combo, v).unwrap().function;
            let rhs = transform(&f, v).unwrap().function.linear_combination(ca, &transform(&g, v).unwrap().function, cb).unwrap();
            prop_assert!(lhs.sup_distance(&rhs).unwrap() < 1e-12);
        }
    }

    #[test]
    fn parseval_identities_hold(sys in small_system(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = GroupFunction::random(Arc::clone(&sys), Side::Primal, &mut rng);
        let psi = GroupFunction::random(Arc::clone(&sys), Side::Dual, &mut rng);
        for id in ParsevalIdentity::ALL {
            prop_assert!(parseval_residual(&f, &psi, id).unwrap() < 1e-10);
        }
    }

    #[test]
    fn pushforward_is_exact(sys in small_system(), values in prop::collection::vec(0.0f64..1.0, 400)) {
        let k = sys.k().clone();
        let g = KFunction::new(k.clone(), Role::Dual, values.iter().cycle().take(k.len()).map(|&x| Complex64::new(x, 0.0)).collect()).unwrap();
        for h in 0..sys.h_len() {
            let (lhs, rhs) = pushforward_check(&sys, h, &g).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn function_files_round_trip(sys in small_system(), seed in any::<u64>(), dual in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = if dual { Side::Dual } else { Side::Primal };
        let f = GroupFunction::random(Arc::clone(&sys), side, &mut rng);
        let text = serde_json::to_string(&function_to_file(&f, None)).unwrap();
        let file: FunctionFile = serde_json::from_str(&text).unwrap();
        let back = function_from_file(Arc::clone(&sys), &file).unwrap();
        prop_assert_eq!(back.values(), f.values());
        prop_assert_eq!(serde_json::to_string(&file).unwrap(), text);
    }

    #[test]
    fn spec_files_round_trip(sys in small_system()) {
        let spec = GroupSpecFile::from_system(&sys, Some("x".into()));
        let text = serde_json::to_string(&spec).unwrap();
        let parsed: GroupSpecFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&parsed, &spec);
        let dual_spec = GroupSpecFile::from_system(&tau_dual(&sys).unwrap(), None);
        let parsed: GroupSpecFile = serde_json::from_str(&serde_json::to_string(&dual_spec).unwrap()).unwrap();
        prop_assert_eq!(parsed, dual_spec);
    }

    #[test]
    fn affine_laws(
        x in (0.01f64..100.0, -100.0f64..100.0),
        y in (0.01f64..100.0, -100.0f64..100.0),
        z in (0.01f64..100.0, -100.0f64..100.0),
    ) {
        for law in [affine_dual_multiply, affine_multiply] {
            let l = law(law(x, y).unwrap(), z).unwrap();
            let r = law(x, law(y, z).unwrap()).unwrap();
            prop_assert!((l.0 - r.0).abs() <= 1e-13 * l.0);
            let scale = x.1.abs() + (y.1 / x.0).abs() + (z.1 / (x.0 * y.0)).abs() + (y.1 * x.0).abs() + (z.1 * x.0 * y.0).abs();
            prop_assert!((l.1 - r.1).abs() <= 1e-14 * scale);
            prop_assert_eq!(law((1.0, 0.0), x).unwrap(), x);
        }
        prop_assert_eq!(affine_dual_multiply(x, y).unwrap(), (x.0 * y.0, x.1 + x.0.recip() * y.1));
        let e = affine_dual_multiply(x, affine_dual_invert(x).unwrap()).unwrap();
        prop_assert!((e.0 - 1.0).abs() < 1e-15 && e.1.abs() < 1e-12 * (1.0 + x.1.abs()));
        let d = affine_delta(x.0 * y.0).unwrap().value();
        let dd = (affine_delta(x.0).unwrap() * affine_delta(y.0).unwrap()).value();
        prop_assert!((d - dd).abs() <= 1e-15 * d);
    }
}
