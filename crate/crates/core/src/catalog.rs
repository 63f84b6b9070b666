//! Built-in finite semi-direct products, each paired with a closed-form law
//! for its τ-dual group that is written independently of [`tau_dual`].
//!
//! | name | `H` | `K` | action |
//! |------|-----|-----|--------|
//! | `affine:n` | units of `ℤ_n` | `ℤ_n` | `k ↦ hk` |
//! | `heisenberg:n` | `ℤ_n` | `ℤ_n²` | `(x,z) ↦ (x, z + sx)` |
//! | `motion:n` | `{I, J, J², J³}` | `ℤ_n²` | rotation by `J = [[0,−1],[1,0]]` |

use std::fmt;

use rand::Rng;

use crate::automorphism::{mod_inverse, Automorphism};
use crate::error::{Error, Result};
use crate::lca::{Character, FiniteLcaGroup};
use crate::semidirect::{tau_dual, GTauElement, GTauHatElement, TauSystem};

/// Above this many dual elements the oracle comparison samples pairs.
pub const EXHAUSTIVE_ORACLE_LIMIT: usize = 2000;

/// Random pairs drawn when the comparison is not exhaustive.
pub const SAMPLED_ORACLE_PAIRS: usize = 10_000;

/// A dual element as `(h index, character index coordinates)`.
pub type DualPoint = (usize, Vec<u64>);

type DualLaw = dyn Fn(&DualPoint, &DualPoint) -> DualPoint + Send + Sync;

pub struct CatalogEntry {
    pub name: String,
    pub system: TauSystem,
    pub dual_law_oracle: Box<DualLaw>,
    pub notes: String,
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("system", &self.system)
            .field("notes", &self.notes)
            .finish_non_exhaustive()
    }
}

/// Outcome of comparing the constructed dual law with the oracle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub pairs: usize,
    pub mismatches: usize,
    pub exhaustive: bool,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

impl CatalogEntry {
    pub fn oracle_multiply(&self, x: &GTauHatElement, y: &GTauHatElement) -> GTauHatElement {
        let k = self.system.k();
        let (h, coords) = (self.dual_law_oracle)(
            &(x.h, x.omega.index.coords().to_vec()),
            &(y.h, y.omega.index.coords().to_vec()),
        );
        let coords: Vec<i64> = coords.iter().map(|&c| c as i64).collect();
        GTauHatElement { h, omega: Character::new(k.element(&coords).expect("oracle output has the rank of K")) }
    }

    /// Compares `tau_dual(system)` with the oracle on every pair when the dual
    /// has at most [`EXHAUSTIVE_ORACLE_LIMIT`] elements, else on random pairs.
    pub fn verify_oracle<R: Rng>(&self, rng: &mut R) -> Result<OracleReport> {
        let dual = tau_dual(&self.system)?;
        let elements: Vec<GTauElement> = dual.elements().collect();
        let as_hat = |e: &GTauElement| GTauHatElement { h: e.h, omega: Character::new(e.k.clone()) };
        let mut report = OracleReport { exhaustive: elements.len() <= EXHAUSTIVE_ORACLE_LIMIT, ..Default::default() };
        let mut check = |x: &GTauElement, y: &GTauElement| -> Result<()> {
            let constructed = dual.multiply(x, y)?;
            let expected = self.oracle_multiply(&as_hat(x), &as_hat(y));
            report.pairs += 1;
            if constructed.h != expected.h || constructed.k != expected.omega.index {
                report.mismatches += 1;
            }
            Ok(())
        };
        if report.exhaustive {
            for x in &elements {
                for y in &elements {
                    check(x, y)?;
                }
            }
        } else {
            for _ in 0..SAMPLED_ORACLE_PAIRS {
                let x = &elements[rng.random_range(0..elements.len())];
                let y = &elements[rng.random_range(0..elements.len())];
                check(x, y)?;
            }
        }
        Ok(report)
    }
}

fn check_n(n: i64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("catalog groups need n ≥ 2, got {n}")));
    }
    Ok(())
}

fn units(n: i64) -> Vec<i64> {
    (1..n).filter(|&h| mod_inverse(h, n).is_some()).collect()
}

/// `ℤ_n^× ⋉ ℤ_n` with `τ_h(k) = hk`.
pub fn finite_affine(n: i64) -> Result<CatalogEntry> {
    check_n(n)?;
    let k = FiniteLcaGroup::cyclic(n)?;
    let hs = if n == 2 { vec![1] } else { units(n) };
    let labels = hs.iter().map(|h| h.to_string()).collect();
    let autos = hs.iter().map(|&h| Automorphism::scalar(&k, h)).collect::<Result<Vec<_>>>()?;
    let position = |v: i64| hs.iter().position(|&h| h == v.rem_euclid(n)).expect("units are closed");
    let cayley = hs.iter().map(|&a| hs.iter().map(|&b| position(a * b)).collect()).collect();
    let system = TauSystem::new(k, labels, autos, cayley, None)?;

    let table = hs.clone();
    let oracle = move |x: &DualPoint, y: &DualPoint| -> DualPoint {
        let (h, hp) = (table[x.0], table[y.0]);
        let h_inv = mod_inverse(h, n).expect("unit");
        let prod = (h * hp).rem_euclid(n);
        let j = (x.1[0] as i64 + y.1[0] as i64 * h_inv).rem_euclid(n);
        (table.iter().position(|&u| u == prod).expect("unit"), vec![j as u64])
    };
    Ok(CatalogEntry {
        name: format!("affine:{n}"),
        system,
        dual_law_oracle: Box::new(oracle),
        notes: "finite affine group; dual law (h,j)(h',j') = (hh', j + h⁻¹j')".into(),
    })
}

/// `ℤ_n ⋉ ℤ_n²` with `τ_s(x, z) = (x, z + sx)`, the finite Heisenberg group.
pub fn finite_heisenberg(n: i64) -> Result<CatalogEntry> {
    check_n(n)?;
    let k = FiniteLcaGroup::new(&[n, n])?;
    let labels = (0..n).map(|s| s.to_string()).collect();
    let autos = (0..n).map(|s| Automorphism::new(&k, vec![vec![1, 0], vec![s, 1]])).collect::<Result<Vec<_>>>()?;
    let nu = n as usize;
    let cayley = (0..nu).map(|a| (0..nu).map(|b| (a + b) % nu).collect()).collect();
    let system = TauSystem::new(k, labels, autos, cayley, None)?;

    let oracle = move |x: &DualPoint, y: &DualPoint| -> DualPoint {
        let (s, kk, m) = (x.0 as i64, x.1[0] as i64, x.1[1] as i64);
        let (sp, kp, mp) = (y.0 as i64, y.1[0] as i64, y.1[1] as i64);
        (
            (s + sp).rem_euclid(n) as usize,
            vec![(kk + kp - mp * s).rem_euclid(n) as u64, (m + mp).rem_euclid(n) as u64],
        )
    };
    Ok(CatalogEntry {
        name: format!("heisenberg:{n}"),
        system,
        dual_law_oracle: Box::new(oracle),
        notes: "finite Heisenberg group with the circle replaced by ℤ_n; dual law (s+s', k+k'−m's, m+m')".into(),
    })
}

const ROTATIONS: [[[i64; 2]; 2]; 4] = [[[1, 0], [0, 1]], [[0, -1], [1, 0]], [[-1, 0], [0, -1]], [[0, 1], [-1, 0]]];

/// `{I, J, J², J³} ⋉ ℤ_n²`, a finite motion group with rotations by quarter turns.
pub fn finite_motion(n: i64) -> Result<CatalogEntry> {
    check_n(n)?;
    let k = FiniteLcaGroup::new(&[n, n])?;
    let labels = ["I", "J", "J2", "J3"].iter().map(|s| s.to_string()).collect();
    let autos = ROTATIONS
        .iter()
        .map(|m| Automorphism::new(&k, m.iter().map(|r| r.to_vec()).collect()))
        .collect::<Result<Vec<_>>>()?;
    let cayley = (0..4).map(|a| (0..4).map(|b| (a + b) % 4).collect()).collect();
    let system = TauSystem::new(k, labels, autos, cayley, None)?;

    let oracle = move |x: &DualPoint, y: &DualPoint| -> DualPoint {
        let sigma = ROTATIONS[x.0];
        let w = [y.1[0] as i64, y.1[1] as i64];
        let moved = [sigma[0][0] * w[0] + sigma[0][1] * w[1], sigma[1][0] * w[0] + sigma[1][1] * w[1]];
        (
            (x.0 + y.0) % 4,
            vec![(x.1[0] as i64 + moved[0]).rem_euclid(n) as u64, (x.1[1] as i64 + moved[1]).rem_euclid(n) as u64],
        )
    };
    Ok(CatalogEntry {
        name: format!("motion:{n}"),
        system,
        dual_law_oracle: Box::new(oracle),
        notes: "quarter-turn motion group; rotations are orthogonal so the dual law is (σσ', w + σw')".into(),
    })
}

pub const FAMILIES: [&str; 3] = ["affine", "heisenberg", "motion"];

/// Resolves `family:n`, e.g. `heisenberg:3`.
pub fn lookup(name: &str) -> Result<CatalogEntry> {
    let (family, n) = name
        .split_once(':')
        .ok_or_else(|| Error::Catalog(format!("name {name:?} is not of the form family:n")))?;
    let n: i64 = n.parse().map_err(|_| Error::Catalog(format!("size {n:?} is not an integer")))?;
    match family {
        "affine" => finite_affine(n),
        "heisenberg" => finite_heisenberg(n),
        "motion" => finite_motion(n),
        _ => Err(Error::Catalog(format!("unknown family {family:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semidirect::{verify_group_axioms, Side};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn affine_entries() {
        let e = finite_affine(5).unwrap();
        assert_eq!(e.system.order(), 20);
        for side in [Side::Primal, Side::Dual] {
            let r = verify_group_axioms(&e.system, side, &mut rng(), 0).unwrap();
            assert!(r.passed() && r.exhaustive);
        }
        assert!(e.verify_oracle(&mut rng()).unwrap().passed());

        let e = finite_affine(2).unwrap();
        assert_eq!(e.system.h_len(), 1);
        assert_eq!(e.system.order(), 2);

        let e = finite_affine(4).unwrap();
        let three = e.system.label_index("3").unwrap();
        let k = e.system.k();
        let moved = e.system.omega_action(three, &Character::new(k.element(&[1]).unwrap())).unwrap();
        assert_eq!(moved.index.coords(), &[3]);
    }

    #[test]
    fn heisenberg_law_and_exhaustive_oracle() {
        let e = finite_heisenberg(5).unwrap();
        let k = e.system.k();
        let x = GTauHatElement { h: 1, omega: Character::new(k.element(&[2, 3]).unwrap()) };
        let y = GTauHatElement { h: 2, omega: Character::new(k.element(&[4, 1]).unwrap()) };
        let z = e.system.dual_multiply(&x, &y).unwrap();
        assert_eq!((z.h, z.omega.index.coords()), (3, &[0u64, 4][..]));
        let id = e.system.dual_identity_element();
        assert_eq!(e.system.dual_multiply(&id, &x).unwrap(), x);
        assert_eq!(e.system.dual_multiply(&x, &id).unwrap(), x);

        let report = finite_heisenberg(3).unwrap().verify_oracle(&mut rng()).unwrap();
        assert_eq!(report.pairs, 729);
        assert!(report.passed() && report.exhaustive);
    }

    #[test]
    fn motion_rotations() {
        let e = finite_motion(4).unwrap();
        assert_eq!(e.system.order(), 64);
        let k = e.system.k();
        let j = e.system.label_index("J").unwrap();
        assert_eq!(e.system.tau(j).apply(&k.element(&[1, 0]).unwrap()).unwrap().coords(), &[0, 1]);
        for side in [Side::Primal, Side::Dual] {
            assert!(verify_group_axioms(&e.system, side, &mut rng(), 0).unwrap().passed());
        }
        assert!(e.system.tau_hat(e.system.label_index("I").unwrap()).is_identity());
        let mut j4 = e.system.h_identity();
        for _ in 0..4 {
            j4 = e.system.h_mul(j4, j);
        }
        assert_eq!(j4, e.system.h_identity());
        for w in k.elements() {
            let omega = Character::new(w.clone());
            let mut moved = omega.clone();
            for _ in 0..4 {
                moved = e.system.omega_action(j, &moved).unwrap();
            }
            assert_eq!(moved, omega);
        }
        assert!(e.verify_oracle(&mut rng()).unwrap().passed());
        assert!(finite_motion(2).unwrap().verify_oracle(&mut rng()).unwrap().passed());
    }

    #[test]
    fn larger_entries_use_sampled_pairs() {
        let report = finite_heisenberg(13).unwrap().verify_oracle(&mut rng()).unwrap();
        assert!(!report.exhaustive);
        assert_eq!(report.pairs, SAMPLED_ORACLE_PAIRS);
        assert!(report.passed());
    }

    #[test]
    fn bad_sizes_and_names() {
        for f in [finite_affine, finite_heisenberg, finite_motion] {
            assert!(matches!(f(1), Err(Error::Domain(_))));
        }
        assert!(lookup("heisenberg:3").is_ok());
        assert!(lookup("torus:3").is_err());
        assert!(lookup("affine").is_err());
        assert!(lookup("affine:x").is_err());
    }
}
