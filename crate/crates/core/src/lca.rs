//! Finite abelian groups `ℤ_{n₁} × … × ℤ_{n_d}`, their characters, and the
//! classical Fourier transform between `K` and `K̂`.
//!
//! Haar measure on `K` is counting measure and the Plancherel measure on `K̂`
//! is `1/|K|` times counting measure, so that `fourier_k` is unitary and
//! `inverse_fourier_k` is its exact inverse. `K̂` is carried by the same
//! [`FiniteLcaGroup`] value (the character `ω_j` has index `j`); the [`Role`]
//! tag on a [`KFunction`] records which side a table lives on.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::dft::{self, Direction};
use crate::error::{Error, Result};

/// Largest group order accepted by [`FiniteLcaGroup::new`].
pub const DEFAULT_MAX_ORDER: u64 = 1_000_000;

/// `∏ ℤ_{n_i}` given by its elementary divisors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteLcaGroup {
    divisors: Vec<u64>,
    order: u64,
    exponent: u64,
    strides: Vec<usize>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl FiniteLcaGroup {
    pub fn new(divisors: &[i64]) -> Result<Self> {
        Self::with_max_order(divisors, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(divisors: &[i64], cap: u64) -> Result<Self> {
        let mut ds = Vec::with_capacity(divisors.len());
        let mut order: u64 = 1;
        for &n in divisors {
            if n < 1 {
                return Err(Error::InvalidDivisor(n));
            }
            order = order.saturating_mul(n as u64);
            if order > cap {
                return Err(Error::OrderTooLarge { order, cap });
            }
            ds.push(n as u64);
        }
        let exponent = ds.iter().fold(1, |l, &n| l / gcd(l, n) * n);
        let mut strides = vec![1usize; ds.len()];
        for i in (0..ds.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * ds[i + 1] as usize;
        }
        Ok(FiniteLcaGroup {
            divisors: ds,
            order,
            exponent,
            strides,
        })
    }

    /// The cyclic group `ℤ_n`.
    pub fn cyclic(n: i64) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.order as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Least common multiple of the divisors; every character value is an
    /// `exponent`-th root of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Builds an element, reducing every coordinate into `[0, n_i)`.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        self.check_len(coords.len())?;
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.divisors)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        })
    }

    /// Builds an element, rejecting coordinates outside `[0, n_i)`.
    pub fn element_strict(&self, coords: &[i64]) -> Result<GroupElement> {
        self.check_len(coords.len())?;
        for (&c, &n) in coords.iter().zip(&self.divisors) {
            if c < 0 || c as u64 >= n {
                return Err(Error::CoordinateOutOfRange { value: c, modulus: n });
            }
        }
        Ok(GroupElement {
            coords: coords.iter().map(|&c| c as u64).collect(),
        })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    pub(crate) fn check_len(&self, found: usize) -> Result<()> {
        if found != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found,
            });
        }
        Ok(())
    }

    pub(crate) fn check(&self, x: &GroupElement) -> Result<()> {
        self.check_len(x.coords.len())?;
        if x.coords.iter().zip(&self.divisors).any(|(&c, &n)| c >= n) {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    /// Row-major position of `x` (last coordinate varies fastest).
    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0u64; self.rank()];
        for (c, &s) in coords.iter_mut().zip(&self.strides) {
            *c = (index / s) as u64;
            index %= s;
        }
        GroupElement { coords }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.len()).map(|i| self.element_at(i))
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub(crate) fn add_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.divisors)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(self.neg_unchecked(a))
    }

    pub(crate) fn neg_unchecked(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.divisors)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        }
    }

    /// Exact phase of the pairing `⟨j, k⟩ = Σ j_i k_i / n_i` as a residue
    /// modulo [`exponent`](Self::exponent).
    pub fn pairing_phase(&self, j: &GroupElement, k: &GroupElement) -> Result<u64> {
        self.check(j)?;
        self.check(k)?;
        Ok(self.pairing_phase_unchecked(j, k))
    }

    pub(crate) fn pairing_phase_unchecked(&self, j: &GroupElement, k: &GroupElement) -> u64 {
        let l = self.exponent as u128;
        let mut acc: u128 = 0;
        for ((&a, &b), &n) in j.coords.iter().zip(&k.coords).zip(&self.divisors) {
            let scale = (self.exponent / n) as u128;
            acc = (acc + (a as u128 * b as u128 % n as u128) * scale) % l;
        }
        acc as u64
    }

    /// `exp(2πi·phase/exponent)`.
    pub fn root_of_unity(&self, phase: u64) -> Complex64 {
        Complex64::from_polar(1.0, TAU * phase as f64 / self.exponent as f64)
    }
}

impl fmt::Display for FiniteLcaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.divisors.is_empty() {
            return write!(f, "{{0}}");
        }
        let parts: Vec<String> = self.divisors.iter().map(|n| format!("Z{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub(crate) fn from_reduced(coords: Vec<u64>) -> Self {
        GroupElement { coords }
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.coords.iter().map(|&c| c as i64).collect()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The character `ω_j(k) = exp(2πi Σ j_i k_i / n_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    pub index: GroupElement,
}

impl Character {
    pub fn new(index: GroupElement) -> Self {
        Character { index }
    }

    pub fn trivial(group: &FiniteLcaGroup) -> Self {
        Character {
            index: group.identity(),
        }
    }

    /// Exact phase of `ω(k)` modulo `group.exponent()`.
    pub fn phase(&self, group: &FiniteLcaGroup, k: &GroupElement) -> Result<u64> {
        group.pairing_phase(&self.index, k)
    }

    /// The character product `ω·η`, i.e. index addition.
    pub fn mul(&self, group: &FiniteLcaGroup, other: &Character) -> Result<Character> {
        Ok(Character {
            index: group.add(&self.index, &other.index)?,
        })
    }
}

/// Evaluates `ω(k)`.
pub fn char_eval(group: &FiniteLcaGroup, omega: &Character, k: &GroupElement) -> Result<Complex64> {
    let phase = omega.phase(group, k)?;
    Ok(group.root_of_unity(phase))
}

/// Which side of the duality a dense table lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// A function on `K`.
    Group,
    /// A function on `K̂`.
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Counting measure on `K`.
    Haar,
    /// `1/|K|` times counting measure on `K̂`.
    Plancherel,
}

impl Measure {
    pub fn role(self) -> Role {
        match self {
            Measure::Haar => Role::Group,
            Measure::Plancherel => Role::Dual,
        }
    }

    pub fn weight(self, group: &FiniteLcaGroup) -> f64 {
        match self {
            Measure::Haar => 1.0,
            Measure::Plancherel => 1.0 / group.order() as f64,
        }
    }
}

/// Dense complex table on `K` or `K̂`, indexed by [`FiniteLcaGroup::index_of`].
#[derive(Debug, Clone, PartialEq)]
pub struct KFunction {
    group: FiniteLcaGroup,
    role: Role,
    values: Vec<Complex64>,
}

impl KFunction {
    pub fn new(group: FiniteLcaGroup, role: Role, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.len() {
            return Err(Error::DimensionMismatch {
                expected: group.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("function values must be finite".into()));
        }
        Ok(KFunction { group, role, values })
    }

    pub fn zeros(group: FiniteLcaGroup, role: Role) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); group.len()];
        KFunction { group, role, values }
    }

    pub fn from_fn(group: FiniteLcaGroup, role: Role, mut f: impl FnMut(&GroupElement) -> Complex64) -> Self {
        let values = group.elements().map(|x| f(&x)).collect();
        KFunction { group, role, values }
    }

    /// Indicator of the identity element.
    pub fn delta(group: FiniteLcaGroup, role: Role) -> Self {
        let mut f = Self::zeros(group, role);
        f.values[0] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn group(&self) -> &FiniteLcaGroup {
        &self.group
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, x: &GroupElement) -> Complex64 {
        self.values[self.group.index_of(x)]
    }

    pub fn sup_distance(&self, other: &KFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `v̂(ω) = Σ_k v(k)·conj(ω(k))`.
pub fn fourier_k(v: &KFunction) -> Result<KFunction> {
    if v.role != Role::Group {
        return Err(Error::RoleMismatch("fourier_k expects a function on K".into()));
    }
    let mut values = v.values.clone();
    dft::transform(&mut values, v.group.divisors(), Direction::Forward);
    Ok(KFunction {
        group: v.group.clone(),
        role: Role::Dual,
        values,
    })
}

/// `φ̆(k) = (1/|K|)·Σ_ω φ(ω)·ω(k)`.
pub fn inverse_fourier_k(phi: &KFunction) -> Result<KFunction> {
    if phi.role != Role::Dual {
        return Err(Error::RoleMismatch("inverse_fourier_k expects a function on K̂".into()));
    }
    let mut values = phi.values.clone();
    dft::transform(&mut values, phi.group.divisors(), Direction::Backward);
    let scale = 1.0 / phi.group.order() as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    Ok(KFunction {
        group: phi.group.clone(),
        role: Role::Group,
        values,
    })
}

/// Raw slice forms used by the row-wise transforms on `G_τ`.
pub(crate) fn forward_in_place(values: &mut [Complex64], group: &FiniteLcaGroup) {
    dft::transform(values, group.divisors(), Direction::Forward);
}

/// `Σ_ω φ(ω)·ω(k)` without the Plancherel factor.
pub(crate) fn backward_in_place(values: &mut [Complex64], group: &FiniteLcaGroup) {
    dft::transform(values, group.divisors(), Direction::Backward);
}

/// `∫ u·conj(v)` under the given measure.
pub fn inner_k(u: &KFunction, v: &KFunction, measure: Measure) -> Result<Complex64> {
    if u.group != v.group {
        return Err(Error::GroupMismatch);
    }
    let role = measure.role();
    if u.role != role || v.role != role {
        return Err(Error::RoleMismatch(format!(
            "{measure:?} integrates functions of role {role:?}"
        )));
    }
    let sum: Complex64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b.conj()).sum();
    Ok(sum * measure.weight(&u.group))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z(n: i64) -> FiniteLcaGroup {
        FiniteLcaGroup::cyclic(n).unwrap()
    }

    #[test]
    fn cyclic_and_product_addition() {
        let g = z(4);
        let s = g.add(&g.element(&[3]).unwrap(), &g.element(&[2]).unwrap()).unwrap();
        assert_eq!(s.coords(), &[1]);
        for k in g.elements() {
            assert_eq!(g.add(&g.identity(), &k).unwrap(), k);
        }
        let p = FiniteLcaGroup::new(&[2, 3]).unwrap();
        let x = p.element(&[1, 2]).unwrap();
        assert_eq!(p.add(&x, &x).unwrap().coords(), &[0, 1]);
    }

    #[test]
    fn structural_errors() {
        let g = FiniteLcaGroup::new(&[2, 3]).unwrap();
        let h = z(6);
        let a = g.element(&[1, 1]).unwrap();
        let b = h.element(&[1]).unwrap();
        assert!(matches!(g.add(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(FiniteLcaGroup::new(&[0]), Err(Error::InvalidDivisor(0))));
        assert!(matches!(
            FiniteLcaGroup::new(&[1000, 1001]),
            Err(Error::OrderTooLarge { .. })
        ));
        assert!(g.element_strict(&[2, 0]).is_err());
        assert_eq!(g.element(&[-1, 7]).unwrap().coords(), &[1, 1]);
    }

    #[test]
    fn trivial_group_has_one_element() {
        let g = FiniteLcaGroup::new(&[]).unwrap();
        assert_eq!(g.order(), 1);
        let f = KFunction::new(g.clone(), Role::Group, vec![c(2.0, 1.0)]).unwrap();
        assert_eq!(fourier_k(&f).unwrap().values(), &[c(2.0, 1.0)]);
    }

    #[test]
    fn character_values() {
        let g = z(4);
        let w1 = Character::new(g.element(&[1]).unwrap());
        let v = char_eval(&g, &w1, &g.element(&[1]).unwrap()).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-15);
        let w2 = Character::new(g.element(&[2]).unwrap());
        let v = char_eval(&g, &w2, &g.element(&[3]).unwrap()).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
        let p = FiniteLcaGroup::new(&[2, 3, 4]).unwrap();
        for k in p.elements() {
            assert_eq!(char_eval(&p, &Character::trivial(&p), &k).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn characters_are_unit_homomorphisms_exhaustively() {
        for divs in [vec![4i64], vec![2, 3], vec![2, 4], vec![3, 3], vec![8, 8]] {
            let g = FiniteLcaGroup::new(&divs).unwrap();
            assert!(g.order() <= 64);
            for j in g.elements() {
                let w = Character::new(j);
                for a in g.elements() {
                    let wa = char_eval(&g, &w, &a).unwrap();
                    assert!((wa.norm() - 1.0).abs() < 1e-14);
                    for b in g.elements() {
                        let ab = g.add(&a, &b).unwrap();
                        // exact on phases, so no tolerance is involved
                        let lhs = w.phase(&g, &ab).unwrap();
                        let rhs = (w.phase(&g, &a).unwrap() + w.phase(&g, &b).unwrap()) % g.exponent();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn fourier_examples_on_z4() {
        let g = z(4);
        let d = KFunction::delta(g.clone(), Role::Group);
        for v in fourier_k(&d).unwrap().values() {
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }
        let one = KFunction::from_fn(g.clone(), Role::Group, |_| c(1.0, 0.0));
        let hat = fourier_k(&one).unwrap();
        let expect = [4.0, 0.0, 0.0, 0.0];
        for (v, e) in hat.values().iter().zip(expect) {
            assert!((v - c(e, 0.0)).norm() < 1e-14);
        }
        // v(k) = i^k is ω₁ itself; brute force DFT puts all mass on index 1
        let w1 = KFunction::from_fn(g.clone(), Role::Group, |k| c(0.0, 1.0).powu(k.coords()[0] as u32));
        let hat = fourier_k(&w1).unwrap();
        let expect = [0.0, 4.0, 0.0, 0.0];
        for (v, e) in hat.values().iter().zip(expect) {
            assert!((v - c(e, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn inverse_examples_on_z4() {
        let g = z(4);
        let one = KFunction::from_fn(g.clone(), Role::Dual, |_| c(1.0, 0.0));
        let v = inverse_fourier_k(&one).unwrap();
        let d = KFunction::delta(g.clone(), Role::Group);
        assert!(v.sup_distance(&d) < 1e-15);
        let spike = KFunction::new(g.clone(), Role::Dual, vec![c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let v = inverse_fourier_k(&spike).unwrap();
        for x in v.values() {
            assert!((x - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn role_tags_are_enforced() {
        let g = z(4);
        let f = KFunction::zeros(g.clone(), Role::Dual);
        assert!(matches!(fourier_k(&f), Err(Error::RoleMismatch(_))));
        assert!(matches!(inverse_fourier_k(&KFunction::zeros(g.clone(), Role::Group)), Err(Error::RoleMismatch(_))));
        assert!(matches!(inner_k(&f, &f, Measure::Haar), Err(Error::RoleMismatch(_))));
        let other = KFunction::zeros(z(5), Role::Dual);
        assert!(matches!(inner_k(&f, &other, Measure::Plancherel), Err(Error::GroupMismatch)));
    }

    #[test]
    fn inner_product_examples() {
        let g = z(4);
        let d = KFunction::delta(g.clone(), Role::Group);
        assert!((inner_k(&d, &d, Measure::Haar).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let one = KFunction::from_fn(g.clone(), Role::Dual, |_| c(1.0, 0.0));
        assert!((inner_k(&one, &one, Measure::Plancherel).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn characters_are_orthogonal() {
        let g = FiniteLcaGroup::new(&[2, 6]).unwrap();
        let tables: Vec<KFunction> = g
            .elements()
            .map(|j| {
                let w = Character::new(j);
                KFunction::from_fn(g.clone(), Role::Group, |k| char_eval(&g, &w, k).unwrap())
            })
            .collect();
        for (i, a) in tables.iter().enumerate() {
            for (j, b) in tables.iter().enumerate() {
                let ip = inner_k(a, b, Measure::Haar).unwrap();
                let expect = if i == j { g.order() as f64 } else { 0.0 };
                assert!((ip - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}
