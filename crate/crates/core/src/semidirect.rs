//! The semi-direct product `G_τ = H ⋉_τ K` over a finite abelian `K`, its
//! τ-dual group `H ⋉_τ̂ K̂`, the double dual and the duality map `Θ`.
//!
//! `H` is given extensionally: a list of labels, a Cayley table, and one
//! automorphism `τ_h` per label. The Haar weight on `G_τ` is `δ(h)` per
//! `(h, ·)` slice and on the dual group `δ(h)⁻¹/|K|`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::automorphism::{Automorphism, DeltaValue};
use crate::error::{Error, Result};
use crate::lca::{Character, FiniteLcaGroup, GroupElement, KFunction, Role};

/// Which group a function or system lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `G_τ = H ⋉_τ K`.
    Primal,
    /// `G_τ̂ = H ⋉_τ̂ K̂`.
    Dual,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Primal => Side::Dual,
            Side::Dual => Side::Primal,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Primal => "primal",
            Side::Dual => "dual",
        })
    }
}

/// Above this many triples the Cayley-table associativity check samples.
const ASSOCIATIVITY_EXHAUSTIVE_LIMIT: usize = 1 << 24;

#[derive(Debug, Clone)]
pub struct TauSystem {
    k: FiniteLcaGroup,
    labels: Vec<String>,
    autos: Vec<Automorphism>,
    cayley: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    delta: Vec<DeltaValue>,
    origin: Side,
    /// `τ̂_h`, the action `ω ↦ ω_h` on character indices.
    dual_autos: Vec<Automorphism>,
    /// Index maps of `τ_h` on `K`.
    k_perm: Vec<Vec<usize>>,
    /// Index maps of `ω ↦ ω_h` on `K̂`.
    dual_perm: Vec<Vec<usize>>,
}

impl TauSystem {
    /// Validates that the Cayley table is a group, that `τ` is a homomorphism
    /// into `Aut(K)` and that `δ` is a positive homomorphism.
    pub fn new(
        k: FiniteLcaGroup,
        labels: Vec<String>,
        autos: Vec<Automorphism>,
        cayley: Vec<Vec<usize>>,
        delta: Option<Vec<f64>>,
    ) -> Result<Self> {
        Self::build(k, labels, autos, cayley, delta, Side::Primal)
    }

    fn build(
        k: FiniteLcaGroup,
        labels: Vec<String>,
        autos: Vec<Automorphism>,
        cayley: Vec<Vec<usize>>,
        delta: Option<Vec<f64>>,
        origin: Side,
    ) -> Result<Self> {
        let n = labels.len();
        let bad = |msg: String| Err(Error::InvalidSystem(msg));
        if n == 0 {
            return bad("H must contain at least the identity".into());
        }
        if autos.len() != n || cayley.len() != n {
            return bad(format!(
                "{n} labels but {} automorphisms and {} Cayley rows",
                autos.len(),
                cayley.len()
            ));
        }
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.as_str(), i).is_some() {
                return bad(format!("duplicate label `{l}`"));
            }
        }
        if autos.iter().any(|a| *a.group() != k) {
            return Err(Error::GroupMismatch);
        }
        for row in &cayley {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return bad("Cayley table must be a square table of label indices".into());
            }
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|j| cayley[e][j] == j && cayley[j][e] == j)) else {
            return bad("Cayley table has no identity".into());
        };
        let mut inverse = Vec::with_capacity(n);
        for h in 0..n {
            match (0..n).find(|&g| cayley[h][g] == identity && cayley[g][h] == identity) {
                Some(g) => inverse.push(g),
                None => return bad(format!("label `{}` has no inverse", labels[h])),
            }
        }
        check_associative(&cayley)?;
        if !autos[identity].is_identity() {
            return bad("identity label must act as the identity automorphism".into());
        }
        for a in 0..n {
            for b in 0..n {
                if autos[cayley[a][b]] != autos[a].compose(&autos[b])? {
                    return bad(format!(
                        "τ is not a homomorphism at ({}, {})",
                        labels[a], labels[b]
                    ));
                }
            }
        }
        let delta = match delta {
            None => vec![DeltaValue::ONE; n],
            Some(d) => {
                if d.len() != n {
                    return bad(format!("delta table has {} entries for {n} labels", d.len()));
                }
                d.into_iter().map(DeltaValue::new).collect::<Result<Vec<_>>>()?
            }
        };
        for a in 0..n {
            for b in 0..n {
                let lhs = delta[cayley[a][b]].value();
                let rhs = (delta[a] * delta[b]).value();
                if (lhs - rhs).abs() > 1e-12 * lhs.max(rhs) {
                    return bad("delta table is not multiplicative".into());
                }
            }
        }
        let dual_autos: Vec<Automorphism> = (0..n)
            .map(|h| autos[h].dual_from_inverse(&autos[inverse[h]]))
            .collect();
        let k_perm = autos.iter().map(Automorphism::to_permutation).collect();
        let dual_perm = dual_autos.iter().map(Automorphism::to_permutation).collect();
        Ok(TauSystem {
            k,
            labels,
            autos,
            cayley,
            identity,
            inverse,
            delta,
            origin,
            dual_autos,
            k_perm,
            dual_perm,
        })
    }

    /// Builds the Cayley table from composition of distinct automorphisms.
    pub fn from_automorphisms(k: FiniteLcaGroup, entries: Vec<(String, Automorphism)>) -> Result<Self> {
        let index: HashMap<&Automorphism, usize> = entries.iter().enumerate().map(|(i, (_, a))| (a, i)).collect();
        if index.len() != entries.len() {
            return Err(Error::InvalidSystem(
                "automorphisms must be distinct to infer the Cayley table".into(),
            ));
        }
        let mut cayley = vec![vec![0; entries.len()]; entries.len()];
        for (i, (_, a)) in entries.iter().enumerate() {
            for (j, (_, b)) in entries.iter().enumerate() {
                let c = a.compose(b)?;
                cayley[i][j] = *index
                    .get(&c)
                    .ok_or_else(|| Error::InvalidSystem("automorphism set is not closed under composition".into()))?;
            }
        }
        let (labels, autos) = entries.into_iter().unzip();
        Self::new(k, labels, autos, cayley, None)
    }

    /// The trivial action of the one-element `H`; `G_τ` is `K` itself.
    pub fn trivial(k: FiniteLcaGroup) -> Self {
        let id = Automorphism::identity(&k);
        Self::new(k, vec!["e".into()], vec![id], vec![vec![0]], None).expect("trivial system is valid")
    }

    pub fn k(&self) -> &FiniteLcaGroup {
        &self.k
    }

    pub fn h_len(&self) -> usize {
        self.labels.len()
    }

    pub fn order(&self) -> usize {
        self.h_len() * self.k.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, h: usize) -> &str {
        &self.labels[h]
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn automorphisms(&self) -> &[Automorphism] {
        &self.autos
    }

    pub fn tau(&self, h: usize) -> &Automorphism {
        &self.autos[h]
    }

    /// `τ̂_h`.
    pub fn tau_hat(&self, h: usize) -> &Automorphism {
        &self.dual_autos[h]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    pub fn h_identity(&self) -> usize {
        self.identity
    }

    pub fn h_mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a][b]
    }

    pub fn h_inverse(&self, h: usize) -> usize {
        self.inverse[h]
    }

    pub fn delta(&self, h: usize) -> DeltaValue {
        self.delta[h]
    }

    pub fn delta_table(&self) -> &[DeltaValue] {
        &self.delta
    }

    /// `Primal` for a system built directly, `Dual` for the output of
    /// [`tau_dual`] (and `Primal` again for the double dual).
    pub fn origin(&self) -> Side {
        self.origin
    }

    pub(crate) fn k_perm(&self, h: usize) -> &[usize] {
        &self.k_perm[h]
    }

    /// Index map `ω ↦ ω_h`.
    pub(crate) fn dual_perm(&self, h: usize) -> &[usize] {
        &self.dual_perm[h]
    }

    fn check_h(&self, h: usize) -> Result<()> {
        if h < self.h_len() {
            Ok(())
        } else {
            Err(Error::UnknownIndex(h))
        }
    }

    pub fn element(&self, label: &str, k: &[i64]) -> Result<GTauElement> {
        Ok(GTauElement {
            h: self.label_index(label)?,
            k: self.k.element(k)?,
        })
    }

    pub fn identity_element(&self) -> GTauElement {
        GTauElement {
            h: self.identity,
            k: self.k.identity(),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GTauElement> + '_ {
        (0..self.h_len()).flat_map(move |h| self.k.elements().map(move |k| GTauElement { h, k }))
    }

    fn check_element(&self, x: &GTauElement) -> Result<()> {
        self.check_h(x.h)?;
        self.k.check(&x.k)
    }

    /// `(h,k)·(h',k') = (hh', k + τ_h(k'))`.
    pub fn multiply(&self, x: &GTauElement, y: &GTauElement) -> Result<GTauElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(GTauElement {
            h: self.cayley[x.h][y.h],
            k: self.k.add_unchecked(&x.k, &self.autos[x.h].apply_unchecked(&y.k)),
        })
    }

    /// `(h,k)⁻¹ = (h⁻¹, τ_{h⁻¹}(−k))`.
    pub fn invert(&self, x: &GTauElement) -> Result<GTauElement> {
        self.check_element(x)?;
        let hi = self.inverse[x.h];
        Ok(GTauElement {
            h: hi,
            k: self.autos[hi].apply_unchecked(&self.k.neg_unchecked(&x.k)),
        })
    }

    /// `ω_h = ω ∘ τ_{h⁻¹}`.
    pub fn omega_action(&self, h: usize, omega: &Character) -> Result<Character> {
        self.check_h(h)?;
        Ok(Character::new(self.dual_autos[h].apply(&omega.index)?))
    }

    pub fn dual_identity_element(&self) -> GTauHatElement {
        GTauHatElement {
            h: self.identity,
            omega: Character::trivial(&self.k),
        }
    }

    /// `(h,ω)·(h',ω') = (hh', ω·ω'_h)` on the τ-dual group.
    pub fn dual_multiply(&self, x: &GTauHatElement, y: &GTauHatElement) -> Result<GTauHatElement> {
        self.check_h(x.h)?;
        let moved = self.omega_action(x.h, &y.omega)?;
        Ok(GTauHatElement {
            h: self.cayley[x.h][y.h],
            omega: x.omega.mul(&self.k, &moved)?,
        })
    }

    pub fn dual_invert(&self, x: &GTauHatElement) -> Result<GTauHatElement> {
        self.check_h(x.h)?;
        let hi = self.inverse[x.h];
        let neg = Character::new(self.k.neg(&x.omega.index)?);
        Ok(GTauHatElement {
            h: hi,
            omega: self.omega_action(hi, &neg)?,
        })
    }
}

fn check_associative(cayley: &[Vec<usize>]) -> Result<()> {
    let n = cayley.len();
    let check = |a: usize, b: usize, c: usize| cayley[cayley[a][b]][c] == cayley[a][cayley[b][c]];
    let ok = if n.saturating_pow(3) <= ASSOCIATIVITY_EXHAUSTIVE_LIMIT {
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| check(a, b, c))))
    } else {
        // fixed LCG so validation stays deterministic
        let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 33) as usize % n
        };
        (0..100_000).all(|_| check(next(), next(), next()))
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSystem("Cayley table is not associative".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GTauElement {
    pub h: usize,
    pub k: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GTauHatElement {
    pub h: usize,
    pub omega: Character,
}

impl GTauHatElement {
    /// The same point viewed as an element of the system returned by [`tau_dual`].
    pub fn into_dual_system_element(self) -> GTauElement {
        GTauElement {
            h: self.h,
            k: self.omega.index,
        }
    }
}

/// The τ-dual system `(H, K̂, τ̂)` with `δ̂(h) = δ(h)⁻¹`, so that its own
/// primal Haar weight is the dual measure `δ(h)⁻¹ dh dω`.
pub fn tau_dual(sys: &TauSystem) -> Result<TauSystem> {
    TauSystem::build(
        sys.k.clone(),
        sys.labels.clone(),
        sys.dual_autos.clone(),
        sys.cayley.clone(),
        Some(sys.delta.iter().map(|d| d.recip().value()).collect()),
        sys.origin.flip(),
    )
}

/// `Θ(h,k) = (h, k̂)`. `K̂̂` is identified with `K` through the canonical
/// index map, so the data is unchanged; [`verify_duality`] checks that this
/// identification really is an isomorphism onto the double dual.
pub fn double_dual_theta(sys: &TauSystem, x: &GTauElement) -> Result<GTauElement> {
    sys.check_element(x)?;
    Ok(x.clone())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DualityReport {
    pub theta_pairs: usize,
    pub theta_failures: usize,
    pub theta_bijective: bool,
    pub lemma_points: usize,
    pub lemma_failures: usize,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.theta_failures == 0 && self.theta_bijective && self.lemma_failures == 0
    }
}

/// Checks that `Θ` is a bijective homomorphism onto the double dual (over
/// all pairs) and that `(τ_h(k))^ = τ̂̂_h(k̂)` holds pointwise on `K̂`, also
/// against `ω ↦ ω_{h⁻¹}(k)`. All comparisons are on exact phases.
pub fn verify_duality(sys: &TauSystem) -> Result<DualityReport> {
    let dual = tau_dual(sys)?;
    let double = tau_dual(&dual)?;
    let mut report = DualityReport::default();

    let elements: Vec<GTauElement> = sys.elements().collect();
    let images: Vec<GTauElement> = elements
        .iter()
        .map(|x| double_dual_theta(sys, x))
        .collect::<Result<_>>()?;
    let distinct: std::collections::HashSet<&GTauElement> = images.iter().collect();
    report.theta_bijective = distinct.len() == double.order() && elements.len() == double.order();
    for (x, tx) in elements.iter().zip(&images) {
        for (y, ty) in elements.iter().zip(&images) {
            report.theta_pairs += 1;
            let lhs = double_dual_theta(sys, &sys.multiply(x, y)?)?;
            let rhs = double.multiply(tx, ty)?;
            if lhs != rhs {
                report.theta_failures += 1;
            }
        }
    }

    let k = sys.k();
    for h in 0..sys.h_len() {
        let hi = sys.h_inverse(h);
        for kk in k.elements() {
            let moved = sys.tau(h).apply(&kk)?;
            // k̂ lives in K̂̂; the double-dual action moves its index
            let khat_moved = double.tau(h).apply(&kk)?;
            for w in k.elements() {
                report.lemma_points += 1;
                let lhs = k.pairing_phase(&w, &moved)?;
                let rhs = k.pairing_phase(&khat_moved, &w)?;
                let via_action = sys.omega_action(hi, &Character::new(w.clone()))?;
                let ddg = via_action.phase(k, &kk)?;
                if lhs != rhs || lhs != ddg {
                    report.lemma_failures += 1;
                }
            }
        }
    }
    Ok(report)
}

/// Change of variables on `K̂`: returns `(∫ g(ω_{h⁻¹}) dω, δ(h)·∫ g(ω) dω)`
/// under Plancherel measure. Terms are summed in sorted order so equal
/// multisets produce bit-identical sums.
pub fn pushforward_check(sys: &TauSystem, h: usize, g: &KFunction) -> Result<(f64, f64)> {
    sys.check_h(h)?;
    if g.group() != sys.k() {
        return Err(Error::GroupMismatch);
    }
    if g.role() != Role::Dual {
        return Err(Error::RoleMismatch("pushforward_check integrates over K̂".into()));
    }
    let vals = g.values();
    if vals.iter().any(|v| v.im != 0.0 || v.re < 0.0) {
        return Err(Error::Domain("pushforward_check expects a nonnegative real function".into()));
    }
    let perm = sys.dual_perm(sys.h_inverse(h));
    let scale = 1.0 / sys.k().order() as f64;
    let lhs = sorted_sum(perm.iter().map(|&i| vals[i].re)) * scale;
    let rhs = sys.delta(h).value() * (sorted_sum(vals.iter().map(|v| v.re)) * scale);
    Ok((lhs, rhs))
}

fn sorted_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = it.collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().sum()
}

/// `Δ(h,k) = δ(h)·Δ_H(h)·Δ_K(k)`; finite factors are unimodular.
pub fn modular_function(sys: &TauSystem, x: &GTauElement) -> Result<f64> {
    sys.check_element(x)?;
    Ok(sys.delta(x.h).value())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupAxiomReport {
    pub checked: usize,
    pub failures: usize,
    pub exhaustive: bool,
}

impl GroupAxiomReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Above this order the associativity check samples random triples
/// (exhaustive checking is cubic in the order).
pub const AXIOM_EXHAUSTIVE_LIMIT: usize = 128;

/// Associativity, identity and inverse on `G_τ` (or on `G_τ̂` when
/// `side == Dual`).
pub fn verify_group_axioms<R: Rng>(sys: &TauSystem, side: Side, rng: &mut R, samples: usize) -> Result<GroupAxiomReport> {
    let target = match side {
        Side::Primal => sys.clone(),
        Side::Dual => tau_dual(sys)?,
    };
    let elements: Vec<GTauElement> = target.elements().collect();
    let e = target.identity_element();
    let mut report = GroupAxiomReport {
        exhaustive: elements.len() <= AXIOM_EXHAUSTIVE_LIMIT,
        ..Default::default()
    };
    let check_one = |x: &GTauElement, report: &mut GroupAxiomReport| -> Result<()> {
        report.checked += 1;
        let xi = target.invert(x)?;
        if target.multiply(&e, x)? != *x
            || target.multiply(x, &e)? != *x
            || target.multiply(x, &xi)? != e
            || target.multiply(&xi, x)? != e
        {
            report.failures += 1;
        }
        Ok(())
    };
    for x in &elements {
        check_one(x, &mut report)?;
    }
    let assoc = |x: &GTauElement, y: &GTauElement, z: &GTauElement| -> Result<bool> {
        Ok(target.multiply(&target.multiply(x, y)?, z)? == target.multiply(x, &target.multiply(y, z)?)?)
    };
    if report.exhaustive {
        for x in &elements {
            for y in &elements {
                for z in &elements {
                    report.checked += 1;
                    if !assoc(x, y, z)? {
                        report.failures += 1;
                    }
                }
            }
        }
    } else {
        for _ in 0..samples {
            let pick = |rng: &mut R| elements[rng.random_range(0..elements.len())].clone();
            let (x, y, z) = (pick(rng), pick(rng), pick(rng));
            report.checked += 1;
            if !assoc(&x, &y, &z)? {
                report.failures += 1;
            }
        }
    }
    Ok(report)
}

/// Complex table on `G_τ` (primal) or `G_τ̂` (dual), one row of length `|K|`
/// per label of `H`.
#[derive(Debug, Clone)]
pub struct GroupFunction {
    system: Arc<TauSystem>,
    side: Side,
    values: Vec<Complex64>,
}

impl PartialEq for GroupFunction {
    fn eq(&self, other: &Self) -> bool {
        self.side == other.side && self.values == other.values && Arc::ptr_eq(&self.system, &other.system)
    }
}

impl GroupFunction {
    pub fn zeros(system: Arc<TauSystem>, side: Side) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); system.order()];
        GroupFunction { system, side, values }
    }

    pub fn from_values(system: Arc<TauSystem>, side: Side, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != system.order() {
            return Err(Error::DimensionMismatch {
                expected: system.order(),
                found: values.len(),
            });
        }
        Ok(GroupFunction { system, side, values })
    }

    /// `f(h, k)` from a closure over the H index and the `K` (or `K̂`) element.
    pub fn from_fn(system: Arc<TauSystem>, side: Side, mut f: impl FnMut(usize, &GroupElement) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(system.order());
        for h in 0..system.h_len() {
            for k in system.k().elements() {
                values.push(f(h, &k));
            }
        }
        GroupFunction { system, side, values }
    }

    /// Entries with real and imaginary parts uniform in `[-1, 1)`.
    pub fn random<R: Rng>(system: Arc<TauSystem>, side: Side, rng: &mut R) -> Self {
        let values = (0..system.order())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        GroupFunction { system, side, values }
    }

    pub fn system(&self) -> &Arc<TauSystem> {
        &self.system
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn row_len(&self) -> usize {
        self.system.k().len()
    }

    /// The slice `f_h`.
    pub fn row(&self, h: usize) -> &[Complex64] {
        let n = self.row_len();
        &self.values[h * n..(h + 1) * n]
    }

    pub fn row_mut(&mut self, h: usize) -> &mut [Complex64] {
        let n = self.row_len();
        &mut self.values[h * n..(h + 1) * n]
    }

    /// `f_h` as a function on `K` (primal) or `K̂` (dual).
    pub fn row_function(&self, h: usize) -> KFunction {
        let role = match self.side {
            Side::Primal => Role::Group,
            Side::Dual => Role::Dual,
        };
        KFunction::new(self.system.k().clone(), role, self.row(h).to_vec()).expect("row has |K| finite entries")
    }

    pub fn get(&self, h: usize, k: &GroupElement) -> Complex64 {
        self.values[h * self.row_len() + self.system.k().index_of(k)]
    }

    /// Haar weight of one point in the `h` slice.
    pub fn weight(&self, h: usize) -> f64 {
        let d = self.system.delta(h).value();
        match self.side {
            Side::Primal => d,
            Side::Dual => 1.0 / (d * self.system.k().order() as f64),
        }
    }

    pub fn integral(&self) -> Complex64 {
        (0..self.system.h_len())
            .map(|h| self.row(h).iter().sum::<Complex64>() * self.weight(h))
            .sum()
    }

    /// Squared `L²` norm under the side's Haar measure.
    pub fn norm_sq(&self) -> f64 {
        (0..self.system.h_len())
            .map(|h| self.row(h).iter().map(Complex64::norm_sqr).sum::<f64>() * self.weight(h))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn inner(&self, other: &GroupFunction) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok((0..self.system.h_len())
            .map(|h| {
                self.row(h)
                    .iter()
                    .zip(other.row(h))
                    .map(|(a, b)| a * b.conj())
                    .sum::<Complex64>()
                    * self.weight(h)
            })
            .sum())
    }

    pub fn sup_distance(&self, other: &GroupFunction) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: Complex64, other: &GroupFunction, b: Complex64) -> Result<GroupFunction> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(GroupFunction {
            system: Arc::clone(&self.system),
            side: self.side,
            values,
        })
    }

    pub(crate) fn check_compatible(&self, other: &GroupFunction) -> Result<()> {
        if self.side != other.side {
            return Err(Error::SideMismatch {
                expected: self.side,
                found: other.side,
            });
        }
        if !Arc::ptr_eq(&self.system, &other.system)
            && (self.system.k() != other.system.k() || self.system.h_len() != other.system.h_len())
        {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn expect_side(&self, side: Side) -> Result<()> {
        if self.side == side {
            Ok(())
        } else {
            Err(Error::SideMismatch {
                expected: side,
                found: self.side,
            })
        }
    }

    /// `x ↦ f(g₀⁻¹·x)`, using the group law of the function's side.
    /// `g0.k` is read as a character index on the dual side.
    pub fn left_translate(&self, g0: &GTauElement) -> Result<GroupFunction> {
        let sys = &self.system;
        let k = sys.k();
        let mut values = Vec::with_capacity(self.values.len());
        match self.side {
            Side::Primal => {
                let gi = sys.invert(g0)?;
                for x in sys.elements() {
                    let y = sys.multiply(&gi, &x)?;
                    values.push(self.get(y.h, &y.k));
                }
            }
            Side::Dual => {
                let g0 = GTauHatElement {
                    h: g0.h,
                    omega: Character::new(g0.k.clone()),
                };
                let gi = sys.dual_invert(&g0)?;
                for h in 0..sys.h_len() {
                    for w in k.elements() {
                        let x = GTauHatElement {
                            h,
                            omega: Character::new(w),
                        };
                        let y = sys.dual_multiply(&gi, &x)?;
                        values.push(self.get(y.h, &y.omega.index));
                    }
                }
            }
        }
        Ok(GroupFunction {
            system: Arc::clone(sys),
            side: self.side,
            values,
        })
    }
}

/// `|∫ f(g₀⁻¹x) dμ(x) − ∫ f dμ|` for the side's Haar measure.
pub fn left_invariance_residual(f: &GroupFunction, g0: &GTauElement) -> Result<f64> {
    Ok((f.left_translate(g0)?.integral() - f.integral()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn affine(n: i64) -> TauSystem {
        let k = FiniteLcaGroup::cyclic(n).unwrap();
        let entries = (1..n)
            .filter(|u| crate::automorphism::mod_inverse(*u, n).is_some())
            .map(|u| (u.to_string(), Automorphism::scalar(&k, u).unwrap()))
            .collect();
        TauSystem::from_automorphisms(k, entries).unwrap()
    }

    #[test]
    fn multiply_and_invert_on_finite_affine_z5() {
        let s = affine(5);
        let x = s.element("2", &[1]).unwrap();
        let y = s.element("3", &[4]).unwrap();
        assert_eq!(s.multiply(&x, &y).unwrap(), s.element("1", &[4]).unwrap());
        let e = s.identity_element();
        assert_eq!(s.multiply(&e, &y).unwrap(), y);
        let xi = s.invert(&x).unwrap();
        assert_eq!(xi, s.element("3", &[2]).unwrap());
        assert_eq!(s.multiply(&x, &xi).unwrap(), e);
        assert_eq!(s.invert(&e).unwrap(), e);
        let h0 = s.element("4", &[0]).unwrap();
        assert_eq!(s.invert(&h0).unwrap(), s.element("4", &[0]).unwrap());
    }

    #[test]
    fn associativity_on_random_triple_z7() {
        let s = affine(7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let elems: Vec<_> = s.elements().collect();
        for _ in 0..50 {
            let pick = |rng: &mut ChaCha8Rng| elems[rng.random_range(0..elems.len())].clone();
            let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let l = s.multiply(&s.multiply(&x, &y).unwrap(), &z).unwrap();
            let r = s.multiply(&x, &s.multiply(&y, &z).unwrap()).unwrap();
            assert_eq!(l, r);
        }
    }

    #[test]
    fn unknown_labels_and_indices_are_structural_errors() {
        let s = affine(5);
        assert!(matches!(s.element("7", &[0]), Err(Error::UnknownLabel(_))));
        let bad = GTauElement {
            h: 9,
            k: s.k().identity(),
        };
        assert!(matches!(s.multiply(&bad, &bad), Err(Error::UnknownIndex(9))));
    }

    #[test]
    fn omega_action_examples() {
        let s = affine(4);
        let k = s.k().clone();
        let h3 = s.label_index("3").unwrap();
        let w1 = Character::new(k.element(&[1]).unwrap());
        assert_eq!(s.omega_action(h3, &w1).unwrap().index.coords(), &[3]);
        for w in k.elements() {
            let w = Character::new(w);
            assert_eq!(s.omega_action(s.h_identity(), &w).unwrap(), w);
        }
    }

    #[test]
    fn omega_action_cocycle_on_units_mod_8() {
        let s = affine(8);
        for t in 0..s.h_len() {
            for h in 0..s.h_len() {
                let th = s.h_mul(t, h);
                for w in s.k().elements() {
                    let w = Character::new(w);
                    let lhs = s.omega_action(th, &w).unwrap();
                    let rhs = s.omega_action(t, &s.omega_action(h, &w).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn tau_dual_of_affine_z5_scales_by_inverse_unit() {
        let s = affine(5);
        let d = tau_dual(&s).unwrap();
        assert_eq!(d.origin(), Side::Dual);
        for h in 0..s.h_len() {
            let u: i64 = s.label(h).parse().unwrap();
            let uinv = crate::automorphism::mod_inverse(u, 5).unwrap();
            for j in 0..5 {
                let w = s.k().element(&[j]).unwrap();
                let got = d.tau(h).apply(&w).unwrap();
                assert_eq!(got.coords(), &[((j * uinv) % 5) as u64]);
            }
        }
    }

    #[test]
    fn trivial_h_dual_is_the_classical_dual() {
        let k = FiniteLcaGroup::new(&[2, 3]).unwrap();
        let s = TauSystem::trivial(k.clone());
        let d = tau_dual(&s).unwrap();
        assert_eq!(d.h_len(), 1);
        assert!(d.tau(0).is_identity());
        assert_eq!(d.k(), &k);
    }

    #[test]
    fn theta_and_lemma_on_affine_z5_and_z4() {
        let s = affine(5);
        let r = verify_duality(&s).unwrap();
        assert_eq!(r.theta_pairs, 400);
        assert!(r.passed(), "{r:?}");
        assert_eq!(double_dual_theta(&s, &s.identity_element()).unwrap(), s.identity_element());
        let r = verify_duality(&affine(4)).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn lemma_instance_z4_h3_k1() {
        let s = affine(4);
        let dd = tau_dual(&tau_dual(&s).unwrap()).unwrap();
        assert_eq!(dd.origin(), Side::Primal);
        let h = s.label_index("3").unwrap();
        let k1 = s.k().element(&[1]).unwrap();
        let moved = s.tau(h).apply(&k1).unwrap();
        let khat = dd.tau(h).apply(&k1).unwrap();
        for w in s.k().elements() {
            assert_eq!(
                s.k().pairing_phase(&w, &moved).unwrap(),
                s.k().pairing_phase(&khat, &w).unwrap()
            );
        }
    }

    #[test]
    fn pushforward_is_exact_on_finite_systems() {
        let s = affine(8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = KFunction::from_fn(s.k().clone(), Role::Dual, |_| Complex64::new(rng.random_range(0.0..1.0), 0.0));
        for h in 0..s.h_len() {
            let (l, r) = pushforward_check(&s, h, &g).unwrap();
            assert_eq!(l, r);
        }
        let one = KFunction::from_fn(s.k().clone(), Role::Dual, |_| Complex64::new(1.0, 0.0));
        assert_eq!(pushforward_check(&s, 1, &one).unwrap(), (1.0, 1.0));
        let neg = KFunction::from_fn(s.k().clone(), Role::Dual, |_| Complex64::new(-1.0, 0.0));
        assert!(matches!(pushforward_check(&s, 1, &neg), Err(Error::Domain(_))));
    }

    #[test]
    fn modular_function_is_one_and_multiplicative() {
        let s = affine(7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let elems: Vec<_> = s.elements().collect();
        for _ in 0..20 {
            let x = &elems[rng.random_range(0..elems.len())];
            let y = &elems[rng.random_range(0..elems.len())];
            let xy = s.multiply(x, y).unwrap();
            let m = |e| modular_function(&s, e).unwrap();
            assert_eq!(m(x), 1.0);
            assert_eq!(m(&xy), m(x) * m(y));
        }
    }

    #[test]
    fn group_axioms_primal_and_dual() {
        let s = affine(5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for side in [Side::Primal, Side::Dual] {
            let r = verify_group_axioms(&s, side, &mut rng, 0).unwrap();
            assert!(r.exhaustive);
            assert_eq!(r.failures, 0);
            assert_eq!(r.checked, 20 + 20 * 20 * 20);
        }
    }

    #[test]
    fn haar_sums_are_left_invariant_on_both_sides() {
        let s = Arc::new(affine(7));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for side in [Side::Primal, Side::Dual] {
            let f = GroupFunction::random(Arc::clone(&s), side, &mut rng);
            for g0 in s.elements() {
                assert!(left_invariance_residual(&f, &g0).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn validation_rejects_non_homomorphisms() {
        let k = FiniteLcaGroup::cyclic(5).unwrap();
        let id = Automorphism::identity(&k);
        let two = Automorphism::scalar(&k, 2).unwrap();
        // ℤ₂ table paired with an element of order 4
        let r = TauSystem::new(k.clone(), vec!["e".into(), "s".into()], vec![id.clone(), two.clone()], vec![vec![0, 1], vec![1, 0]], None);
        assert!(matches!(r, Err(Error::InvalidSystem(_))));
        let r = TauSystem::new(k.clone(), vec!["e".into(), "s".into()], vec![two, id.clone()], vec![vec![0, 1], vec![1, 0]], None);
        assert!(matches!(r, Err(Error::InvalidSystem(_))));
        let r = TauSystem::new(k.clone(), vec!["e".into()], vec![id.clone()], vec![vec![0]], Some(vec![2.0]));
        assert!(matches!(r, Err(Error::InvalidSystem(_))));
        let r = TauSystem::from_automorphisms(k.clone(), vec![("e".into(), id), ("two".into(), Automorphism::scalar(&k, 2).unwrap())]);
        assert!(matches!(r, Err(Error::InvalidSystem(_))));
    }
}
