//! Automorphisms of `∏ ℤ_{n_i}` as integer matrices, their duals on `K̂`, and
//! the modular weight `δ`.
//!
//! A matrix `M` acts by `(Mk)_i = Σ_j M_ij k_j mod n_i`. This is well defined
//! exactly when `M_ij · n_j ≡ 0 (mod n_i)`, and entries are stored reduced
//! modulo their row divisor so equal maps have equal matrices.
//!
//! Dual matrices. With `N = M⁻¹`, the character `ω_j ∘ M⁻¹` evaluates to
//! `exp(2πi Σ_l k_l/n_l · Σ_i j_i N_il n_l/n_i)`, so the dual automorphism
//! has matrix `D_li = N_il · n_l / n_i`, i.e. `diag(n) Nᵀ diag(n)⁻¹`. The
//! quotient is an integer by well-definedness of `N`. For uniform divisors
//! this is plain `(M⁻¹)ᵀ`.

use std::collections::HashSet;
use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lca::{FiniteLcaGroup, GroupElement};

/// Orders up to this bound are checked for bijectivity by enumerating the image.
pub const EXHAUSTIVE_CHECK_LIMIT: u64 = 10_000;

/// The positive factor `δ` in `dk = δ·d(τ(k))`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DeltaValue(f64);

impl DeltaValue {
    pub const ONE: DeltaValue = DeltaValue(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(DeltaValue(value))
        } else {
            Err(Error::Domain(format!("modular weight must be positive, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn recip(self) -> DeltaValue {
        DeltaValue(1.0 / self.0)
    }

    pub fn powf(self, e: f64) -> f64 {
        self.0.powf(e)
    }
}

impl Mul for DeltaValue {
    type Output = DeltaValue;

    fn mul(self, rhs: DeltaValue) -> DeltaValue {
        DeltaValue(self.0 * rhs.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    group: FiniteLcaGroup,
    matrix: Vec<Vec<i64>>,
}

fn reduce(x: i128, n: u64) -> i64 {
    x.rem_euclid(n as i128) as i64
}

impl Automorphism {
    /// Validates shape, well-definedness and bijectivity.
    pub fn new(group: &FiniteLcaGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let alpha = Self::endomorphism(group, matrix)?;
        let bijective = if group.order() <= EXHAUSTIVE_CHECK_LIMIT {
            alpha.bijective_by_enumeration()
        } else {
            alpha.bijective_by_socle_rank()
        };
        if !bijective {
            return Err(Error::InvalidAutomorphism(format!(
                "matrix {:?} is not a bijection of {group}",
                alpha.matrix
            )));
        }
        Ok(alpha)
    }

    /// Shape and well-definedness only; used by the bijectivity checks.
    pub(crate) fn endomorphism(group: &FiniteLcaGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let d = group.rank();
        if matrix.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.len(),
            });
        }
        let divs = group.divisors();
        let mut reduced = Vec::with_capacity(d);
        for (i, row) in matrix.into_iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            let mut out = Vec::with_capacity(d);
            for (j, m) in row.into_iter().enumerate() {
                if (m as i128 * divs[j] as i128).rem_euclid(divs[i] as i128) != 0 {
                    return Err(Error::InvalidAutomorphism(format!(
                        "entry ({i},{j}) = {m} does not respect the relation n_{j} = {}",
                        divs[j]
                    )));
                }
                out.push(reduce(m as i128, divs[i]));
            }
            reduced.push(out);
        }
        Ok(Automorphism {
            group: group.clone(),
            matrix: reduced,
        })
    }

    pub fn identity(group: &FiniteLcaGroup) -> Self {
        let d = group.rank();
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| reduce((i == j) as i128, group.divisors()[i])).collect())
            .collect();
        Automorphism {
            group: group.clone(),
            matrix,
        }
    }

    /// Multiplication by `c` on every coordinate.
    pub fn scalar(group: &FiniteLcaGroup, c: i64) -> Result<Self> {
        let d = group.rank();
        let matrix = (0..d).map(|i| (0..d).map(|j| if i == j { c } else { 0 }).collect()).collect();
        Self::new(group, matrix)
    }

    pub fn group(&self) -> &FiniteLcaGroup {
        &self.group
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.group)
    }

    pub fn apply(&self, k: &GroupElement) -> Result<GroupElement> {
        self.group.check(k)?;
        Ok(self.apply_unchecked(k))
    }

    pub(crate) fn apply_unchecked(&self, k: &GroupElement) -> GroupElement {
        let divs = self.group.divisors();
        let coords = self
            .matrix
            .iter()
            .zip(divs)
            .map(|(row, &n)| {
                let s: i128 = row.iter().zip(k.coords()).map(|(&m, &c)| m as i128 * c as i128).sum();
                reduce(s, n) as u64
            })
            .collect();
        GroupElement::from_reduced(coords)
    }

    /// `α ∘ β`, i.e. `k ↦ α(β(k))`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let d = self.group.rank();
        let divs = self.group.divisors();
        let matrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let s: i128 = (0..d)
                            .map(|l| self.matrix[i][l] as i128 * other.matrix[l][j] as i128)
                            .sum();
                        reduce(s, divs[i])
                    })
                    .collect()
            })
            .collect();
        Ok(Automorphism {
            group: self.group.clone(),
            matrix,
        })
    }

    /// The inverse automorphism. Column `j` of the inverse matrix is the
    /// preimage of the basis vector `e_j`.
    pub fn invert(&self) -> Result<Automorphism> {
        let d = self.group.rank();
        let divs = self.group.divisors();
        if d == 1 {
            let n = divs[0] as i64;
            return match mod_inverse(self.matrix[0][0], n) {
                Some(inv) => Ok(Automorphism {
                    group: self.group.clone(),
                    matrix: vec![vec![inv]],
                }),
                None => Err(Error::InvalidAutomorphism(format!(
                    "{} is not a unit modulo {n}",
                    self.matrix[0][0]
                ))),
            };
        }
        let targets: Vec<GroupElement> = (0..d)
            .map(|j| {
                let coords: Vec<u64> = (0..d).map(|i| (i == j) as u64 % divs[i]).collect();
                GroupElement::from_reduced(coords)
            })
            .collect();
        let mut columns: Vec<Option<GroupElement>> = vec![None; d];
        let mut missing = d;
        for x in self.group.elements() {
            let y = self.apply_unchecked(&x);
            for (j, t) in targets.iter().enumerate() {
                if columns[j].is_none() && y == *t {
                    columns[j] = Some(x.clone());
                    missing -= 1;
                }
            }
            if missing == 0 {
                break;
            }
        }
        if missing > 0 {
            return Err(Error::InvalidAutomorphism(format!(
                "matrix {:?} is not surjective",
                self.matrix
            )));
        }
        let cols: Vec<GroupElement> = columns.into_iter().map(Option::unwrap).collect();
        let matrix = (0..d).map(|i| (0..d).map(|j| cols[j].coords()[i] as i64).collect()).collect();
        let inv = Automorphism {
            group: self.group.clone(),
            matrix,
        };
        if !inv.compose(self)?.is_identity() {
            return Err(Error::InvalidAutomorphism(format!(
                "matrix {:?} is not injective",
                self.matrix
            )));
        }
        Ok(inv)
    }

    /// Dual automorphism `ω ↦ ω ∘ α⁻¹` on character indices.
    pub fn dual(&self) -> Result<Automorphism> {
        Ok(self.dual_from_inverse(&self.invert()?))
    }

    /// Dual matrix built from an already known inverse `N = α⁻¹`.
    pub(crate) fn dual_from_inverse(&self, inverse: &Automorphism) -> Automorphism {
        let d = self.group.rank();
        let divs = self.group.divisors();
        let matrix = (0..d)
            .map(|l| {
                (0..d)
                    .map(|i| {
                        let scaled = inverse.matrix[i][l] as i128 * divs[l] as i128;
                        debug_assert_eq!(scaled % divs[i] as i128, 0);
                        reduce(scaled / divs[i] as i128, divs[l])
                    })
                    .collect()
            })
            .collect();
        Automorphism {
            group: self.group.clone(),
            matrix,
        }
    }

    /// The image of every element in enumeration order.
    pub fn to_permutation(&self) -> Vec<usize> {
        self.group
            .elements()
            .map(|k| self.group.index_of(&self.apply_unchecked(&k)))
            .collect()
    }

    pub fn bijective_by_enumeration(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.group.len());
        self.to_permutation().into_iter().all(|i| seen.insert(i))
    }

    /// An endomorphism of a finite abelian group is bijective iff it is
    /// injective on the `p`-torsion `K[p] ≅ (ℤ_p)^r` for every prime `p`,
    /// which is a rank test over `F_p`.
    pub fn bijective_by_socle_rank(&self) -> bool {
        let divs = self.group.divisors();
        for p in prime_factors(self.group.exponent()) {
            let axes: Vec<usize> = (0..divs.len()).filter(|&i| divs[i] % p == 0).collect();
            let mut rows = vec![vec![0u64; axes.len()]; axes.len()];
            for (cj, &j) in axes.iter().enumerate() {
                let gen = (divs[j] / p) as i128;
                for (i, &n) in divs.iter().enumerate() {
                    let image = reduce(self.matrix[i][j] as i128 * gen, n) as u64;
                    if n % p == 0 {
                        let unit = n / p;
                        debug_assert_eq!(image % unit, 0);
                        let ci = axes.iter().position(|&a| a == i).unwrap();
                        rows[ci][cj] = (image / unit) % p;
                    } else {
                        debug_assert_eq!(image, 0);
                    }
                }
            }
            if rank_mod_p(rows, p) < axes.len() {
                return false;
            }
        }
        true
    }

    /// Every automorphism of a finite group preserves counting measure.
    pub fn delta(&self) -> DeltaValue {
        DeltaValue::ONE
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .matrix
            .iter()
            .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// `α ↦ α̂` on a finite automorphism.
pub fn dual_automorphism(alpha: &Automorphism) -> Result<Automorphism> {
    alpha.dual()
}

pub(crate) fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (n as i128, (a as i128).rem_euclid(n as i128));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(n as i128) as i64)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse(rows[rank][col] as i64, p as i64).unwrap() as u64;
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col] * inv % p;
                for c in 0..ncols {
                    rows[r][c] = (rows[r][c] + p * p - factor * rows[rank][c] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Invertible linear map of `ℝ^d`, the continuum counterpart of
/// [`Automorphism`]. Lebesgue measure rescales by `|det|`, so `δ = 1/|det|`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearMap {
    matrix: DMatrix<f64>,
}

impl RealLinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let det = matrix.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::InvalidAutomorphism("singular linear map".into()));
        }
        Ok(RealLinearMap { matrix })
    }

    /// `x ↦ c·x` on `ℝ^d`.
    pub fn scalar(dim: usize, c: f64) -> Result<Self> {
        Self::new(DMatrix::from_diagonal_element(dim, dim, c))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.ncols(),
                found: x.len(),
            });
        }
        Ok((0..self.matrix.nrows())
            .map(|i| (0..x.len()).map(|j| self.matrix[(i, j)] * x[j]).sum())
            .collect())
    }

    pub fn compose(&self, other: &RealLinearMap) -> Result<RealLinearMap> {
        RealLinearMap::new(&self.matrix * &other.matrix)
    }

    pub fn delta(&self) -> DeltaValue {
        DeltaValue(1.0 / self.matrix.determinant().abs())
    }

    /// `ω ↦ ω ∘ A⁻¹` under the pairing `⟨x, ω⟩ = exp(2πi x·ω)`, which is `(A⁻¹)ᵀ`.
    pub fn dual(&self) -> RealLinearMap {
        let inv = self.matrix.clone().try_inverse().expect("validated as invertible");
        RealLinearMap { matrix: inv.transpose() }
    }
}
