//! The affine group `(0,∞) ⋉ ℝ` with `τ_a(b) = ab`, realized by trapezoid
//! quadrature on uniform grids.
//!
//! Primal points are `(a,b)` with Haar measure `a⁻² da db` and `δ(a) = a⁻¹`.
//! The τ-dual group is `(0,∞) ⋉ ℝ̂` with law `(a,ω)(a',ω') = (aa', ω + a⁻¹ω')`
//! and Haar measure `da dω`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::automorphism::{DeltaValue, RealLinearMap};
use crate::error::{Error, Result};
use crate::tau_fourier::Variant;

/// Boundary magnitude above which sampled data counts as truncated.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;

/// `∫₁² ∫ |e^{-πb²}|² / a² db da = 1/(2√2)`.
pub const GAUSSIAN_STRIP_NORM_SQ: f64 = 0.353_553_390_593_273_8;

/// Phase recurrences are re-seeded from exact node positions this often.
const RESEED: usize = 64;

/// `count` equispaced nodes from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAxis {
    min: f64,
    max: f64,
    count: usize,
}

impl UniformAxis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(Error::GridMismatch(format!("axis bounds [{min}, {max}] are not an interval")));
        }
        if count < 2 {
            return Err(Error::GridMismatch(format!("axis needs at least 2 nodes, got {count}")));
        }
        Ok(UniformAxis { min, max, count })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.count {
            self.step() / 2.0
        } else {
            self.step()
        }
    }

    /// Same interval with every step halved.
    pub fn refined(&self) -> UniformAxis {
        UniformAxis { count: 2 * self.count - 1, ..*self }
    }

    /// Trapezoid integral of `f` over the axis.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        (0..self.count).map(|i| self.weight(i) * f(self.node(i))).sum()
    }
}

/// Tensor grid over `a`, the spatial coordinate `b` and the frequency `ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineGrid {
    a: UniformAxis,
    b: UniformAxis,
    omega: UniformAxis,
}

impl AffineGrid {
    pub fn new(a: UniformAxis, b: UniformAxis, omega: UniformAxis) -> Result<Self> {
        if a.min <= 0.0 {
            return Err(Error::GridMismatch(format!("a-axis must stay positive, starts at {}", a.min)));
        }
        Ok(AffineGrid { a, b, omega })
    }

    /// `a ∈ [1,2]` on 64 nodes, `b, ω ∈ [−8,8]` with step `1/64`.
    pub fn desk() -> Self {
        AffineGrid {
            a: UniformAxis { min: 1.0, max: 2.0, count: 64 },
            b: UniformAxis { min: -8.0, max: 8.0, count: 1025 },
            omega: UniformAxis { min: -8.0, max: 8.0, count: 1025 },
        }
    }

    pub fn a(&self) -> &UniformAxis {
        &self.a
    }

    pub fn b(&self) -> &UniformAxis {
        &self.b
    }

    pub fn omega(&self) -> &UniformAxis {
        &self.omega
    }

    pub fn refined(&self) -> AffineGrid {
        AffineGrid { a: self.a.refined(), b: self.b.refined(), omega: self.omega.refined() }
    }
}

impl Default for AffineGrid {
    fn default() -> Self {
        AffineGrid::desk()
    }
}

/// Which coordinates a sampled function lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffineDomain {
    /// `(a,b)` on the primal group.
    Spatial,
    /// `(a,ω)` on the τ-dual group, produced by the given transform.
    Frequency(Variant),
}

/// Boundary excess reported when data does not decay inside the grid box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    pub boundary_max: f64,
    pub threshold: f64,
}

/// Complex samples on `a × b` or `a × ω`, row-major with `a` outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledAffineFunction {
    grid: AffineGrid,
    domain: AffineDomain,
    values: Vec<Complex64>,
}

impl SampledAffineFunction {
    pub fn new(grid: AffineGrid, domain: AffineDomain, values: Vec<Complex64>) -> Result<Self> {
        let expected = grid.a.count * Self::inner_axis(&grid, domain).count;
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        Ok(SampledAffineFunction { grid, domain, values })
    }

    pub fn zeros(grid: AffineGrid, domain: AffineDomain) -> Self {
        let len = grid.a.count * Self::inner_axis(&grid, domain).count;
        SampledAffineFunction { grid, domain, values: vec![Complex64::new(0.0, 0.0); len] }
    }

    /// Samples `f(a, x)` where `x` is `b` or `ω` according to `domain`.
    pub fn from_fn(grid: AffineGrid, domain: AffineDomain, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let inner = Self::inner_axis(&grid, domain);
        let mut values = Vec::with_capacity(grid.a.count * inner.count);
        for i in 0..grid.a.count {
            let a = grid.a.node(i);
            values.extend((0..inner.count).map(|j| f(a, inner.node(j))));
        }
        SampledAffineFunction { grid, domain, values }
    }

    fn inner_axis(grid: &AffineGrid, domain: AffineDomain) -> UniformAxis {
        match domain {
            AffineDomain::Spatial => grid.b,
            AffineDomain::Frequency(_) => grid.omega,
        }
    }

    pub fn grid(&self) -> &AffineGrid {
        &self.grid
    }

    pub fn domain(&self) -> AffineDomain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The `b` or `ω` axis of this function.
    pub fn x_axis(&self) -> UniformAxis {
        Self::inner_axis(&self.grid, self.domain)
    }

    pub fn row(&self, ia: usize) -> &[Complex64] {
        let n = self.x_axis().count;
        &self.values[ia * n..(ia + 1) * n]
    }

    pub fn get(&self, ia: usize, ix: usize) -> Complex64 {
        self.values[ia * self.x_axis().count + ix]
    }

    /// `c·self`.
    pub fn scaled(&self, c: Complex64) -> Self {
        SampledAffineFunction { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    /// Largest magnitude on the first and last `b` (or `ω`) columns.
    pub fn boundary_max(&self) -> f64 {
        let n = self.x_axis().count;
        (0..self.grid.a.count)
            .flat_map(|i| [self.get(i, 0).norm(), self.get(i, n - 1).norm()])
            .fold(0.0, f64::max)
    }

    pub fn truncation_check(&self) -> Option<TruncationWarning> {
        let boundary_max = self.boundary_max();
        (boundary_max > TRUNCATION_THRESHOLD)
            .then_some(TruncationWarning { boundary_max, threshold: TRUNCATION_THRESHOLD })
    }

    fn warn_if_truncated(&self, what: &str) {
        if let Some(w) = self.truncation_check() {
            log::warn!(
                "{what}: boundary magnitude {:.3e} exceeds truncation threshold {:.0e}",
                w.boundary_max,
                w.threshold
            );
        }
    }

    /// Haar `L²` norm squared: `∫∫|f|²/a² da db` spatially, `∫∫|F|² da dω` on the dual.
    pub fn norm_sq(&self) -> f64 {
        let inner = self.x_axis();
        (0..self.grid.a.count)
            .map(|i| {
                let a = self.grid.a.node(i);
                let weight = match self.domain {
                    AffineDomain::Spatial => self.grid.a.weight(i) / (a * a),
                    AffineDomain::Frequency(_) => self.grid.a.weight(i),
                };
                let row: f64 = self.row(i).iter().enumerate().map(|(j, v)| inner.weight(j) * v.norm_sqr()).sum();
                weight * row
            })
            .sum()
    }

    /// Haar `L²` distance to `other` restricted to `x`-nodes with `|x| ≤ radius`,
    /// relative to the norm of `other` over the same set.
    pub fn relative_l2_error(&self, other: &Self, radius: f64) -> Result<f64> {
        if self.grid != other.grid || self.x_axis() != other.x_axis() {
            return Err(Error::GridMismatch("functions are sampled on different grids".into()));
        }
        let inner = self.x_axis();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..self.grid.a.count {
            let wa = self.grid.a.weight(i);
            for j in (0..inner.count).filter(|&j| inner.node(j).abs() <= radius) {
                let w = wa * inner.weight(j);
                num += w * (self.get(i, j) - other.get(i, j)).norm_sqr();
                den += w * other.get(i, j).norm_sqr();
            }
        }
        Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
    }

    fn expect_domain(&self, domain: AffineDomain) -> Result<()> {
        if self.domain != domain {
            return Err(Error::GridMismatch(format!("expected samples on {domain:?}, found {:?}", self.domain)));
        }
        Ok(())
    }
}

/// `f = 𝟙_{[1,2]}(a)·e^{−πb²}` on `grid`.
pub fn gaussian_strip(grid: AffineGrid) -> SampledAffineFunction {
    SampledAffineFunction::from_fn(grid, AffineDomain::Spatial, |a, b| {
        let on = (1.0..=2.0).contains(&a);
        Complex64::new(if on { (-std::f64::consts::PI * b * b).exp() } else { 0.0 }, 0.0)
    })
}

/// `Σ_m w_m s_m exp(sign·2πi ν x_m)` for every `ν` in `freqs`.
fn fourier_sum(samples: &[Complex64], axis: &UniformAxis, freqs: impl Iterator<Item = f64>, sign: f64) -> Vec<Complex64> {
    let dx = axis.step();
    freqs
        .map(|nu| {
            let step = Complex64::from_polar(1.0, sign * TAU * nu * dx);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut phase = Complex64::new(0.0, 0.0);
            for (m, s) in samples.iter().enumerate() {
                if m % RESEED == 0 {
                    phase = Complex64::from_polar(1.0, sign * TAU * nu * axis.node(m));
                }
                acc += s * phase * axis.weight(m);
                phase *= step;
            }
            acc
        })
        .collect()
}

fn map_rows(
    f: &SampledAffineFunction,
    out_domain: AffineDomain,
    row_op: impl Fn(f64, &[Complex64]) -> Vec<Complex64> + Sync,
) -> SampledAffineFunction {
    let grid = f.grid;
    let rows: Vec<Vec<Complex64>> =
        (0..grid.a.count).into_par_iter().map(|i| row_op(grid.a.node(i), f.row(i))).collect();
    SampledAffineFunction { grid, domain: out_domain, values: rows.concat() }
}

/// `F_τ(f)(a,ω) = a⁻¹ ∫ f(a,b) e^{−2πiωb} db`.
pub fn affine_tau_fourier(f: &SampledAffineFunction) -> Result<SampledAffineFunction> {
    f.expect_domain(AffineDomain::Spatial)?;
    f.warn_if_truncated("affine_tau_fourier input");
    let (b, omega) = (f.grid.b, f.grid.omega);
    let out = map_rows(f, AffineDomain::Frequency(Variant::Plain), |a, row| {
        fourier_sum(row, &b, omega.nodes().into_iter(), -1.0).into_iter().map(|v| v / a).collect()
    });
    out.warn_if_truncated("affine_tau_fourier output");
    Ok(out)
}

/// `F_τ^♯(f)(a,ω) = a^{−3/2} ∫ f(a,b) e^{−2πi a⁻¹ω b} db`.
pub fn affine_gen_tau_fourier(f: &SampledAffineFunction) -> Result<SampledAffineFunction> {
    f.expect_domain(AffineDomain::Spatial)?;
    f.warn_if_truncated("affine_gen_tau_fourier input");
    let (b, omega) = (f.grid.b, f.grid.omega);
    let out = map_rows(f, AffineDomain::Frequency(Variant::Generalized), |a, row| {
        let scale = a.powf(-1.5);
        fourier_sum(row, &b, omega.nodes().into_iter().map(|w| w / a), -1.0).into_iter().map(|v| v * scale).collect()
    });
    out.warn_if_truncated("affine_gen_tau_fourier output");
    Ok(out)
}

/// Applies the plain or generalized transform.
pub fn affine_transform(f: &SampledAffineFunction, variant: Variant) -> Result<SampledAffineFunction> {
    match variant {
        Variant::Plain => affine_tau_fourier(f),
        Variant::Generalized => affine_gen_tau_fourier(f),
    }
}

/// Inverts the transform that produced `big_f`.
///
/// Plain: `f(a,b) = a ∫ F(a,ω) e^{2πiωb} dω`.
/// Generalized: `f(a,b) = a^{1/2} ∫ F^♯(a,ω) e^{2πi a⁻¹ω b} dω`.
pub fn affine_reconstruct(big_f: &SampledAffineFunction, variant: Variant) -> Result<SampledAffineFunction> {
    big_f.expect_domain(AffineDomain::Frequency(variant))?;
    big_f.warn_if_truncated("affine_reconstruct input");
    let (b, omega) = (big_f.grid.b, big_f.grid.omega);
    Ok(map_rows(big_f, AffineDomain::Spatial, |a, row| match variant {
        Variant::Plain => fourier_sum(row, &omega, b.nodes().into_iter(), 1.0).into_iter().map(|v| v * a).collect(),
        Variant::Generalized => {
            let scale = a.sqrt();
            fourier_sum(row, &omega, b.nodes().into_iter().map(|x| x / a), 1.0)
                .into_iter()
                .map(|v| v * scale)
                .collect()
        }
    }))
}

/// Both sides of the affine Plancherel identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelSides {
    /// `∫∫ |F(a,ω)|² da dω`.
    pub transform_side: f64,
    /// `∫∫ |f(a,b)|² / a² da db`.
    pub function_side: f64,
}

impl PlancherelSides {
    pub fn relative_residual(&self) -> f64 {
        let scale = self.function_side.abs().max(self.transform_side.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.transform_side - self.function_side).abs() / scale
        }
    }
}

pub fn affine_plancherel(f: &SampledAffineFunction, variant: Variant) -> Result<PlancherelSides> {
    f.expect_domain(AffineDomain::Spatial)?;
    let big_f = affine_transform(f, variant)?;
    Ok(PlancherelSides { transform_side: big_f.norm_sq(), function_side: f.norm_sq() })
}

/// Quadruple integral of the reproducing identity and its residual against
/// `∫∫|f|²/a² da db`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupleIntegral {
    pub quadruple: f64,
    pub norm_sq: f64,
    pub residual: f64,
}

/// Evaluates `∫∫∫∫ f(a,b) f̄(a,β) a^{−p} e^{−2πi ν(ω)(b−β)} dβ db dω da` with
/// `p = 2, ν = ω` (plain) or `p = 3, ν = ω/a` (generalized), factoring the inner
/// double integral as `|∫ f(a,b) e^{−2πiνb} db|²`. Every phase is computed
/// directly, independent of the transform kernels.
pub fn quadruple_integral(f: &SampledAffineFunction, variant: Variant) -> Result<QuadrupleIntegral> {
    f.expect_domain(AffineDomain::Spatial)?;
    let grid = f.grid;
    let (b, omega) = (grid.b, grid.omega);
    let rows: Vec<f64> = (0..grid.a.count)
        .into_par_iter()
        .map(|i| {
            let a = grid.a.node(i);
            let row = f.row(i);
            let (power, freq_scale) = match variant {
                Variant::Plain => (2, 1.0),
                Variant::Generalized => (3, a.recip()),
            };
            let inner: f64 = (0..omega.count)
                .map(|j| {
                    let nu = omega.node(j) * freq_scale;
                    let s: Complex64 = row
                        .iter()
                        .enumerate()
                        .map(|(m, v)| v * Complex64::from_polar(b.weight(m), -TAU * nu * b.node(m)))
                        .sum();
                    omega.weight(j) * s.norm_sqr()
                })
                .sum();
            grid.a.weight(i) * inner / a.powi(power)
        })
        .collect();
    let quadruple: f64 = rows.iter().sum();
    let norm_sq = f.norm_sq();
    Ok(QuadrupleIntegral { quadruple, norm_sq, residual: (quadruple - norm_sq).abs() })
}

/// `|quadruple integral − ∫∫|f|²/a² da db|`.
pub fn quadruple_integral_residual(f: &SampledAffineFunction, variant: Variant) -> Result<f64> {
    Ok(quadruple_integral(f, variant)?.residual)
}

fn check_positive(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("affine scale must be positive and finite, got {a}")))
    }
}

/// `τ_a` acting on `ℝ`.
pub fn affine_tau(a: f64) -> Result<RealLinearMap> {
    check_positive(a)?;
    RealLinearMap::scalar(1, a)
}

/// `δ(a) = |det τ_a|⁻¹ = a⁻¹`.
pub fn affine_delta(a: f64) -> Result<DeltaValue> {
    Ok(affine_tau(a)?.delta())
}

/// `(a,b)(a',b') = (aa', b + ab')`.
pub fn affine_multiply(x: (f64, f64), y: (f64, f64)) -> Result<(f64, f64)> {
    let tau = affine_tau(x.0)?;
    check_positive(y.0)?;
    Ok((x.0 * y.0, x.1 + tau.apply(&[y.1])?[0]))
}

/// `(a,ω)(a',ω') = (aa', ω + τ̂_a(ω'))` where `τ̂_a` is the inverse transpose
/// of `τ_a`, so `τ̂_a(ω') = a⁻¹ω'`.
pub fn affine_dual_multiply(x: (f64, f64), y: (f64, f64)) -> Result<(f64, f64)> {
    let tau_hat = affine_tau(x.0)?.dual();
    check_positive(y.0)?;
    Ok((x.0 * y.0, x.1 + tau_hat.apply(&[y.1])?[0]))
}

/// `(a,ω)⁻¹ = (a⁻¹, −aω)`.
pub fn affine_dual_invert(x: (f64, f64)) -> Result<(f64, f64)> {
    check_positive(x.0)?;
    Ok((x.0.recip(), -x.0 * x.1))
}

/// Both sides of `∫ g(a⁻¹ω) dω = a ∫ g(ω) dω` on `axis`.
pub fn affine_pushforward_check(axis: &UniformAxis, a: f64, g: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    check_positive(a)?;
    let lhs = axis.integrate(|w| g(w / a));
    let rhs = a * axis.integrate(&g);
    Ok((lhs, rhs))
}

/// Relative change of `∫∫ φ da dω` under `φ ↦ φ(x₀ ·)`, integrating both on the
/// `a_axis × omega_axis` box (which must contain both supports).
pub fn dual_haar_left_invariance_residual(
    phi: impl Fn(f64, f64) -> f64 + Sync,
    x0: (f64, f64),
    a_axis: &UniformAxis,
    omega_axis: &UniformAxis,
) -> Result<f64> {
    check_positive(x0.0)?;
    if a_axis.min <= 0.0 {
        return Err(Error::GridMismatch("a-axis must stay positive".into()));
    }
    let integrate = |h: &(dyn Fn(f64, f64) -> Result<f64> + Sync)| -> Result<f64> {
        let rows: Result<Vec<f64>> = (0..a_axis.count)
            .into_par_iter()
            .map(|i| {
                let a = a_axis.node(i);
                let mut acc = 0.0;
                for j in 0..omega_axis.count {
                    acc += omega_axis.weight(j) * h(a, omega_axis.node(j))?;
                }
                Ok(a_axis.weight(i) * acc)
            })
            .collect();
        Ok(rows?.iter().sum())
    };
    let base = integrate(&|a, w| Ok(phi(a, w)))?;
    let moved = integrate(&|a, w| {
        let (a2, w2) = affine_dual_multiply(x0, (a, w))?;
        Ok(phi(a2, w2))
    })?;
    Ok(if base == 0.0 { moved.abs() } else { (moved - base).abs() / base.abs() })
}

/// 4-point Lagrange interpolation of a row sampled on `axis`; zero outside.
pub fn interpolate_row(row: &[Complex64], axis: &UniformAxis, x: f64) -> Complex64 {
    if x < axis.min || x > axis.max {
        return Complex64::new(0.0, 0.0);
    }
    let t = (x - axis.min) / axis.step();
    let n = axis.count;
    if n < 4 {
        let i = (t.floor() as usize).min(n - 2);
        let s = t - i as f64;
        return row[i] * (1.0 - s) + row[i + 1] * s;
    }
    let start = (t.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..4 {
        let mut l = 1.0;
        for q in (0..4).filter(|&q| q != p) {
            l *= (t - (start + q) as f64) / (p as f64 - q as f64);
        }
        acc += row[start + p] * l;
    }
    acc
}

/// `max |F^♯(a,ω) − a^{−1/2} F_τ(a, a⁻¹ω)| / max |F^♯|`, with `F_τ` interpolated
/// from its own grid.
pub fn generalized_relation_residual(plain: &SampledAffineFunction, generalized: &SampledAffineFunction) -> Result<f64> {
    plain.expect_domain(AffineDomain::Frequency(Variant::Plain))?;
    generalized.expect_domain(AffineDomain::Frequency(Variant::Generalized))?;
    if plain.grid != generalized.grid {
        return Err(Error::GridMismatch("transforms are sampled on different grids".into()));
    }
    let grid = plain.grid;
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for i in 0..grid.a.count {
        let a = grid.a.node(i);
        for j in 0..grid.omega.count {
            let w = grid.omega.node(j);
            let predicted = interpolate_row(plain.row(i), &grid.omega, w / a) / a.sqrt();
            let actual = generalized.get(i, j);
            err = err.max((actual - predicted).norm());
            scale = scale.max(actual.norm());
        }
    }
    Ok(if scale == 0.0 { err } else { err / scale })
}
