//! Separable DFT kernels over a row-major table indexed by `∏ ℤ_{n_i}`.
//!
//! The transform on a product of cyclic groups factors into one 1-D DFT per
//! axis. Power-of-two axes use an iterative radix-2 FFT; every other length
//! falls back to a direct sum against an exact twiddle table.

use std::f64::consts::TAU;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// Kernel `exp(-2πi jk/n)`.
    Forward,
    /// Kernel `exp(+2πi jk/n)`, unnormalized.
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Backward => 1.0,
        }
    }
}

/// Twiddle table `exp(sign·2πi t/n)` for `t ∈ [0, n)`.
fn twiddles(n: usize, direction: Direction) -> Vec<Complex64> {
    let sign = direction.sign();
    (0..n)
        .map(|t| Complex64::from_polar(1.0, sign * TAU * t as f64 / n as f64))
        .collect()
}

fn dft_direct(input: &[Complex64], out: &mut [Complex64], table: &[Complex64]) {
    let n = input.len();
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut t = 0usize;
        for x in input {
            acc += x * table[t];
            t += j;
            if t >= n {
                t -= n;
            }
        }
        *slot = acc;
    }
}

fn fft_radix2(buf: &mut [Complex64], table: &[Complex64]) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = table[k * step];
                let u = buf[start + k];
                let v = buf[start + k + half] * w;
                buf[start + k] = u + v;
                buf[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

/// One-dimensional DFT plan for a fixed length and direction.
pub(crate) struct Plan {
    table: Vec<Complex64>,
    radix2: bool,
}

impl Plan {
    pub(crate) fn new(n: usize, direction: Direction) -> Self {
        Plan {
            table: twiddles(n, direction),
            radix2: n >= 4 && n.is_power_of_two(),
        }
    }

    pub(crate) fn run(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        if self.radix2 {
            fft_radix2(buf, &self.table);
        } else {
            dft_direct(buf, scratch, &self.table);
            buf.copy_from_slice(scratch);
        }
    }
}

/// In-place transform of a row-major table whose axis `i` has length
/// `divisors[i]` (the last axis varies fastest).
pub(crate) fn transform(values: &mut [Complex64], divisors: &[u64], direction: Direction) {
    let total: usize = divisors.iter().map(|&n| n as usize).product();
    debug_assert_eq!(values.len(), total);
    let mut stride = total;
    for &n in divisors {
        let n = n as usize;
        stride /= n;
        if n == 1 {
            continue;
        }
        let plan = Plan::new(n, direction);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        let block = n * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + t * stride];
                }
                plan.run(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    values[base + t * stride] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(input: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = input.len();
        (0..n)
            .map(|j| {
                input
                    .iter()
                    .enumerate()
                    .map(|(k, x)| x * Complex64::from_polar(1.0, sign * TAU * (j * k) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn radix2_and_direct_agree_with_naive() {
        for n in [1usize, 2, 3, 4, 6, 8, 16, 12, 64] {
            let input: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
                .collect();
            for dir in [Direction::Forward, Direction::Backward] {
                let mut buf = input.clone();
                transform(&mut buf, &[n as u64], dir);
                let expect = naive(&input, dir.sign());
                for (a, b) in buf.iter().zip(&expect) {
                    assert!((a - b).norm() < 1e-12, "n={n}");
                }
            }
        }
    }

    #[test]
    fn two_axis_table_matches_naive_product_kernel() {
        let dims = [2u64, 3];
        let input: Vec<Complex64> = (0..6).map(|i| Complex64::new(i as f64, -(i as f64) / 2.0)).collect();
        let mut buf = input.clone();
        transform(&mut buf, &dims, Direction::Forward);
        for j0 in 0..2 {
            for j1 in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k0 in 0..2 {
                    for k1 in 0..3 {
                        let phase = (j0 * k0) as f64 / 2.0 + (j1 * k1) as f64 / 3.0;
                        acc += input[k0 * 3 + k1] * Complex64::from_polar(1.0, -TAU * phase);
                    }
                }
                assert!((buf[j0 * 3 + j1] - acc).norm() < 1e-12);
            }
        }
    }
}
