//! Pointwise and grid evaluation of `Σ m_j sin(λ_j x)` and `Σ m_j cos(λ_j x)`.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freqset::{Spectrum, SumKind};
use crate::numeric::{sin_cos_scaled, CompensatedSum, MAX_ABS_ARGUMENT};

/// Largest grid any single evaluation will allocate.
pub const MAX_GRID_POINTS: u64 = 1 << 28;

/// Above this frequency, recurrence and FFT grids drift from the pointwise
/// result by more than 1e-8 per term (rounding of `a + i·h` times `λ`), so
/// grids fall back to per-point reduction.
pub(crate) const FAST_GRID_MAX_FREQUENCY: f64 = (1u64 << 21) as f64;

const RESYNC: usize = 64;

pub(crate) fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::domain(format!("argument {x} is not finite")));
    }
    if x.abs() > MAX_ABS_ARGUMENT {
        return Err(Error::domain(format!(
            "argument {x} beyond supported reduction range ±2^40"
        )));
    }
    Ok(())
}

pub(crate) fn value_at(terms: &[(f64, f64)], kind: SumKind, x: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for &(l, m) in terms {
        let (s, c) = sin_cos_scaled(l, x);
        acc.add(
            m * match kind {
                SumKind::Sine => s,
                SumKind::Cosine => c,
            },
        );
    }
    acc.value()
}

pub(crate) fn value_and_derivative_at(terms: &[(f64, f64)], kind: SumKind, x: f64) -> (f64, f64) {
    let mut f = CompensatedSum::new();
    let mut d = CompensatedSum::new();
    for &(l, m) in terms {
        let (s, c) = sin_cos_scaled(l, x);
        match kind {
            SumKind::Sine => {
                f.add(m * s);
                d.add(m * l * c);
            }
            SumKind::Cosine => {
                f.add(m * c);
                d.add(-m * l * s);
            }
        }
    }
    (f.value(), d.value())
}

/// `Σ_j m_j·sin(λ_j x)` or `Σ_j m_j·cos(λ_j x)`, reduced in double-double and
/// summed with compensation.
pub fn eval_point<S: Spectrum>(set: &S, kind: SumKind, x: f64) -> Result<f64> {
    check_argument(x)?;
    Ok(value_at(&set.weighted(), kind, x))
}

/// Value and first derivative in one pass.
pub fn eval_point_with_derivative<S: Spectrum>(set: &S, kind: SumKind, x: f64) -> Result<(f64, f64)> {
    check_argument(x)?;
    Ok(value_and_derivative_at(&set.weighted(), kind, x))
}

/// Exact `Σ m_j·λ_j`, a Lipschitz constant for both sums.
pub fn lipschitz_bound<S: Spectrum>(set: &S) -> Result<u64> {
    let mut total: u64 = 0;
    for (l, m) in set.terms() {
        total = (m as u64)
            .checked_mul(l)
            .and_then(|t| total.checked_add(t))
            .filter(|&t| t <= i64::MAX as u64)
            .ok_or_else(|| Error::resource("Σλ exceeds 2^63"))?;
    }
    Ok(total)
}

/// `Σ m_j·λ_j^p` in floating point, nudged upward so it bounds the exact sum.
pub(crate) fn moment_upper(terms: &[(f64, f64)], p: i32) -> f64 {
    let s: f64 = terms.iter().map(|&(l, m)| m * l.powi(p)).sum();
    s * (1.0 + 1e-9)
}

/// Uniform grid `a + i·h`, `h = (b − a)/(n − 1)` on a subinterval of `[0, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    a: f64,
    b: f64,
    n_points: u64,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, n_points: u64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || b > TAU || a >= b {
            return Err(Error::domain(format!(
                "grid interval [{a}, {b}] must satisfy 0 ≤ a < b ≤ 2π"
            )));
        }
        if n_points < 2 {
            return Err(Error::domain("grid needs at least two points"));
        }
        Ok(Self { a, b, n_points })
    }

    /// `n` points covering `[0, 2π]` inclusive.
    pub fn full_period(n_points: u64) -> Result<Self> {
        Self::new(0.0, TAU, n_points)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_points(&self) -> u64 {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: u64) -> f64 {
        self.a + i as f64 * self.spacing()
    }
}

/// Evaluates the sum on every grid point. Matches [`eval_point`] within
/// `1e-8·N` per point.
pub fn eval_grid<S: Spectrum>(set: &S, kind: SumKind, grid: &GridSpec) -> Result<Vec<f64>> {
    if grid.n_points > MAX_GRID_POINTS {
        return Err(Error::resource(format!(
            "grid of {} points exceeds 2^28",
            grid.n_points
        )));
    }
    let terms = set.weighted();
    let n = grid.n_points as usize;
    let lmax = set.max_frequency() as f64;

    let use_fft = grid.a == 0.0
        && grid.b == TAU
        && n >= 3
        && lmax <= FAST_GRID_MAX_FREQUENCY
        && terms.len() >= 16;
    if use_fft {
        let (mut values, _) = fft_samples(&terms, kind, n - 1, 0..n - 1, false);
        values.push(values[0]);
        return Ok(values);
    }
    Ok(grid_accumulate(&terms, grid.a, grid.spacing(), n, |_, m, s, c| {
        m * match kind {
            SumKind::Sine => s,
            SumKind::Cosine => c,
        }
    }))
}

/// Accumulates `Σ_j g(λ_j, m_j, sin λ_j x_i, cos λ_j x_i)` at
/// `x_i = start + i·step`, sequentially over `j` with compensation per point.
///
/// Uses a rotating phasor re-seeded every 64 points when every `λ` is small
/// enough for that to agree with pointwise evaluation, otherwise reduces each
/// `λ_j x_i` directly.
pub(crate) fn grid_accumulate<G>(terms: &[(f64, f64)], start: f64, step: f64, n: usize, g: G) -> Vec<f64>
where
    G: Fn(f64, f64, f64, f64) -> f64,
{
    let lmax = terms.iter().map(|t| t.0).fold(0.0, f64::max);
    let mut out = Vec::with_capacity(n);
    if lmax > FAST_GRID_MAX_FREQUENCY {
        for i in 0..n {
            let x = start + i as f64 * step;
            let mut acc = CompensatedSum::new();
            for &(l, m) in terms {
                let (s, c) = sin_cos_scaled(l, x);
                acc.add(g(l, m, s, c));
            }
            out.push(acc.value());
        }
        return out;
    }

    let mut acc = [CompensatedSum::new(); RESYNC];
    let mut i0 = 0;
    while i0 < n {
        let len = RESYNC.min(n - i0);
        acc[..len].fill(CompensatedSum::new());
        let x0 = start + i0 as f64 * step;
        for &(l, m) in terms {
            let (mut s, mut c) = sin_cos_scaled(l, x0);
            let (ds, dc) = sin_cos_scaled(l, step);
            for slot in acc.iter_mut().take(len) {
                slot.add(g(l, m, s, c));
                let s_next = s * dc + c * ds;
                c = c * dc - s * ds;
                s = s_next;
            }
        }
        out.extend(acc[..len].iter().map(CompensatedSum::value));
        i0 += len;
    }
    out
}

/// Values (and optionally derivatives) at the exact points `2πk/n` for
/// `k ∈ range`, from inverse FFTs of the binned coefficients.
pub(crate) fn fft_samples(
    terms: &[(f64, f64)],
    kind: SumKind,
    n: usize,
    range: std::ops::Range<usize>,
    with_derivative: bool,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let bin = |l: f64| (l as u64 % n as u64) as usize;

    for &(l, m) in terms {
        buf[bin(l)].re += m;
    }
    fft.process(&mut buf);
    let values: Vec<f64> = buf[range.clone()]
        .iter()
        .map(|z| match kind {
            SumKind::Sine => z.im,
            SumKind::Cosine => z.re,
        })
        .collect();

    let derivs = with_derivative.then(|| {
        buf.fill(Complex64::new(0.0, 0.0));
        for &(l, m) in terms {
            buf[bin(l)].re += m * l;
        }
        fft.process(&mut buf);
        buf[range]
            .iter()
            .map(|z| match kind {
                SumKind::Sine => z.re,
                SumKind::Cosine => -z.im,
            })
            .collect()
    });
    (values, derivs)
}

/// Worst-case forward error of an `n`-point radix-2 FFT applied to
/// coefficients with Euclidean norm `coef_l2`, per output sample.
pub(crate) fn fft_error_bound(n: usize, coef_l2: f64) -> f64 {
    8.0 * f64::EPSILON * (n as f64).log2().max(1.0) * (n as f64).sqrt() * coef_l2
}
