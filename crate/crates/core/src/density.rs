//! Conjugate Dirichlet kernel `D*_M(x) = Σ_{j=1}^M sin jx` and the count bound
//! `#{λ_j ≤ M} = (1/π)∫₀^{2π} f·D*_M ≤ M₁·‖D*_M‖`, where the norm used here is
//! `(1/π)∫₀^{2π}|D*_M|`.

use std::f64::consts::{FRAC_2_PI, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::fft_samples;
use crate::freqset::{FrequencySet, Spectrum, SumKind};
use crate::numeric::{next_pow2, reduce_angle, sin_cos_scaled, CompensatedSum};
use crate::quadrature::{integrate, integrate_panels, Budget};

pub const MAX_KERNEL_ORDER: u64 = 1 << 31;
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
/// Evaluation budget of a single L¹ quadrature.
pub const QUADRATURE_BUDGET: u64 = 1 << 28;

/// Orders up to this use full quadrature in bounds; beyond, the analytic
/// enclosure of [`l1_enclosure`].
pub const QUADRATURE_MAX_ORDER: u64 = 1 << 16;

/// Largest trapezoid grid for [`sine_inner_count`].
pub const MAX_INNER_GRID: u64 = 1 << 25;

const NEAR_ZERO: f64 = 1e-6;
const DIRECT_FALLBACK_MAX_ORDER: u64 = 1 << 20;
/// Periods of `cos((M+½)x)` integrated directly before the enclosure starts.
const HEAD_PERIODS: f64 = 8192.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct KernelOrder(u64);

impl KernelOrder {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 || m > MAX_KERNEL_ORDER {
            return Err(Error::domain(format!("kernel order {m} outside [1, 2^31]")));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for KernelOrder {
    type Error = Error;

    fn try_from(m: u64) -> Result<Self> {
        KernelOrder::new(m)
    }
}

impl From<KernelOrder> for u64 {
    fn from(m: KernelOrder) -> u64 {
        m.0
    }
}

/// `sin(Mx/2)·sin((M+1)x/2)/sin(x/2)`, summed term by term where
/// `|sin(x/2)| < 1e-6` and `M ≤ 2^20`. Returns NaN for non-finite `x`.
pub fn conj_dirichlet_eval(m: KernelOrder, x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let (xr, _) = reduce_angle(1.0, x);
    let half = (0.5 * xr).sin();
    if half == 0.0 {
        return 0.0;
    }
    let m = m.get() as f64;
    if half.abs() < NEAR_ZERO && m <= DIRECT_FALLBACK_MAX_ORDER as f64 {
        return (1..=m as u64).map(|j| sin_cos_scaled(j as f64, xr).0).collect::<CompensatedSum>().value();
    }
    let (s1, _) = sin_cos_scaled(m, 0.5 * xr);
    let (s2, _) = sin_cos_scaled(m + 1.0, 0.5 * xr);
    s1 * s2 / half
}

/// Zeros of `D*_M` in `(0, π)` with each gap split in half, plus the ends.
fn zero_breaks(m: u64, a: f64, b: f64) -> Vec<f64> {
    let mut zeros: Vec<f64> = Vec::new();
    for q in [m, m + 1] {
        let step = TAU / q as f64;
        let k0 = (a / step).floor() as u64 + 1;
        let mut k = k0;
        loop {
            let z = k as f64 * step;
            if z >= b {
                break;
            }
            if z > a {
                zeros.push(z);
            }
            k += 1;
        }
    }
    zeros.push(a);
    zeros.push(b);
    zeros.sort_by(f64::total_cmp);
    zeros.dedup();
    let mut out = Vec::with_capacity(zeros.len() * 2);
    for w in zeros.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(b);
    out
}

fn abs_kernel_integral(m: KernelOrder, a: f64, b: f64, tol: f64, budget: &mut Budget) -> Result<f64> {
    let f = |x: f64| conj_dirichlet_eval(m, x).abs();
    integrate_panels(&f, &zero_breaks(m.get(), a, b), tol, budget)
}

/// `(1/π)∫₀^{2π}|D*_M|` by adaptive Gauss–Kronrod on panels between the
/// kernel's zeros (at least `4M` of them), to absolute error `quad_tol`.
pub fn conj_dirichlet_l1(m: KernelOrder, quad_tol: f64) -> Result<f64> {
    if !(quad_tol > 0.0 && quad_tol.is_finite()) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    // odd about π: (1/π)∫₀^{2π} = (2/π)∫₀^π
    let mut budget = Budget::new(QUADRATURE_BUDGET);
    Ok(FRAC_2_PI * abs_kernel_integral(m, 0.0, PI, 0.5 * PI * quad_tol, &mut budget)?)
}

/// Two-sided enclosure of the L¹ norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Enclosure {
    pub lower: f64,
    pub upper: f64,
}

impl L1Enclosure {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Mean of `|a − cos θ|` over a period, for `a ∈ [0, 1]`.
fn mean_abs_offset_cos(a: f64) -> f64 {
    let a = a.clamp(0.0, 1.0);
    a + FRAC_2_PI * ((1.0 - a * a).sqrt() - a * a.acos())
}

/// Rigorous bounds on the L¹ norm up to the quadrature tolerance.
///
/// For `M ≤ 2^16` this is the quadrature value `± quad_tol`. Beyond, with
/// `ω = M + ½`, `|D*_M(x)| = |cos(x/2) − cos ωx| / (2 sin(x/2))`; the first
/// 8192 periods of `cos ωx` are integrated numerically and every later full
/// period is replaced by the period-averaged envelope `φ(x) = E(cos(x/2)) /
/// (2 sin(x/2))`, with the monotonicity of `φ` and of `cos(x/2)` bounding the
/// error. The enclosure is about `1.6e-4` wide.
pub fn l1_enclosure(m: KernelOrder, quad_tol: f64) -> Result<L1Enclosure> {
    if !(quad_tol > 0.0 && quad_tol.is_finite()) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    if m.get() <= QUADRATURE_MAX_ORDER {
        let v = conj_dirichlet_l1(m, quad_tol)?;
        return Ok(L1Enclosure { lower: v - quad_tol, upper: v + quad_tol });
    }
    let omega = m.get() as f64 + 0.5;
    let h = TAU / omega;
    let x_k = HEAD_PERIODS * h;
    let x_end = (PI / h).floor() * h;
    let t = 0.125 * PI * quad_tol;
    let mut budget = Budget::new(QUADRATURE_BUDGET);

    let head = abs_kernel_integral(m, 0.0, x_k, t, &mut budget)?;
    let rest = abs_kernel_integral(m, x_end, PI, t, &mut budget)?;

    let w = |x: f64| 0.5 / (0.5 * x).sin();
    let phi = |x: f64| w(x) * mean_abs_offset_cos((0.5 * x).cos());
    let body = integrate(&phi, x_k, x_end, t, &mut budget)?;
    let log_tan = |x: f64| (0.25 * x).tan().ln();
    let ww = log_tan(x_end) - log_tan(x_k);
    let slack = h * phi(x_k) + 0.25 * h * (h * w(x_k) + ww) + 3.0 * t;

    let core = head + rest + body;
    Ok(L1Enclosure {
        lower: FRAC_2_PI * (core - slack),
        upper: FRAC_2_PI * (core + slack),
    })
}

/// `(#{λ_j ≤ M}, (1/π)∫₀^{2π} f·D*_M)` where `f = Σ sin λ_j x`.
///
/// The integral is the trapezoid rule on `n > λ_max + M` points, which is
/// exact for the trigonometric polynomial `f·D*_M`; frequencies above
/// `λ_max` contribute nothing, so `M` is clipped to `λ_max` first.
pub fn sine_inner_count(set: &FrequencySet, m: KernelOrder) -> Result<(usize, f64)> {
    let count = set.count_up_to(m.get());
    let m_eff = m.get().min(set.max());
    let n = next_pow2(set.max() + m_eff + 1);
    if n > MAX_INNER_GRID {
        return Err(Error::resource(format!(
            "inner product grid of {n} points exceeds 2^25"
        )));
    }
    let n = n as usize;
    let (f, _) = fft_samples(&set.weighted(), SumKind::Sine, n, 0..n, false);
    let kernel: Vec<(f64, f64)> = (1..=m_eff).map(|j| (j as f64, 1.0)).collect();
    let (d, _) = fft_samples(&kernel, SumKind::Sine, n, 0..n, false);
    let dot = f.iter().zip(&d).map(|(a, b)| a * b).collect::<CompensatedSum>().value();
    Ok((count, 2.0 * dot / n as f64))
}

/// Upper end of the L¹ norm used in count bounds.
pub fn l1_upper(m: KernelOrder, quad_tol: f64) -> Result<f64> {
    Ok(l1_enclosure(m, quad_tol)?.upper)
}

/// `m1_value · ‖D*_M‖` (upper end), bounding `#{λ_j ≤ M}` for every set with
/// `M₁ ≤ m1_value`.
pub fn density_upper_bound(m1_value: f64, m: KernelOrder, quad_tol: f64) -> Result<f64> {
    if !(m1_value >= 0.0 && m1_value.is_finite()) {
        return Err(Error::domain("m1 value must be finite and non-negative"));
    }
    if m1_value == 0.0 {
        return Ok(0.0);
    }
    Ok(m1_value * l1_upper(m, quad_tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CutoffOutcome {
    /// Smallest `M` whose bound reaches the count.
    Found { m: u64, bound: f64 },
    /// Even `M = 2^31` falls short; the true cutoff is larger.
    Exceeds { last_m: u64, last_bound: f64 },
}

impl CutoffOutcome {
    /// `M` itself, or `2^31` as a lower bound when exceeded.
    pub fn m_lower_bound(&self) -> u64 {
        match *self {
            CutoffOutcome::Found { m, .. } => m,
            CutoffOutcome::Exceeds { last_m, .. } => last_m,
        }
    }
}

/// Smallest `M` with `density_upper_bound(m1_value, M) ≥ n`, by doubling then
/// bisection. Any set of `n` frequencies with `M₁ ≤ m1_value` has
/// `λ_N ≥ M`.
pub fn min_cutoff_for_count(n: u64, m1_value: f64, quad_tol: f64) -> Result<CutoffOutcome> {
    if n == 0 {
        return Err(Error::domain("count must be positive"));
    }
    if !(m1_value > 0.0 && m1_value.is_finite()) {
        return Err(Error::domain("m1 value must be positive and finite"));
    }
    let target = n as f64;
    let bound = |m: u64| density_upper_bound(m1_value, KernelOrder(m), quad_tol);

    let mut hi = 1u64;
    let mut hi_bound = bound(1)?;
    if hi_bound >= target {
        return Ok(CutoffOutcome::Found { m: 1, bound: hi_bound });
    }
    let mut lo;
    loop {
        lo = hi;
        if hi == MAX_KERNEL_ORDER {
            return Ok(CutoffOutcome::Exceeds { last_m: hi, last_bound: hi_bound });
        }
        hi = (hi * 2).min(MAX_KERNEL_ORDER);
        hi_bound = bound(hi)?;
        if hi_bound >= target {
            break;
        }
    }
    // bound(lo) < target ≤ bound(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let b = bound(mid)?;
        if b >= target {
            hi = mid;
            hi_bound = b;
        } else {
            lo = mid;
        }
    }
    Ok(CutoffOutcome::Found { m: hi, bound: hi_bound })
}

/// One row of a density sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub m: KernelOrder,
    pub l1_norm: f64,
    pub l1_upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count_exact: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m1_used: Option<f64>,
}

/// Norm at `m` and, given a set and an `M₁` bound, the count against its bound.
pub fn density_report(
    set: Option<&FrequencySet>,
    m1_used: Option<f64>,
    m: KernelOrder,
    quad_tol: f64,
) -> Result<DensityReport> {
    let enc = l1_enclosure(m, quad_tol)?;
    let l1_norm = enc.midpoint();
    let count_bound = m1_used.map(|v| density_upper_bound(v, m, quad_tol)).transpose()?;
    Ok(DensityReport {
        m,
        l1_norm,
        l1_upper: enc.upper,
        count_exact: set.map(|s| s.count_up_to(m.get())),
        count_bound,
        m1_used,
    })
}

/// Least-squares fit `y ≈ a·ln m + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
}

pub fn fit_log_growth(points: &[(u64, f64)]) -> Result<LogFit> {
    if points.len() < 2 {
        return Err(Error::domain("fit needs at least two points"));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("fit needs at least two distinct orders"));
    }
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(points).map(|(x, p)| (p.1 - a * x - b).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LogFit { a, b, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(m: u64) -> KernelOrder {
        KernelOrder::new(m).unwrap()
    }

    fn direct(m: u64, x: f64) -> f64 {
        (1..=m).map(|j| (j as f64 * x).sin()).sum()
    }

    #[test]
    fn kernel_values() {
        for x in [0.1, 1.0, 3.0] {
            assert!((conj_dirichlet_eval(k(1), x) - x.sin()).abs() < 1e-15);
        }
        assert_eq!(conj_dirichlet_eval(k(7), 0.0), 0.0);
        assert_eq!(conj_dirichlet_eval(k(1 << 31), 0.0), 0.0);
        assert!((conj_dirichlet_eval(k(10), 0.3) - direct(10, 0.3)).abs() < 1e-12);
        // near-zero branch and its neighbourhood
        for x in [1e-7, 2.1e-6, -3e-7, TAU - 1e-7] {
            assert!((conj_dirichlet_eval(k(1000), x) - direct(1000, x)).abs() < 1e-9 * 1000.0);
        }
        assert!(conj_dirichlet_eval(k(3), f64::NAN).is_nan());
        assert!(KernelOrder::new(0).is_err() && KernelOrder::new((1 << 31) + 1).is_err());
    }

    #[test]
    fn l1_oracle_values() {
        // (2/π)∫₀^π|D*_M| from the exact antiderivative, 50-digit arithmetic
        let cases = [
            (1, 1.273_239_544_735_162_7),
            (2, 1.591_549_430_918_953_4),
            (3, 1.803_756_021_708_147_1),
            (10, 2.501_258_875_480_723_4),
        ];
        for (m, v) in cases {
            let got = conj_dirichlet_l1(k(m), 1e-10).unwrap();
            assert!((got - v).abs() < 1e-9, "m = {m}: {got} vs {v}");
        }
        let big = conj_dirichlet_l1(k(1 << 16), 1e-9).unwrap();
        assert!((big - 8.064_430_739_458_588).abs() < 1e-8, "{big}");
    }

    #[test]
    fn enclosure_brackets_known_norms() {
        for (m, v) in [(1u64 << 20, 9.829_510_987_229_856), (1 << 22, 10.712_053_160_143_165)] {
            let e = l1_enclosure(k(m), 1e-9).unwrap();
            assert!(e.lower <= v && v <= e.upper, "m = {m}: {e:?}");
            assert!(e.width() < 2e-4);
        }
        let e = l1_enclosure(k(100), 1e-9).unwrap();
        assert!(e.width() <= 2e-9 + 1e-15);
    }

    #[test]
    fn inner_count_examples() {
        let s = FrequencySet::new(vec![3, 10]).unwrap();
        let (c, v) = sine_inner_count(&s, k(5)).unwrap();
        assert_eq!(c, 1);
        assert!((v - 1.0).abs() < 1e-9);
        let (c, v) = sine_inner_count(&s, k(2)).unwrap();
        assert_eq!(c, 0);
        assert!(v.abs() < 1e-9);
        let d = FrequencySet::new(vec![7, 10, 11, 13, 17, 23, 24, 30, 34, 41]).unwrap();
        let (c, v) = sine_inner_count(&d, k(20)).unwrap();
        assert_eq!(c, 5);
        assert!((v - 5.0).abs() < 1e-9);
        let (c, v) = sine_inner_count(&d, k(1 << 31)).unwrap();
        assert_eq!(c, 10);
        assert!((v - 10.0).abs() < 1e-9);
    }

    #[test]
    fn upper_bound_examples() {
        assert_eq!(density_upper_bound(0.0, k(50), 1e-9).unwrap(), 0.0);
        let b = density_upper_bound(1.0, k(1), 1e-9).unwrap();
        assert!((b - 4.0 / PI).abs() < 2e-9 && b >= 1.0);
        assert!(density_upper_bound(-1.0, k(1), 1e-9).is_err());
    }

    #[test]
    fn cutoff_search() {
        assert_eq!(
            min_cutoff_for_count(1, 100.0, 1e-9).unwrap().m_lower_bound(),
            1
        );
        let m1 = 100f64.powf(2.0 / 3.0);
        match min_cutoff_for_count(100, m1, 1e-9).unwrap() {
            CutoffOutcome::Found { m, bound } => {
                assert!(bound >= 100.0);
                assert!(density_upper_bound(m1, k(m - 1), 1e-9).unwrap() < 100.0);
                // l1(M) ≈ (2/π)ln M + 1.004 crosses 100/m1 ≈ 4.64 near ln M ≈ 5.7
                assert!(((m as f64).ln() - 5.71).abs() < 0.1, "m = {m}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            min_cutoff_for_count(1_000_000, 1.0, 1e-9).unwrap(),
            CutoffOutcome::Exceeds { last_m, .. } if last_m == 1 << 31
        ));
    }

    #[test]
    fn log_fit() {
        let pts: Vec<(u64, f64)> = (1..6).map(|i| (1u64 << i, 2.0 * ((1u64 << i) as f64).ln() + 1.0)).collect();
        let f = fit_log_growth(&pts).unwrap();
        assert!((f.a - 2.0).abs() < 1e-12 && (f.b - 1.0).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        assert!(fit_log_growth(&[(4, 1.0)]).is_err());
    }
}
