//! ±1 perturbation of a frequency set.
//!
//! For `x` in `[π/4, π/2]`, angle addition gives
//! `Σ sin((λ_j+ε_j)x) = cos x·Σ sin λ_j x + sin x·Σ ε_j cos λ_j x`,
//! and for `x` in `[2π/3, 5π/6]`,
//! `Σ cos((λ_j+ε_j)x) = cos x·Σ cos λ_j x − sin x·Σ ε_j sin λ_j x`.
//! Picking `ε_j` as the sign of the second sum's terms at a point `x₀` where
//! the rectified sum is large makes the perturbed extremum of order `N`
//! whenever the original one is small.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{check_argument, grid_accumulate, value_at};
use crate::extremum::{m1, m2, ExtremumCertificate, ExtremumOptions};
use crate::freqset::{FrequencySet, PerturbedSet, Spectrum, SumKind};
use crate::numeric::{sin_cos_scaled, CompensatedSum};
use crate::quadrature::{integrate_panels, Budget};

/// Default number of window samples for [`select_x0`].
pub const DEFAULT_X0_BUDGET: u64 = 1 << 16;

/// Frequencies at or below this get a warning: the window averages are only
/// shown to exceed 1/2 from 11 on.
pub const SMALL_FREQUENCY: u64 = 10;

/// Work size (`terms × samples`) below which the window scan reduces every
/// argument directly instead of rotating phasors.
const DIRECT_SCAN_WORK: usize = 1 << 20;

/// `ε ∈ {−1, +1}^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector {
    eps: Vec<i8>,
}

impl TryFrom<Vec<i8>> for SignVector {
    type Error = Error;

    fn try_from(eps: Vec<i8>) -> Result<Self> {
        SignVector::new(eps)
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(v: SignVector) -> Self {
        v.eps
    }
}

impl SignVector {
    pub fn new(eps: Vec<i8>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::domain("sign vector must be nonempty"));
        }
        if let Some(i) = eps.iter().position(|&e| e != 1 && e != -1) {
            return Err(Error::domain(format!("sign {} at index {i} is not ±1", eps[i])));
        }
        Ok(Self { eps })
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.eps
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationCase {
    /// Perturb to raise `M₁`; `x₀ ∈ [π/4, π/2]`, signs from `cos λ_j x₀`.
    #[serde(rename = "sine")]
    SineCase,
    /// Perturb to raise `M₂`; `x₀ ∈ [2π/3, 5π/6]`, signs from `sin λ_j x₀`.
    #[serde(rename = "cosine")]
    CosineCase,
}

impl PerturbationCase {
    pub fn window(self) -> (f64, f64) {
        match self {
            PerturbationCase::SineCase => (FRAC_PI_4, FRAC_PI_2),
            PerturbationCase::CosineCase => (4.0 * PI / 6.0, 5.0 * PI / 6.0),
        }
    }

    pub fn sum_kind(self) -> SumKind {
        match self {
            PerturbationCase::SineCase => SumKind::Sine,
            PerturbationCase::CosineCase => SumKind::Cosine,
        }
    }

    /// `sin x` lower bound on the window: `2^{-1/2}` or `1/2`.
    pub fn sin_floor(self) -> f64 {
        match self {
            PerturbationCase::SineCase => std::f64::consts::FRAC_1_SQRT_2,
            PerturbationCase::CosineCase => 0.5,
        }
    }

    /// The trigonometric factor whose sign defines `ε` (`cos` or `sin` of `λx`).
    #[inline]
    fn pick(self, s: f64, c: f64) -> f64 {
        match self {
            PerturbationCase::SineCase => c,
            PerturbationCase::CosineCase => s,
        }
    }

    fn contains(self, x: f64) -> bool {
        let (a, b) = self.window();
        (a..=b).contains(&x)
    }
}

/// `Σ|cos λ_j x|` (sine case) or `Σ|sin λ_j x|` (cosine case).
pub fn rectified_sum(set: &FrequencySet, x: f64, case: PerturbationCase) -> Result<f64> {
    check_argument(x)?;
    Ok(set
        .iter()
        .map(|l| {
            let (s, c) = sin_cos_scaled(l as f64, x);
            case.pick(s, c).abs()
        })
        .collect::<CompensatedSum>()
        .value())
}

/// Best window point of the rectified sum over `min(budget, 16·λ_max)`
/// uniform samples. Ties go to the smallest `x`.
pub fn select_x0(set: &FrequencySet, case: PerturbationCase, budget: u64) -> Result<f64> {
    if budget < 1024 {
        return Err(Error::domain(format!("x0 budget {budget} below 1024")));
    }
    let n = budget.min(16 * set.max()).max(2) as usize;
    let samples = window_scan(set, case, n);
    let (a, b) = case.window();
    let step = (b - a) / (n - 1) as f64;
    let mut best = 0;
    for (i, &v) in samples.iter().enumerate() {
        if v > samples[best] {
            best = i;
        }
    }
    Ok(if best == n - 1 { b } else { a + best as f64 * step })
}

/// Rectified sum on `n` uniform samples of the case window.
fn window_scan(set: &FrequencySet, case: PerturbationCase, n: usize) -> Vec<f64> {
    let (a, b) = case.window();
    let step = (b - a) / (n - 1) as f64;
    let point = |i: usize| if i == n - 1 { b } else { a + i as f64 * step };
    if set.len().saturating_mul(n) <= DIRECT_SCAN_WORK {
        return (0..n).map(|i| rectified_sum(set, point(i), case).unwrap()).collect();
    }
    grid_accumulate(&set.weighted(), a, step, n, |_, m, s, c| m * case.pick(s, c).abs())
}

/// Window mean of the rectified sum on the same grid [`select_x0`] uses.
pub fn window_grid_mean(set: &FrequencySet, case: PerturbationCase, budget: u64) -> f64 {
    let n = budget.min(16 * set.max()).max(2) as usize;
    let v = window_scan(set, case, n);
    v.iter().copied().collect::<CompensatedSum>().value() / n as f64
}

/// Mean of `|cos λx|` over `[π/4, π/2]` (sine case) or of `|sin λx|` over
/// `[2π/3, 5π/6]` (cosine case), by quadrature between consecutive zeros.
/// Tends to `2/π` and stays within `1/λ` of it.
pub fn rectified_average(lambda: u64, case: PerturbationCase) -> f64 {
    let (a, b) = case.window();
    let l = lambda as f64;
    let f = |x: f64| {
        let (s, c) = sin_cos_scaled(l, x);
        case.pick(s, c).abs()
    };
    // zeros of cos(λx) at (k + ½)π/λ, of sin(λx) at kπ/λ
    let offset = match case {
        PerturbationCase::SineCase => 0.5,
        PerturbationCase::CosineCase => 0.0,
    };
    let zero = |k: f64| (k + offset) * PI / l;
    let k_first = (a * l / PI - offset).floor() + 1.0;
    let k_last = (b * l / PI - offset).ceil() - 1.0;
    let interior = (k_last - k_first + 1.0).max(0.0);

    const MAX_PANELS: f64 = (1u64 << 22) as f64;
    let integral = if interior <= MAX_PANELS {
        let mut breaks = Vec::with_capacity(interior as usize + 2);
        breaks.push(a);
        let mut k = k_first;
        while k <= k_last {
            let z = zero(k);
            if z > a && z < b {
                breaks.push(z);
            }
            k += 1.0;
        }
        breaks.push(b);
        let mut budget = Budget::new(u64::MAX);
        integrate_panels(&f, &breaks, 1e-10 * (b - a), &mut budget).unwrap()
    } else {
        // every full half-period contributes exactly 2/λ
        let mut budget = Budget::new(u64::MAX);
        let head = integrate_panels(&f, &[a, zero(k_first)], 1e-11, &mut budget).unwrap();
        let tail = integrate_panels(&f, &[zero(k_last), b], 1e-11, &mut budget).unwrap();
        head + tail + (interior - 1.0) * 2.0 / l
    };
    integral / (b - a)
}

/// `ε_j = sgn(cos λ_j x₀)` (sine case) or `sgn(sin λ_j x₀)` (cosine case),
/// with `sgn(0) = +1`.
pub fn choose_signs(set: &FrequencySet, x0: f64, case: PerturbationCase) -> Result<SignVector> {
    if !case.contains(x0) {
        let (a, b) = case.window();
        return Err(Error::domain(format!("x0 = {x0} outside window [{a}, {b}]")));
    }
    let eps = set
        .iter()
        .map(|l| {
            let (s, c) = sin_cos_scaled(l as f64, x0);
            if case.pick(s, c) >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    SignVector::new(eps)
}

/// The multiset `{λ_j + ε_j}`.
pub fn apply_perturbation(set: &FrequencySet, eps: &SignVector) -> Result<PerturbedSet> {
    if set.len() != eps.len() {
        return Err(Error::domain(format!(
            "{} signs for {} frequencies",
            eps.len(),
            set.len()
        )));
    }
    let values = set
        .iter()
        .zip(eps.as_slice())
        .map(|(l, &e)| {
            if e < 0 && l == 1 {
                Err(Error::domain("perturbed frequency 1 − 1 = 0 is not positive"))
            } else {
                Ok(if e > 0 { l + 1 } else { l - 1 })
            }
        })
        .collect::<Result<Vec<u64>>>()?;
    PerturbedSet::from_values(values)
}

/// Everything computed by [`run_theorem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub case: PerturbationCase,
    pub n: usize,
    pub x0: f64,
    pub eps: SignVector,
    /// Rectified sum at `x₀`.
    pub rectified_sum: f64,
    /// `cos x₀ · (original sum at x₀)`.
    #[serde(rename = "term_I")]
    pub term_i: f64,
    /// `Σ ε_j cos λ_j x₀` (sine case) or `Σ ε_j sin λ_j x₀` (cosine case).
    #[serde(rename = "term_II")]
    pub term_ii: f64,
    /// Perturbed sum at `x₀`; equals `term_I ± sin x₀·term_II`.
    pub perturbed_value_at_x0: f64,
    pub original_extremum: ExtremumCertificate,
    pub perturbed_extremum: ExtremumCertificate,
    /// `perturbed_extremum.value / N`.
    pub c_empirical: f64,
    pub collisions: Vec<(u64, u32)>,
    pub perturbed: PerturbedSet,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl PerturbationReport {
    /// `term_I + sin x₀·term_II` or `term_I − sin x₀·term_II`.
    pub fn decomposition(&self) -> f64 {
        match self.case {
            PerturbationCase::SineCase => self.term_i + self.x0.sin() * self.term_ii,
            PerturbationCase::CosineCase => self.term_i - self.x0.sin() * self.term_ii,
        }
    }

    /// `sin x₀·term_II − |term_I|`, a lower bound on the perturbed extremum.
    pub fn chain_lower_bound(&self) -> f64 {
        self.x0.sin() * self.term_ii - self.term_i.abs()
    }
}

/// Runs the whole pipeline with signs chosen at the best window point.
pub fn run_theorem(set: &FrequencySet, case: PerturbationCase, opts: &ExtremumOptions) -> Result<PerturbationReport> {
    let x0 = select_x0(set, case, DEFAULT_X0_BUDGET)?;
    let eps = choose_signs(set, x0, case)?;
    report(set, case, x0, eps, opts)
}

/// Like [`run_theorem`] but with caller-supplied signs; `x₀` is still the
/// best window point of the rectified sum.
pub fn run_theorem_with_signs(
    set: &FrequencySet,
    case: PerturbationCase,
    eps: SignVector,
    opts: &ExtremumOptions,
) -> Result<PerturbationReport> {
    let x0 = select_x0(set, case, DEFAULT_X0_BUDGET)?;
    report(set, case, x0, eps, opts)
}

fn report(
    set: &FrequencySet,
    case: PerturbationCase,
    x0: f64,
    eps: SignVector,
    opts: &ExtremumOptions,
) -> Result<PerturbationReport> {
    let perturbed = apply_perturbation(set, &eps)?;
    let kind = case.sum_kind();
    let original_at_x0 = value_at(&set.weighted(), kind, x0);
    let term_i = x0.cos() * original_at_x0;
    let term_ii = set
        .iter()
        .zip(eps.as_slice())
        .map(|(l, &e)| {
            let (s, c) = sin_cos_scaled(l as f64, x0);
            e as f64 * case.pick(s, c)
        })
        .collect::<CompensatedSum>()
        .value();
    let perturbed_value_at_x0 = value_at(&perturbed.weighted(), kind, x0);

    let original_extremum = match case {
        PerturbationCase::SineCase => m1(set, opts)?,
        PerturbationCase::CosineCase => m2(set, opts)?,
    };
    let seeded = ExtremumOptions {
        seeds: vec![x0],
        ..opts.clone()
    };
    let perturbed_extremum = match case {
        PerturbationCase::SineCase => m1(&perturbed, &seeded)?,
        PerturbationCase::CosineCase => m2(&perturbed, &seeded)?,
    };

    let mut warnings = Vec::new();
    if set.min() <= SMALL_FREQUENCY {
        warnings.push(format!(
            "{} frequencies are ≤ {SMALL_FREQUENCY}; the window-average constant is not certified for them",
            set.count_up_to(SMALL_FREQUENCY)
        ));
    }

    Ok(PerturbationReport {
        case,
        n: set.len(),
        x0,
        rectified_sum: rectified_sum(set, x0, case)?,
        term_i,
        term_ii,
        perturbed_value_at_x0,
        original_extremum,
        c_empirical: perturbed_extremum.value / set.len() as f64,
        perturbed_extremum,
        collisions: perturbed.collisions(),
        perturbed,
        eps,
        warnings,
    })
}
