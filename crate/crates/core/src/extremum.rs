//! Certified global extrema of trigonometric sums on an interval.
//!
//! The search is a branch-and-bound over brackets. A bracket `[lo, hi]` carries
//! the value and derivative at both ends; the cubic Hermite interpolant of that
//! data differs from the sum by at most `Σ m λ⁴ · len⁴ / 384`, so the extreme
//! of the cubic plus that remainder bounds the sum on the bracket. A bracket is
//! discarded once its bound is within `tol` of the best attained value, and the
//! largest discarded bound becomes the certified upper bound.
//!
//! The opening grid is `max(2^12, 8·λ_max)` points over `[0, 2π)`, rounded up
//! to a power of two and sampled by FFT for larger sets.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{fft_error_bound, fft_samples, lipschitz_bound, moment_upper, value_and_derivative_at};
use crate::freqset::{Spectrum, SumKind};
use crate::numeric::next_pow2;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_BUDGET: u64 = 1 << 28;

/// Sets at least this large are sampled by FFT on the opening grid.
const FFT_MIN_TERMS: usize = 32;

/// Result of a certified search: `value ≤ sup ≤ certified_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCertificate")]
pub struct ExtremumCertificate {
    /// Location where `value` is attained.
    pub x_star: f64,
    /// Attained objective value, a lower bound on the supremum.
    pub value: f64,
    /// Upper bound on the supremum over the whole interval.
    pub certified_bound: f64,
    pub tol: f64,
    /// Exact `Σ m_j·λ_j`.
    pub lipschitz: u64,
}

#[derive(Deserialize)]
struct RawCertificate {
    x_star: f64,
    value: f64,
    certified_bound: f64,
    tol: f64,
    lipschitz: u64,
}

impl TryFrom<RawCertificate> for ExtremumCertificate {
    type Error = Error;

    fn try_from(r: RawCertificate) -> Result<Self> {
        if ![r.x_star, r.value, r.certified_bound, r.tol].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("certificate fields must be finite"));
        }
        if r.tol <= 0.0 {
            return Err(Error::domain("certificate tolerance must be positive"));
        }
        if r.certified_bound < r.value {
            return Err(Error::domain("certified bound below attained value"));
        }
        Ok(ExtremumCertificate {
            x_star: r.x_star,
            value: r.value,
            certified_bound: r.certified_bound,
            tol: r.tol,
            lipschitz: r.lipschitz,
        })
    }
}

impl ExtremumCertificate {
    /// `certified_bound − value ≤ tol`.
    pub fn is_tight(&self) -> bool {
        self.certified_bound - self.value <= self.tol
    }
}

/// Quantity being maximised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// `|f(x)|`
    Abs,
    /// `−f(x)`, so the supremum is minus the minimum.
    Negated,
}

impl Objective {
    #[inline]
    fn apply(self, f: f64) -> f64 {
        match self {
            Objective::Abs => f.abs(),
            Objective::Negated => -f,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremumOptions {
    pub tol: f64,
    /// Total point evaluations allowed, opening grid included.
    pub budget: u64,
    /// Extra points evaluated up front; the reported value is at least the
    /// objective at each of them.
    pub seeds: Vec<f64>,
}

impl Default for ExtremumOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            budget: DEFAULT_BUDGET,
            seeds: Vec::new(),
        }
    }
}

impl ExtremumOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy)]
struct Bracket {
    lo: f64,
    hi: f64,
    f_lo: f64,
    d_lo: f64,
    f_hi: f64,
    d_hi: f64,
}

/// Range `(min, max)` of the cubic Hermite interpolant on `[0, len]`.
fn hermite_range(f0: f64, d0: f64, f1: f64, d1: f64, len: f64) -> (f64, f64) {
    let a0 = f0;
    let a1 = len * d0;
    let a2 = 3.0 * (f1 - f0) - len * (2.0 * d0 + d1);
    let a3 = 2.0 * (f0 - f1) + len * (d0 + d1);
    let h = |s: f64| a0 + s * (a1 + s * (a2 + s * a3));

    let mut lo = f0.min(f1);
    let mut hi = f0.max(f1);
    let mut consider = |s: f64| {
        if s > 0.0 && s < 1.0 {
            let v = h(s);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    };
    // H'(s) = 3a3 s² + 2a2 s + a1
    let (qa, qb, qc) = (3.0 * a3, 2.0 * a2, a1);
    if qa == 0.0 {
        if qb != 0.0 {
            consider(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            if q != 0.0 {
                consider(q / qa);
                consider(qc / q);
            } else {
                consider(0.0);
            }
        }
    }
    (lo, hi)
}

struct Search<'a> {
    terms: &'a [(f64, f64)],
    kind: SumKind,
    objective: Objective,
    c4: f64,
    f_slack: f64,
    d_slack: f64,
    tol: f64,
    budget: u64,
    evals: u64,
    best_x: f64,
    best: f64,
    pruned_max: f64,
    lipschitz: u64,
}

impl Search<'_> {
    fn eval(&mut self, x: f64) -> (f64, f64) {
        self.evals += 1;
        let (f, d) = value_and_derivative_at(self.terms, self.kind, x);
        self.offer(x, f);
        (f, d)
    }

    fn offer(&mut self, x: f64, f: f64) {
        let g = self.objective.apply(f);
        if g > self.best {
            self.best = g;
            self.best_x = x;
        }
    }

    fn bound(&self, br: &Bracket, f_slack: f64, d_slack: f64) -> f64 {
        let len = br.hi - br.lo;
        let (hmin, hmax) = hermite_range(br.f_lo, br.d_lo, br.f_hi, br.d_hi, len);
        let scale = br.f_lo.abs() + br.f_hi.abs() + len * (br.d_lo.abs() + br.d_hi.abs());
        let rem = self.c4 * len.powi(4) / 384.0 + f_slack + 0.25 * len * d_slack + 1e-15 * scale;
        match self.objective {
            Objective::Abs => hmax.max(-hmin) + rem,
            Objective::Negated => -hmin + rem,
        }
    }

    fn certificate(&self, extra_bound: f64) -> ExtremumCertificate {
        ExtremumCertificate {
            x_star: self.best_x,
            value: self.best,
            certified_bound: self.best.max(self.pruned_max).max(extra_bound),
            tol: self.tol,
            lipschitz: self.lipschitz,
        }
    }

    fn exhausted(&self, live: &[Bracket], why: &str) -> Error {
        let open = live
            .iter()
            .map(|b| self.bound(b, self.f_slack, self.d_slack))
            .fold(f64::NEG_INFINITY, f64::max);
        Error::Budget {
            message: format!("{why} after {} evaluations", self.evals),
            partial: Box::new(self.certificate(open)),
        }
    }
}

/// Certified supremum of `objective(f)` over `[a, b] ⊆ [0, 2π]`.
pub fn certified_sup<S: Spectrum>(
    set: &S,
    kind: SumKind,
    objective: Objective,
    interval: (f64, f64),
    opts: &ExtremumOptions,
) -> Result<ExtremumCertificate> {
    let (a, b) = interval;
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::domain("tolerance must be positive and finite"));
    }
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b > TAU || a > b {
        return Err(Error::domain(format!("interval [{a}, {b}] not inside [0, 2π]")));
    }
    let terms = set.weighted();
    let total = set.total() as f64;
    let lipschitz = lipschitz_bound(set)?;
    let mut s = Search {
        terms: &terms,
        kind,
        objective,
        c4: moment_upper(&terms, 4),
        f_slack: 1e-15 * total,
        d_slack: 1e-15 * lipschitz as f64,
        tol: opts.tol,
        budget: opts.budget,
        evals: 0,
        best_x: a,
        best: f64::NEG_INFINITY,
        pruned_max: f64::NEG_INFINITY,
        lipschitz,
    };

    let (fa, da) = s.eval(a);
    let (fb, db) = s.eval(b);
    for &x in &opts.seeds {
        if x.is_finite() && (a..=b).contains(&x) {
            s.eval(x);
        }
    }

    let n0 = next_pow2(4096.max(8 * set.max_frequency()));
    if n0 > opts.budget {
        let mut partial = s.certificate(total);
        partial.certified_bound = partial.certified_bound.max(total);
        return Err(Error::Budget {
            message: format!("opening grid of {n0} points exceeds budget {}", opts.budget),
            partial: Box::new(partial),
        });
    }

    let live = opening_brackets(&mut s, n0 as usize, (a, fa, da), (b, fb, db));
    refine(&mut s, live)
}

/// Samples the opening grid, prunes what it can and returns the brackets that
/// need refinement, with exact endpoint data.
fn opening_brackets(
    s: &mut Search<'_>,
    n0: usize,
    (a, fa, da): (f64, f64, f64),
    (b, fb, db): (f64, f64, f64),
) -> Vec<Bracket> {
    let step = TAU / n0 as f64;
    let grid_x = |k: usize| k as f64 * step;
    let mut k_first = (a / step).ceil() as usize;
    while k_first < n0 && grid_x(k_first) <= a {
        k_first += 1;
    }
    let mut k_end = k_first;
    while k_end < n0 && grid_x(k_end) < b {
        k_end += 1;
    }
    if k_first >= k_end {
        return vec![Bracket { lo: a, hi: b, f_lo: fa, d_lo: da, f_hi: fb, d_hi: db }];
    }

    let (values, derivs, grid_f_slack, grid_d_slack, exact) = if s.terms.len() >= FFT_MIN_TERMS {
        let (v, d) = fft_samples(s.terms, s.kind, n0, k_first..k_end, true);
        let m2 = s.terms.iter().map(|t| t.1 * t.1).sum::<f64>().sqrt();
        let ml2 = s.terms.iter().map(|t| (t.1 * t.0).powi(2)).sum::<f64>().sqrt();
        // FFT values sit at the exact points 2πk/n0; points between those and
        // their rounded doubles are covered through the Lipschitz constant.
        let coordinate = s.lipschitz as f64 * 8.0 * f64::EPSILON * TAU;
        (
            v,
            d.unwrap(),
            s.f_slack + fft_error_bound(n0, m2) + coordinate,
            s.d_slack + fft_error_bound(n0, ml2),
            false,
        )
    } else {
        let mut v = Vec::with_capacity(k_end - k_first);
        let mut d = Vec::with_capacity(k_end - k_first);
        for k in k_first..k_end {
            let (f, fd) = value_and_derivative_at(s.terms, s.kind, grid_x(k));
            v.push(f);
            d.push(fd);
        }
        (v, d, s.f_slack, s.d_slack, true)
    };
    s.evals += (k_end - k_first) as u64;

    // best grid point, re-evaluated pointwise so `value` is always attained
    let (imax, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            let g = s.objective.apply(v);
            if g > bv {
                (i, g)
            } else {
                (bi, bv)
            }
        });
    if exact {
        s.offer(grid_x(k_first + imax), values[imax]);
    } else {
        s.eval(grid_x(k_first + imax));
    }

    // node i: 0 = a, 1..=m grid points, m+1 = b
    let m = values.len();
    let node = |i: usize| -> (f64, f64, f64, bool) {
        if i == 0 {
            (a, fa, da, true)
        } else if i == m + 1 {
            (b, fb, db, true)
        } else {
            (grid_x(k_first + i - 1), values[i - 1], derivs[i - 1], exact)
        }
    };

    let mut survivors: Vec<(usize, usize)> = Vec::new();
    for i in 0..=m {
        let (x0, f0, d0, e0) = node(i);
        let (x1, f1, d1, e1) = node(i + 1);
        let br = Bracket { lo: x0, hi: x1, f_lo: f0, d_lo: d0, f_hi: f1, d_hi: d1 };
        let (fs, ds) = if e0 && e1 {
            (s.f_slack, s.d_slack)
        } else {
            (grid_f_slack, grid_d_slack)
        };
        let bound = s.bound(&br, fs, ds);
        if bound <= s.best + s.tol {
            s.pruned_max = s.pruned_max.max(bound);
        } else {
            survivors.push((i, i + 1));
        }
    }

    let mut cache: Option<(usize, (f64, f64))> = None;
    let mut exact_node = |s: &mut Search<'_>, i: usize| -> (f64, f64, f64) {
        let (x, f, d, e) = node(i);
        if e {
            return (x, f, d);
        }
        if let Some((ci, fd)) = cache {
            if ci == i {
                return (x, fd.0, fd.1);
            }
        }
        let fd = s.eval(x);
        cache = Some((i, fd));
        (x, fd.0, fd.1)
    };
    survivors
        .into_iter()
        .map(|(i, j)| {
            let (lo, f_lo, d_lo) = exact_node(s, i);
            let (hi, f_hi, d_hi) = exact_node(s, j);
            Bracket { lo, hi, f_lo, d_lo, f_hi, d_hi }
        })
        .collect()
}

fn refine(s: &mut Search<'_>, mut live: Vec<Bracket>) -> Result<ExtremumCertificate> {
    while !live.is_empty() {
        let mut next = Vec::with_capacity(live.len() * 2);
        for (idx, br) in live.iter().enumerate() {
            let bound = s.bound(br, s.f_slack, s.d_slack);
            if bound <= s.best + s.tol {
                s.pruned_max = s.pruned_max.max(bound);
                continue;
            }
            let mid = br.lo + 0.5 * (br.hi - br.lo);
            if mid <= br.lo || mid >= br.hi {
                let mut open = next.clone();
                open.extend_from_slice(&live[idx..]);
                return Err(s.exhausted(&open, "tolerance below attainable resolution"));
            }
            if s.evals >= s.budget {
                let mut open = next.clone();
                open.extend_from_slice(&live[idx..]);
                return Err(s.exhausted(&open, "budget exhausted"));
            }
            let (fm, dm) = s.eval(mid);
            next.push(Bracket { hi: mid, f_hi: fm, d_hi: dm, ..*br });
            next.push(Bracket { lo: mid, f_lo: fm, d_lo: dm, ..*br });
        }
        live = next;
    }
    Ok(s.certificate(f64::NEG_INFINITY))
}

/// `sup_{[a,b]} |f|` with a certificate.
pub fn certified_max_abs<S: Spectrum>(
    set: &S,
    kind: SumKind,
    interval: (f64, f64),
    opts: &ExtremumOptions,
) -> Result<ExtremumCertificate> {
    certified_sup(set, kind, Objective::Abs, interval, opts)
}

/// `M₁ = max_{[0,2π]} |Σ sin λ_j x|`, searched on `[0, π]` since
/// `f(2π − x) = −f(x)`.
pub fn m1<S: Spectrum>(set: &S, opts: &ExtremumOptions) -> Result<ExtremumCertificate> {
    certified_sup(set, SumKind::Sine, Objective::Abs, (0.0, PI), opts)
}

/// `M₂ = −min_{[0,2π]} Σ cos λ_j x`, searched on `[0, π]` by evenness about π.
/// `value` and `certified_bound` are reported for `M₂` itself (sign flipped).
pub fn m2<S: Spectrum>(set: &S, opts: &ExtremumOptions) -> Result<ExtremumCertificate> {
    certified_sup(set, SumKind::Cosine, Objective::Negated, (0.0, PI), opts)
}

/// `√(N/2)`: the mean square of a sine sum with `N` distinct frequencies is
/// `N/2`, so `M₁ ≥ √(N/2)`.
pub fn parseval_floor(n: u64) -> f64 {
    (n as f64 / 2.0).sqrt()
}
