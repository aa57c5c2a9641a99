//! Adaptive Gauss–Kronrod (7, 15) quadrature with an evaluation budget.

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and `|K − G|` on `[a, b]`.
pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Evaluation counter shared across several integrals.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Budget {
    pub(crate) remaining: u64,
}

impl Budget {
    pub(crate) fn new(evals: u64) -> Self {
        Self { remaining: evals }
    }

    fn take(&mut self, n: u64) -> Result<()> {
        if self.remaining < n {
            return Err(Error::resource("quadrature evaluation budget exhausted"));
        }
        self.remaining -= n;
        Ok(())
    }
}

/// `∫_a^b f` to absolute tolerance `tol` by interval bisection.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, budget: &mut Budget) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut acc = CompensatedSum::new();
    let mut stack = vec![(a, b, tol)];
    while let Some((lo, hi, t)) = stack.pop() {
        budget.take(15)?;
        let (v, err) = gk15(f, lo, hi);
        let mid = 0.5 * (lo + hi);
        if err <= t || mid <= lo || mid >= hi {
            acc.add(v);
        } else {
            stack.push((mid, hi, 0.5 * t));
            stack.push((lo, mid, 0.5 * t));
        }
    }
    Ok(acc.value())
}

/// Sum of integrals over consecutive panels `[p_i, p_{i+1}]`, each to
/// `tol · len / total`.
pub(crate) fn integrate_panels<F: Fn(f64) -> f64>(
    f: &F,
    breaks: &[f64],
    tol: f64,
    budget: &mut Budget,
) -> Result<f64> {
    let total = breaks.last().unwrap() - breaks[0];
    let mut acc = CompensatedSum::new();
    for w in breaks.windows(2) {
        acc.add(integrate(f, w[0], w[1], tol * (w[1] - w[0]) / total, budget)?);
    }
    Ok(acc.value())
}
