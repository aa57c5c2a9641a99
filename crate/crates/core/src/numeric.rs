//! Error-free transforms, compensated accumulation and extended-precision
//! argument reduction for `sin(λx)` / `cos(λx)` with large integer `λ`.

/// 2π split into three doubles; the sum carries ~159 significant bits.
const TAU_HI: f64 = std::f64::consts::TAU;
const TAU_MID: f64 = 2.449_293_598_294_706_4e-16;
const TAU_LO: f64 = -5.989_539_619_436_679e-33;

/// Largest `|x|` accepted by the reduction. With `λ ≤ 2^46` the quotient stays
/// below 2^86, where the triple-double 2π still leaves ~2^-70 absolute error.
pub const MAX_ABS_ARGUMENT: f64 = (1u64 << 40) as f64;

#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.comp += e;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Reduces `lambda * x` modulo 2π and returns the remainder as an unevaluated
/// sum `hi + lo` with `|hi| ≲ π`.
///
/// `lambda` must be an integer-valued double (exact up to 2^53) and `|x|` at
/// most [`MAX_ABS_ARGUMENT`]; callers validate both.
#[inline]
pub fn reduce_angle(lambda: f64, x: f64) -> (f64, f64) {
    let (p, e) = two_prod(lambda, x);
    let k = (p / TAU_HI).round();
    if k == 0.0 {
        return fast_two_sum_checked(p, e);
    }
    let (t1, t1e) = two_prod(k, TAU_HI);
    let (t2, t2e) = two_prod(k, TAU_MID);
    let t3 = k * TAU_LO;

    let (mut hi, mut lo) = two_sum(p, -t1);
    for term in [e, -t1e, -t2, -t2e, -t3] {
        let (s, err) = two_sum(hi, term);
        hi = s;
        lo += err;
    }
    fast_two_sum_checked(hi, lo)
}

#[inline]
fn fast_two_sum_checked(a: f64, b: f64) -> (f64, f64) {
    if a.abs() >= b.abs() {
        fast_two_sum(a, b)
    } else {
        fast_two_sum(b, a)
    }
}

/// `(sin(λx), cos(λx))` through [`reduce_angle`].
#[inline]
pub fn sin_cos_scaled(lambda: f64, x: f64) -> (f64, f64) {
    let (hi, lo) = reduce_angle(lambda, x);
    let (s, c) = hi.sin_cos();
    (s + c * lo, c - s * lo)
}

/// Smallest power of two `>= n` (n ≥ 1).
pub(crate) fn next_pow2(n: u64) -> u64 {
    n.max(1).next_power_of_two()
}
