//! Frequency-set generators.

use std::collections::HashSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freqset::{FrequencySet, MAX_FREQUENCY};

/// Seed for the reproducible generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(s: u64) -> Self {
        Seed(s)
    }
}

/// Generation parameters recorded next to a generated set file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<u64>,
    pub lambda_max: u64,
}

/// Increasing non-negative integers whose positive differences are all distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidonSet {
    elems: Vec<u64>,
    p: Option<u64>,
}

impl SidonSet {
    /// Sorts `elems` and checks the Sidon property.
    pub fn new(mut elems: Vec<u64>, p: Option<u64>) -> Result<Self> {
        elems.sort_unstable();
        if !is_sidon(&elems) {
            return Err(Error::domain("not a Sidon set"));
        }
        Ok(Self { elems, p })
    }

    pub fn elems(&self) -> &[u64] {
        &self.elems
    }

    pub fn p(&self) -> Option<u64> {
        self.p
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn differences(&self) -> Result<FrequencySet> {
        difference_set(&self.elems)
    }
}

/// `{1, …, n}`.
pub fn consecutive(n: u64) -> Result<FrequencySet> {
    if n == 0 || n > MAX_FREQUENCY {
        return Err(Error::domain(format!("n = {n} outside [1, 2^46]")));
    }
    FrequencySet::new((1..=n).collect())
}

/// `n` distinct integers drawn uniformly from `[lambda_min, lambda_max]`.
pub fn random_set(n: usize, lambda_min: u64, lambda_max: u64, seed: Seed) -> Result<FrequencySet> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    if lambda_min == 0 || lambda_max > MAX_FREQUENCY || lambda_min > lambda_max {
        return Err(Error::domain(format!(
            "range [{lambda_min}, {lambda_max}] must satisfy 1 ≤ min ≤ max ≤ 2^46"
        )));
    }
    let width = lambda_max - lambda_min + 1;
    if width < n as u64 {
        return Err(Error::domain(format!(
            "range [{lambda_min}, {lambda_max}] holds fewer than {n} integers"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let mut freqs: Vec<u64> = index::sample(&mut rng, width as usize, n)
        .into_iter()
        .map(|i| lambda_min + i as u64)
        .collect();
    freqs.sort_unstable();
    FrequencySet::new(freqs)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `{2pj + (j² mod p) : 0 ≤ j < p}`.
pub fn erdos_turan_sidon(p: u64) -> Result<SidonSet> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if p >= 1 << 22 {
        return Err(Error::domain(format!("p = {p} too large: differences would exceed 2^46")));
    }
    let elems = (0..p).map(|j| 2 * p * j + (j * j) % p).collect();
    Ok(SidonSet { elems, p: Some(p) })
}

/// True when every positive difference occurs once. Repeated elements make a
/// zero difference and fail.
pub fn is_sidon(s: &[u64]) -> bool {
    let mut seen = HashSet::with_capacity(s.len() * s.len().saturating_sub(1) / 2);
    for (i, &a) in s.iter().enumerate() {
        for &b in &s[..i] {
            let d = a.abs_diff(b);
            if d == 0 || !seen.insert(d) {
                return false;
            }
        }
    }
    true
}

/// Positive differences of a Sidon set. For such a set
/// `Σ cos λ x = (|Σ_a e^{iax}|² − m)/2 ≥ −m/2`.
pub fn difference_set(s: &[u64]) -> Result<FrequencySet> {
    if s.len() < 2 {
        return Err(Error::domain("difference set needs at least two elements"));
    }
    let mut diffs = Vec::with_capacity(s.len() * (s.len() - 1) / 2);
    for (i, &a) in s.iter().enumerate() {
        for &b in &s[..i] {
            diffs.push(a.abs_diff(b));
        }
    }
    diffs.sort_unstable();
    if diffs[0] == 0 || diffs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("input is not a Sidon set: differences collide"));
    }
    FrequencySet::new(diffs)
}

/// `λ_j = round(e^{j^{1/3}})`, each bumped past its predecessor when needed.
pub fn rounded_exponential(n: u64) -> Result<FrequencySet> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let mut freqs = Vec::with_capacity(n as usize);
    let mut prev = 0u64;
    for j in 1..=n {
        let raw = (j as f64).cbrt().exp().round();
        if raw > MAX_FREQUENCY as f64 {
            return Err(Error::domain(format!("e^(j^(1/3)) exceeds 2^46 at j = {j}")));
        }
        let v = (raw as u64).max(prev + 1);
        if v > MAX_FREQUENCY {
            return Err(Error::domain(format!("bumped frequency exceeds 2^46 at j = {j}")));
        }
        freqs.push(v);
        prev = v;
    }
    FrequencySet::new(freqs)
}
