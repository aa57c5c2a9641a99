//! Frequency sets and perturbed multisets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible frequency. Keeps `λ` exact in a double and the
/// reduced argument accurate for every `|x| ≤ 2^40`.
pub const MAX_FREQUENCY: u64 = 1 << 46;

/// Which trigonometric sum to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    Sine,
    Cosine,
}

/// Anything that can be read as a list of `(frequency, multiplicity)` terms.
pub trait Spectrum {
    /// Number of distinct frequencies.
    fn distinct(&self) -> usize;

    /// The `i`-th term in increasing frequency order.
    fn term(&self, i: usize) -> (u64, u32);

    fn terms(&self) -> TermIter<'_, Self>
    where
        Self: Sized,
    {
        TermIter { spectrum: self, next: 0 }
    }

    /// Sum of multiplicities (the `N` of the sum).
    fn total(&self) -> u64 {
        (0..self.distinct()).map(|i| self.term(i).1 as u64).sum()
    }

    fn max_frequency(&self) -> u64 {
        match self.distinct() {
            0 => 0,
            d => self.term(d - 1).0,
        }
    }

    /// Terms as `(λ, multiplicity)` doubles, for the inner loops.
    fn weighted(&self) -> Vec<(f64, f64)> {
        (0..self.distinct())
            .map(|i| {
                let (l, m) = self.term(i);
                (l as f64, m as f64)
            })
            .collect()
    }
}

pub struct TermIter<'a, S: Spectrum> {
    spectrum: &'a S,
    next: usize,
}

impl<S: Spectrum> Iterator for TermIter<'_, S> {
    type Item = (u64, u32);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.spectrum.distinct() {
            return None;
        }
        let t = self.spectrum.term(self.next);
        self.next += 1;
        Some(t)
    }
}

/// Strictly increasing positive integer frequencies `λ₁ < … < λ_N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FreqList", into = "FreqList")]
pub struct FrequencySet {
    freqs: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct FreqList {
    freqs: Vec<u64>,
}

impl TryFrom<FreqList> for FrequencySet {
    type Error = Error;

    fn try_from(list: FreqList) -> Result<Self> {
        FrequencySet::new(list.freqs)
    }
}

impl From<FrequencySet> for FreqList {
    fn from(set: FrequencySet) -> Self {
        FreqList { freqs: set.freqs }
    }
}

impl FrequencySet {
    pub fn new(freqs: Vec<u64>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::domain("frequency set must be nonempty"));
        }
        if freqs[0] == 0 {
            return Err(Error::domain("frequencies must be positive"));
        }
        if let Some(w) = freqs.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!(
                "frequencies must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let last = *freqs.last().unwrap();
        if last > MAX_FREQUENCY {
            return Err(Error::domain(format!(
                "frequency {last} exceeds 2^46"
            )));
        }
        Ok(Self { freqs })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut freqs: Vec<u64>) -> Result<Self> {
        freqs.sort_unstable();
        freqs.dedup();
        Self::new(freqs)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> u64 {
        self.freqs[0]
    }

    pub fn max(&self) -> u64 {
        *self.freqs.last().unwrap()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.freqs.iter().copied()
    }

    /// `#{j : λ_j ≤ cutoff}`.
    pub fn count_up_to(&self, cutoff: u64) -> usize {
        self.freqs.partition_point(|&l| l <= cutoff)
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.freqs
    }
}

impl Spectrum for FrequencySet {
    fn distinct(&self) -> usize {
        self.freqs.len()
    }

    fn term(&self, i: usize) -> (u64, u32) {
        (self.freqs[i], 1)
    }

    fn total(&self) -> u64 {
        self.freqs.len() as u64
    }
}

/// One value of a perturbed multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerturbedEntry {
    pub value: u64,
    pub multiplicity: u32,
}

/// The multiset `{λ_j + ε_j}`. Two neighbours `v-1`, `v+1` can land on the
/// same `v`, never three, so multiplicities are 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<PerturbedEntry>", into = "Vec<PerturbedEntry>")]
pub struct PerturbedSet {
    entries: Vec<PerturbedEntry>,
}

impl TryFrom<Vec<PerturbedEntry>> for PerturbedSet {
    type Error = Error;

    fn try_from(entries: Vec<PerturbedEntry>) -> Result<Self> {
        PerturbedSet::new(entries)
    }
}

impl From<PerturbedSet> for Vec<PerturbedEntry> {
    fn from(set: PerturbedSet) -> Self {
        set.entries
    }
}

impl PerturbedSet {
    pub fn new(entries: Vec<PerturbedEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("perturbed set must be nonempty"));
        }
        if entries[0].value == 0 {
            return Err(Error::domain("perturbed values must be positive"));
        }
        if entries.windows(2).any(|w| w[0].value >= w[1].value) {
            return Err(Error::domain("perturbed values must be strictly increasing"));
        }
        if let Some(e) = entries.iter().find(|e| !(1..=2).contains(&e.multiplicity)) {
            return Err(Error::domain(format!(
                "multiplicity {} at {} outside {{1,2}}",
                e.multiplicity, e.value
            )));
        }
        if entries.last().unwrap().value > MAX_FREQUENCY {
            return Err(Error::domain("perturbed value exceeds 2^46"));
        }
        Ok(Self { entries })
    }

    /// Groups an arbitrary list of positive values into a multiset.
    pub fn from_values(mut values: Vec<u64>) -> Result<Self> {
        values.sort_unstable();
        let mut entries: Vec<PerturbedEntry> = Vec::with_capacity(values.len());
        for v in values {
            match entries.last_mut() {
                Some(last) if last.value == v => last.multiplicity += 1,
                _ => entries.push(PerturbedEntry { value: v, multiplicity: 1 }),
            }
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[PerturbedEntry] {
        &self.entries
    }

    /// Values that carry multiplicity 2.
    pub fn collisions(&self) -> Vec<(u64, u32)> {
        self.entries
            .iter()
            .filter(|e| e.multiplicity > 1)
            .map(|e| (e.value, e.multiplicity))
            .collect()
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.entries.iter().map(|e| e.multiplicity).max().unwrap_or(0)
    }
}

impl Spectrum for PerturbedSet {
    fn distinct(&self) -> usize {
        self.entries.len()
    }

    fn term(&self, i: usize) -> (u64, u32) {
        let e = self.entries[i];
        (e.value, e.multiplicity)
    }
}
