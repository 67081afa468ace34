//! Shannon entropy of discrete distributions, in bits.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{invalid, Result};

/// Opaque outcome identifier.
pub type OutcomeId = Vec<u8>;

const MASS_TOLERANCE: f64 = 1e-6;

/// A finite distribution over opaque outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    outcomes: Vec<(OutcomeId, f64)>,
}

impl DiscreteDistribution {
    /// Builds a distribution; masses must be finite, non-negative and sum to one.
    pub fn new(outcomes: Vec<(OutcomeId, f64)>) -> Result<Self> {
        if outcomes.is_empty() {
            return invalid("distribution has no outcomes");
        }
        let mut seen = std::collections::HashSet::new();
        let mut total = 0.0;
        for (id, p) in &outcomes {
            if !p.is_finite() || *p < 0.0 {
                return invalid(format!("mass {p} is not a finite non-negative number"));
            }
            if !seen.insert(id.as_slice()) {
                return invalid("duplicate outcome id");
            }
            total += p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return invalid(format!("masses sum to {total}, not 1"));
        }
        Ok(Self { outcomes })
    }

    /// Outcome ids are the little-endian bytes of each position.
    pub fn from_probabilities(masses: &[f64]) -> Result<Self> {
        Self::new(
            masses
                .iter()
                .enumerate()
                .map(|(i, &p)| ((i as u64).to_le_bytes().to_vec(), p))
                .collect(),
        )
    }

    pub fn outcomes(&self) -> &[(OutcomeId, f64)] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// Entropy of `dist` in bits; zero-mass outcomes contribute nothing.
pub fn entropy(dist: &DiscreteDistribution) -> f64 {
    dist.outcomes
        .iter()
        .map(|&(_, p)| if p > 0.0 { -p * p.log2() } else { 0.0 })
        .sum::<f64>()
        .max(0.0)
}

/// Plug-in entropy estimate from observed samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyEstimate {
    pub value_bits: f64,
    pub sample_count: usize,
    pub distinct_outcomes: usize,
}

/// Plug-in (maximum likelihood) entropy of the empirical distribution.
pub fn empirical_entropy<K, I>(samples: I) -> Result<EntropyEstimate>
where
    K: Hash + Eq,
    I: IntoIterator<Item = K>,
{
    let mut table = FrequencyTable::new();
    for s in samples {
        table.record(s);
    }
    table.estimate()
}

/// Entropy of a product of independent distributions given their entropies.
pub fn joint_entropy_of_independents(entropies: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &h in entropies {
        if !h.is_finite() || h < 0.0 {
            return invalid(format!("entropy {h} is not a finite non-negative number"));
        }
        total += h;
    }
    Ok(total)
}

/// Entropy in bits of the distribution proportional to `counts`.
pub fn entropy_of_counts<I: IntoIterator<Item = u64>>(counts: I) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Streaming outcome counter.
#[derive(Clone, Debug)]
pub struct FrequencyTable<K> {
    counts: HashMap<K, u64>,
    total: usize,
}

impl<K: Hash + Eq> Default for FrequencyTable<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Hash + Eq> FrequencyTable<K> {
    pub fn new() -> Self {
        Self {
            counts: HashMap::new(),
            total: 0,
        }
    }

    pub fn record(&mut self, outcome: K) {
        *self.counts.entry(outcome).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, outcome: &K) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn estimate(&self) -> Result<EntropyEstimate> {
        if self.total == 0 {
            return invalid("no samples");
        }
        Ok(EntropyEstimate {
            value_bits: entropy_of_counts(self.counts.values().copied()),
            sample_count: self.total,
            distinct_outcomes: self.counts.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_over_eight() {
        let d = DiscreteDistribution::from_probabilities(&[0.125; 8]).unwrap();
        assert!((entropy(&d) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(DiscreteDistribution::from_probabilities(&[0.5, 0.4]).is_err());
        assert!(DiscreteDistribution::from_probabilities(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn counts_ignore_zeros() {
        assert_eq!(entropy_of_counts([0, 5, 0]), 0.0);
        assert!((entropy_of_counts([1, 1]) - 1.0).abs() < 1e-12);
    }
}
