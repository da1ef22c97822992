use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::matrix::ColorMatrix;

/// How many colours have each frequency: `count(l)` is the number of
/// colours occurring exactly `l` times.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrequencyProfile {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    /// `counts[l - 1]` for `l` in `1..=counts.len()`.
    counts: Vec<usize>,
}

impl FrequencyProfile {
    /// `counts[l - 1]` is the number of `l`-colours.
    pub fn new(p: usize, q: usize, k: usize, counts: Vec<usize>) -> Self {
        let mut counts = counts;
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Self { p, q, k, counts }
    }

    /// Builds a profile from `(l, c_l)` pairs.
    pub fn from_pairs(p: usize, q: usize, k: usize, pairs: &[(usize, usize)]) -> Self {
        let len = pairs.iter().map(|&(l, _)| l).max().unwrap_or(0);
        let mut counts = vec![0; len];
        for &(l, c) in pairs {
            assert!(l >= 1, "frequency must be positive");
            counts[l - 1] += c;
        }
        Self::new(p, q, k, counts)
    }

    pub fn of_matrix(m: &ColorMatrix) -> Self {
        let freq = m.frequencies();
        let max = freq.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0; max];
        for &f in &freq[1..] {
            if f > 0 {
                counts[f - 1] += 1;
            }
        }
        Self::new(m.rows(), m.cols(), m.palette_size(), counts)
    }

    pub fn instance(&self) -> (usize, usize, usize) {
        (self.p, self.q, self.k)
    }

    /// `c_l`
    pub fn count(&self, l: usize) -> usize {
        if l == 0 {
            return 0;
        }
        self.counts.get(l - 1).copied().unwrap_or(0)
    }

    /// `c_{l+}`: colours of frequency at least `l`.
    pub fn count_at_least(&self, l: usize) -> usize {
        let start = l.max(1) - 1;
        self.counts.iter().skip(start).sum()
    }

    pub fn max_frequency(&self) -> usize {
        self.counts.len()
    }

    /// Nonzero `(l, c_l)` entries in increasing `l`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, &c)| (i + 1, c))
    }

    /// `c_1, c_2, ...` up to the largest nonzero frequency.
    pub fn as_slice(&self) -> &[usize] {
        &self.counts
    }

    /// `Σ_l c_l`
    pub fn colour_total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `Σ_l l·c_l`
    pub fn cell_total(&self) -> usize {
        self.entries().map(|(l, c)| l * c).sum()
    }

    /// `Σ_{l≥3} l·c_l`, the number of cells held by 3+colours.
    pub fn heavy_cells(&self) -> usize {
        self.entries()
            .filter(|&(l, _)| l >= 3)
            .map(|(l, c)| l * c)
            .sum()
    }
}

impl fmt::Display for FrequencyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (l, c)) in self.entries().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}: {c}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for FrequencyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FrequencyProfile({}x{} k={} {})",
            self.p, self.q, self.k, self
        )
    }
}
