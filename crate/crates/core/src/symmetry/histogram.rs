//! Count histograms over a group of interchangeable variables and their
//! ranking in ascending lexicographic order.

use crate::error::{Error, Result};

/// Counts of each value among the variables of a symmetry group:
/// `counts[v]` is the number of group members assigned `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Histogram {
    counts: Vec<usize>,
}

impl Histogram {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidConfig(
                "histogram needs at least one bin".into(),
            ));
        }
        Ok(Histogram { counts })
    }

    /// Histogram of `values`, each of which must be below `bins`.
    pub fn of_values(values: impl IntoIterator<Item = usize>, bins: usize) -> Result<Self> {
        let mut counts = vec![0; bins];
        for v in values {
            *counts.get_mut(v).ok_or(Error::OutOfRange {
                value: v as u128,
                limit: bins as u128,
            })? += 1;
        }
        Histogram::new(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Number of group variables (n̄).
    pub fn group_size(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of bins, i.e. the shared cardinality (d̄).
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Expands the histogram into the canonical sorted assignment:
    /// `counts[0]` zeros, then `counts[1]` ones, and so on.
    pub fn canonical_values(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(v, &c)| std::iter::repeat_n(v, c))
    }
}

fn binomial(n: u128, k: u128) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc == C(n - k + i - 1, i - 1) here; reduce by the gcd before multiplying
        let g = gcd(acc, i);
        let factor = (n - k + i) / (i / g);
        acc = (acc / g)
            .checked_mul(factor)
            .ok_or(Error::Overflow("binomial coefficient"))?;
    }
    Ok(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of count vectors of length `bins` summing to `total`.
pub fn compositions(total: usize, bins: usize) -> Result<u128> {
    if bins == 0 {
        return Ok(u128::from(total == 0));
    }
    binomial((total + bins - 1) as u128, (bins - 1) as u128)
}

/// Size of the histogram domain for `group_size` variables of cardinality
/// `cardinality`: C(n̄ + d̄ - 1, d̄ - 1).
pub fn compact_domain_size(group_size: usize, cardinality: usize) -> Result<u128> {
    if cardinality == 0 {
        return Err(Error::InvalidConfig("cardinality must be >= 1".into()));
    }
    compositions(group_size, cardinality)
}

fn compositions_usize(total: usize, bins: usize) -> usize {
    // only called for sub-counts of a histogram domain that already fits in memory
    compositions(total, bins)
        .ok()
        .and_then(|c| usize::try_from(c).ok())
        .unwrap_or(usize::MAX)
}

/// Position of `h` among all histograms with the same size and bin count,
/// in ascending lexicographic order of the count vectors.
pub fn hist_rank(h: &Histogram) -> usize {
    let bins = h.bins();
    let mut remaining = h.group_size();
    let mut rank = 0;
    for (i, &c) in h.counts[..bins - 1].iter().enumerate() {
        for smaller in 0..c {
            rank += compositions_usize(remaining - smaller, bins - i - 1);
        }
        remaining -= c;
    }
    rank
}

/// Inverse of [`hist_rank`].
pub fn hist_unrank(rank: usize, group_size: usize, bins: usize) -> Result<Histogram> {
    let size = compact_domain_size(group_size, bins)?;
    if rank as u128 >= size {
        return Err(Error::OutOfRange {
            value: rank as u128,
            limit: size,
        });
    }
    let mut counts = vec![0; bins];
    let mut remaining = group_size;
    let mut rank = rank;
    for (i, count) in counts.iter_mut().enumerate().take(bins - 1) {
        let mut c = 0;
        loop {
            let block = compositions_usize(remaining - c, bins - i - 1);
            if rank < block {
                break;
            }
            rank -= block;
            c += 1;
        }
        *count = c;
        remaining -= c;
    }
    counts[bins - 1] = remaining;
    Histogram::new(counts)
}
