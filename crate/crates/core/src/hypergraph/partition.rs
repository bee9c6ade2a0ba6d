use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of `0..n` into `k >= 2` nonempty blocks.
///
/// Labels are normalized to a restricted growth string: block ids appear in
/// order of first occurrence, starting at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Builds a partition from arbitrary block labels, one per vertex.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let mut relabel: Vec<(usize, usize)> = Vec::new();
        let mut normalized = Vec::with_capacity(labels.len());
        for &l in &labels {
            let id = match relabel.iter().find(|(old, _)| *old == l) {
                Some(&(_, id)) => id,
                None => {
                    relabel.push((l, relabel.len()));
                    relabel.len() - 1
                }
            };
            normalized.push(id);
        }
        let k = relabel.len();
        if k < 2 {
            return Err(Error::InvalidPartition(format!(
                "a cut needs at least two blocks, got {k}"
            )));
        }
        Ok(Self { labels: normalized, k })
    }

    /// Builds a partition of `0..n` from explicit blocks.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &v in block {
                if v >= n {
                    return Err(Error::InvalidPartition(format!("vertex {v} out of range")));
                }
                if labels[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} in two blocks")));
                }
                labels[v] = b;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} not covered")));
        }
        Self::new(labels)
    }

    pub(crate) fn from_rgs(labels: &[u8]) -> Self {
        let labels: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
        let k = labels.iter().max().map_or(0, |&m| m + 1);
        Self { labels, k }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            blocks[l].push(v);
        }
        blocks
    }

    pub fn block_masks(&self) -> Vec<u32> {
        let mut masks = vec![0u32; self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            masks[l] |= 1 << v;
        }
        masks
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.labels
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(labels: Vec<usize>) -> Result<Self> {
        Partition::new(labels)
    }
}

/// Calls `f(labels, k)` for every set partition of `n` elements, including the
/// one-block partition, in lexicographic order of restricted growth strings.
pub fn for_each_partition<F: FnMut(&[u8], usize)>(n: usize, mut f: F) {
    if n == 0 {
        return;
    }
    assert!(n < 256, "restricted growth strings are stored as u8");
    let mut a = vec![0u8; n];
    // m[i] = max(a[0..=i])
    let mut m = vec![0u8; n];
    loop {
        f(&a, m[n - 1] as usize + 1);
        let Some(j) = (1..n).rev().find(|&j| a[j] <= m[j - 1]) else {
            return;
        };
        a[j] += 1;
        m[j] = m[j - 1].max(a[j]);
        for i in j + 1..n {
            a[i] = 0;
            m[i] = m[j];
        }
    }
}

/// Bell number `B_n` (number of set partitions of `n` elements), `n <= 25`.
pub fn bell_number(n: usize) -> u64 {
    assert!(n <= 25, "B_n overflows u64 beyond n = 25");
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn bell_numbers() {
        let expected = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        for (n, &b) in expected.iter().enumerate() {
            assert_eq!(bell_number(n), b);
        }
    }

    #[test]
    fn enumeration_counts_and_uniqueness() {
        for n in 1..=9 {
            let mut seen = HashSet::new();
            let mut per_k = vec![0u64; n + 1];
            for_each_partition(n, |a, k| {
                assert!(seen.insert(a.to_vec()));
                assert_eq!(k, *a.iter().max().unwrap() as usize + 1);
                // restricted growth: a[0] = 0 and a[i] <= max(a[..i]) + 1
                assert_eq!(a[0], 0);
                for i in 1..n {
                    assert!(a[i] <= a[..i].iter().max().unwrap() + 1);
                }
                per_k[k] += 1;
            });
            assert_eq!(seen.len() as u64, bell_number(n));
            // S(n, 2) = 2^(n-1) - 1
            if n >= 2 {
                assert_eq!(per_k[2], (1 << (n - 1)) - 1);
            }
        }
    }

    #[test]
    fn normalization_and_validation() {
        let p = Partition::new(vec![5, 5, 2, 9]).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 2]);
        assert_eq!(p.num_blocks(), 3);
        assert_eq!(p.blocks(), vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(p.block_masks(), vec![0b0011, 0b0100, 0b1000]);
        assert!(Partition::new(vec![1, 1, 1]).is_err());
        assert!(Partition::from_blocks(3, &[vec![0], vec![1]]).is_err());
        assert!(Partition::from_blocks(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::from_blocks(3, &[vec![0, 1, 2], vec![]]).is_err());
        assert_eq!(
            Partition::from_blocks(3, &[vec![2], vec![0, 1]]).unwrap().labels(),
            &[0, 0, 1]
        );
    }
}
