//! Set partitions of `{1, ..., k}` in canonical block order.
//!
//! Blocks are ordered by their minimum element and each block is sorted
//! ascending. Enumeration walks restricted growth strings in lexicographic
//! order, which for `k = 3` yields
//! `{1,2,3}`, `{1,2}|{3}`, `{1,3}|{2}`, `{1}|{2,3}`, `{1}|{2}|{3}`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest ground set accepted by the enumerators (Bell(12) = 4,213,597).
pub const MAX_GROUND_SET: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from arbitrary blocks, canonicalizing their order.
    pub fn new(k: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut blocks = blocks;
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b.first().copied().unwrap_or(0));
        let p = Partition { k, blocks };
        p.validate()?;
        Ok(p)
    }

    /// Checks the type invariants: nonempty disjoint blocks covering
    /// `{1..k}`, blocks ordered by minimum, elements sorted.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.k + 1];
        let mut prev_min = 0;
        for b in &self.blocks {
            if b.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            if b[0] <= prev_min {
                return Err(Error::InvalidArgument(
                    "blocks not ordered by minimum element".into(),
                ));
            }
            prev_min = b[0];
            if b.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument("block not sorted ascending".into()));
            }
            for &e in b {
                if e == 0 || e > self.k || seen[e] {
                    return Err(Error::InvalidArgument(format!(
                        "element {e} repeated or outside 1..={}",
                        self.k
                    )));
                }
                seen[e] = true;
            }
        }
        if seen.iter().skip(1).any(|s| !s) {
            return Err(Error::InvalidArgument("blocks do not cover the ground set".into()));
        }
        Ok(())
    }

    pub fn ground_size(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn from_rgs(rgs: &[usize]) -> Self {
        let n_blocks = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); n_blocks];
        for (pos, &label) in rgs.iter().enumerate() {
            blocks[label].push(pos + 1);
        }
        Partition {
            k: rgs.len(),
            blocks,
        }
    }
}

impl fmt::Display for Partition {
    /// Formats as `{1,3}|{2}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            f.write_str("{")?;
            for (j, e) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// A partition transported onto a sorted index set by the order isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetPartition {
    pub ground: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

fn guard(k: usize) -> Result<()> {
    if k > MAX_GROUND_SET {
        return Err(Error::PartitionGuard {
            k,
            max: MAX_GROUND_SET,
        });
    }
    Ok(())
}

/// All partitions of `{1, ..., k}`; empty for `k = 0`.
pub fn enumerate_partitions(k: usize) -> Result<Vec<Partition>> {
    guard(k)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    // rgs[i] <= 1 + max(rgs[..i]), rgs[0] = 0
    let mut rgs = vec![0usize; k];
    let mut maxes = vec![0usize; k];
    let mut out = vec![Partition::from_rgs(&rgs)];
    loop {
        let mut i = k - 1;
        while i > 0 && rgs[i] > maxes[i - 1] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        rgs[i] += 1;
        maxes[i] = maxes[i - 1].max(rgs[i]);
        for j in i + 1..k {
            rgs[j] = 0;
            maxes[j] = maxes[i];
        }
        out.push(Partition::from_rgs(&rgs));
    }
    Ok(out)
}

/// All partitions of `{1, ..., k}` except the single-block one.
pub fn enumerate_proper_partitions(k: usize) -> Result<Vec<Partition>> {
    Ok(enumerate_partitions(k)?
        .into_iter()
        .filter(|p| p.len() > 1)
        .collect())
}

/// Returns `(u_0, u_{I_{b,1}}, u_{I_{b,2}}, ...)` for the block with zero-based
/// index `block`. `u` holds `u_0, u_1, ..., u_k`.
pub fn select_block_tuple<T: Clone>(partition: &Partition, block: usize, u: &[T]) -> Result<Vec<T>> {
    if u.len() != partition.k + 1 {
        return Err(Error::SizeMismatch {
            expected: partition.k + 1,
            actual: u.len(),
        });
    }
    let b = partition.blocks.get(block).ok_or_else(|| Error::IndexOutOfRange {
        index: block,
        valid: format!("0..{}", partition.len()),
    })?;
    let mut out = Vec::with_capacity(b.len() + 1);
    out.push(u[0].clone());
    out.extend(b.iter().map(|&e| u[e].clone()));
    Ok(out)
}

/// Maps element `j` of every block to the `j`-th smallest element of `subset`.
pub fn relabel_to_subset(partition: &Partition, subset: &[usize]) -> Result<SubsetPartition> {
    if subset.len() != partition.k {
        return Err(Error::SizeMismatch {
            expected: partition.k,
            actual: subset.len(),
        });
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("subset must be sorted ascending".into()));
    }
    let blocks = partition
        .blocks
        .iter()
        .map(|b| b.iter().map(|&j| subset[j - 1]).collect())
        .collect();
    Ok(SubsetPartition {
        ground: subset.to_vec(),
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(ps: &[Partition]) -> Vec<String> {
        ps.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn small_listings() {
        assert!(enumerate_partitions(0).unwrap().is_empty());
        assert_eq!(render(&enumerate_partitions(1).unwrap()), ["{1}"]);
        assert_eq!(render(&enumerate_partitions(2).unwrap()), ["{1,2}", "{1}|{2}"]);
        assert_eq!(
            render(&enumerate_partitions(3).unwrap()),
            ["{1,2,3}", "{1,2}|{3}", "{1,3}|{2}", "{1}|{2,3}", "{1}|{2}|{3}"]
        );
        assert_eq!(enumerate_partitions(4).unwrap().len(), 15);
    }

    #[test]
    fn proper_partitions() {
        assert!(enumerate_proper_partitions(0).unwrap().is_empty());
        assert!(enumerate_proper_partitions(1).unwrap().is_empty());
        assert_eq!(render(&enumerate_proper_partitions(2).unwrap()), ["{1}|{2}"]);
        assert_eq!(enumerate_proper_partitions(3).unwrap().len(), 4);
    }

    #[test]
    fn guard_rejects_large_sets() {
        assert!(matches!(
            enumerate_partitions(13),
            Err(Error::PartitionGuard { k: 13, .. })
        ));
        assert!(enumerate_proper_partitions(13).is_err());
    }

    #[test]
    fn block_selector() {
        let p = Partition::new(3, vec![vec![1, 3], vec![2]]).unwrap();
        assert_eq!(select_block_tuple(&p, 0, &['a', 'b', 'c', 'd']).unwrap(), ['a', 'b', 'd']);
        let single = Partition::new(2, vec![vec![1, 2]]).unwrap();
        assert_eq!(select_block_tuple(&single, 0, &['a', 'b', 'c']).unwrap(), ['a', 'b', 'c']);
        let split = Partition::new(2, vec![vec![1], vec![2]]).unwrap();
        assert_eq!(select_block_tuple(&split, 1, &['a', 'b', 'c']).unwrap(), ['a', 'c']);
        assert!(matches!(
            select_block_tuple(&split, 2, &['a', 'b', 'c']),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(select_block_tuple(&split, 0, &['a', 'b']).is_err());
    }

    #[test]
    fn relabel_examples() {
        let p = Partition::new(2, vec![vec![1], vec![2]]).unwrap();
        assert_eq!(relabel_to_subset(&p, &[2, 5]).unwrap().blocks, vec![vec![2], vec![5]]);
        let p = Partition::new(2, vec![vec![1, 2]]).unwrap();
        assert_eq!(relabel_to_subset(&p, &[3, 7]).unwrap().blocks, vec![vec![3, 7]]);
        let p = Partition::new(3, vec![vec![1, 3], vec![2]]).unwrap();
        assert_eq!(
            relabel_to_subset(&p, &[1, 4, 6]).unwrap().blocks,
            vec![vec![1, 6], vec![4]]
        );
        assert!(matches!(
            relabel_to_subset(&p, &[1, 4]),
            Err(Error::SizeMismatch { .. })
        ));
        assert!(relabel_to_subset(&p, &[4, 1, 6]).is_err());
    }

    #[test]
    fn constructor_canonicalizes_and_validates() {
        let p = Partition::new(3, vec![vec![2], vec![3, 1]]).unwrap();
        assert_eq!(p.to_string(), "{1,3}|{2}");
        assert!(Partition::new(3, vec![vec![1, 2]]).is_err());
        assert!(Partition::new(2, vec![vec![1, 2], vec![2]]).is_err());
        assert!(Partition::new(2, vec![vec![1, 2], vec![]]).is_err());
    }
}
