use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest set size for which partitions are enumerated.
pub const MAX_PARTITION_SIZE: usize = 7;

/// A set partition of `{0, …, n−1}`; blocks are sorted internally and ordered
/// by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// All set partitions of `{0, …, n−1}` (Bell(n) of them).
pub fn partitions(n: usize) -> Result<Vec<Partition>> {
    if n == 0 {
        return Err(Error::Input("partitions need n >= 1".into()));
    }
    if n > MAX_PARTITION_SIZE {
        return Err(Error::SizeLimit { size: n, limit: MAX_PARTITION_SIZE });
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    grow(&mut rgs, 1, 0, &mut out);
    Ok(out)
}

// Restricted growth strings: rgs[i] <= 1 + max(rgs[..i]).
fn grow(rgs: &mut [usize], pos: usize, max: usize, out: &mut Vec<Partition>) {
    if pos == rgs.len() {
        let mut blocks = vec![Vec::new(); max + 1];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(Partition { blocks });
        return;
    }
    for b in 0..=max + 1 {
        rgs[pos] = b;
        grow(rgs, pos + 1, max.max(b), out);
    }
}

/// Partitions of an arbitrary index list, expressed in its own labels.
pub(crate) fn partitions_of(labels: &[usize]) -> Result<Vec<Vec<Vec<usize>>>> {
    Ok(partitions(labels.len())?
        .into_iter()
        .map(|p| p.blocks.into_iter().map(|b| b.into_iter().map(|i| labels[i]).collect()).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn bell_numbers() {
        let bell = [1, 2, 5, 15, 52, 203, 877];
        for (n, &b) in (1..=7).zip(&bell) {
            let ps = partitions(n).unwrap();
            assert_eq!(ps.len(), b);
            let unique: HashSet<_> = ps.iter().collect();
            assert_eq!(unique.len(), b);
        }
        assert!(partitions(8).is_err());
        assert!(partitions(0).is_err());
    }

    #[test]
    fn partitions_are_canonical_covers() {
        for p in partitions(5).unwrap() {
            let mut all: Vec<usize> = p.blocks.iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..5).collect::<Vec<_>>());
            assert!(p.blocks.windows(2).all(|w| w[0][0] < w[1][0]));
            assert!(p.blocks.iter().all(|b| !b.is_empty() && b.windows(2).all(|w| w[0] < w[1])));
        }
    }
}
