use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use crate::error::{precondition, Result};
use crate::perm::Perm;

/// A coloring of the ground set with a partition of every color class into blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredPartition {
    n: usize,
    color: Vec<u32>,
    /// Sorted blocks, ordered by minimum.
    blocks: Vec<Vec<usize>>,
}

impl ColoredPartition {
    /// Blocks must partition `0..n` and each block must be monochromatic.
    pub fn new(color: Vec<u32>, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = color.len();
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks.into_iter().filter(|b| !b.is_empty()).collect();
        for b in &mut blocks {
            b.sort_unstable();
            for &p in b.iter() {
                if p >= n || seen[p] {
                    return precondition("blocks do not partition the ground set");
                }
                seen[p] = true;
            }
            if b.iter().any(|&p| color[p] != color[b[0]]) {
                return precondition("block spans two colors");
            }
        }
        if seen.iter().any(|&s| !s) {
            return precondition("blocks do not cover the ground set");
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(ColoredPartition { n, color, blocks })
    }

    /// Every color class is a single block.
    pub fn from_coloring(color: Vec<u32>) -> Self {
        let mut by_color: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (p, &c) in color.iter().enumerate() {
            by_color.entry(c).or_default().push(p);
        }
        ColoredPartition::new(color, by_color.into_values().collect()).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn color(&self, p: usize) -> u32 {
        self.color[p]
    }

    pub fn colors(&self) -> &[u32] {
        &self.color
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Blocks grouped by color, colors ascending.
    pub fn color_classes(&self) -> BTreeMap<u32, Vec<&Vec<usize>>> {
        let mut out: BTreeMap<u32, Vec<&Vec<usize>>> = BTreeMap::new();
        for b in &self.blocks {
            out.entry(self.color[b[0]]).or_default().push(b);
        }
        out
    }

    /// `(color, block size, block count)` per color class.
    pub fn profile(&self) -> Vec<(u32, usize, usize)> {
        self.color_classes()
            .into_iter()
            .map(|(c, bs)| (c, bs.iter().map(|b| b.len()).max().unwrap_or(0), bs.len()))
            .collect()
    }

    /// Sorted `(color, block size)` over all blocks.
    pub fn block_profile(&self) -> Vec<(u32, usize)> {
        let mut v: Vec<(u32, usize)> = self.blocks.iter().map(|b| (self.color[b[0]], b.len())).collect();
        v.sort_unstable();
        v
    }

    /// The first violated condition (1, 2 or 3), or `None` for a colored α-partition.
    pub fn violated_condition(&self, alpha: Ratio<usize>) -> Option<usize> {
        let classes = self.color_classes();
        for bs in classes.values() {
            let size: usize = bs.iter().map(|b| b.len()).sum();
            if size >= 2 && bs.iter().any(|b| b.len() < 2) {
                return Some(1);
            }
        }
        if self.blocks.iter().any(|b| Ratio::from_integer(b.len()) > alpha * self.n) {
            return Some(2);
        }
        if classes.values().any(|bs| bs.iter().any(|b| b.len() != bs[0].len())) {
            return Some(3);
        }
        None
    }

    /// Encodes block size into the color, so blocks of one color share a size.
    pub fn refine_block_sizes(&self) -> ColoredPartition {
        let mut size_of = vec![0usize; self.n];
        for b in &self.blocks {
            for &p in b {
                size_of[p] = b.len();
            }
        }
        let keys: Vec<(u32, usize)> = (0..self.n).map(|p| (self.color[p], size_of[p])).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let color = keys.iter().map(|k| sorted.binary_search(k).unwrap() as u32).collect();
        ColoredPartition { n: self.n, color, blocks: self.blocks.clone() }
    }

    pub fn act(&self, pi: &Perm) -> ColoredPartition {
        let mut color = vec![0; self.n];
        for p in 0..self.n {
            color[pi.apply(p)] = self.color[p];
        }
        let blocks = self.blocks.iter().map(|b| b.iter().map(|&p| pi.apply(p)).collect()).collect();
        ColoredPartition::new(color, blocks).unwrap()
    }
}

impl fmt::Display for ColoredPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let pts: Vec<String> = b.iter().map(|p| p.to_string()).collect();
            writeln!(f, "{} : {}", self.color[b[0]], pts.join(","))?;
        }
        Ok(())
    }
}

pub fn validate_colored_partition(p: &ColoredPartition, alpha: Ratio<usize>) -> bool {
    p.violated_condition(alpha).is_none()
}
