use std::collections::BTreeSet;

use super::element::ElementId;
use super::space::Space;
use crate::error::{Error, Result};

/// Size guards for the exponential brute-force routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest space [`Space::enumerate_open_sets`] accepts.
    pub open_sets: usize,
    /// Largest target space on which monotonicity is checked exhaustively.
    pub monotonicity: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            open_sets: 20,
            monotonicity: 15,
        }
    }
}

impl Limits {
    /// The same limit for every guard.
    pub fn uniform(limit: usize) -> Self {
        Self {
            open_sets: limit,
            monotonicity: limit,
        }
    }
}

impl Space {
    /// Every open set of `T(R)`, straight from the definition: `A` is open
    /// iff for each pair `(a, b)`, `b ∈ A` implies `a ∈ A`.
    pub fn enumerate_open_sets(&self) -> Result<Vec<BTreeSet<ElementId>>> {
        self.enumerate_open_sets_within(Limits::default().open_sets)
    }

    pub fn enumerate_open_sets_within(&self, limit: usize) -> Result<Vec<BTreeSet<ElementId>>> {
        let n = self.len();
        if n > limit || n >= 64 {
            return Err(Error::SizeGuard { size: n, limit });
        }
        let index = self.index();
        let masks: Vec<(u64, u64)> = self
            .relation()
            .iter()
            .map(|p| (1u64 << index.pos[&p.ida], 1u64 << index.pos[&p.idb]))
            .collect();
        let mut out = Vec::new();
        for set in 0..(1u64 << n) {
            if masks.iter().all(|&(a, b)| set & b == 0 || set & a != 0) {
                out.push(
                    (0..n)
                        .filter(|i| set & (1 << i) != 0)
                        .map(|i| index.ids[i].clone())
                        .collect(),
                );
            }
        }
        Ok(out)
    }
}
