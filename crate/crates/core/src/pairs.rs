//! Bitmask kernel for exhaustive scans over zero-set pairs `(E, O)`.
//!
//! Masks are over local indices of a class, so both classes must have at
//! most 64 vertices; callers enforce the much smaller pair guard first.

use crate::error::{guard, Result};
use crate::graph::{BipartiteGraph, Side};
use crate::limits::Limits;

pub(crate) struct PairKernel {
    pub n: usize,
    /// Neighbour masks of E-vertices (over O-local indices).
    pub nbr_even: Vec<u64>,
    /// Neighbour masks of O-vertices (over E-local indices).
    pub nbr_odd: Vec<u64>,
    /// `N(mask)` for every E-subset.
    pub union_even: Vec<u64>,
    /// `N(mask)` for every O-subset.
    pub union_odd: Vec<u64>,
}

/// Statistics of a single compatible pair.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairStats {
    /// `I(E)`, an O-mask.
    pub inner_even: u64,
    /// `I(O)`, an E-mask.
    pub inner_odd: u64,
    pub components: u32,
}

impl PairKernel {
    pub fn new(graph: &BipartiteGraph, limits: &Limits) -> Result<Self> {
        guard("partition class for pair scan", graph.half(), limits.pair_class.min(20))?;
        let nbr_even = graph.neighbour_masks(Side::Even);
        let nbr_odd = graph.neighbour_masks(Side::Odd);
        let union_even = subset_unions(&nbr_even);
        let union_odd = subset_unions(&nbr_odd);
        Ok(Self {
            n: graph.half(),
            nbr_even,
            nbr_odd,
            union_even,
            union_odd,
        })
    }

    pub fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1 << self.n) - 1
        }
    }

    pub fn subsets(&self) -> std::ops::Range<u64> {
        0..1u64 << self.n
    }

    pub fn compatible(&self, e: u64, o: u64) -> bool {
        self.union_even[e as usize] & o == 0
    }

    /// Vertices whose neighbourhood lies inside `cover`.
    pub fn covered(nbr: &[u64], cover: u64) -> u64 {
        nbr.iter()
            .enumerate()
            .filter(|&(_, &m)| m & !cover == 0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// `[E]` for an E-mask.
    pub fn closure_even(&self, e: u64) -> u64 {
        Self::covered(&self.nbr_even, self.union_even[e as usize])
    }

    pub fn stats(&self, e: u64, o: u64) -> PairStats {
        let inner_even = Self::covered(&self.nbr_odd, e);
        let inner_odd = Self::covered(&self.nbr_even, o);
        let rest_even = self.full() & !(e | inner_odd);
        let rest_odd = self.full() & !(o | inner_even);
        PairStats {
            inner_even,
            inner_odd,
            components: self.components(rest_even, rest_odd),
        }
    }

    /// Components of the subgraph induced by an E-mask and an O-mask.
    pub fn components(&self, mut even: u64, mut odd: u64) -> u32 {
        let mut count = 0;
        while even | odd != 0 {
            count += 1;
            let (mut fe, mut fo) = if even != 0 {
                (even & even.wrapping_neg(), 0)
            } else {
                (0, odd & odd.wrapping_neg())
            };
            even &= !fe;
            odd &= !fo;
            while fe | fo != 0 {
                let next_odd = self.union_even[fe as usize] & odd;
                let next_even = self.union_odd[fo as usize] & even;
                odd &= !next_odd;
                even &= !next_even;
                fe = next_even;
                fo = next_odd;
            }
        }
        count
    }
}

fn subset_unions(nbr: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; 1 << nbr.len()];
    for mask in 1..out.len() {
        let low = mask.trailing_zeros() as usize;
        out[mask] = out[mask & (mask - 1)] | nbr[low];
    }
    out
}
