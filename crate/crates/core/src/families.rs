//! Constructors for the graph families used as a test corpus.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side, Vertex};

/// Retries per matching before the random-regular generator gives up.
const MATCHING_RETRIES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphFamily {
    /// `Q_d` on `{0,1}^d`; a vertex id is the integer value of its bit string.
    Hypercube { dim: usize },
    /// `C_n` with vertices `0..n` in cycle order.
    EvenCycle { len: usize },
    /// `K_{d,d}` with E-class `0..d` and O-class `d..2d`.
    CompleteBipartite { degree: usize },
    /// `T_{L,d}` on `{0..L-1}^d`, ids in mixed radix with the first coordinate most significant.
    Torus { side_len: usize, dim: usize },
    /// Union of `degree` random perfect matchings between `0..n` and `n..2n`.
    RandomRegular {
        n_even: usize,
        degree: usize,
        seed: u64,
    },
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphFamily::Hypercube { dim } => write!(f, "hypercube:{dim}"),
            GraphFamily::EvenCycle { len } => write!(f, "cycle:{len}"),
            GraphFamily::CompleteBipartite { degree } => write!(f, "complete-bipartite:{degree}"),
            GraphFamily::Torus { side_len, dim } => write!(f, "torus:{side_len},{dim}"),
            GraphFamily::RandomRegular {
                n_even,
                degree,
                seed,
            } => write!(f, "random-regular:{n_even},{degree},{seed}"),
        }
    }
}

impl FromStr for GraphFamily {
    type Err = Error;

    /// Parses `family:params`, e.g. `hypercube:3`, `cycle:6`, `torus:4,2`,
    /// `random-regular:10,3,42`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("graph spec {s:?} lacks ':'")))?;
        let nums: Vec<u64> = params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidInput(format!("bad graph parameter {p:?}")))
            })
            .collect::<Result<_>>()?;
        let arity = |k: usize| -> Result<()> {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!(
                    "{name} takes {k} parameter(s), got {}",
                    nums.len()
                )))
            }
        };
        match name {
            "hypercube" | "cube" => {
                arity(1)?;
                Ok(GraphFamily::Hypercube {
                    dim: nums[0] as usize,
                })
            }
            "cycle" | "even-cycle" => {
                arity(1)?;
                Ok(GraphFamily::EvenCycle {
                    len: nums[0] as usize,
                })
            }
            "complete-bipartite" | "kdd" => {
                arity(1)?;
                Ok(GraphFamily::CompleteBipartite {
                    degree: nums[0] as usize,
                })
            }
            "torus" => {
                arity(2)?;
                Ok(GraphFamily::Torus {
                    side_len: nums[0] as usize,
                    dim: nums[1] as usize,
                })
            }
            "random-regular" => {
                arity(3)?;
                Ok(GraphFamily::RandomRegular {
                    n_even: nums[0] as usize,
                    degree: nums[1] as usize,
                    seed: nums[2],
                })
            }
            other => Err(Error::InvalidInput(format!("unknown graph family {other:?}"))),
        }
    }
}

pub fn build_graph(family: &GraphFamily) -> Result<BipartiteGraph> {
    match *family {
        GraphFamily::Hypercube { dim } => hypercube(dim),
        GraphFamily::EvenCycle { len } => even_cycle(len),
        GraphFamily::CompleteBipartite { degree } => complete_bipartite(degree),
        GraphFamily::Torus { side_len, dim } => torus(side_len, dim),
        GraphFamily::RandomRegular {
            n_even,
            degree,
            seed,
        } => random_regular(n_even, degree, seed),
    }
}

fn parity_side(parity: usize) -> Side {
    if parity.is_multiple_of(2) {
        Side::Even
    } else {
        Side::Odd
    }
}

fn hypercube(dim: usize) -> Result<BipartiteGraph> {
    if dim == 0 || dim > 24 {
        return Err(Error::InvalidGraph(format!(
            "hypercube dimension must be in 1..=24, got {dim}"
        )));
    }
    let n = 1usize << dim;
    let sides = (0..n).map(|v| parity_side(v.count_ones() as usize)).collect();
    let edges: Vec<(Vertex, Vertex)> = (0..n)
        .flat_map(|v| (0..dim).map(move |i| (v, v ^ (1 << i))))
        .filter(|&(u, v)| u < v)
        .collect();
    BipartiteGraph::from_edges(sides, &edges)
}

fn even_cycle(len: usize) -> Result<BipartiteGraph> {
    if len < 4 || !len.is_multiple_of(2) {
        return Err(Error::InvalidGraph(format!(
            "cycle length must be even and at least 4, got {len}"
        )));
    }
    let sides = (0..len).map(parity_side).collect();
    let edges: Vec<_> = (0..len).map(|i| (i, (i + 1) % len)).collect();
    BipartiteGraph::from_edges(sides, &edges)
}

fn complete_bipartite(degree: usize) -> Result<BipartiteGraph> {
    if degree == 0 {
        return Err(Error::InvalidGraph("K_{d,d} needs d >= 1".into()));
    }
    let edges: Vec<_> = (0..degree)
        .flat_map(|u| (0..degree).map(move |v| (u, v)))
        .collect();
    BipartiteGraph::from_class_edges(degree, degree, &edges)
}

fn torus(side_len: usize, dim: usize) -> Result<BipartiteGraph> {
    if side_len < 4 || !side_len.is_multiple_of(2) {
        return Err(Error::InvalidGraph(format!(
            "torus side must be even and at least 4, got {side_len}"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidGraph("torus dimension must be positive".into()));
    }
    let n = side_len
        .checked_pow(dim as u32)
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| Error::InvalidGraph("torus too large".into()))?;
    let coords = |mut v: usize| {
        let mut c = vec![0; dim];
        for slot in c.iter_mut().rev() {
            *slot = v % side_len;
            v /= side_len;
        }
        c
    };
    let sides = (0..n).map(|v| parity_side(coords(v).iter().sum())).collect();
    let mut edges = Vec::with_capacity(n * dim);
    for v in 0..n {
        let mut stride = 1;
        for axis in (0..dim).rev() {
            let x = coords(v)[axis];
            let up = if x + 1 == side_len {
                v - x * stride
            } else {
                v + stride
            };
            edges.push((v, up));
            stride *= side_len;
        }
    }
    BipartiteGraph::from_edges(sides, &edges)
}

fn random_regular(n_even: usize, degree: usize, seed: u64) -> Result<BipartiteGraph> {
    if degree == 0 || degree > n_even {
        return Err(Error::InvalidGraph(format!(
            "random regular graph needs 1 <= d <= n_even, got d={degree}, n_even={n_even}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = vec![vec![false; n_even]; n_even];
    let mut edges = Vec::with_capacity(n_even * degree);
    for _ in 0..degree {
        let mut perm: Vec<usize> = (0..n_even).collect();
        let mut placed = false;
        for _ in 0..MATCHING_RETRIES {
            perm.shuffle(&mut rng);
            if perm.iter().enumerate().all(|(u, &v)| !used[u][v]) {
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::InvalidGraph(format!(
                "random regular graph: no simple matching after {MATCHING_RETRIES} retries"
            )));
        }
        for (u, &v) in perm.iter().enumerate() {
            used[u][v] = true;
            edges.push((u, v));
        }
    }
    BipartiteGraph::from_class_edges(n_even, n_even, &edges)
}

/// Vertex id of a hypercube bit string such as `"101"`.
pub fn hypercube_vertex(bits: &str) -> Result<Vertex> {
    if bits.is_empty() || bits.len() > 24 {
        return Err(Error::InvalidInput(format!("bad bit string {bits:?}")));
    }
    usize::from_str_radix(bits, 2).map_err(|_| Error::InvalidInput(format!("bad bit string {bits:?}")))
}
