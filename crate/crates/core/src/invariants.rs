//! Exact brute-force evaluation of the bipartite expansion and locality.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{guard, Result};
use crate::graph::{BipartiteGraph, Side, Vertex, VertexSet};
use crate::limits::Limits;

/// Result of the expansion search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    /// `min (|N(A)| - |[A]|) / |N(A)|` over small nonempty `A`; 1 when vacuous.
    pub delta: Ratio<u64>,
    /// No small nonempty set exists, so the minimum ran over an empty family.
    pub vacuous: bool,
    /// A set attaining the minimum.
    pub witness: Option<VertexSet>,
}

/// Bipartite expansion by scanning every subset of each partition class.
pub fn bipartite_expansion(graph: &BipartiteGraph, limits: &Limits) -> Result<Expansion> {
    guard(
        "partition class for expansion search",
        graph.half(),
        limits.expansion_class.min(63),
    )?;
    let n_total = graph.vertex_count() as u64;
    let mut best: Option<(u64, u64, Side, u64)> = None;
    for side in Side::BOTH {
        let n = graph.class_size(side);
        let nbr = graph.neighbour_masks(side);
        let mut union = vec![0u64; 1 << n];
        for mask in 1u64..1 << n {
            let low = mask.trailing_zeros() as usize;
            let nm = union[(mask & (mask - 1)) as usize] | nbr[low];
            union[mask as usize] = nm;
            let closure = nbr.iter().filter(|&&x| x & !nm == 0).count() as u64;
            if 4 * closure > n_total {
                continue;
            }
            let size = nm.count_ones() as u64;
            let num = size - closure;
            let better = match best {
                None => true,
                Some((bn, bd, _, _)) => num * bd < bn * size,
            };
            if better {
                best = Some((num, size, side, mask));
            }
        }
    }
    Ok(match best {
        Some((num, den, side, mask)) => Expansion {
            delta: Ratio::new(num, den),
            vacuous: false,
            witness: Some(VertexSet::from_mask(graph, side, mask)),
        },
        None => Expansion {
            delta: Ratio::from_integer(1),
            vacuous: true,
            witness: None,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Locality {
    pub ell: usize,
    /// Edge whose neighbourhood union carries the largest independent set.
    pub edge: (Vertex, Vertex),
    /// An independent set of size `2d - ell` in `G[N(x) ∪ N(y)]`.
    pub independent_set: Vec<Vertex>,
}

/// `ℓ = 2d - max_{xy} α(G[N(x) ∪ N(y)])`, with an exact independence number.
pub fn locality(graph: &BipartiteGraph, limits: &Limits) -> Result<Locality> {
    let d = graph.degree();
    guard(
        "neighbourhood union for locality",
        2 * d,
        limits.locality_vertices.min(64),
    )?;
    let mut best: Option<(usize, (Vertex, Vertex), Vec<Vertex>)> = None;
    for (x, y) in graph.edges() {
        let mut union: Vec<Vertex> = graph
            .neighbours(x)
            .iter()
            .chain(graph.neighbours(y))
            .copied()
            .collect();
        union.sort_unstable();
        union.dedup();
        let adj: Vec<u64> = union
            .iter()
            .map(|&u| {
                union
                    .iter()
                    .enumerate()
                    .filter(|&(_, &w)| graph.adjacent(u, w))
                    .fold(0u64, |m, (j, _)| m | (1 << j))
            })
            .collect();
        let all = if union.len() == 64 {
            u64::MAX
        } else {
            (1u64 << union.len()) - 1
        };
        let mis = max_independent_set(&adj, all);
        let size = mis.count_ones() as usize;
        if best.as_ref().is_none_or(|b| size > b.0) {
            let members = (0..union.len())
                .filter(|&j| mis >> j & 1 == 1)
                .map(|j| union[j])
                .collect();
            best = Some((size, (x, y), members));
        }
    }
    let (size, edge, independent_set) = best.expect("regular graph has an edge");
    Ok(Locality {
        ell: 2 * d - size,
        edge,
        independent_set,
    })
}

/// Maximum independent set within `cand` of the graph given by bit adjacency.
fn max_independent_set(adj: &[u64], cand: u64) -> u64 {
    if cand == 0 {
        return 0;
    }
    let mut pick = None;
    let mut widest = (0, 0);
    let mut m = cand;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        let deg = (adj[v] & cand).count_ones();
        if deg <= 1 {
            pick = Some(v);
            break;
        }
        if deg > widest.1 {
            widest = (v, deg);
        }
    }
    if let Some(v) = pick {
        // a vertex of degree <= 1 always belongs to some maximum independent set
        return (1 << v) | max_independent_set(adj, cand & !(1 << v) & !adj[v]);
    }
    let v = widest.0;
    let with = (1 << v) | max_independent_set(adj, cand & !(1 << v) & !adj[v]);
    let without = max_independent_set(adj, cand & !(1 << v));
    if with.count_ones() >= without.count_ones() {
        with
    } else {
        without
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_graph, GraphFamily};

    fn g(f: GraphFamily) -> BipartiteGraph {
        build_graph(&f).unwrap()
    }

    /// Expansion recomputed from the set operators, independent of the mask path.
    fn expansion_oracle(graph: &BipartiteGraph) -> Option<Ratio<u64>> {
        let mut best: Option<Ratio<u64>> = None;
        for side in Side::BOTH {
            let class = graph.class(side).to_vec();
            for mask in 1u64..1 << class.len() {
                let a = VertexSet::new(
                    graph,
                    side,
                    class
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v),
                )
                .unwrap();
                if !graph.is_small(&a) {
                    continue;
                }
                let n = graph.neighbourhood(&a).len() as u64;
                let c = graph.external_closure(&a).len() as u64;
                let r = Ratio::new(n - c, n);
                best = Some(best.map_or(r, |b| b.min(r)));
            }
        }
        best
    }

    #[test]
    fn expansion_examples() {
        let lim = Limits::default();
        let q3 = bipartite_expansion(&g(GraphFamily::Hypercube { dim: 3 }), &lim).unwrap();
        assert_eq!(q3.delta, Ratio::new(2, 3));
        assert!(!q3.vacuous);
        assert_eq!(q3.witness.unwrap().len(), 1);
        let c6 = bipartite_expansion(&g(GraphFamily::EvenCycle { len: 6 }), &lim).unwrap();
        assert_eq!(c6.delta, Ratio::new(1, 2));
        let q2 = bipartite_expansion(&g(GraphFamily::Hypercube { dim: 2 }), &lim).unwrap();
        assert!(q2.vacuous);
        assert_eq!(q2.delta, Ratio::from_integer(1));
    }

    #[test]
    fn expansion_matches_set_oracle() {
        for fam in [
            GraphFamily::Hypercube { dim: 3 },
            GraphFamily::Hypercube { dim: 4 },
            GraphFamily::EvenCycle { len: 8 },
            GraphFamily::EvenCycle { len: 10 },
            GraphFamily::Torus { side_len: 4, dim: 2 },
            GraphFamily::RandomRegular {
                n_even: 8,
                degree: 3,
                seed: 1,
            },
        ] {
            let graph = g(fam);
            let e = bipartite_expansion(&graph, &Limits::default()).unwrap();
            assert_eq!(Some(e.delta), expansion_oracle(&graph));
            let w = e.witness.unwrap();
            let n = graph.neighbourhood(&w).len() as u64;
            let c = graph.external_closure(&w).len() as u64;
            assert_eq!(Ratio::new(n - c, n), e.delta);
            assert!(e.delta <= Ratio::from_integer(1));
        }
    }

    #[test]
    fn expansion_guard_is_enforced() {
        let graph = g(GraphFamily::Hypercube { dim: 4 });
        let lim = Limits {
            expansion_class: 7,
            ..Limits::default()
        };
        assert!(matches!(
            bipartite_expansion(&graph, &lim),
            Err(crate::Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn locality_examples() {
        let lim = Limits::default();
        for d in 2..=5 {
            assert_eq!(locality(&g(GraphFamily::Hypercube { dim: d }), &lim).unwrap().ell, d);
            assert_eq!(
                locality(&g(GraphFamily::CompleteBipartite { degree: d }), &lim)
                    .unwrap()
                    .ell,
                d
            );
        }
        assert_eq!(locality(&g(GraphFamily::EvenCycle { len: 6 }), &lim).unwrap().ell, 2);
    }

    #[test]
    fn locality_witness_is_independent_and_maximum() {
        let lim = Limits::default();
        for fam in [
            GraphFamily::Hypercube { dim: 3 },
            GraphFamily::EvenCycle { len: 6 },
            GraphFamily::Torus { side_len: 4, dim: 2 },
        ] {
            let graph = g(fam);
            let loc = locality(&graph, &lim).unwrap();
            let d = graph.degree();
            assert_eq!(loc.independent_set.len(), 2 * d - loc.ell);
            let (x, y) = loc.edge;
            for &u in &loc.independent_set {
                assert!(graph.adjacent(u, x) || graph.adjacent(u, y));
                for &w in &loc.independent_set {
                    assert!(!graph.adjacent(u, w));
                }
            }
            // no edge admits a larger independent set: exhaustive subset scan
            for (x, y) in graph.edges() {
                let mut union: Vec<_> = graph.neighbours(x).iter().chain(graph.neighbours(y)).copied().collect();
                union.sort();
                union.dedup();
                for mask in 0u32..1 << union.len() {
                    let pick: Vec<_> = (0..union.len()).filter(|i| mask >> i & 1 == 1).map(|i| union[i]).collect();
                    let independent = pick.iter().all(|&u| pick.iter().all(|&w| !graph.adjacent(u, w)));
                    if independent {
                        assert!(pick.len() <= 2 * d - loc.ell);
                    }
                }
            }
        }
    }

    #[test]
    fn mis_on_small_graphs() {
        // path on 4 vertices
        let adj = [0b0010, 0b0101, 0b1010, 0b0100];
        assert_eq!(max_independent_set(&adj, 0b1111).count_ones(), 2);
        // triangle plus isolated vertex
        let adj = [0b0110, 0b0101, 0b0011, 0];
        assert_eq!(max_independent_set(&adj, 0b1111).count_ones(), 2);
        // 5-cycle
        let adj = [0b10010, 0b00101, 0b01010, 0b10100, 0b01001];
        assert_eq!(max_independent_set(&adj, 0b11111).count_ones(), 2);
    }
}
