//! Height functions: graph homomorphisms `V → ℤ` pinned at a root, their
//! reduction mod 3 to proper 3-colourings, the inverse built level by level,
//! and the path to a 2-colouring that witnesses ergodicity.

use std::collections::BTreeSet;

use crate::colouring::Colouring;
use crate::dynamics::Move;
use crate::error::{Error, Result};
use crate::families::{build_graph, hypercube_vertex, GraphFamily};
use crate::graph::{BipartiteGraph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeightFunction {
    root: Vertex,
    values: Vec<i64>,
}

impl HeightFunction {
    /// Validates `values(root) = 0` and unit steps along every edge.
    pub fn new(graph: &BipartiteGraph, root: Vertex, values: Vec<i64>) -> Result<Self> {
        if values.len() != graph.vertex_count() || root >= values.len() {
            return Err(Error::InvalidInput(format!(
                "height function needs {} values and a root in range",
                graph.vertex_count()
            )));
        }
        if values[root] != 0 {
            return Err(Error::InvalidInput(format!(
                "height at root {root} is {}, not 0",
                values[root]
            )));
        }
        if let Some((x, y)) = graph
            .edges()
            .find(|&(x, y)| (values[x] - values[y]).abs() != 1)
        {
            return Err(Error::InvalidInput(format!(
                "heights {} and {} on edge {x}-{y} differ by more than one",
                values[x], values[y]
            )));
        }
        Ok(Self { root, values })
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, v: Vertex) -> i64 {
        self.values[v]
    }

    /// The set of values taken, `R(f)`.
    pub fn range(&self) -> BTreeSet<i64> {
        self.values.iter().copied().collect()
    }
}

/// `Φ(f)(v) = f(v) mod 3`.
pub fn phi(f: &HeightFunction) -> Colouring {
    let colours = f.values.iter().map(|&h| h.rem_euclid(3) as u8).collect();
    Colouring::new(3, colours).expect("residues mod 3 are valid colours")
}

/// BFS levels `L_0 = {v₀}, L_1, …`; errors if the graph is disconnected.
fn levels(graph: &BipartiteGraph, root: Vertex) -> Result<Vec<Vec<Vertex>>> {
    let dist = graph.distances_from(root);
    let mut out: Vec<Vec<Vertex>> = Vec::new();
    for (v, d) in dist.iter().enumerate() {
        let d = d.ok_or_else(|| Error::InvalidInput(format!("vertex {v} is unreachable from the root")))?;
        if out.len() <= d {
            out.resize(d + 1, Vec::new());
        }
        out[d].push(v);
    }
    Ok(out)
}

/// Checks that any two vertices of one level with a common upper neighbour
/// also share a neighbour one level further down.
pub fn check_level_structure(graph: &BipartiteGraph, root: Vertex) -> Result<()> {
    let dist = graph.distances_from(root);
    let level = |v: Vertex| dist[v];
    for upper in 0..graph.vertex_count() {
        let Some(k) = level(upper) else {
            return Err(Error::InvalidInput(format!("vertex {upper} is unreachable from the root")));
        };
        if k < 2 {
            continue;
        }
        let lower: Vec<Vertex> = graph
            .neighbours(upper)
            .iter()
            .copied()
            .filter(|&y| level(y) == Some(k - 1))
            .collect();
        for (i, &first) in lower.iter().enumerate() {
            for &second in &lower[i + 1..] {
                let shared = graph.neighbours(first).iter().any(|&w| {
                    level(w) == Some(k - 2) && graph.adjacent(w, second)
                });
                if !shared {
                    return Err(Error::Structural {
                        upper,
                        first,
                        second,
                    });
                }
            }
        }
    }
    Ok(())
}

/// The unique height function `f` with `f(root) = 0` and `Φ(f) = χ`.
pub fn phi_inverse(graph: &BipartiteGraph, chi: &Colouring, root: Vertex) -> Result<HeightFunction> {
    if chi.q() != 3 || chi.len() != graph.vertex_count() {
        return Err(Error::InvalidInput("expected a 3-colouring of the graph".into()));
    }
    chi.ensure_proper(graph)?;
    if root >= graph.vertex_count() || chi.colour(root) != 0 {
        return Err(Error::InvalidInput(format!("root {root} must carry colour 0")));
    }
    check_level_structure(graph, root)?;
    let levels = levels(graph, root)?;
    let mut values: Vec<Option<i64>> = vec![None; graph.vertex_count()];
    values[root] = Some(0);
    for level in levels.iter().skip(1) {
        for &v in level {
            let below: BTreeSet<i64> = graph
                .neighbours(v)
                .iter()
                .filter_map(|&y| values[y])
                .collect();
            let target = chi.colour(v) as i64;
            let h = match below.iter().copied().collect::<Vec<_>>()[..] {
                [y] => {
                    if (y + 1).rem_euclid(3) == target {
                        y + 1
                    } else {
                        y - 1
                    }
                }
                [lo, hi] if hi == lo + 2 && (lo + 1).rem_euclid(3) == target => lo + 1,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "lower neighbours of vertex {v} carry heights {below:?}"
                    )))
                }
            };
            values[v] = Some(h);
        }
    }
    let values = values.into_iter().map(|h| h.expect("every level assigned")).collect();
    HeightFunction::new(graph, root, values)
}

/// One reduction: lower the lowest-indexed vertex at the largest positive
/// value by 2, or, with no positive values, raise one at the smallest value
/// by 2. `None` once `|R(f)| <= 2`.
pub fn reduction_step(f: &HeightFunction) -> Option<(HeightFunction, Move)> {
    let range = f.range();
    if range.len() <= 2 {
        return None;
    }
    let max = *range.last().unwrap();
    let (target, shift) = if max > 0 {
        (max, -2)
    } else {
        (*range.first().unwrap(), 2)
    };
    let vertex = f.values.iter().position(|&h| h == target).unwrap();
    let mut next = f.clone();
    next.values[vertex] += shift;
    let mv = Move {
        vertex,
        from: target.rem_euclid(3) as u8,
        to: (target + shift).rem_euclid(3) as u8,
    };
    Some((next, mv))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErgodicityPath {
    /// `χ⁰, …, χᵀ`, starting at the input and ending at a 2-colouring.
    pub states: Vec<Colouring>,
    pub moves: Vec<Move>,
}

/// Single-vertex recolourings from `χ` to a 2-colouring, each a legal Glauber move.
pub fn ergodicity_path(graph: &BipartiteGraph, chi: &Colouring, root: Vertex) -> Result<ErgodicityPath> {
    let mut f = phi_inverse(graph, chi, root)?;
    let mut states = vec![chi.clone()];
    let mut moves = Vec::new();
    while let Some((next, mv)) = reduction_step(&f) {
        states.push(phi(&next));
        moves.push(mv);
        f = next;
    }
    Ok(ErgodicityPath { states, moves })
}

/// Proper 4-colouring of `Q_3` in which every face carries all four colours,
/// seeded by `000→0, 100→1, 010→2, 001→3`.
pub fn frozen_four_colouring() -> Colouring {
    let seed = [("000", 0u8), ("100", 1), ("010", 2), ("001", 3)];
    let mut colours: Vec<Option<u8>> = vec![None; 8];
    for (bits, c) in seed {
        colours[hypercube_vertex(bits).unwrap()] = Some(c);
    }
    // a face fixes one coordinate and varies the other two
    let faces: Vec<[Vertex; 4]> = (0..3)
        .flat_map(|fixed| {
            let (a, b) = match fixed {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            [0, 1 << fixed].map(|base| [base, base | 1 << a, base | 1 << b, base | 1 << a | 1 << b])
        })
        .collect();
    while colours.iter().any(Option::is_none) {
        let face = faces
            .iter()
            .find(|f| f.iter().filter(|&&v| colours[v].is_none()).count() == 1)
            .expect("face rule determines the colouring");
        let missing = (0..4u8)
            .find(|&c| !face.iter().any(|&v| colours[v] == Some(c)))
            .unwrap();
        let v = *face.iter().find(|&&v| colours[v].is_none()).unwrap();
        colours[v] = Some(missing);
    }
    Colouring::new(4, colours.into_iter().map(Option::unwrap).collect()).unwrap()
}

/// The hypercube on which [`frozen_four_colouring`] lives.
pub fn frozen_host() -> BipartiteGraph {
    build_graph(&GraphFamily::Hypercube { dim: 3 }).unwrap()
}

/// No single-vertex recolouring with one of `q` colours gives a different proper colouring.
pub fn is_frozen(graph: &BipartiteGraph, chi: &Colouring, q: u8) -> Result<bool> {
    if chi.len() != graph.vertex_count() || chi.as_slice().iter().any(|&c| c >= q) {
        return Err(Error::InvalidInput(format!("not a {q}-colouring of the graph")));
    }
    chi.ensure_proper(graph)?;
    Ok((0..graph.vertex_count())
        .all(|v| (0..q).all(|c| c == chi.colour(v) || !chi.admits(graph, v, c))))
}
