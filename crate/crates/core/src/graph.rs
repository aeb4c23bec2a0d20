//! Regular bipartite graphs, vertex subsets of one partition class, and the
//! neighbourhood and closure operators the rest of the crate is built on.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global vertex identifier, `0..N`.
pub type Vertex = usize;

/// Partition class of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Even,
    Odd,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Even, Side::Odd];

    pub fn opposite(self) -> Side {
        match self {
            Side::Even => Side::Odd,
            Side::Odd => Side::Even,
        }
    }

    pub fn tag(self) -> char {
        match self {
            Side::Even => 'E',
            Side::Odd => 'O',
        }
    }

    fn slot(self) -> usize {
        match self {
            Side::Even => 0,
            Side::Odd => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" | "e" | "even" => Ok(Side::Even),
            "O" | "o" | "odd" => Ok(Side::Odd),
            other => Err(Error::InvalidInput(format!("unknown side {other:?}"))),
        }
    }
}

/// A `d`-regular bipartite graph with an explicit (E, O) partition.
///
/// Immutable after construction; every constructor validates regularity,
/// simplicity and that each edge crosses the partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    degree: usize,
    adjacency: Vec<Vec<Vertex>>,
    side: Vec<Side>,
    local: Vec<usize>,
    classes: [Vec<Vertex>; 2],
}

impl BipartiteGraph {
    /// Builds a graph from global vertex sides and an undirected edge list.
    pub fn from_edges(sides: Vec<Side>, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let n = sides.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge {u}-{v} out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if sides[u] == sides[v] {
                return Err(Error::InvalidGraph(format!(
                    "edge {u}-{v} does not cross the partition"
                )));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("parallel edge {v}-{}", w[0])));
            }
        }
        let degree = adjacency[0].len();
        if degree == 0 {
            return Err(Error::InvalidGraph("degree must be positive".into()));
        }
        if let Some(v) = adjacency.iter().position(|a| a.len() != degree) {
            return Err(Error::InvalidGraph(format!(
                "vertex {v} has degree {} but vertex 0 has degree {degree}",
                adjacency[v].len()
            )));
        }
        let mut classes: [Vec<Vertex>; 2] = [Vec::new(), Vec::new()];
        let mut local = vec![0; n];
        for (v, s) in sides.iter().enumerate() {
            local[v] = classes[s.slot()].len();
            classes[s.slot()].push(v);
        }
        if classes[0].len() != classes[1].len() {
            return Err(Error::InvalidGraph(format!(
                "class sizes differ: {} even, {} odd",
                classes[0].len(),
                classes[1].len()
            )));
        }
        Ok(Self {
            degree,
            adjacency,
            side: sides,
            local,
            classes,
        })
    }

    /// Builds a graph whose E-class is `0..n_even` and O-class `n_even..n_even+n_odd`,
    /// from edges given as (E-local, O-local) index pairs.
    pub fn from_class_edges(n_even: usize, n_odd: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut sides = vec![Side::Even; n_even];
        sides.extend(std::iter::repeat_n(Side::Odd, n_odd));
        let mut global = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n_even || v >= n_odd {
                return Err(Error::InvalidGraph(format!("edge {u} {v} out of range")));
            }
            global.push((u, n_even + v));
        }
        Self::from_edges(sides, &global)
    }

    /// `N`, the number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.side.len()
    }

    /// `M = N / 2`, the size of each partition class.
    pub fn half(&self) -> usize {
        self.classes[0].len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn edge_count(&self) -> usize {
        self.half() * self.degree
    }

    pub fn class(&self, side: Side) -> &[Vertex] {
        &self.classes[side.slot()]
    }

    pub fn class_size(&self, side: Side) -> usize {
        self.classes[side.slot()].len()
    }

    pub fn side_of(&self, v: Vertex) -> Side {
        self.side[v]
    }

    /// Position of `v` within its own partition class.
    pub fn local_index(&self, v: Vertex) -> usize {
        self.local[v]
    }

    pub fn vertex_at(&self, side: Side, index: usize) -> Option<Vertex> {
        self.classes[side.slot()].get(index).copied()
    }

    pub fn neighbours(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Every edge once, as (E-vertex, O-vertex), in increasing E order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.class(Side::Even)
            .iter()
            .flat_map(move |&u| self.adjacency[u].iter().map(move |&v| (u, v)))
    }

    /// `N(A)`, on the side opposite to `A`.
    pub fn neighbourhood(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self, set.side.opposite());
        for v in set.iter() {
            for &w in &self.adjacency[v] {
                out.members.insert(w);
            }
        }
        out
    }

    /// External closure `[A] = {x : N(x) ⊆ N(A)}`, on the side of `A`.
    pub fn external_closure(&self, set: &VertexSet) -> VertexSet {
        let nbhd = self.neighbourhood(set);
        self.vertices_covered_by(set.side, &nbhd)
    }

    /// Internal closure `I(T) = {x : N(x) ⊆ T}`, on the side opposite to `T`.
    pub fn internal_closure(&self, set: &VertexSet) -> VertexSet {
        self.vertices_covered_by(set.side.opposite(), set)
    }

    /// Vertices of `side` whose whole neighbourhood lies in `cover`.
    fn vertices_covered_by(&self, side: Side, cover: &VertexSet) -> VertexSet {
        debug_assert_eq!(cover.side, side.opposite());
        let mut out = VertexSet::empty(self, side);
        for &x in self.class(side) {
            if self.adjacency[x].iter().all(|&w| cover.contains(w)) {
                out.members.insert(x);
            }
        }
        out
    }

    /// `|[A]| <= N/4`.
    pub fn is_small(&self, set: &VertexSet) -> bool {
        4 * self.external_closure(set).len() <= self.vertex_count()
    }

    /// Number of connected components of the subgraph induced by `members`.
    pub fn component_count<I: IntoIterator<Item = Vertex>>(&self, members: I) -> usize {
        let mut inside = FixedBitSet::with_capacity(self.vertex_count());
        for v in members {
            inside.insert(v);
        }
        let mut seen = FixedBitSet::with_capacity(self.vertex_count());
        let mut queue = VecDeque::new();
        let mut count = 0;
        for start in inside.ones() {
            if seen.put(start) {
                continue;
            }
            count += 1;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if inside.contains(w) && !seen.put(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    /// Breadth-first distances from `root`; `None` for unreachable vertices.
    pub fn distances_from(&self, root: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let next = dist[v].map(|d| d + 1);
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }

    /// Augmenting-path (Kuhn) matching from the E-class into the O-class.
    pub fn has_perfect_matching(&self) -> bool {
        self.maximum_matching().len() == self.half()
    }

    /// A maximum matching as (E-vertex, O-vertex) pairs.
    pub fn maximum_matching(&self) -> Vec<(Vertex, Vertex)> {
        let n = self.vertex_count();
        let mut mate: Vec<Option<Vertex>> = vec![None; n];
        for &u in self.class(Side::Even) {
            let mut visited = FixedBitSet::with_capacity(n);
            self.augment(u, &mut mate, &mut visited);
        }
        self.class(Side::Even)
            .iter()
            .filter_map(|&u| mate[u].map(|v| (u, v)))
            .collect()
    }

    fn augment(&self, u: Vertex, mate: &mut [Option<Vertex>], visited: &mut FixedBitSet) -> bool {
        for &v in &self.adjacency[u] {
            if visited.put(v) {
                continue;
            }
            let free = match mate[v] {
                None => true,
                Some(w) => self.augment(w, mate, visited),
            };
            if free {
                mate[v] = Some(u);
                mate[u] = Some(v);
                return true;
            }
        }
        false
    }

    /// Per-vertex neighbour masks for `side`, over local indices of the opposite class.
    ///
    /// Callers must ensure the opposite class has at most 64 vertices.
    pub(crate) fn neighbour_masks(&self, side: Side) -> Vec<u64> {
        debug_assert!(self.class_size(side.opposite()) <= 64);
        self.class(side)
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .fold(0u64, |m, &w| m | (1 << self.local[w]))
            })
            .collect()
    }
}

/// A subset of a single partition class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    side: Side,
    members: FixedBitSet,
}

impl VertexSet {
    pub fn empty(graph: &BipartiteGraph, side: Side) -> Self {
        Self {
            side,
            members: FixedBitSet::with_capacity(graph.vertex_count()),
        }
    }

    /// The whole partition class `side`.
    pub fn class(graph: &BipartiteGraph, side: Side) -> Self {
        let mut set = Self::empty(graph, side);
        for &v in graph.class(side) {
            set.members.insert(v);
        }
        set
    }

    /// Builds a set from global vertex ids, rejecting vertices of the wrong class.
    pub fn new<I: IntoIterator<Item = Vertex>>(
        graph: &BipartiteGraph,
        side: Side,
        vertices: I,
    ) -> Result<Self> {
        let mut set = Self::empty(graph, side);
        for v in vertices {
            if v >= graph.vertex_count() {
                return Err(Error::InvalidInput(format!("vertex {v} out of range")));
            }
            if graph.side_of(v) != side {
                return Err(Error::InvalidInput(format!(
                    "vertex {v} is not in class {side}"
                )));
            }
            set.members.insert(v);
        }
        Ok(set)
    }

    /// Builds a set from a mask over local indices of `side`.
    pub(crate) fn from_mask(graph: &BipartiteGraph, side: Side, mask: u64) -> Self {
        let mut set = Self::empty(graph, side);
        let class = graph.class(side);
        let mut m = mask;
        while m != 0 {
            set.members.insert(class[m.trailing_zeros() as usize]);
            m &= m - 1;
        }
        set
    }

    /// Mask over local indices; the class must have at most 64 vertices.
    pub(crate) fn to_mask(&self, graph: &BipartiteGraph) -> u64 {
        self.iter().fold(0, |m, v| m | (1 << graph.local_index(v)))
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members.contains(v)
    }

    /// Members in increasing global id.
    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.members.ones()
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.side == other.side && self.members.is_subset(&other.members)
    }

    /// Number of neighbours of `v` inside this set, `d_S(v)`.
    pub fn degree_into(&self, graph: &BipartiteGraph, v: Vertex) -> usize {
        graph
            .neighbours(v)
            .iter()
            .filter(|&&w| self.contains(w))
            .count()
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.side
            .cmp(&other.side)
            .then_with(|| self.iter().cmp(other.iter()))
    }
}
