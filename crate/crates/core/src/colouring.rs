//! Proper colourings, their enumeration, the zero-set decomposition count and
//! the balanced / heavy phase classification.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{guard, Error, Result};
use crate::graph::{BipartiteGraph, Side, Vertex, VertexSet};
use crate::invariants::locality;
use crate::limits::Limits;
use crate::pairs::PairKernel;

/// A total map from vertices to `{0, …, q-1}`. Properness is checked, not assumed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Colouring {
    q: u8,
    colours: Vec<u8>,
}

impl Colouring {
    pub fn new(q: u8, colours: Vec<u8>) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidInput("q must be positive".into()));
        }
        if let Some(v) = colours.iter().position(|&c| c >= q) {
            return Err(Error::InvalidInput(format!(
                "vertex {v} has colour {} but q = {q}",
                colours[v]
            )));
        }
        Ok(Self { q, colours })
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn colour(&self, v: Vertex) -> u8 {
        self.colours[v]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.colours
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    /// Copy with `v` recoloured to `colour`.
    pub fn with_colour(&self, v: Vertex, colour: u8) -> Self {
        let mut next = self.clone();
        next.colours[v] = colour;
        next
    }

    pub(crate) fn set(&mut self, v: Vertex, colour: u8) {
        self.colours[v] = colour;
    }

    /// Number of vertices where the two colourings differ.
    pub fn hamming_distance(&self, other: &Colouring) -> usize {
        self.colours
            .iter()
            .zip(&other.colours)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// First monochromatic edge, if any.
    pub fn conflict(&self, graph: &BipartiteGraph) -> Option<(Vertex, Vertex)> {
        graph
            .edges()
            .find(|&(u, v)| self.colours[u] == self.colours[v])
    }

    pub fn is_proper(&self, graph: &BipartiteGraph) -> bool {
        self.colours.len() == graph.vertex_count() && self.conflict(graph).is_none()
    }

    pub(crate) fn ensure_proper(&self, graph: &BipartiteGraph) -> Result<()> {
        if self.colours.len() != graph.vertex_count() {
            return Err(Error::InvalidInput(format!(
                "colouring has {} entries for {} vertices",
                self.colours.len(),
                graph.vertex_count()
            )));
        }
        match self.conflict(graph) {
            Some((u, v)) => Err(Error::Improper(u, v)),
            None => Ok(()),
        }
    }

    /// Whether `colour` at `v` clashes with no neighbour.
    pub fn admits(&self, graph: &BipartiteGraph, v: Vertex, colour: u8) -> bool {
        graph
            .neighbours(v)
            .iter()
            .all(|&w| self.colours[w] != colour)
    }

    /// `|χ⁻¹(i) ∩ class|` for every side and colour, indexed `[side][colour]`.
    pub fn class_counts(&self, graph: &BipartiteGraph) -> [Vec<usize>; 2] {
        let mut counts = [vec![0; self.q as usize], vec![0; self.q as usize]];
        for (v, &c) in self.colours.iter().enumerate() {
            let slot = match graph.side_of(v) {
                Side::Even => 0,
                Side::Odd => 1,
            };
            counts[slot][c as usize] += 1;
        }
        counts
    }
}

/// Depth-first enumeration of proper colourings in lexicographic vertex order.
pub struct ColouringIter<'g> {
    graph: &'g BipartiteGraph,
    q: u8,
    current: Vec<u8>,
    started: bool,
    done: bool,
}

impl ColouringIter<'_> {
    fn clashes(&self, k: usize, colour: u8) -> bool {
        self.graph
            .neighbours(k)
            .iter()
            .take_while(|&&w| w < k)
            .any(|&w| self.current[w] == colour)
    }
}

impl Iterator for ColouringIter<'_> {
    type Item = Colouring;

    fn next(&mut self) -> Option<Colouring> {
        if self.done {
            return None;
        }
        let n = self.current.len();
        let mut k = if self.started {
            self.current[n - 1] += 1;
            n - 1
        } else {
            self.started = true;
            self.current[0] = 0;
            0
        };
        loop {
            while self.current[k] < self.q && self.clashes(k, self.current[k]) {
                self.current[k] += 1;
            }
            if self.current[k] < self.q {
                if k + 1 == n {
                    return Some(Colouring {
                        q: self.q,
                        colours: self.current.clone(),
                    });
                }
                k += 1;
                self.current[k] = 0;
            } else if k == 0 {
                self.done = true;
                return None;
            } else {
                k -= 1;
                self.current[k] += 1;
            }
        }
    }
}

/// Every proper `q`-colouring exactly once, lexicographically by vertex index.
pub fn enumerate_colourings<'g>(
    graph: &'g BipartiteGraph,
    q: u8,
    limits: &Limits,
) -> Result<ColouringIter<'g>> {
    guard(
        "vertex count for colouring enumeration",
        graph.vertex_count(),
        limits.enumeration_vertices,
    )?;
    if q == 0 {
        return Err(Error::InvalidInput("q must be positive".into()));
    }
    Ok(ColouringIter {
        graph,
        q,
        current: vec![0; graph.vertex_count()],
        started: false,
        done: false,
    })
}

/// The zero set of a 3-colouring split by class: `E = χ⁻¹(0) ∩ E`, `O = χ⁻¹(0) ∩ O`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZeroSetPair {
    pub even_zero: VertexSet,
    pub odd_zero: VertexSet,
}

impl ZeroSetPair {
    pub fn new(even_zero: VertexSet, odd_zero: VertexSet) -> Result<Self> {
        if even_zero.side() != Side::Even || odd_zero.side() != Side::Odd {
            return Err(Error::InvalidInput(
                "zero-set pair needs an E-side and an O-side set".into(),
            ));
        }
        Ok(Self {
            even_zero,
            odd_zero,
        })
    }

    pub fn empty(graph: &BipartiteGraph) -> Self {
        Self {
            even_zero: VertexSet::empty(graph, Side::Even),
            odd_zero: VertexSet::empty(graph, Side::Odd),
        }
    }

    pub fn of_colouring(graph: &BipartiteGraph, colouring: &Colouring) -> Self {
        let pick = |side| {
            VertexSet::new(
                graph,
                side,
                graph
                    .class(side)
                    .iter()
                    .copied()
                    .filter(|&v| colouring.colour(v) == 0),
            )
            .expect("class members are on their side")
        };
        Self {
            even_zero: pick(Side::Even),
            odd_zero: pick(Side::Odd),
        }
    }

    pub(crate) fn from_masks(graph: &BipartiteGraph, e: u64, o: u64) -> Self {
        Self {
            even_zero: VertexSet::from_mask(graph, Side::Even, e),
            odd_zero: VertexSet::from_mask(graph, Side::Odd, o),
        }
    }

    /// `E ≁ O`: no edge joins the two sets.
    pub fn is_compatible(&self, graph: &BipartiteGraph) -> bool {
        self.even_zero
            .iter()
            .all(|u| graph.neighbours(u).iter().all(|&w| !self.odd_zero.contains(w)))
    }

    /// `I = I(E)`, on the O-side.
    pub fn inner_even(&self, graph: &BipartiteGraph) -> VertexSet {
        graph.internal_closure(&self.even_zero)
    }

    /// `J = I(O)`, on the E-side.
    pub fn inner_odd(&self, graph: &BipartiteGraph) -> VertexSet {
        graph.internal_closure(&self.odd_zero)
    }

    /// `R = V ∖ (E ∪ O ∪ I ∪ J)`.
    pub fn remainder(&self, graph: &BipartiteGraph) -> Vec<Vertex> {
        let i = self.inner_even(graph);
        let j = self.inner_odd(graph);
        (0..graph.vertex_count())
            .filter(|&v| {
                !(self.even_zero.contains(v)
                    || self.odd_zero.contains(v)
                    || i.contains(v)
                    || j.contains(v))
            })
            .collect()
    }
}

/// `|C₃(E, O)|`: zero when `E ∼ O`, otherwise `2^{|I| + |J| + comp(R)}`.
pub fn count_zero_set(graph: &BipartiteGraph, pair: &ZeroSetPair) -> BigUint {
    if !pair.is_compatible(graph) {
        return BigUint::zero();
    }
    let exponent = pair.inner_even(graph).len()
        + pair.inner_odd(graph).len()
        + graph.component_count(pair.remainder(graph));
    BigUint::one() << exponent
}

/// `|C₃|` as the sum of `count_zero_set` over all compatible pairs.
pub fn count_via_decomposition(graph: &BipartiteGraph, limits: &Limits) -> Result<BigUint> {
    let kernel = PairKernel::new(graph, limits)?;
    let mut by_exponent = vec![0u64; graph.vertex_count() + 1];
    for e in kernel.subsets() {
        for o in kernel.subsets() {
            if !kernel.compatible(e, o) {
                continue;
            }
            let st = kernel.stats(e, o);
            let exp = st.inner_even.count_ones() + st.inner_odd.count_ones() + st.components;
            by_exponent[exp as usize] += 1;
        }
    }
    Ok(by_exponent
        .iter()
        .enumerate()
        .fold(BigUint::zero(), |acc, (exp, &n)| acc + (BigUint::from(n) << exp)))
}

/// The imbalance threshold `ρ`, held as an exact rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rho(Ratio<u64>);

impl Rho {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 || numer > denom {
            return Err(Error::InvalidInput(format!("rho {numer}/{denom} not in [0, 1]")));
        }
        Ok(Self(Ratio::new(numer, denom)))
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// `count > ρ·m`, compared exactly.
    pub fn exceeded_by(&self, count: u64, m: u64) -> bool {
        count as u128 * *self.0.denom() as u128 > *self.0.numer() as u128 * m as u128
    }
}

impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rho {
    type Err = Error;

    /// Accepts exact decimals (`0.22`) and fractions (`11/50`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse rho {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return Rho::new(n, d);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let denom = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let numer = int
            .checked_mul(denom)
            .and_then(|x| x.checked_add(frac))
            .ok_or_else(bad)?;
        Rho::new(numer, denom)
    }
}

/// Classification of one colour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Phase {
    /// `|χ⁻¹(i) ∩ E| > |χ⁻¹(i) ∩ O| + ρM`.
    EvenHeavy,
    /// `|χ⁻¹(i) ∩ O| > |χ⁻¹(i) ∩ E| + ρM`.
    OddHeavy,
    Balanced,
}

impl Phase {
    pub fn tag(self) -> char {
        match self {
            Phase::EvenHeavy => 'E',
            Phase::OddHeavy => 'O',
            Phase::Balanced => 'b',
        }
    }

    pub(crate) fn classify(even: usize, odd: usize, rho: Rho, m: usize) -> Phase {
        if even > odd && rho.exceeded_by((even - odd) as u64, m as u64) {
            Phase::EvenHeavy
        } else if odd > even && rho.exceeded_by((odd - even) as u64, m as u64) {
            Phase::OddHeavy
        } else {
            Phase::Balanced
        }
    }
}

/// Per-colour phase of a 3-colouring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PhaseLabel(pub [Phase; 3]);

impl PhaseLabel {
    pub fn colour(&self, i: usize) -> Phase {
        self.0[i]
    }

    pub fn any_balanced(&self) -> bool {
        self.0.contains(&Phase::Balanced)
    }

    /// The piece `R₃^{(x,y,z)}` containing the colouring, or `None` if some
    /// colour is balanced.
    pub fn region(&self) -> Option<[Side; 3]> {
        let mut out = [Side::Even; 3];
        for (slot, phase) in out.iter_mut().zip(self.0) {
            *slot = match phase {
                Phase::EvenHeavy => Side::Even,
                Phase::OddHeavy => Side::Odd,
                Phase::Balanced => return None,
            };
        }
        Some(out)
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "{}{}{}", a.tag(), b.tag(), c.tag())
    }
}

fn ensure_three(colouring: &Colouring) -> Result<()> {
    if colouring.q() != 3 {
        return Err(Error::InvalidInput(format!(
            "phase classification needs q = 3, got {}",
            colouring.q()
        )));
    }
    Ok(())
}

pub fn phase_label(graph: &BipartiteGraph, colouring: &Colouring, rho: Rho) -> Result<PhaseLabel> {
    ensure_three(colouring)?;
    colouring.ensure_proper(graph)?;
    Ok(label_from_counts(&colouring.class_counts(graph), rho, graph.half()))
}

pub(crate) fn label_from_counts(counts: &[Vec<usize>; 2], rho: Rho, m: usize) -> PhaseLabel {
    PhaseLabel(std::array::from_fn(|i| {
        Phase::classify(counts[0][i], counts[1][i], rho, m)
    }))
}

/// `| |χ⁻¹(i) ∩ E|/|E| − |χ⁻¹(i) ∩ O|/|O| |`.
pub fn imbalance(graph: &BipartiteGraph, colouring: &Colouring, colour: u8) -> Result<Ratio<u64>> {
    colouring.ensure_proper(graph)?;
    if colour >= colouring.q() {
        return Err(Error::InvalidInput(format!("colour {colour} out of range")));
    }
    let counts = colouring.class_counts(graph);
    let (e, o) = (counts[0][colour as usize], counts[1][colour as usize]);
    Ok(Ratio::new(e.abs_diff(o) as u64, graph.half() as u64))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub balanced: u64,
    pub even_heavy: u64,
    pub odd_heavy: u64,
}

impl ClassCounts {
    pub fn total(&self) -> u64 {
        self.balanced + self.even_heavy + self.odd_heavy
    }
}

/// `|C₃^{b,ρ,i}|`, `|C₃^{E,ρ,i}|`, `|C₃^{O,ρ,i}|` for each colour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSizes {
    pub rho: Rho,
    pub total: u64,
    pub colours: [ClassCounts; 3],
}

impl ClassSizes {
    /// CSV with columns `colour,balanced,e_heavy,o_heavy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("colour,balanced,e_heavy,o_heavy\n");
        for (i, c) in self.colours.iter().enumerate() {
            out.push_str(&format!("{i},{},{},{}\n", c.balanced, c.even_heavy, c.odd_heavy));
        }
        out
    }
}

pub fn class_sizes(graph: &BipartiteGraph, rho: Rho, limits: &Limits) -> Result<ClassSizes> {
    let mut colours = [ClassCounts::default(); 3];
    let mut total = 0;
    for chi in enumerate_colourings(graph, 3, limits)? {
        total += 1;
        let label = label_from_counts(&chi.class_counts(graph), rho, graph.half());
        for (slot, phase) in colours.iter_mut().zip(label.0) {
            match phase {
                Phase::Balanced => slot.balanced += 1,
                Phase::EvenHeavy => slot.even_heavy += 1,
                Phase::OddHeavy => slot.odd_heavy += 1,
            }
        }
    }
    Ok(ClassSizes {
        rho,
        total,
        colours,
    })
}

/// Outcome of the exhaustive `comp(R) <= 2M/ℓ` scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentBound {
    pub max_components: usize,
    pub ell: usize,
    /// `2M / ℓ`.
    pub bound: Ratio<u64>,
    pub holds: bool,
    /// A compatible pair attaining `max_components`.
    pub witness: ZeroSetPair,
}

pub fn verify_component_bound(graph: &BipartiteGraph, limits: &Limits) -> Result<ComponentBound> {
    let kernel = PairKernel::new(graph, limits)?;
    let ell = locality(graph, limits)?.ell;
    if ell == 0 {
        return Err(Error::InvalidInput("locality is zero; 2M/ℓ undefined".into()));
    }
    let mut best = (0u32, 0u64, 0u64);
    for e in kernel.subsets() {
        for o in kernel.subsets() {
            if kernel.compatible(e, o) {
                let c = kernel.stats(e, o).components;
                if c > best.0 {
                    best = (c, e, o);
                }
            }
        }
    }
    let bound = Ratio::new(2 * graph.half() as u64, ell as u64);
    let max_components = best.0 as usize;
    Ok(ComponentBound {
        max_components,
        ell,
        bound,
        holds: Ratio::from_integer(max_components as u64) <= bound,
        witness: ZeroSetPair::from_masks(graph, best.1, best.2),
    })
}
