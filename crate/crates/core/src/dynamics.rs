//! Glauber dynamics: sampling steps, exact transition matrices, exact mixing
//! times and the bottleneck lower bound `τ ≥ π(A) / (8 π(M))`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::colouring::{enumerate_colourings, label_from_counts, Colouring, Phase, PhaseLabel, Rho};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side, Vertex};
use crate::limits::Limits;

/// Tolerance around the `1/e` threshold below which a mixing time is reported ambiguous.
pub const TV_TOLERANCE: f64 = 1e-12;

/// Generator behind every randomized routine; seeded from a single `u64`.
pub type ChainRng = ChaCha8Rng;

/// Independent stream `index` derived from a base seed as `seed ^ index`.
pub fn stream_rng(seed: u64, index: u64) -> ChainRng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// Propose a uniform colour from `{0, …, q-1}`; reject improper results.
    Plain,
    /// Propose a uniform colour not used on the neighbourhood.
    Restricted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub q: u8,
    pub variant: Variant,
    /// Declared `ρ`: the chain recolours at most `ρN` vertices per step.
    pub locality: Option<Rho>,
}

impl ChainSpec {
    pub fn glauber(q: u8) -> Self {
        Self {
            q,
            variant: Variant::Plain,
            locality: None,
        }
    }

    pub fn restricted(q: u8) -> Self {
        Self {
            q,
            variant: Variant::Restricted,
            ..Self::glauber(q)
        }
    }

    /// A single-site chain on `n` vertices is ρ-local iff `ρn >= 1`.
    pub fn is_local(&self, n: usize) -> bool {
        self.locality.is_none_or(|rho| {
            let r = rho.ratio();
            r.numer() * n as u64 >= *r.denom()
        })
    }
}

/// A single recolouring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    pub vertex: Vertex,
    pub from: u8,
    pub to: u8,
}

/// Colours that `v` may legally take.
fn allowed_colours(graph: &BipartiteGraph, chi: &Colouring, v: Vertex) -> Vec<u8> {
    (0..chi.q()).filter(|&c| chi.admits(graph, v, c)).collect()
}

/// One step of the chain, in place. Returns the move if the state changed.
pub(crate) fn step_in_place<R: Rng>(
    graph: &BipartiteGraph,
    chi: &mut Colouring,
    spec: &ChainSpec,
    rng: &mut R,
) -> Option<Move> {
    let v = rng.gen_range(0..graph.vertex_count());
    let from = chi.colour(v);
    let to = match spec.variant {
        Variant::Plain => {
            let j = rng.gen_range(0..spec.q);
            if !chi.admits(graph, v, j) {
                return None;
            }
            j
        }
        Variant::Restricted => {
            let allowed = allowed_colours(graph, chi, v);
            if allowed.is_empty() {
                return None;
            }
            allowed[rng.gen_range(0..allowed.len())]
        }
    };
    if to == from {
        return None;
    }
    chi.set(v, to);
    Some(Move {
        vertex: v,
        from,
        to,
    })
}

fn ensure_chain_input(graph: &BipartiteGraph, chi: &Colouring, spec: &ChainSpec) -> Result<()> {
    if chi.q() != spec.q {
        return Err(Error::InvalidInput(format!(
            "colouring uses q = {} but the chain has q = {}",
            chi.q(),
            spec.q
        )));
    }
    chi.ensure_proper(graph)
}

/// One Glauber step from `chi`.
pub fn glauber_step<R: Rng>(
    graph: &BipartiteGraph,
    chi: &Colouring,
    spec: &ChainSpec,
    rng: &mut R,
) -> Result<Colouring> {
    ensure_chain_input(graph, chi, spec)?;
    let mut next = chi.clone();
    step_in_place(graph, &mut next, spec, rng);
    Ok(next)
}

/// Exact transition matrix over an enumerated state space.
///
/// Entries are integers over a common denominator, so every probability is
/// an exact rational and row sums are checked exactly.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    states: Vec<Colouring>,
    index: HashMap<Colouring, usize>,
    denominator: u64,
    /// Nonzero numerators per row, sorted by column.
    rows: Vec<Vec<(usize, u64)>>,
}

impl TransitionMatrix {
    /// Builds a matrix from explicit rows, validating that it is row-stochastic.
    pub fn from_rows(
        states: Vec<Colouring>,
        denominator: u64,
        mut rows: Vec<Vec<(usize, u64)>>,
    ) -> Result<Self> {
        if states.len() != rows.len() || denominator == 0 {
            return Err(Error::InvalidInput("malformed transition matrix".into()));
        }
        let n = states.len();
        for (i, row) in rows.iter_mut().enumerate() {
            row.retain(|&(_, p)| p > 0);
            row.sort_unstable();
            if row.windows(2).any(|w| w[0].0 == w[1].0) || row.iter().any(|&(j, _)| j >= n) {
                return Err(Error::InvalidInput(format!("row {i} has bad column indices")));
            }
            let total: u64 = row.iter().map(|&(_, p)| p).sum();
            if total != denominator {
                return Err(Error::InvalidInput(format!("row {i} sums to {total}/{denominator}")));
            }
        }
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self {
            states,
            index,
            denominator,
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Colouring] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Colouring {
        &self.states[i]
    }

    pub fn index_of(&self, chi: &Colouring) -> Option<usize> {
        self.index.get(chi).copied()
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// Nonzero `(column, numerator)` entries of row `i`.
    pub fn row(&self, i: usize) -> &[(usize, u64)] {
        &self.rows[i]
    }

    pub fn numerator(&self, i: usize, j: usize) -> u64 {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |&(c, _)| c)
            .map_or(0, |k| row[k].1)
    }

    pub fn probability(&self, i: usize, j: usize) -> Ratio<u64> {
        Ratio::new(self.numerator(i, j), self.denominator)
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.iter().map(|&(_, p)| p).sum::<u64>() == self.denominator)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| {
            self.rows[i]
                .iter()
                .all(|&(j, p)| self.numerator(j, i) == p)
        })
    }

    /// `uP = u` for the uniform vector `u`: every column sums to one.
    pub fn is_uniform_stationary(&self) -> bool {
        let mut cols = vec![0u64; self.len()];
        for row in &self.rows {
            for &(j, p) in row {
                cols[j] += p;
            }
        }
        cols.iter().all(|&c| c == self.denominator)
    }
}

/// Exact `P_q` (or its restricted variant) over all proper `q`-colourings.
pub fn build_transition_matrix(
    graph: &BipartiteGraph,
    spec: &ChainSpec,
    limits: &Limits,
) -> Result<TransitionMatrix> {
    let mut states = Vec::new();
    for chi in enumerate_colourings(graph, spec.q, limits)? {
        states.push(chi);
        if states.len() > limits.states {
            return Err(Error::GuardExceeded {
                what: "state space for transition matrix",
                limit: limits.states,
                actual: states.len(),
            });
        }
    }
    let n = graph.vertex_count() as u64;
    let denominator = match spec.variant {
        Variant::Plain => n * spec.q as u64,
        Variant::Restricted => n * (1..=spec.q as u64).fold(1, |acc, k| acc.lcm(&k)),
    };
    let index: HashMap<&Colouring, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let rows: Vec<Vec<(usize, u64)>> = states
        .par_iter()
        .enumerate()
        .map(|(i, chi)| {
            let mut row = Vec::new();
            for v in 0..graph.vertex_count() {
                let allowed = allowed_colours(graph, chi, v);
                let weight = match spec.variant {
                    Variant::Plain => denominator / (n * spec.q as u64),
                    Variant::Restricted => denominator / (n * allowed.len() as u64),
                };
                for &c in &allowed {
                    if c != chi.colour(v) {
                        row.push((index[&chi.with_colour(v, c)], weight));
                    }
                }
            }
            let moved: u64 = row.iter().map(|&(_, p)| p).sum();
            row.push((i, denominator - moved));
            row
        })
        .collect();
    drop(index);
    TransitionMatrix::from_rows(states, denominator, rows)
}

/// Detailed balance with respect to the uniform distribution, i.e. symmetry.
pub fn check_detailed_balance(matrix: &TransitionMatrix) -> bool {
    matrix.is_symmetric()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ergodicity {
    pub strongly_connected: bool,
    /// Period of the chain when strongly connected.
    pub period: Option<usize>,
}

impl Ergodicity {
    pub fn is_ergodic(&self) -> bool {
        self.strongly_connected && self.period == Some(1)
    }
}

fn reach(n: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut level = vec![None; n];
    if n == 0 {
        return level;
    }
    level[0] = Some(0);
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if level[w].is_none() {
                level[w] = Some(level[v].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

pub fn ergodicity(matrix: &TransitionMatrix) -> Ergodicity {
    let n = matrix.len();
    let forward: Vec<Vec<usize>> = (0..n)
        .map(|i| matrix.row(i).iter().map(|&(j, _)| j).collect())
        .collect();
    let mut backward = vec![Vec::new(); n];
    for (i, row) in forward.iter().enumerate() {
        for &j in row {
            backward[j].push(i);
        }
    }
    let levels = reach(n, &forward);
    let strongly_connected = n > 0
        && levels.iter().all(Option::is_some)
        && reach(n, &backward).iter().all(Option::is_some);
    let period = strongly_connected.then(|| {
        let mut g = 0usize;
        for (i, row) in forward.iter().enumerate() {
            for &j in row {
                let (li, lj) = (levels[i].unwrap(), levels[j].unwrap());
                g = g.gcd(&(li + 1).abs_diff(lj));
            }
        }
        g.max(1)
    });
    Ergodicity {
        strongly_connected,
        period,
    }
}

/// Strongly connected and aperiodic.
pub fn check_ergodic(matrix: &TransitionMatrix) -> bool {
    ergodicity(matrix).is_ergodic()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    /// `min { t : d_TV(P^t, π) <= 1/e }`.
    pub tau: usize,
    /// Worst-start total variation distance for `t = 0..=tau`.
    pub tv_curve: Vec<f64>,
    /// Start state attaining the worst distance at `t = tau`.
    pub worst_start: usize,
    /// Smallest distance of any curve value from `1/e`.
    pub threshold_gap: f64,
}

fn ensure_uniform_target(matrix: &TransitionMatrix) -> Result<()> {
    if !check_ergodic(matrix) {
        return Err(Error::NonErgodic);
    }
    if !matrix.is_uniform_stationary() {
        return Err(Error::InvalidInput(
            "uniform distribution is not stationary for this matrix".into(),
        ));
    }
    Ok(())
}

/// Advances every row of `dist` by one step of the chain.
fn advance(matrix: &TransitionMatrix, dist: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = matrix.len();
    let den = matrix.denominator() as f64;
    dist.par_iter()
        .map(|row| {
            let mut next = vec![0.0; n];
            for (i, &mass) in row.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for &(j, p) in matrix.row(i) {
                    next[j] += mass * (p as f64 / den);
                }
            }
            next
        })
        .collect()
}

fn tv_to_uniform(row: &[f64]) -> f64 {
    let u = 1.0 / row.len() as f64;
    0.5 * row.iter().map(|&p| (p - u).abs()).sum::<f64>()
}

/// Per-start total-variation curves `d_TV(P^t(s, ·), π)` for `t = 0..=steps`,
/// indexed `[start][t]`.
pub fn tv_curves(matrix: &TransitionMatrix, steps: usize) -> Result<Vec<Vec<f64>>> {
    ensure_uniform_target(matrix)?;
    let n = matrix.len();
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|s| (0..n).map(|j| if j == s { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut curves: Vec<Vec<f64>> = dist.iter().map(|r| vec![tv_to_uniform(r)]).collect();
    for _ in 0..steps {
        dist = advance(matrix, &dist);
        for (curve, row) in curves.iter_mut().zip(&dist) {
            curve.push(tv_to_uniform(row));
        }
    }
    Ok(curves)
}

/// Exact mixing time by powering from every start state.
///
/// Distances are accumulated in `f64`; a result whose curve passes within
/// [`TV_TOLERANCE`] of `1/e` is rejected as ambiguous.
pub fn exact_mixing_time(matrix: &TransitionMatrix, max_steps: usize) -> Result<MixingReport> {
    ensure_uniform_target(matrix)?;
    let threshold = (-1.0f64).exp();
    let n = matrix.len();
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|s| (0..n).map(|j| if j == s { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut curve = Vec::new();
    let mut gap = f64::INFINITY;
    for t in 0..=max_steps {
        if t > 0 {
            dist = advance(matrix, &dist);
        }
        let (worst_start, worst) = dist
            .iter()
            .map(|r| tv_to_uniform(r))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (s, d)| if d > best.1 { (s, d) } else { best });
        curve.push(worst);
        gap = gap.min((worst - threshold).abs());
        if gap < TV_TOLERANCE {
            return Err(Error::AmbiguousThreshold { step: t, gap });
        }
        if worst <= threshold {
            return Ok(MixingReport {
                tau: t,
                tv_curve: curve,
                worst_start,
                threshold_gap: gap,
            });
        }
    }
    Err(Error::StepLimit(max_steps))
}

/// A pair `(A, M)` of disjoint state sets for the bottleneck bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BottleneckCut {
    pub a: Vec<usize>,
    pub m: Vec<usize>,
}

impl BottleneckCut {
    pub fn new(matrix: &TransitionMatrix, mut a: Vec<usize>, mut m: Vec<usize>) -> Result<Self> {
        a.sort_unstable();
        a.dedup();
        m.sort_unstable();
        m.dedup();
        let n = matrix.len();
        if a.iter().chain(&m).any(|&i| i >= n) {
            return Err(Error::InvalidCut("state index out of range".into()));
        }
        if a.iter().any(|i| m.binary_search(i).is_ok()) {
            return Err(Error::InvalidCut("A and M overlap".into()));
        }
        Ok(Self { a, m })
    }

    /// `A = C₃^{side,ρ,colour}` (colour heavy on `side`), `M = C₃^{b,ρ,colour}`.
    pub fn phase_cut(
        graph: &BipartiteGraph,
        matrix: &TransitionMatrix,
        rho: Rho,
        colour: usize,
        side: Side,
    ) -> Result<Self> {
        let heavy = match side {
            Side::Even => Phase::EvenHeavy,
            Side::Odd => Phase::OddHeavy,
        };
        let mut a = Vec::new();
        let mut m = Vec::new();
        for (i, chi) in matrix.states().iter().enumerate() {
            if chi.q() != 3 {
                return Err(Error::InvalidCut("phase cuts need 3-colourings".into()));
            }
            let phase = label_from_counts(&chi.class_counts(graph), rho, graph.half()).colour(colour);
            if phase == heavy {
                a.push(i);
            } else if phase == Phase::Balanced {
                m.push(i);
            }
        }
        Self::new(matrix, a, m)
    }

    pub fn pi_a(&self, matrix: &TransitionMatrix) -> Ratio<u64> {
        Ratio::new(self.a.len() as u64, matrix.len() as u64)
    }

    pub fn pi_m(&self, matrix: &TransitionMatrix) -> Ratio<u64> {
        Ratio::new(self.m.len() as u64, matrix.len() as u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockingCheck {
    pub holds: bool,
    /// A transition from `A` straight to `Ω ∖ (A ∪ M)`.
    pub witness: Option<(usize, usize)>,
}

/// No nonzero transition leads from `A` to `Ω ∖ (A ∪ M)`.
pub fn verify_bottleneck_condition(matrix: &TransitionMatrix, cut: &BottleneckCut) -> BlockingCheck {
    let inside = |j: &usize| cut.a.binary_search(j).is_ok() || cut.m.binary_search(j).is_ok();
    for &i in &cut.a {
        if let Some(&(j, _)) = matrix.row(i).iter().find(|(j, _)| !inside(j)) {
            return BlockingCheck {
                holds: false,
                witness: Some((i, j)),
            };
        }
    }
    BlockingCheck {
        holds: true,
        witness: None,
    }
}

/// `π(A) / (8 π(M))` under the uniform distribution.
pub fn dfj_lower_bound(matrix: &TransitionMatrix, cut: &BottleneckCut) -> Result<Ratio<u64>> {
    if 2 * cut.a.len() > matrix.len() {
        return Err(Error::InvalidCut(format!(
            "pi(A) = {} exceeds 1/2",
            cut.pi_a(matrix)
        )));
    }
    let check = verify_bottleneck_condition(matrix, cut);
    if let Some((i, j)) = check.witness {
        return Err(Error::InvalidCut(format!(
            "transition {i} -> {j} escapes A without entering M"
        )));
    }
    if cut.m.is_empty() {
        return Err(Error::InvalidCut("M is empty".into()));
    }
    Ok(Ratio::new(cut.a.len() as u64, 8 * cut.m.len() as u64))
}

/// Starting configuration concentrated on one class: `colour` on every
/// vertex of `side`, the other two colours alternating (by local index) on
/// the opposite class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HeavyStart {
    pub side: Side,
    pub colour: u8,
}

impl HeavyStart {
    pub fn colouring(&self, graph: &BipartiteGraph) -> Result<Colouring> {
        if self.colour >= 3 {
            return Err(Error::InvalidInput(format!("colour {} out of range", self.colour)));
        }
        let others: Vec<u8> = (0..3).filter(|&c| c != self.colour).collect();
        let colours = (0..graph.vertex_count())
            .map(|v| {
                if graph.side_of(v) == self.side {
                    self.colour
                } else {
                    others[graph.local_index(v) % 2]
                }
            })
            .collect();
        Colouring::new(3, colours)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    /// Phase label at `t = 0..=steps`.
    pub labels: Vec<PhaseLabel>,
    /// `|χ⁻¹(0) ∩ E| − |χ⁻¹(0) ∩ O|` at `t = 0..=steps`.
    pub zero_difference: Vec<i64>,
    pub occupancy: BTreeMap<PhaseLabel, u64>,
    /// First `t` at which some colour is balanced.
    pub first_balanced: Option<usize>,
    pub final_state: Colouring,
    half: usize,
}

impl Trajectory {
    /// CSV with columns `t,phase_0,phase_1,phase_2,zero_imbalance`, where the
    /// last column is the signed difference divided by `M`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,phase_0,phase_1,phase_2,zero_imbalance\n");
        for (t, (label, diff)) in self.labels.iter().zip(&self.zero_difference).enumerate() {
            let [a, b, c] = label.0;
            out.push_str(&format!(
                "{t},{},{},{},{:.6}\n",
                a.tag(),
                b.tag(),
                c.tag(),
                *diff as f64 / self.half as f64
            ));
        }
        out
    }
}

/// Runs the chain for `steps` steps from `start`, recording phase labels.
pub fn simulate_trajectory(
    graph: &BipartiteGraph,
    start: &Colouring,
    spec: &ChainSpec,
    rho: Rho,
    steps: usize,
    seed: u64,
) -> Result<Trajectory> {
    ensure_chain_input(graph, start, spec)?;
    if spec.q != 3 {
        return Err(Error::InvalidInput("trajectories track 3-colourings".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let mut chi = start.clone();
    let mut counts = chi.class_counts(graph);
    let m = graph.half();
    let mut labels = Vec::with_capacity(steps + 1);
    let mut zero_difference = Vec::with_capacity(steps + 1);
    let mut occupancy = BTreeMap::new();
    let mut first_balanced = None;
    for t in 0..=steps {
        if t > 0 {
            if let Some(mv) = step_in_place(graph, &mut chi, spec, &mut rng) {
                let slot = (graph.side_of(mv.vertex) == Side::Odd) as usize;
                counts[slot][mv.from as usize] -= 1;
                counts[slot][mv.to as usize] += 1;
            }
        }
        let label = label_from_counts(&counts, rho, m);
        if first_balanced.is_none() && label.any_balanced() {
            first_balanced = Some(t);
        }
        *occupancy.entry(label).or_insert(0) += 1;
        labels.push(label);
        zero_difference.push(counts[0][0] as i64 - counts[1][0] as i64);
    }
    Ok(Trajectory {
        labels,
        zero_difference,
        occupancy,
        first_balanced,
        final_state: chi,
        half: m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Escape {
    /// Some colour became balanced at this step.
    Escaped(usize),
    Timeout,
}

/// Steps until a chain started from `start` first reaches `∪_i C₃^{b,ρ,i}`.
pub fn phase_escape_time(
    graph: &BipartiteGraph,
    spec: &ChainSpec,
    rho: Rho,
    start: HeavyStart,
    seed: u64,
    max_steps: usize,
) -> Result<Escape> {
    escape_with_rng(graph, spec, rho, start, &mut stream_rng(seed, 0), max_steps)
}

fn escape_with_rng(
    graph: &BipartiteGraph,
    spec: &ChainSpec,
    rho: Rho,
    start: HeavyStart,
    rng: &mut ChainRng,
    max_steps: usize,
) -> Result<Escape> {
    let mut chi = start.colouring(graph)?;
    ensure_chain_input(graph, &chi, spec)?;
    let m = graph.half();
    let mut counts = chi.class_counts(graph);
    if label_from_counts(&counts, rho, m).any_balanced() {
        return Ok(Escape::Escaped(0));
    }
    for t in 1..=max_steps {
        if let Some(mv) = step_in_place(graph, &mut chi, spec, rng) {
            let slot = (graph.side_of(mv.vertex) == Side::Odd) as usize;
            counts[slot][mv.from as usize] -= 1;
            counts[slot][mv.to as usize] += 1;
            if label_from_counts(&counts, rho, m).any_balanced() {
                return Ok(Escape::Escaped(t));
            }
        }
    }
    Ok(Escape::Timeout)
}

/// Escape times for `runs` independent runs; run `k` uses stream `seed ^ k`.
pub fn escape_ensemble(
    graph: &BipartiteGraph,
    spec: &ChainSpec,
    rho: Rho,
    start: HeavyStart,
    seed: u64,
    runs: usize,
    max_steps: usize,
) -> Result<Vec<Escape>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|k| escape_with_rng(graph, spec, rho, start, &mut stream_rng(seed, k), max_steps))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_graph, GraphFamily};
    use crate::heights::frozen_four_colouring;
    use num_bigint::BigUint;
    use num_traits::{ToPrimitive, Zero};

    fn q(d: usize) -> BipartiteGraph {
        build_graph(&GraphFamily::Hypercube { dim: d }).unwrap()
    }
    fn lim() -> Limits {
        Limits::default()
    }
    fn matrix(d: usize, qc: u8) -> TransitionMatrix {
        build_transition_matrix(&q(d), &ChainSpec::glauber(qc), &lim()).unwrap()
    }

    /// Mixing time by exact big-integer powering of the numerator matrix.
    fn exact_tau_oracle(m: &TransitionMatrix) -> usize {
        let n = m.len();
        let den = BigUint::from(m.denominator());
        let step: Vec<Vec<BigUint>> = (0..n)
            .map(|i| (0..n).map(|j| BigUint::from(m.numerator(i, j))).collect())
            .collect();
        let mut power: Vec<Vec<BigUint>> = (0..n)
            .map(|i| (0..n).map(|j| BigUint::from((i == j) as u32)).collect())
            .collect();
        let mut scale = BigUint::from(1u32);
        let inv_e = (-1.0f64).exp();
        for t in 0.. {
            let nn = BigUint::from(n);
            let worst = (0..n)
                .map(|s| {
                    let dev = (0..n).fold(BigUint::zero(), |acc, j| {
                        let a = &power[s][j] * &nn;
                        acc + if a > scale { &a - &scale } else { &scale - &a }
                    });
                    dev.to_f64().unwrap() / (2.0 * n as f64 * scale.to_f64().unwrap())
                })
                .fold(0.0, f64::max);
            if worst <= inv_e {
                return t;
            }
            power = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).fold(BigUint::zero(), |acc, k| acc + &power[i][k] * &step[k][j]))
                        .collect()
                })
                .collect();
            scale *= &den;
        }
        unreachable!()
    }

    #[test]
    fn q1_matrix_entries() {
        let m = matrix(1, 3);
        assert_eq!(m.len(), 6);
        for i in 0..6 {
            for j in 0..6 {
                if m.state(i).hamming_distance(m.state(j)) == 1 {
                    assert_eq!(m.probability(i, j), Ratio::new(1, 6));
                }
            }
        }
    }

    #[test]
    fn matrices_are_stochastic_symmetric_with_hamming_support() {
        for d in [2, 3] {
            let m = matrix(d, 3);
            assert_eq!(m.len(), if d == 2 { 18 } else { 114 });
            assert!(m.is_row_stochastic());
            assert!(m.is_symmetric());
            assert!(m.is_uniform_stationary());
            let nq = Ratio::new(1, (q(d).vertex_count() * 3) as u64);
            for i in 0..m.len() {
                for j in 0..m.len() {
                    let h = m.state(i).hamming_distance(m.state(j));
                    let p = m.probability(i, j);
                    match h {
                        0 => {}
                        1 => assert_eq!(p, nq),
                        _ => assert!(p.is_zero()),
                    }
                }
            }
        }
    }

    #[test]
    fn detailed_balance_and_ergodicity() {
        assert!(check_detailed_balance(&matrix(2, 3)));
        assert!(check_detailed_balance(&matrix(3, 3)));
        assert!(check_ergodic(&matrix(2, 3)));
        assert!(check_ergodic(&matrix(3, 3)));
        assert!(!check_ergodic(&matrix(3, 4)));
        let restricted = build_transition_matrix(&q(2), &ChainSpec::restricted(3), &lim()).unwrap();
        assert!(restricted.is_row_stochastic());
        assert!(check_detailed_balance(&restricted));
        assert!(check_ergodic(&restricted));
    }

    #[test]
    fn period_detects_bipartite_chain() {
        let states: Vec<_> = (0..2).map(|c| Colouring::new(2, vec![c]).unwrap()).collect();
        let m = TransitionMatrix::from_rows(states, 1, vec![vec![(1, 1)], vec![(0, 1)]]).unwrap();
        let e = ergodicity(&m);
        assert!(e.strongly_connected);
        assert_eq!(e.period, Some(2));
        assert!(!e.is_ergodic());
        assert!(matches!(exact_mixing_time(&m, 10), Err(Error::NonErgodic)));
    }

    #[test]
    fn frozen_state_is_isolated() {
        let m = matrix(3, 4);
        let i = m.index_of(&frozen_four_colouring()).unwrap();
        assert_eq!(m.row(i), &[(i, m.denominator())]);
        assert!(matches!(exact_mixing_time(&m, 10), Err(Error::NonErgodic)));
    }

    #[test]
    fn mixing_times_match_big_integer_oracle() {
        for d in [1, 2] {
            let m = matrix(d, 3);
            let report = exact_mixing_time(&m, 10_000).unwrap();
            assert_eq!(report.tau, exact_tau_oracle(&m));
            assert_eq!(report.tv_curve.len(), report.tau + 1);
            assert!(report.tv_curve.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        }
    }

    #[test]
    fn frozen_mixing_time_values() {
        assert_eq!(exact_mixing_time(&matrix(1, 3), 10_000).unwrap().tau, TAU_Q1);
        assert_eq!(exact_mixing_time(&matrix(2, 3), 10_000).unwrap().tau, TAU_Q2);
        assert_eq!(exact_mixing_time(&matrix(3, 3), 10_000).unwrap().tau, TAU_Q3);
    }

    const TAU_Q1: usize = 4;
    const TAU_Q2: usize = 20;
    const TAU_Q3: usize = 101;

    #[test]
    fn one_state_chain_mixes_immediately() {
        let m = TransitionMatrix::from_rows(vec![Colouring::new(1, vec![0]).unwrap()], 1, vec![vec![(0, 1)]]).unwrap();
        assert_eq!(exact_mixing_time(&m, 0).unwrap().tau, 0);
    }

    #[test]
    fn tv_curves_worst_case_matches_report() {
        let m = matrix(2, 3);
        let report = exact_mixing_time(&m, 1000).unwrap();
        let curves = tv_curves(&m, report.tau).unwrap();
        for t in 0..=report.tau {
            let worst = curves.iter().map(|c| c[t]).fold(0.0, f64::max);
            assert!((worst - report.tv_curve[t]).abs() < 1e-15);
        }
    }

    #[test]
    fn steps_change_at_most_one_vertex() {
        let g = q(3);
        let spec = ChainSpec::glauber(3);
        let mut rng = stream_rng(11, 0);
        let mut chi = HeavyStart { side: Side::Even, colour: 0 }.colouring(&g).unwrap();
        for _ in 0..10_000 {
            let next = glauber_step(&g, &chi, &spec, &mut rng).unwrap();
            assert!(next.hamming_distance(&chi) <= 1);
            assert!(next.is_proper(&g));
            chi = next;
        }
    }

    #[test]
    fn frozen_state_never_moves() {
        let g = q(3);
        let chi = frozen_four_colouring();
        let mut rng = stream_rng(3, 0);
        for _ in 0..1000 {
            assert_eq!(glauber_step(&g, &chi, &ChainSpec::glauber(4), &mut rng).unwrap(), chi);
        }
    }

    #[test]
    fn step_rejects_bad_input() {
        let g = q(2);
        let mut rng = stream_rng(0, 0);
        assert!(glauber_step(&g, &Colouring::new(3, vec![0; 4]).unwrap(), &ChainSpec::glauber(3), &mut rng).is_err());
        let ok = Colouring::new(3, vec![0, 1, 1, 0]).unwrap();
        assert!(glauber_step(&g, &ok, &ChainSpec::glauber(4), &mut rng).is_err());
    }

    fn empirical_row_matches(spec: ChainSpec) {
        let g = q(1);
        let m = build_transition_matrix(&g, &spec, &lim()).unwrap();
        let start = Colouring::new(3, vec![0, 1]).unwrap();
        let s = m.index_of(&start).unwrap();
        let trials = 100_000u32;
        let mut hits = vec![0u32; m.len()];
        let mut rng = stream_rng(2024, 0);
        for _ in 0..trials {
            let next = glauber_step(&g, &start, &spec, &mut rng).unwrap();
            hits[m.index_of(&next).unwrap()] += 1;
        }
        for (j, &h) in hits.iter().enumerate() {
            let p = m.probability(s, j).to_f64().unwrap();
            let mean = p * trials as f64;
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!((h as f64 - mean).abs() <= 3.0 * sigma, "state {j}: {h} vs {mean}");
        }
    }

    #[test]
    fn empirical_step_distribution_matches_exact_row() {
        empirical_row_matches(ChainSpec::glauber(3));
        empirical_row_matches(ChainSpec::restricted(3));
    }

    #[test]
    fn phase_cut_on_q2_and_q3() {
        let rho = Rho::new(1, 5).unwrap();
        for d in [2, 3] {
            let g = q(d);
            let m = matrix(d, 3);
            let cut = BottleneckCut::phase_cut(&g, &m, rho, 0, Side::Even).unwrap();
            let mirror = BottleneckCut::phase_cut(&g, &m, rho, 0, Side::Odd).unwrap();
            assert!(verify_bottleneck_condition(&m, &cut).holds);
            assert_eq!(cut.pi_a(&m), mirror.pi_a(&m));
            assert_eq!(cut.m, mirror.m);
            assert!(cut.pi_a(&m) <= Ratio::new(1, 2));
            assert_eq!(cut.pi_m(&m), Ratio::from_integer(1) - cut.pi_a(&m) * 2);
            let bound = dfj_lower_bound(&m, &cut).unwrap();
            let tau = exact_mixing_time(&m, 10_000).unwrap().tau;
            assert!(bound < Ratio::from_integer(tau as u64));
        }
    }

    #[test]
    fn adversarial_cut_is_rejected_with_witness() {
        let m = matrix(2, 3);
        let cut = BottleneckCut::new(&m, vec![0, 1, 2], vec![]).unwrap();
        let check = verify_bottleneck_condition(&m, &cut);
        assert!(!check.holds);
        let (i, j) = check.witness.unwrap();
        assert!(cut.a.contains(&i) && !cut.a.contains(&j));
        assert!(m.numerator(i, j) > 0);
        assert!(dfj_lower_bound(&m, &cut).is_err());
        assert!(BottleneckCut::new(&m, vec![0], vec![0]).is_err());
        let big = BottleneckCut::new(&m, (0..10).collect(), vec![]).unwrap();
        assert!(dfj_lower_bound(&m, &big).is_err());
    }

    #[test]
    fn trajectories_are_deterministic() {
        let g = q(3);
        let rho = Rho::new(1, 5).unwrap();
        let start = HeavyStart { side: Side::Even, colour: 0 }.colouring(&g).unwrap();
        let a = simulate_trajectory(&g, &start, &ChainSpec::glauber(3), rho, 2000, 5).unwrap();
        let b = simulate_trajectory(&g, &start, &ChainSpec::glauber(3), rho, 2000, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.labels[0].0, [Phase::EvenHeavy, Phase::OddHeavy, Phase::OddHeavy]);
        assert_eq!(a.labels.len(), 2001);
        assert_eq!(a.occupancy.values().sum::<u64>(), 2001);
        assert!(a.final_state.is_proper(&g));
        let csv = a.to_csv();
        assert!(csv.starts_with("t,phase_0,phase_1,phase_2,zero_imbalance\n0,E,O,O,1.000000\n"));
    }

    #[test]
    fn trajectory_counts_track_state() {
        let g = q(3);
        let rho = Rho::new(1, 5).unwrap();
        let start = HeavyStart { side: Side::Odd, colour: 2 }.colouring(&g).unwrap();
        let tr = simulate_trajectory(&g, &start, &ChainSpec::glauber(3), rho, 500, 9).unwrap();
        let last = crate::colouring::phase_label(&g, &tr.final_state, rho).unwrap();
        assert_eq!(*tr.labels.last().unwrap(), last);
        if let Some(t) = tr.first_balanced {
            assert!(tr.labels[t].any_balanced());
            assert!(tr.labels[..t].iter().all(|l| !l.any_balanced()));
        }
    }

    #[test]
    fn escape_time_is_reproducible_and_consistent() {
        let g = q(3);
        let rho = Rho::new(1, 5).unwrap();
        let start = HeavyStart { side: Side::Even, colour: 0 };
        let spec = ChainSpec::glauber(3);
        let a = phase_escape_time(&g, &spec, rho, start, 17, 100_000).unwrap();
        assert_eq!(a, phase_escape_time(&g, &spec, rho, start, 17, 100_000).unwrap());
        let tr = simulate_trajectory(&g, &start.colouring(&g).unwrap(), &spec, rho, 100_000, 17).unwrap();
        match a {
            Escape::Escaped(t) => assert_eq!(tr.first_balanced, Some(t)),
            Escape::Timeout => assert_eq!(tr.first_balanced, None),
        }
        let runs = escape_ensemble(&g, &spec, rho, start, 17, 8, 100_000).unwrap();
        assert_eq!(runs[0], a);
        assert_eq!(runs, escape_ensemble(&g, &spec, rho, start, 17, 8, 100_000).unwrap());
        assert_eq!(phase_escape_time(&g, &spec, rho, start, 1, 0).unwrap(), Escape::Timeout);
    }

    #[test]
    fn locality_declaration() {
        let mut spec = ChainSpec::glauber(3);
        assert!(spec.is_local(8));
        spec.locality = Some(Rho::new(1, 5).unwrap());
        assert!(spec.is_local(5));
        assert!(!spec.is_local(4));
    }
}
