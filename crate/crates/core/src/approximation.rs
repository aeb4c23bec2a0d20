//! Approximation pairs for subsets of one partition class, the parameter
//! classes `H(a,g,b,h,b',h')` of compatible zero-set pairs, and the
//! procedure that rebuilds every pair consistent with a sextuple of
//! approximations.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::colouring::ZeroSetPair;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side, Vertex, VertexSet};
use crate::limits::Limits;
use crate::pairs::PairKernel;

/// Default slack `ψ = √d`.
pub fn default_slack(degree: usize) -> f64 {
    (degree as f64).sqrt()
}

/// `(F, S)` approximating a set `A`: `F` on the opposite class, `S` on `A`'s class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproximationPair {
    pub f: VertexSet,
    pub s: VertexSet,
}

/// First condition an approximation pair fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    WrongSides,
    /// A vertex of `F` outside `N(A)`.
    OutsideNeighbourhood(Vertex),
    /// A vertex of `[A]` missing from `S`.
    MissingClosure(Vertex),
    /// `u ∈ S` with `d_F(u) < d - ψ`.
    SparseIntoF { vertex: Vertex, degree: usize },
    /// `v ∉ F` with `d_{X∖S}(v) < d - ψ`.
    SparseOutsideS { vertex: Vertex, degree: usize },
}

pub fn check_approximation(
    graph: &BipartiteGraph,
    a: &VertexSet,
    pair: &ApproximationPair,
    psi: f64,
) -> Result<(), Violation> {
    let side = a.side();
    if pair.s.side() != side || pair.f.side() != side.opposite() {
        return Err(Violation::WrongSides);
    }
    let nbhd = graph.neighbourhood(a);
    if let Some(v) = pair.f.iter().find(|&v| !nbhd.contains(v)) {
        return Err(Violation::OutsideNeighbourhood(v));
    }
    if let Some(v) = graph.external_closure(a).iter().find(|&v| !pair.s.contains(v)) {
        return Err(Violation::MissingClosure(v));
    }
    let floor = graph.degree() as f64 - psi;
    for u in pair.s.iter() {
        let degree = pair.f.degree_into(graph, u);
        if (degree as f64) < floor {
            return Err(Violation::SparseIntoF { vertex: u, degree });
        }
    }
    for &v in graph.class(side.opposite()) {
        if pair.f.contains(v) {
            continue;
        }
        let degree = graph.degree() - pair.s.degree_into(graph, v);
        if (degree as f64) < floor {
            return Err(Violation::SparseOutsideS { vertex: v, degree });
        }
    }
    Ok(())
}

pub fn is_approximation(graph: &BipartiteGraph, a: &VertexSet, pair: &ApproximationPair, psi: f64) -> bool {
    check_approximation(graph, a, pair, psi).is_ok()
}

/// `(N(A), [A])`, valid for every slack.
pub fn trivial_approximation(graph: &BipartiteGraph, a: &VertexSet) -> ApproximationPair {
    ApproximationPair {
        f: graph.neighbourhood(a),
        s: graph.external_closure(a),
    }
}

/// The six statistics of a zero-set pair `(E, O)` with `I = I(E)`, `J = I(O)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HParams {
    /// `|[E]|`
    pub a: usize,
    /// `|N(E)|`
    pub g: usize,
    /// `|I|`
    pub b: usize,
    /// `|N(I)|`
    pub h: usize,
    /// `|J|`
    pub b_prime: usize,
    /// `|N(J)|`
    pub h_prime: usize,
}

impl HParams {
    pub fn t(&self) -> i64 {
        self.g as i64 - self.a as i64
    }

    pub fn s(&self) -> i64 {
        self.h as i64 - self.b as i64
    }

    pub fn s_prime(&self) -> i64 {
        self.h_prime as i64 - self.b_prime as i64
    }
}

pub fn h_params(graph: &BipartiteGraph, pair: &ZeroSetPair) -> HParams {
    let e = &pair.even_zero;
    let i = pair.inner_even(graph);
    let j = pair.inner_odd(graph);
    HParams {
        a: graph.external_closure(e).len(),
        g: graph.neighbourhood(e).len(),
        b: i.len(),
        h: graph.neighbourhood(&i).len(),
        b_prime: j.len(),
        h_prime: graph.neighbourhood(&j).len(),
    }
}

fn mask_params(k: &PairKernel, e: u64, o: u64) -> HParams {
    let i = PairKernel::covered(&k.nbr_odd, e);
    let j = PairKernel::covered(&k.nbr_even, o);
    HParams {
        a: k.closure_even(e).count_ones() as usize,
        g: k.union_even[e as usize].count_ones() as usize,
        b: i.count_ones() as usize,
        h: k.union_odd[i as usize].count_ones() as usize,
        b_prime: j.count_ones() as usize,
        h_prime: k.union_even[j as usize].count_ones() as usize,
    }
}

/// All compatible pairs `(E, O)` whose statistics equal `params`.
pub fn enumerate_h_class(
    graph: &BipartiteGraph,
    params: &HParams,
    limits: &Limits,
) -> Result<BTreeSet<ZeroSetPair>> {
    let k = PairKernel::new(graph, limits)?;
    let mut out = BTreeSet::new();
    for e in k.subsets() {
        for o in k.subsets() {
            if k.compatible(e, o) && mask_params(&k, e, o) == *params {
                out.insert(ZeroSetPair::from_masks(graph, e, o));
            }
        }
    }
    Ok(out)
}

/// Number of compatible pairs in each nonempty class.
pub fn h_census(graph: &BipartiteGraph, limits: &Limits) -> Result<BTreeMap<HParams, u64>> {
    let k = PairKernel::new(graph, limits)?;
    let mut census = BTreeMap::new();
    for e in k.subsets() {
        for o in k.subsets() {
            if k.compatible(e, o) {
                *census.entry(mask_params(&k, e, o)).or_insert(0) += 1;
            }
        }
    }
    Ok(census)
}

/// `(F, S, P, Q, P', Q')` with sides O, E, E, O, O, E.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sextuple {
    pub f: VertexSet,
    pub s: VertexSet,
    pub p: VertexSet,
    pub q: VertexSet,
    pub p_prime: VertexSet,
    pub q_prime: VertexSet,
}

impl Sextuple {
    pub fn new(
        f: VertexSet,
        s: VertexSet,
        p: VertexSet,
        q: VertexSet,
        p_prime: VertexSet,
        q_prime: VertexSet,
    ) -> Result<Self> {
        let sides = [&f, &s, &p, &q, &p_prime, &q_prime].map(VertexSet::side);
        use Side::{Even as E, Odd as O};
        if sides != [O, E, E, O, O, E] {
            return Err(Error::InvalidInput(
                "sextuple sets must lie on classes O, E, E, O, O, E".into(),
            ));
        }
        Ok(Self {
            f,
            s,
            p,
            q,
            p_prime,
            q_prime,
        })
    }

    /// Trivial approximations of `E`, `I` and `J`.
    pub fn trivial(graph: &BipartiteGraph, pair: &ZeroSetPair) -> Self {
        let e = trivial_approximation(graph, &pair.even_zero);
        let i = trivial_approximation(graph, &pair.inner_even(graph));
        let j = trivial_approximation(graph, &pair.inner_odd(graph));
        Self {
            f: e.f,
            s: e.s,
            p: i.f,
            q: i.s,
            p_prime: j.f,
            q_prime: j.s,
        }
    }

    /// `F ⊆ N(E), S ⊇ [E], P ⊆ N(I), Q ⊇ I, P' ⊆ N(J), Q' ⊇ J`.
    pub fn satisfies_containments(&self, graph: &BipartiteGraph, pair: &ZeroSetPair) -> bool {
        let i = pair.inner_even(graph);
        let j = pair.inner_odd(graph);
        self.f.is_subset(&graph.neighbourhood(&pair.even_zero))
            && graph.external_closure(&pair.even_zero).is_subset(&self.s)
            && self.p.is_subset(&graph.neighbourhood(&i))
            && i.is_subset(&self.q)
            && self.p_prime.is_subset(&graph.neighbourhood(&j))
            && j.is_subset(&self.q_prime)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SizeInequalities {
    /// `|S| <= |F| + 3t/√d`
    pub s: bool,
    /// `|Q| <= |P| + 3s/√d`
    pub q: bool,
    /// `|Q'| <= |P'| + 3s'/√d`
    pub q_prime: bool,
}

impl SizeInequalities {
    pub fn all(&self) -> bool {
        self.s && self.q && self.q_prime
    }
}

pub fn check_size_inequalities(sextuple: &Sextuple, params: &HParams, degree: usize) -> SizeInequalities {
    let root = (degree as f64).sqrt();
    let holds = |big: &VertexSet, small: &VertexSet, gap: i64| {
        big.len() as f64 <= small.len() as f64 + 3.0 * gap as f64 / root
    };
    SizeInequalities {
        s: holds(&sextuple.s, &sextuple.f, params.t()),
        q: holds(&sextuple.q, &sextuple.p, params.s()),
        q_prime: holds(&sextuple.q_prime, &sextuple.p_prime, params.s_prime()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BranchFlags {
    pub s_tight: bool,
    pub q_tight: bool,
    pub q_prime_tight: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Branching {
    Flags(BranchFlags),
    /// `S` tight iff `|S| < g - c₁'t/log d`, `Q` iff `|Q| < b + c₁'s/log d`,
    /// `Q'` iff `|Q'| < b' + c₂'s'/log d`, with `log = log₂`.
    Thresholds { c1_prime: f64, c2_prime: f64 },
}

impl Branching {
    pub fn resolve(&self, sextuple: &Sextuple, params: &HParams, degree: usize) -> Result<BranchFlags> {
        match *self {
            Branching::Flags(flags) => Ok(flags),
            Branching::Thresholds { c1_prime, c2_prime } => {
                if degree < 2 {
                    return Err(Error::InvalidInput("tightness thresholds need d >= 2".into()));
                }
                let log = (degree as f64).log2();
                Ok(BranchFlags {
                    s_tight: (sextuple.s.len() as f64)
                        < params.g as f64 - c1_prime * params.t() as f64 / log,
                    q_tight: (sextuple.q.len() as f64)
                        < params.b as f64 + c1_prime * params.s() as f64 / log,
                    q_prime_tight: (sextuple.q_prime.len() as f64)
                        < params.b_prime as f64 + c2_prime * params.s_prime() as f64 / log,
                })
            }
        }
    }
}

/// Submasks of `mask`, including `0` and `mask`.
fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = (cur != 0).then(|| (cur - 1) & mask);
        Some(cur)
    })
}

struct Budget {
    used: usize,
    limit: usize,
}

impl Budget {
    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        crate::error::guard("reconstruction choices", self.used, self.limit)
    }
}

/// Every pair `(E, O)` the reconstruction procedure can output for the given
/// sextuple and branch. With `strict`, only compatible pairs whose
/// statistics equal `params` are kept.
pub fn reconstruct_candidates(
    graph: &BipartiteGraph,
    sextuple: &Sextuple,
    params: &HParams,
    branching: &Branching,
    strict: bool,
    limits: &Limits,
) -> Result<BTreeSet<ZeroSetPair>> {
    let flags = branching.resolve(sextuple, params, graph.degree())?;
    let k = PairKernel::new(graph, limits)?;
    let mask = |set: &VertexSet| set.to_mask(graph);
    let (f, s, p, q, p_prime, q_prime) = (
        mask(&sextuple.f),
        mask(&sextuple.s),
        mask(&sextuple.p),
        mask(&sextuple.q),
        mask(&sextuple.p_prime),
        mask(&sextuple.q_prime),
    );
    let mut budget = Budget {
        used: 0,
        limit: limits.candidates,
    };

    let d_choices: BTreeSet<u64> = if flags.q_tight {
        submasks(q)
            .filter(|i| i.count_ones() as usize == params.b)
            .map(|i| k.union_odd[i as usize])
            .collect()
    } else {
        BTreeSet::from([p])
    };

    let mut evens = BTreeSet::new();
    for &d in &d_choices {
        if flags.s_tight {
            for x in submasks(s & !d) {
                budget.spend()?;
                evens.insert(d | x);
            }
        } else {
            let outside = k.union_even[s as usize] & !f;
            for y in submasks(outside) {
                let closure = PairKernel::covered(&k.nbr_even, f | y);
                for x in submasks(closure & !d) {
                    budget.spend()?;
                    evens.insert(d | x);
                }
            }
        }
    }

    let d_prime_choices: BTreeSet<u64> = if flags.q_prime_tight {
        submasks(q_prime)
            .filter(|j| j.count_ones() as usize == params.b_prime)
            .map(|j| k.union_even[j as usize])
            .collect()
    } else {
        BTreeSet::from([p_prime])
    };

    let mut out = BTreeSet::new();
    for &e in &evens {
        for &dp in &d_prime_choices {
            for z in submasks(k.full() & !(k.union_even[e as usize] | dp)) {
                budget.spend()?;
                let o = dp | z;
                if strict && !(k.compatible(e, o) && mask_params(&k, e, o) == *params) {
                    continue;
                }
                out.insert(ZeroSetPair::from_masks(graph, e, o));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_graph, hypercube_vertex, GraphFamily};

    fn g(f: GraphFamily) -> BipartiteGraph {
        build_graph(&f).unwrap()
    }
    fn cube(d: usize) -> BipartiteGraph {
        g(GraphFamily::Hypercube { dim: d })
    }
    fn bits(graph: &BipartiteGraph, side: Side, names: &[&str]) -> VertexSet {
        VertexSet::new(graph, side, names.iter().map(|b| hypercube_vertex(b).unwrap())).unwrap()
    }
    fn all_subsets(graph: &BipartiteGraph, side: Side) -> Vec<VertexSet> {
        (0..1u64 << graph.class_size(side))
            .map(|m| VertexSet::from_mask(graph, side, m))
            .collect()
    }
    /// Every compatible pair, built from the set operators.
    fn compatible_pairs(graph: &BipartiteGraph) -> Vec<ZeroSetPair> {
        let mut out = Vec::new();
        for e in all_subsets(graph, Side::Even) {
            for o in all_subsets(graph, Side::Odd) {
                let pair = ZeroSetPair::new(e.clone(), o).unwrap();
                if pair.is_compatible(graph) {
                    out.push(pair);
                }
            }
        }
        out
    }
    fn all_flags() -> Vec<BranchFlags> {
        (0..8)
            .map(|m| BranchFlags {
                s_tight: m & 1 != 0,
                q_tight: m & 2 != 0,
                q_prime_tight: m & 4 != 0,
            })
            .collect()
    }

    #[test]
    fn approximation_examples_on_q3() {
        let q3 = cube(3);
        let psi = default_slack(3);
        let a = bits(&q3, Side::Even, &["000"]);
        let trivial = trivial_approximation(&q3, &a);
        assert!(is_approximation(&q3, &a, &trivial, psi));
        let bad = ApproximationPair {
            f: VertexSet::empty(&q3, Side::Odd),
            s: VertexSet::class(&q3, Side::Even),
        };
        assert!(matches!(
            check_approximation(&q3, &a, &bad, psi),
            Err(Violation::SparseIntoF { degree: 0, .. })
        ));
        let explicit = ApproximationPair {
            f: bits(&q3, Side::Odd, &["100", "010", "001"]),
            s: bits(&q3, Side::Even, &["000"]),
        };
        assert_eq!(explicit, trivial);
        assert!(is_approximation(&q3, &a, &explicit, psi));
        let swapped = ApproximationPair {
            f: explicit.s.clone(),
            s: explicit.f.clone(),
        };
        assert_eq!(check_approximation(&q3, &a, &swapped, psi), Err(Violation::WrongSides));
    }

    #[test]
    fn approximation_violations_are_reported() {
        let q3 = cube(3);
        let a = bits(&q3, Side::Even, &["000"]);
        let far = ApproximationPair {
            f: bits(&q3, Side::Odd, &["111"]),
            s: a.clone(),
        };
        assert_eq!(
            check_approximation(&q3, &a, &far, 1.0),
            Err(Violation::OutsideNeighbourhood(hypercube_vertex("111").unwrap()))
        );
        let missing = ApproximationPair {
            f: graph_nbhd(&q3, &a),
            s: VertexSet::empty(&q3, Side::Even),
        };
        assert!(matches!(check_approximation(&q3, &a, &missing, 1.0), Err(Violation::MissingClosure(0))));
        let thin = ApproximationPair {
            f: VertexSet::empty(&q3, Side::Odd),
            s: a.clone(),
        };
        assert!(matches!(check_approximation(&q3, &a, &thin, 0.5), Err(Violation::SparseIntoF { .. })));
    }

    fn graph_nbhd(graph: &BipartiteGraph, a: &VertexSet) -> VertexSet {
        graph.neighbourhood(a)
    }

    #[test]
    fn trivial_approximation_is_always_valid() {
        for graph in [cube(2), cube(3), g(GraphFamily::EvenCycle { len: 6 })] {
            for side in Side::BOTH {
                for a in all_subsets(&graph, side) {
                    let pair = trivial_approximation(&graph, &a);
                    // ψ = 0 is the strictest slack
                    assert!(is_approximation(&graph, &a, &pair, 0.0));
                }
            }
        }
    }

    #[test]
    fn h_params_examples() {
        let q2 = cube(2);
        let pair = ZeroSetPair::new(bits(&q2, Side::Even, &["00", "11"]), VertexSet::empty(&q2, Side::Odd)).unwrap();
        let p = h_params(&q2, &pair);
        assert_eq!((p.a, p.g, p.b, p.h, p.b_prime, p.h_prime), (2, 2, 2, 2, 0, 0));
        let q3 = cube(3);
        let pair = ZeroSetPair::new(bits(&q3, Side::Even, &["000"]), VertexSet::empty(&q3, Side::Odd)).unwrap();
        let p = h_params(&q3, &pair);
        assert_eq!((p.a, p.g, p.b, p.h, p.b_prime, p.h_prime), (1, 3, 0, 0, 0, 0));
        assert_eq!((p.t(), p.s(), p.s_prime()), (2, 0, 0));
    }

    #[test]
    fn census_partitions_compatible_pairs() {
        let lim = Limits::default();
        for graph in [cube(2), cube(3), g(GraphFamily::EvenCycle { len: 6 })] {
            let pairs = compatible_pairs(&graph);
            let census = h_census(&graph, &lim).unwrap();
            assert_eq!(census.values().sum::<u64>(), pairs.len() as u64);
            let mut by_params: BTreeMap<HParams, BTreeSet<ZeroSetPair>> = BTreeMap::new();
            for pair in pairs {
                let p = h_params(&graph, &pair);
                assert!(p.a <= p.g && p.b <= p.h);
                assert!(graph.neighbourhood(&pair.inner_even(&graph)).is_subset(&pair.even_zero));
                assert!(graph.neighbourhood(&pair.inner_odd(&graph)).is_subset(&pair.odd_zero));
                by_params.entry(p).or_default().insert(pair);
            }
            for (params, expected) in &by_params {
                assert_eq!(census[params], expected.len() as u64);
                assert_eq!(&enumerate_h_class(&graph, params, &lim).unwrap(), expected);
            }
        }
    }

    #[test]
    fn size_inequality_examples() {
        let q3 = cube(3);
        let pair = ZeroSetPair::new(bits(&q3, Side::Even, &["000"]), VertexSet::empty(&q3, Side::Odd)).unwrap();
        let params = h_params(&q3, &pair);
        let trivial = Sextuple::trivial(&q3, &pair);
        assert!(check_size_inequalities(&trivial, &params, 3).all());
        let loose = Sextuple {
            f: VertexSet::empty(&q3, Side::Odd),
            s: VertexSet::class(&q3, Side::Even),
            ..trivial
        };
        let checked = check_size_inequalities(&loose, &params, 3);
        assert!(!checked.s);
        assert!(checked.q && checked.q_prime);
    }

    #[test]
    fn sextuple_sides_are_validated() {
        let q2 = cube(2);
        let e = VertexSet::empty(&q2, Side::Even);
        let o = VertexSet::empty(&q2, Side::Odd);
        assert!(Sextuple::new(o.clone(), e.clone(), e.clone(), o.clone(), o.clone(), e.clone()).is_ok());
        assert!(Sextuple::new(e.clone(), e.clone(), e.clone(), o.clone(), o.clone(), e).is_err());
    }

    #[test]
    fn reconstruction_on_q2_recovers_the_pair() {
        let q2 = cube(2);
        let pair = ZeroSetPair::new(bits(&q2, Side::Even, &["00", "11"]), VertexSet::empty(&q2, Side::Odd)).unwrap();
        let params = h_params(&q2, &pair);
        let sextuple = Sextuple::trivial(&q2, &pair);
        for flags in all_flags() {
            for strict in [false, true] {
                let out = reconstruct_candidates(&q2, &sextuple, &params, &Branching::Flags(flags), strict, &Limits::default()).unwrap();
                assert!(out.contains(&pair), "{flags:?}");
            }
        }
    }

    /// Sextuples derived from a pair: the trivial one and variants with
    /// shrunk lower sets and grown upper sets.
    fn sextuples_for(graph: &BipartiteGraph, pair: &ZeroSetPair) -> Vec<Sextuple> {
        let t = Sextuple::trivial(graph, pair);
        let drop_first = |s: &VertexSet| VertexSet::new(graph, s.side(), s.iter().skip(1)).unwrap();
        vec![
            t.clone(),
            Sextuple {
                f: drop_first(&t.f),
                p: drop_first(&t.p),
                p_prime: drop_first(&t.p_prime),
                ..t.clone()
            },
            Sextuple {
                s: VertexSet::class(graph, Side::Even),
                q: VertexSet::class(graph, Side::Odd),
                q_prime: VertexSet::class(graph, Side::Even),
                ..t
            },
        ]
    }

    #[test]
    fn reconstruction_is_a_superset_for_every_branch() {
        let lim = Limits::default();
        for graph in [cube(2), g(GraphFamily::EvenCycle { len: 6 })] {
            let pairs = compatible_pairs(&graph);
            for seed in &pairs {
                let params = h_params(&graph, seed);
                for sextuple in sextuples_for(&graph, seed) {
                    let valid: BTreeSet<ZeroSetPair> = pairs
                        .iter()
                        .filter(|p| h_params(&graph, p) == params && sextuple.satisfies_containments(&graph, p))
                        .cloned()
                        .collect();
                    assert!(valid.contains(seed) || sextuple != Sextuple::trivial(&graph, seed));
                    for flags in all_flags() {
                        let strict = reconstruct_candidates(&graph, &sextuple, &params, &Branching::Flags(flags), true, &lim).unwrap();
                        assert!(valid.is_subset(&strict), "{flags:?}");
                        for p in &strict {
                            assert!(p.is_compatible(&graph));
                            assert_eq!(h_params(&graph, p), params);
                        }
                        let loose = reconstruct_candidates(&graph, &sextuple, &params, &Branching::Flags(flags), false, &lim).unwrap();
                        assert!(strict.is_subset(&loose));
                    }
                }
            }
        }
    }

    #[test]
    fn empty_sextuple_with_tight_branches_yields_nothing() {
        let q2 = cube(2);
        let params = HParams { a: 2, g: 2, b: 2, h: 2, b_prime: 0, h_prime: 0 };
        let e = VertexSet::empty(&q2, Side::Even);
        let o = VertexSet::empty(&q2, Side::Odd);
        let sextuple = Sextuple::new(o.clone(), e.clone(), e.clone(), o.clone(), o, e).unwrap();
        let flags = BranchFlags { s_tight: true, q_tight: true, q_prime_tight: true };
        let out = reconstruct_candidates(&q2, &sextuple, &params, &Branching::Flags(flags), true, &Limits::default()).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn thresholds_resolve_to_flags() {
        let q3 = cube(3);
        let pair = ZeroSetPair::new(bits(&q3, Side::Even, &["000"]), VertexSet::empty(&q3, Side::Odd)).unwrap();
        let params = h_params(&q3, &pair);
        let sextuple = Sextuple::trivial(&q3, &pair);
        // |S| = 1 < g - c t / log d = 3 - 2c/log₂3
        let flags = Branching::Thresholds { c1_prime: 0.5, c2_prime: 0.5 }.resolve(&sextuple, &params, 3).unwrap();
        assert!(flags.s_tight);
        // |Q| = 0 < b + 0 fails
        assert!(!flags.q_tight && !flags.q_prime_tight);
        let flags = Branching::Thresholds { c1_prime: 2.0, c2_prime: 0.5 }.resolve(&sextuple, &params, 3).unwrap();
        assert!(!flags.s_tight);
        assert!(Branching::Thresholds { c1_prime: 1.0, c2_prime: 1.0 }.resolve(&sextuple, &params, 1).is_err());
        let out = reconstruct_candidates(&q3, &sextuple, &params, &Branching::Thresholds { c1_prime: 0.5, c2_prime: 0.5 }, true, &Limits::default()).unwrap();
        assert!(out.contains(&pair));
    }

    #[test]
    fn reconstruction_budget_is_enforced() {
        let q3 = cube(3);
        let pair = ZeroSetPair::empty(&q3);
        let params = h_params(&q3, &pair);
        let sextuple = Sextuple::trivial(&q3, &pair);
        let lim = Limits { candidates: 3, ..Limits::default() };
        let flags = BranchFlags { s_tight: false, q_tight: false, q_prime_tight: false };
        assert!(matches!(
            reconstruct_candidates(&q3, &sextuple, &params, &Branching::Flags(flags), false, &lim),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
