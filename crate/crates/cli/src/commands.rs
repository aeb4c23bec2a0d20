use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde_json::{json, Value};
use torpid::approximation::{
    check_approximation, check_size_inequalities, default_slack, enumerate_h_class, h_census,
    reconstruct_candidates, BranchFlags, Branching, Sextuple,
};
use torpid::bounds::{
    alpha_of, chernoff_entropy_check, chernoff_log_check, hypothesis_gate, rho_star, theorem_bounds,
    BoundParameters, TheoremConstants,
};
use torpid::colouring::{class_sizes, count_via_decomposition, enumerate_colourings, verify_component_bound, ZeroSetPair};
use torpid::dynamics::{
    build_transition_matrix, check_detailed_balance, dfj_lower_bound, ergodicity, escape_ensemble,
    exact_mixing_time, simulate_trajectory, verify_bottleneck_condition, BottleneckCut, ChainSpec, Escape,
    HeavyStart, Variant,
};
use torpid::heights::{ergodicity_path, frozen_four_colouring, frozen_host, is_frozen, phi, phi_inverse};
use torpid::invariants::{bipartite_expansion, locality};
use torpid::{BipartiteGraph, Error, Result, Side, VertexSet};

use crate::{BoundArgs, Common, Format, Output, VariantArg};

fn big(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

fn ratio(r: Ratio<u64>) -> Value {
    json!(r.to_string())
}

fn local(graph: &BipartiteGraph, set: &VertexSet) -> Value {
    json!({
        "side": set.side().to_string(),
        "indices": set.iter().map(|v| graph.local_index(v)).collect::<Vec<_>>(),
    })
}

fn json_only(common: &Common, value: Value) -> Result<Output> {
    match common.format {
        Format::Json => Ok(Output::Json(value)),
        Format::Csv => Err(Error::InvalidInput("this subcommand has no CSV output".into())),
    }
}

fn chain_spec(q: u8, variant: VariantArg) -> ChainSpec {
    match variant {
        VariantArg::Plain => ChainSpec::glauber(q),
        VariantArg::Restricted => ChainSpec::restricted(q),
    }
}

fn require_three(common: &Common, what: &str) -> Result<()> {
    if common.q != 3 {
        return Err(Error::InvalidInput(format!("{what} needs --q 3")));
    }
    Ok(())
}

pub fn graph(graph: &BipartiteGraph, common: &Common) -> Result<Output> {
    let limits = common.limits();
    let expansion = bipartite_expansion(graph, &limits)?;
    let loc = locality(graph, &limits)?;
    let value = json!({
        "n": graph.vertex_count(),
        "n_even": graph.class_size(Side::Even),
        "n_odd": graph.class_size(Side::Odd),
        "degree": graph.degree(),
        "edges": graph.edge_count(),
        "connected": graph.is_connected(),
        "perfect_matching": graph.has_perfect_matching(),
        "delta": ratio(expansion.delta),
        "vacuous": expansion.vacuous,
        "delta_witness": expansion.witness.as_ref().map(|w| local(graph, w)),
        "ell": loc.ell,
        "ell_edge": [loc.edge.0, loc.edge.1],
        "independent_set": loc.independent_set,
    });
    json_only(common, value)
}

pub fn count(graph: &BipartiteGraph, common: &Common) -> Result<Output> {
    let limits = common.limits();
    let backtracking = enumerate_colourings(graph, common.q, &limits)?.count() as u64;
    if common.q != 3 {
        return json_only(common, json!({ "q": common.q, "backtracking": backtracking }));
    }
    let decomposition = count_via_decomposition(graph, &limits)?;
    let sizes = class_sizes(graph, common.rho, &limits)?;
    if common.format == Format::Csv {
        return Ok(Output::Csv(sizes.to_csv()));
    }
    let bound = verify_component_bound(graph, &limits)?;
    Ok(Output::Json(json!({
        "q": 3,
        "backtracking": backtracking,
        "decomposition": big(&decomposition),
        "agree": decomposition == BigUint::from(backtracking),
        "rho": common.rho.to_string(),
        "class_sizes": sizes.colours.iter().enumerate().map(|(i, c)| json!({
            "colour": i,
            "balanced": c.balanced,
            "e_heavy": c.even_heavy,
            "o_heavy": c.odd_heavy,
        })).collect::<Vec<_>>(),
        "component_bound": {
            "max_components": bound.max_components,
            "ell": bound.ell,
            "bound": ratio(bound.bound),
            "holds": bound.holds,
        },
    })))
}

pub fn mix(graph: &BipartiteGraph, common: &Common, variant: VariantArg) -> Result<Output> {
    let spec = chain_spec(common.q, variant);
    let matrix = build_transition_matrix(graph, &spec, &common.limits())?;
    let erg = ergodicity(&matrix);
    let mut value = json!({
        "q": common.q,
        "variant": match spec.variant { Variant::Plain => "plain", Variant::Restricted => "restricted" },
        "states": matrix.len(),
        "row_stochastic": matrix.is_row_stochastic(),
        "detailed_balance": check_detailed_balance(&matrix),
        "uniform_stationary": matrix.is_uniform_stationary(),
        "strongly_connected": erg.strongly_connected,
        "period": erg.period,
        "ergodic": erg.is_ergodic(),
        "tau": null,
    });
    if erg.is_ergodic() {
        let report = exact_mixing_time(&matrix, common.steps)?;
        if common.format == Format::Csv {
            let mut csv = String::from("t,tv\n");
            for (t, tv) in report.tv_curve.iter().enumerate() {
                csv.push_str(&format!("{t},{tv:.12}\n"));
            }
            return Ok(Output::Csv(csv));
        }
        value["tau"] = json!(report.tau);
        value["worst_start"] = json!(report.worst_start);
        value["threshold_gap"] = json!(report.threshold_gap);
        value["tv_curve"] = json!(report.tv_curve);
    }
    json_only(common, value)
}

pub fn conductance(graph: &BipartiteGraph, common: &Common, colour: usize, side: Side) -> Result<Output> {
    require_three(common, "conductance")?;
    if colour >= 3 {
        return Err(Error::InvalidInput(format!("colour {colour} out of range")));
    }
    let matrix = build_transition_matrix(graph, &ChainSpec::glauber(3), &common.limits())?;
    let cut = BottleneckCut::phase_cut(graph, &matrix, common.rho, colour, side)?;
    let blocking = verify_bottleneck_condition(&matrix, &cut);
    let tau = match exact_mixing_time(&matrix, common.steps) {
        Ok(r) => Some(r.tau),
        Err(Error::NonErgodic) => None,
        Err(e) => return Err(e),
    };
    let mut value = json!({
        "rho": common.rho.to_string(),
        "colour": colour,
        "side": side.to_string(),
        "states": matrix.len(),
        "size_a": cut.a.len(),
        "size_m": cut.m.len(),
        "pi_a": ratio(cut.pi_a(&matrix)),
        "pi_m": ratio(cut.pi_m(&matrix)),
        "blocking": blocking.holds,
        "blocking_witness": blocking.witness.map(|(i, j)| json!({
            "from": matrix.state(i).as_slice(),
            "to": matrix.state(j).as_slice(),
        })),
        "tau": tau,
    });
    match dfj_lower_bound(&matrix, &cut) {
        Ok(bound) => {
            value["dfj_bound"] = ratio(bound);
            value["dfj_bound_value"] = json!(*bound.numer() as f64 / *bound.denom() as f64);
            value["bound_le_tau"] = json!(tau.map(|t| bound <= Ratio::from_integer(t as u64)));
        }
        Err(Error::InvalidCut(reason)) => {
            value["dfj_bound"] = Value::Null;
            value["rejected"] = json!(reason);
        }
        Err(e) => return Err(e),
    }
    json_only(common, value)
}

pub fn simulate(
    graph: &BipartiteGraph,
    common: &Common,
    variant: VariantArg,
    start_side: Side,
    start_colour: u8,
    runs: usize,
) -> Result<Output> {
    require_three(common, "simulate")?;
    let spec = chain_spec(3, variant);
    let start = HeavyStart {
        side: start_side,
        colour: start_colour,
    };
    let trajectory = simulate_trajectory(graph, &start.colouring(graph)?, &spec, common.rho, common.steps, common.seed)?;
    if common.format == Format::Csv {
        return Ok(Output::Csv(trajectory.to_csv()));
    }
    let occupancy: serde_json::Map<String, Value> = trajectory
        .occupancy
        .iter()
        .map(|(label, n)| (label.to_string(), json!(n)))
        .collect();
    let mut value = json!({
        "rho": common.rho.to_string(),
        "seed": common.seed,
        "steps": common.steps,
        "start": { "side": start_side.to_string(), "colour": start_colour },
        "first_balanced": trajectory.first_balanced,
        "final_label": trajectory.labels.last().map(|l| l.to_string()),
        "occupancy": occupancy,
    });
    if runs > 0 {
        let escapes = escape_ensemble(graph, &spec, common.rho, start, common.seed, runs, common.steps)?;
        let times: Vec<Option<usize>> = escapes
            .iter()
            .map(|e| match e {
                Escape::Escaped(t) => Some(*t),
                Escape::Timeout => None,
            })
            .collect();
        value["escape"] = json!({
            "runs": runs,
            "max_steps": common.steps,
            "escaped": times.iter().flatten().count(),
            "times": times,
        });
    }
    Ok(Output::Json(value))
}

pub fn heights(graph: &BipartiteGraph, common: &Common, root: usize) -> Result<Output> {
    if root >= graph.vertex_count() {
        return Err(Error::InvalidInput(format!("root {root} out of range")));
    }
    let limits = common.limits();
    let bound: usize = graph.distances_from(root).iter().map(|d| d.unwrap_or(0)).sum();
    let mut rooted = 0usize;
    let mut round_trip = true;
    let mut distinct = BTreeSet::new();
    let (mut longest, mut total, mut legal, mut terminal_two) = (0usize, 0usize, true, true);
    for chi in enumerate_colourings(graph, 3, &limits)? {
        if chi.colour(root) != 0 {
            continue;
        }
        rooted += 1;
        let f = phi_inverse(graph, &chi, root)?;
        round_trip &= phi(&f) == chi;
        distinct.insert(f);
        let path = ergodicity_path(graph, &chi, root)?;
        longest = longest.max(path.moves.len());
        total += path.moves.len();
        legal &= path.states.windows(2).zip(&path.moves).all(|(w, mv)| {
            w[0].hamming_distance(&w[1]) == 1 && w[0].admits(graph, mv.vertex, mv.to)
        });
        let last = path.states.last().expect("path starts at the input");
        terminal_two &= Side::BOTH.iter().all(|&side| {
            let colours: BTreeSet<u8> = graph.class(side).iter().map(|&v| last.colour(v)).collect();
            colours.len() == 1
        });
    }
    let mut frozen_states = 0usize;
    for chi in enumerate_colourings(graph, common.q, &limits)? {
        if is_frozen(graph, &chi, common.q)? {
            frozen_states += 1;
        }
    }
    let value = json!({
        "root": root,
        "rooted_colourings": rooted,
        "height_functions": distinct.len(),
        "round_trip": round_trip,
        "path_max": longest,
        "path_total": total,
        "path_bound": bound,
        "paths_legal": legal,
        "paths_end_two_coloured": terminal_two,
        "q": common.q,
        "frozen_states": frozen_states,
        "frozen_q3_four_colouring": is_frozen(&frozen_host(), &frozen_four_colouring(), 4)?,
    });
    json_only(common, value)
}

pub fn approx(graph: &BipartiteGraph, common: &Common, psi: Option<f64>) -> Result<Output> {
    let limits = common.limits();
    let census = h_census(graph, &limits)?;
    if common.format == Format::Csv {
        let mut csv = String::from("a,g,b,h,b_prime,h_prime,count\n");
        for (p, n) in &census {
            csv.push_str(&format!("{},{},{},{},{},{},{n}\n", p.a, p.g, p.b, p.h, p.b_prime, p.h_prime));
        }
        return Ok(Output::Csv(csv));
    }
    let psi = psi.unwrap_or_else(|| default_slack(graph.degree()));
    let (mut checked, mut valid) = (0usize, 0usize);
    for side in Side::BOTH {
        let class = graph.class(side);
        for mask in 0u64..1 << class.len() {
            let a = VertexSet::new(graph, side, (0..class.len()).filter(|i| mask >> i & 1 == 1).map(|i| class[i]))?;
            let pair = torpid::approximation::trivial_approximation(graph, &a);
            checked += 1;
            valid += check_approximation(graph, &a, &pair, psi).is_ok() as usize;
        }
    }
    let mut failures = Vec::new();
    let mut size_ok = 0usize;
    for params in census.keys() {
        let class = enumerate_h_class(graph, params, &limits)?;
        let seed: &ZeroSetPair = class.iter().next().expect("census classes are nonempty");
        let sextuple = Sextuple::trivial(graph, seed);
        size_ok += check_size_inequalities(&sextuple, params, graph.degree()).all() as usize;
        let expected: BTreeSet<&ZeroSetPair> =
            class.iter().filter(|p| sextuple.satisfies_containments(graph, p)).collect();
        for bits in 0..8u8 {
            let flags = BranchFlags {
                s_tight: bits & 1 != 0,
                q_tight: bits & 2 != 0,
                q_prime_tight: bits & 4 != 0,
            };
            let out = reconstruct_candidates(graph, &sextuple, params, &Branching::Flags(flags), true, &limits)?;
            if !expected.iter().all(|p| out.contains(*p)) {
                failures.push(json!({ "params": params, "flags": flags }));
            }
        }
    }
    let value = json!({
        "psi": psi,
        "pairs": census.values().sum::<u64>(),
        "census": census.iter().map(|(p, n)| json!({ "params": p, "count": n })).collect::<Vec<_>>(),
        "trivial_checked": checked,
        "trivial_valid": valid,
        "size_inequalities_hold": size_ok,
        "reconstruction_classes": census.len(),
        "reconstruction_superset": failures.is_empty(),
        "reconstruction_failures": failures,
    });
    Ok(Output::Json(value))
}

pub fn bounds(graph: Option<&BipartiteGraph>, common: &Common, args: &BoundArgs) -> Result<Output> {
    let limits = common.limits();
    let measured = match graph {
        Some(g) => {
            let e = bipartite_expansion(g, &limits)?;
            let delta = *e.delta.numer() as f64 / *e.delta.denom() as f64;
            Some((g.degree(), delta, locality(g, &limits)?.ell as f64, g.vertex_count() as f64))
        }
        None => None,
    };
    let missing = |what: &str| Error::InvalidInput(format!("--{what} is required without --graph"));
    let d = args.d.or(measured.map(|m| m.0)).ok_or_else(|| missing("d"))?;
    let delta = args.delta.or(measured.map(|m| m.1)).ok_or_else(|| missing("delta"))?;
    let ell = args.ell.or(measured.map(|m| m.2)).ok_or_else(|| missing("ell"))?;
    let n = args.n.or(measured.map(|m| m.3)).ok_or_else(|| missing("n"))?;
    let rho = common.rho.to_f64();
    let params = BoundParameters {
        rho,
        delta,
        ell,
        d,
        n,
        constants: TheoremConstants {
            c1: args.c1,
            c1_prime: args.c1_prime,
            c2: args.c2,
            c: args.c,
            c_prime: args.c_prime,
            d0: args.d0,
        },
    };
    let mut sweep = (0usize, true);
    for m in 1..=200 {
        for k in 1..=10 {
            let beta = k as f64 * 0.05;
            sweep.0 += 1;
            sweep.1 &= chernoff_entropy_check(m, beta)?.holds;
            if beta <= (-1.0f64).exp() {
                sweep.0 += 1;
                sweep.1 &= chernoff_log_check(m, beta)?.holds;
            }
        }
    }
    let value = json!({
        "rho": rho,
        "rho_star": rho_star(),
        "alpha": alpha_of(rho).ok(),
        "parameters": { "d": d, "delta": delta, "ell": ell, "n": n },
        "chernoff_checks": sweep.0,
        "chernoff_all_hold": sweep.1,
        "exponents": theorem_bounds(&params)?,
        "hypothesis": hypothesis_gate(&params)?,
    });
    json_only(common, value)
}
