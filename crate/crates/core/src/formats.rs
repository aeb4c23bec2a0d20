//! Plain-text formats for graphs, colourings, height functions, move lists
//! and sextuples. Every reader skips blank lines and `#` comments.
//!
//! Vertices in files are written as `side index`, with `index` local to the
//! partition class `side` (`E` or `O`).

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::approximation::Sextuple;
use crate::colouring::Colouring;
use crate::dynamics::Move;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side, Vertex, VertexSet};
use crate::heights::HeightFunction;

/// Non-comment lines with 1-based line numbers, split into fields.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then(|| (i + 1, body.split_whitespace().collect()))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: FromStr>(line: usize, raw: &str, what: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| parse_err(line, format!("bad {what} {raw:?}")))
}

/// `bipartite n_even n_odd d`, then `u v` per edge with local indices.
pub fn write_graph(graph: &BipartiteGraph) -> String {
    let mut out = format!(
        "bipartite {} {} {}\n",
        graph.class_size(Side::Even),
        graph.class_size(Side::Odd),
        graph.degree()
    );
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{} {}", graph.local_index(u), graph.local_index(v));
    }
    out
}

pub fn parse_graph(text: &str) -> Result<BipartiteGraph> {
    let mut lines = records(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header"))?;
    if header.len() != 4 || header[0] != "bipartite" {
        return Err(parse_err(line, "expected `bipartite <n_even> <n_odd> <d>`"));
    }
    let n_even: usize = field(line, header[1], "class size")?;
    let n_odd: usize = field(line, header[2], "class size")?;
    let degree: usize = field(line, header[3], "degree")?;
    let mut edges = Vec::new();
    for (line, rec) in lines {
        if rec.len() != 2 {
            return Err(parse_err(line, "expected `u v`"));
        }
        let u: usize = field(line, rec[0], "vertex")?;
        let v: usize = field(line, rec[1], "vertex")?;
        if u >= n_even || v >= n_odd {
            return Err(parse_err(line, format!("edge {u} {v} out of range")));
        }
        edges.push((u, v));
    }
    let graph = BipartiteGraph::from_class_edges(n_even, n_odd, &edges)?;
    if graph.degree() != degree {
        return Err(Error::InvalidGraph(format!(
            "header declares degree {degree}, edges give {}",
            graph.degree()
        )));
    }
    Ok(graph)
}

pub fn read_graph(path: &Path) -> Result<BipartiteGraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

fn vertex_of(graph: &BipartiteGraph, line: usize, side: &str, index: &str) -> Result<Vertex> {
    let side: Side = side.parse().map_err(|_| parse_err(line, format!("bad side {side:?}")))?;
    let index: usize = field(line, index, "index")?;
    graph
        .vertex_at(side, index)
        .ok_or_else(|| parse_err(line, format!("no vertex {side} {index}")))
}

fn write_vertex_values<T: std::fmt::Display>(graph: &BipartiteGraph, value: impl Fn(Vertex) -> T) -> String {
    let mut out = String::new();
    for side in Side::BOTH {
        for (i, &v) in graph.class(side).iter().enumerate() {
            let _ = writeln!(out, "{side} {i} {}", value(v));
        }
    }
    out
}

/// One `side index value` record per vertex, each vertex exactly once.
fn parse_vertex_values<T: FromStr>(graph: &BipartiteGraph, text: &str, what: &str) -> Result<Vec<T>> {
    let mut values: Vec<Option<T>> = (0..graph.vertex_count()).map(|_| None).collect();
    for (line, rec) in records(text) {
        if rec.len() != 3 {
            return Err(parse_err(line, format!("expected `side index {what}`")));
        }
        let v = vertex_of(graph, line, rec[0], rec[1])?;
        if values[v].is_some() {
            return Err(parse_err(line, format!("vertex {} {} listed twice", rec[0], rec[1])));
        }
        values[v] = Some(field(line, rec[2], what)?);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(v, x)| {
            x.ok_or_else(|| {
                Error::InvalidInput(format!(
                    "no {what} for vertex {} {}",
                    graph.side_of(v),
                    graph.local_index(v)
                ))
            })
        })
        .collect()
}

pub fn write_colouring(graph: &BipartiteGraph, chi: &Colouring) -> String {
    write_vertex_values(graph, |v| chi.colour(v))
}

pub fn parse_colouring(graph: &BipartiteGraph, text: &str, q: u8) -> Result<Colouring> {
    Colouring::new(q, parse_vertex_values(graph, text, "colour")?)
}

pub fn write_heights(graph: &BipartiteGraph, f: &HeightFunction) -> String {
    write_vertex_values(graph, |v| f.value(v))
}

pub fn parse_heights(graph: &BipartiteGraph, text: &str, root: Vertex) -> Result<HeightFunction> {
    HeightFunction::new(graph, root, parse_vertex_values(graph, text, "height")?)
}

/// One `(vertex, old_colour, new_colour)` per line.
pub fn write_moves(moves: &[Move]) -> String {
    moves
        .iter()
        .map(|m| format!("({}, {}, {})\n", m.vertex, m.from, m.to))
        .collect()
}

pub fn parse_moves(text: &str) -> Result<Vec<Move>> {
    records(text)
        .map(|(line, rec)| {
            let joined = rec.concat();
            let inner = joined
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| parse_err(line, "expected `(vertex, old, new)`"))?;
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 3 {
                return Err(parse_err(line, "expected three fields"));
            }
            Ok(Move {
                vertex: field(line, parts[0], "vertex")?,
                from: field(line, parts[1], "colour")?,
                to: field(line, parts[2], "colour")?,
            })
        })
        .collect()
}

fn write_set(out: &mut String, graph: &BipartiteGraph, set: &VertexSet) {
    out.push(set.side().tag());
    for v in set.iter() {
        let _ = write!(out, " {}", graph.local_index(v));
    }
    out.push('\n');
}

/// Six lines `side i j …` for `F, S, P, Q, P', Q'` in that order.
pub fn write_sextuple(graph: &BipartiteGraph, s: &Sextuple) -> String {
    let mut out = String::new();
    for set in [&s.f, &s.s, &s.p, &s.q, &s.p_prime, &s.q_prime] {
        write_set(&mut out, graph, set);
    }
    out
}

pub fn parse_sextuple(graph: &BipartiteGraph, text: &str) -> Result<Sextuple> {
    let mut sets = Vec::new();
    for (line, rec) in records(text) {
        let side: Side = rec[0]
            .parse()
            .map_err(|_| parse_err(line, format!("bad side {:?}", rec[0])))?;
        let members = rec[1..]
            .iter()
            .map(|raw| vertex_of(graph, line, rec[0], raw))
            .collect::<Result<Vec<_>>>()?;
        sets.push(VertexSet::new(graph, side, members)?);
    }
    let [f, s, p, q, p_prime, q_prime]: [VertexSet; 6] = sets
        .try_into()
        .map_err(|v: Vec<VertexSet>| Error::InvalidInput(format!("sextuple needs 6 sets, got {}", v.len())))?;
    Sextuple::new(f, s, p, q, p_prime, q_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::ZeroSetPair;
    use crate::families::{build_graph, GraphFamily};
    use crate::heights::{ergodicity_path, phi_inverse};

    fn cube(d: usize) -> BipartiteGraph {
        build_graph(&GraphFamily::Hypercube { dim: d }).unwrap()
    }

    #[test]
    fn graph_round_trip() {
        for fam in [
            GraphFamily::Hypercube { dim: 3 },
            GraphFamily::EvenCycle { len: 8 },
            GraphFamily::RandomRegular {
                n_even: 7,
                degree: 3,
                seed: 2,
            },
        ] {
            let g = build_graph(&fam).unwrap();
            let back = parse_graph(&write_graph(&g)).unwrap();
            assert_eq!(back.degree(), g.degree());
            assert_eq!(write_graph(&back), write_graph(&g));
        }
    }

    #[test]
    fn graph_parser_handles_comments_and_rejects_junk() {
        let text = "# square\nbipartite 2 2 2\n\n0 0\n0 1 # edge\n1 0\n1 1\n";
        assert_eq!(parse_graph(text).unwrap().edge_count(), 4);
        assert!(matches!(parse_graph(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("graph 2 2 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_graph("bipartite 2 2 2\n0 0\n0 5\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_graph("bipartite 2 2 1\n0 0\n0 1\n1 0\n1 1\n").is_err());
        // parallel edge
        assert!(parse_graph("bipartite 2 2 2\n0 0\n0 0\n1 1\n1 1\n").is_err());
        // irregular
        assert!(parse_graph("bipartite 2 2 1\n0 0\n0 1\n1 1\n").is_err());
    }

    #[test]
    fn colouring_and_heights_round_trip() {
        let g = cube(3);
        let chi = Colouring::new(3, vec![0, 1, 2, 0, 1, 0, 0, 1]).unwrap();
        assert!(chi.is_proper(&g));
        let text = write_colouring(&g, &chi);
        assert!(text.starts_with("E 0 0\n"));
        assert_eq!(parse_colouring(&g, &text, 3).unwrap(), chi);
        let f = phi_inverse(&g, &chi, 0).unwrap();
        assert_eq!(parse_heights(&g, &write_heights(&g, &f), 0).unwrap(), f);
        let missing: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(parse_colouring(&g, &missing, 3).is_err());
        let doubled = format!("{text}E 0 0\n");
        assert!(matches!(parse_colouring(&g, &doubled, 3), Err(Error::Parse { .. })));
        assert!(parse_colouring(&g, &text.replace("E 0 0", "X 0 0"), 3).is_err());
    }

    #[test]
    fn moves_round_trip() {
        let g = cube(3);
        let chi = Colouring::new(3, vec![0, 1, 2, 0, 1, 0, 0, 1]).unwrap();
        let path = ergodicity_path(&g, &chi, 0).unwrap();
        let text = write_moves(&path.moves);
        assert_eq!(parse_moves(&text).unwrap(), path.moves);
        assert_eq!(parse_moves("( 3 , 1 , 2 )\n").unwrap()[0], Move { vertex: 3, from: 1, to: 2 });
        assert!(parse_moves("3 1 2\n").is_err());
    }

    #[test]
    fn sextuple_round_trip() {
        let g = cube(2);
        let pair = ZeroSetPair::new(
            VertexSet::new(&g, Side::Even, [0, 3]).unwrap(),
            VertexSet::empty(&g, Side::Odd),
        )
        .unwrap();
        let s = Sextuple::trivial(&g, &pair);
        let text = write_sextuple(&g, &s);
        assert_eq!(text, "O 0 1\nE 0 1\nE 0 1\nO 0 1\nO\nE\n");
        assert_eq!(parse_sextuple(&g, &text).unwrap(), s);
        assert!(parse_sextuple(&g, "O 0\n").is_err());
        assert!(parse_sextuple(&g, "E\nE\nE\nO\nO\nE\n").is_err());
    }
}
