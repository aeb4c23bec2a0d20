//! `torpid`: reproducible experiments on colourings of regular bipartite graphs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use torpid::colouring::Rho;
use torpid::families::{build_graph, GraphFamily};
use torpid::formats::read_graph;
use torpid::{BipartiteGraph, Error, Limits, Side};

#[derive(Parser, Debug)]
#[command(name = "torpid", version, about = "Exact analysis of Glauber dynamics on proper colourings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural invariants: expansion, locality, perfect matching.
    Graph(Common),
    /// Colouring counts by backtracking and by zero-set decomposition.
    Count(Common),
    /// Exact transition matrix, ergodicity and mixing time.
    Mix {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
        variant: VariantArg,
    },
    /// Bottleneck bound for the cut between a heavy phase and the balanced set.
    Conductance {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        colour: usize,
        #[arg(long, default_value = "E")]
        side: Side,
    },
    /// Simulated trajectories from a heavy start.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
        variant: VariantArg,
        /// Class that starts monochromatic.
        #[arg(long, default_value = "E")]
        start_side: Side,
        #[arg(long, default_value_t = 0)]
        start_colour: u8,
        /// Independent escape-time runs; run `k` uses seed `seed ^ k`.
        #[arg(long, default_value_t = 0)]
        runs: usize,
    },
    /// Height-function bijection, ergodicity paths and frozen states.
    Heights {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        root: usize,
    },
    /// Parameter-class census and approximation checks.
    Approx {
        #[command(flatten)]
        common: Common,
        /// Degree slack ψ; defaults to √d.
        #[arg(long)]
        psi: Option<f64>,
    },
    /// Entropy constants, binomial checks and bound exponents.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        bounds: BoundArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// `family:params` (e.g. `hypercube:3`, `torus:4,2`) or a graph file.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, default_value_t = 3)]
    q: u8,
    #[arg(long, default_value = "1/5")]
    rho: Rho,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Largest state space for exact matrices.
    #[arg(long, default_value_t = Limits::default().states)]
    guard_states: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct BoundArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    ell: Option<f64>,
    /// Vertex count `N`.
    #[arg(long)]
    n: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 1.0)]
    c1_prime: f64,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    c_prime: f64,
    #[arg(long, default_value_t = 2)]
    d0: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VariantArg {
    Plain,
    Restricted,
}

impl Common {
    fn limits(&self) -> Limits {
        Limits {
            states: self.guard_states,
            ..Limits::default()
        }
    }

    fn load_graph(&self) -> torpid::Result<BipartiteGraph> {
        let spec = self
            .graph
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("--graph is required".into()))?;
        let path = std::path::Path::new(spec);
        if path.is_file() {
            read_graph(path)
        } else {
            build_graph(&spec.parse::<GraphFamily>()?)
        }
    }
}

/// Result of a subcommand: JSON or a CSV table.
pub enum Output {
    Json(serde_json::Value),
    Csv(String),
}

fn run(cli: Cli) -> torpid::Result<(Output, Common)> {
    let out = match cli.command {
        Command::Graph(c) => (commands::graph(&c.load_graph()?, &c)?, c),
        Command::Count(c) => (commands::count(&c.load_graph()?, &c)?, c),
        Command::Mix { common, variant } => (commands::mix(&common.load_graph()?, &common, variant)?, common),
        Command::Conductance { common, colour, side } => {
            (commands::conductance(&common.load_graph()?, &common, colour, side)?, common)
        }
        Command::Simulate {
            common,
            variant,
            start_side,
            start_colour,
            runs,
        } => (
            commands::simulate(&common.load_graph()?, &common, variant, start_side, start_colour, runs)?,
            common,
        ),
        Command::Heights { common, root } => (commands::heights(&common.load_graph()?, &common, root)?, common),
        Command::Approx { common, psi } => (commands::approx(&common.load_graph()?, &common, psi)?, common),
        Command::Bounds { common, bounds } => {
            let graph = match common.graph {
                Some(_) => Some(common.load_graph()?),
                None => None,
            };
            (commands::bounds(graph.as_ref(), &common, &bounds)?, common)
        }
    };
    Ok(out)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::GuardExceeded { .. } => 2,
        Error::Structural { .. } => 4,
        _ => 3,
    }
}

fn error_json(err: &Error) -> serde_json::Value {
    let kind = match err {
        Error::GuardExceeded { .. } => "guard_exceeded",
        Error::Structural { .. } => "structural",
        Error::Io(_) => "io",
        _ => "invalid_input",
    };
    let mut body = json!({ "error": kind, "message": err.to_string() });
    if let Error::Structural { upper, first, second } = err {
        body["witness"] = json!({ "upper": upper, "first": first, "second": second });
    }
    body
}

fn emit(output: Output, common: &Common) -> torpid::Result<()> {
    let text = match output {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Output::Csv(s) => s,
    };
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(output, common)| emit(output, &common));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_json(&err));
            ExitCode::from(exit_code(&err))
        }
    }
}
