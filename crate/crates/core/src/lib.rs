//! Exact, desk-scale analysis of Glauber dynamics and other local Markov
//! chains on proper 3-colourings of regular bipartite graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`], [`families`], [`invariants`]: regular bipartite graphs, the
//!   constructors used as a test corpus, and the structural invariants
//!   (bipartite expansion δ, locality ℓ).
//! - [`colouring`]: proper colourings, enumeration, the zero-set
//!   decomposition `|C₃(E,O)| = 2^{|I|+|J|+comp(R)}`, and phase labels.
//! - [`dynamics`]: Glauber steps, exact transition matrices, mixing times and
//!   the bottleneck (conductance) lower bound.
//! - [`heights`]: the bijection between 3-colourings and ℤ-homomorphisms and
//!   the ergodicity path built from it.
//! - [`approximation`]: approximation pairs, parameter classes and the
//!   reconstruction procedure.
//! - [`bounds`]: entropy, binomial-tail checks and the closed-form bound
//!   exponents.
//! - [`formats`]: plain-text file formats.

pub mod approximation;
pub mod bounds;
pub mod colouring;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod formats;
pub mod graph;
pub mod heights;
pub mod invariants;
pub mod limits;
mod pairs;

pub use error::{Error, Result};
pub use graph::{BipartiteGraph, Side, Vertex, VertexSet};
pub use limits::Limits;
