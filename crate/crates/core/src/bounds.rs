//! Binary entropy, binomial tail checks, `α(ρ)`, `ρ*`, and the exponents of
//! the closed-form mixing-time and class-size bounds. Logarithms are base 2.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

/// Bisection stops once the bracket is narrower than this.
const BISECTION_WIDTH: f64 = 1e-13;

/// Slack when comparing `log₂` of an exact sum with a real exponent.
const LOG_TOLERANCE: f64 = 1e-9;

/// `H(x) = -x log x - (1-x) log(1-x)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("entropy argument {x} outside [0, 1]")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

fn entropy(x: f64) -> f64 {
    binary_entropy(x).expect("argument checked by caller")
}

fn bisect(mut lo: f64, mut hi: f64, below: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Root of `H(ρ) + ρ = 1` in `(0, 1/2)`.
pub fn rho_star() -> f64 {
    bisect(0.0, 0.5, |r| entropy(r) + r < 1.0)
}

/// `2α' + ρ + H(α') + H(ρ + α')` against `(1 + ρ + H(ρ)) / 2`.
fn alpha_constraint(rho: f64, a: f64) -> bool {
    2.0 * a + rho + entropy(a) + entropy(rho + a) <= (1.0 + rho + entropy(rho)) / 2.0
}

/// `α(ρ) = sup { α' ∈ [0, 1/2 - ρ] : 2α' + ρ + H(α') + H(ρ+α') <= (1+ρ+H(ρ))/2 }`.
pub fn alpha_of(rho: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&rho) {
        return Err(Error::InvalidInput(format!("rho = {rho} outside [0, 1/2)")));
    }
    if entropy(rho) + rho >= 1.0 {
        return Err(Error::InvalidInput(format!("H(rho) + rho >= 1 for rho = {rho}")));
    }
    let top = 0.5 - rho;
    if alpha_constraint(rho, top) {
        return Ok(top);
    }
    Ok(bisect(0.0, top, |a| alpha_constraint(rho, a)))
}

/// `log₂` of a positive big integer, accurate to about 1e-15 relative.
fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().log2() + shift as f64
}

fn binomial_prefix_sum(m: u64, top: u64) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for i in 1..=top.min(m) {
        term = term * (m - i + 1) / i;
        sum += &term;
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernoffCheck {
    pub m: u64,
    pub beta: f64,
    /// `log₂ Σ_{i <= βM} C(M, i)`
    pub lhs_log2: f64,
    pub rhs_log2: f64,
    pub holds: bool,
}

fn chernoff(m: u64, beta: f64, rhs_log2: f64) -> Result<ChernoffCheck> {
    if m > 1000 {
        return Err(Error::InvalidInput(format!("M = {m} exceeds 1000")));
    }
    let top = (beta * m as f64 + 1e-9).floor() as u64;
    let lhs_log2 = log2_big(&binomial_prefix_sum(m, top));
    Ok(ChernoffCheck {
        m,
        beta,
        lhs_log2,
        rhs_log2,
        holds: lhs_log2 <= rhs_log2 + LOG_TOLERANCE,
    })
}

/// `Σ_{i <= βM} C(M, i) <= 2^{H(β) M}` for `β <= 1/2`.
pub fn chernoff_entropy_check(m: u64, beta: f64) -> Result<ChernoffCheck> {
    if !(0.0..=0.5).contains(&beta) {
        return Err(Error::InvalidInput(format!("beta = {beta} outside [0, 1/2]")));
    }
    chernoff(m, beta, entropy(beta) * m as f64)
}

/// `Σ_{i <= βM} C(M, i) <= 2^{2βM log(1/β)}` for `β <= 1/e`.
pub fn chernoff_log_check(m: u64, beta: f64) -> Result<ChernoffCheck> {
    if !(0.0..=(-1.0f64).exp()).contains(&beta) {
        return Err(Error::InvalidInput(format!("beta = {beta} outside [0, 1/e]")));
    }
    let rhs = if beta == 0.0 {
        0.0
    } else {
        2.0 * beta * m as f64 * (1.0 / beta).log2()
    };
    chernoff(m, beta, rhs)
}

/// Constants the bounds are stated with; none has a canonical value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoremConstants {
    pub c1: f64,
    pub c1_prime: f64,
    pub c2: f64,
    /// Constant of the hypercube mixing bound.
    pub c: f64,
    /// Constant of the hypercube imbalance bound.
    pub c_prime: f64,
    pub d0: usize,
}

impl Default for TheoremConstants {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c1_prime: 1.0,
            c2: 1.0,
            c: 1.0,
            c_prime: 1.0,
            d0: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundParameters {
    pub rho: f64,
    pub delta: f64,
    pub ell: f64,
    pub d: usize,
    pub n: f64,
    pub constants: TheoremConstants,
}

/// Base-2 exponents of the four bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoremExponents {
    /// `τ >= 2^{C₂ N δ / log d}`
    pub thm_main: f64,
    /// `|C₃^{b,ρ,0}| <= 2^{(N/2)(1 - C₂ δ / log d)}`
    pub thm_main2: f64,
    /// `τ(Q_d) >= 2^{c 2^d / (√d log d)}`
    pub cor_cube: f64,
    /// Imbalanced fraction on `Q_d` at least `1 - 2^{-c' 2^d / (√d log d)}`.
    pub cor_imbalance: f64,
}

fn ensure_degree(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("bounds need d >= 2, got {d}")));
    }
    Ok((d as f64).log2())
}

pub fn theorem_bounds(params: &BoundParameters) -> Result<TheoremExponents> {
    let log_d = ensure_degree(params.d)?;
    let k = &params.constants;
    let cube = 2f64.powi(params.d as i32) / ((params.d as f64).sqrt() * log_d);
    Ok(TheoremExponents {
        thm_main: k.c2 * params.n * params.delta / log_d,
        thm_main2: params.n / 2.0 * (1.0 - k.c2 * params.delta / log_d),
        cor_cube: k.c * cube,
        cor_imbalance: -k.c_prime * cube,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HypothesisGate {
    /// `max { C₁ log³d / d, C₁' log d / ℓ }`
    pub delta_threshold: f64,
    pub delta_ok: bool,
    pub entropy_ok: bool,
    pub degree_ok: bool,
    pub passes: bool,
}

pub fn hypothesis_gate(params: &BoundParameters) -> Result<HypothesisGate> {
    let log_d = ensure_degree(params.d)?;
    if !(0.0..0.5).contains(&params.rho) {
        return Err(Error::InvalidInput(format!("rho = {} outside [0, 1/2)", params.rho)));
    }
    let k = &params.constants;
    let delta_threshold =
        (k.c1 * log_d.powi(3) / params.d as f64).max(k.c1_prime * log_d / params.ell);
    let delta_ok = params.delta >= delta_threshold;
    let entropy_ok = entropy(params.rho) + params.rho < 1.0;
    let degree_ok = params.d >= k.d0;
    Ok(HypothesisGate {
        delta_threshold,
        delta_ok,
        entropy_ok,
        degree_ok,
        passes: delta_ok && entropy_ok && degree_ok,
    })
}
