//! Exact counts of ordered complete r-partite subgraphs and the constant-free
//! Jensen lower bound on them.

use crate::hypergraph::RPartiteHypergraph;
use crate::pattern::{binomial, neighborhood_histogram, pattern_count, DEFAULT_ENUMERATION_BUDGET};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("pattern has {got} part sizes, graph has {expected} parts")]
    PatternArity { expected: usize, got: usize },
    #[error("pattern sizes must be positive")]
    ZeroPatternSize,
    #[error("enumerating {patterns} subset tuples exceeds the budget {budget}")]
    Budget { patterns: u64, budget: u64 },
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn uint(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// Binomial coefficient extended to rational `x`: zero below `s - 1`, the
/// falling-factorial polynomial `x(x-1)...(x-s+1)/s!` from `s - 1` on.
pub fn gen_binom(x: &BigRational, s: u32) -> BigRational {
    assert!(s >= 1, "gen_binom needs s >= 1");
    if *x < int(s - 1) {
        return BigRational::zero();
    }
    let mut num = BigRational::one();
    let mut fact = BigInt::one();
    for i in 0..s {
        num *= x - int(i);
        fact *= BigInt::from(i + 1);
    }
    num / int(fact)
}

fn check_pattern(g: &RPartiteHypergraph, s_list: &[usize]) -> Result<(), CountError> {
    if s_list.len() != g.r() {
        return Err(CountError::PatternArity { expected: g.r(), got: s_list.len() });
    }
    if s_list.contains(&0) {
        return Err(CountError::ZeroPatternSize);
    }
    Ok(())
}

fn check_budget(g: &RPartiteHypergraph, s_list: &[usize], budget: u64) -> Result<(), CountError> {
    let k = g.r() - 1;
    let patterns = pattern_count(&g.part_sizes()[..k], &s_list[..k]).unwrap_or(u64::MAX);
    if patterns > budget {
        return Err(CountError::Budget { patterns, budget });
    }
    Ok(())
}

/// Exact `t_a` and `t_b` from one pass over the subset tuples of the first
/// `r - 1` parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCounts {
    /// Ordered copies of `K_{s_1,...,s_{r-1},1}`.
    pub star: BigUint,
    /// Ordered copies of `K_{s_1,...,s_r}`.
    pub full: BigUint,
}

pub fn exact_counts(g: &RPartiteHypergraph, s_list: &[usize], budget: u64) -> Result<ExactCounts, CountError> {
    check_pattern(g, s_list)?;
    check_budget(g, s_list, budget)?;
    let k = g.r() - 1;
    let hist = neighborhood_histogram(g, &s_list[..k]);
    let s_last = s_list[k] as u64;
    let mut star = BigUint::zero();
    let mut full = BigUint::zero();
    for (c, &n) in hist.iter().enumerate() {
        if n == 0 {
            continue;
        }
        star += BigUint::from(c as u64) * n;
        full += binomial(c as u64, s_last) * n;
    }
    Ok(ExactCounts { star, full })
}

/// Number of ordered `K_{s_1,...,s_r}` in `g`.
pub fn count_ordered(g: &RPartiteHypergraph, s_list: &[usize]) -> Result<BigUint, CountError> {
    count_ordered_budget(g, s_list, DEFAULT_ENUMERATION_BUDGET)
}

pub fn count_ordered_budget(g: &RPartiteHypergraph, s_list: &[usize], budget: u64) -> Result<BigUint, CountError> {
    Ok(exact_counts(g, s_list, budget)?.full)
}

/// Lower bound on [`count_ordered`] obtained by applying Jensen's inequality
/// to the convex [`gen_binom`]: degree sums at `r = 2`, and for larger `r`
/// the per-vertex bounds of the last-part links summed into a bound on
/// `t_a`, followed by one more Jensen step over subset tuples.
pub fn jensen_lower_bound(g: &RPartiteHypergraph, s_list: &[usize]) -> Result<BigRational, CountError> {
    check_pattern(g, s_list)?;
    if g.r() < 2 {
        return Err(CountError::PatternArity { expected: 2, got: g.r() });
    }
    Ok(jensen_star_and_full(g, s_list).1)
}

/// `(t_a lower bound, t_b lower bound)`.
fn jensen_star_and_full(g: &RPartiteHypergraph, s_list: &[usize]) -> (BigRational, BigRational) {
    let r = g.r();
    let parts = g.part_sizes();
    let tuples: BigUint = parts[..r - 1]
        .iter()
        .zip(s_list)
        .map(|(&m, &s)| binomial(m as u64, s as u64))
        .product();
    let star = if r == 2 {
        let m2 = parts[1];
        if m2 == 0 {
            BigRational::zero()
        } else {
            let mean = int(g.edge_count() as u64) / int(m2 as u64);
            int(m2 as u64) * gen_binom(&mean, s_list[0] as u32)
        }
    } else {
        (0..parts[r - 1])
            .map(|v| {
                let link = g.link(v).expect("vertex in range");
                jensen_star_and_full(&link, &s_list[..r - 1]).1
            })
            .fold(BigRational::zero(), |a, b| a + b)
    };
    let full = if tuples.is_zero() {
        BigRational::zero()
    } else {
        let n = uint(&tuples);
        n.clone() * gen_binom(&(star.clone() / n), s_list[r - 1] as u32)
    };
    (star, full)
}

/// Exact and lower-bound counts for one graph and pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub part_sizes: Vec<usize>,
    pub pattern: Vec<usize>,
    pub edges: usize,
    /// `|E| / prod m_i`.
    #[serde(with = "crate::serde_text::rational")]
    pub density: BigRational,
    /// Ordered `K_{s_1,...,s_{r-1},1}` count.
    #[serde(with = "crate::serde_text::big_uint")]
    pub t_a: BigUint,
    /// Ordered `K_{s_1,...,s_r}` count.
    #[serde(with = "crate::serde_text::big_uint")]
    pub t_b: BigUint,
    #[serde(with = "crate::serde_text::rational")]
    pub t_a_lower_bound: BigRational,
    #[serde(with = "crate::serde_text::rational")]
    pub t_b_lower_bound: BigRational,
    /// `t_b >= t_b_lower_bound`.
    pub bound_holds: bool,
}

pub fn count_report(g: &RPartiteHypergraph, s_list: &[usize], budget: u64) -> Result<CountReport, CountError> {
    let exact = exact_counts(g, s_list, budget)?;
    if g.r() < 2 {
        return Err(CountError::PatternArity { expected: 2, got: g.r() });
    }
    let (star_lb, full_lb) = jensen_star_and_full(g, s_list);
    let bound_holds = uint(&exact.full) >= full_lb;
    Ok(CountReport {
        part_sizes: g.part_sizes().to_vec(),
        pattern: s_list.to_vec(),
        edges: g.edge_count(),
        density: density(g),
        t_a: exact.star,
        t_b: exact.full,
        t_a_lower_bound: star_lb,
        t_b_lower_bound: full_lb,
        bound_holds,
    })
}

pub fn density(g: &RPartiteHypergraph) -> BigRational {
    let total: BigUint = g.part_sizes().iter().map(|&m| BigUint::from(m as u64)).product();
    if total.is_zero() {
        return BigRational::zero();
    }
    int(g.edge_count() as u64) / uint(&total)
}

/// Outcome of probing the two inequalities of the supersaturation statement
/// with user-chosen constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupersaturationReport {
    #[serde(with = "crate::serde_text::rational")]
    pub c1_probe: BigRational,
    #[serde(with = "crate::serde_text::rational")]
    pub c2_probe: BigRational,
    /// `|E| >= c1 * prod_{i<r} m_i * m_r^{1 - 1/(s_1...s_{r-1})}`.
    pub edge_premise: bool,
    /// `t_b >= c2 * prod C(m_i, s_i) * p^{prod s_i}`.
    pub count_conclusion: bool,
    /// The premise fails, so the conclusion is not implied.
    pub vacuous: bool,
    #[serde(with = "crate::serde_text::big_uint")]
    pub count: BigUint,
    #[serde(with = "crate::serde_text::rational")]
    pub target: BigRational,
    /// `t_b / (prod C(m_i, s_i) * p^{prod s_i})`, absent when the denominator
    /// vanishes.
    #[serde(with = "crate::serde_text::opt_rational")]
    pub ratio: Option<BigRational>,
}

pub fn supersaturation_check(
    g: &RPartiteHypergraph,
    s_list: &[usize],
    c1_probe: &BigRational,
    c2_probe: &BigRational,
    budget: u64,
) -> Result<SupersaturationReport, CountError> {
    check_pattern(g, s_list)?;
    let r = g.r();
    let parts = g.part_sizes();
    let count = count_ordered_budget(g, s_list, budget)?;

    // |E| >= c1 M m_r^{(S-1)/S}  <=>  (|E| / (c1 M))^S >= m_r^{S-1}, exact.
    let left: BigUint = parts[..r - 1].iter().map(|&m| BigUint::from(m as u64)).product();
    let left_s: u32 = s_list[..r - 1].iter().map(|&s| s as u32).product();
    let edges = int(g.edge_count() as u64);
    let edge_premise = if !c1_probe.is_positive() || left.is_zero() {
        true
    } else {
        let a = edges / (c1_probe * uint(&left));
        num_traits::pow(a, left_s as usize) >= int(parts[r - 1] as u64).pow((left_s - 1) as i32)
    };

    let tuples: BigUint = parts
        .iter()
        .zip(s_list)
        .map(|(&m, &s)| binomial(m as u64, s as u64))
        .product();
    let total_s: usize = s_list.iter().product();
    let base = uint(&tuples) * num_traits::pow(density(g), total_s);
    let target = c2_probe * &base;
    let count_conclusion = uint(&count) >= target;
    let ratio = (!base.is_zero()).then(|| uint(&count) / base);
    Ok(SupersaturationReport {
        c1_probe: c1_probe.clone(),
        c2_probe: c2_probe.clone(),
        edge_premise,
        count_conclusion,
        vacuous: !edge_premise,
        count,
        target,
        ratio,
    })
}
