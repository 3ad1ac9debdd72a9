//! The random algebraic construction.
//!
//! Every tuple `(u_1, ..., u_{r-1})` of vertices from the first `r - 1` parts
//! gets a polynomial `f` in `s - 1` variables of degree at most `d`, and is
//! joined to the points `(x, f(x))` of `F_q^s`. A copy of
//! `K_{s_1,...,s_{r-1},t}` would need `s = prod s_i` polynomials agreeing on
//! `t` points, so the polynomials are picked one tuple at a time and a
//! candidate is resampled whenever it completes a subset pattern whose
//! agreement set has `t` or more points.

use crate::gf::{Elem, Field, FieldSpec, GfError};
use crate::hypergraph::{bits, RPartiteHypergraph};
use crate::mpoly::{
    agreement_count_until, monomial_basis, random_poly, Domain, MonomialBasis, MultiPoly, PolyError, PolyRecord,
    DEFAULT_DOMAIN_CAP,
};
use crate::pattern::{fold_patterns, next_combination, pattern_count, DEFAULT_ENUMERATION_BUDGET};
use crate::seed::rng_for;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("pattern sizes s_1..s_(r-1) must be non-empty and positive")]
    BadPattern,
    #[error("s = {s} must be at least 2")]
    ProductTooSmall { s: u64 },
    #[error("hypothesis s <= t violated: s = {s}, t = {t}")]
    Hypothesis { s: u64, t: u64 },
    #[error("internal inconsistency: d^(s-1) = {power} is not below t = {t}")]
    Inconsistent { power: u64, t: u64 },
    #[error("expected {expected} part sizes, got {got}")]
    PartArity { expected: usize, got: usize },
    #[error("part sizes must be positive")]
    ZeroPart,
    #[error("{tuples} tuples exceed the capacity ell = {ell}")]
    OverCapacity { tuples: u64, ell: u64 },
    #[error("parameters too large: {0}")]
    TooLarge(String),
    #[error("enumerating {patterns} subset tuples exceeds the budget {budget}")]
    Budget { patterns: u64, budget: u64 },
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0}")]
    RetriesExhausted(Box<SelectionFailure>),
}

/// Parameters of one construction together with the derived quantities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub r: usize,
    pub s_list: Vec<usize>,
    pub t: u64,
    pub q: u64,
    pub m_list: Vec<usize>,
    /// `prod s_i`.
    pub s: u64,
    /// `ceil(t^(1/(s-1))) - 1`.
    pub d: u32,
    /// `floor(q^((d+1)/(s-1)) / (2d))`, saturated to `u64::MAX`.
    #[serde(with = "crate::serde_text::display")]
    pub ell: u64,
    /// `q^s`, the size of the last part.
    pub n: u64,
    /// Accept `prod m_i > ell`.
    #[serde(default)]
    pub allow_over_capacity: bool,
}

/// Smallest `c` with `c^k >= x`.
fn ceil_root(x: &BigUint, k: u32) -> BigUint {
    let c = x.nth_root(k);
    if c.pow(k) == *x {
        c
    } else {
        c + 1u32
    }
}

/// Derives `d`, `ell` and `n` from the pattern, `t` and `q`, all in exact
/// integer arithmetic. The part sizes are left empty; see
/// [`ConstructionParams::with_part_sizes`].
pub fn derive_params(s_list: &[usize], t: u64, q: u64) -> Result<ConstructionParams, ConstructError> {
    if s_list.is_empty() || s_list.contains(&0) {
        return Err(ConstructError::BadPattern);
    }
    let s = s_list
        .iter()
        .try_fold(1u64, |acc, &x| acc.checked_mul(x as u64))
        .ok_or_else(|| ConstructError::TooLarge("s overflows".into()))?;
    if s < 2 {
        return Err(ConstructError::ProductTooSmall { s });
    }
    if t < s {
        return Err(ConstructError::Hypothesis { s, t });
    }
    Field::with_order(q)?;
    let vars = u32::try_from(s - 1).map_err(|_| ConstructError::TooLarge("s".into()))?;
    let c = ceil_root(&BigUint::from(t), vars);
    let d = (c - 1u32)
        .to_u32()
        .ok_or_else(|| ConstructError::TooLarge("d".into()))?;
    let power = BigUint::from(d).pow(vars);
    if power >= BigUint::from(t) || d == 0 {
        return Err(ConstructError::Inconsistent { power: power.to_u64().unwrap_or(u64::MAX), t });
    }
    let ell = BigUint::from(q).pow(d + 1).nth_root(vars) / (2 * d as u64);
    let ell = ell.to_u64().unwrap_or(u64::MAX);
    let n = u32::try_from(s)
        .ok()
        .and_then(|s| q.checked_pow(s))
        .filter(|&n| n <= u32::MAX as u64)
        .ok_or_else(|| ConstructError::TooLarge(format!("q^s = {q}^{s} does not fit a vertex index")))?;
    Ok(ConstructionParams {
        r: s_list.len() + 1,
        s_list: s_list.to_vec(),
        t,
        q,
        m_list: Vec::new(),
        s,
        d,
        ell,
        n,
        allow_over_capacity: false,
    })
}

impl ConstructionParams {
    /// Sets the part sizes `m_1..m_{r-1}`, enforcing `prod m_i <= ell` unless
    /// `allow_over_capacity` is set.
    pub fn with_part_sizes(mut self, m_list: &[usize]) -> Result<Self, ConstructError> {
        if m_list.len() != self.r - 1 {
            return Err(ConstructError::PartArity { expected: self.r - 1, got: m_list.len() });
        }
        if m_list.contains(&0) {
            return Err(ConstructError::ZeroPart);
        }
        self.m_list = m_list.to_vec();
        let tuples = self.tuple_count();
        if tuples > self.ell && !self.allow_over_capacity {
            return Err(ConstructError::OverCapacity { tuples, ell: self.ell });
        }
        Ok(self)
    }

    pub fn allowing_over_capacity(mut self, allow: bool) -> Self {
        self.allow_over_capacity = allow;
        self
    }

    pub fn tuple_count(&self) -> u64 {
        self.m_list.iter().fold(1u64, |a, &m| a.saturating_mul(m as u64))
    }

    /// `d^(s-1)`, the bound on a zero-dimensional agreement set.
    pub fn bezout_bound(&self) -> u64 {
        (self.d as u64).saturating_pow((self.s - 1) as u32)
    }

    pub fn within_capacity(&self) -> bool {
        self.tuple_count() <= self.ell
    }

    /// Equal part sizes `floor(ell^(1/(r-1)))`.
    pub fn balanced_split(&self) -> Vec<usize> {
        let b = BigUint::from(self.ell).nth_root((self.r - 1) as u32);
        vec![b.to_usize().unwrap_or(usize::MAX); self.r - 1]
    }

    /// `n^(t^(1/(s-1)) / (s(s-1)))`, the tuple-count range of the lower bound
    /// statement. Floating point; reported only.
    pub fn range_limit(&self) -> f64 {
        let s = self.s as f64;
        let exponent = (self.t as f64).powf(1.0 / (s - 1.0)) / (s * (s - 1.0));
        (self.n as f64).powf(exponent)
    }

    /// Non-fatal observations about the chosen part sizes.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.within_capacity() {
            out.push(format!("{} tuples exceed ell = {}", self.tuple_count(), self.ell));
        }
        let balanced = self.balanced_split();
        let balanced_tuples = balanced.iter().fold(1u64, |a, &m| a.saturating_mul(m as u64));
        if self.r > 2 && balanced_tuples > self.tuple_count() {
            out.push(format!("balanced split {balanced:?} would allow {balanced_tuples} tuples"));
        }
        if (self.tuple_count() as f64) > self.range_limit() {
            out.push(format!(
                "{} tuples exceed the range limit {:.3}",
                self.tuple_count(),
                self.range_limit()
            ));
        }
        out
    }

    /// Rank of a tuple in lexicographic order.
    pub fn tuple_rank(&self, tuple: &[u32]) -> usize {
        tuple
            .iter()
            .zip(&self.m_list)
            .fold(0usize, |acc, (&p, &m)| acc * m + p as usize)
    }

    pub fn tuple_at(&self, mut rank: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.m_list.len()];
        for (slot, &m) in out.iter_mut().zip(&self.m_list).rev() {
            *slot = (rank % m) as u32;
            rank /= m;
        }
        out
    }
}

/// Budgets and retry caps for building and verifying.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub enumeration_budget: u64,
    pub domain_cap: u64,
    pub per_position_retries: u32,
    pub restarts: u32,
    /// Certificates list every pattern only up to this many patterns.
    pub table_limit: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            domain_cap: DEFAULT_DOMAIN_CAP,
            per_position_retries: 64,
            restarts: 16,
            table_limit: 4096,
        }
    }
}

/// One polynomial per tuple, in lexicographic tuple order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFamily {
    m_list: Vec<usize>,
    polys: Vec<MultiPoly>,
}

impl PolyFamily {
    pub fn m_list(&self) -> &[usize] {
        &self.m_list
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn records(&self, field: &Field) -> Vec<PolyRecord> {
        self.polys.iter().map(|p| p.to_record(field)).collect()
    }
}

/// A pattern that a candidate could not avoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// The subsets `S_1, ..., S_{r-1}`.
    pub pattern: Vec<Vec<u32>>,
    pub agreement: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionFailure {
    pub position: Vec<u32>,
    pub violation: Violation,
    pub restarts: u32,
    /// Longest prefix of the family that any attempt managed to fix.
    pub best_attempt: PolyFamily,
}

impl std::fmt::Display for SelectionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "retry budget exhausted after {} restarts: position {:?} kept completing pattern {:?} \
             with {} agreement points (best attempt fixed {} polynomials); q is likely too small",
            self.restarts,
            self.position,
            self.violation.pattern,
            self.violation.agreement,
            self.best_attempt.len()
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectStats {
    /// Full restarts used before success.
    pub restarts: u32,
    /// Rejected candidates in the successful attempt.
    pub resamples: u64,
    /// Patterns checked in the successful attempt.
    pub patterns_checked: u64,
}

/// The acceptance test of the sequential selection: value tables of the
/// polynomials fixed so far, and the pattern check for the next position.
pub struct Selector<'a> {
    params: &'a ConstructionParams,
    tables: Vec<Vec<Elem>>,
}

impl<'a> Selector<'a> {
    pub fn new(params: &'a ConstructionParams) -> Self {
        Selector { params, tables: Vec::new() }
    }

    pub fn fixed(&self) -> usize {
        self.tables.len()
    }

    pub fn push(&mut self, table: Vec<Elem>) {
        self.tables.push(table);
    }

    /// Checks every pattern whose lexicographically largest tuple is the next
    /// position, i.e. `S_i = {p_i} + (s_i - 1) smaller indices`. Returns the
    /// first violating pattern and how many patterns were examined.
    pub fn check(&self, candidate: &[Elem]) -> (Option<Violation>, u64) {
        let params = self.params;
        let next = self.tables.len();
        let position = params.tuple_at(next);
        let t = params.t as usize;
        if position.iter().zip(&params.s_list).any(|(&p, &s)| (p as usize) < s - 1) {
            return (None, 0);
        }
        let k = position.len();
        // subsets[i] = first s_i - 1 entries form a combination of [0, p_i), then p_i
        let mut subsets: Vec<Vec<u32>> = position
            .iter()
            .zip(&params.s_list)
            .map(|(&p, &s)| (0..s as u32 - 1).chain([p]).collect())
            .collect();
        let mut strides = vec![1usize; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * params.m_list[i + 1];
        }
        let mut idx = vec![0usize; k];
        let mut tables: Vec<&[Elem]> = Vec::with_capacity(params.s as usize);
        let mut checked = 0;
        loop {
            checked += 1;
            tables.clear();
            idx.iter_mut().for_each(|x| *x = 0);
            'tuples: loop {
                let rank: usize = (0..k).map(|i| subsets[i][idx[i]] as usize * strides[i]).sum();
                tables.push(if rank == next { candidate } else { &self.tables[rank] });
                for i in (0..k).rev() {
                    idx[i] += 1;
                    if idx[i] < subsets[i].len() {
                        continue 'tuples;
                    }
                    idx[i] = 0;
                }
                break;
            }
            let agreement = agreement_count_until(&tables, t);
            if agreement >= t {
                return (Some(Violation { pattern: subsets, agreement }), checked);
            }
            let advanced = (0..k).rev().any(|i| {
                let p = position[i];
                let head = subsets[i].len() - 1;
                if next_combination(&mut subsets[i][..head], p) {
                    true
                } else {
                    subsets[i][..head].iter_mut().zip(0..).for_each(|(x, v)| *x = v);
                    false
                }
            });
            if !advanced {
                return (None, checked);
            }
        }
    }
}

fn check_budgets(params: &ConstructionParams, opts: &BuildOptions) -> Result<Domain, ConstructError> {
    if params.m_list.len() != params.r - 1 {
        return Err(ConstructError::PartArity { expected: params.r - 1, got: params.m_list.len() });
    }
    let domain = Domain::new(params.q as u32, (params.s - 1) as usize, opts.domain_cap)?;
    let patterns = pattern_count(&params.m_list, &params.s_list).unwrap_or(u64::MAX);
    if patterns > opts.enumeration_budget {
        return Err(ConstructError::Budget { patterns, budget: opts.enumeration_budget });
    }
    Ok(domain)
}

/// Chooses the family one tuple at a time in lexicographic order, resampling
/// a position until its candidate completes no pattern with `t` or more
/// agreement points. After `per_position_retries` rejections at one position
/// the whole selection restarts with a fresh derived seed.
pub fn sequential_select(
    params: &ConstructionParams,
    seed: u64,
    opts: &BuildOptions,
) -> Result<(PolyFamily, SelectStats), ConstructError> {
    check_budgets(params, opts)?;
    let field = Field::with_order(params.q)?;
    let basis: Arc<MonomialBasis> = Arc::new(monomial_basis((params.s - 1) as usize, params.d)?);
    let total = params.tuple_count() as usize;
    let mut best: Option<SelectionFailure> = None;

    for restart in 0..opts.restarts.max(1) {
        let mut rng = rng_for(seed, &format!("select/restart-{restart}"));
        let mut selector = Selector::new(params);
        let mut polys = Vec::with_capacity(total);
        let mut stats = SelectStats { restarts: restart, ..SelectStats::default() };
        let mut failed = None;
        for pos in 0..total {
            let mut accepted = false;
            let mut last = None;
            for _ in 0..opts.per_position_retries.max(1) {
                let cand = random_poly(&basis, &field, &mut rng);
                let table = cand.value_table(&field, opts.domain_cap)?;
                let (violation, checked) = selector.check(&table);
                stats.patterns_checked += checked;
                match violation {
                    None => {
                        selector.push(table);
                        polys.push(cand);
                        accepted = true;
                        break;
                    }
                    Some(v) => {
                        stats.resamples += 1;
                        last = Some(v);
                    }
                }
            }
            if !accepted {
                failed = Some((pos, last.expect("a rejection was recorded")));
                break;
            }
        }
        match failed {
            None => {
                let family = PolyFamily { m_list: params.m_list.clone(), polys };
                return Ok((family, stats));
            }
            Some((pos, violation)) => {
                if best.as_ref().is_none_or(|b| b.best_attempt.len() < polys.len()) {
                    best = Some(SelectionFailure {
                        position: params.tuple_at(pos),
                        violation,
                        restarts: restart + 1,
                        best_attempt: PolyFamily { m_list: params.m_list.clone(), polys },
                    });
                } else if let Some(b) = best.as_mut() {
                    b.restarts = restart + 1;
                }
            }
        }
    }
    Err(ConstructError::RetriesExhausted(Box::new(best.expect("at least one attempt ran"))))
}

/// Edges of the polynomial-graph hypergraph for a family.
pub fn family_graph(params: &ConstructionParams, family: &PolyFamily, domain_cap: u64) -> Result<RPartiteHypergraph, ConstructError> {
    let field = Field::with_order(params.q)?;
    let q = params.q as u32;
    let per = q.pow((params.s - 1) as u32) as usize;
    let mut edges: Vec<Vec<u32>> = Vec::with_capacity(family.len() * per);
    for (rank, f) in family.polys.iter().enumerate() {
        let tuple = params.tuple_at(rank);
        let table = f.value_table(&field, domain_cap)?;
        for (x, y) in table.iter().enumerate() {
            let mut e = tuple.clone();
            e.push(x as u32 * q + y.0);
            edges.push(e);
        }
    }
    let mut parts = params.m_list.clone();
    parts.push(params.n as usize);
    RPartiteHypergraph::new(parts, edges).map_err(|e| ConstructError::TooLarge(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRecord {
    pub pattern: Vec<Vec<u32>>,
    pub common: usize,
}

/// Construction provenance embedded in a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSummary {
    #[serde(with = "crate::serde_text::display")]
    pub seed: u64,
    pub params: ConstructionParams,
    pub field: FieldSpec,
    pub bezout_bound: u64,
    pub within_bezout_bound: bool,
    pub within_capacity: bool,
    pub stats: SelectStats,
    pub family: Vec<PolyRecord>,
}

/// Exhaustive record of the largest common neighborhood in the last part over
/// every choice of `s_i`-subsets of the other parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessCertificate {
    pub verdict: Verdict,
    pub part_sizes: Vec<usize>,
    pub s_list: Vec<usize>,
    pub t: u64,
    pub patterns_checked: u64,
    pub max_common: usize,
    /// First pattern (lexicographically) attaining `max_common`.
    pub argmax: Vec<Vec<u32>>,
    pub violations: u64,
    pub first_violation: Option<Vec<Vec<u32>>>,
    /// Whether `table` lists every pattern or was elided.
    pub table_complete: bool,
    pub table: Vec<PatternRecord>,
    pub construction: Option<ConstructionSummary>,
}

#[derive(Default)]
struct FreenessAcc {
    max: usize,
    argmax: Option<Vec<Vec<u32>>>,
    violations: u64,
    first_violation: Option<Vec<Vec<u32>>>,
    table: Vec<PatternRecord>,
}

/// Checks a graph for ordered `K_{s_1,...,s_{r-1},t}` by enumerating every
/// subset tuple; independent of how the graph was produced.
pub fn verify_freeness(
    g: &RPartiteHypergraph,
    s_list: &[usize],
    t: u64,
    opts: &BuildOptions,
) -> Result<FreenessCertificate, ConstructError> {
    if s_list.len() + 1 != g.r() {
        return Err(ConstructError::PartArity { expected: g.r() - 1, got: s_list.len() });
    }
    if s_list.contains(&0) {
        return Err(ConstructError::BadPattern);
    }
    let k = g.r() - 1;
    let patterns = pattern_count(&g.part_sizes()[..k], s_list).unwrap_or(u64::MAX);
    if patterns > opts.enumeration_budget {
        return Err(ConstructError::Budget { patterns, budget: opts.enumeration_budget });
    }
    let keep_table = patterns <= opts.table_limit;
    let to_vecs = |subsets: &[&[u32]]| subsets.iter().map(|s| s.to_vec()).collect::<Vec<_>>();
    let acc = fold_patterns(
        g,
        s_list,
        FreenessAcc::default,
        |mut acc, subsets, nb| {
            let c = bits::count(nb);
            if acc.argmax.is_none() || c > acc.max {
                acc.max = c;
                acc.argmax = Some(to_vecs(subsets));
            }
            if c as u64 >= t {
                acc.violations += 1;
                if acc.first_violation.is_none() {
                    acc.first_violation = Some(to_vecs(subsets));
                }
            }
            if keep_table {
                acc.table.push(PatternRecord { pattern: to_vecs(subsets), common: c });
            }
            acc
        },
        |mut a, b| {
            if b.argmax.is_some() && (a.argmax.is_none() || b.max > a.max) {
                a.max = b.max;
                a.argmax = b.argmax;
            }
            a.violations += b.violations;
            if a.first_violation.is_none() {
                a.first_violation = b.first_violation;
            }
            a.table.extend(b.table);
            a
        },
    );
    Ok(FreenessCertificate {
        verdict: if acc.violations == 0 { Verdict::Pass } else { Verdict::Fail },
        part_sizes: g.part_sizes().to_vec(),
        s_list: s_list.to_vec(),
        t,
        patterns_checked: patterns,
        max_common: acc.max,
        argmax: acc.argmax.unwrap_or_default(),
        violations: acc.violations,
        first_violation: acc.first_violation,
        table_complete: keep_table,
        table: acc.table,
        construction: None,
    })
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub graph: RPartiteHypergraph,
    pub family: PolyFamily,
    pub certificate: FreenessCertificate,
}

/// Selects a family, emits its graph and certifies it with
/// [`verify_freeness`].
pub fn build(params: &ConstructionParams, seed: u64, opts: &BuildOptions) -> Result<Construction, ConstructError> {
    let (family, stats) = sequential_select(params, seed, opts)?;
    let graph = family_graph(params, &family, opts.domain_cap)?;
    let mut certificate = verify_freeness(&graph, &params.s_list, params.t, opts)?;
    let field = Field::with_order(params.q)?;
    certificate.construction = Some(ConstructionSummary {
        seed,
        params: params.clone(),
        field: field.spec().clone(),
        bezout_bound: params.bezout_bound(),
        within_bezout_bound: certificate.max_common as u64 <= params.bezout_bound(),
        within_capacity: params.within_capacity(),
        stats,
        family: family.records(&field),
    });
    Ok(Construction { graph, family, certificate })
}
