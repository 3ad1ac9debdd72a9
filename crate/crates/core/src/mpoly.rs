//! Dense multivariate polynomials of bounded total degree over a [`Field`].

use crate::gf::{Elem, Field, FieldElement, GfError};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

/// Default cap on the number of monomials in a basis.
pub const DEFAULT_BASIS_CAP: u64 = 1 << 20;
/// Default cap on the number of evaluation points `q^num_vars`.
pub const DEFAULT_DOMAIN_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("monomial basis with {size} terms exceeds the cap {cap}")]
    BasisTooLarge { size: u64, cap: u64 },
    #[error("evaluation domain of {size} points exceeds the cap {cap}")]
    DomainTooLarge { size: u64, cap: u64 },
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    Arity { expected: usize, got: usize },
    #[error("polynomials are over different monomial bases")]
    BasisMismatch,
    #[error("agreement set of an empty polynomial list")]
    Empty,
    #[error("expected {expected} coefficients, got {got}")]
    CoeffCount { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// All exponent vectors of total degree at most `max_degree`, graded then
/// lexicographically descending (`1, x1, x2, x1^2, x1 x2, x2^2, ...`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialBasis {
    num_vars: usize,
    max_degree: u32,
    exponents: Vec<Vec<u32>>,
}

pub fn binomial_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(u64::MAX as u128) as u64
}

/// Basis of all monomials in `num_vars` variables of degree at most `d`.
pub fn monomial_basis(num_vars: usize, d: u32) -> Result<MonomialBasis, PolyError> {
    monomial_basis_capped(num_vars, d, DEFAULT_BASIS_CAP)
}

pub fn monomial_basis_capped(num_vars: usize, d: u32, cap: u64) -> Result<MonomialBasis, PolyError> {
    let size = binomial_u64(num_vars as u64 + d as u64, d as u64);
    if size > cap {
        return Err(PolyError::BasisTooLarge { size, cap });
    }
    let mut exponents = Vec::with_capacity(size as usize);
    let mut cur = vec![0u32; num_vars];
    for deg in 0..=d {
        push_degree(&mut exponents, &mut cur, 0, deg);
    }
    Ok(MonomialBasis { num_vars, max_degree: d, exponents })
}

// Emits exponent vectors with the given remaining degree in lex-descending
// order, assigning the largest exponent to the earliest variable first.
fn push_degree(out: &mut Vec<Vec<u32>>, cur: &mut [u32], var: usize, remaining: u32) {
    if var + 1 >= cur.len() {
        if let Some(last) = cur.len().checked_sub(1) {
            cur[last] = remaining;
            out.push(cur.to_vec());
            cur[last] = 0;
        } else if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=remaining).rev() {
        cur[var] = e;
        push_degree(out, cur, var + 1, remaining - e);
    }
    cur[var] = 0;
}

impl MonomialBasis {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<Elem>,
}

/// Serialized polynomial: basis shape plus one coefficient vector per
/// monomial, in basis order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub num_vars: usize,
    pub degree: u32,
    pub coeffs: Vec<Vec<u32>>,
}

impl MultiPoly {
    pub fn new(basis: Arc<MonomialBasis>, coeffs: Vec<Elem>) -> Result<Self, PolyError> {
        if coeffs.len() != basis.len() {
            return Err(PolyError::CoeffCount { expected: basis.len(), got: coeffs.len() });
        }
        Ok(MultiPoly { basis, coeffs })
    }

    pub fn zero(basis: Arc<MonomialBasis>) -> Self {
        let coeffs = vec![Elem::ZERO; basis.len()];
        MultiPoly { basis, coeffs }
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Elem::ZERO)
    }

    pub fn num_vars(&self) -> usize {
        self.basis.num_vars
    }

    pub fn to_record(&self, field: &Field) -> PolyRecord {
        PolyRecord {
            num_vars: self.basis.num_vars,
            degree: self.basis.max_degree,
            coeffs: self.coeffs.iter().map(|&c| field.to_element(c).coeffs).collect(),
        }
    }

    pub fn from_record(record: &PolyRecord, field: &Field) -> Result<Self, PolyError> {
        let basis = Arc::new(monomial_basis(record.num_vars, record.degree)?);
        let coeffs = record
            .coeffs
            .iter()
            .map(|c| field.from_element(&FieldElement { coeffs: c.clone() }))
            .collect::<Result<Vec<_>, _>>()?;
        MultiPoly::new(basis, coeffs)
    }

    /// Evaluates at a point given as one field element per variable.
    pub fn evaluate(&self, point: &[Elem], field: &Field) -> Result<Elem, PolyError> {
        if point.len() != self.basis.num_vars {
            return Err(PolyError::Arity { expected: self.basis.num_vars, got: point.len() });
        }
        let powers = power_table(point, self.basis.max_degree, field);
        Ok(self.eval_with_powers(&powers, field))
    }

    fn eval_with_powers(&self, powers: &[Vec<Elem>], field: &Field) -> Elem {
        let mut acc = field.zero();
        for (alpha, exps) in self.coeffs.iter().zip(&self.basis.exponents) {
            if *alpha == Elem::ZERO {
                continue;
            }
            let mut term = *alpha;
            for (var, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = field.mul(term, powers[var][e as usize]);
                }
            }
            acc = field.add(acc, term);
        }
        acc
    }

    /// Values at every point of the domain, in [`Domain`] order.
    pub fn value_table(&self, field: &Field, domain_cap: u64) -> Result<Vec<Elem>, PolyError> {
        let domain = Domain::new(field.order(), self.basis.num_vars, domain_cap)?;
        let width = self.basis.max_degree as usize + 1;
        // powers[x * width + e] = x^e for every field element x
        let mut powers = Vec::with_capacity(field.order() as usize * width);
        for x in field.elements() {
            let mut cur = field.one();
            for _ in 0..width {
                powers.push(cur);
                cur = field.mul(cur, x);
            }
        }
        let terms: Vec<(Elem, &[u32])> = self
            .coeffs
            .iter()
            .zip(&self.basis.exponents)
            .filter(|(alpha, _)| **alpha != Elem::ZERO)
            .map(|(&alpha, exps)| (alpha, exps.as_slice()))
            .collect();
        let mut out = Vec::with_capacity(domain.size());
        let mut point = vec![Elem::ZERO; self.basis.num_vars];
        for idx in 0..domain.size() {
            domain.point_into(idx, &mut point);
            let mut acc = field.zero();
            for &(alpha, exps) in &terms {
                let mut term = alpha;
                for (x, &e) in point.iter().zip(exps) {
                    if e > 0 {
                        term = field.mul(term, powers[x.index() * width + e as usize]);
                    }
                }
                acc = field.add(acc, term);
            }
            out.push(acc);
        }
        Ok(out)
    }
}

fn power_table(point: &[Elem], d: u32, field: &Field) -> Vec<Vec<Elem>> {
    point
        .iter()
        .map(|&x| {
            let mut row = Vec::with_capacity(d as usize + 1);
            let mut cur = field.one();
            for _ in 0..=d {
                row.push(cur);
                cur = field.mul(cur, x);
            }
            row
        })
        .collect()
}

/// Samples a polynomial with independent uniform coefficients.
pub fn random_poly<R: Rng + ?Sized>(basis: &Arc<MonomialBasis>, field: &Field, rng: &mut R) -> MultiPoly {
    let q = field.order();
    let coeffs = (0..basis.len()).map(|_| Elem(rng.gen_range(0..q))).collect();
    MultiPoly { basis: Arc::clone(basis), coeffs }
}

fn same_basis(f: &MultiPoly, g: &MultiPoly) -> bool {
    Arc::ptr_eq(&f.basis, &g.basis) || f.basis == g.basis
}

pub fn add_poly(f: &MultiPoly, g: &MultiPoly, field: &Field) -> Result<MultiPoly, PolyError> {
    if !same_basis(f, g) {
        return Err(PolyError::BasisMismatch);
    }
    let coeffs = f.coeffs.iter().zip(&g.coeffs).map(|(&a, &b)| field.add(a, b)).collect();
    Ok(MultiPoly { basis: Arc::clone(&f.basis), coeffs })
}

pub fn sub_poly(f: &MultiPoly, g: &MultiPoly, field: &Field) -> Result<MultiPoly, PolyError> {
    if !same_basis(f, g) {
        return Err(PolyError::BasisMismatch);
    }
    let coeffs = f.coeffs.iter().zip(&g.coeffs).map(|(&a, &b)| field.sub(a, b)).collect();
    Ok(MultiPoly { basis: Arc::clone(&f.basis), coeffs })
}

/// The evaluation domain `F_q^n`, with points indexed lexicographically
/// (first coordinate most significant) in the field's element order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domain {
    q: u32,
    num_vars: usize,
    size: usize,
}

impl Domain {
    pub fn new(q: u32, num_vars: usize, cap: u64) -> Result<Self, PolyError> {
        let size = (q as u64).checked_pow(num_vars as u32).unwrap_or(u64::MAX);
        if size > cap {
            return Err(PolyError::DomainTooLarge { size, cap });
        }
        Ok(Domain { q, num_vars, size: size as usize })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn point_into(&self, mut idx: usize, out: &mut [Elem]) {
        for slot in out.iter_mut().rev() {
            *slot = Elem((idx % self.q as usize) as u32);
            idx /= self.q as usize;
        }
    }

    pub fn point(&self, idx: usize) -> Vec<Elem> {
        let mut out = vec![Elem::ZERO; self.num_vars];
        self.point_into(idx, &mut out);
        out
    }

    pub fn index_of(&self, point: &[Elem]) -> usize {
        point.iter().fold(0usize, |acc, e| acc * self.q as usize + e.index())
    }
}

/// Points where every polynomial in `fs` takes the same value, as sorted
/// domain indices. Computed by evaluating over the whole domain.
pub fn agreement_set(fs: &[MultiPoly], field: &Field) -> Result<Vec<usize>, PolyError> {
    agreement_set_capped(fs, field, DEFAULT_DOMAIN_CAP)
}

pub fn agreement_set_capped(fs: &[MultiPoly], field: &Field, cap: u64) -> Result<Vec<usize>, PolyError> {
    let first = fs.first().ok_or(PolyError::Empty)?;
    if fs.iter().any(|g| !same_basis(first, g)) {
        return Err(PolyError::BasisMismatch);
    }
    let tables = fs
        .iter()
        .map(|f| f.value_table(field, cap))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(agreement_of_tables(&tables.iter().map(Vec::as_slice).collect::<Vec<_>>()))
}

/// Agreement set of precomputed value tables.
pub fn agreement_of_tables(tables: &[&[Elem]]) -> Vec<usize> {
    let Some(first) = tables.first() else {
        return Vec::new();
    };
    (0..first.len())
        .filter(|&i| tables[1..].iter().all(|t| t[i] == first[i]))
        .collect()
}

/// Size of the agreement set of `tables`, stopping once it reaches `stop_at`.
pub fn agreement_count_until(tables: &[&[Elem]], stop_at: usize) -> usize {
    let Some(first) = tables.first() else {
        return 0;
    };
    let mut count = 0;
    for i in 0..first.len() {
        if tables[1..].iter().all(|t| t[i] == first[i]) {
            count += 1;
            if count >= stop_at {
                break;
            }
        }
    }
    count
}
