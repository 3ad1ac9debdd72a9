//! Finite fields GF(p^k) in polynomial basis.
//!
//! Elements are stored as a compact index `Elem` in `[0, q)`. The index is the
//! position of the element in the canonical enumeration order, which is
//! lexicographic on the coefficient vector `(c_0, c_1, ..., c_{k-1})` of
//! `c_0 + c_1 x + ... + c_{k-1} x^{k-1}`. So `c_0` is the most significant
//! base-`p` digit of the index, and the multiplicative identity sits at index
//! `p^{k-1}`.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Default upper bound on the field order.
pub const DEFAULT_ORDER_CAP: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the cap {cap}")]
    TooLarge { p: u64, k: u32, cap: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    BadModulus(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("coefficient vector {0:?} does not describe an element of this field")]
    BadElement(Vec<u32>),
}

/// Serializable description of a field: characteristic, degree and modulus.
///
/// `modulus` lists the coefficients of the monic irreducible polynomial in
/// ascending degree (length `k + 1`), and is empty for prime fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
    #[serde(default)]
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }
}

/// A field element as its coefficient vector, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    pub coeffs: Vec<u32>,
}

/// Compact handle for an element of a specific [`Field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Dense polynomials over GF(p), ascending coefficients. Only used to find and
/// check moduli and to build the multiplication tables.
mod fp_poly {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let m = trim(m.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(*m.last().unwrap(), p);
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let factor = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
            for (i, &c) in m.iter().enumerate() {
                let sub = (factor as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let mut result = 1u64;
        let mut base = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        result as u32
    }

    /// Monic polynomial of degree `deg` whose non-leading coefficients are the
    /// base-`p` digits of `code`, with `c_{deg-1}` most significant.
    pub fn monic_from_code(code: u64, deg: u32, p: u32) -> Vec<u32> {
        let mut c = vec![0u32; deg as usize + 1];
        c[deg as usize] = 1;
        let mut rest = code;
        for slot in c.iter_mut().take(deg as usize) {
            *slot = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        c
    }

    /// Exhaustive trial division by every monic polynomial of degree
    /// `1..=deg/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let f = trim(f.to_vec());
        if f.len() < 2 {
            return false;
        }
        let deg = (f.len() - 1) as u32;
        for dd in 1..=deg / 2 {
            let count = (p as u64).pow(dd);
            for code in 0..count {
                let g = monic_from_code(code, dd, p);
                if rem(&f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// Lexicographically smallest monic irreducible polynomial of degree `k` over
/// GF(p), ordering candidates by their coefficients from `x^{k-1}` down to the
/// constant term.
pub fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    (0..count)
        .map(|code| fp_poly::monic_from_code(code, k, p))
        .find(|f| fp_poly::is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists")
}

/// An instantiated finite field with precomputed arithmetic tables.
#[derive(Debug, Clone)]
pub struct Field {
    spec: FieldSpec,
    q: u32,
    one: Elem,
    // k > 1 only: discrete log / antilog tables against a primitive element.
    log: Vec<u32>,
    exp: Vec<u32>,
}

/// Builds GF(p^k) with the default order cap.
pub fn make_field(p: u64, k: u32) -> Result<Field, GfError> {
    make_field_capped(p, k, DEFAULT_ORDER_CAP)
}

pub fn make_field_capped(p: u64, k: u32, cap: u64) -> Result<Field, GfError> {
    if k == 0 {
        return Err(GfError::ZeroDegree);
    }
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    let q = p.checked_pow(k).filter(|&q| q <= cap);
    if q.is_none() {
        return Err(GfError::TooLarge { p, k, cap });
    }
    let p = p as u32;
    let modulus = if k > 1 { smallest_irreducible(p, k) } else { Vec::new() };
    Ok(Field::build(FieldSpec { p, k, modulus }))
}

impl Field {
    /// The field of order `q`, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Field, GfError> {
        let (p, k) = prime_power(q).ok_or(GfError::NotPrimePower(q))?;
        make_field(p, k)
    }

    /// Rebuilds a field from a serialized spec, validating the modulus.
    pub fn from_spec(spec: &FieldSpec) -> Result<Field, GfError> {
        if spec.k == 0 {
            return Err(GfError::ZeroDegree);
        }
        if !is_prime(spec.p as u64) {
            return Err(GfError::NotPrime(spec.p as u64));
        }
        let q = spec.order();
        if q > DEFAULT_ORDER_CAP {
            return Err(GfError::TooLarge { p: spec.p as u64, k: spec.k, cap: DEFAULT_ORDER_CAP });
        }
        if spec.k > 1 {
            let m = &spec.modulus;
            let ok = m.len() == spec.k as usize + 1
                && m.last() == Some(&1)
                && m.iter().all(|&c| c < spec.p)
                && fp_poly::is_irreducible(m, spec.p);
            if !ok {
                return Err(GfError::BadModulus(spec.k));
            }
        } else if !spec.modulus.is_empty() {
            return Err(GfError::BadModulus(1));
        }
        Ok(Field::build(spec.clone()))
    }

    fn build(spec: FieldSpec) -> Field {
        let q = spec.order() as u32;
        let one = Elem(spec.p.pow(spec.k - 1));
        let mut field = Field { spec, q, one, log: Vec::new(), exp: Vec::new() };
        if field.spec.k > 1 {
            field.build_log_tables();
        }
        field
    }

    fn build_log_tables(&mut self) {
        let n = self.q - 1;
        let factors = prime_factors(n as u64);
        let gen = (1..self.q)
            .map(Elem)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&f| self.pow_slow(g, n as u64 / f) != self.one)
            })
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; 2 * n as usize];
        let mut log = vec![0u32; self.q as usize];
        let mut cur = self.one;
        for i in 0..n {
            exp[i as usize] = cur.0;
            exp[(i + n) as usize] = cur.0;
            log[cur.index()] = i;
            cur = self.mul_slow(cur, gen);
        }
        self.exp = exp;
        self.log = log;
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.spec.k
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    #[inline]
    pub fn one(&self) -> Elem {
        self.one
    }

    /// All `q` elements in canonical order, starting with zero.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = Elem> + Clone {
        (0..self.q).map(Elem)
    }

    /// Element with the given canonical index.
    pub fn elem(&self, index: u32) -> Elem {
        assert!(index < self.q, "index {index} out of range for GF({})", self.q);
        Elem(index)
    }

    /// Embeds an integer via its residue mod p.
    pub fn from_int(&self, n: i64) -> Elem {
        let r = n.rem_euclid(self.spec.p as i64) as u32;
        Elem(r * self.one.0)
    }

    pub fn to_element(&self, a: Elem) -> FieldElement {
        let p = self.spec.p;
        let k = self.spec.k as usize;
        let mut coeffs = vec![0u32; k];
        let mut rest = a.0;
        for i in (0..k).rev() {
            coeffs[i] = rest % p;
            rest /= p;
        }
        FieldElement { coeffs }
    }

    pub fn from_element(&self, e: &FieldElement) -> Result<Elem, GfError> {
        let p = self.spec.p;
        if e.coeffs.len() != self.spec.k as usize || e.coeffs.iter().any(|&c| c >= p) {
            return Err(GfError::BadElement(e.coeffs.clone()));
        }
        Ok(Elem(e.coeffs.iter().fold(0u32, |acc, &c| acc * p + c)))
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.spec.p;
        if self.spec.k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.spec.k {
            let d = (x % p + y % p) % p;
            out += d * place;
            place *= p;
            x /= p;
            y /= p;
        }
        Elem(out)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.spec.p;
        if self.spec.k == 1 {
            return Elem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        if p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.spec.k {
            let d = (p - x % p) % p;
            out += d * place;
            place *= p;
            x /= p;
        }
        Elem(out)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if self.spec.k == 1 {
            return Elem(((a.0 as u64 * b.0 as u64) % self.spec.p as u64) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        Elem(self.exp[(self.log[a.index()] + self.log[b.index()]) as usize])
    }

    /// Multiplicative inverse, computed as `a^{q-2}`.
    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a.0 == 0 {
            return Err(GfError::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut result = self.one;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// Schoolbook product in `GF(p)[x] / (modulus)`, independent of the tables.
    pub fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        if self.spec.k == 1 {
            return Elem(((a.0 as u64 * b.0 as u64) % self.spec.p as u64) as u32);
        }
        let p = self.spec.p;
        let x = fp_poly::trim(self.to_element(a).coeffs);
        let y = fp_poly::trim(self.to_element(b).coeffs);
        let prod = fp_poly::mul(&x, &y, p);
        let mut r = fp_poly::rem(&prod, &self.spec.modulus, p);
        r.resize(self.spec.k as usize, 0);
        self.from_element(&FieldElement { coeffs: r }).expect("reduced product is canonical")
    }

    fn pow_slow(&self, a: Elem, mut e: u64) -> Elem {
        let mut result = self.one;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_slow(result, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        result
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(coeffs: &[u32]) -> FieldElement {
        FieldElement { coeffs: coeffs.to_vec() }
    }

    #[test]
    fn prime_field_has_no_modulus() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(f.order(), 5);
        assert!(f.spec().modulus.is_empty());
    }

    #[test]
    fn gf9_modulus_is_x2_plus_1() {
        let f = make_field(3, 2).unwrap();
        assert_eq!(f.order(), 9);
        assert_eq!(f.spec().modulus, vec![1, 0, 1]);
    }

    #[test]
    fn gf9_modulus_matches_exhaustive_scan() {
        // Oracle: test all 9 monic quadratics for roots directly.
        let mut irreducible = Vec::new();
        for c1 in 0..3u32 {
            for c0 in 0..3u32 {
                let has_root = (0..3u32).any(|x| (x * x + c1 * x + c0) % 3 == 0);
                if !has_root {
                    irreducible.push((c1, c0));
                }
            }
        }
        assert_eq!(irreducible, vec![(0, 1), (1, 2), (2, 2)]);
        let (c1, c0) = irreducible[0];
        assert_eq!(make_field(3, 2).unwrap().spec().modulus, vec![c0, c1, 1]);
    }

    #[test]
    fn gf8_uses_x3_x_1() {
        assert_eq!(make_field(2, 3).unwrap().spec().modulus, vec![1, 1, 0, 1]);
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert_eq!(make_field(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert_eq!(make_field(1, 1).unwrap_err(), GfError::NotPrime(1));
    }

    #[test]
    fn rejects_oversized_and_degenerate() {
        assert!(matches!(make_field(2, 17), Err(GfError::TooLarge { .. })));
        assert!(matches!(make_field_capped(7, 2, 48), Err(GfError::TooLarge { .. })));
        assert_eq!(make_field(3, 0).unwrap_err(), GfError::ZeroDegree);
    }

    #[test]
    fn small_examples() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(f2.add(f2.one(), f2.one()), f2.zero());
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(f5.inv(Elem(2)).unwrap(), Elem(3));
        assert_eq!(f5.inv(Elem(0)), Err(GfError::DivisionByZero));
        let f9 = make_field(3, 2).unwrap();
        let x = f9.from_element(&fe(&[0, 1])).unwrap();
        assert_eq!(f9.to_element(f9.mul(x, x)), fe(&[2, 0]));
        assert_eq!(f9.mul(x, x), f9.from_int(-1));
    }

    #[test]
    fn enumeration_is_lexicographic_from_zero() {
        let f9 = make_field(3, 2).unwrap();
        let elems: Vec<FieldElement> = f9.elements().map(|e| f9.to_element(e)).collect();
        assert_eq!(elems.len(), 9);
        assert_eq!(elems[0], fe(&[0, 0]));
        assert!(elems.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(f9.to_element(f9.one()), fe(&[1, 0]));
        let f5 = make_field(5, 1).unwrap();
        let idx: Vec<u32> = f5.elements().map(|e| e.0).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn with_order_factors_prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(Field::with_order(16).unwrap().degree(), 4);
        assert_eq!(Field::with_order(6).unwrap_err(), GfError::NotPrimePower(6));
    }

    #[test]
    fn from_spec_validates_modulus() {
        let good = make_field(3, 2).unwrap().spec().clone();
        assert!(Field::from_spec(&good).is_ok());
        let reducible = FieldSpec { p: 3, k: 2, modulus: vec![2, 0, 1] };
        assert_eq!(Field::from_spec(&reducible).unwrap_err(), GfError::BadModulus(2));
    }

    #[test]
    fn table_mul_matches_schoolbook() {
        for (p, k) in [(2, 3), (3, 2), (2, 4), (5, 2), (3, 3)] {
            let f = make_field(p, k).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                }
            }
        }
    }
}
