//! Enumeration of subset tuples `(S_1, ..., S_{r-1})` and their common
//! neighborhoods in the last part.

use crate::hypergraph::{bits, RPartiteHypergraph};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

const INLINE_PARTS: usize = 8;

/// Default cap on the number of subset tuples a single call may enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 200_000_000;

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of subset tuples with `|S_i| = sizes[i]` inside parts of the given
/// sizes, or `None` when it does not fit in a `u64`.
pub fn pattern_count(part_sizes: &[usize], sizes: &[usize]) -> Option<u64> {
    part_sizes
        .iter()
        .zip(sizes)
        .try_fold(1u64, |acc, (&m, &s)| {
            let c = binomial(m as u64, s as u64);
            let c: u64 = c.try_into().ok()?;
            acc.checked_mul(c)
        })
}

/// Advances `c` to the next increasing combination of values below `hi` in
/// lexicographic order; false, leaving `c` unchanged, after the last one.
pub fn next_combination(c: &mut [u32], hi: u32) -> bool {
    let k = c.len() as u32;
    for i in (0..c.len()).rev() {
        if c[i] < hi - (k - i as u32) {
            c[i] += 1;
            for j in i + 1..c.len() {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn reset_combination(c: &mut [u32], lo: u32) {
    c.iter_mut().zip(lo..).for_each(|(x, v)| *x = v);
}

fn prefix_strides(parts: &[usize]) -> Vec<usize> {
    let k = parts.len() - 1;
    let mut strides = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * parts[i + 1];
    }
    strides
}

/// Common neighborhood in the last part of every transversal of
/// `S_1 x ... x S_{r-1}`, written into `buf`.
pub fn common_neighborhood(g: &RPartiteHypergraph, subsets: &[&[u32]], buf: &mut [u64]) {
    let k = subsets.len();
    debug_assert_eq!(k + 1, g.r());
    let strides = prefix_strides(g.part_sizes());
    let mut digits = vec![0usize; k];
    neighborhood_into(g, subsets, &strides, &mut digits, buf);
}

fn neighborhood_into<S: AsRef<[u32]>>(
    g: &RPartiteHypergraph,
    subsets: &[S],
    strides: &[usize],
    digits: &mut [usize],
    buf: &mut [u64],
) {
    let k = subsets.len();
    if k == 0 {
        buf.copy_from_slice(g.neighbors_by_index(0));
        return;
    }
    buf.iter_mut().for_each(|w| *w = !0);
    digits.iter_mut().for_each(|d| *d = 0);
    loop {
        let index: usize = (0..k).map(|i| subsets[i].as_ref()[digits[i]] as usize * strides[i]).sum();
        bits::and_assign(buf, g.neighbors_by_index(index));
        if buf.iter().all(|&w| w == 0) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < subsets[i].as_ref().len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Folds over every subset tuple in lexicographic order (outer loop over the
/// least element of `S_1` runs in parallel). `fold` sees the subsets and the
/// common-neighborhood bitset; partial results are combined left to right, so
/// an order-sensitive `reduce` stays deterministic.
pub fn fold_patterns<T, Id, F, R>(g: &RPartiteHypergraph, sizes: &[usize], identity: Id, fold: F, reduce: R) -> T
where
    T: Send,
    Id: Fn() -> T + Sync + Send,
    F: Fn(T, &[&[u32]], &[u64]) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let parts = g.part_sizes();
    let k = parts.len() - 1;
    assert_eq!(sizes.len(), k, "one subset size per non-final part");
    let words = g.words();
    if k == 0 {
        let mut buf = vec![0u64; words];
        common_neighborhood(g, &[], &mut buf);
        return fold(identity(), &[], &buf);
    }
    if parts[..k].iter().zip(sizes).any(|(&m, &s)| s > m || s == 0) {
        return identity();
    }
    let strides = prefix_strides(parts);
    let m0 = parts[0] as u32;
    let s0 = sizes[0];
    (0..=(m0 - s0 as u32))
        .into_par_iter()
        .map(|least| {
            let mut acc = identity();
            let mut buf = vec![0u64; words];
            let mut digits = vec![0usize; k];
            let mut subsets: Vec<Vec<u32>> = sizes.iter().map(|&s| (0..s as u32).collect()).collect();
            reset_combination(&mut subsets[0], least);
            loop {
                neighborhood_into(g, &subsets, &strides, &mut digits, &mut buf);
                acc = if k <= INLINE_PARTS {
                    let mut views: [&[u32]; INLINE_PARTS] = [&[]; INLINE_PARTS];
                    views.iter_mut().zip(&subsets).for_each(|(v, s)| *v = s);
                    fold(acc, &views[..k], &buf)
                } else {
                    let views: Vec<&[u32]> = subsets.iter().map(Vec::as_slice).collect();
                    fold(acc, &views, &buf)
                };
                let advanced = (0..k).rev().any(|i| {
                    let (lo, set) = if i == 0 { (least + 1, &mut subsets[0][1..]) } else { (0, &mut subsets[i][..]) };
                    if next_combination(set, parts[i] as u32) {
                        true
                    } else {
                        reset_combination(set, lo);
                        false
                    }
                });
                if !advanced {
                    return acc;
                }
            }
        })
        .reduce(&identity, &reduce)
}

/// Histogram of common-neighborhood sizes over all subset tuples:
/// `hist[c]` is the number of tuples whose common neighborhood has `c`
/// vertices.
pub fn neighborhood_histogram(g: &RPartiteHypergraph, sizes: &[usize]) -> Vec<u64> {
    let len = g.part_sizes()[g.r() - 1] + 1;
    fold_patterns(
        g,
        sizes,
        || vec![0u64; len],
        |mut h, _, nb| {
            h[bits::count(nb)] += 1;
            h
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )
}
