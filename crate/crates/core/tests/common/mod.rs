#![allow(dead_code)]

use itertools::Itertools;
use num_bigint::BigUint;
use rand::Rng;
use zng_core::RPartiteHypergraph;

/// Includes each transversal independently with probability `density`.
pub fn random_graph<R: Rng>(parts: &[usize], density: f64, rng: &mut R) -> RPartiteHypergraph {
    let edges: Vec<Vec<u32>> = parts
        .iter()
        .map(|&m| 0..m as u32)
        .multi_cartesian_product()
        .filter(|_| rng.gen_bool(density))
        .collect();
    RPartiteHypergraph::new(parts.to_vec(), edges).unwrap()
}

pub fn graph_from_mask(parts: &[usize], mask: &[bool]) -> RPartiteHypergraph {
    let edges: Vec<Vec<u32>> = parts
        .iter()
        .map(|&m| 0..m as u32)
        .multi_cartesian_product()
        .zip(mask.iter().chain(std::iter::repeat(&false)))
        .filter(|(_, &keep)| keep)
        .map(|(e, _)| e)
        .collect();
    RPartiteHypergraph::new(parts.to_vec(), edges).unwrap()
}

/// Counts ordered copies by checking every transversal of every subset tuple.
pub fn naive_count(g: &RPartiteHypergraph, s_list: &[usize]) -> BigUint {
    let choices: Vec<Vec<Vec<u32>>> = g
        .part_sizes()
        .iter()
        .zip(s_list)
        .map(|(&m, &s)| (0..m as u32).combinations(s).collect())
        .collect();
    let mut total = BigUint::from(0u32);
    for tuple in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
        let complete = tuple
            .iter()
            .map(|s| s.iter().copied())
            .multi_cartesian_product()
            .all(|e| g.contains_edge(&e));
        if complete {
            total += 1u32;
        }
    }
    total
}
