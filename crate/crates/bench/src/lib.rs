//! Seeded fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zng_core::{derive_params, ConstructionParams, RPartiteHypergraph};

/// Each transversal kept with probability `density`, from a fixed seed.
pub fn random_graph(parts: &[usize], density: f64, seed: u64) -> RPartiteHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut tuple = vec![0u32; parts.len()];
    'outer: loop {
        if rng.gen_bool(density) {
            edges.push(tuple.clone());
        }
        for i in (0..parts.len()).rev() {
            tuple[i] += 1;
            if (tuple[i] as usize) < parts[i] {
                continue 'outer;
            }
            tuple[i] = 0;
        }
        break;
    }
    RPartiteHypergraph::new(parts.to_vec(), edges).expect("distinct transversals")
}

/// `s = 2`, `t = 4` construction parameters with `m` tuples.
pub fn bipartite_params(q: u64, m: usize) -> ConstructionParams {
    derive_params(&[2], 4, q)
        .and_then(|p| p.with_part_sizes(&[m]))
        .expect("feasible parameters")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures() {
        assert_eq!(random_graph(&[3, 4], 1.0, 0).edge_count(), 12);
        assert_eq!(random_graph(&[3, 4], 0.5, 9), random_graph(&[3, 4], 0.5, 9));
        assert_eq!(bipartite_params(5, 10).n, 25);
    }
}
