mod common;

use common::naive_count;
use proptest::prelude::*;
use zng_core::construct::family_graph;
use zng_core::oracle::exact_z_exhaustive;
use zng_core::{build, count_ordered, derive_params, exact_z, sequential_select, verify_freeness, BuildOptions, Verdict, ZQuery};

#[test]
fn resamples_are_rare_at_adequate_q() {
    let params = derive_params(&[2], 4, 5).unwrap().with_part_sizes(&[20]).unwrap();
    assert_eq!(params.d, 3);
    let mut total = 0u64;
    for seed in 0..100 {
        let (_, stats) = sequential_select(&params, seed, &BuildOptions::default()).unwrap();
        total += stats.resamples;
    }
    let mean = total as f64 / (100.0 * 20.0);
    assert!(mean < 1.0, "mean resamples per position {mean}");
}

#[test]
fn tuples_have_full_neighborhoods() {
    let params = derive_params(&[2, 2], 9, 3)
        .unwrap()
        .allowing_over_capacity(true)
        .with_part_sizes(&[2, 2])
        .unwrap();
    let c = build(&params, 5, &BuildOptions::default()).unwrap();
    let per = params.q.pow(params.s as u32 - 1) as usize;
    for a in 0..2u32 {
        for b in 0..2u32 {
            let nb = c.graph.last_part_neighbors(&[a, b]);
            assert_eq!(nb.iter().map(|w| w.count_ones() as usize).sum::<usize>(), per);
        }
    }
    assert_eq!(c.graph.degrees(0), &[2 * per, 2 * per]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bipartite_builds_are_exact_and_free(q in prop::sample::select(vec![3u64, 4, 5, 7]), t in 2u64..=5, m in 1usize..=8, seed in any::<u64>()) {
        let p = derive_params(&[2], t, q).unwrap();
        prop_assume!((m as u64) <= p.ell);
        let p = p.with_part_sizes(&[m]).unwrap();
        let opts = BuildOptions::default();
        match build(&p, seed, &opts) {
            Ok(c) => {
                prop_assert_eq!(c.graph.edge_count() as u64, m as u64 * q);
                prop_assert_eq!(c.certificate.verdict, Verdict::Pass);
                prop_assert!(c.certificate.max_common as u64 <= p.bezout_bound());
                let again = build(&p, seed, &opts).unwrap();
                prop_assert_eq!(&again.graph, &c.graph);
                prop_assert_eq!(&again.certificate, &c.certificate);
                let reparsed = zng_core::RPartiteHypergraph::from_zng(&c.graph.to_zng()).unwrap();
                let cert = verify_freeness(&reparsed, &[2], t, &opts).unwrap();
                prop_assert_eq!(cert.verdict, Verdict::Pass);
                prop_assert!(count_ordered(&c.graph, &[2, t as usize]).unwrap().bits() == 0);
                let g2 = family_graph(&p, &c.family, opts.domain_cap).unwrap();
                prop_assert_eq!(g2, c.graph);
            }
            Err(e) => prop_assert!(matches!(e, zng_core::ConstructError::RetriesExhausted(_)), "{e}"),
        }
    }
}

fn z(parts: &[usize], s: &[usize]) -> usize {
    exact_z(&ZQuery::new(parts.to_vec(), s.to_vec()).unwrap()).unwrap().z
}

#[test]
fn oracle_is_monotone_and_symmetric() {
    for a in 1..=4usize {
        for b in 1..=4usize {
            for s in 1..=2usize {
                for t in 1..=2usize {
                    let v = z(&[a, b], &[s, t]);
                    assert!(v <= a * b);
                    assert_eq!(v, z(&[b, a], &[t, s]));
                    if a < 4 {
                        assert!(z(&[a + 1, b], &[s, t]) >= v);
                    }
                    if s > a || t > b {
                        assert_eq!(v, a * b);
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn oracle_matches_exhaustion(parts in prop::collection::vec(1usize..=3, 2..=3), raw in prop::collection::vec(1usize..=2, 3)) {
        let s: Vec<usize> = raw[..parts.len()].to_vec();
        let q = ZQuery::new(parts.clone(), s.clone()).unwrap();
        prop_assume!(q.potential_edges() <= 18);
        let res = exact_z(&q).unwrap();
        prop_assert_eq!(res.z, exact_z_exhaustive(&q).unwrap());
        prop_assert_eq!(res.witness.edge_count(), res.z);
        prop_assert!(naive_count(&res.witness, &s).bits() == 0);
    }
}
