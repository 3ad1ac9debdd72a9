use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zng_bench::{bipartite_params, random_graph};
use zng_core::construct::family_graph;
use zng_core::{
    agreement_set, count_ordered, exact_z, jensen_lower_bound, monomial_basis, random_poly, sequential_select,
    verify_freeness, BuildOptions, Field, ZQuery,
};

fn field_mul(c: &mut Criterion) {
    let mut group = c.benchmark_group("gf_mul_all_pairs");
    for q in [13u64, 64, 256] {
        let f = Field::with_order(q).unwrap();
        let els: Vec<_> = f.elements().collect();
        group.bench_with_input(BenchmarkId::from_parameter(q), &els, |b, els| {
            b.iter(|| {
                let mut acc = f.zero();
                for &x in els {
                    for &y in els {
                        acc = f.add(acc, f.mul(x, y));
                    }
                }
                black_box(acc)
            })
        });
    }
    group.finish();
}

fn polynomials(c: &mut Criterion) {
    let field = Field::with_order(9).unwrap();
    let basis = Arc::new(monomial_basis(3, 2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let fs: Vec<_> = (0..4).map(|_| random_poly(&basis, &field, &mut rng)).collect();
    c.bench_function("value_table_gf9_3vars_deg2", |b| {
        b.iter(|| black_box(fs[0].value_table(&field, 1 << 20).unwrap()))
    });
    c.bench_function("agreement_set_4_polys_gf9_3vars", |b| {
        b.iter(|| black_box(agreement_set(&fs, &field).unwrap()))
    });
}

fn counting(c: &mut Criterion) {
    let bip = random_graph(&[12, 12], 0.5, 3);
    let tri = random_graph(&[6, 6, 6], 0.5, 4);
    c.bench_function("count_ordered_12x12_s22", |b| b.iter(|| black_box(count_ordered(&bip, &[2, 2]).unwrap())));
    c.bench_function("count_ordered_6x6x6_s222", |b| {
        b.iter(|| black_box(count_ordered(&tri, &[2, 2, 2]).unwrap()))
    });
    c.bench_function("jensen_6x6x6_s222", |b| b.iter(|| black_box(jensen_lower_bound(&tri, &[2, 2, 2]).unwrap())));
}

fn construction(c: &mut Criterion) {
    let opts = BuildOptions::default();
    let params = bipartite_params(7, 200);
    c.bench_function("sequential_select_q7_m200", |b| {
        b.iter(|| black_box(sequential_select(&params, 5, &opts).unwrap()))
    });
    let (family, _) = sequential_select(&params, 5, &opts).unwrap();
    let g = family_graph(&params, &family, opts.domain_cap).unwrap();
    c.bench_function("verify_freeness_q7_m200", |b| {
        b.iter(|| black_box(verify_freeness(&g, &[2], 4, &opts).unwrap()))
    });
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_z_s22");
    group.sample_size(10);
    for m in [3usize, 4] {
        let q = ZQuery::new(vec![m, m], vec![2, 2]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &q, |b, q| b.iter(|| black_box(exact_z(q).unwrap().z)));
    }
    group.finish();
}

criterion_group!(benches, field_mul, polynomials, counting, construction, oracle);
criterion_main!(benches);
