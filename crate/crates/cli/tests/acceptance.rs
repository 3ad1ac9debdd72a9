//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;
use zng_cli::{run, Exit, ExperimentConfig};
use zng_core::gf::prime_power;
use zng_core::mpoly::binomial_u64;
use zng_core::oracle::exact_z_exhaustive;
use zng_core::{
    agreement_set, build, count_ordered, derive_params, exact_z, jensen_lower_bound, monomial_basis, random_poly,
    verify_freeness, BuildOptions, Construction, ConstructionParams, Elem, Field, RPartiteHypergraph, Verdict, ZQuery,
};

type Check = Result<String, String>;

const SWEEP_Q: [u64; 5] = [5, 7, 9, 11, 13];
const SEED: u64 = 2024;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sweep_params() -> Vec<ConstructionParams> {
    let mut out = Vec::new();
    for q in SWEEP_Q {
        let base = derive_params(&[2], 4, q).unwrap();
        for m in [q, base.ell] {
            out.push(base.clone().with_part_sizes(&[m as usize]).unwrap());
        }
    }
    out
}

fn r3_params() -> ConstructionParams {
    derive_params(&[2, 2], 9, 3)
        .unwrap()
        .allowing_over_capacity(true)
        .with_part_sizes(&[2, 2])
        .unwrap()
}

fn criterion_1(builds: &mut Vec<(ConstructionParams, Construction)>) -> Check {
    let mut slowest = 0f64;
    for p in sweep_params() {
        let start = Instant::now();
        let c = build(&p, SEED, &BuildOptions::default()).map_err(|e| format!("q={} m={:?}: {e}", p.q, p.m_list))?;
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        let m = p.m_list[0] as u64;
        ensure(p.n == p.q * p.q, || format!("q={}: n={}", p.q, p.n))?;
        ensure(c.graph.part_sizes()[1] as u64 == p.n, || format!("q={}: last part {}", p.q, c.graph.part_sizes()[1]))?;
        ensure(c.graph.edge_count() as u64 == m * p.q, || {
            format!("q={} m={m}: {} edges, expected {}", p.q, c.graph.edge_count(), m * p.q)
        })?;
        ensure(secs <= 10.0, || format!("q={} m={m}: {secs:.2} s", p.q))?;
        builds.push((p, c));
    }
    Ok(format!("{} runs, edges = m q exactly, slowest {slowest:.2} s", builds.len()))
}

fn criterion_2(builds: &mut Vec<(ConstructionParams, Construction)>) -> Check {
    let p = r3_params();
    let c = build(&p, SEED, &BuildOptions::default()).map_err(|e| format!("r=3: {e}"))?;
    ensure(p.bezout_bound() < p.t, || format!("d^(s-1) = {} not below t = {}", p.bezout_bound(), p.t))?;
    builds.push((p, c));
    let mut patterns = 0;
    for (p, c) in builds.iter() {
        let g = RPartiteHypergraph::from_zng(&c.graph.to_zng()).map_err(|e| e.to_string())?;
        let cert = verify_freeness(&g, &p.s_list, p.t, &BuildOptions::default()).map_err(|e| e.to_string())?;
        ensure(cert.verdict == Verdict::Pass && cert.violations == 0, || {
            format!("q={} m={:?}: {} violations", p.q, p.m_list, cert.violations)
        })?;
        patterns += cert.patterns_checked;
    }
    Ok(format!("{} certificates, {patterns} patterns, zero violations", builds.len()))
}

/// Largest agreement set over full patterns, computed from the polynomials.
fn max_full_agreement(p: &ConstructionParams, c: &Construction, field: &Field) -> usize {
    let tables: Vec<Vec<Elem>> =
        c.family.polys().iter().map(|f| f.value_table(field, 1 << 24).unwrap()).collect();
    let choices: Vec<Vec<Vec<u32>>> = p
        .m_list
        .iter()
        .zip(&p.s_list)
        .map(|(&m, &s)| (0..m as u32).combinations(s).collect())
        .collect();
    let mut best = 0;
    for pattern in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
        let members: Vec<&Vec<Elem>> = pattern
            .iter()
            .map(|s| s.iter().copied())
            .multi_cartesian_product()
            .map(|tuple| &tables[p.tuple_rank(&tuple)])
            .collect();
        let agree = (0..members[0].len()).filter(|&x| members.iter().all(|t| t[x] == members[0][x])).count();
        best = best.max(agree);
    }
    best
}

fn criterion_3(builds: &[(ConstructionParams, Construction)]) -> Check {
    let mut last = String::new();
    for (p, c) in builds {
        let field = Field::with_order(p.q).map_err(|e| e.to_string())?;
        let max = max_full_agreement(p, c, &field);
        ensure(max as u64 <= p.bezout_bound(), || {
            format!("q={} m={:?}: agreement {max} > d^(s-1) = {}", p.q, p.m_list, p.bezout_bound())
        })?;
        ensure(max == c.certificate.max_common, || format!("q={}: polynomial max {max} != certificate", p.q))?;
        last = format!("last: max {max} <= {}", p.bezout_bound());
    }
    Ok(format!("{} families within d^(s-1); {last}", builds.len()))
}

fn random_graph<R: Rng>(parts: &[usize], density: f64, rng: &mut R) -> RPartiteHypergraph {
    let edges: Vec<Vec<u32>> = parts
        .iter()
        .map(|&m| 0..m as u32)
        .multi_cartesian_product()
        .filter(|_| rng.gen_bool(density))
        .collect();
    RPartiteHypergraph::new(parts.to_vec(), edges).unwrap()
}

fn as_rational(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let densities = [0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0];
    let mut instances = 0;
    let mut tight = 0;
    for i in 0..600 {
        let r = 2 + i % 2;
        let parts: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=6)).collect();
        let s_list: Vec<usize> = parts.iter().map(|&m| rng.gen_range(1..=m.min(3))).collect();
        let density = densities[i % densities.len()];
        let g = random_graph(&parts, density, &mut rng);
        let lb = jensen_lower_bound(&g, &s_list).map_err(|e| e.to_string())?;
        let exact = as_rational(count_ordered(&g, &s_list).map_err(|e| e.to_string())?);
        ensure(lb <= exact, || format!("parts {parts:?} s {s_list:?}: bound {lb} > count {exact}"))?;
        instances += 1;
    }
    for r in 2..=3usize {
        for parts in (0..r).map(|_| 1..=4usize).multi_cartesian_product() {
            let g = RPartiteHypergraph::complete(parts.clone());
            for s_list in parts.iter().map(|&m| 1..=m.min(3)).multi_cartesian_product() {
                let lb = jensen_lower_bound(&g, &s_list).map_err(|e| e.to_string())?;
                let exact = as_rational(count_ordered(&g, &s_list).map_err(|e| e.to_string())?);
                ensure(lb == exact, || format!("complete {parts:?} s {s_list:?}: bound {lb} != count {exact}"))?;
                tight += 1;
            }
        }
    }
    Ok(format!("{instances} random instances, zero exceptions; equality on {tight} complete instances"))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let mut found = Vec::new();
    for (m, want) in [(2usize, 3usize), (3, 6), (4, 9)] {
        let q = ZQuery::new(vec![m, m], vec![2, 2]).map_err(|e| e.to_string())?;
        let raw = exact_z_exhaustive(&q).map_err(|e| e.to_string())?;
        ensure(raw == want, || format!("{q}: exhaustion gives {raw}, expected {want}"))?;
        let res = exact_z(&q).map_err(|e| e.to_string())?;
        ensure(res.z == raw, || format!("{q}: branch and bound {} != exhaustion {raw}", res.z))?;
        ensure(res.witness.edge_count() == res.z, || format!("{q}: witness size"))?;
        let copies = count_ordered(&res.witness, &q.s_list).map_err(|e| e.to_string())?;
        ensure(copies.is_zero(), || format!("{q}: witness has {copies} copies"))?;
        found.push(format!("{q}={}", res.z));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, || format!("{secs:.2} s"))?;
    Ok(format!("{} in {secs:.2} s", found.join(" ")))
}

/// Counts ordered copies by testing every transversal of every subset tuple.
fn naive_count(g: &RPartiteHypergraph, s_list: &[usize]) -> BigUint {
    let choices: Vec<Vec<Vec<u32>>> = g
        .part_sizes()
        .iter()
        .zip(s_list)
        .map(|(&m, &s)| (0..m as u32).combinations(s).collect())
        .collect();
    let mut total = BigUint::zero();
    for tuple in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
        if tuple.iter().map(|s| s.iter().copied()).multi_cartesian_product().all(|e| g.contains_edge(&e)) {
            total += 1u32;
        }
    }
    total
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut comparisons = 0;
    for i in 0..200 {
        let r = 2 + i % 3;
        let parts: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=4)).collect();
        let g = random_graph(&parts, rng.gen_range(0.0..=1.0), &mut rng);
        for s_list in parts.iter().map(|_| 1..=2usize).multi_cartesian_product() {
            let fast = count_ordered(&g, &s_list).map_err(|e| e.to_string())?;
            let slow = naive_count(&g, &s_list);
            ensure(fast == slow, || format!("sample {i} parts {parts:?} s {s_list:?}: {fast} != {slow}"))?;
            comparisons += 1;
        }
    }
    Ok(format!("200 samples, {comparisons} patterns, all equal"))
}

fn sweep_config(out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::parse("mode = sweep\ns = 2\nt = 4\nm = q\nm = ell\n").unwrap();
    cfg.q = SWEEP_Q.to_vec();
    cfg.seed = SEED;
    cfg.out = out.to_path_buf();
    cfg
}

fn artifacts(root: &Path) -> Vec<String> {
    let mut out = vec!["sweep.tsv".to_string()];
    let mut dirs: Vec<String> = fs::read_dir(root.join("sweep"))
        .map(|rd| rd.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    dirs.sort();
    for d in dirs {
        out.push(format!("sweep/{d}/graph.zng"));
        out.push(format!("sweep/{d}/certificate.toml"));
    }
    out
}

fn criterion_7() -> Check {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let outcome = run(&sweep_config(dir));
        ensure(outcome.exit == Exit::Pass, || outcome.status.clone())?;
    }
    let files = artifacts(&a);
    ensure(files == artifacts(&b), || "different artifact sets".into())?;
    ensure(files.len() == 1 + 2 * 2 * SWEEP_Q.len(), || format!("{} artifacts", files.len()))?;
    let mut bytes = 0;
    for f in &files {
        let x = fs::read(a.join(f)).map_err(|e| e.to_string())?;
        let y = fs::read(b.join(f)).map_err(|e| e.to_string())?;
        ensure(x == y, || format!("{f} differs"))?;
        bytes += x.len();
    }
    Ok(format!("{} artifacts, {bytes} bytes, identical", files.len()))
}

fn criterion_8() -> Check {
    let mut fields = 0;
    for q in (2..=64u64).filter(|&q| prime_power(q).is_some()) {
        let f = Field::with_order(q).map_err(|e| e.to_string())?;
        let els: Vec<Elem> = f.elements().collect();
        let bad = |what: &str| format!("GF({q}): {what}");
        ensure(els.len() as u64 == q && els.iter().all_unique(), || bad("enumeration"))?;
        for &a in &els {
            ensure(f.add(a, f.zero()) == a && f.mul(a, f.one()) == a, || bad("identity"))?;
            ensure(f.add(a, f.neg(a)) == f.zero(), || bad("negation"))?;
            ensure(a == f.zero() || f.mul(a, f.inv(a).unwrap()) == f.one(), || bad("inverse"))?;
            for &b in &els {
                ensure(f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a), || bad("commutativity"))?;
                for &c in &els {
                    ensure(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)), || bad("additive associativity"))?;
                    ensure(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)), || bad("associativity"))?;
                    ensure(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)), || bad("distributivity"))?;
                }
            }
        }
        fields += 1;
    }
    for v in 0..=6usize {
        for d in 0..=6u32 {
            let size = monomial_basis(v, d).map_err(|e| e.to_string())?.len() as u64;
            ensure(size == binomial_u64((v as u64) + d as u64, d as u64), || format!("basis ({v}, {d}) has {size}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let orders = [5u64, 7, 8, 9, 11, 13, 16, 25];
    let mut max_seen = 0;
    for i in 0..1000 {
        let q = orders[i % orders.len()];
        let d = rng.gen_range(1..=4u32);
        let field = Field::with_order(q).map_err(|e| e.to_string())?;
        let basis = Arc::new(monomial_basis(1, d).map_err(|e| e.to_string())?);
        let f = random_poly(&basis, &field, &mut rng);
        let g = random_poly(&basis, &field, &mut rng);
        if f == g {
            continue;
        }
        let n = agreement_set(&[f, g], &field).map_err(|e| e.to_string())?.len();
        ensure(n as u32 <= d, || format!("pair {i} over GF({q}) degree {d}: {n} common points"))?;
        max_seen = max_seen.max(n);
    }
    Ok(format!("{fields} fields exhaustive, 49 basis sizes, 1000 univariate pairs (max agreement {max_seen})"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut builds = Vec::new();
    let results: Vec<(&str, Check)> = vec![
        ("1 construction identity", criterion_1(&mut builds)),
        ("2 freeness certificates", criterion_2(&mut builds)),
        ("3 agreement within d^(s-1)", criterion_3(&builds)),
        ("4 count >= Jensen bound", criterion_4()),
        ("5 oracle ground truth", criterion_5()),
        ("6 counting oracle equivalence", criterion_6()),
        ("7 determinism", criterion_7()),
        ("8 field and polynomial suites", criterion_8()),
    ];
    let mut failed = 0;
    for (name, res) in &results {
        match res {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
