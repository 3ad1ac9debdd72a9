//! Executes one configured experiment and writes its artifacts.

use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;
use zng_core::count::SupersaturationReport;
use zng_core::oracle::{bound_table, exact_z_capped, ledger_row, TableEntry};
use zng_core::seed::derive_seed;
use zng_core::{
    build, count_report, derive_params, supersaturation_check, verify_freeness, ConstructError, ConstructionParams,
    CountError, CountReport, GfError, OracleError, PolyError, RPartiteHypergraph, Verdict, ZQuery,
};

use crate::config::{ExperimentConfig, MSpec, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Fail = 1,
    Usage = 2,
    Budget = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn label(self) -> &'static str {
        match self {
            Exit::Pass => "pass",
            Exit::Fail => "fail",
            Exit::Usage => "usage",
            Exit::Budget => "budget",
        }
    }
}

/// Exit status plus a one-line `key=value` summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit: Exit,
    pub status: String,
}

#[derive(Debug)]
pub struct RunError {
    pub exit: Exit,
    pub reason: String,
}

impl RunError {
    fn usage(reason: impl ToString) -> Self {
        RunError { exit: Exit::Usage, reason: reason.to_string() }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::usage(e)
    }
}

fn gf_exit(e: &GfError) -> Exit {
    match e {
        GfError::TooLarge { .. } => Exit::Budget,
        _ => Exit::Usage,
    }
}

fn poly_exit(e: &PolyError) -> Exit {
    match e {
        PolyError::BasisTooLarge { .. } | PolyError::DomainTooLarge { .. } => Exit::Budget,
        PolyError::Field(f) => gf_exit(f),
        _ => Exit::Usage,
    }
}

impl From<ConstructError> for RunError {
    fn from(e: ConstructError) -> Self {
        let exit = match &e {
            ConstructError::Budget { .. } | ConstructError::RetriesExhausted(_) | ConstructError::TooLarge(_) => {
                Exit::Budget
            }
            ConstructError::Field(f) => gf_exit(f),
            ConstructError::Poly(p) => poly_exit(p),
            _ => Exit::Usage,
        };
        RunError { exit, reason: e.to_string() }
    }
}

impl From<CountError> for RunError {
    fn from(e: CountError) -> Self {
        let exit = if matches!(e, CountError::Budget { .. }) { Exit::Budget } else { Exit::Usage };
        RunError { exit, reason: e.to_string() }
    }
}

impl From<OracleError> for RunError {
    fn from(e: OracleError) -> Self {
        let exit = if matches!(e, OracleError::TooLarge { .. }) { Exit::Budget } else { Exit::Usage };
        RunError { exit, reason: e.to_string() }
    }
}

fn status_line(exit: Exit, mode: Mode, fields: &[(&str, String)]) -> String {
    let mut line = format!("status={} mode={mode}", exit.label());
    for (k, v) in fields {
        let _ = write!(line, " {k}={v}");
    }
    line
}

pub fn run(cfg: &ExperimentConfig) -> Outcome {
    let result = cfg.validate().map_err(RunError::usage).and_then(|()| {
        fs::create_dir_all(&cfg.out)?;
        match cfg.mode {
            Mode::Construct => construct(cfg),
            Mode::Verify => verify(cfg),
            Mode::Count => count(cfg),
            Mode::Oracle => oracle(cfg),
            Mode::Sweep => sweep(cfg),
            Mode::Table => table(cfg),
        }
    });
    match result {
        Ok((exit, fields)) => Outcome { exit, status: status_line(exit, cfg.mode, &fields) },
        Err(e) => Outcome { exit: e.exit, status: status_line(e.exit, cfg.mode, &[("reason", format!("{:?}", e.reason))]) },
    }
}

type ModeResult = Result<(Exit, Vec<(&'static str, String)>), RunError>;

fn to_toml<T: Serialize>(value: &T) -> Result<String, RunError> {
    toml::to_string(value).map_err(|e| RunError::usage(format!("serializing: {e}")))
}

fn read_graph(path: &Path) -> Result<RPartiteHypergraph, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::usage(format!("{}: {e}", path.display())))?;
    RPartiteHypergraph::from_zng(&text).map_err(|e| RunError::usage(format!("{}: {e}", path.display())))
}

fn pattern_text(p: &[Vec<u32>]) -> String {
    let parts: Vec<String> = p
        .iter()
        .map(|s| format!("[{}]", s.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    parts.join("")
}

/// Resolves the part-size specs against derived parameters.
pub fn resolve_parts(specs: &[MSpec], params: &ConstructionParams) -> Result<Vec<usize>, RunError> {
    let k = params.r - 1;
    let single = |spec: &MSpec| -> Vec<usize> {
        match spec {
            MSpec::Parts(p) => p.clone(),
            MSpec::Q => vec![params.q as usize; k],
            MSpec::Ell => params.balanced_split(),
        }
    };
    let parts = if specs.len() == 1 {
        single(&specs[0])
    } else {
        let mut out = Vec::new();
        for spec in specs {
            match spec {
                MSpec::Parts(p) => out.extend(p),
                _ => return Err(RunError::usage("`q` and `ell` part specs stand alone")),
            }
        }
        out
    };
    if parts.len() != k {
        return Err(RunError::usage(format!("expected {k} part sizes, got {}", parts.len())));
    }
    Ok(parts)
}

fn params_for(cfg: &ExperimentConfig, q: u64, spec: &[MSpec]) -> Result<ConstructionParams, RunError> {
    let t = cfg.t.expect("validated");
    let base = derive_params(&cfg.s, t, q)?.allowing_over_capacity(cfg.allow_over_capacity);
    let parts = resolve_parts(spec, &base)?;
    Ok(base.with_part_sizes(&parts)?)
}

fn construct(cfg: &ExperimentConfig) -> ModeResult {
    let params = params_for(cfg, cfg.q[0], &cfg.m)?;
    let seed = derive_seed(cfg.seed, "construct");
    let c = build(&params, seed, &cfg.build_options())?;
    c.graph.write_graph(&cfg.out.join("graph.zng"))?;
    fs::write(cfg.out.join("certificate.toml"), to_toml(&c.certificate)?)?;
    fs::write(cfg.out.join("config.txt"), cfg.to_text())?;
    for w in params.warnings() {
        eprintln!("warning: {w}");
    }
    let exit = if c.certificate.verdict == Verdict::Pass { Exit::Pass } else { Exit::Fail };
    Ok((
        exit,
        vec![
            ("edges", c.graph.edge_count().to_string()),
            ("n", params.n.to_string()),
            ("max_common", c.certificate.max_common.to_string()),
            ("t", params.t.to_string()),
        ],
    ))
}

fn verify(cfg: &ExperimentConfig) -> ModeResult {
    let g = read_graph(cfg.graph.as_ref().expect("validated"))?;
    let cert = verify_freeness(&g, &cfg.s, cfg.t.expect("validated"), &cfg.build_options())?;
    fs::write(cfg.out.join("certificate.toml"), to_toml(&cert)?)?;
    let mut fields = vec![("patterns", cert.patterns_checked.to_string()), ("max_common", cert.max_common.to_string())];
    let exit = match &cert.first_violation {
        None => Exit::Pass,
        Some(p) => {
            fields.push(("violations", cert.violations.to_string()));
            fields.push(("pattern", pattern_text(p)));
            Exit::Fail
        }
    };
    Ok((exit, fields))
}

#[derive(Serialize)]
struct CountFile {
    report: CountReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    supersaturation: Option<SupersaturationReport>,
}

fn count(cfg: &ExperimentConfig) -> ModeResult {
    let g = read_graph(cfg.graph.as_ref().expect("validated"))?;
    let report = count_report(&g, &cfg.s, cfg.budget)?;
    let supersaturation = match (&cfg.c1, &cfg.c2) {
        (Some(c1), Some(c2)) => Some(supersaturation_check(&g, &cfg.s, c1, c2, cfg.budget)?),
        _ => None,
    };
    let exit = if report.bound_holds { Exit::Pass } else { Exit::Fail };
    let fields = vec![("t_b", report.t_b.to_string()), ("lower_bound", report.t_b_lower_bound.to_string())];
    fs::write(cfg.out.join("count_report.toml"), to_toml(&CountFile { report, supersaturation })?)?;
    Ok((exit, fields))
}

fn join(xs: &[usize], sep: &str) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn oracle(cfg: &ExperimentConfig) -> ModeResult {
    let query = ZQuery::new(cfg.parts.clone(), cfg.s.clone())?;
    let result = exact_z_capped(&query, cfg.edge_cap)?;
    let name = format!("witness_{}_{}.zng", join(&query.part_sizes, "-"), join(&query.s_list, "-"));
    result.witness.write_graph(&cfg.out.join(&name))?;
    let ledger = cfg.out.join("oracle.tsv");
    let fresh = !ledger.exists();
    let mut file = OpenOptions::new().create(true).append(true).open(&ledger)?;
    if fresh {
        writeln!(file, "query\tz\tnodes\twitness")?;
    }
    let row = ledger_row(&query, &result, &name);
    writeln!(file, "{row}")?;
    Ok((Exit::Pass, vec![("query", query.to_string()), ("z", result.z.to_string()), ("nodes", result.nodes.to_string())]))
}

/// One parameter point of a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub q: u64,
    pub m: String,
    pub n: String,
    pub edges: String,
    pub bound: String,
    pub ratio: String,
    pub max_common: String,
    pub bezout_bound: String,
    pub verdict: String,
    pub note: String,
}

pub const SWEEP_HEADER: &str = "q\tm\tn\tedges\tbound\tratio\tmax_common\tbezout_bound\tverdict\tnote";

impl SweepRow {
    pub fn to_tsv(&self) -> String {
        [
            self.q.to_string(),
            self.m.clone(),
            self.n.clone(),
            self.edges.clone(),
            self.bound.clone(),
            self.ratio.clone(),
            self.max_common.clone(),
            self.bezout_bound.clone(),
            self.verdict.clone(),
            self.note.clone(),
        ]
        .join("\t")
    }

    fn failed(q: u64, m: String, note: String) -> Self {
        let dash = || "-".to_string();
        SweepRow {
            q,
            m,
            n: dash(),
            edges: dash(),
            bound: dash(),
            ratio: dash(),
            max_common: dash(),
            bezout_bound: dash(),
            verdict: "failed".into(),
            note: note.replace(['\t', '\n'], " "),
        }
    }
}

fn sweep_point(cfg: &ExperimentConfig, q: u64, spec: &MSpec) -> Result<SweepRow, (String, RunError)> {
    let label = spec.to_string();
    let params = params_for(cfg, q, std::slice::from_ref(spec)).map_err(|e| (label.clone(), e))?;
    let m = join(&params.m_list, "x");
    let seed = derive_seed(cfg.seed, &format!("sweep/q={q}/m={m}"));
    let c = build(&params, seed, &cfg.build_options()).map_err(|e| (m.clone(), e.into()))?;
    let dir = sweep_dir(&cfg.out, q, &m);
    let io = |e: std::io::Error| (m.clone(), RunError::from(e));
    fs::create_dir_all(&dir).map_err(io)?;
    c.graph.write_graph(&dir.join("graph.zng")).map_err(io)?;
    let cert = to_toml(&c.certificate).map_err(|e| (m.clone(), e))?;
    fs::write(dir.join("certificate.toml"), cert).map_err(io)?;
    // prod m_i * n^(1 - 1/s) = prod m_i * q^(s-1) since n = q^s
    let bound = BigUint::from(params.tuple_count()) * BigUint::from(q).pow((params.s - 1) as u32);
    let ratio = BigRational::new(BigUint::from(c.graph.edge_count()).into(), bound.clone().into());
    Ok(SweepRow {
        q,
        m,
        n: params.n.to_string(),
        edges: c.graph.edge_count().to_string(),
        bound: bound.to_string(),
        ratio: ratio.to_string(),
        max_common: c.certificate.max_common.to_string(),
        bezout_bound: params.bezout_bound().to_string(),
        verdict: match c.certificate.verdict {
            Verdict::Pass => "pass".into(),
            Verdict::Fail => "fail".into(),
        },
        note: String::new(),
    })
}

/// Runs every `(q, m)` point; failures are recorded per row and the sweep
/// continues. Wall times go to `sweep.log`, never to `sweep.tsv`.
pub fn sweep_rows(cfg: &ExperimentConfig) -> Result<Vec<(SweepRow, f64)>, RunError> {
    let mut rows = Vec::new();
    for &q in &cfg.q {
        for spec in &cfg.m {
            let start = Instant::now();
            let row = match sweep_point(cfg, q, spec) {
                Ok(row) => row,
                Err((m, e)) => SweepRow::failed(q, m, format!("exit={} {}", e.exit.code(), e.reason)),
            };
            rows.push((row, start.elapsed().as_secs_f64()));
        }
    }
    Ok(rows)
}

fn sweep(cfg: &ExperimentConfig) -> ModeResult {
    let rows = sweep_rows(cfg)?;
    let mut tsv = format!("{SWEEP_HEADER}\n");
    let mut log = String::new();
    for (row, secs) in &rows {
        tsv.push_str(&row.to_tsv());
        tsv.push('\n');
        let _ = writeln!(log, "q={} m={} verdict={} wall_s={secs:.3}", row.q, row.m, row.verdict);
    }
    fs::write(cfg.out.join("sweep.tsv"), tsv)?;
    fs::write(cfg.out.join("sweep.log"), log)?;
    fs::write(cfg.out.join("config.txt"), cfg.to_text())?;
    let bad = rows.iter().filter(|(r, _)| r.verdict != "pass").count();
    let exit = if bad == 0 { Exit::Pass } else { Exit::Fail };
    Ok((exit, vec![("rows", rows.len().to_string()), ("failed_rows", bad.to_string())]))
}

pub const TABLE_HEADER: &str = "label\tsource\tparts\ts\tedges\tbound\tratio\tnote";

fn table_entries(cfg: &ExperimentConfig) -> Vec<(String, Result<TableEntry, String>)> {
    let mut out = Vec::new();
    for q in &cfg.query {
        let entry = ZQuery::new(q.parts.clone(), q.s.clone()).map(TableEntry::Oracle).map_err(|e| e.to_string());
        out.push((q.to_string(), entry));
    }
    for w in &cfg.witness {
        let label = w.path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let entry = read_graph(&w.path).map_err(|e| e.reason).and_then(|g| {
            if w.s.len() != g.r() {
                return Err(format!("pattern needs {} entries", g.r()));
            }
            Ok(TableEntry::Witness {
                label: label.clone(),
                part_sizes: g.part_sizes().to_vec(),
                s_list: w.s.clone(),
                edges: g.edge_count(),
            })
        });
        out.push((label, entry));
    }
    out
}

fn table(cfg: &ExperimentConfig) -> ModeResult {
    let entries = table_entries(cfg);
    let valid: Vec<TableEntry> = entries.iter().filter_map(|(_, e)| e.as_ref().ok().cloned()).collect();
    let mut computed = bound_table(&valid, cfg.edge_cap).into_iter();
    let mut tsv = format!("{TABLE_HEADER}\n");
    let mut bad = 0;
    for (label, entry) in &entries {
        let row = match entry {
            Err(e) => Err(e.clone()),
            Ok(_) => computed.next().expect("one row per valid entry").map_err(|e| e.to_string()),
        };
        match row {
            Ok(r) => {
                let _ = writeln!(
                    tsv,
                    "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t",
                    r.label,
                    r.source,
                    join(&r.part_sizes, ","),
                    join(&r.s_list, ","),
                    r.edges,
                    r.bound,
                    r.ratio
                );
            }
            Err(e) => {
                bad += 1;
                let _ = writeln!(tsv, "{label}\t-\t-\t-\t-\t-\t-\tfailed: {}", e.replace(['\t', '\n'], " "));
            }
        }
    }
    fs::write(cfg.out.join("table.tsv"), tsv)?;
    let exit = if bad == 0 { Exit::Pass } else { Exit::Fail };
    Ok((exit, vec![("rows", entries.len().to_string()), ("failed_rows", bad.to_string())]))
}

/// Output directory of one sweep point.
pub fn sweep_dir(out: &Path, q: u64, m: &str) -> PathBuf {
    out.join("sweep").join(format!("q{q}_m{m}"))
}
