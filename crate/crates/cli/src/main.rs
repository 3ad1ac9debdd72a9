use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zng_cli::{run, Exit, ExperimentConfig, Mode};

#[derive(Parser, Debug)]
#[command(name = "zng", version, about = "Constructions, certificates and exact counts for r-partite Zarankiewicz problems")]
struct Cli {
    /// Key=value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Cap on enumerated subset tuples.
    #[arg(long, global = true)]
    budget: Option<String>,
    /// Print the resolved config instead of running.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a random algebraic graph and certify it.
    Construct(ConstructArgs),
    /// Certify a graph file free of a pattern.
    Verify(VerifyArgs),
    /// Exact counts and the lower-bound chain for a graph file.
    Count(CountArgs),
    /// Exact extremal number by branch and bound.
    Oracle(OracleArgs),
    /// Construct over a grid of (q, m).
    Sweep(SweepArgs),
    /// Compare oracle values and witness graphs with the bound expression.
    Table(TableArgs),
    /// Run the mode named in --config.
    Run,
}

#[derive(Args, Debug, Default)]
struct BuildArgs {
    /// Pattern sizes s_1..s_(r-1).
    #[arg(long, value_delimiter = ',')]
    s: Vec<String>,
    #[arg(long)]
    t: Option<String>,
    /// Accept more tuples than ell.
    #[arg(long)]
    allow_over_capacity: bool,
    #[arg(long)]
    retries: Option<String>,
    #[arg(long)]
    restarts: Option<String>,
    /// Certificates list every pattern up to this many.
    #[arg(long)]
    table_limit: Option<String>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    build: BuildArgs,
    /// Field order.
    #[arg(long)]
    q: Option<String>,
    /// Part sizes: one per part, or `AxB`, `q`, `ell`.
    #[arg(long, value_delimiter = ',')]
    m: Vec<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, value_delimiter = ',')]
    s: Vec<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    table_limit: Option<String>,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long)]
    graph: Option<String>,
    /// Pattern sizes s_1..s_r.
    #[arg(long, value_delimiter = ',')]
    s: Vec<String>,
    #[arg(long)]
    c1: Option<String>,
    #[arg(long)]
    c2: Option<String>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_delimiter = ',')]
    parts: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    s: Vec<String>,
    #[arg(long)]
    edge_cap: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    build: BuildArgs,
    #[arg(long, value_delimiter = ',')]
    q: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    m: Vec<String>,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// `parts;s`, e.g. `2,2;2,2`.
    #[arg(long)]
    query: Vec<String>,
    /// `path;s` of a graph file.
    #[arg(long)]
    witness: Vec<String>,
    #[arg(long)]
    edge_cap: Option<String>,
}

struct Overrides(Vec<(&'static str, Vec<String>)>);

impl Overrides {
    fn one(&mut self, key: &'static str, v: Option<String>) {
        if let Some(v) = v {
            self.0.push((key, vec![v]));
        }
    }

    fn list(&mut self, key: &'static str, v: Vec<String>) {
        if !v.is_empty() {
            self.0.push((key, v));
        }
    }

    fn flag(&mut self, key: &'static str, on: bool) {
        if on {
            self.0.push((key, vec!["true".into()]));
        }
    }

    fn build(&mut self, b: BuildArgs) {
        self.list("s", b.s);
        self.one("t", b.t);
        self.flag("allow_over_capacity", b.allow_over_capacity);
        self.one("retries", b.retries);
        self.one("restarts", b.restarts);
        self.one("table_limit", b.table_limit);
    }
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| e.to_string())?,
        None => ExperimentConfig::default(),
    };
    let mut o = Overrides(Vec::new());
    o.one("seed", cli.seed);
    o.one("out", cli.out.map(|p| p.display().to_string()));
    o.one("budget", cli.budget);
    let mode = match cli.command {
        Command::Construct(a) => {
            o.build(a.build);
            o.one("q", a.q);
            o.list("m", a.m);
            Some(Mode::Construct)
        }
        Command::Verify(a) => {
            o.one("graph", a.graph);
            o.list("s", a.s);
            o.one("t", a.t);
            o.one("table_limit", a.table_limit);
            Some(Mode::Verify)
        }
        Command::Count(a) => {
            o.one("graph", a.graph);
            o.list("s", a.s);
            o.one("c1", a.c1);
            o.one("c2", a.c2);
            Some(Mode::Count)
        }
        Command::Oracle(a) => {
            o.list("parts", a.parts);
            o.list("s", a.s);
            o.one("edge_cap", a.edge_cap);
            Some(Mode::Oracle)
        }
        Command::Sweep(a) => {
            o.build(a.build);
            o.list("q", a.q);
            o.list("m", a.m);
            Some(Mode::Sweep)
        }
        Command::Table(a) => {
            o.list("query", a.query);
            o.list("witness", a.witness);
            o.one("edge_cap", a.edge_cap);
            Some(Mode::Table)
        }
        Command::Run => {
            if cli.config.is_none() {
                return Err("run needs --config".into());
            }
            None
        }
    };
    if let Some(mode) = mode {
        cfg.mode = mode;
    }
    for (key, values) in o.0 {
        cfg.clear(key);
        for v in values {
            cfg.set(key, &v).map_err(|e| e.to_string())?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    let print = cli.print_config;
    let cfg = match resolve(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            println!("status=usage reason={e:?}");
            return ExitCode::from(Exit::Usage.code() as u8);
        }
    };
    if print {
        print!("{}", cfg.to_text());
        return ExitCode::SUCCESS;
    }
    if let Some(n) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            println!("status=usage reason={:?}", e.to_string());
            return ExitCode::from(Exit::Usage.code() as u8);
        }
    }
    let outcome = run(&cfg);
    println!("{}", outcome.status);
    ExitCode::from(outcome.exit.code() as u8)
}
