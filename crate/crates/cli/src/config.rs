//! Experiment configuration in a flat `key = value` text format.
//!
//! Lists are written as repeated keys. Blank lines and lines starting with
//! `#` are ignored. [`ExperimentConfig::to_text`] writes every key in a fixed
//! order, so `parse(to_text(c)) == c`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::BigRational;
use thiserror::Error;
use zng_core::pattern::DEFAULT_ENUMERATION_BUDGET;
use zng_core::BuildOptions;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given more than once")]
    Repeated(String),
    #[error("bad value for `{key}`: {value}")]
    Value { key: String, value: String },
    #[error("mode {mode} needs `{key}`")]
    Missing { mode: Mode, key: &'static str },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Construct,
    Verify,
    Count,
    Oracle,
    Sweep,
    Table,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Construct => "construct",
            Mode::Verify => "verify",
            Mode::Count => "count",
            Mode::Oracle => "oracle",
            Mode::Sweep => "sweep",
            Mode::Table => "table",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "construct" => Mode::Construct,
            "verify" => Mode::Verify,
            "count" => Mode::Count,
            "oracle" => Mode::Oracle,
            "sweep" => Mode::Sweep,
            "table" => Mode::Table,
            _ => return Err(format!("unknown mode `{s}`")),
        })
    }
}

/// Part sizes of a construction: explicit (`10`, `2x2`), every part equal to
/// `q`, or the balanced split of `ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MSpec {
    Parts(Vec<usize>),
    Q,
    Ell,
}

impl fmt::Display for MSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MSpec::Parts(p) => {
                let text: Vec<String> = p.iter().map(ToString::to_string).collect();
                f.write_str(&text.join("x"))
            }
            MSpec::Q => f.write_str("q"),
            MSpec::Ell => f.write_str("ell"),
        }
    }
}

impl FromStr for MSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q" => Ok(MSpec::Q),
            "ell" => Ok(MSpec::Ell),
            _ => s
                .split('x')
                .map(|p| p.trim().parse::<usize>().map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()
                .map(MSpec::Parts),
        }
    }
}

/// An oracle query `parts;s`, e.g. `2,2;2,2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySpec {
    pub parts: Vec<usize>,
    pub s: Vec<usize>,
}

impl fmt::Display for QuerySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", join(&self.parts), join(&self.s))
    }
}

impl FromStr for QuerySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(';').ok_or("expected `parts;s`")?;
        Ok(QuerySpec { parts: parse_list(a)?, s: parse_list(b)? })
    }
}

/// A graph file tabulated against the bound, `path;s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSpec {
    pub path: PathBuf,
    pub s: Vec<usize>,
}

impl fmt::Display for WitnessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.path.display(), join(&self.s))
    }
}

impl FromStr for WitnessSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.rsplit_once(';').ok_or("expected `path;s`")?;
        Ok(WitnessSpec { path: PathBuf::from(a.trim()), s: parse_list(b)? })
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|e| e.to_string()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub seed: u64,
    pub out: PathBuf,
    /// Cap on enumerated subset tuples.
    pub budget: u64,
    pub retries: u32,
    pub restarts: u32,
    pub table_limit: u64,
    /// Cap on potential edges for the oracle.
    pub edge_cap: u64,
    pub allow_over_capacity: bool,
    pub s: Vec<usize>,
    pub t: Option<u64>,
    pub q: Vec<u64>,
    pub m: Vec<MSpec>,
    pub parts: Vec<usize>,
    pub graph: Option<PathBuf>,
    pub c1: Option<BigRational>,
    pub c2: Option<BigRational>,
    pub query: Vec<QuerySpec>,
    pub witness: Vec<WitnessSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let opts = BuildOptions::default();
        ExperimentConfig {
            mode: Mode::default(),
            seed: 0,
            out: PathBuf::from("out"),
            budget: DEFAULT_ENUMERATION_BUDGET,
            retries: opts.per_position_retries,
            restarts: opts.restarts,
            table_limit: opts.table_limit,
            edge_cap: zng_core::oracle::DEFAULT_EDGE_CAP,
            allow_over_capacity: false,
            s: Vec::new(),
            t: None,
            q: Vec::new(),
            m: Vec::new(),
            parts: Vec::new(),
            graph: None,
            c1: None,
            c2: None,
            query: Vec::new(),
            witness: Vec::new(),
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.parse().map_err(|_| ConfigError::Value { key: key.to_string(), value: raw.to_string() })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, message: "expected `key = value`".into() })?;
            let (key, raw) = (key.trim(), raw.trim());
            let scalar = !matches!(key, "s" | "q" | "m" | "parts" | "query" | "witness");
            if scalar {
                if seen.contains(&key) {
                    return Err(ConfigError::Repeated(key.to_string()));
                }
                seen.push(key);
            }
            cfg.set(key, raw)?;
        }
        Ok(cfg)
    }

    /// Sets one key; list keys append, and also accept comma-separated values.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        let list_err = |_| ConfigError::Value { key: key.to_string(), value: raw.to_string() };
        match key {
            "mode" => self.mode = value(key, raw)?,
            "seed" => self.seed = value(key, raw)?,
            "out" => self.out = PathBuf::from(raw),
            "budget" => self.budget = value(key, raw)?,
            "retries" => self.retries = value(key, raw)?,
            "restarts" => self.restarts = value(key, raw)?,
            "table_limit" => self.table_limit = value(key, raw)?,
            "edge_cap" => self.edge_cap = value(key, raw)?,
            "allow_over_capacity" => self.allow_over_capacity = value(key, raw)?,
            "t" => self.t = Some(value(key, raw)?),
            "graph" => self.graph = Some(PathBuf::from(raw)),
            "c1" => self.c1 = Some(value(key, raw)?),
            "c2" => self.c2 = Some(value(key, raw)?),
            "s" => self.s.extend(parse_list::<usize>(raw).map_err(list_err)?),
            "q" => self.q.extend(parse_list::<u64>(raw).map_err(list_err)?),
            "m" => self.m.extend(parse_list::<MSpec>(raw).map_err(list_err)?),
            "parts" => self.parts.extend(parse_list::<usize>(raw).map_err(list_err)?),
            "query" => self.query.push(value(key, raw)?),
            "witness" => self.witness.push(value(key, raw)?),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Empties a list key so a later [`set`](Self::set) replaces it.
    pub fn clear(&mut self, key: &str) {
        match key {
            "s" => self.s.clear(),
            "q" => self.q.clear(),
            "m" => self.m.clear(),
            "parts" => self.parts.clear(),
            "query" => self.query.clear(),
            "witness" => self.witness.clear(),
            _ => {}
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: &dyn fmt::Display| out.push_str(&format!("{k} = {v}\n"));
        put("mode", &self.mode);
        put("seed", &self.seed);
        put("out", &self.out.display());
        put("budget", &self.budget);
        put("retries", &self.retries);
        put("restarts", &self.restarts);
        put("table_limit", &self.table_limit);
        put("edge_cap", &self.edge_cap);
        put("allow_over_capacity", &self.allow_over_capacity);
        if let Some(t) = self.t {
            put("t", &t);
        }
        if let Some(g) = &self.graph {
            put("graph", &g.display());
        }
        if let Some(c) = &self.c1 {
            put("c1", c);
        }
        if let Some(c) = &self.c2 {
            put("c2", c);
        }
        for v in &self.s {
            put("s", v);
        }
        for v in &self.q {
            put("q", v);
        }
        for v in &self.m {
            put("m", v);
        }
        for v in &self.parts {
            put("parts", v);
        }
        for v in &self.query {
            put("query", v);
        }
        for v in &self.witness {
            put("witness", v);
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            enumeration_budget: self.budget,
            per_position_retries: self.retries,
            restarts: self.restarts,
            table_limit: self.table_limit,
            ..BuildOptions::default()
        }
    }

    /// Checks that the keys the mode needs are present and budgets positive.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let missing = |key| ConfigError::Missing { mode: self.mode, key };
        if self.budget == 0 || self.retries == 0 || self.restarts == 0 || self.edge_cap == 0 {
            return Err(ConfigError::Invalid("budgets must be positive".into()));
        }
        match self.mode {
            Mode::Construct => {
                if self.s.is_empty() {
                    return Err(missing("s"));
                }
                self.t.ok_or_else(|| missing("t"))?;
                if self.q.len() != 1 {
                    return Err(ConfigError::Invalid("construct takes exactly one q".into()));
                }
                if self.m.is_empty() {
                    return Err(missing("m"));
                }
            }
            Mode::Verify => {
                self.graph.as_ref().ok_or_else(|| missing("graph"))?;
                if self.s.is_empty() {
                    return Err(missing("s"));
                }
                self.t.ok_or_else(|| missing("t"))?;
            }
            Mode::Count => {
                self.graph.as_ref().ok_or_else(|| missing("graph"))?;
                if self.s.is_empty() {
                    return Err(missing("s"));
                }
                if self.c1.is_some() != self.c2.is_some() {
                    return Err(ConfigError::Invalid("c1 and c2 go together".into()));
                }
            }
            Mode::Oracle => {
                if self.parts.is_empty() {
                    return Err(missing("parts"));
                }
                if self.s.len() != self.parts.len() {
                    return Err(ConfigError::Invalid("oracle needs one s per part".into()));
                }
            }
            Mode::Sweep => {
                if self.s.is_empty() {
                    return Err(missing("s"));
                }
                self.t.ok_or_else(|| missing("t"))?;
            }
            Mode::Table => {}
        }
        Ok(())
    }
}
