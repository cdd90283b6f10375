//! Experiment harness: runs elicitation methods on seeded instances against
//! simulated decision makers and reports time, queries and error.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use riga_core::baselines::{gen_hidden, ils_run, two_phase_run, IlsConfig, TwoPhaseConfig};
use riga_core::metrics::error_pct;
use riga_core::{
    riga_kcss_run, riga_run, riga_s_run, Error, Family, Instance, ProblemKind, RigaConfig,
    RunTrace, SimulatedDm, Solution,
};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "RIGA_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Run(#[from] Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    fn config(field: &str, message: impl Into<String>) -> Self {
        BenchError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Riga,
    RigaKcss,
    RigaS,
    Ils,
    TwoPhase,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Riga,
        Method::RigaKcss,
        Method::RigaS,
        Method::Ils,
        Method::TwoPhase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Riga => "riga",
            Method::RigaKcss => "riga_kcss",
            Method::RigaS => "riga_s",
            Method::Ils => "ils",
            Method::TwoPhase => "two_phase",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| BenchError::config("methods", format!("unknown method {s:?}")))
    }
}

/// RIGA parameters; unset fields take the problem's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RigaParams {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub generations: Option<usize>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub population: Option<usize>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub survivors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IlsParams {
    pub delta_start: f64,
    pub delta_move: f64,
    pub starts: usize,
}

impl Default for IlsParams {
    fn default() -> Self {
        IlsParams {
            delta_start: 0.1,
            delta_move: 0.4,
            starts: 100,
        }
    }
}

fn default_runs() -> usize {
    50
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub n: usize,
    /// Items, cities or alternatives.
    pub size: usize,
    pub families: Vec<Family>,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub riga: RigaParams,
    #[serde(default)]
    pub ils: IlsParams,
    /// Threshold for RIGA, its variants and Two-Phase.
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Explicit seed list; defaults to `first_seed..first_seed + runs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub first_seed: u64,
    /// Per-run time limit in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_s: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(
        problem: ProblemKind,
        n: usize,
        size: usize,
        families: Vec<Family>,
        methods: Vec<Method>,
    ) -> Self {
        ExperimentConfig {
            problem,
            n,
            size,
            families,
            methods,
            riga: RigaParams::default(),
            ils: IlsParams::default(),
            delta: 0.0,
            runs: default_runs(),
            seeds: None,
            first_seed: 0,
            timeout_s: None,
        }
    }

    pub fn seed_list(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.clone(),
            None => (self.first_seed..self.first_seed + self.runs as u64).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.runs < 1 {
            return Err(BenchError::config("runs", "at least one run is required"));
        }
        if self.seeds.as_ref().is_some_and(|s| s.is_empty()) {
            return Err(BenchError::config("seeds", "seed list is empty"));
        }
        if self.n < 2 {
            return Err(BenchError::config(
                "n",
                "at least two objectives are required",
            ));
        }
        if self.families.is_empty() {
            return Err(BenchError::config("families", "no family given"));
        }
        if self.methods.is_empty() {
            return Err(BenchError::config("methods", "no method given"));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(BenchError::config("delta", "threshold must lie in [0, 1]"));
        }
        if self.timeout_s.is_some_and(|t| !(t > 0.0)) {
            return Err(BenchError::config("timeout_s", "must be positive"));
        }
        Instance::generate(self.problem, self.size, self.n, 0)
            .map_err(|e| BenchError::config("size", e.to_string()))?;
        for family in &self.families {
            self.riga_config(*family, 0)
                .validate()
                .map_err(|e| match e {
                    Error::Config { field, message } => BenchError::Config {
                        field: format!("riga.{field}"),
                        message,
                    },
                    other => BenchError::Run(other),
                })?;
        }
        Ok(())
    }

    pub fn riga_config(&self, family: Family, seed: u64) -> RigaConfig {
        let mut c = match self.problem {
            ProblemKind::Tsp => RigaConfig::tsp_default(family),
            _ => RigaConfig::knapsack_default(family),
        };
        let p = &self.riga;
        c.generations = p.generations.unwrap_or(c.generations);
        c.population = p.population.unwrap_or(c.population);
        c.survivors = p.survivors.unwrap_or(c.survivors);
        c.mu = p.mu.unwrap_or(c.mu);
        c.sigma = p.sigma.unwrap_or(c.sigma);
        c.delta = self.delta;
        c.seed = derive_seed(seed, 3);
        c
    }
}

/// Independent seed streams from one run seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub method: Method,
    pub family: Family,
    pub n: usize,
    pub size: usize,
    pub time_s: f64,
    pub queries: usize,
    pub error_pct: f64,
    /// `|`-separated markers such as `timeout` or `inconsistent`.
    pub flags: String,
}

impl RunRecord {
    pub fn timed_out(&self) -> bool {
        self.flags.split('|').any(|f| f == "timeout")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub method: Method,
    pub family: Family,
    pub n: usize,
    /// Runs included in the means.
    pub runs: usize,
    pub timeouts: usize,
    pub mean_time_s: f64,
    pub mean_queries: f64,
    pub mean_error_pct: f64,
}

/// Instance of a run: the same for every method and family.
pub fn instance_for(config: &ExperimentConfig, seed: u64) -> Result<Instance, Error> {
    Ok(Instance::generate(
        config.problem,
        config.size,
        config.n,
        seed,
    )?)
}

pub fn run_method(
    method: Method,
    instance: &Instance,
    config: &ExperimentConfig,
    family: Family,
    seed: u64,
    dm: &mut SimulatedDm,
    deadline: Option<Instant>,
) -> Result<(Solution, RunTrace), Error> {
    match method {
        Method::Riga | Method::RigaKcss | Method::RigaS => {
            let mut c = config.riga_config(family, seed);
            c.deadline = deadline;
            let f = match method {
                Method::Riga => riga_run,
                Method::RigaKcss => riga_kcss_run,
                _ => riga_s_run,
            };
            f(instance, &c, dm)
        }
        Method::Ils => {
            let c = IlsConfig {
                delta_start: config.ils.delta_start,
                delta_move: config.ils.delta_move,
                starts: config.ils.starts,
                seed: derive_seed(seed, 4),
                deadline,
                ..IlsConfig::new(family)
            };
            ils_run(instance, &c, dm)
        }
        Method::TwoPhase => {
            let c = TwoPhaseConfig {
                deadline,
                ..TwoPhaseConfig::new(family, config.delta)
            };
            two_phase_run(instance, &c, dm, None)
        }
    }
}

/// Runs one (method, family, seed) cell. Timing excludes instance
/// generation and the error oracle.
pub fn run_one(
    config: &ExperimentConfig,
    method: Method,
    family: Family,
    seed: u64,
) -> Result<RunRecord, Error> {
    let instance = instance_for(config, seed)?;
    let hidden = gen_hidden(
        family,
        config.n,
        instance.orientation(),
        derive_seed(seed, 1 + family_index(family)),
    );
    let mut dm = SimulatedDm::new(hidden.clone());
    let started = Instant::now();
    let deadline = config
        .timeout_s
        .map(|t| started + Duration::from_secs_f64(t));
    let mut record = RunRecord {
        seed,
        method,
        family,
        n: config.n,
        size: config.size,
        time_s: 0.0,
        queries: 0,
        error_pct: f64::NAN,
        flags: String::new(),
    };
    match run_method(method, &instance, config, family, seed, &mut dm, deadline) {
        Ok((solution, trace)) => {
            record.time_s = trace.wall_time_s;
            record.queries = trace.total_queries;
            record.error_pct = error_pct(&solution, &instance, &hidden)?;
            let mut flags = Vec::new();
            if trace.inconsistent {
                flags.push("inconsistent");
            }
            if !trace.warnings.is_empty() && method != Method::Ils {
                flags.push("warning");
            }
            record.flags = flags.join("|");
        }
        Err(Error::Timeout) => {
            record.time_s = started.elapsed().as_secs_f64();
            record.flags = "timeout".into();
        }
        Err(e) => return Err(e),
    }
    Ok(record)
}

fn family_index(family: Family) -> u64 {
    Family::ALL.iter().position(|f| *f == family).unwrap_or(0) as u64
}

/// Every (method, family, seed) cell, run on `workers` threads and returned
/// in method, family, seed order.
pub fn run_experiment(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<Vec<RunRecord>, BenchError> {
    config.validate()?;
    let seeds = config.seed_list();
    let mut cells: Vec<(Method, Family, u64)> = Vec::new();
    for &m in &config.methods {
        for &f in &config.families {
            cells.extend(seeds.iter().map(|&s| (m, f, s)));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| BenchError::config("workers", e.to_string()))?;
    let results: Vec<Result<RunRecord, Error>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(m, f, s)| run_one(config, m, f, s))
            .collect()
    });
    results
        .into_iter()
        .map(|r| r.map_err(BenchError::from))
        .collect()
}

/// Per (method, family) means over the runs that did not time out.
pub fn aggregate(records: &[RunRecord]) -> Vec<MetricsRow> {
    let mut groups: BTreeMap<(Method, usize, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.method, family_index(r.family) as usize, r.n))
            .or_default()
            .push(r);
    }
    groups
        .into_values()
        .map(|rs| {
            let done: Vec<&&RunRecord> = rs.iter().filter(|r| !r.timed_out()).collect();
            let mean = |f: &dyn Fn(&RunRecord) -> f64| {
                if done.is_empty() {
                    f64::NAN
                } else {
                    done.iter().map(|r| f(r)).sum::<f64>() / done.len() as f64
                }
            };
            MetricsRow {
                method: rs[0].method,
                family: rs[0].family,
                n: rs[0].n,
                runs: done.len(),
                timeouts: rs.len() - done.len(),
                mean_time_s: mean(&|r| r.time_s),
                mean_queries: mean(&|r| r.queries as f64),
                mean_error_pct: mean(&|r| r.error_pct),
            }
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(records: &[RunRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(records: &[RunRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<RunRecord>, BenchError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(BenchError::from))
        .collect()
}

pub fn format_table(rows: &[MetricsRow]) -> String {
    let mut out = format!(
        "{:<10} {:<8} {:>2} {:>5} {:>9} {:>10} {:>10}\n",
        "method", "family", "n", "runs", "time(s)", "queries", "error(%)"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<10} {:<8} {:>2} {:>5} {:>9.3} {:>10.2} {:>10.3}",
            r.method, r.family, r.n, r.runs, r.mean_time_s, r.mean_queries, r.mean_error_pct
        ));
        if r.timeouts > 0 {
            out.push_str(&format!("  ({} timed out)", r.timeouts));
        }
        out.push('\n');
    }
    out
}

/// Worker count from the environment, or the available parallelism.
pub fn workers_from_env() -> Result<usize, BenchError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v.parse::<usize>().ok().filter(|w| *w > 0).ok_or_else(|| {
            BenchError::config(
                WORKERS_ENV,
                format!("expected a positive integer, got {v:?}"),
            )
        }),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}
