//! Simulated preferences and the comparison methods: iterated local search
//! with elicitation, and elicitation over an explicit Pareto set.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dm::DmOracle;
use crate::elicitation::{Elicitation, PhaseOutcome};
use crate::error::Result;
use crate::models::{sample_simplex, CostVector, Family, Orientation, PreferenceModel};
use crate::polytope::ParameterPolytope;
use crate::problems::{pareto_indices, Encoding, Instance, Solution, SolverBudget};
use crate::trace::{GenerationRecord, RunTrace};

/// A uniformly random parameter point of the family's base polytope: a
/// uniform weight vector (sorted for OWA), or uniform nonnegative Möbius
/// masses for the 2-additive Choquet integral.
pub fn gen_hidden(
    family: Family,
    n: usize,
    orientation: Orientation,
    seed: u64,
) -> PreferenceModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = sample_simplex(family.param_dim(n), &mut rng, family.monotone(orientation));
    PreferenceModel::from_coords(family, n, orientation, &coords)
        .expect("simplex points are valid parameters")
}

fn default_delta_start() -> f64 {
    0.1
}

fn default_delta_move() -> f64 {
    0.4
}

fn default_starts() -> usize {
    100
}

fn default_max_moves() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IlsConfig {
    pub family: Family,
    #[serde(default = "default_delta_start")]
    pub delta_start: f64,
    /// Relative to the MMR of each neighbourhood at the start of its move.
    #[serde(default = "default_delta_move")]
    pub delta_move: f64,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_max_moves")]
    pub max_moves: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budget: SolverBudget,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl IlsConfig {
    pub fn new(family: Family) -> Self {
        IlsConfig {
            family,
            delta_start: default_delta_start(),
            delta_move: default_delta_move(),
            starts: default_starts(),
            max_moves: default_max_moves(),
            seed: 0,
            budget: SolverBudget::default(),
            deadline: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseConfig {
    pub family: Family,
    #[serde(default)]
    pub delta: f64,
    /// Elicit over a random subset of this many Pareto solutions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsample: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl TwoPhaseConfig {
    pub fn new(family: Family, delta: f64) -> Self {
        TwoPhaseConfig {
            family,
            delta,
            subsample: None,
            seed: 0,
            deadline: None,
        }
    }
}

fn costs_of(solutions: &[Solution]) -> Vec<CostVector> {
    solutions.iter().map(|s| s.cost.clone()).collect()
}

fn record(
    trace: &mut RunTrace,
    generation: usize,
    set: Vec<CostVector>,
    out: &PhaseOutcome,
    best: &Solution,
) {
    trace.generations.push(GenerationRecord {
        generation,
        population: set,
        omegas: Vec::new(),
        queries: out.queries,
        mmr_before: out.mmr_start,
        mmr_after: out.mmr_end,
        best: Some(best.cost.clone()),
    });
}

fn finish(trace: &mut RunTrace, el: &mut Elicitation<'_>, best: &Solution, started: Instant) {
    trace.inconsistent = el.inconsistent();
    trace.rejected_query = el.rejected.take();
    trace.warnings.append(&mut el.warnings);
    trace.queries = std::mem::take(&mut el.queries);
    trace.total_queries = trace.queries.len();
    trace.recommendation = Some(best.clone());
    trace.wall_time_s = started.elapsed().as_secs_f64();
}

/// Starting candidates: the equal-weight optimum for knapsack, otherwise
/// the optima of `starts` random parameter points.
fn ils_starts(
    instance: &Instance,
    config: &IlsConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Solution>> {
    let n = instance.n();
    let orientation = instance.orientation();
    let models: Vec<PreferenceModel> = match instance {
        Instance::Knapsack(_) => {
            vec![PreferenceModel::from_coords(
                Family::WS,
                n,
                orientation,
                &vec![1.0 / n as f64; n],
            )?]
        }
        _ => (0..config.starts.max(1))
            .map(|_| {
                let w = sample_simplex(
                    config.family.param_dim(n),
                    rng,
                    config.family.monotone(orientation),
                );
                PreferenceModel::from_coords(config.family, n, orientation, &w)
            })
            .collect::<std::result::Result<_, _>>()?,
    };
    models
        .par_iter()
        .map(|m| Ok(instance.solve_fixed(m, &config.budget)?.solution))
        .collect()
}

/// Iterated local search: elicit over a set of starting solutions, then
/// repeatedly elicit over the Pareto-filtered neighbourhood of the current
/// solution and move to its MR-optimal member until it is the current one.
pub fn ils_run(
    instance: &Instance,
    config: &IlsConfig,
    dm: &mut dyn DmOracle,
) -> Result<(Solution, RunTrace)> {
    let started = Instant::now();
    instance.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let base = ParameterPolytope::initial(config.family, instance.n(), instance.orientation());
    let mut trace = RunTrace::new("ils", config.family);
    trace.warnings.push(format!(
        "move threshold {} is relative to each neighbourhood's initial MMR",
        config.delta_move
    ));

    let starts = ils_starts(instance, config, &mut rng)?;
    let mut el = Elicitation::new(base, dm, config.deadline);
    el.generation = 1;
    let set = costs_of(&starts);
    let out = el.phase(&set, config.delta_start)?;
    let mut current = starts[out.argmin].clone();
    record(&mut trace, 1, set, &out, &current);

    let mut visited: HashSet<Encoding> = HashSet::from([current.encoding.clone()]);
    for step in 0..config.max_moves {
        if el.inconsistent() {
            break;
        }
        el.check_deadline()?;
        el.generation = step + 2;
        let mut candidates = vec![current.clone()];
        candidates.extend(instance.neighbors(&current));
        let keep = pareto_indices(&costs_of(&candidates), instance.orientation());
        let candidates: Vec<Solution> = keep.into_iter().map(|i| candidates[i].clone()).collect();
        let set = costs_of(&candidates);
        let out = el.phase(&set, config.delta_move)?;
        let next = candidates[out.argmin].clone();
        record(&mut trace, step + 2, set, &out, &next);
        if next.cost == current.cost || !visited.insert(next.encoding.clone()) {
            break;
        }
        current = next;
    }
    finish(&mut trace, &mut el, &current, started);
    Ok((current, trace))
}

/// Elicitation over the exact Pareto set, or over `pareto` when supplied.
pub fn two_phase_run(
    instance: &Instance,
    config: &TwoPhaseConfig,
    dm: &mut dyn DmOracle,
    pareto: Option<Vec<Solution>>,
) -> Result<(Solution, RunTrace)> {
    instance.validate()?;
    let mut pool = match pareto {
        Some(p) => p,
        None => instance.enumerate_pareto_small()?,
    };
    if let Some(k) = config.subsample.filter(|&k| k < pool.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut picked = sample(&mut rng, pool.len(), k).into_vec();
        picked.sort_unstable();
        pool = picked.into_iter().map(|i| pool[i].clone()).collect();
    }
    // Pareto generation is not part of the timed elicitation.
    let started = Instant::now();
    let base = ParameterPolytope::initial(config.family, instance.n(), instance.orientation());
    let mut trace = RunTrace::new("two_phase", config.family);
    trace.pool_size = Some(pool.len());
    let mut el = Elicitation::new(base, dm, config.deadline);
    el.generation = 1;
    el.generations = 1;
    let set = costs_of(&pool);
    let out = el.phase(&set, config.delta)?;
    let best = pool[out.argmin].clone();
    record(&mut trace, 1, set, &out, &best);
    finish(&mut trace, &mut el, &best, started);
    Ok((best, trace))
}
