//! The regret-based interactive genetic algorithm and its two ablations.
//!
//! A population of `(ω, x_ω)` pairs is evolved in parameter space: new
//! parameter points come from convex crossover and Gaussian mutation inside
//! the current polytope, each is turned into a solution by the fixed-model
//! solver, and queries are asked only to sort out the population.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dm::DmOracle;
use crate::elicitation::{Elicitation, PhaseStop};
use crate::error::{Error, RegretError, Result};
use crate::models::{CostVector, Family, Monotone, Orientation, PreferenceModel};
use crate::polytope::ParameterPolytope;
use crate::problems::{Instance, Solution, SolverBudget};
use crate::trace::{GenerationRecord, RunTrace};

/// Constraint slack allowed for parameter points, scaled by row size.
pub const CLOSURE_TOL: f64 = 1e-9;

const REPAIR_STEPS: usize = 30;

fn default_mu() -> f64 {
    0.5
}

fn default_sigma() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigaConfig {
    /// Number of generations.
    #[serde(rename = "M", alias = "generations")]
    pub generations: usize,
    /// Population size.
    #[serde(rename = "S", alias = "population")]
    pub population: usize,
    /// Pairs kept from one generation to the next.
    #[serde(rename = "K", alias = "survivors")]
    pub survivors: usize,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Relative MMR threshold ending each elicitation phase.
    #[serde(default)]
    pub delta: f64,
    pub family: Family,
    /// Defaults to the instance's orientation; must match it when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budget: SolverBudget,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl RigaConfig {
    pub fn new(generations: usize, population: usize, survivors: usize, family: Family) -> Self {
        RigaConfig {
            generations,
            population,
            survivors,
            mu: default_mu(),
            sigma: default_sigma(),
            delta: 0.0,
            family,
            orientation: None,
            seed: 0,
            budget: SolverBudget::default(),
            deadline: None,
        }
    }

    /// M=10, S=20, K=5, μ=0.5.
    pub fn knapsack_default(family: Family) -> Self {
        Self::new(10, 20, 5, family)
    }

    /// M=20, S=40, K=5.
    pub fn tsp_default(family: Family) -> Self {
        Self::new(20, 40, 5, family)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.generations < 1 {
            return Err(Error::config("M", "at least one generation is required"));
        }
        if self.population < 2 {
            return Err(Error::config("S", "population size must be at least 2"));
        }
        if self.survivors < 1 || self.survivors >= self.population {
            return Err(Error::config("K", "survivors must satisfy 1 <= K < S"));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::config("mu", "mutation rate must lie in [0, 1]"));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::config(
                "sigma",
                "mutation deviation must be finite and nonnegative",
            ));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::config("delta", "threshold must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn validate_for(&self, instance: &Instance) -> Result<()> {
        self.validate()?;
        instance.validate()?;
        if let Some(o) = self.orientation {
            if o != instance.orientation() {
                return Err(Error::config("orientation", "does not match the instance"));
            }
        }
        Ok(())
    }
}

/// A solution with the parameter point it was computed for. Offspring made
/// directly in solution space have no parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub omega: Option<Vec<f64>>,
    pub solution: Solution,
}

fn model_at(instance: &Instance, family: Family, omega: &[f64]) -> Result<PreferenceModel> {
    Ok(PreferenceModel::from_coords(
        family,
        instance.n(),
        instance.orientation(),
        omega,
    )?)
}

fn solve_all(
    instance: &Instance,
    family: Family,
    omegas: Vec<Vec<f64>>,
    budget: &SolverBudget,
) -> Result<Vec<Pair>> {
    omegas
        .into_par_iter()
        .map(|omega| {
            let model = model_at(instance, family, &omega)?;
            let solution = instance.solve_fixed(&model, budget)?.solution;
            Ok(Pair {
                omega: Some(omega),
                solution,
            })
        })
        .collect()
}

/// One pair per extreme point of `polytope`, or `sample_size` sampled
/// points when the dimension is too large to enumerate vertices.
pub fn initial_population<R: Rng + ?Sized>(
    instance: &Instance,
    family: Family,
    polytope: &ParameterPolytope,
    sample_size: usize,
    budget: &SolverBudget,
    rng: &mut R,
    warnings: &mut Vec<String>,
) -> Result<Vec<Pair>> {
    let omegas = match polytope.enumerate_vertices() {
        Ok(v) => v,
        Err(RegretError::DimensionTooLarge { dim, max }) => {
            warnings.push(format!(
                "parameter dimension {dim} exceeds {max}; initial population sampled instead of enumerated"
            ));
            polytope.sample_points(sample_size, 200, 10, rng)?
        }
        Err(e) => return Err(e.into()),
    };
    solve_all(instance, family, omegas, budget)
}

/// Satisfies every constraint up to `CLOSURE_TOL` times the row's size.
pub fn admissible(polytope: &ParameterPolytope, omega: &[f64]) -> bool {
    omega.len() == polytope.dim
        && polytope.constraints().all(|c| {
            let scale = 1.0 + c.a.iter().map(|v| v.abs()).sum::<f64>() + c.b.abs();
            c.violation(omega) <= CLOSURE_TOL * scale
        })
}

/// `λ a + (1 − λ) b`.
pub fn crossover_with(a: &[f64], b: &[f64], lambda: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
        .collect()
}

/// Convex combination with λ uniform in [0, 1].
pub fn crossover<R: Rng + ?Sized>(a: &[f64], b: &[f64], rng: &mut R) -> Vec<f64> {
    let lambda: f64 = rng.random();
    crossover_with(a, b, lambda)
}

/// The point of the segment from `anchor` to `point` closest to `point`
/// that is still admissible, by bisection. `anchor` must be admissible.
pub fn pull_inside(point: &[f64], anchor: &[f64], polytope: &ParameterPolytope) -> Vec<f64> {
    if admissible(polytope, point) {
        return point.to_vec();
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..REPAIR_STEPS {
        let mid = 0.5 * (lo + hi);
        if admissible(polytope, &crossover_with(point, anchor, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    crossover_with(point, anchor, lo)
}

/// With probability `mu`, perturbs one coordinate by `N(0, σ²)`, clamps it
/// at zero and renormalizes, restores the OWA ordering, and pulls the
/// result back toward `omega` if a learned constraint is violated.
pub fn mutate<R: Rng + ?Sized>(
    omega: &[f64],
    mu: f64,
    sigma: f64,
    rng: &mut R,
    polytope: &ParameterPolytope,
) -> Vec<f64> {
    if mu <= 0.0 || !rng.random_bool(mu) {
        return omega.to_vec();
    }
    let mut w = omega.to_vec();
    let j = rng.random_range(0..w.len());
    let noise: f64 = rng.sample(StandardNormal);
    w[j] = (w[j] + sigma * noise).max(0.0);
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return omega.to_vec();
    }
    for v in &mut w {
        *v /= total;
    }
    match polytope.family.monotone(polytope.orientation) {
        Monotone::None => {}
        Monotone::NonDecreasing => w.sort_by(|a, b| a.total_cmp(b)),
        Monotone::NonIncreasing => w.sort_by(|a, b| b.total_cmp(a)),
    }
    pull_inside(&w, omega, polytope)
}

/// The `k` pairs whose cost vectors are nearest to `best`, in population
/// order. Distance ties go to the earlier pair.
pub fn select_k(population: &[Pair], best: &CostVector, k: usize) -> Vec<Pair> {
    let distance = |i: usize| population[i].solution.cost.euclidean_distance(best);
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| distance(a).total_cmp(&distance(b)).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order.into_iter().map(|i| population[i].clone()).collect()
}

fn pick_parents<R: Rng + ?Sized>(len: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..len);
    if len < 2 {
        return (i, i);
    }
    (i, (i + rng.random_range(1..len)) % len)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Variant {
    Standard,
    Kcss,
    SolutionSpace,
}

impl Variant {
    fn name(self) -> &'static str {
        match self {
            Variant::Standard => "riga",
            Variant::Kcss => "riga_kcss",
            Variant::SolutionSpace => "riga_s",
        }
    }
}

/// Offspring made in parameter space. Parents whose points were cut off by
/// later answers are first pulled back into the polytope.
fn breed_parameters(
    instance: &Instance,
    config: &RigaConfig,
    parents: &[Pair],
    need: usize,
    polytope: &ParameterPolytope,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Pair>> {
    if need == 0 {
        return Ok(Vec::new());
    }
    let reference = polytope.reference_point()?;
    let points: Vec<Vec<f64>> = parents
        .iter()
        .map(|p| match &p.omega {
            Some(w) => pull_inside(w, &reference, polytope),
            None => reference.clone(),
        })
        .collect();
    let mut omegas = Vec::with_capacity(need);
    for _ in 0..need {
        let (i, j) = pick_parents(points.len(), rng);
        let child = crossover(&points[i], &points[j], rng);
        let child = mutate(&child, config.mu, config.sigma, rng, polytope);
        assert!(
            admissible(polytope, &child),
            "offspring left the parameter polytope"
        );
        omegas.push(child);
    }
    solve_all(instance, config.family, omegas, &config.budget)
}

/// Offspring made directly on solution encodings.
fn breed_solutions(
    instance: &Instance,
    config: &RigaConfig,
    parents: &[Pair],
    need: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Pair> {
    (0..need)
        .map(|_| {
            let (i, j) = pick_parents(parents.len(), rng);
            let mut child =
                instance.crossover_solutions(&parents[i].solution, &parents[j].solution, rng);
            if config.mu > 0.0 && rng.random_bool(config.mu) {
                child = instance.mutate_solution(&child, rng);
            }
            debug_assert!(instance.is_feasible(&child));
            Pair {
                omega: None,
                solution: child,
            }
        })
        .collect()
}

fn run(
    instance: &Instance,
    config: &RigaConfig,
    dm: &mut dyn DmOracle,
    variant: Variant,
) -> Result<(Solution, RunTrace)> {
    let started = Instant::now();
    config.validate_for(instance)?;
    let family = config.family;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let base = ParameterPolytope::initial(family, instance.n(), instance.orientation());
    let mut trace = RunTrace::new(variant.name(), family);
    let mut population = initial_population(
        instance,
        family,
        &base,
        config.population,
        &config.budget,
        &mut rng,
        &mut trace.warnings,
    )?;
    let cap = config.population.max(population.len());
    let per_phase = cap * (cap - 1) / 2;
    let phases_per_generation = match variant {
        Variant::Kcss => config.survivors,
        _ => 1,
    };

    let mut el = Elicitation::new(base, dm, config.deadline);
    el.generations = config.generations;
    let mut best = population[0].solution.clone();

    for generation in 1..=config.generations {
        el.check_deadline()?;
        el.generation = generation;
        let need = config.population.saturating_sub(population.len());
        let offspring = match variant {
            Variant::SolutionSpace => {
                breed_solutions(instance, config, &population, need, &mut rng)
            }
            _ => breed_parameters(instance, config, &population, need, &el.polytope, &mut rng)?,
        };
        population.extend(offspring);
        let costs: Vec<CostVector> = population.iter().map(|p| p.solution.cost.clone()).collect();
        let asked_before = el.queries.len();

        let (mmr_before, mmr_after, survivors) = match variant {
            Variant::Kcss => {
                let mut remaining: Vec<usize> = (0..population.len()).collect();
                let mut chosen = Vec::new();
                let mut mmr_before = None;
                let mut mmr_after = 0.0;
                while chosen.len() < config.survivors && !remaining.is_empty() {
                    let set: Vec<CostVector> =
                        remaining.iter().map(|&i| costs[i].clone()).collect();
                    let out = el.phase(&set, config.delta)?;
                    assert!(out.queries <= per_phase);
                    let pick = remaining[out.argmin];
                    if chosen.is_empty() {
                        best = population[pick].solution.clone();
                        mmr_after = out.mmr_end;
                    }
                    mmr_before.get_or_insert(out.mmr_start);
                    chosen.push(pick);
                    remaining.retain(|&i| costs[i] != costs[pick]);
                    if out.stop == PhaseStop::Inconsistent {
                        break;
                    }
                }
                let survivors = chosen.iter().map(|&i| population[i].clone()).collect();
                (mmr_before.unwrap_or(0.0), mmr_after, survivors)
            }
            _ => {
                let out = el.phase(&costs, config.delta)?;
                assert!(out.queries <= per_phase);
                best = population[out.argmin].solution.clone();
                let survivors = select_k(&population, &best.cost, config.survivors);
                (out.mmr_start, out.mmr_end, survivors)
            }
        };

        let omegas = if population.iter().all(|p| p.omega.is_some()) {
            population.iter().filter_map(|p| p.omega.clone()).collect()
        } else {
            Vec::new()
        };
        trace.generations.push(GenerationRecord {
            generation,
            population: costs,
            omegas,
            queries: el.queries.len() - asked_before,
            mmr_before,
            mmr_after,
            best: Some(best.cost.clone()),
        });
        if el.inconsistent() {
            break;
        }
        population = survivors;
    }

    let total = el.queries.len();
    assert!(
        total <= config.generations * phases_per_generation * per_phase,
        "query budget exceeded"
    );
    assert_eq!(el.polytope.learned.len(), total);
    trace.inconsistent = el.inconsistent();
    trace.rejected_query = el.rejected.take();
    trace.warnings.append(&mut el.warnings);
    trace.queries = std::mem::take(&mut el.queries);
    trace.total_queries = total;
    trace.recommendation = Some(best.clone());
    trace.wall_time_s = started.elapsed().as_secs_f64();
    Ok((best, trace))
}

pub fn riga_run(
    instance: &Instance,
    config: &RigaConfig,
    dm: &mut dyn DmOracle,
) -> Result<(Solution, RunTrace)> {
    run(instance, config, dm, Variant::Standard)
}

/// Survivors are chosen one at a time by repeated elicitation over the
/// population minus the solutions already chosen.
pub fn riga_kcss_run(
    instance: &Instance,
    config: &RigaConfig,
    dm: &mut dyn DmOracle,
) -> Result<(Solution, RunTrace)> {
    run(instance, config, dm, Variant::Kcss)
}

/// Offspring come from crossover and swap mutation on solution encodings.
pub fn riga_s_run(
    instance: &Instance,
    config: &RigaConfig,
    dm: &mut dyn DmOracle,
) -> Result<(Solution, RunTrace)> {
    run(instance, config, dm, Variant::SolutionSpace)
}
