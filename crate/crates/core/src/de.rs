//! Self-adaptive differential evolution on the Grassmann manifold.
//!
//! The engine runs classic rand/1/bin DE with per-individual control
//! parameters (F, CR) that are stochastically refreshed each generation,
//! and a projection step that maps every mutant and every trial vector back
//! onto Gr(k, n) through thin QR before it is evaluated.
//!
//! One generation executes, in order: mutation, projection, crossover,
//! projection, greedy selection, parameter adaptation. All random draws of a
//! generation come from a single sequential pass over the master stream;
//! only fitness evaluations run in parallel, so results are independent of
//! the number of worker threads.

use crate::linalg::{LinalgError, Matrix};
use crate::manifold::{self, GrassmannShape, ManifoldError};
use rand::SeedableRng;
use rand::{Rng, RngExt};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A pure objective evaluated on orthonormal `n x k` frames. Implementations
/// must be thread-safe; a non-finite return value aborts the run.
pub trait Objective: Sync {
    fn eval(&self, q: &Matrix) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&Matrix) -> f64 + Sync,
{
    fn eval(&self, q: &Matrix) -> f64 {
        self(q)
    }
}

/// Engine configuration. Defaults follow the common jDE setup
/// (`F_l = 0.1`, `F_u = 0.9`, `tau1 = tau2 = 0.1`) with a population of 50
/// and at most 5000 generations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DEConfig {
    /// Population size; mutation needs at least 4 distinct indices.
    pub np: usize,
    pub max_generations: usize,
    /// Initial differential weight assigned to every individual.
    pub f_init: f64,
    /// Initial crossover probability assigned to every individual.
    pub cr_init: f64,
    /// Lower bound of the adaptive F range.
    pub f_l: f64,
    /// Width of the adaptive F range; refreshed F lies in `[f_l, f_l + f_u)`.
    pub f_u: f64,
    /// Probability of refreshing F each generation.
    pub tau1: f64,
    /// Probability of refreshing CR each generation.
    pub tau2: f64,
    pub seed: u64,
    /// Number of trailing generations over which improvement is measured.
    pub stagnation_window: usize,
    /// Run stops once best-fitness improvement over the window drops below
    /// this threshold.
    pub stagnation_tol: f64,
}

impl Default for DEConfig {
    fn default() -> Self {
        Self {
            np: 50,
            max_generations: 5000,
            f_init: 0.5,
            cr_init: 0.9,
            f_l: 0.1,
            f_u: 0.9,
            tau1: 0.1,
            tau2: 0.1,
            seed: 42,
            stagnation_window: 200,
            stagnation_tol: 1e-10,
        }
    }
}

impl DEConfig {
    pub fn validate(&self) -> Result<(), DeError> {
        if self.np < 4 {
            return Err(DeError::InvalidConfig(format!(
                "population size must be at least 4, got {}",
                self.np
            )));
        }
        if self.max_generations == 0 {
            return Err(DeError::InvalidConfig(
                "max_generations must be positive".into(),
            ));
        }
        if !self.f_l.is_finite()
            || !self.f_u.is_finite()
            || self.f_l <= 0.0
            || self.f_l + self.f_u > 1.0
        {
            return Err(DeError::InvalidConfig(format!(
                "adaptive F range needs f_l > 0 and f_l + f_u <= 1, got f_l={}, f_u={}",
                self.f_l, self.f_u
            )));
        }
        if !(0.0..=1.0).contains(&self.tau1) || !(0.0..=1.0).contains(&self.tau2) {
            return Err(DeError::InvalidConfig(format!(
                "tau1 and tau2 must lie in [0, 1], got {} and {}",
                self.tau1, self.tau2
            )));
        }
        if !self.f_init.is_finite() || self.f_init <= 0.0 {
            return Err(DeError::InvalidConfig(format!(
                "f_init must be positive and finite, got {}",
                self.f_init
            )));
        }
        if !(0.0..1.0).contains(&self.cr_init) {
            return Err(DeError::InvalidConfig(format!(
                "cr_init must lie in [0, 1), got {}",
                self.cr_init
            )));
        }
        if self.stagnation_window == 0 {
            return Err(DeError::InvalidConfig(
                "stagnation_window must be positive".into(),
            ));
        }
        if !self.stagnation_tol.is_finite() || self.stagnation_tol < 0.0 {
            return Err(DeError::InvalidConfig(format!(
                "stagnation_tol must be nonnegative and finite, got {}",
                self.stagnation_tol
            )));
        }
        Ok(())
    }
}

/// One member of the population: a feasible genome plus its private control
/// parameters and cached fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub f: f64,
    pub cr: f64,
    pub fitness: f64,
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    MaxGenerations,
    Stagnation,
}

impl fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TerminationReason::MaxGenerations => write!(f, "max_generations"),
            TerminationReason::Stagnation => write!(f, "stagnation"),
        }
    }
}

/// Outcome of a run. `history[g]` is the population best after generation
/// `g + 1`; it is non-increasing and ends at `best_fitness`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_genome: Vec<f64>,
    pub best_fitness: f64,
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub termination: TerminationReason,
}

/// Error type for the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum DeError {
    InvalidConfig(String),
    /// The objective returned NaN or infinity. Generation 0 is
    /// initialization.
    NonFiniteFitness {
        generation: usize,
        index: usize,
    },
    Manifold(ManifoldError),
}

impl fmt::Display for DeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            DeError::NonFiniteFitness { generation, index } => write!(
                f,
                "objective returned a non-finite value at generation {generation}, individual {index}"
            ),
            DeError::Manifold(e) => write!(f, "manifold error: {e}"),
        }
    }
}

impl std::error::Error for DeError {}

impl From<ManifoldError> for DeError {
    fn from(e: ManifoldError) -> Self {
        DeError::Manifold(e)
    }
}

/// An initialized population with its evaluation count.
#[derive(Debug, Clone)]
pub struct Population {
    pub individuals: Vec<Individual>,
    pub evaluations: usize,
}

/// Draws `r1, r2, r3` uniformly without replacement from
/// `{0..np} \ {target}`.
pub fn sample_mutation_indices<R: Rng + ?Sized>(
    np: usize,
    target: usize,
    rng: &mut R,
) -> [usize; 3] {
    debug_assert!(np >= 4 && target < np);
    let mut picked = [usize::MAX; 3];
    for slot in 0..3 {
        picked[slot] = loop {
            let candidate = rng.random_range(0..np);
            if candidate != target && !picked[..slot].contains(&candidate) {
                break candidate;
            }
        };
    }
    picked
}

/// rand/1 mutation: `x_{r1} + f_i * (x_{r2} - x_{r3})` with all indices
/// distinct from each other and from `target`. The result is raw, i.e. not
/// yet projected onto the manifold.
pub fn mutate<R: Rng + ?Sized>(
    population: &[Individual],
    target: usize,
    f_i: f64,
    rng: &mut R,
) -> Vec<f64> {
    let [r1, r2, r3] = sample_mutation_indices(population.len(), target, rng);
    let (a, b, c) = (
        &population[r1].genome,
        &population[r2].genome,
        &population[r3].genome,
    );
    a.iter()
        .zip(b.iter().zip(c))
        .map(|(x1, (x2, x3))| x1 + f_i * (x2 - x3))
        .collect()
}

/// Binomial crossover. Each component comes from the mutant with probability
/// `cr`; the component at the returned forced index always does, so the
/// trial differs from its parent in at least one dimension.
pub fn crossover<R: Rng + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut R,
) -> (Vec<f64>, usize) {
    debug_assert_eq!(target.len(), mutant.len());
    let d = target.len();
    let forced = rng.random_range(0..d);
    let trial = (0..d)
        .map(|j| {
            let alpha: f64 = rng.random();
            if alpha <= cr || j == forced {
                mutant[j]
            } else {
                target[j]
            }
        })
        .collect();
    (trial, forced)
}

/// Greedy selection: the trial replaces the target only on strict
/// improvement; ties keep the target.
pub fn select(target: Individual, trial: Individual) -> Individual {
    if trial.fitness < target.fitness {
        trial
    } else {
        target
    }
}

/// jDE parameter refresh. With probability `tau1` the differential weight is
/// resampled in `[f_l, f_l + f_u)`, with probability `tau2` the crossover
/// probability is resampled in `(0, 1)`; otherwise the old values survive.
/// Four uniform draws are consumed on every call.
pub fn adapt<R: Rng + ?Sized>(f: f64, cr: f64, config: &DEConfig, rng: &mut R) -> (f64, f64) {
    let r1: f64 = rng.random();
    let r2: f64 = rng.random();
    let r3: f64 = loop {
        let v: f64 = rng.random();
        if v > 0.0 {
            break v;
        }
    };
    let r4: f64 = rng.random();
    let f_new = if r2 < config.tau1 {
        config.f_l + r1 * config.f_u
    } else {
        f
    };
    let cr_new = if r4 < config.tau2 { r3 } else { cr };
    (f_new, cr_new)
}

/// Builds the initial population: `np` uniformly random manifold points,
/// each carrying `f_init` / `cr_init` and an evaluated fitness.
pub fn initialize<O: Objective + ?Sized>(
    config: &DEConfig,
    shape: GrassmannShape,
    objective: &O,
) -> Result<Population, DeError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    initialize_with_rng(config, shape, objective, &mut rng)
}

fn initialize_with_rng<O: Objective + ?Sized>(
    config: &DEConfig,
    shape: GrassmannShape,
    objective: &O,
    rng: &mut ChaCha8Rng,
) -> Result<Population, DeError> {
    let mut genomes = Vec::with_capacity(config.np);
    for _ in 0..config.np {
        genomes.push(manifold::random_point(shape, rng)?);
    }
    let fitness = evaluate_all(objective, &genomes, shape, 0)?;
    let individuals = genomes
        .into_iter()
        .zip(fitness)
        .map(|(genome, fitness)| Individual {
            genome,
            f: config.f_init,
            cr: config.cr_init,
            fitness,
        })
        .collect();
    Ok(Population {
        individuals,
        evaluations: config.np,
    })
}

/// Evaluates a batch of feasible genomes in parallel. Rejects non-finite
/// fitness with the offending generation and index.
fn evaluate_all<O: Objective + ?Sized>(
    objective: &O,
    genomes: &[Vec<f64>],
    shape: GrassmannShape,
    generation: usize,
) -> Result<Vec<f64>, DeError> {
    let fitness: Vec<f64> = genomes
        .par_iter()
        .map(|genome| {
            let q = manifold::reshape(genome, shape).expect("engine genomes have length d");
            objective.eval(&q)
        })
        .collect();
    for (index, value) in fitness.iter().enumerate() {
        if !value.is_finite() {
            return Err(DeError::NonFiniteFitness { generation, index });
        }
    }
    Ok(fitness)
}

/// Projects a raw vector onto the manifold, replacing it with a fresh random
/// point in the measure-zero case of a rank-deficient reshape.
fn project_or_resample(
    raw: &[f64],
    shape: GrassmannShape,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, DeError> {
    match manifold::project(raw, shape) {
        Ok(genome) => Ok(genome),
        Err(ManifoldError::ProjectionFailed(LinalgError::RankDeficient { .. })) => {
            Ok(manifold::random_point(shape, rng)?)
        }
        Err(e) => Err(DeError::Manifold(e)),
    }
}

fn best_fitness(individuals: &[Individual]) -> f64 {
    individuals
        .iter()
        .map(|ind| ind.fitness)
        .fold(f64::INFINITY, f64::min)
}

fn mean_fitness(individuals: &[Individual]) -> f64 {
    individuals.iter().map(|ind| ind.fitness).sum::<f64>() / individuals.len() as f64
}

/// Runs the optimizer to termination.
pub fn run<O: Objective + ?Sized>(
    config: &DEConfig,
    shape: GrassmannShape,
    objective: &O,
) -> Result<RunResult, DeError> {
    run_with_progress(config, shape, objective, |_, _, _| {})
}

/// Like [`run`], invoking `progress(generation, best_fitness, mean_fitness)`
/// after each generation's selection.
pub fn run_with_progress<O, P>(
    config: &DEConfig,
    shape: GrassmannShape,
    objective: &O,
    mut progress: P,
) -> Result<RunResult, DeError>
where
    O: Objective + ?Sized,
    P: FnMut(usize, f64, f64),
{
    config.validate()?;
    let np = config.np;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = initialize_with_rng(config, shape, objective, &mut rng)?;
    let mut evaluations = population.evaluations;

    // bests[g] is the population best after generation g (0 = initialization).
    let mut bests = Vec::with_capacity(config.max_generations + 1);
    bests.push(best_fitness(&population.individuals));

    let mut termination = TerminationReason::MaxGenerations;
    for generation in 1..=config.max_generations {
        // Mutation.
        let mut mutants = Vec::with_capacity(np);
        for i in 0..np {
            let f_i = population.individuals[i].f;
            mutants.push(mutate(&population.individuals, i, f_i, &mut rng));
        }
        // Projection of mutants.
        let mut projected = Vec::with_capacity(np);
        for raw in &mutants {
            projected.push(project_or_resample(raw, shape, &mut rng)?);
        }
        // Crossover against the projected mutants.
        let mut trials_raw = Vec::with_capacity(np);
        for (individual, mutant) in population.individuals.iter().zip(&projected) {
            let (trial, _) = crossover(&individual.genome, mutant, individual.cr, &mut rng);
            trials_raw.push(trial);
        }
        // Projection of trials.
        let mut trials = Vec::with_capacity(np);
        for raw in &trials_raw {
            trials.push(project_or_resample(raw, shape, &mut rng)?);
        }
        // Evaluation (the only parallel step) and greedy selection.
        let fitness = evaluate_all(objective, &trials, shape, generation)?;
        evaluations += np;
        let survivors: Vec<Individual> = population
            .individuals
            .drain(..)
            .zip(trials.into_iter().zip(fitness))
            .map(|(target, (genome, fitness))| {
                let trial = Individual {
                    genome,
                    f: target.f,
                    cr: target.cr,
                    fitness,
                };
                select(target, trial)
            })
            .collect();
        population.individuals = survivors;
        // Parameter adaptation; new values take effect next generation.
        for individual in &mut population.individuals {
            let (f_new, cr_new) = adapt(individual.f, individual.cr, config, &mut rng);
            individual.f = f_new;
            individual.cr = cr_new;
        }

        let best = best_fitness(&population.individuals);
        bests.push(best);
        progress(generation, best, mean_fitness(&population.individuals));

        if generation >= config.stagnation_window {
            let earlier = bests[generation - config.stagnation_window];
            if earlier - best < config.stagnation_tol {
                termination = TerminationReason::Stagnation;
                break;
            }
        }
    }

    let best_index = population
        .individuals
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.fitness.partial_cmp(&b.fitness).unwrap())
        .map(|(i, _)| i)
        .expect("population is non-empty");
    let best = &population.individuals[best_index];
    Ok(RunResult {
        best_genome: best.genome.clone(),
        best_fitness: best.fitness,
        history: bests[1..].to_vec(),
        evaluations,
        termination,
    })
}
