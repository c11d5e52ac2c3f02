use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    codon_mutation, effective_crossover, sensible_init, tournament_select, EngineError,
    EvolutionConfig, Individual, PENALTY,
};
use crate::grammar::Grammar;

/// One line of the JSON-lines run trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub best_phenotype: Option<String>,
    pub effective_size: usize,
    pub eval_millis: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub records: Vec<GenerationRecord>,
    /// Best individual of each generation, parallel to `records`.
    pub best: Vec<Individual>,
}

impl RunTrace {
    pub fn final_best(&self) -> Option<&Individual> {
        self.best.last()
    }

    /// Serialize the records as JSON lines.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

fn evaluate<F: Fn(&str) -> f64>(population: &mut [Individual], fitness: &F) {
    for ind in population {
        ind.fitness = match &ind.phenotype {
            Some(p) => {
                let f = fitness(p);
                if f.is_finite() {
                    f.min(PENALTY)
                } else {
                    PENALTY
                }
            }
            None => PENALTY,
        };
    }
}

/// Index of the lowest-fitness individual, ties to the lowest index.
fn best_index(population: &[Individual]) -> usize {
    let mut best = 0;
    for (i, ind) in population.iter().enumerate().skip(1) {
        if ind.fitness < population[best].fitness {
            best = i;
        }
    }
    best
}

fn record(generation: usize, population: &[Individual], eval_millis: f64, trace: &mut RunTrace) {
    let best = &population[best_index(population)];
    trace.records.push(GenerationRecord {
        generation,
        best_fitness: best.fitness,
        best_phenotype: best.phenotype.clone(),
        effective_size: best.effective_length,
        eval_millis,
    });
    trace.best.push(best.clone());
}

/// Run one generational GE search, minimizing `fitness`.
///
/// Invalid individuals get [`PENALTY`], as does any non-finite score. The
/// `elitism` best individuals survive unchanged into the next generation;
/// the rest are bred by tournament selection, effective crossover (with
/// probability `crossover_rate`) and codon mutation. The trace holds the
/// best individual after each evaluation, starting with generation 0.
pub fn evolve<F>(
    config: &EvolutionConfig,
    grammar: &Grammar,
    fitness: F,
) -> Result<RunTrace, EngineError>
where
    F: Fn(&str) -> f64,
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mapper = config.mapper();
    let size = config.population_size;
    let mut trace = RunTrace::default();

    let mut population = sensible_init(grammar, size, config.depth_range(), &mapper, &mut rng)?;
    let start = Instant::now();
    evaluate(&mut population, &fitness);
    record(0, &population, millis(start), &mut trace);

    for generation in 1..=config.generations {
        let mut ranked: Vec<usize> = (0..size).collect();
        ranked.sort_by(|&a, &b| population[a].fitness.total_cmp(&population[b].fitness));
        let mut next: Vec<Individual> = ranked[..config.elitism]
            .iter()
            .map(|&i| population[i].clone())
            .collect();

        while next.len() < size {
            let a = &population[tournament_select(&population, config.tournament_size, &mut rng)];
            let b = &population[tournament_select(&population, config.tournament_size, &mut rng)];
            let children = if rng.random_bool(config.crossover_rate) {
                effective_crossover(a, b, &mut rng)
                    .unwrap_or_else(|_| (a.genotype.clone(), b.genotype.clone()))
            } else {
                (a.genotype.clone(), b.genotype.clone())
            };
            for mut genotype in [children.0, children.1] {
                codon_mutation(&mut genotype, config.mutation_rate, &mut rng);
                if next.len() < size {
                    next.push(Individual::from_genotype(genotype, grammar, &mapper));
                }
            }
        }

        let start = Instant::now();
        evaluate(&mut next[config.elitism..], &fitness);
        population = next;
        record(generation, &population, millis(start), &mut trace);
    }
    Ok(trace)
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
