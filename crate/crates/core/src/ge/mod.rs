//! Grammatical evolution: genotype representation, mapping, sensible
//! initialization, variation operators and the generational loop.
//!
//! Fitness is always minimized. Problems that maximize a score (hit counts)
//! negate it before handing it to the engine.

mod evolve;
mod init;
mod mapper;
mod operators;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use evolve::{evolve, GenerationRecord, RunTrace};
pub use init::{sensible_init, DepthRange};
pub use mapper::{map_genotype, Mapper, Mapping, DEFAULT_MAX_DEPTH};
pub use operators::{codon_mutation, effective_crossover, tournament_select};

use crate::grammar::Grammar;

/// Fitness assigned to individuals that fail to map or evaluate.
pub const PENALTY: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("no derivation of <{axiom}> fits within depth {max_depth} (needs {needed:?})")]
    InitFailure {
        axiom: String,
        max_depth: usize,
        needed: Option<usize>,
    },
    #[error("parent has no effective codons")]
    DegenerateParent,
    #[error("invalid evolution config: {0}")]
    InvalidConfig(String),
}

/// One member of the population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genotype: Vec<u8>,
    pub phenotype: Option<String>,
    pub effective_length: usize,
    pub fitness: f64,
}

impl Individual {
    /// Map `genotype` and build an unevaluated individual.
    pub fn from_genotype(genotype: Vec<u8>, grammar: &Grammar, mapper: &Mapper) -> Self {
        let Mapping {
            phenotype,
            effective_length,
        } = mapper.map(grammar, &genotype);
        Individual {
            genotype,
            phenotype,
            effective_length,
            fitness: PENALTY,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.phenotype.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-codon replacement probability.
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub elitism: usize,
    pub max_wraps: usize,
    /// Derivation depth beyond which mapping marks an individual invalid.
    pub max_derivation_depth: usize,
    pub init_min_depth: usize,
    pub init_max_depth: usize,
    pub rng_seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 250,
            generations: 50,
            crossover_rate: 0.9,
            mutation_rate: 0.01,
            tournament_size: 3,
            elitism: 1,
            max_wraps: 2,
            max_derivation_depth: DEFAULT_MAX_DEPTH,
            init_min_depth: 1,
            init_max_depth: 10,
            rng_seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: &str| Err(EngineError::InvalidConfig(m.to_string()));
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("crossover_rate must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("mutation_rate must be in [0, 1]");
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return bad("need population_size >= tournament_size >= 1");
        }
        if self.elitism >= self.population_size {
            return bad("elitism must be smaller than population_size");
        }
        if self.init_min_depth > self.init_max_depth {
            return bad("init_min_depth exceeds init_max_depth");
        }
        if self.init_max_depth > self.max_derivation_depth {
            return bad("init_max_depth exceeds max_derivation_depth");
        }
        Ok(())
    }

    pub fn mapper(&self) -> Mapper {
        Mapper::new(self.max_wraps, self.max_derivation_depth)
    }

    pub fn depth_range(&self) -> DepthRange {
        DepthRange::new(self.init_min_depth, self.init_max_depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let c = EvolutionConfig::default();
        c.validate().unwrap();
        assert_eq!(c.population_size, 250);
        assert_eq!(c.generations, 50);
        assert_eq!(c.crossover_rate, 0.9);
        assert_eq!(c.mutation_rate, 0.01);
    }

    #[test]
    fn config_rejects_bad_values() {
        let bad = [
            EvolutionConfig {
                tournament_size: 0,
                ..Default::default()
            },
            EvolutionConfig {
                elitism: 250,
                ..Default::default()
            },
            EvolutionConfig {
                mutation_rate: 1.5,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn config_from_partial_toml() {
        let c: EvolutionConfig = toml::from_str("population_size = 40\nrng_seed = 9").unwrap();
        assert_eq!(c.population_size, 40);
        assert_eq!(c.rng_seed, 9);
        assert_eq!(c.generations, 50);
        assert!(toml::from_str::<EvolutionConfig>("bogus = 1").is_err());
    }
}
