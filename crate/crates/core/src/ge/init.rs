use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{EngineError, Individual, Mapper};
use crate::grammar::{production_depth, Grammar, Production, Symbol};

/// Inclusive range of derivation-tree depths for ramped initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthRange {
    pub min: usize,
    pub max: usize,
}

impl DepthRange {
    pub fn new(min: usize, max: usize) -> Self {
        DepthRange { min, max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Grow,
    Full,
}

struct TreeBuilder<'g> {
    grammar: &'g Grammar,
    min_depth: BTreeMap<String, Option<usize>>,
    recursive: BTreeSet<String>,
}

impl<'g> TreeBuilder<'g> {
    fn is_recursive(&self, p: &Production) -> bool {
        p.nonterminals().any(|n| self.recursive.contains(n))
    }

    /// Expand `nt` sitting at tree level `level`, writing the codons that
    /// reproduce each choice under modulo mapping.
    fn expand<R: Rng>(
        &self,
        nt: &str,
        level: usize,
        max_depth: usize,
        method: Method,
        rng: &mut R,
        codons: &mut Vec<u8>,
    ) {
        let alternatives = self.grammar.productions(nt).expect("defined nonterminal");
        let fits: Vec<usize> = (0..alternatives.len().min(256))
            .filter(|&i| {
                production_depth(&alternatives[i], &self.min_depth)
                    .is_some_and(|d| level - 1 + d <= max_depth)
            })
            .collect();
        debug_assert!(!fits.is_empty(), "caller checked the depth budget");
        let pool = match method {
            Method::Full => {
                let rec: Vec<usize> = fits
                    .iter()
                    .copied()
                    .filter(|&i| self.is_recursive(&alternatives[i]))
                    .collect();
                if rec.is_empty() {
                    fits
                } else {
                    rec
                }
            }
            Method::Grow => fits,
        };
        let choice = pool[rng.random_range(0..pool.len())];
        let k = alternatives.len();
        if k > 1 {
            let max_mult = (255 - choice) / k;
            codons.push((choice + k * rng.random_range(0..=max_mult)) as u8);
        }
        for sym in alternatives[choice].symbols() {
            if let Symbol::NonTerminal(child) = sym {
                self.expand(child, level + 1, max_depth, method, rng, codons);
            }
        }
    }
}

/// Ramped half-and-half initialization over derivation trees.
///
/// Depths run from the larger of `depths.min` and the grammar's minimum
/// viable depth up to `depths.max`; even-indexed individuals use grow and
/// odd-indexed ones use full. Each genotype is derived from its tree so that
/// mapping reproduces the tree's phenotype.
pub fn sensible_init<R: Rng>(
    grammar: &Grammar,
    population_size: usize,
    depths: DepthRange,
    mapper: &Mapper,
    rng: &mut R,
) -> Result<Vec<Individual>, EngineError> {
    let min_depth = grammar.min_depths();
    let needed = min_depth[grammar.axiom()];
    let low = match needed {
        Some(n) if n <= depths.max => n.max(depths.min),
        _ => {
            return Err(EngineError::InitFailure {
                axiom: grammar.axiom().to_string(),
                max_depth: depths.max,
                needed,
            })
        }
    };
    if low > depths.max {
        return Err(EngineError::InitFailure {
            axiom: grammar.axiom().to_string(),
            max_depth: depths.max,
            needed,
        });
    }
    let builder = TreeBuilder {
        grammar,
        min_depth,
        recursive: grammar.recursive_nonterminals(),
    };
    let ramp: Vec<usize> = (low..=depths.max).collect();
    let population = (0..population_size)
        .map(|i| {
            let depth = ramp[(i / 2) % ramp.len()];
            let method = if i % 2 == 0 {
                Method::Grow
            } else {
                Method::Full
            };
            let mut codons = Vec::new();
            builder.expand(grammar.axiom(), 1, depth, method, rng, &mut codons);
            Individual::from_genotype(codons, grammar, mapper)
        })
        .collect();
    Ok(population)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_bnf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const THREE_WAY: &str = "\
<start> ::= <expr><op><expr> | (<expr><op><expr>) | <pre_op>(<expr>)
<expr> ::= <expr><op><expr> | (<expr><op><expr>) | <pre_op>(<expr>) | <var>
<op> ::= + | - | * | /
<pre_op> ::= sin | cos | exp | log
<var> ::= x0 | 1.0
";

    #[test]
    fn trivial_grammar_population() {
        let g = parse_bnf("<s> ::= a").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop =
            sensible_init(&g, 7, DepthRange::new(1, 10), &Mapper::default(), &mut rng).unwrap();
        assert_eq!(pop.len(), 7);
        assert!(pop.iter().all(|i| i.phenotype.as_deref() == Some("a")));
    }

    #[test]
    fn every_individual_is_valid() {
        let g = parse_bnf(THREE_WAY).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mapper = Mapper::default();
        let pop = sensible_init(&g, 250, DepthRange::new(1, 10), &mapper, &mut rng).unwrap();
        assert_eq!(pop.len(), 250);
        for ind in &pop {
            let again = mapper.map(&g, &ind.genotype);
            assert!(again.is_valid());
            assert_eq!(again.phenotype, ind.phenotype);
            assert_eq!(again.effective_length, ind.genotype.len());
        }
        let distinct: BTreeSet<_> = pop.iter().map(|i| i.phenotype.clone()).collect();
        assert!(distinct.len() > 50);
    }

    #[test]
    fn depth_budget_too_small() {
        let g =
            parse_bnf("<a> ::= <b>x | <b>y\n<b> ::= <c>\n<c> ::= <d>\n<d> ::= <e>\n<e> ::= z | w")
                .unwrap();
        assert_eq!(g.min_depths()["a"], Some(5));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = sensible_init(&g, 10, DepthRange::new(2, 2), &Mapper::default(), &mut rng);
        assert!(matches!(err, Err(EngineError::InitFailure { .. })));
        assert!(sensible_init(&g, 10, DepthRange::new(2, 5), &Mapper::default(), &mut rng).is_ok());
    }

    #[test]
    fn unproductive_grammar_fails() {
        let g = parse_bnf("<s> ::= <s>").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(
            sensible_init(&g, 1, DepthRange::new(1, 10), &Mapper::default(), &mut rng).is_err()
        );
    }
}
