use rand::Rng;

use super::{EngineError, Individual};

/// Index of the tournament winner. Entrants are drawn uniformly with
/// replacement; the lowest fitness wins and ties go to the lowest index.
///
/// Panics on an empty population.
pub fn tournament_select<R: Rng>(
    population: &[Individual],
    tournament_size: usize,
    rng: &mut R,
) -> usize {
    assert!(
        !population.is_empty(),
        "tournament over an empty population"
    );
    (0..tournament_size.max(1))
        .map(|_| rng.random_range(0..population.len()))
        .min_by(|&a, &b| {
            population[a]
                .fitness
                .total_cmp(&population[b].fitness)
                .then(a.cmp(&b))
        })
        .expect("at least one entrant")
}

/// Number of leading codons that drove the mapping, capped at the genome
/// length (wrapped re-reads can push the count past it).
fn effective_region(parent: &Individual) -> usize {
    parent.effective_length.min(parent.genotype.len())
}

/// One-point crossover restricted to the effective region.
///
/// A single cut point is drawn uniformly from `[1, min(eff_a, eff_b)]`, so
/// it lies inside the consumed codons of both parents. Heads stay with their
/// parent and tails are swapped. Returns the two unmapped child genotypes.
///
/// Fails with [`EngineError::DegenerateParent`] when either parent has no
/// effective codons; callers fall back to copying the parents.
pub fn effective_crossover<R: Rng>(
    parent_a: &Individual,
    parent_b: &Individual,
    rng: &mut R,
) -> Result<(Vec<u8>, Vec<u8>), EngineError> {
    let limit = effective_region(parent_a).min(effective_region(parent_b));
    if limit == 0 {
        return Err(EngineError::DegenerateParent);
    }
    let cut = rng.random_range(1..=limit);
    let (head_a, tail_a) = parent_a.genotype.split_at(cut);
    let (head_b, tail_b) = parent_b.genotype.split_at(cut);
    Ok(([head_a, tail_b].concat(), [head_b, tail_a].concat()))
}

/// Replace each codon with a fresh uniform byte with probability `rate`.
/// Returns the number of codons that were re-drawn.
pub fn codon_mutation<R: Rng>(genotype: &mut [u8], rate: f64, rng: &mut R) -> usize {
    if rate <= 0.0 {
        return 0;
    }
    let mut drawn = 0;
    for codon in genotype.iter_mut() {
        if rng.random_bool(rate.min(1.0)) {
            *codon = rng.random();
            drawn += 1;
        }
    }
    drawn
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ind(genotype: Vec<u8>, effective_length: usize, fitness: f64) -> Individual {
        Individual {
            genotype,
            phenotype: Some(String::new()),
            effective_length,
            fitness,
        }
    }

    #[test]
    fn full_tournament_finds_global_best() {
        let pop: Vec<_> = [5.0, 3.0, 9.0, 1.0, 7.0]
            .iter()
            .map(|&f| ind(vec![0], 1, f))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // With replacement the best is not guaranteed; with a large
        // tournament it is overwhelmingly likely.
        let wins = (0..200)
            .filter(|_| tournament_select(&pop, 50, &mut rng) == 3)
            .count();
        assert_eq!(wins, 200);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let pop = vec![
            ind(vec![0], 1, 2.0),
            ind(vec![0], 1, 1.0),
            ind(vec![0], 1, 1.0),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_ne!(tournament_select(&pop, 64, &mut rng), 2);
        }
    }

    #[test]
    fn size_one_is_uniform() {
        let pop: Vec<_> = (0..4).map(|i| ind(vec![0], 1, i as f64)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0usize; 4];
        for _ in 0..40_000 {
            counts[tournament_select(&pop, 1, &mut rng)] += 1;
        }
        for c in counts {
            assert!((9_500..=10_500).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn identical_parents_give_identical_children() {
        let a = ind(vec![1, 2, 3, 4, 5, 6], 4, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let (ca, cb) = effective_crossover(&a, &a.clone(), &mut rng).unwrap();
            assert_eq!(ca, a.genotype);
            assert_eq!(cb, a.genotype);
        }
    }

    #[test]
    fn cut_forced_to_one() {
        let a = ind(vec![1, 1, 1], 1, 0.0);
        let b = ind(vec![2, 2, 2, 2], 3, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            let (ca, cb) = effective_crossover(&a, &b, &mut rng).unwrap();
            assert_eq!(ca, [1, 2, 2, 2]);
            assert_eq!(cb, [2, 1, 1]);
        }
    }

    #[test]
    fn wrapped_effective_length_is_capped() {
        let a = ind(vec![1, 1], 6, 0.0);
        let b = ind(vec![2, 2, 2], 9, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let (ca, cb) = effective_crossover(&a, &b, &mut rng).unwrap();
            assert_eq!(ca.len(), 3);
            assert_eq!(cb.len(), 2);
            assert_eq!(ca[0], 1);
        }
    }

    #[test]
    fn degenerate_parent() {
        let a = ind(vec![], 0, 0.0);
        let b = ind(vec![1], 1, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            effective_crossover(&a, &b, &mut rng),
            Err(EngineError::DegenerateParent)
        );
    }

    #[test]
    fn mutation_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut g = vec![7u8; 100];
        assert_eq!(codon_mutation(&mut g, 0.0, &mut rng), 0);
        assert_eq!(g, vec![7u8; 100]);
        assert_eq!(codon_mutation(&mut g, 1.0, &mut rng), 100);
        assert!(g.iter().filter(|&&c| c != 7).count() > 90);
    }

    #[test]
    fn mutation_binomial_mean() {
        // Binomial(200, 0.01): mean 2.0, sd of the mean over 10k trials ~0.014.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trials = 10_000;
        let total: usize = (0..trials)
            .map(|_| codon_mutation(&mut [0u8; 200], 0.01, &mut rng))
            .sum();
        let mean = total as f64 / trials as f64;
        assert!((mean - 2.0).abs() <= 0.15, "mean {mean}");
    }
}
