use crate::grammar::{Grammar, Symbol};

/// Default depth limit for derivation trees during mapping.
pub const DEFAULT_MAX_DEPTH: usize = 90;

/// Outcome of mapping one genotype.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    /// `None` when nonterminals remained after the wrap budget was spent or
    /// the derivation exceeded the depth limit.
    pub phenotype: Option<String>,
    /// Codons consumed, counting re-reads after wrapping.
    pub effective_length: usize,
}

impl Mapping {
    pub fn is_valid(&self) -> bool {
        self.phenotype.is_some()
    }
}

/// Genotype-to-phenotype mapper.
///
/// Expands the leftmost nonterminal first. A nonterminal with `k >= 2`
/// alternatives consumes one codon `c` and picks alternative `c % k`;
/// single-alternative nonterminals consume nothing. When the genome runs
/// out the read position wraps to the start, at most `max_wraps` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mapper {
    pub max_wraps: usize,
    pub max_depth: usize,
}

impl Default for Mapper {
    fn default() -> Self {
        Mapper {
            max_wraps: 2,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl Mapper {
    pub fn new(max_wraps: usize, max_depth: usize) -> Self {
        Mapper {
            max_wraps,
            max_depth,
        }
    }

    pub fn map(&self, grammar: &Grammar, genotype: &[u8]) -> Mapping {
        let mut out = String::new();
        // (symbol, depth) with the next symbol to expand on top.
        let mut stack: Vec<(&Symbol, usize)> = Vec::new();
        let axiom = Symbol::NonTerminal(grammar.axiom().to_string());
        let mut consumed = 0usize;
        let mut pos = 0usize;
        let mut wraps = 0usize;

        let invalid = |consumed| Mapping {
            phenotype: None,
            effective_length: consumed,
        };

        // The axiom is owned locally; expand it before entering the loop so
        // every stacked symbol borrows from the grammar.
        let mut pending: Option<(&Symbol, usize)> = Some((&axiom, 1));
        while let Some((sym, depth)) = pending.take().or_else(|| stack.pop()) {
            let name = match sym {
                Symbol::Terminal(t) => {
                    out.push_str(t);
                    continue;
                }
                Symbol::NonTerminal(n) => n,
            };
            if depth > self.max_depth {
                return invalid(consumed);
            }
            let alternatives = grammar
                .productions(name)
                .expect("grammar invariant: every nonterminal has a rule");
            let choice = if alternatives.len() == 1 {
                0
            } else {
                if pos == genotype.len() {
                    if genotype.is_empty() || wraps == self.max_wraps {
                        return invalid(consumed);
                    }
                    wraps += 1;
                    pos = 0;
                }
                let codon = genotype[pos];
                pos += 1;
                consumed += 1;
                codon as usize % alternatives.len()
            };
            stack.extend(
                alternatives[choice]
                    .symbols()
                    .iter()
                    .rev()
                    .map(|s| (s, depth + 1)),
            );
        }
        Mapping {
            phenotype: Some(out),
            effective_length: consumed,
        }
    }
}

/// Map with the default depth limit.
pub fn map_genotype(genotype: &[u8], grammar: &Grammar, max_wraps: usize) -> Mapping {
    Mapper::new(max_wraps, DEFAULT_MAX_DEPTH).map(grammar, genotype)
}
