//! Grammars shipped with the crate (see `grammars/*.bnf`).

use crate::datasets::{CircuitId, Dataset, Domain};
use crate::grammar::{parse_bnf, Grammar};

pub const SR_BASE: &str = include_str!("../grammars/sr.bnf");
pub const PARITY5: &str = include_str!("../grammars/parity5.bnf");
pub const COMPARATOR5: &str = include_str!("../grammars/comparator5.bnf");
pub const MUX11: &str = include_str!("../grammars/mux11.bnf");
pub const ALU: &str = include_str!("../grammars/alu.bnf");

/// The regression grammar with `<var>` over `x0..x{feature_count-1}` and
/// the constants.
pub fn sr_grammar(feature_count: usize) -> Grammar {
    let vars: Vec<String> = (0..feature_count).map(|i| format!("x{i}")).collect();
    let text = format!("{SR_BASE}<var> ::= {} | <const>\n", vars.join(" | "));
    parse_bnf(&text).expect("shipped grammar parses")
}

/// Gate-level grammar over `input_count` bits with one `;`-separated
/// expression per output.
pub fn circuit_grammar(input_count: usize, output_count: usize) -> Grammar {
    let start = vec!["<expr>"; output_count.max(1)].join("; ");
    let inputs: Vec<String> = (0..input_count).map(|i| format!("i{i}")).collect();
    let text = format!(
        "<start> ::= {start}\n\
         <expr> ::= (<expr> <gate> <expr>) | NOT <expr> | <in>\n\
         <gate> ::= AND | OR | XOR\n\
         <in> ::= {}\n",
        inputs.join(" | ")
    );
    parse_bnf(&text).expect("generated grammar parses")
}

pub fn builtin_circuit_text(circuit: CircuitId) -> &'static str {
    match circuit {
        CircuitId::Parity5 => PARITY5,
        CircuitId::Comparator5 => COMPARATOR5,
        CircuitId::Mux11 => MUX11,
        CircuitId::Alu => ALU,
    }
}

/// Grammar matching a dataset's shape and domain.
pub fn default_grammar(dataset: &Dataset) -> Grammar {
    match dataset.domain() {
        Domain::RealSr => sr_grammar(dataset.feature_count()),
        Domain::Circuit => circuit_grammar(dataset.feature_count(), dataset.output_count()),
    }
}
