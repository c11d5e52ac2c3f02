//! BNF grammars.
//!
//! Grammar text has one rule per logical line, `<lhs> ::= alt | alt | ...`.
//! Angle-bracketed tokens are nonterminals; every other run of characters is
//! a terminal and is kept verbatim (including inner whitespace). Only the
//! leading and trailing whitespace of each alternative is trimmed. A rule
//! continues onto the next line when the current line ends with `|` or the
//! next line starts with `|`. Lines starting with `#` are comments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("empty grammar text")]
    Empty,
    #[error("line {line}: missing `::=` definition operator")]
    MissingDefinitionOperator { line: usize },
    #[error("line {line}: malformed nonterminal `{text}`")]
    MalformedNonterminal { line: usize, text: String },
    #[error("line {line}: empty alternative in rule for <{rule}>")]
    EmptyAlternative { line: usize, rule: String },
    #[error("line {line}: rule <{rule}> is defined twice")]
    DuplicateRule { line: usize, rule: String },
    #[error("nonterminal <{0}> is used but never defined")]
    UndefinedNonterminal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Terminal(String),
    NonTerminal(String),
}

impl Symbol {
    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(t) => f.write_str(t),
            Symbol::NonTerminal(n) => write!(f, "<{n}>"),
        }
    }
}

/// One alternative on the right-hand side of a rule. Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    symbols: Vec<Symbol>,
}

impl Production {
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().filter_map(|s| match s {
            Symbol::NonTerminal(n) => Some(n.as_str()),
            Symbol::Terminal(_) => None,
        })
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A context-free grammar. Immutable once parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    axiom: String,
    /// Rule names in definition order.
    order: Vec<String>,
    rules: BTreeMap<String, Vec<Production>>,
    terminals: BTreeSet<String>,
}

impl Grammar {
    pub fn axiom(&self) -> &str {
        &self.axiom
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }

    pub fn terminals(&self) -> &BTreeSet<String> {
        &self.terminals
    }

    /// Alternatives for `nonterminal`, in textual order.
    pub fn productions(&self, nonterminal: &str) -> Option<&[Production]> {
        self.rules.get(nonterminal).map(Vec::as_slice)
    }

    pub fn alternative_count(&self, nonterminal: &str) -> usize {
        self.rules.get(nonterminal).map_or(0, Vec::len)
    }

    /// Minimum derivation-tree depth needed to fully expand each
    /// nonterminal, counting nonterminal levels (a rule with an all-terminal
    /// alternative has depth 1). `None` marks unproductive nonterminals.
    pub fn min_depths(&self) -> BTreeMap<String, Option<usize>> {
        let mut depth: BTreeMap<String, Option<usize>> =
            self.order.iter().map(|n| (n.clone(), None)).collect();
        loop {
            let mut changed = false;
            for nt in &self.order {
                let best = self.rules[nt]
                    .iter()
                    .filter_map(|p| production_depth(p, &depth))
                    .min();
                if best.is_some() && best < depth[nt].or(Some(usize::MAX)) {
                    depth.insert(nt.clone(), best);
                    changed = true;
                }
            }
            if !changed {
                return depth;
            }
        }
    }

    /// Nonterminals that can derive themselves.
    pub fn recursive_nonterminals(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for start in &self.order {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&str> = self.rules[start]
                .iter()
                .flat_map(Production::nonterminals)
                .collect();
            while let Some(nt) = stack.pop() {
                if nt == start {
                    out.insert(start.clone());
                    break;
                }
                if seen.insert(nt) {
                    stack.extend(self.rules[nt].iter().flat_map(Production::nonterminals));
                }
            }
        }
        out
    }
}

/// Depth a production needs given the current per-nonterminal depths.
pub(crate) fn production_depth(
    p: &Production,
    depth: &BTreeMap<String, Option<usize>>,
) -> Option<usize> {
    let mut deepest = 0;
    for nt in p.nonterminals() {
        deepest = deepest.max(depth.get(nt).copied().flatten()?);
    }
    Some(deepest + 1)
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for nt in &self.order {
            write!(f, "<{nt}> ::=")?;
            for (i, p) in self.rules[nt].iter().enumerate() {
                if i > 0 {
                    f.write_str(" |")?;
                }
                write!(f, " {p}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Grammar {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_bnf(s)
    }
}

/// Parse BNF text into a [`Grammar`]. The first rule's left-hand side is the
/// axiom.
pub fn parse_bnf(text: &str) -> Result<Grammar, GrammarError> {
    let mut order = Vec::new();
    let mut rules: BTreeMap<String, Vec<Production>> = BTreeMap::new();
    let mut terminals = BTreeSet::new();
    let mut used: Vec<String> = Vec::new();

    for (line, logical) in logical_lines(text) {
        let Some((lhs, rhs)) = logical.split_once("::=") else {
            return Err(GrammarError::MissingDefinitionOperator { line });
        };
        let name = parse_lhs(lhs.trim(), line)?;
        if rules.contains_key(&name) {
            return Err(GrammarError::DuplicateRule { line, rule: name });
        }
        let mut alternatives = Vec::new();
        for alt in rhs.split('|') {
            let alt = alt.trim();
            if alt.is_empty() {
                return Err(GrammarError::EmptyAlternative { line, rule: name });
            }
            let symbols = tokenize(alt, line)?;
            for s in &symbols {
                match s {
                    Symbol::Terminal(t) => {
                        terminals.insert(t.clone());
                    }
                    Symbol::NonTerminal(n) => used.push(n.clone()),
                }
            }
            alternatives.push(Production { symbols });
        }
        order.push(name.clone());
        rules.insert(name, alternatives);
    }

    let Some(axiom) = order.first().cloned() else {
        return Err(GrammarError::Empty);
    };
    if let Some(missing) = used.into_iter().find(|n| !rules.contains_key(n)) {
        return Err(GrammarError::UndefinedNonterminal(missing));
    }
    Ok(Grammar {
        axiom,
        order,
        rules,
        terminals,
    })
}

/// Join continuation lines and drop comments/blank lines. Yields the
/// 1-based number of the line each logical rule starts on.
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    let mut open = false;
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match out.last_mut() {
            Some((_, cur)) if open || trimmed.starts_with('|') => {
                cur.push(' ');
                cur.push_str(trimmed);
            }
            _ => out.push((i + 1, trimmed.to_string())),
        }
        open = trimmed.ends_with('|');
    }
    out
}

fn parse_lhs(lhs: &str, line: usize) -> Result<String, GrammarError> {
    let inner = lhs
        .strip_prefix('<')
        .and_then(|s| s.strip_suffix('>'))
        .filter(|s| valid_name(s));
    inner
        .map(str::to_string)
        .ok_or_else(|| GrammarError::MalformedNonterminal {
            line,
            text: lhs.to_string(),
        })
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains(['<', '>']) && !s.chars().any(char::is_whitespace)
}

fn tokenize(alt: &str, line: usize) -> Result<Vec<Symbol>, GrammarError> {
    let mut symbols = Vec::new();
    let mut rest = alt;
    while !rest.is_empty() {
        // A `<` opens a nonterminal only when a well-formed name follows;
        // otherwise it is ordinary terminal text (e.g. a `<` operator).
        let nt = rest.strip_prefix('<').and_then(|tail| {
            let end = tail.find('>')?;
            valid_name(&tail[..end]).then(|| (&tail[..end], &tail[end + 1..]))
        });
        match nt {
            Some((name, tail)) => {
                symbols.push(Symbol::NonTerminal(name.to_string()));
                rest = tail;
            }
            None => {
                let skip = rest.chars().next().map_or(0, char::len_utf8);
                let end = rest[skip..].find('<').map_or(rest.len(), |i| i + skip);
                match symbols.last_mut() {
                    Some(Symbol::Terminal(t)) => t.push_str(&rest[..end]),
                    _ => symbols.push(Symbol::Terminal(rest[..end].to_string())),
                }
                rest = &rest[end..];
            }
        }
    }
    if symbols.is_empty() {
        return Err(GrammarError::EmptyAlternative {
            line,
            rule: String::new(),
        });
    }
    Ok(symbols)
}
