//! Boolean circuit phenotypes: one expression per output bit, separated by
//! `;`. Inputs are `i0`, `i1`, ...; constants `0` and `1`; gates `NOT`,
//! `AND`, `XOR`, `OR` from tightest to loosest binding (also `!`/`~`, `&`,
//! `^`, `|`), left-associative, with parentheses.

use super::FitnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gate {
    Input(usize),
    Const(bool),
    Not,
    And,
    Xor,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Input(usize),
    Const(bool),
    Not,
    And,
    Xor,
    Or,
    Open,
    Close,
}

fn tokenize(text: &str, input_count: usize) -> Result<Vec<(usize, Token)>, FitnessError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let token = match c {
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Token::Open,
            ')' => Token::Close,
            '!' | '~' => Token::Not,
            '&' => Token::And,
            '^' => Token::Xor,
            '|' => Token::Or,
            '0' => Token::Const(false),
            '1' => Token::Const(true),
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &text[start..i];
                let token = match word.to_ascii_uppercase().as_str() {
                    "NOT" => Token::Not,
                    "AND" => Token::And,
                    "XOR" => Token::Xor,
                    "OR" => Token::Or,
                    _ => {
                        let index = word
                            .strip_prefix('i')
                            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                            .and_then(|d| d.parse::<usize>().ok())
                            .ok_or_else(|| {
                                FitnessError::parse(start, format!("unknown word `{word}`"))
                            })?;
                        if index >= input_count {
                            return Err(FitnessError::UnknownInputBit {
                                name: word.to_string(),
                                input_count,
                            });
                        }
                        Token::Input(index)
                    }
                };
                out.push((start, token));
                continue;
            }
            other => {
                return Err(FitnessError::parse(
                    start,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push((start, token));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    base: usize,
    end: usize,
    program: Vec<Gate>,
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.base + self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.tokens.get(self.pos).map(|(_, x)| x) == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn binary(
        &mut self,
        token: Token,
        gate: Gate,
        next: fn(&mut Self) -> Result<(), FitnessError>,
    ) -> Result<(), FitnessError> {
        next(self)?;
        while self.eat(&token) {
            next(self)?;
            self.program.push(gate);
        }
        Ok(())
    }

    fn or(&mut self) -> Result<(), FitnessError> {
        self.binary(Token::Or, Gate::Or, Self::xor)
    }

    fn xor(&mut self) -> Result<(), FitnessError> {
        self.binary(Token::Xor, Gate::Xor, Self::and)
    }

    fn and(&mut self) -> Result<(), FitnessError> {
        self.binary(Token::And, Gate::And, Self::not)
    }

    fn not(&mut self) -> Result<(), FitnessError> {
        if self.eat(&Token::Not) {
            self.not()?;
            self.program.push(Gate::Not);
            return Ok(());
        }
        let at = self.offset();
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Token::Input(i)) => {
                self.pos += 1;
                self.program.push(Gate::Input(i));
                Ok(())
            }
            Some(Token::Const(b)) => {
                self.pos += 1;
                self.program.push(Gate::Const(b));
                Ok(())
            }
            Some(Token::Open) => {
                self.pos += 1;
                self.or()?;
                if self.eat(&Token::Close) {
                    Ok(())
                } else {
                    Err(FitnessError::parse(self.offset(), "expected `)`"))
                }
            }
            Some(t) => Err(FitnessError::parse(at, format!("unexpected {t:?}"))),
            None => Err(FitnessError::parse(at, "unexpected end of expression")),
        }
    }
}

/// A compiled multi-output circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitExpression {
    outputs: Vec<Vec<Gate>>,
    input_count: usize,
}

impl CircuitExpression {
    pub fn parse(text: &str, input_count: usize) -> Result<Self, FitnessError> {
        let mut outputs = Vec::new();
        let mut base = 0;
        for part in text.split(';') {
            let tokens = tokenize(part, input_count).map_err(|e| e.shifted(base))?;
            let mut p = Parser {
                tokens: &tokens,
                pos: 0,
                base,
                end: part.len(),
                program: Vec::new(),
            };
            p.or()?;
            if p.pos != tokens.len() {
                return Err(FitnessError::parse(p.offset(), "trailing input"));
            }
            outputs.push(p.program);
            base += part.len() + 1;
        }
        Ok(CircuitExpression {
            outputs,
            input_count,
        })
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    /// Output bits for one input row, using `stack` as scratch space.
    pub fn eval_row_with(&self, inputs: &[bool], stack: &mut Vec<bool>) -> Vec<bool> {
        self.outputs
            .iter()
            .map(|program| {
                stack.clear();
                for gate in program {
                    match *gate {
                        Gate::Input(i) => stack.push(inputs[i]),
                        Gate::Const(b) => stack.push(b),
                        Gate::Not => {
                            let a = stack.last_mut().expect("well-formed");
                            *a = !*a;
                        }
                        Gate::And | Gate::Xor | Gate::Or => {
                            let b = stack.pop().expect("well-formed");
                            let a = stack.last_mut().expect("well-formed");
                            *a = match gate {
                                Gate::And => *a & b,
                                Gate::Xor => *a ^ b,
                                _ => *a | b,
                            };
                        }
                    }
                }
                stack[0]
            })
            .collect()
    }

    pub fn eval_row(&self, inputs: &[bool]) -> Vec<bool> {
        self.eval_row_with(inputs, &mut Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(bits: &str) -> Vec<bool> {
        bits.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn precedence() {
        // NOT > AND > XOR > OR
        let c = CircuitExpression::parse("i0 OR i1 AND i2", 3).unwrap();
        assert_eq!(c.eval_row(&row("100")), [true]);
        assert_eq!(c.eval_row(&row("010")), [false]);
        let c = CircuitExpression::parse("NOT i0 AND i1", 2).unwrap();
        assert_eq!(c.eval_row(&row("01")), [true]);
        assert_eq!(c.eval_row(&row("11")), [false]);
        let c = CircuitExpression::parse("i0 XOR i1 AND i2", 3).unwrap();
        assert_eq!(c.eval_row(&row("111")), [false]);
        assert_eq!(c.eval_row(&row("110")), [true]);
        let c = CircuitExpression::parse("i0 XOR i1 OR i2", 3).unwrap();
        assert_eq!(c.eval_row(&row("110")), [false]);
    }

    #[test]
    fn symbols_and_multiple_outputs() {
        let c = CircuitExpression::parse("~(i0 & i1); i0 ^ 1 ; (i0|i1)", 2).unwrap();
        assert_eq!(c.output_count(), 3);
        assert_eq!(c.eval_row(&row("10")), [true, false, true]);
        assert_eq!(c.eval_row(&row("11")), [false, false, true]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            CircuitExpression::parse("i0 AND i9", 5),
            Err(FitnessError::UnknownInputBit { .. })
        ));
        for bad in [
            "", "i0 AND", "(i0", "i0 i1", "i0; ", "NAND i0", "i", "i0 + i1",
        ] {
            assert!(
                matches!(
                    CircuitExpression::parse(bad, 5),
                    Err(FitnessError::PhenotypeParse { .. })
                ),
                "{bad}"
            );
        }
    }

    #[test]
    fn error_offsets_span_outputs() {
        match CircuitExpression::parse("i0; i1 )", 2) {
            Err(FitnessError::PhenotypeParse { offset, .. }) => assert_eq!(offset, 7),
            other => panic!("{other:?}"),
        }
    }
}
