//! Infix arithmetic phenotypes, compiled to a postfix program.
//!
//! Syntax: numbers, variables `x0`, `x1`, ..., binary `+ - * /` with the
//! usual precedence, unary minus, parentheses and the functions below.
//! Division is protected (`a / 0 = 1`). `plog(a) = ln(1 + |a|)` and
//! `psqrt(a) = sqrt(|a|)` are total; `log` and `sqrt` are not and yield
//! NaN outside their domain.

use super::FitnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Tanh,
    Exp,
    Log,
    Plog,
    Sqrt,
    Psqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "plog" => Func::Plog,
            "sqrt" => Func::Sqrt,
            "psqrt" => Func::Psqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn apply(self, a: f64) -> f64 {
        match self {
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Tan => a.tan(),
            Func::Tanh => a.tanh(),
            Func::Exp => a.exp(),
            Func::Log => a.ln(),
            Func::Plog => a.abs().ln_1p(),
            Func::Sqrt => a.sqrt(),
            Func::Psqrt => a.abs().sqrt(),
            Func::Abs => a.abs(),
        }
    }
}

/// Protected division.
pub fn pdiv(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        1.0
    } else {
        a / b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    Var(usize),
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Call(Func),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, FitnessError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse()
                .map_err(|_| FitnessError::parse(start, format!("bad number `{s}`")))?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else if "+-*/()".contains(c) {
            out.push((i, Token::Sym(c)));
            i += 1;
        } else {
            return Err(FitnessError::parse(
                i,
                format!("unexpected character `{c}`"),
            ));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
    feature_count: usize,
    program: Vec<Op>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FitnessError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(FitnessError::parse(
                self.offset(),
                format!("expected `{c}`"),
            ))
        }
    }

    fn expr(&mut self) -> Result<(), FitnessError> {
        self.term()?;
        loop {
            let op = if self.eat('+') {
                Op::Add
            } else if self.eat('-') {
                Op::Sub
            } else {
                return Ok(());
            };
            self.term()?;
            self.program.push(op);
        }
    }

    fn term(&mut self) -> Result<(), FitnessError> {
        self.unary()?;
        loop {
            let op = if self.eat('*') {
                Op::Mul
            } else if self.eat('/') {
                Op::Div
            } else {
                return Ok(());
            };
            self.unary()?;
            self.program.push(op);
        }
    }

    fn unary(&mut self) -> Result<(), FitnessError> {
        if self.eat('-') {
            self.unary()?;
            self.program.push(Op::Neg);
            Ok(())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<(), FitnessError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                self.program.push(Op::Const(v));
                Ok(())
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                self.expr()?;
                self.expect(')')
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if let Some(f) = Func::from_name(&name) {
                    self.expect('(')?;
                    self.expr()?;
                    self.expect(')')?;
                    self.program.push(Op::Call(f));
                    return Ok(());
                }
                let index = name
                    .strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| FitnessError::parse(at, format!("unknown name `{name}`")))?;
                if index >= self.feature_count {
                    return Err(FitnessError::UnknownVariable {
                        name,
                        feature_count: self.feature_count,
                    });
                }
                self.program.push(Op::Var(index));
                Ok(())
            }
            Some(t) => Err(FitnessError::parse(at, format!("unexpected {t:?}"))),
            None => Err(FitnessError::parse(at, "unexpected end of expression")),
        }
    }
}

/// A compiled SR phenotype.
#[derive(Debug, Clone, PartialEq)]
pub struct SrExpression {
    program: Vec<Op>,
    depth: usize,
}

impl SrExpression {
    pub fn parse(text: &str, feature_count: usize) -> Result<Self, FitnessError> {
        let tokens = tokenize(text)?;
        let mut p = Parser {
            tokens: &tokens,
            pos: 0,
            end: text.len(),
            feature_count,
            program: Vec::new(),
        };
        p.expr()?;
        if p.pos != tokens.len() {
            return Err(FitnessError::parse(p.offset(), "trailing input"));
        }
        let mut depth = 0usize;
        let mut max = 0;
        for op in &p.program {
            match op {
                Op::Const(_) | Op::Var(_) => depth += 1,
                Op::Add | Op::Sub | Op::Mul | Op::Div => depth -= 1,
                Op::Neg | Op::Call(_) => {}
            }
            max = max.max(depth);
        }
        Ok(SrExpression {
            program: p.program,
            depth: max,
        })
    }

    /// Value at one input vector, using `stack` as scratch space.
    pub fn eval_with(&self, x: &[f64], stack: &mut Vec<f64>) -> f64 {
        stack.clear();
        for op in &self.program {
            match *op {
                Op::Const(v) => stack.push(v),
                Op::Var(i) => stack.push(x[i]),
                Op::Neg => {
                    let a = stack.last_mut().expect("well-formed");
                    *a = -*a;
                }
                Op::Call(f) => {
                    let a = stack.last_mut().expect("well-formed");
                    *a = f.apply(*a);
                }
                Op::Add | Op::Sub | Op::Mul | Op::Div => {
                    let b = stack.pop().expect("well-formed");
                    let a = stack.last_mut().expect("well-formed");
                    *a = match op {
                        Op::Add => *a + b,
                        Op::Sub => *a - b,
                        Op::Mul => *a * b,
                        _ => pdiv(*a, b),
                    };
                }
            }
        }
        stack[0]
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_with(x, &mut Vec::with_capacity(self.depth))
    }
}
