//! Genomes as token sequences and their evaluation as prefix arithmetic.
//!
//! A genome is read operator-first: an operand token yields the bound input
//! value, an operator token consumes the next two subexpressions. Evaluation
//! stops at the end of the first complete expression; anything after it is
//! carried along but ignored. Operands are stored as indices into
//! [`Environment::inputs`], so swapping the environment rebinds every genome
//! without touching it.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Binary arithmetic operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    Add,
    Sub,
    Mul,
    Div,
}

impl Operator {
    pub const ALL: [Operator; 4] = [Operator::Add, Operator::Sub, Operator::Mul, Operator::Div];

    pub fn symbol(self) -> char {
        match self {
            Operator::Add => '+',
            Operator::Sub => '-',
            Operator::Mul => '*',
            Operator::Div => '/',
        }
    }

    pub fn from_symbol(s: &str) -> Option<Operator> {
        match s {
            "+" => Some(Operator::Add),
            "-" => Some(Operator::Sub),
            "*" => Some(Operator::Mul),
            "/" => Some(Operator::Div),
            _ => None,
        }
    }

    /// Applies the operator with checked arithmetic. Division truncates
    /// toward zero.
    pub fn apply(self, lhs: i64, rhs: i64) -> Result<i64, InvalidReason> {
        match self {
            Operator::Add => lhs.checked_add(rhs).ok_or(InvalidReason::Overflow),
            Operator::Sub => lhs.checked_sub(rhs).ok_or(InvalidReason::Overflow),
            Operator::Mul => lhs.checked_mul(rhs).ok_or(InvalidReason::Overflow),
            Operator::Div => {
                if rhs == 0 {
                    Err(InvalidReason::DivisionByZero)
                } else {
                    lhs.checked_div(rhs).ok_or(InvalidReason::Overflow)
                }
            }
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// One genome element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Token {
    Op(Operator),
    /// Position into the environment's input vector.
    Operand(usize),
}

impl Token {
    /// Draws a fresh token: operator or operand with probability 1/2 each,
    /// then a uniform choice within the kind.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_inputs: usize) -> Token {
        if rng.gen_bool(0.5) {
            Token::Op(Operator::ALL[rng.gen_range(0..Operator::ALL.len())])
        } else {
            Token::Operand(rng.gen_range(0..n_inputs))
        }
    }
}

/// A non-empty, variable-length token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Token>", into = "Vec<Token>")]
pub struct Genome(Vec<Token>);

impl Genome {
    pub fn new(tokens: Vec<Token>) -> Result<Genome, ExprError> {
        if tokens.is_empty() {
            return Err(ExprError::EmptyGenome);
        }
        Ok(Genome(tokens))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.0
    }

    pub(crate) fn tokens_mut(&mut self) -> &mut [Token] {
        &mut self.0
    }
}

impl TryFrom<Vec<Token>> for Genome {
    type Error = ExprError;

    fn try_from(tokens: Vec<Token>) -> Result<Self, Self::Error> {
        Genome::new(tokens)
    }
}

impl From<Genome> for Vec<Token> {
    fn from(g: Genome) -> Self {
        g.0
    }
}

/// The operand set and the desired output.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Environment {
    inputs: Vec<i64>,
    target: i64,
}

impl Environment {
    pub fn new(inputs: Vec<i64>, target: i64) -> Result<Environment, ExprError> {
        if inputs.is_empty() {
            return Err(ExprError::EmptyInputs);
        }
        Ok(Environment { inputs, target })
    }

    pub fn inputs(&self) -> &[i64] {
        &self.inputs
    }

    pub fn target(&self) -> i64 {
        self.target
    }

    pub fn with_target(&self, target: i64) -> Environment {
        Environment {
            inputs: self.inputs.clone(),
            target,
        }
    }

    pub fn with_inputs(&self, inputs: Vec<i64>) -> Result<Environment, ExprError> {
        Environment::new(inputs, self.target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvalidReason {
    /// Tokens ran out before the expression was complete.
    Incomplete,
    DivisionByZero,
    BadOperandIndex,
    /// An intermediate value left the 64-bit range.
    Overflow,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InvalidReason::Incomplete => "Incomplete",
            InvalidReason::DivisionByZero => "DivisionByZero",
            InvalidReason::BadOperandIndex => "BadOperandIndex",
            InvalidReason::Overflow => "Overflow",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalResult {
    Valid { value: i64, consumed: usize },
    Invalid(InvalidReason),
}

impl EvalResult {
    pub fn value(&self) -> Option<i64> {
        match *self {
            EvalResult::Valid { value, .. } => Some(value),
            EvalResult::Invalid(_) => None,
        }
    }
}

/// Error fitness. Lower is better; the derived order ranks every
/// `Finite` value ahead of `Worst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Fitness {
    Finite(u64),
    Worst,
}

impl Fitness {
    pub const OPTIMAL: Fitness = Fitness::Finite(0);

    pub fn is_optimal(self) -> bool {
        self == Fitness::OPTIMAL
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Fitness::Finite(e) => Some(e),
            Fitness::Worst => None,
        }
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fitness::Finite(e) => write!(f, "{e}"),
            Fitness::Worst => f.write_str("INF"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("genome must contain at least one token")]
    EmptyGenome,
    #[error("environment must have at least one input")]
    EmptyInputs,
    #[error("empty genome text")]
    EmptyText,
    #[error("unknown token `{token}` at position {position}")]
    UnknownToken { token: String, position: usize },
    #[error("operand `{value}` at position {position} is not one of the inputs")]
    UnboundOperand { value: i64, position: usize },
    #[error("operand index {index} at position {position} is out of range")]
    BadOperandIndex { index: usize, position: usize },
    #[error("genome does not evaluate: {0}")]
    Invalid(InvalidReason),
}

/// Evaluates the genome as a prefix expression starting at token 0.
///
/// An incomplete expression is reported as such even if it would also
/// divide by zero or overflow; arithmetic faults are reported in
/// left-to-right order.
pub fn evaluate(genome: &Genome, env: &Environment) -> EvalResult {
    let Some(consumed) = expression_len(genome.tokens()) else {
        return EvalResult::Invalid(InvalidReason::Incomplete);
    };
    let mut cursor = 0;
    match eval_at(&genome.tokens()[..consumed], env.inputs(), &mut cursor) {
        Ok(value) => EvalResult::Valid { value, consumed },
        Err(reason) => EvalResult::Invalid(reason),
    }
}

/// Length of the first complete prefix expression, if there is one.
pub fn expression_len(tokens: &[Token]) -> Option<usize> {
    let mut open = 1usize;
    for (i, t) in tokens.iter().enumerate() {
        match t {
            Token::Op(_) => open += 1,
            Token::Operand(_) => open -= 1,
        }
        if open == 0 {
            return Some(i + 1);
        }
    }
    None
}

fn eval_at(tokens: &[Token], inputs: &[i64], cursor: &mut usize) -> Result<i64, InvalidReason> {
    let token = tokens[*cursor];
    *cursor += 1;
    match token {
        Token::Operand(i) => inputs.get(i).copied().ok_or(InvalidReason::BadOperandIndex),
        Token::Op(op) => {
            let lhs = eval_at(tokens, inputs, cursor)?;
            let rhs = eval_at(tokens, inputs, cursor)?;
            op.apply(lhs, rhs)
        }
    }
}

/// `|target - value|`, or `Worst` for any invalid genome.
pub fn fitness(genome: &Genome, env: &Environment) -> Fitness {
    match evaluate(genome, env) {
        EvalResult::Valid { value, .. } => Fitness::Finite(value.abs_diff(env.target())),
        EvalResult::Invalid(_) => Fitness::Worst,
    }
}

/// Parses whitespace-separated tokens. Integers bind to the first input
/// position that holds the same value.
pub fn parse_genome(text: &str, env: &Environment) -> Result<Genome, ExprError> {
    let mut tokens = Vec::new();
    for (position, raw) in text.split_whitespace().enumerate() {
        if let Some(op) = Operator::from_symbol(raw) {
            tokens.push(Token::Op(op));
            continue;
        }
        let value: i64 = raw.parse().map_err(|_| ExprError::UnknownToken {
            token: raw.to_string(),
            position,
        })?;
        let index = env
            .inputs()
            .iter()
            .position(|&v| v == value)
            .ok_or(ExprError::UnboundOperand { value, position })?;
        tokens.push(Token::Operand(index));
    }
    if tokens.is_empty() {
        return Err(ExprError::EmptyText);
    }
    Genome::new(tokens)
}

fn bound_value(env: &Environment, index: usize, position: usize) -> Result<i64, ExprError> {
    env.inputs()
        .get(index)
        .copied()
        .ok_or(ExprError::BadOperandIndex { index, position })
}

/// Renders every token, operands as their bound values, separated by
/// single spaces.
pub fn render_prefix(genome: &Genome, env: &Environment) -> Result<String, ExprError> {
    let mut parts = Vec::with_capacity(genome.len());
    for (position, token) in genome.tokens().iter().enumerate() {
        match *token {
            Token::Op(op) => parts.push(op.symbol().to_string()),
            Token::Operand(i) => parts.push(bound_value(env, i, position)?.to_string()),
        }
    }
    Ok(parts.join(" "))
}

/// Fully parenthesized infix form of the consumed expression, without the
/// outermost pair of parentheses.
pub fn render_infix(genome: &Genome, env: &Environment) -> Result<String, ExprError> {
    if let EvalResult::Invalid(reason) = evaluate(genome, env) {
        return Err(ExprError::Invalid(reason));
    }
    let mut cursor = 0;
    let (text, _) = infix_at(genome.tokens(), env, &mut cursor)?;
    Ok(text)
}

// Returns the rendered subexpression and whether it is compound.
fn infix_at(tokens: &[Token], env: &Environment, cursor: &mut usize) -> Result<(String, bool), ExprError> {
    let position = *cursor;
    let token = tokens[position];
    *cursor += 1;
    match token {
        Token::Operand(i) => {
            let v = bound_value(env, i, position)?;
            // Negative literals are parenthesized like subexpressions.
            Ok((v.to_string(), v < 0))
        }
        Token::Op(op) => {
            let lhs = wrap(infix_at(tokens, env, cursor)?);
            let rhs = wrap(infix_at(tokens, env, cursor)?);
            Ok((format!("{lhs}{op}{rhs}"), true))
        }
    }
}

fn wrap((text, compound): (String, bool)) -> String {
    if compound {
        format!("({text})")
    } else {
        text
    }
}

/// Uniform length in `[1, d_init]`, tokens drawn independently.
/// Validity is not enforced.
pub fn random_genome<R: Rng + ?Sized>(rng: &mut R, env: &Environment, d_init: usize) -> Genome {
    assert!(d_init >= 1, "d_init must be positive");
    let len = rng.gen_range(1..=d_init);
    let n = env.inputs().len();
    Genome((0..len).map(|_| Token::random(rng, n)).collect())
}
