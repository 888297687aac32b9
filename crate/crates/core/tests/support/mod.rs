//! Independent oracles shared by the integration tests. None of these call
//! into the evaluator or metric they are used to check.

#![allow(dead_code)]

use std::collections::HashMap;

use replica_core::{InvalidReason, Operator, Token};

#[derive(Debug)]
pub enum Tree {
    Leaf(usize),
    Node(Operator, Box<Tree>, Box<Tree>),
}

/// Builds an expression tree from the front of `tokens`, returning it with
/// the remaining tokens.
pub fn build_tree(tokens: &[Token]) -> Option<(Tree, &[Token])> {
    let (first, rest) = tokens.split_first()?;
    match *first {
        Token::Operand(i) => Some((Tree::Leaf(i), rest)),
        Token::Op(op) => {
            let (lhs, rest) = build_tree(rest)?;
            let (rhs, rest) = build_tree(rest)?;
            Some((Tree::Node(op, Box::new(lhs), Box::new(rhs)), rest))
        }
    }
}

pub fn eval_tree(tree: &Tree, inputs: &[i64]) -> Result<i128, InvalidReason> {
    match tree {
        Tree::Leaf(i) => inputs.get(*i).map(|&v| v as i128).ok_or(InvalidReason::BadOperandIndex),
        Tree::Node(op, l, r) => {
            let a = eval_tree(l, inputs)?;
            let b = eval_tree(r, inputs)?;
            let v = match op {
                Operator::Add => a + b,
                Operator::Sub => a - b,
                Operator::Mul => a * b,
                Operator::Div => {
                    if b == 0 {
                        return Err(InvalidReason::DivisionByZero);
                    }
                    // i128 division truncates toward zero.
                    a / b
                }
            };
            if v > i64::MAX as i128 || v < i64::MIN as i128 {
                return Err(InvalidReason::Overflow);
            }
            Ok(v)
        }
    }
}

/// Tree-building oracle: `(value, consumed)` or the failure reason.
pub fn oracle_eval(tokens: &[Token], inputs: &[i64]) -> Result<(i64, usize), InvalidReason> {
    let (tree, rest) = build_tree(tokens).ok_or(InvalidReason::Incomplete)?;
    let v = eval_tree(&tree, inputs)?;
    Ok((v as i64, tokens.len() - rest.len()))
}

/// The 7-symbol alphabet over three inputs.
pub fn alphabet() -> Vec<Token> {
    let mut a: Vec<Token> = Operator::ALL.iter().map(|&o| Token::Op(o)).collect();
    a.extend((0..3).map(Token::Operand));
    a
}

/// Calls `f` on every token sequence of length `1..=max_len`.
pub fn for_each_sequence(max_len: usize, mut f: impl FnMut(&[Token])) {
    let alpha = alphabet();
    let mut buf = Vec::with_capacity(max_len);
    fn rec(alpha: &[Token], buf: &mut Vec<Token>, max_len: usize, f: &mut dyn FnMut(&[Token])) {
        if !buf.is_empty() {
            f(buf);
        }
        if buf.len() == max_len {
            return;
        }
        for &t in alpha {
            buf.push(t);
            rec(alpha, buf, max_len, f);
            buf.pop();
        }
    }
    rec(&alpha, &mut buf, max_len, &mut f);
}

/// Precedence-aware evaluator for infix integer expressions with
/// parentheses and left-associative `+ - * /`.
pub fn eval_infix(text: &str) -> i64 {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let v = infix_sum(&chars, &mut pos);
    assert_eq!(pos, chars.len(), "trailing input in {text}");
    v
}

fn infix_sum(c: &[char], pos: &mut usize) -> i64 {
    let mut acc = infix_product(c, pos);
    while *pos < c.len() && (c[*pos] == '+' || c[*pos] == '-') {
        let op = c[*pos];
        *pos += 1;
        let rhs = infix_product(c, pos);
        acc = if op == '+' { acc + rhs } else { acc - rhs };
    }
    acc
}

fn infix_product(c: &[char], pos: &mut usize) -> i64 {
    let mut acc = infix_atom(c, pos);
    while *pos < c.len() && (c[*pos] == '*' || c[*pos] == '/') {
        let op = c[*pos];
        *pos += 1;
        let rhs = infix_atom(c, pos);
        acc = if op == '*' { acc * rhs } else { acc / rhs };
    }
    acc
}

fn infix_atom(c: &[char], pos: &mut usize) -> i64 {
    if c[*pos] == '(' {
        *pos += 1;
        let v = infix_sum(c, pos);
        assert_eq!(c[*pos], ')');
        *pos += 1;
        return v;
    }
    let start = *pos;
    while *pos < c.len() && c[*pos].is_ascii_digit() {
        *pos += 1;
    }
    c[start..*pos].iter().collect::<String>().parse().expect("number")
}

/// Memoized recursive edit distance, straight from the definition.
pub fn levenshtein_oracle<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    fn go<T: PartialEq>(a: &[T], b: &[T], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&d) = memo.get(&(i, j)) {
            return d;
        }
        let d = if a[i] == b[j] {
            go(a, b, i + 1, j + 1, memo)
        } else {
            1 + go(a, b, i + 1, j, memo)
                .min(go(a, b, i, j + 1, memo))
                .min(go(a, b, i + 1, j + 1, memo))
        };
        memo.insert((i, j), d);
        d
    }
    go(a, b, 0, 0, &mut HashMap::new())
}
