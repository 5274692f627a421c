//! Symbolic products of conjugates, commutators or palindromes.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::group::{Element, Group};
use crate::words::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExprKind {
    ConjugateProduct,
    CommutatorProduct,
    PalindromeProduct,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Factor {
    /// `base^by = by⁻¹ · base · by`.
    Conjugate {
        base: Word,
        by: Word,
    },
    /// `[x, y] = x⁻¹ y⁻¹ x y`.
    Commutator {
        x: Word,
        y: Word,
    },
    Palindrome {
        word: Word,
    },
}

impl Factor {
    pub fn evaluate(&self, group: &Group) -> Result<Element> {
        match self {
            Factor::Conjugate { base, by } => group.conjugate(&group.eval(base)?, &group.eval(by)?),
            Factor::Commutator { x, y } => group.commutator(&group.eval(x)?, &group.eval(y)?),
            Factor::Palindrome { word } => group.eval(word),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Conjugate { base, by } if by.is_empty() => write!(f, "{base}"),
            Factor::Conjugate { base, by } => write!(f, "{base}^({by})"),
            Factor::Commutator { x, y } => write!(f, "[{x},{y}]"),
            Factor::Palindrome { word } => write!(f, "{word}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expression {
    pub kind: ExprKind,
    pub factors: Vec<Factor>,
}

impl Expression {
    pub fn new(kind: ExprKind) -> Self {
        Expression {
            kind,
            factors: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn push(&mut self, f: Factor) {
        self.factors.push(f);
    }

    /// Left-to-right product of the factors.
    pub fn evaluate(&self, group: &Group) -> Result<Element> {
        let mut acc = group.identity();
        for f in &self.factors {
            acc = group.multiply(&acc, &f.evaluate(group)?)?;
        }
        Ok(acc)
    }

    pub fn verify(&self, group: &Group, target: &Element) -> Result<bool> {
        Ok(self.evaluate(group)? == *target)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        let g = Group::grigorchuk();
        let w = |s: &str| Word::from_labels(s);
        let mut e = Expression::new(ExprKind::ConjugateProduct);
        assert!(e.evaluate(&g).unwrap().is_identity());
        e.push(Factor::Conjugate {
            base: w("a"),
            by: w("b"),
        });
        assert_eq!(e.evaluate(&g).unwrap(), g.eval_str("bab").unwrap());
        let c = Factor::Commutator {
            x: w("a"),
            y: w("b"),
        };
        assert_eq!(c.evaluate(&g).unwrap(), g.eval_str("abab").unwrap());
        assert_eq!(e.to_string(), "a^(b)");
    }
}
