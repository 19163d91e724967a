use std::fmt;

use num_traits::{One, Signed};

use super::Expr;
use crate::jet::JetSpace;

/// Renders an expression in the parser's grammar, highest monomial first.
pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    space: &'a JetSpace,
}

impl Expr {
    pub fn display<'a>(&'a self, space: &'a JetSpace) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, space }
    }

    pub fn to_string_in(&self, space: &JetSpace) -> String {
        self.display(space).to_string()
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.expr.terms().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if m.is_one() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            for (k, &(v, e)) in m.factors().iter().enumerate() {
                if k > 0 {
                    f.write_str("*")?;
                }
                f.write_str(&self.space.name(v))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
