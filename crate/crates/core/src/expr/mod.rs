//! Canonical multivariate polynomials with exact rational coefficients.
//!
//! An [`Expr`] is a sorted map from [`Monomial`] to a nonzero [`Rational`].
//! Two expressions are equal exactly when their term maps are equal, so
//! structural equality is semantic equality.

mod parse;
mod print;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::jet::VarId;

pub use parse::parse;
pub use print::ExprDisplay;

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Power product of variables, stored as `(var, exponent)` pairs sorted by
/// variable id with every exponent positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(VarId, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(smallvec::smallvec![(v, 1)])
    }

    pub fn from_exponents<I: IntoIterator<Item = (VarId, u32)>>(it: I) -> Self {
        let mut m: SmallVec<[(VarId, u32); 4]> = it.into_iter().filter(|&(_, e)| e > 0).collect();
        m.sort_unstable_by_key(|&(v, _)| v);
        let mut out: SmallVec<[(VarId, u32); 4]> = SmallVec::new();
        for (v, e) in m {
            match out.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Lowers the exponent of `v` by one. `v` must divide the monomial.
    fn without_one(&self, v: VarId) -> Monomial {
        let mut out = self.0.clone();
        let pos = out.iter().position(|&(w, _)| w == v).expect("variable not in monomial");
        if out[pos].1 == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Monomial(out)
    }

    /// Splits into the part over `vars` and the remainder.
    pub fn split(&self, vars: &BTreeSet<VarId>) -> (Monomial, Monomial) {
        let (inside, outside): (SmallVec<_>, SmallVec<_>) = self.0.iter().copied().partition(|(v, _)| vars.contains(v));
        (Monomial(inside), Monomial(outside))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent vector
    /// compared lexicographically with lower variable ids most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a.0 != b.0 {
                // The side holding the lower variable has the larger exponent there.
                return if a.0 < b.0 { Ordering::Greater } else { Ordering::Less };
            }
            match a.1.cmp(&b.1) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical polynomial over the variables of a jet space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

/// Applies a ring operation; see also the operator impls.
pub fn combine(a: &Expr, b: &Expr, op: BinOp) -> Expr {
    match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expr::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(int(n))
    }

    pub fn var(v: VarId) -> Self {
        Expr::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut e = Expr::zero();
        for (m, c) in it {
            e.add_term(m, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// `Some(c)` when the expression is a constant (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|&(v, _)| v)).collect()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, c: &Rational, m: &Monomial) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Expr {
        let mut result = Expr::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative; every other variable is held constant.
    pub fn partial(&self, v: VarId) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                out.add_term(m.without_one(v), c * int(e as i64));
            }
        }
        out
    }

    /// Simultaneous substitution of every bound variable.
    pub fn substitute(&self, bindings: &BTreeMap<VarId, Expr>) -> Result<Expr> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        for rhs in bindings.values() {
            if let Some(v) = rhs.vars().into_iter().find(|v| bindings.contains_key(v)) {
                return Err(Error::CyclicBinding(format!("{v}")));
            }
        }
        Ok(self.substitute_unchecked(bindings))
    }

    pub(crate) fn substitute_unchecked(&self, bindings: &BTreeMap<VarId, Expr>) -> Expr {
        let mut powers: BTreeMap<(VarId, u32), Expr> = BTreeMap::new();
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut kept = SmallVec::<[(VarId, u32); 4]>::new();
            let mut factor = Expr::one();
            for &(v, e) in m.factors() {
                match bindings.get(&v) {
                    Some(rhs) => {
                        let p = powers.entry((v, e)).or_insert_with(|| rhs.pow(e));
                        factor = &factor * &*p;
                    }
                    None => kept.push((v, e)),
                }
            }
            let prod = factor.mul_monomial(c, &Monomial(kept));
            out += &prod;
        }
        out
    }

    /// Groups terms by their power product over `vars`. Coefficients are free
    /// of `vars`; summing `coefficient * key` reproduces `self`.
    pub fn collect(&self, vars: &BTreeSet<VarId>) -> BTreeMap<Monomial, Expr> {
        let mut out: BTreeMap<Monomial, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside) = m.split(vars);
            out.entry(inside).or_default().add_term(outside, c.clone());
        }
        out.retain(|_, e| !e.is_zero());
        out
    }

    /// Coefficient of `v^1` and the `v`-free remainder when `self` has degree
    /// at most one in `v`.
    pub fn linear_in(&self, v: VarId) -> Option<(Expr, Expr)> {
        if self.degree_in(v) > 1 {
            return None;
        }
        let mut coeff = Expr::zero();
        let mut rest = Expr::zero();
        for (m, c) in &self.terms {
            if m.exponent(v) == 1 {
                coeff.add_term(m.without_one(v), c.clone());
            } else {
                rest.add_term(m.clone(), c.clone());
            }
        }
        Some((coeff, rest))
    }

    /// Exact rational evaluation; `None` when a variable has no value.
    pub fn eval_rational(&self, values: &BTreeMap<VarId, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let x = values.get(&v)?;
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Largest absolute coefficient as `f64`; used in diagnostics.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Expr::zero();
        for e in iter {
            acc += &e;
        }
        acc
    }
}
