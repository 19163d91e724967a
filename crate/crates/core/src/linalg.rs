//! Exact sparse linear algebra over the rationals.
//!
//! Rows are scaled to primitive integer vectors and eliminated with
//! fraction-free row operations (`r <- a*r - b*p`, then divided by the row
//! content), so no rational arithmetic happens inside the elimination loop.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::expr::Rational;

/// Sparse row: `(column, value)` pairs, columns strictly increasing.
pub type SparseRow = Vec<(usize, Rational)>;

#[derive(Debug, Clone, PartialEq, Eq)]
struct IntRow(Vec<(usize, BigInt)>);

impl IntRow {
    fn from_rational(row: &[(usize, Rational)]) -> IntRow {
        let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
        let mut entries: Vec<(usize, BigInt)> = row
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
            .collect();
        entries.sort_by_key(|(c, _)| *c);
        let mut r = IntRow(entries);
        r.normalize();
        r
    }

    fn get(&self, col: usize) -> Option<&BigInt> {
        self.0.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &self.0[i].1)
    }

    fn lead(&self) -> Option<usize> {
        self.0.first().map(|(c, _)| *c)
    }

    /// Divides out the content and makes the leading entry positive.
    fn normalize(&mut self) {
        let g = self.0.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
        let neg = self.0.first().is_some_and(|(_, v)| v.is_negative());
        if g.is_zero() {
            return;
        }
        let g = if neg { -g } else { g };
        if !g.is_one() {
            for (_, v) in &mut self.0 {
                *v = &*v / &g;
            }
        }
    }

    /// `self <- a*self - b*other`, eliminating column `col`.
    fn eliminate(&mut self, other: &IntRow, col: usize) {
        let Some(b) = self.get(col).cloned() else { return };
        let a = other.get(col).expect("pivot entry").clone();
        let g = a.gcd(&b);
        let (a, b) = (&a / &g, &b / &g);
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        let (x, y) = (&self.0, &other.0);
        while i < x.len() || j < y.len() {
            let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
            let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
            let (c, v) = if take_x {
                i += 1;
                (x[i - 1].0, &a * &x[i - 1].1)
            } else if take_y {
                j += 1;
                (y[j - 1].0, -(&b * &y[j - 1].1))
            } else {
                i += 1;
                j += 1;
                (x[i - 1].0, &a * &x[i - 1].1 - &b * &y[j - 1].1)
            };
            if !v.is_zero() {
                out.push((c, v));
            }
        }
        self.0 = out;
        self.normalize();
    }
}

/// Reduced row echelon form, maintained incrementally.
#[derive(Debug, Clone, Default)]
pub struct Rref {
    ncols: usize,
    /// Pivot rows sorted by pivot column; each has zeros in every other
    /// pivot column.
    rows: Vec<IntRow>,
}

impl Rref {
    pub fn new(ncols: usize) -> Self {
        Rref { ncols, rows: Vec::new() }
    }

    pub fn from_rows(ncols: usize, rows: &[SparseRow]) -> Self {
        let mut r = Rref::new(ncols);
        for row in rows {
            r.push(row);
        }
        r
    }

    /// Adds a row; returns `true` if it raised the rank.
    pub fn push(&mut self, row: &[(usize, Rational)]) -> bool {
        debug_assert!(row.iter().all(|(c, _)| *c < self.ncols));
        let mut r = IntRow::from_rational(row);
        for p in &self.rows {
            let c = p.lead().expect("pivot rows are nonzero");
            r.eliminate(p, c);
        }
        let Some(lead) = r.lead() else { return false };
        for p in &mut self.rows {
            p.eliminate(&r, lead);
        }
        let at = self.rows.partition_point(|p| p.lead() < Some(lead));
        self.rows.insert(at, r);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().filter_map(IntRow::lead).collect()
    }

    /// Rows scaled so every pivot entry is 1, in pivot order.
    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.rows
            .iter()
            .map(|r| {
                let pivot = r.0[0].1.clone();
                let mut dense = vec![Rational::zero(); self.ncols];
                for (c, v) in &r.0 {
                    dense[*c] = Rational::new(v.clone(), pivot.clone());
                }
                dense
            })
            .collect()
    }

    /// Basis of the nullspace, one vector per free column in column order,
    /// each scaled so its first nonzero entry is 1.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let pivots = self.pivots();
        let mut free = vec![true; self.ncols];
        for &p in &pivots {
            free[p] = false;
        }
        (0..self.ncols)
            .filter(|&f| free[f])
            .map(|f| {
                let mut x = vec![Rational::zero(); self.ncols];
                x[f] = Rational::one();
                for r in &self.rows {
                    if let Some(v) = r.get(f) {
                        let (c, p) = &r.0[0];
                        x[*c] = -Rational::new(v.clone(), p.clone());
                    }
                }
                normalize_leading(&mut x);
                x
            })
            .collect()
    }
}

fn normalize_leading(x: &mut [Rational]) {
    if let Some(lead) = x.iter().find(|v| !v.is_zero()).cloned() {
        if !lead.is_one() {
            for v in x.iter_mut() {
                *v = &*v / &lead;
            }
        }
    }
}

/// Nullspace basis of the matrix with the given sparse rows.
pub fn nullspace(ncols: usize, rows: &[SparseRow]) -> Vec<Vec<Rational>> {
    Rref::from_rows(ncols, rows).nullspace()
}

pub fn to_sparse(dense: &[Rational]) -> SparseRow {
    dense.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect()
}

/// Solves `A x = b` exactly; `None` when inconsistent. Free variables are 0.
pub fn solve_particular(ncols: usize, rows: &[SparseRow], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let aug: Vec<SparseRow> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            if !b.is_zero() {
                r.push((ncols, b.clone()));
            }
            r
        })
        .collect();
    let rref = Rref::from_rows(ncols + 1, &aug);
    if rref.pivots().contains(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for row in rref.rows() {
        let p = row.iter().position(|v| !v.is_zero()).expect("nonzero row");
        x[p] = row[ncols].clone();
    }
    Some(x)
}
