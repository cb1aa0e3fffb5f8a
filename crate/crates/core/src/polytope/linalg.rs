//! Exact Gaussian elimination and affine parametrisation of equality systems.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Reduced row echelon form of `rows`, in place. Returns pivot columns.
///
/// Only the first `cols` columns are eligible as pivots, so an augmented
/// right-hand side can ride along in the trailing columns.
pub fn rref_in_place(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut m = rows.to_vec();
    rref_in_place(&mut m, cols).len()
}

/// Solution set of `C x = d` written as `x_P = d' − M x_F`, with `x_F` free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub n: usize,
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
    /// `|P| × |F|` coefficients.
    pub m: Vec<Vec<Rational>>,
    pub d: Vec<Rational>,
}

impl Reduction {
    /// Fails with [`Error::EmptyPolytope`] if the system is inconsistent.
    pub fn new(n: usize, eq_rows: &[Vec<Rational>], eq_rhs: &[Rational]) -> Result<Self> {
        let mut aug: Vec<Vec<Rational>> = eq_rows
            .iter()
            .zip(eq_rhs)
            .map(|(r, b)| {
                let mut row = r.clone();
                row.push(b.clone());
                row
            })
            .collect();
        let pivots = rref_in_place(&mut aug, n);
        if aug[pivots.len()..].iter().any(|row| !row[n].is_zero()) {
            return Err(Error::EmptyPolytope);
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let m = (0..pivots.len())
            .map(|i| free.iter().map(|&f| aug[i][f].clone()).collect())
            .collect();
        let d = (0..pivots.len()).map(|i| aug[i][n].clone()).collect();
        Ok(Self { n, pivots, free, m, d })
    }

    pub fn reduced_dim(&self) -> usize {
        self.free.len()
    }

    /// Full point from free coordinates.
    pub fn lift(&self, t: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (&f, v) in self.free.iter().zip(t) {
            x[f] = v.clone();
        }
        for (i, &p) in self.pivots.iter().enumerate() {
            let mut v = self.d[i].clone();
            for (coef, tv) in self.m[i].iter().zip(t) {
                if !coef.is_zero() && !tv.is_zero() {
                    v -= coef * tv;
                }
            }
            x[p] = v;
        }
        x
    }

    /// Substitutes the parametrisation into `a·x ≤ b`, giving `g·t ≤ h`.
    pub fn reduce_inequality(&self, a: &[Rational], b: &Rational) -> (Vec<Rational>, Rational) {
        let mut g: Vec<Rational> = self.free.iter().map(|&f| a[f].clone()).collect();
        let mut h = b.clone();
        for (i, &p) in self.pivots.iter().enumerate() {
            let ap = &a[p];
            if ap.is_zero() {
                continue;
            }
            h -= ap * &self.d[i];
            for (gj, mj) in g.iter_mut().zip(&self.m[i]) {
                if !mj.is_zero() {
                    *gj -= ap * mj;
                }
            }
        }
        (g, h)
    }
}
