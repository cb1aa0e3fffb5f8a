//! Vertex enumeration by the double description method.
//!
//! Works in the equality-free parametrisation `t` of the polytope. The
//! homogenised cone `{(t, s) : g·t − h·s ≤ 0, s ≥ 0}` is built row by row;
//! its extreme rays with `s > 0` are exactly the vertices. Rays are kept as
//! primitive integer vectors and adjacency is decided combinatorially from
//! their sets of tight rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{rref_in_place, Reduction};
use super::HPolytope;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub coordinates: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64).max(1)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn is_superset_of(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Bits,
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && g != BigInt::from(1) {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

/// Scales a rational row to a primitive integer row with the same sign.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    primitive(row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect())
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// All vertices of a bounded polytope, duplicate-free and sorted.
///
/// Fails with [`Error::EmptyPolytope`] when the polytope is empty and
/// [`Error::Unbounded`] when it has a nontrivial recession cone.
pub fn enumerate_vertices(poly: &HPolytope) -> Result<Vec<Vertex>> {
    let n = poly.dim();
    let reduction = Reduction::new(n, &poly.eq_matrix.to_rows(), &poly.eq_rhs)?;
    let dim = reduction.reduced_dim();

    // homogenised rows (g, -h): g·t - h·s ≤ 0
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for r in 0..poly.ineq_matrix.rows() {
        let (g, h) = reduction.reduce_inequality(poly.ineq_matrix.row(r), &poly.ineq_rhs[r]);
        if g.iter().all(Zero::is_zero) {
            if h.is_negative() {
                return Err(Error::EmptyPolytope);
            }
            continue;
        }
        let mut full = g;
        full.push(-h);
        let row = integer_row(&full);
        if !rows.contains(&row) {
            rows.push(row);
        }
    }
    let mut s_row = vec![BigInt::zero(); dim + 1];
    s_row[dim] = BigInt::from(-1);
    rows.push(s_row);

    if dim == 0 {
        return Ok(vec![Vertex { coordinates: reduction.lift(&[]) }]);
    }

    let d = dim + 1;
    let basis = independent_rows(&rows, d).ok_or(Error::Unbounded)?;
    let mut rays = initial_rays(&rows, &basis);
    let mut processed = vec![false; rows.len()];
    for &b in &basis {
        processed[b] = true;
    }

    for (idx, row) in rows.iter().enumerate() {
        if processed[idx] {
            continue;
        }
        processed[idx] = true;
        let vals: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if pos.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.zeros.set(idx);
                }
            }
            continue;
        }
        let mut created = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if (common.count() as usize) + 2 < d {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != p && k != q && r.zeros.is_superset_of(&common));
                if blocked {
                    continue;
                }
                let (ap, aq) = (&vals[p], &vals[q]);
                let v: Vec<BigInt> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(xq, xp)| ap * xq - aq * xp)
                    .collect();
                let mut zeros = common;
                zeros.set(idx);
                created.push(Ray { v: primitive(v), zeros });
            }
        }
        let mut kept = Vec::with_capacity(rays.len() - pos.len() + created.len());
        for (r, v) in rays.into_iter().zip(vals) {
            if v.is_positive() {
                continue;
            }
            let mut r = r;
            if v.is_zero() {
                r.zeros.set(idx);
            }
            kept.push(r);
        }
        kept.extend(created);
        rays = kept;
    }

    let mut vertices: Vec<Vertex> = Vec::new();
    for ray in &rays {
        let s = &ray.v[dim];
        if s.is_zero() {
            return Err(Error::Unbounded);
        }
        let t: Vec<Rational> = ray.v[..dim]
            .iter()
            .map(|x| Rational::new(x.clone(), s.clone()))
            .collect();
        vertices.push(Vertex { coordinates: reduction.lift(&t) });
    }
    if vertices.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

/// Indices of `d` linearly independent rows, if the rows have full rank.
fn independent_rows(rows: &[Vec<BigInt>], d: usize) -> Option<Vec<usize>> {
    let mut chosen = Vec::new();
    let mut echelon: Vec<Vec<Rational>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut trial = echelon.clone();
        trial.push(row.iter().map(|x| Rational::from_integer(x.clone())).collect());
        if rref_in_place(&mut trial, d).len() > echelon.len() {
            trial.truncate(echelon.len() + 1);
            echelon = trial;
            chosen.push(i);
            if chosen.len() == d {
                return Some(chosen);
            }
        }
    }
    None
}

/// Extreme rays of the simplicial cone `{x : R_B x ≤ 0}`: the columns of
/// `−R_B⁻¹`.
fn initial_rays(rows: &[Vec<BigInt>], basis: &[usize]) -> Vec<Ray> {
    let d = basis.len();
    let mut aug: Vec<Vec<Rational>> = basis
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let mut row: Vec<Rational> = rows[b].iter().map(|x| Rational::from_integer(x.clone())).collect();
            row.extend((0..d).map(|j| Rational::from_integer(BigInt::from((j == k) as i64))));
            row
        })
        .collect();
    rref_in_place(&mut aug, d);
    (0..d)
        .map(|k| {
            let col: Vec<Rational> = (0..d).map(|i| -&aug[i][d + k]).collect();
            let mut zeros = Bits::new(rows.len());
            for (j, &b) in basis.iter().enumerate() {
                if j != k {
                    zeros.set(b);
                }
            }
            Ray { v: integer_row(&col), zeros }
        })
        .collect()
}
