//! Exact two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! [`PreparedLp`] runs phase I once and keeps the feasible tableau, so a
//! sequence of objectives over the same polytope warm-starts from the last
//! optimal basis.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::HPolytope;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub witness: Option<Vec<Rational>>,
}

impl LpResult {
    fn infeasible() -> Self {
        Self { status: LpStatus::Infeasible, value: None, witness: None }
    }

    fn unbounded() -> Self {
        Self { status: LpStatus::Unbounded, value: None, witness: None }
    }

    /// Optimal value, or the status as an error.
    pub fn optimum(&self) -> Result<Rational> {
        match self.status {
            LpStatus::Optimal => Ok(self.value.clone().unwrap_or_default()),
            LpStatus::Infeasible => Err(Error::Infeasible),
            LpStatus::Unbounded => Err(Error::Unbounded),
        }
    }
}

/// Optimises `objective · x` over `poly`.
pub fn solve_lp(poly: &HPolytope, objective: &[Rational], sense: Sense) -> LpResult {
    match PreparedLp::new(poly) {
        Ok(mut lp) => lp.solve(objective, sense),
        Err(_) => LpResult::infeasible(),
    }
}

/// Structural column: original variable index and whether it carries the
/// negative part of a free variable.
#[derive(Debug, Clone, Copy)]
struct Structural {
    var: usize,
    negative: bool,
}

/// A feasible simplex tableau for one polytope.
#[derive(Debug, Clone)]
pub struct PreparedLp {
    n: usize,
    structural: Vec<Structural>,
    ncols: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

struct PendingRow {
    coeffs: Vec<Rational>,
    slack: Option<usize>,
    rhs: Rational,
}

impl PreparedLp {
    /// Builds the standard form and runs phase I. Fails with
    /// [`Error::Infeasible`] when the polytope is empty.
    pub fn new(poly: &HPolytope) -> Result<Self> {
        let n = poly.dim();
        let g = &poly.ineq_matrix;

        // rows of the form -α x_i ≤ 0 become sign constraints
        let mut nonneg = vec![false; n];
        let mut sign_row = vec![false; g.rows()];
        for r in 0..g.rows() {
            if !poly.ineq_rhs[r].is_zero() {
                continue;
            }
            let mut nz = g.row(r).iter().enumerate().filter(|(_, v)| !v.is_zero());
            if let (Some((i, v)), None) = (nz.next(), nz.next()) {
                if v.is_negative() {
                    nonneg[i] = true;
                    sign_row[r] = true;
                }
            }
        }
        let mut structural = Vec::with_capacity(2 * n);
        for (var, &nn) in nonneg.iter().enumerate() {
            structural.push(Structural { var, negative: false });
            if !nn {
                structural.push(Structural { var, negative: true });
            }
        }
        let ns = structural.len();
        let expand = |row: &[Rational]| -> Vec<Rational> {
            structural
                .iter()
                .map(|s| if s.negative { -&row[s.var] } else { row[s.var].clone() })
                .collect()
        };

        let mut pending = Vec::new();
        let mut nslack = 0;
        for r in 0..g.rows() {
            if sign_row[r] {
                continue;
            }
            let coeffs = expand(g.row(r));
            if coeffs.iter().all(Zero::is_zero) {
                if poly.ineq_rhs[r].is_negative() {
                    return Err(Error::Infeasible);
                }
                continue;
            }
            pending.push(PendingRow { coeffs, slack: Some(nslack), rhs: poly.ineq_rhs[r].clone() });
            nslack += 1;
        }
        for r in 0..poly.eq_matrix.rows() {
            let coeffs = expand(poly.eq_matrix.row(r));
            if coeffs.iter().all(Zero::is_zero) {
                if !poly.eq_rhs[r].is_zero() {
                    return Err(Error::Infeasible);
                }
                continue;
            }
            pending.push(PendingRow { coeffs, slack: None, rhs: poly.eq_rhs[r].clone() });
        }

        let needs_art: Vec<bool> =
            pending.iter().map(|p| p.slack.is_none() || p.rhs.is_negative()).collect();
        let nart = needs_art.iter().filter(|&&b| b).count();
        let art_start = ns + nslack;
        let width = art_start + nart;

        let mut rows = Vec::with_capacity(pending.len());
        let mut rhs = Vec::with_capacity(pending.len());
        let mut basis = Vec::with_capacity(pending.len());
        let mut next_art = art_start;
        for (p, &art) in pending.into_iter().zip(&needs_art) {
            let flip = p.rhs.is_negative();
            let mut row = vec![Rational::zero(); width];
            for (j, v) in p.coeffs.into_iter().enumerate() {
                row[j] = if flip { -v } else { v };
            }
            if let Some(s) = p.slack {
                row[ns + s] = if flip { -Rational::one() } else { Rational::one() };
            }
            if art {
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(ns + p.slack.expect("slack row"));
            }
            rows.push(row);
            rhs.push(if flip { -p.rhs } else { p.rhs });
        }

        let mut lp = Self { n, structural, ncols: width, rows, rhs, basis };
        if nart > 0 {
            lp.phase_one(art_start)?;
        }
        Ok(lp)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn phase_one(&mut self, art_start: usize) -> Result<()> {
        let mut d = vec![Rational::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            if b >= art_start {
                for (dj, v) in d.iter_mut().zip(&self.rows[i]) {
                    if !v.is_zero() {
                        *dj -= v;
                    }
                }
            }
        }
        for dj in d.iter_mut().skip(art_start) {
            *dj = Rational::zero();
        }
        let blocked = vec![false; self.ncols];
        // phase I is bounded below by zero
        let _ = self.run(&mut d, &blocked);
        let infeasible = self
            .basis
            .iter()
            .zip(&self.rhs)
            .any(|(&b, v)| b >= art_start && !v.is_zero());
        if infeasible {
            return Err(Error::Infeasible);
        }

        let mut drop_rows = Vec::new();
        for r in 0..self.rows.len() {
            if self.basis[r] < art_start {
                continue;
            }
            match (0..art_start).find(|&j| !self.rows[r][j].is_zero()) {
                Some(j) => self.pivot(r, j, None),
                None => drop_rows.push(r),
            }
        }
        for &r in drop_rows.iter().rev() {
            self.rows.remove(r);
            self.rhs.remove(r);
            self.basis.remove(r);
        }
        for row in &mut self.rows {
            row.truncate(art_start);
        }
        self.ncols = art_start;
        Ok(())
    }

    fn pivot(&mut self, r: usize, s: usize, d: Option<&mut Vec<Rational>>) {
        let piv = self.rows[r][s].clone();
        if !piv.is_one() {
            let inv = Rational::one() / piv;
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let support: Vec<usize> = (0..self.ncols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][s].is_zero() {
                continue;
            }
            let f = self.rows[i][s].clone();
            let row = &mut self.rows[i];
            for &j in &support {
                row[j] -= &f * &pivot_row[j];
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &f * &pivot_rhs;
            }
        }
        if let Some(d) = d {
            if !d[s].is_zero() {
                let f = d[s].clone();
                for &j in &support {
                    d[j] -= &f * &pivot_row[j];
                }
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = s;
    }

    /// Minimises with reduced costs `d`. Returns `false` if unbounded.
    fn run(&mut self, d: &mut Vec<Rational>, blocked: &[bool]) -> bool {
        loop {
            let Some(s) = (0..self.ncols).find(|&j| !blocked[j] && d[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][s];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, s, Some(d));
        }
    }

    fn column_costs(&self, objective: &[Rational], sense: Sense) -> Vec<Rational> {
        let mut cost = vec![Rational::zero(); self.ncols];
        for (j, s) in self.structural.iter().enumerate() {
            let mut v = objective[s.var].clone();
            if s.negative {
                v = -v;
            }
            if sense == Sense::Max {
                v = -v;
            }
            cost[j] = v;
        }
        cost
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut d = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (dj, v) in d.iter_mut().zip(&self.rows[i]) {
                if !v.is_zero() {
                    *dj -= cb * v;
                }
            }
        }
        d
    }

    /// Current basic solution in the original variables.
    pub fn current_point(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if let Some(s) = self.structural.get(b) {
                if s.negative {
                    x[s.var] -= &self.rhs[i];
                } else {
                    x[s.var] += &self.rhs[i];
                }
            }
        }
        x
    }

    pub fn solve(&mut self, objective: &[Rational], sense: Sense) -> LpResult {
        self.solve_lex(&[(objective, sense)])
    }

    /// Lexicographic optimisation: each later objective is optimised over the
    /// optimal face of the earlier ones. The reported value is that of the
    /// first objective.
    pub fn solve_lex(&mut self, objectives: &[(&[Rational], Sense)]) -> LpResult {
        let mut blocked = vec![false; self.ncols];
        for &(objective, sense) in objectives {
            assert_eq!(objective.len(), self.n, "objective length mismatch");
            let cost = self.column_costs(objective, sense);
            let mut d = self.reduced_costs(&cost);
            if !self.run(&mut d, &blocked) {
                return LpResult::unbounded();
            }
            for (j, dj) in d.iter().enumerate() {
                if !dj.is_zero() {
                    blocked[j] = true;
                }
            }
        }
        let witness = self.current_point();
        let value = objectives
            .first()
            .map(|(o, _)| rational::dot(o, &witness))
            .unwrap_or_default();
        LpResult { status: LpStatus::Optimal, value: Some(value), witness: Some(witness) }
    }
}
