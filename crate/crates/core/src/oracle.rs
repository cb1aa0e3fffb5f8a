//! Brute-force verifiers that share as little code as possible with the main
//! pipeline.
//!
//! Response functions are read from literal truth tables, the constraint
//! matrices are rebuilt from those tables, and feasibility of a joint model is
//! decided by direct substitution: `c` is consistent iff it is a probability
//! vector and the Markov kernels of both induced marginal models match the
//! observed ones.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::bounds_report;
use crate::error::{Error, Result};
use crate::experiment::trial_rng;
use crate::merge::{project_binary, statistical_merge_check, FixedVariable, MergeProblem};
use crate::polytope::{contains, enumerate_vertices, Point2, Polygon2};
use crate::rational::{self, Rational};
use crate::scm::{BinaryResponse, MarginalObservation};

/// Outputs of `h_0 … h_15` (columns) for inputs `(x, y)` = 00, 01, 10, 11
/// (rows).
pub const BINARY_TABLE: [&str; 4] = [
    "0101010101010101",
    "0011001100110011",
    "0000111100001111",
    "0000000011111111",
];

/// Outputs `(f(0), f(1))` of `f_0 … f_3`: constant zero, constant one,
/// identity, negation.
pub const UNARY_TABLE: [(u8, u8); 4] = [(0, 0), (1, 1), (0, 1), (1, 0)];

pub fn table_eval(k: usize, x: u8, y: u8) -> u8 {
    BINARY_TABLE[2 * x as usize + y as usize].as_bytes()[k] - b'0'
}

fn unary_from_table(at0: u8, at1: u8) -> usize {
    UNARY_TABLE
        .iter()
        .position(|&t| t == (at0, at1))
        .expect("every Boolean table is a unary response")
}

fn truth_table_projection(k: usize, fixed: FixedVariable, value: u8) -> usize {
    match fixed {
        FixedVariable::X => unary_from_table(table_eval(k, value, 0), table_eval(k, value, 1)),
        FixedVariable::Y => unary_from_table(table_eval(k, 0, value), table_eval(k, 1, value)),
    }
}

/// Compares all 64 projections against the merge module.
pub fn exhaustive_projection_check() -> bool {
    (0..16).all(|k| {
        let h = BinaryResponse::new(k as u8).expect("index below 16");
        [FixedVariable::X, FixedVariable::Y].into_iter().all(|fixed| {
            (0..2u8).all(|v| project_binary(h, fixed, v).id() == truth_table_projection(k, fixed, v))
        })
    })
}

/// Column-stochastic 4×16 map from joint to marginal response weights,
/// averaging the projection over the other cause.
fn raw_matrix(fixed: FixedVariable, other1: &Rational) -> [[Rational; 16]; 4] {
    let weights = [Rational::one() - other1, other1.clone()];
    let mut m: [[Rational; 16]; 4] = Default::default();
    for k in 0..16 {
        for (v, w) in weights.iter().enumerate() {
            let j = truth_table_projection(k, fixed, v as u8);
            m[j][k] += w;
        }
    }
    m
}

/// Direct substitution check of a joint response distribution.
pub struct RawChecker {
    obs_x: MarginalObservation,
    obs_y: MarginalObservation,
    a: [[Rational; 16]; 4],
    b: [[Rational; 16]; 4],
}

impl RawChecker {
    pub fn new(obs_x: &MarginalObservation, obs_y: &MarginalObservation) -> Self {
        Self {
            obs_x: obs_x.clone(),
            obs_y: obs_y.clone(),
            a: raw_matrix(FixedVariable::Y, &obs_y.cause1),
            b: raw_matrix(FixedVariable::X, &obs_x.cause1),
        }
    }

    /// `(λᴬ, λᴮ)` of `c` if it is a consistent joint model.
    pub fn check(&self, c: &[Rational]) -> Option<(Rational, Rational)> {
        if c.len() != 16 || c.iter().any(Signed::is_negative) || !c.iter().sum::<Rational>().is_one() {
            return None;
        }
        let marginal = |m: &[[Rational; 16]; 4]| -> [Rational; 4] {
            std::array::from_fn(|j| rational::dot(&m[j], c))
        };
        let kernel_matches = |v: &[Rational; 4], obs: &MarginalObservation| {
            // f0 and f2 output 0 at input 0; f0 and f3 at input 1
            &v[0] + &v[2] == obs.p0_given0 && &v[0] + &v[3] == obs.p0_given1
        };
        let va = marginal(&self.a);
        let vb = marginal(&self.b);
        (kernel_matches(&va, &self.obs_x) && kernel_matches(&vb, &self.obs_y))
            .then(|| (va[0].clone(), vb[0].clone()))
    }
}

/// Counters from one sampling run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub tested: u64,
    pub feasible_inside_polygon: u64,
    /// Contradiction: consistent by substitution, outside the polygon.
    pub feasible_outside_polygon: u64,
    /// Contradiction: convex combination of enumerated vertices that fails
    /// substitution.
    pub infeasible_inside: u64,
    /// Samples rejected by substitution that were not vertex-derived.
    pub rejected: u64,
    pub vertex_derived: u64,
    pub lambda_a_seen: Option<(Rational, Rational)>,
    pub lambda_b_seen: Option<(Rational, Rational)>,
}

impl SampleReport {
    pub fn contradictions(&self) -> u64 {
        self.feasible_outside_polygon + self.infeasible_inside
    }

    fn merge(mut self, other: Self) -> Self {
        self.tested += other.tested;
        self.feasible_inside_polygon += other.feasible_inside_polygon;
        self.feasible_outside_polygon += other.feasible_outside_polygon;
        self.infeasible_inside += other.infeasible_inside;
        self.rejected += other.rejected;
        self.vertex_derived += other.vertex_derived;
        self.lambda_a_seen = merge_range(self.lambda_a_seen, other.lambda_a_seen);
        self.lambda_b_seen = merge_range(self.lambda_b_seen, other.lambda_b_seen);
        self
    }
}

fn merge_range(a: Option<(Rational, Rational)>, b: Option<(Rational, Rational)>) -> Option<(Rational, Rational)> {
    match (a, b) {
        (Some((l1, h1)), Some((l2, h2))) => Some((rational::min(&l1, &l2), rational::max(&h1, &h2))),
        (x, None) | (None, x) => x,
    }
}

/// Standard exponential draw rounded up to a positive multiple of `10⁻⁶`.
fn exponential_micro<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let u: f64 = 1.0 - rng.random::<f64>();
    let e = -u.ln();
    let micros = (e * rational::MICRO as f64).round() as i64 + 1;
    Rational::new(micros.into(), rational::MICRO.into())
}

/// Dirichlet(1, …, 1) weights from normalised exponentials.
fn dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Rational> {
    let e: Vec<Rational> = (0..n).map(|_| exponential_micro(rng)).collect();
    let total: Rational = e.iter().sum();
    e.into_iter().map(|x| x / &total).collect()
}

/// Row-reduced kernel equations `M c = r` satisfied by all consistent
/// models, used to move arbitrary points onto its solution space.
struct SolutionSpace {
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl SolutionSpace {
    fn new(checker: &RawChecker) -> Self {
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for (m, obs) in [(&checker.a, &checker.obs_x), (&checker.b, &checker.obs_y)] {
            for (j, target) in [(2, &obs.p0_given0), (3, &obs.p0_given1)] {
                let mut row: Vec<Rational> = (0..16).map(|k| &m[0][k] + &m[j][k]).collect();
                row.push(target.clone());
                rows.push(row);
            }
        }
        let mut ones = vec![Rational::one(); 16];
        ones.push(Rational::one());
        rows.push(ones);

        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..16 {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = Rational::one() / &rows[r][col];
            for v in &mut rows[r] {
                *v *= &inv;
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= &f * pv;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        Self { rows, pivots }
    }

    /// Keeps the free coordinates of `z` and solves for the pivots.
    fn snap(&self, z: &[Rational]) -> Vec<Rational> {
        let mut out = z.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let mut v = row[16].clone();
            for c in 0..16 {
                if c != p && !self.pivots.contains(&c) && !row[c].is_zero() {
                    v -= &row[c] * &z[c];
                }
            }
            out[p] = v;
        }
        out
    }
}

/// Draws `n` points of `Δ¹⁵` and cross-checks substitution feasibility
/// against membership of `(λᴬ, λᴮ)` in the projected polygon.
///
/// Even-indexed samples are random convex combinations of up to four
/// enumerated vertices, so they must be consistent. Odd-indexed samples move
/// such a combination towards a uniform `Δ¹⁵` point by a random step `2⁻ᵐ`,
/// `1 ≤ m ≤ 8`, then onto the solution space of the kernel equations; they are
/// consistent exactly when nonnegative, which exercises the boundary.
pub fn sample_feasible_c(problem: &MergeProblem, n: u64, seed: u64) -> Result<SampleReport> {
    if n == 0 {
        return Ok(SampleReport::default());
    }
    let polygon = bounds_report(problem)?.polygon;
    let vertices: Vec<Vec<Rational>> = enumerate_vertices(&problem.polytope)?
        .into_iter()
        .map(|v| v.coordinates)
        .collect();
    let checker = RawChecker::new(&problem.obs_x, &problem.obs_y);
    let hull = SolutionSpace::new(&checker);

    let report = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let count = rng.random_range(1..=4.min(vertices.len()));
            let weights = dirichlet(&mut rng, count);
            let mut mix = vec![Rational::zero(); 16];
            for w in &weights {
                let v = &vertices[rng.random_range(0..vertices.len())];
                for (m, x) in mix.iter_mut().zip(v) {
                    *m += w * x;
                }
            }
            let vertex_derived = i % 2 == 0;
            let point = if vertex_derived {
                mix
            } else {
                let d = dirichlet(&mut rng, 16);
                let t = Rational::new(1.into(), (1i64 << rng.random_range(1..=8)).into());
                let blend: Vec<Rational> = mix.iter().zip(&d).map(|(m, x)| m + (x - m) * &t).collect();
                hull.snap(&blend)
            };
            classify(&checker, &polygon, &point, vertex_derived)
        })
        .reduce(SampleReport::default, SampleReport::merge);
    Ok(report)
}

fn classify(checker: &RawChecker, polygon: &Polygon2, c: &[Rational], vertex_derived: bool) -> SampleReport {
    let mut r = SampleReport { tested: 1, vertex_derived: vertex_derived as u64, ..Default::default() };
    match checker.check(c) {
        Some((la, lb)) => {
            if contains(polygon, &Point2::new(la.clone(), lb.clone())) {
                r.feasible_inside_polygon = 1;
            } else {
                r.feasible_outside_polygon = 1;
            }
            r.lambda_a_seen = Some((la.clone(), la));
            r.lambda_b_seen = Some((lb.clone(), lb));
        }
        None if vertex_derived => r.infeasible_inside = 1,
        None => r.rejected = 1,
    }
    r
}

/// `(vertex count, vertices failing substitution)` for the enumerated
/// vertices of the merge polytope.
pub fn vertex_raw_check(problem: &MergeProblem) -> Result<(usize, usize)> {
    let checker = RawChecker::new(&problem.obs_x, &problem.obs_y);
    let vertices = enumerate_vertices(&problem.polytope)?;
    let failures = vertices.iter().filter(|v| checker.check(&v.coordinates).is_none()).count();
    Ok((vertices.len(), failures))
}

/// Grid points `q00 = k / (grid − 1)` at which the derived conditional table
/// `q_xy = P(Z=0 | x, y)` is a monotone table of probabilities
/// (`0 ≤ q00 ≤ q01, q10 ≤ q11 ≤ 1`), after relabeling both causes so that
/// `P(Z=0 | cause=1) ≥ P(Z=0 | cause=0)`.
pub fn q00_grid_pass_set(
    obs_x: &MarginalObservation,
    obs_y: &MarginalObservation,
    grid: usize,
) -> Result<Vec<Rational>> {
    if !statistical_merge_check(obs_x, obs_y) {
        return Err(Error::StatisticallyInconsistent {
            via_x: obs_x.p_z0().to_string(),
            via_y: obs_y.p_z0().to_string(),
        });
    }
    if grid < 2 {
        return Err(Error::Parse(format!("grid needs at least two points, got {grid}")));
    }
    let one = Rational::one();
    let swap = |o: &MarginalObservation| {
        if o.p0_given1 < o.p0_given0 {
            (o.p0_given1.clone(), o.p0_given0.clone(), &one - &o.cause1)
        } else {
            (o.p0_given0.clone(), o.p0_given1.clone(), o.cause1.clone())
        }
    };
    let (zx0, _, px1) = swap(obs_x);
    let (zy0, zy1, py1) = swap(obs_y);
    let (px0, py0) = (&one - &px1, &one - &py1);

    let denom = Rational::from_integer((grid as i64 - 1).into());
    let mut pass = Vec::new();
    for k in 0..grid {
        let q00 = Rational::from_integer((k as i64).into()) / &denom;
        // P(Z=0|X=0) = q00 P(Y=0) + q01 P(Y=1), and symmetrically
        let q01 = (&zx0 - &q00 * &py0) / &py1;
        let q10 = (&zy0 - &q00 * &px0) / &px1;
        let q11 = (&zy1 - &q01 * &px0) / &px1;
        let ok = !q00.is_negative() && q00 <= q01 && q00 <= q10 && q01 <= q11 && q10 <= q11 && q11 <= one;
        if ok {
            pass.push(q00);
        }
    }
    Ok(pass)
}

/// Whether the grid pass-set equals the closed-form `q00` interval
/// intersected with the grid.
pub fn scan_lemma1(obs_x: &MarginalObservation, obs_y: &MarginalObservation, grid: usize) -> Result<bool> {
    let pass = q00_grid_pass_set(obs_x, obs_y, grid)?;
    let interval = crate::analysis::lemma1_interval(obs_x, obs_y)?;
    let denom = Rational::from_integer((grid as i64 - 1).into());
    let expected: Vec<Rational> = (0..grid)
        .map(|k| Rational::from_integer((k as i64).into()) / &denom)
        .filter(|q| interval.as_ref().is_some_and(|iv| iv.contains(q)))
        .collect();
    Ok(pass == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::medication_observations;
    use crate::merge::build_merge_problem;
    use crate::rational::{int, q};

    #[test]
    fn projections_agree() {
        assert!(exhaustive_projection_check());
        assert_eq!(truth_table_projection(0, FixedVariable::X, 0), 0);
        assert_eq!(truth_table_projection(15, FixedVariable::Y, 1), 1);
        assert_eq!(truth_table_projection(7, FixedVariable::Y, 1), 3);
    }

    #[test]
    fn empty_run() {
        let (x, y) = medication_observations();
        let p = build_merge_problem(&x, &y).unwrap();
        assert_eq!(sample_feasible_c(&p, 0, 1).unwrap(), SampleReport::default());
    }

    #[test]
    fn medication_samples_pin_lambda_a() {
        let (x, y) = medication_observations();
        let p = build_merge_problem(&x, &y).unwrap();
        let r = sample_feasible_c(&p, 400, 7).unwrap();
        assert_eq!(r.contradictions(), 0);
        assert_eq!(r.lambda_a_seen, Some((q(2, 5), q(2, 5))));
        assert_eq!(vertex_raw_check(&p).unwrap().1, 0);
        assert_eq!(r, sample_feasible_c(&p, 400, 7).unwrap());
    }

    #[test]
    fn independent_product_scan() {
        let x = MarginalObservation::new(q(1, 2), q(1, 2), q(1, 3), "X").unwrap();
        let y = MarginalObservation::new(q(1, 2), q(1, 2), q(1, 4), "Y").unwrap();
        let pass = q00_grid_pass_set(&x, &y, 101).unwrap();
        assert!(pass.contains(&q(1, 2)));
        assert!(scan_lemma1(&x, &y, 101).unwrap());
    }

    #[test]
    fn non_mergeable_scan_refused() {
        let x = MarginalObservation::new(q(1, 2), q(1, 2), q(1, 2), "X").unwrap();
        let y = MarginalObservation::new(int(1), int(1), q(1, 2), "Y").unwrap();
        assert!(matches!(scan_lemma1(&x, &y, 10), Err(Error::StatisticallyInconsistent { .. })));
    }
}
