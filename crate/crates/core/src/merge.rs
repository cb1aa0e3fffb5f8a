//! Linear consistency conditions between a joint model and its marginals.
//!
//! A joint distribution `c ∈ Δ¹⁵` over binary response functions induces a
//! distribution over unary response functions of `X` (marginalising `Y`) via
//! `A c`, and one of `Y` via `B c`. Consistency with the observed families
//! `a(λᴬ)`, `b(λᴮ)` is a set of linear equalities and inequalities in `c`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{ConstraintMatrix, HPolytope, ProjectionMap};
use crate::rational::Rational;
use crate::scm::{
    enumerate_binary, family_from_observation, BinaryResponse, MarginalFamily,
    MarginalObservation, UnaryResponse,
};

/// Which argument of a binary response function is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FixedVariable {
    X,
    Y,
}

/// Unary function left after fixing one argument of `h`.
///
/// Fixing `X = x` yields a function of `Y`; fixing `Y = y` yields a function
/// of `X`.
pub fn project_binary(h: BinaryResponse, fixed: FixedVariable, value: u8) -> UnaryResponse {
    match fixed {
        FixedVariable::X => UnaryResponse::from_table(h.eval(value, 0), h.eval(value, 1)),
        FixedVariable::Y => UnaryResponse::from_table(h.eval(0, value), h.eval(1, value)),
    }
}

fn check_cause(p: &Rational, cause: &'static str) -> Result<()> {
    if *p <= Rational::zero() || *p >= Rational::one() {
        return Err(Error::DegenerateCause { cause, value: p.to_string() });
    }
    Ok(())
}

fn marginalising_matrix(p1: &Rational, fixed: FixedVariable) -> ConstraintMatrix {
    let p0 = Rational::one() - p1;
    let mut m = ConstraintMatrix::zeros(4, 16);
    for h in enumerate_binary() {
        for (value, weight) in [(0u8, &p0), (1u8, p1)] {
            let f = project_binary(h, fixed, value);
            let cell = m.get(f.id(), h.id()) + weight;
            m.set(f.id(), h.id(), cell);
        }
    }
    m
}

/// `A` (4×16) maps `c` to the induced unary distribution of `X → Z`, `B`
/// that of `Y → Z`:
/// `A_jk = Σ_y P(Y=y)·1{h_k(·, y) = f_j}`, `B_jk = Σ_x P(X=x)·1{h_k(x, ·) = f_j}`.
pub fn build_constraint_matrices(
    p_y1: &Rational,
    p_x1: &Rational,
) -> Result<(ConstraintMatrix, ConstraintMatrix)> {
    check_cause(p_y1, "Y")?;
    check_cause(p_x1, "X")?;
    Ok((
        marginalising_matrix(p_y1, FixedVariable::Y),
        marginalising_matrix(p_x1, FixedVariable::X),
    ))
}

/// Exact check that both datasets imply the same `P(Z=0)`.
pub fn statistical_merge_check(obs_x: &MarginalObservation, obs_y: &MarginalObservation) -> bool {
    obs_x.p_z0() == obs_y.p_z0()
}

/// Rows eliminating `λ` from `a(λ)`: each is orthogonal to `(1, 1, −1, −1)`.
const ELIMINATION: [[i64; 4]; 3] = [[1, -1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1]];

/// Everything needed to reason about one merge instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeProblem {
    pub obs_x: MarginalObservation,
    pub obs_y: MarginalObservation,
    pub family_a: MarginalFamily,
    pub family_b: MarginalFamily,
    pub a: ConstraintMatrix,
    pub b: ConstraintMatrix,
    pub polytope: HPolytope,
    pub projection: ProjectionMap,
}

fn interval_rhs(m: &ConstraintMatrix, fam: &MarginalFamily) -> (Vec<Rational>, Vec<Rational>) {
    let (lo, hi) = (&fam.lambda_min, &fam.lambda_max);
    let upper: Vec<Rational> = (0..4)
        .map(|j| if j < 2 { &fam.base[j] + hi } else { &fam.base[j] - lo })
        .collect();
    let lower: Vec<Rational> = (0..4)
        .map(|j| if j < 2 { -&fam.base[j] - lo } else { -&fam.base[j] + hi })
        .collect();
    debug_assert_eq!(m.rows(), 4);
    (upper, lower)
}

fn elimination_rows(m: &ConstraintMatrix, fam: &MarginalFamily) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let mut rows = Vec::with_capacity(3);
    let mut rhs = Vec::with_capacity(3);
    for e in ELIMINATION {
        let mut row = vec![Rational::zero(); m.cols()];
        let mut r = Rational::zero();
        for (j, &w) in e.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let w = Rational::from_integer(w.into());
            for (k, cell) in row.iter_mut().enumerate() {
                *cell += &w * m.get(j, k);
            }
            r += &w * &fam.base[j];
        }
        rows.push(row);
        rhs.push(r);
    }
    (rows, rhs)
}

/// Assembles the H-representation of the set of joint models consistent
/// with both observations.
///
/// Inequalities (32 rows): `A c ≤ ã₁`, `−A c ≤ ã₂`, `B c ≤ b̃₁`, `−B c ≤ b̃₂`,
/// `−c ≤ 0`. Equalities (7 rows): three `λᴬ`-free combinations of `A c`, three
/// of `B c`, and `Σ c = 1`.
pub fn build_merge_problem(
    obs_x: &MarginalObservation,
    obs_y: &MarginalObservation,
) -> Result<MergeProblem> {
    check_cause(&obs_x.cause1, "X")?;
    check_cause(&obs_y.cause1, "Y")?;
    if !statistical_merge_check(obs_x, obs_y) {
        return Err(Error::StatisticallyInconsistent {
            via_x: obs_x.p_z0().to_string(),
            via_y: obs_y.p_z0().to_string(),
        });
    }
    let family_a = family_from_observation(obs_x)?;
    let family_b = family_from_observation(obs_y)?;
    let (a, b) = build_constraint_matrices(&obs_y.cause1, &obs_x.cause1)?;

    let (a_up, a_low) = interval_rhs(&a, &family_a);
    let (b_up, b_low) = interval_rhs(&b, &family_b);
    let ineq_matrix = ConstraintMatrix::vstack(&[
        a.clone(),
        a.negated(),
        b.clone(),
        b.negated(),
        ConstraintMatrix::identity(16).negated(),
    ]);
    let ineq_rhs: Vec<Rational> = a_up
        .into_iter()
        .chain(a_low)
        .chain(b_up)
        .chain(b_low)
        .chain(std::iter::repeat_n(Rational::zero(), 16))
        .collect();

    let (mut eq_rows, mut eq_rhs) = elimination_rows(&a, &family_a);
    let (b_rows, b_rhs) = elimination_rows(&b, &family_b);
    eq_rows.extend(b_rows);
    eq_rhs.extend(b_rhs);
    eq_rows.push(vec![Rational::one(); 16]);
    eq_rhs.push(Rational::one());

    let polytope = HPolytope::new(ineq_matrix, ineq_rhs, ConstraintMatrix::from_rows(eq_rows), eq_rhs)?;
    let projection = ProjectionMap::new(ConstraintMatrix::from_rows(vec![
        a.row(0).to_vec(),
        b.row(0).to_vec(),
    ]))?;
    Ok(MergeProblem {
        obs_x: obs_x.clone(),
        obs_y: obs_y.clone(),
        family_a,
        family_b,
        a,
        b,
        polytope,
        projection,
    })
}

impl MergeProblem {
    /// Objective `a₂ + a₃` (counterfactual influence of `X`) as a 16-vector.
    pub fn gamma_x_objective(&self) -> Vec<Rational> {
        (0..16).map(|k| self.a.get(2, k) + self.a.get(3, k)).collect()
    }

    pub fn gamma_y_objective(&self) -> Vec<Rational> {
        (0..16).map(|k| self.b.get(2, k) + self.b.get(3, k)).collect()
    }

    pub fn lambda_a_objective(&self) -> Vec<Rational> {
        self.a.row(0).to_vec()
    }

    pub fn lambda_b_objective(&self) -> Vec<Rational> {
        self.b.row(0).to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    #[test]
    fn projection_examples() {
        let h = enumerate_binary();
        assert_eq!(project_binary(h[0], FixedVariable::X, 0), UnaryResponse::ZERO);
        assert_eq!(project_binary(h[7], FixedVariable::Y, 1), UnaryResponse::NOT);
        assert_eq!(project_binary(h[15], FixedVariable::Y, 0), UnaryResponse::ONE);
        // h10(x, y) = y, h12(x, y) = x
        assert_eq!(project_binary(h[10], FixedVariable::X, 0), UnaryResponse::ID);
        assert_eq!(project_binary(h[12], FixedVariable::Y, 1), UnaryResponse::ID);
    }

    #[test]
    fn derived_matrix_columns() {
        let theta = q(3, 4);
        let phi = q(1, 3);
        let (a, b) = build_constraint_matrices(&theta, &phi).unwrap();
        assert_eq!(a.column(0), vec![int(1), int(0), int(0), int(0)]);
        assert_eq!(a.column(10), vec![q(1, 4), q(3, 4), int(0), int(0)]);
        assert_eq!(b.column(12), vec![q(2, 3), q(1, 3), int(0), int(0)]);
        for k in 0..16 {
            assert_eq!(a.column(k).iter().sum::<Rational>(), int(1));
            assert_eq!(b.column(k).iter().sum::<Rational>(), int(1));
        }
        assert!(matches!(
            build_constraint_matrices(&int(0), &phi),
            Err(Error::DegenerateCause { cause: "Y", .. })
        ));
    }

    #[test]
    fn inconsistent_marginals_rejected() {
        let x = MarginalObservation::new(q(3, 10), q(3, 10), q(1, 2), "X").unwrap();
        let y = MarginalObservation::new(q(3, 5), q(3, 5), q(1, 2), "Y").unwrap();
        assert!(!statistical_merge_check(&x, &y));
        assert!(matches!(build_merge_problem(&x, &y), Err(Error::StatisticallyInconsistent { .. })));
    }

    #[test]
    fn medication_instance_is_mergeable() {
        let x = MarginalObservation::new(q(1, 2), q(2, 5), q(1, 2), "X").unwrap();
        let y = MarginalObservation::new(q(1, 12), int(1), q(2, 5), "Y").unwrap();
        assert!(statistical_merge_check(&x, &y));
        assert_eq!(x.p_z0(), q(9, 20));
        let p = build_merge_problem(&x, &y).unwrap();
        assert_eq!(p.polytope.ineq_matrix.rows(), 32);
        assert_eq!(p.polytope.eq_matrix.rows(), 7);
        assert_eq!(p.projection.matrix.row(0), p.a.row(0));
        assert_eq!(p.projection.matrix.row(1), p.b.row(0));
        // c4 = 1/6, c5 = 5/6 reproduces both marginal families
        let mut c = vec![int(0); 16];
        c[4] = q(1, 6);
        c[5] = q(5, 6);
        assert!(p.polytope.contains(&c));
        assert_eq!(p.a.mul_vec(&c), vec![q(2, 5), q(1, 2), q(1, 10), int(0)]);
    }

    #[test]
    fn construction_is_pure() {
        let x = MarginalObservation::new(q(1, 2), q(1, 2), q(1, 2), "X").unwrap();
        let y = MarginalObservation::new(int(1), q(1, 3), q(3, 4), "Y").unwrap();
        assert_eq!(build_merge_problem(&x, &y).unwrap(), build_merge_problem(&x, &y).unwrap());
    }
}
