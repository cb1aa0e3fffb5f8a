//! Merging under arbitrary hidden confounding.
//!
//! Without causal sufficiency the cause and the mechanism are no longer
//! independent, so each marginal model becomes a joint distribution
//! `qᴬ_ij = P(X=i, R_Z=j)` over cause value and unary response (`Δ⁷`), and the
//! joint model a distribution `q_(x,y,k) = P(X=x, Y=y, S=k)` over both cause
//! values and binary responses (`Δ⁶³`). All consistency conditions stay linear.
//!
//! Layouts: `qᴬ`, `qᴮ` index `(i, j)` as `4i + j`; `q` indexes `(x, y, k)` as
//! `32x + 16y + k`; the stacked LP variable is `(qᴬ, qᴮ, q) ∈ R⁸⁰`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::merge::{project_binary, FixedVariable};
use crate::polytope::{ConstraintMatrix, HPolytope, PreparedLp, Sense};
use crate::rational::{self, Rational};
use crate::scm::{enumerate_binary, enumerate_unary, MarginalObservation};

pub const QA_OFFSET: usize = 0;
pub const QB_OFFSET: usize = 8;
pub const Q_OFFSET: usize = 16;
pub const STACKED_DIM: usize = 80;

pub fn qa_index(i: usize, j: usize) -> usize {
    QA_OFFSET + 4 * i + j
}

pub fn qb_index(i: usize, j: usize) -> usize {
    QB_OFFSET + 4 * i + j
}

pub fn q_index(x: usize, y: usize, k: usize) -> usize {
    Q_OFFSET + 32 * x + 16 * y + k
}

fn check_simplex(entries: &[Rational], what: &str) -> Result<()> {
    for (k, v) in entries.iter().enumerate() {
        if v.is_negative() {
            return Err(Error::InvalidProbability { name: format!("{what}[{k}]"), value: v.to_string() });
        }
    }
    let total: Rational = entries.iter().sum();
    if !total.is_one() {
        return Err(Error::InvalidProbability { name: format!("sum of {what}"), value: total.to_string() });
    }
    Ok(())
}

/// `qᴬ` or `qᴮ`: joint distribution of cause value and unary response.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfoundedMarginal {
    q: [Rational; 8],
}

impl ConfoundedMarginal {
    pub fn new(q: [Rational; 8]) -> Result<Self> {
        check_simplex(&q, "q")?;
        Ok(Self { q })
    }

    pub fn entries(&self) -> &[Rational; 8] {
        &self.q
    }
}

/// Joint distribution over `(X, Y, S)`, `k` fastest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfoundedJoint {
    q: Vec<Rational>,
}

impl ConfoundedJoint {
    pub fn new(q: Vec<Rational>) -> Result<Self> {
        if q.len() != 64 {
            return Err(Error::DimensionMismatch { expected: 64, got: q.len() });
        }
        check_simplex(&q, "q")?;
        Ok(Self { q })
    }

    pub fn entries(&self) -> &[Rational] {
        &self.q
    }
}

/// `alpha[2i + j] = P(cause=i, Z=j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObservationalJoint2 {
    pub alpha: [Rational; 4],
}

impl ObservationalJoint2 {
    pub fn new(alpha: [Rational; 4]) -> Result<Self> {
        check_simplex(&alpha, "alpha")?;
        Ok(Self { alpha })
    }

    /// Joint table of an unconfounded marginal observation.
    pub fn from_observation(obs: &MarginalObservation) -> Self {
        let p = [obs.cause0(), obs.cause1.clone()];
        let k = [&obs.p0_given0, &obs.p0_given1];
        let alpha = [
            &p[0] * k[0],
            &p[0] * (Rational::one() - k[0]),
            &p[1] * k[1],
            &p[1] * (Rational::one() - k[1]),
        ];
        Self { alpha }
    }

    pub fn p_z0(&self) -> Rational {
        &self.alpha[0] + &self.alpha[2]
    }
}

/// `entries[2i + j] = P(Z=j | do(cause=i))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InterventionalTable {
    pub entries: [Rational; 4],
}

impl InterventionalTable {
    pub fn new(entries: [Rational; 4]) -> Result<Self> {
        for (k, v) in entries.iter().enumerate() {
            if !rational::is_probability(v) {
                return Err(Error::InvalidProbability { name: format!("do[{k}]"), value: v.to_string() });
            }
        }
        for i in 0..2 {
            let s = &entries[2 * i] + &entries[2 * i + 1];
            if !s.is_one() {
                return Err(Error::InvalidProbability {
                    name: format!("P(Z=0|do({i})) + P(Z=1|do({i}))"),
                    value: s.to_string(),
                });
            }
        }
        Ok(Self { entries })
    }

    /// Without confounding, interventional and observational kernels agree.
    pub fn from_observation(obs: &MarginalObservation) -> Self {
        let one = Rational::one();
        Self {
            entries: [
                obs.p0_given0.clone(),
                &one - &obs.p0_given0,
                obs.p0_given1.clone(),
                &one - &obs.p0_given1,
            ],
        }
    }
}

/// `L` (4×8) with `α_ij = Σ_j' q_ij' 1{j = f_j'(i)}`. The same matrix serves
/// both marginals.
pub fn build_observational_constraints() -> (ConstraintMatrix, ConstraintMatrix) {
    let mut l = ConstraintMatrix::zeros(4, 8);
    for i in 0..2u8 {
        for f in enumerate_unary() {
            let j = f.eval(i) as usize;
            l.set(2 * i as usize + j, 4 * i as usize + f.id(), Rational::one());
        }
    }
    (l.clone(), l)
}

/// `L_IV` (4×8): `P(Z=j | do(i)) = Σ_j' (q_0j' + q_1j') 1{j = f_j'(i)}`.
pub fn build_interventional_constraints() -> ConstraintMatrix {
    let mut l = ConstraintMatrix::zeros(4, 8);
    for i in 0..2u8 {
        for f in enumerate_unary() {
            let row = 2 * i as usize + f.eval(i) as usize;
            for block in 0..2 {
                l.set(row, 4 * block + f.id(), Rational::one());
            }
        }
    }
    l
}

/// `Kᴬ`, `Kᴮ` (8×64): marginalise the joint onto each marginal model.
pub fn build_consistency_matrices() -> (ConstraintMatrix, ConstraintMatrix) {
    let mut ka = ConstraintMatrix::zeros(8, 64);
    let mut kb = ConstraintMatrix::zeros(8, 64);
    for x in 0..2u8 {
        for y in 0..2u8 {
            for h in enumerate_binary() {
                let col = q_index(x as usize, y as usize, h.id()) - Q_OFFSET;
                let fa = project_binary(h, FixedVariable::Y, y);
                let fb = project_binary(h, FixedVariable::X, x);
                ka.set(4 * x as usize + fa.id(), col, Rational::one());
                kb.set(4 * y as usize + fb.id(), col, Rational::one());
            }
        }
    }
    (ka, kb)
}

/// Which marginals are assumed to have no defiers (zero weight on NOT).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monotonicity {
    pub x: bool,
    pub y: bool,
}

/// Data and assumptions of one confounded merge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfoundedInputs {
    pub alpha: ObservationalJoint2,
    pub beta: ObservationalJoint2,
    pub alpha_iv: Option<InterventionalTable>,
    pub beta_iv: Option<InterventionalTable>,
    pub monotonic: Monotonicity,
}

impl ConfoundedInputs {
    pub fn observational(alpha: ObservationalJoint2, beta: ObservationalJoint2) -> Self {
        Self { alpha, beta, alpha_iv: None, beta_iv: None, monotonic: Monotonicity::default() }
    }

    /// Inputs of an unconfounded instance, optionally with its (equal)
    /// interventional tables.
    pub fn from_unconfounded(obs_x: &MarginalObservation, obs_y: &MarginalObservation, with_iv: bool) -> Self {
        Self {
            alpha: ObservationalJoint2::from_observation(obs_x),
            beta: ObservationalJoint2::from_observation(obs_y),
            alpha_iv: with_iv.then(|| InterventionalTable::from_observation(obs_x)),
            beta_iv: with_iv.then(|| InterventionalTable::from_observation(obs_y)),
            monotonic: Monotonicity::default(),
        }
    }
}

fn place(row: &mut [Rational], offset: usize, src: &[Rational], sign: &Rational) {
    for (k, v) in src.iter().enumerate() {
        if !v.is_zero() {
            row[offset + k] += sign * v;
        }
    }
}

/// H-representation over the stacked variable `(qᴬ, qᴮ, q)`.
///
/// Equalities: observational rows for both marginals, optional
/// interventional rows, optional no-defier rows, `qᴬ = Kᴬ q`, `qᴮ = Kᴮ q`, and
/// one normalisation per block. Inequalities: nonnegativity of all 80 entries.
pub fn confounded_polytope(inputs: &ConfoundedInputs) -> Result<HPolytope> {
    let one = Rational::one();
    let minus = -Rational::one();
    let (la, lb) = build_observational_constraints();
    let liv = build_interventional_constraints();
    let (ka, kb) = build_consistency_matrices();

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    let mut push = |row: Vec<Rational>, b: Rational| {
        rows.push(row);
        rhs.push(b);
    };
    let blank = || vec![Rational::zero(); STACKED_DIM];

    for (l, offset, data) in [(&la, QA_OFFSET, &inputs.alpha.alpha), (&lb, QB_OFFSET, &inputs.beta.alpha)] {
        for r in 0..4 {
            let mut row = blank();
            place(&mut row, offset, l.row(r), &one);
            push(row, data[r].clone());
        }
    }
    for (table, offset) in [(&inputs.alpha_iv, QA_OFFSET), (&inputs.beta_iv, QB_OFFSET)] {
        if let Some(t) = table {
            for r in 0..4 {
                let mut row = blank();
                place(&mut row, offset, liv.row(r), &one);
                push(row, t.entries[r].clone());
            }
        }
    }
    for (flag, offset) in [(inputs.monotonic.x, QA_OFFSET), (inputs.monotonic.y, QB_OFFSET)] {
        if flag {
            let mut row = blank();
            row[offset + 3] = one.clone();
            row[offset + 7] = one.clone();
            push(row, Rational::zero());
        }
    }
    for (k, offset) in [(&ka, QA_OFFSET), (&kb, QB_OFFSET)] {
        for r in 0..8 {
            let mut row = blank();
            row[offset + r] = one.clone();
            place(&mut row, Q_OFFSET, k.row(r), &minus);
            push(row, Rational::zero());
        }
    }
    for (offset, len) in [(QA_OFFSET, 8), (QB_OFFSET, 8), (Q_OFFSET, 64)] {
        let mut row = blank();
        for v in &mut row[offset..offset + len] {
            *v = one.clone();
        }
        push(row, one.clone());
    }

    HPolytope::new(
        ConstraintMatrix::identity(STACKED_DIM).negated(),
        vec![Rational::zero(); STACKED_DIM],
        ConstraintMatrix::from_rows(rows),
        rhs,
    )
}

/// Number of equality rows generated for `inputs`.
pub fn active_constraint_count(inputs: &ConfoundedInputs) -> usize {
    8 + 4 * (inputs.alpha_iv.is_some() as usize + inputs.beta_iv.is_some() as usize)
        + inputs.monotonic.x as usize
        + inputs.monotonic.y as usize
        + 16
        + 3
}

/// `(min, max)` of a linear functional over the stacked variable.
pub fn confounded_query_bounds(inputs: &ConfoundedInputs, objective: &[Rational]) -> Result<(Rational, Rational)> {
    let mut results = confounded_query_bounds_many(inputs, &[objective.to_vec()])?;
    Ok(results.remove(0))
}

/// Bounds for several objectives sharing one phase-I solve.
pub fn confounded_query_bounds_many(
    inputs: &ConfoundedInputs,
    objectives: &[Vec<Rational>],
) -> Result<Vec<(Rational, Rational)>> {
    for o in objectives {
        if o.len() != STACKED_DIM {
            return Err(Error::DimensionMismatch { expected: STACKED_DIM, got: o.len() });
        }
    }
    let poly = confounded_polytope(inputs)?;
    let mut lp = PreparedLp::new(&poly).map_err(|e| match e {
        Error::EmptyPolytope => Error::Infeasible,
        other => other,
    })?;
    objectives
        .iter()
        .map(|o| {
            let lo = lp.solve(o, Sense::Min).optimum()?;
            let hi = lp.solve(o, Sense::Max).optimum()?;
            Ok((lo, hi))
        })
        .collect()
}

/// `P(R_Z = j)` in the `X → Z` model: `Σ_i qᴬ_ij`.
pub fn response_weight_a(j: usize) -> Vec<Rational> {
    let mut o = vec![Rational::zero(); STACKED_DIM];
    for i in 0..2 {
        o[qa_index(i, j)] = Rational::one();
    }
    o
}

pub fn response_weight_b(j: usize) -> Vec<Rational> {
    let mut o = vec![Rational::zero(); STACKED_DIM];
    for i in 0..2 {
        o[qb_index(i, j)] = Rational::one();
    }
    o
}

/// Total mass of the joint block.
pub fn joint_mass() -> Vec<Rational> {
    let mut o = vec![Rational::zero(); STACKED_DIM];
    for v in &mut o[Q_OFFSET..] {
        *v = Rational::one();
    }
    o
}

/// Counterfactual queries, named by the model able to answer them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CounterfactualQuery {
    /// `P(Z_{do(X=x)} = z | X=x', Z=z')` from the `X → Z` model.
    MarginalA { x: u8, z: u8, x_obs: u8, z_obs: u8 },
    /// `P(Z_{do(Y=y)} = z | Y=y', Z=z')` from the `Y → Z` model.
    MarginalB { y: u8, z: u8, y_obs: u8, z_obs: u8 },
    /// `P(Z_{do(X=x, Y=y)} = z, X=x', Y=y', Z=z')` from the joint model. The
    /// conditional version divides by `P(x', y', z')`, which the data leave
    /// open, so only the joint probability is linear.
    JointC { x: u8, y: u8, z: u8, x_obs: u8, y_obs: u8, z_obs: u8 },
    /// `P(Z_{do(X=x)} = z | X=x', Y=y', Z=z')`.
    SingleGivenBothA { x: u8, z: u8, x_obs: u8, y_obs: u8, z_obs: u8 },
    /// `P(Z_{do(Y=y)} = z | X=x', Y=y', Z=z')`.
    SingleGivenBothB { y: u8, z: u8, x_obs: u8, y_obs: u8, z_obs: u8 },
}

/// Linear objective over the stacked variable for a counterfactual query.
///
/// Single-node interventions conditioned on both causes need the causal
/// relation between `X` and `Y`, which the partial joint model lacks; they
/// fail with [`Error::UnidentifiableQuery`].
pub fn counterfactual_objective(query: &CounterfactualQuery, inputs: &ConfoundedInputs) -> Result<Vec<Rational>> {
    let mut o = vec![Rational::zero(); STACKED_DIM];
    let marginal = |o: &mut Vec<Rational>, offset: usize, data: &ObservationalJoint2, d: u8, z: u8, c: u8, zc: u8| {
        let denom = &data.alpha[2 * c as usize + zc as usize];
        if denom.is_zero() {
            return Err(Error::UnidentifiableQuery(format!(
                "conditioning event (cause={c}, Z={zc}) has probability zero"
            )));
        }
        for f in enumerate_unary() {
            if f.eval(d) == z && f.eval(c) == zc {
                o[offset + 4 * c as usize + f.id()] = Rational::one() / denom;
            }
        }
        Ok(())
    };
    match *query {
        CounterfactualQuery::MarginalA { x, z, x_obs, z_obs } => {
            marginal(&mut o, QA_OFFSET, &inputs.alpha, x & 1, z & 1, x_obs & 1, z_obs & 1)?
        }
        CounterfactualQuery::MarginalB { y, z, y_obs, z_obs } => {
            marginal(&mut o, QB_OFFSET, &inputs.beta, y & 1, z & 1, y_obs & 1, z_obs & 1)?
        }
        CounterfactualQuery::JointC { x, y, z, x_obs, y_obs, z_obs } => {
            for h in enumerate_binary() {
                if h.eval(x, y) == z & 1 && h.eval(x_obs, y_obs) == z_obs & 1 {
                    o[q_index((x_obs & 1) as usize, (y_obs & 1) as usize, h.id())] = Rational::one();
                }
            }
        }
        CounterfactualQuery::SingleGivenBothA { .. } | CounterfactualQuery::SingleGivenBothB { .. } => {
            return Err(Error::UnidentifiableQuery(
                "single-node intervention conditioned on both causes needs the causal relation between X and Y"
                    .into(),
            ))
        }
    }
    Ok(o)
}

/// Stacked point induced by an unconfounded joint `c` with independent causes:
/// `q_(x,y,k) = P(X=x) P(Y=y) c_k`, `qᴬ = Kᴬ q`, `qᴮ = Kᴮ q`.
pub fn embed_unconfounded(c: &[Rational], p_x1: &Rational, p_y1: &Rational) -> Vec<Rational> {
    let one = Rational::one();
    let px = [&one - p_x1, p_x1.clone()];
    let py = [&one - p_y1, p_y1.clone()];
    let mut q = vec![Rational::zero(); 64];
    for x in 0..2 {
        for y in 0..2 {
            let w = &px[x] * &py[y];
            for (k, ck) in c.iter().enumerate() {
                q[32 * x + 16 * y + k] = &w * ck;
            }
        }
    }
    let (ka, kb) = build_consistency_matrices();
    let mut out = ka.mul_vec(&q);
    out.extend(kb.mul_vec(&q));
    out.extend(q);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    #[test]
    fn observational_rows() {
        let (l, _) = build_observational_constraints();
        // (i=0, j=0): f0 and f2 output 0 at input 0
        let row: Vec<usize> = (0..8).filter(|&c| !l.get(0, c).is_zero()).collect();
        assert_eq!(row, vec![0, 2]);
        for c in 0..8 {
            assert_eq!(l.column(c).iter().sum::<Rational>(), int(1));
        }
        let uniform = vec![q(1, 8); 8];
        assert_eq!(l.mul_vec(&uniform), vec![q(1, 4); 4]);
    }

    #[test]
    fn interventional_rows() {
        let liv = build_interventional_constraints();
        let mut conc = vec![int(0); 8];
        conc[3] = int(1);
        let do_probs = liv.mul_vec(&conc);
        assert_eq!(do_probs[1], int(1)); // P(Z=1 | do(0))
        assert_eq!(do_probs[2], int(1)); // P(Z=0 | do(1))
        assert_eq!(liv.mul_vec(&vec![q(1, 8); 8]), vec![q(1, 2); 4]);
    }

    #[test]
    fn consistency_matrices() {
        let (ka, kb) = build_consistency_matrices();
        for c in 0..64 {
            assert_eq!(ka.column(c).iter().sum::<Rational>(), int(1));
            assert_eq!(kb.column(c).iter().sum::<Rational>(), int(1));
        }
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(*ka.get(4 * x, 32 * x + 16 * y), int(1));
            }
            // h7 at y = 1 is NOT x
            assert_eq!(*ka.get(4 * x + 3, 32 * x + 16 + 7), int(1));
        }
    }

    #[test]
    fn observational_rank_removes_three_freedoms() {
        let (l, _) = build_observational_constraints();
        let mut rows = l.to_rows();
        rows.push(vec![int(1); 8]);
        assert_eq!(crate::polytope::linalg::rank(&rows), 4);
    }

    #[test]
    fn deterministic_identity_with_monotonicity() {
        let alpha = ObservationalJoint2::new([q(1, 2), int(0), int(0), q(1, 2)]).unwrap();
        let iv = InterventionalTable::new([int(1), int(0), int(0), int(1)]).unwrap();
        let inputs = ConfoundedInputs {
            alpha: alpha.clone(),
            beta: alpha,
            alpha_iv: Some(iv.clone()),
            beta_iv: Some(iv),
            monotonic: Monotonicity { x: true, y: true },
        };
        let (lo, hi) = confounded_query_bounds(&inputs, &response_weight_a(2)).unwrap();
        assert_eq!((lo, hi), (int(1), int(1)));
        assert_eq!(confounded_query_bounds(&inputs, &joint_mass()).unwrap(), (int(1), int(1)));
    }

    #[test]
    fn inconsistent_marginals_are_infeasible() {
        let alpha = ObservationalJoint2::new(std::array::from_fn(|_| q(1, 4))).unwrap();
        let beta = ObservationalJoint2::new([q(1, 2), int(0), q(1, 2), int(0)]).unwrap();
        let inputs = ConfoundedInputs::observational(alpha, beta);
        assert_eq!(confounded_query_bounds(&inputs, &joint_mass()), Err(Error::Infeasible));
    }

    #[test]
    fn uniform_point_is_feasible() {
        let alpha = ObservationalJoint2::new(std::array::from_fn(|_| q(1, 4))).unwrap();
        let inputs = ConfoundedInputs::observational(alpha.clone(), alpha);
        let poly = confounded_polytope(&inputs).unwrap();
        let c = vec![q(1, 16); 16];
        let point = embed_unconfounded(&c, &q(1, 2), &q(1, 2));
        assert!(poly.contains(&point));
    }

    #[test]
    fn unidentifiable_queries_rejected() {
        let alpha = ObservationalJoint2::new(std::array::from_fn(|_| q(1, 4))).unwrap();
        let inputs = ConfoundedInputs::observational(alpha.clone(), alpha);
        let query = CounterfactualQuery::SingleGivenBothA { x: 1, z: 1, x_obs: 0, y_obs: 0, z_obs: 0 };
        assert!(matches!(counterfactual_objective(&query, &inputs), Err(Error::UnidentifiableQuery(_))));
        let ok = CounterfactualQuery::MarginalA { x: 1, z: 1, x_obs: 0, z_obs: 0 };
        let o = counterfactual_objective(&ok, &inputs).unwrap();
        // only ID maps 0 to 0 and 1 to 1
        assert_eq!(o[qa_index(0, 2)], int(4));
        assert!(o[qa_index(0, 0)].is_zero());
    }
}
