//! Bounds on marginal-model parameters and counterfactual queries.
//!
//! Also holds the constructive side of the result that the pair of largest
//! admissible parameters `(λᴬmax, λᴮmax)` is always jointly consistent: an
//! explicit conditional table `q_ij = P(Z=0 | X=i, Y=j)` with monotone
//! entries, and a joint response distribution built from it.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::merge::{statistical_merge_check, MergeProblem};
use crate::polytope::{self, contains, polygon_area, Point2, Polygon2, PreparedLp, Sense};
use crate::rational::{self, int, Rational};
use crate::scm::{JointResponseDistribution, MarginalObservation, ResponseVector4};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Self { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }
}

/// Everything reported about one merge instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lambda_a_prior: Interval,
    pub lambda_b_prior: Interval,
    pub lambda_a_merged: Interval,
    pub lambda_b_merged: Interval,
    /// Projection of the feasible joint models onto the `(λᴬ, λᴮ)` plane.
    pub polygon: Polygon2,
    pub area_ratio_box: Rational,
    pub area_ratio_polygon: Rational,
    pub gamma_x: Interval,
    pub gamma_y: Interval,
    /// Whether `(λᴬmax, λᴮmax)` lies in the polygon.
    pub prop1_member: bool,
}

impl BoundsReport {
    /// Merged intervals inside priors and polygon inside the merged box.
    pub fn is_nested(&self) -> bool {
        let inside_box = self
            .polygon
            .vertices()
            .iter()
            .all(|p| self.lambda_a_merged.contains(&p.x) && self.lambda_b_merged.contains(&p.y));
        self.lambda_a_merged.is_subset_of(&self.lambda_a_prior)
            && self.lambda_b_merged.is_subset_of(&self.lambda_b_prior)
            && inside_box
    }
}

/// Product over both axes of merged width / prior width; an axis whose prior
/// interval is a single point contributes a factor of 1.
pub fn box_ratio(prior_a: &Interval, prior_b: &Interval, merged_a: &Interval, merged_b: &Interval) -> Rational {
    let factor = |prior: &Interval, merged: &Interval| {
        let w = prior.width();
        if w.is_zero() {
            Rational::one()
        } else {
            merged.width() / w
        }
    };
    factor(prior_a, merged_a) * factor(prior_b, merged_b)
}

/// Area of the polygon over the area of the prior rectangle. With one
/// degenerate prior axis the polygon is a segment and the ratio is its extent
/// along the other axis over that prior width; with two it is 1.
pub fn polygon_ratio(prior_a: &Interval, prior_b: &Interval, polygon: &Polygon2) -> Rational {
    let (wa, wb) = (prior_a.width(), prior_b.width());
    let extent_width = |e: Option<(Rational, Rational)>| e.map_or_else(Rational::zero, |(lo, hi)| hi - lo);
    match (wa.is_zero(), wb.is_zero()) {
        (false, false) => polygon_area(polygon) / (wa * wb),
        (true, false) => extent_width(polygon.y_extent()) / wb,
        (false, true) => extent_width(polygon.x_extent()) / wa,
        (true, true) => Rational::one(),
    }
}

fn prepare(problem: &MergeProblem) -> Result<PreparedLp> {
    PreparedLp::new(&problem.polytope).map_err(|_| Error::CounterfactuallyInfeasible)
}

fn min_max(lp: &mut PreparedLp, objective: &[Rational]) -> Result<Interval> {
    let lo = lp.solve(objective, Sense::Min).optimum()?;
    let hi = lp.solve(objective, Sense::Max).optimum()?;
    Ok(Interval::new(lo, hi))
}

/// Prior and merged parameter ranges, the projected polygon, area ratios and
/// `γ` bounds for one merge instance.
pub fn bounds_report(problem: &MergeProblem) -> Result<BoundsReport> {
    let mut lp = prepare(problem)?;
    let fa = &problem.family_a;
    let fb = &problem.family_b;
    let lambda_a_prior = Interval::new(fa.lambda_min.clone(), fa.lambda_max.clone());
    let lambda_b_prior = Interval::new(fb.lambda_min.clone(), fb.lambda_max.clone());
    let lambda_a_merged = min_max(&mut lp, &problem.lambda_a_objective())?;
    let lambda_b_merged = min_max(&mut lp, &problem.lambda_b_objective())?;
    let polygon = polytope::directional_extremes_with(&mut lp, &problem.projection)?;
    let gamma_x = min_max(&mut lp, &problem.gamma_x_objective())?;
    let gamma_y = min_max(&mut lp, &problem.gamma_y_objective())?;
    let corner = Point2::new(fa.lambda_max.clone(), fb.lambda_max.clone());
    Ok(BoundsReport {
        area_ratio_box: box_ratio(&lambda_a_prior, &lambda_b_prior, &lambda_a_merged, &lambda_b_merged),
        area_ratio_polygon: polygon_ratio(&lambda_a_prior, &lambda_b_prior, &polygon),
        prop1_member: contains(&polygon, &corner),
        lambda_a_prior,
        lambda_b_prior,
        lambda_a_merged,
        lambda_b_merged,
        polygon,
        gamma_x,
        gamma_y,
    })
}

/// `(min, max)` of `objective · c` over the consistent joint models.
pub fn query_bounds(problem: &MergeProblem, objective: &[Rational]) -> Result<(Rational, Rational)> {
    if objective.len() != 16 {
        return Err(Error::DimensionMismatch { expected: 16, got: objective.len() });
    }
    let mut lp = prepare(problem)?;
    let iv = min_max(&mut lp, objective)?;
    Ok((iv.lo, iv.hi))
}

pub fn gamma_x_bounds(problem: &MergeProblem) -> Result<(Rational, Rational)> {
    query_bounds(problem, &problem.gamma_x_objective())
}

pub fn gamma_y_bounds(problem: &MergeProblem) -> Result<(Rational, Rational)> {
    query_bounds(problem, &problem.gamma_y_objective())
}

/// Conditional table `q_ij = P(Z=0 | X=i, Y=j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Q2x2 {
    pub q00: Rational,
    pub q01: Rational,
    pub q10: Rational,
    pub q11: Rational,
}

impl Q2x2 {
    pub fn get(&self, x: u8, y: u8) -> &Rational {
        match (x, y) {
            (0, 0) => &self.q00,
            (0, 1) => &self.q01,
            (1, 0) => &self.q10,
            _ => &self.q11,
        }
    }

    /// Completes the table from `q00` so that it reproduces both kernels.
    pub fn from_q00(obs_x: &MarginalObservation, obs_y: &MarginalObservation, q00: Rational) -> Self {
        let (px0, px1) = (obs_x.cause0(), obs_x.cause1.clone());
        let (py0, py1) = (obs_y.cause0(), obs_y.cause1.clone());
        let q01 = (&obs_x.p0_given0 - &q00 * &py0) / &py1;
        let q10 = (&obs_y.p0_given0 - &q00 * &px0) / &px1;
        let q11 = (&obs_y.p0_given1 - &q01 * &px0) / &px1;
        Self { q00, q01, q10, q11 }
    }

    /// The same table after relabeling `X` and/or `Y` values.
    pub fn relabeled(&self, flip_x: bool, flip_y: bool) -> Self {
        let (fx, fy) = (flip_x as u8, flip_y as u8);
        Self {
            q00: self.get(fx, fy).clone(),
            q01: self.get(fx, 1 - fy).clone(),
            q10: self.get(1 - fx, fy).clone(),
            q11: self.get(1 - fx, 1 - fy).clone(),
        }
    }
}

/// Admissible range of `q00` in the relabeled frame where both
/// `P(Z=0|cause=1) − P(Z=0|cause=0)` differences are non-negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Q00Interval {
    pub lo: Rational,
    pub hi: Rational,
    /// `X` values were swapped to reach the normalised frame.
    pub flip_x: bool,
    pub flip_y: bool,
}

impl Q00Interval {
    pub fn contains(&self, q00: &Rational) -> bool {
        self.lo <= *q00 && *q00 <= self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }
}

/// Observations relabeled so that both kernel differences are non-negative,
/// together with the flips applied.
pub fn normalize_labels(
    obs_x: &MarginalObservation,
    obs_y: &MarginalObservation,
) -> (MarginalObservation, MarginalObservation, bool, bool) {
    let flip_x = obs_x.p0_given1 < obs_x.p0_given0;
    let flip_y = obs_y.p0_given1 < obs_y.p0_given0;
    let nx = if flip_x { obs_x.relabeled() } else { obs_x.clone() };
    let ny = if flip_y { obs_y.relabeled() } else { obs_y.clone() };
    (nx, ny, flip_x, flip_y)
}

/// The six bounds `η₁ … η₆` on `q00` in the normalised frame.
pub fn eta_bounds(nx: &MarginalObservation, ny: &MarginalObservation) -> [Rational; 6] {
    let (px0, px1) = (nx.cause0(), nx.cause1.clone());
    let (py0, py1) = (ny.cause0(), ny.cause1.clone());
    let delta_x = &nx.p0_given1 - &nx.p0_given0;
    let delta_y = &ny.p0_given1 - &ny.p0_given0;
    let eta4 = &ny.p0_given0 - &px1 / &py0 * &delta_x;
    let eta5 = &nx.p0_given0 - &delta_y * &py1 / &px0;
    let eta6 = (&px1 * &py1 - &ny.p0_given1 * &py1 + &nx.p0_given0 * &px0) / (&px0 * &py0);
    [
        Rational::zero(),
        nx.p0_given0.clone(),
        ny.p0_given0.clone(),
        eta4,
        eta5,
        eta6,
    ]
}

/// Range of `q00` for which a monotone conditional table reproduces both
/// observed kernels, or `None` if it is empty.
pub fn lemma1_interval(
    obs_x: &MarginalObservation,
    obs_y: &MarginalObservation,
) -> Result<Option<Q00Interval>> {
    if !statistical_merge_check(obs_x, obs_y) {
        return Err(Error::StatisticallyInconsistent {
            via_x: obs_x.p_z0().to_string(),
            via_y: obs_y.p_z0().to_string(),
        });
    }
    let (nx, ny, flip_x, flip_y) = normalize_labels(obs_x, obs_y);
    let [e1, e2, e3, e4, e5, e6] = eta_bounds(&nx, &ny);
    let lo = rational::max(&rational::max(&e1, &e4), &e5);
    let hi = rational::min(&rational::min(&e2, &e3), &e6);
    Ok((lo <= hi).then_some(Q00Interval { lo, hi, flip_x, flip_y }))
}

/// Index of `h_k` after relabeling: bit `2x+y` of `k` moves to bit
/// `2(x⊕fx) + (y⊕fy)`.
pub fn relabel_binary_index(k: usize, flip_x: bool, flip_y: bool) -> usize {
    let (fx, fy) = (flip_x as usize, flip_y as usize);
    let mut out = 0;
    for x in 0..2 {
        for y in 0..2 {
            if (k >> (2 * x + y)) & 1 == 1 {
                out |= 1 << (2 * (x ^ fx) + (y ^ fy));
            }
        }
    }
    out
}

/// Joint response distribution in the normalised frame from a monotone
/// table; supported on `{c₀, c₁, c₃, c₅, c₇, c₁₅}`.
pub fn witness_from_table(q: &Q2x2) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); 16];
    c[0] = q.q00.clone();
    if q.q01 >= q.q10 {
        c[1] = &q.q10 - &q.q00;
        c[5] = &q.q01 - &q.q10;
        c[7] = &q.q11 - &q.q01;
    } else {
        c[1] = &q.q01 - &q.q00;
        c[3] = &q.q10 - &q.q01;
        c[7] = &q.q11 - &q.q10;
    }
    c[15] = Rational::one() - &q.q11;
    c
}

/// A joint model attaining `λᴬ = λᴬmax` and `λᴮ = λᴮmax` simultaneously.
///
/// Uses the midpoint of [`lemma1_interval`] as `q00`.
pub fn prop1_witness(
    obs_x: &MarginalObservation,
    obs_y: &MarginalObservation,
) -> Result<JointResponseDistribution> {
    let iv = lemma1_interval(obs_x, obs_y)?.ok_or(Error::CounterfactuallyInfeasible)?;
    let (nx, ny, flip_x, flip_y) = normalize_labels(obs_x, obs_y);
    let q00 = (&iv.lo + &iv.hi) / int(2);
    let table = Q2x2::from_q00(&nx, &ny, q00);
    let normalized = witness_from_table(&table);
    let c: Vec<Rational> = (0..16)
        .map(|k| normalized[relabel_binary_index(k, flip_x, flip_y)].clone())
        .collect();
    JointResponseDistribution::new(c)
}

/// Closed-form solution of the AND-model example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AndModelReference {
    pub lambda_b_star: Rational,
    pub b: ResponseVector4,
    pub lambda_a_interval: Interval,
}

/// Reference values for the example where `Z := X ⊕ N` marginally (uniform
/// kernel) and `P(Y=1) = θ` with `P(Z=0 | Y=0) = 1`.
pub fn and_model_reference(theta: &Rational) -> Result<AndModelReference> {
    let half = rational::q(1, 2);
    if *theta < half || *theta >= Rational::one() {
        return Err(Error::ThetaOutOfRange(theta.to_string()));
    }
    let two_theta = int(2) * theta;
    let lambda_b_star = (&two_theta - int(1)) / &two_theta;
    let b = ResponseVector4::new([
        lambda_b_star.clone(),
        Rational::zero(),
        Rational::one() / &two_theta,
        Rational::zero(),
    ])?;
    Ok(AndModelReference {
        lambda_b_star,
        b,
        lambda_a_interval: Interval::new(Rational::one() - theta, half),
    })
}

/// The observations of the AND-model example for a given `θ`.
pub fn and_model_observations(theta: &Rational) -> Result<(MarginalObservation, MarginalObservation)> {
    let half = rational::q(1, 2);
    if *theta < half || *theta >= Rational::one() || theta.is_negative() {
        return Err(Error::ThetaOutOfRange(theta.to_string()));
    }
    let obs_x = MarginalObservation::new(half.clone(), half.clone(), half, "X")?;
    let two_theta = int(2) * theta;
    let obs_y = MarginalObservation::new(
        Rational::one(),
        (&two_theta - int(1)) / &two_theta,
        theta.clone(),
        "Y",
    )?;
    Ok((obs_x, obs_y))
}
