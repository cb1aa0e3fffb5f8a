//! Random instance generation and the Monte-Carlo harness.
//!
//! Instances come from a joint distribution `P(X) P(Y) P(Z | X, Y)` with
//! `θ_X = P(X=1)`, `θ_Y = P(Y=1)` uniform and `P(Z=1 | x, y) ~ Beta(α, β)`, so
//! both marginals are statistically mergeable by construction. Every trial
//! owns a ChaCha stream selected by its index, which keeps results identical
//! for any number of worker threads.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::analysis::{bounds_report, prop1_witness, BoundsReport};
use crate::error::{Error, Result};
use crate::merge::build_merge_problem;
use crate::polytope::{Point2, Polygon2};
use crate::rational::{self, q, Rational, MICRO};
use crate::scm::MarginalObservation;

/// Joint-form parametrisation; `theta_z[2x + y] = P(Z=1 | X=x, Y=y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointParams {
    pub theta_x: Rational,
    pub theta_y: Rational,
    pub theta_z: [Rational; 4],
}

impl JointParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("theta_x", &self.theta_x),
            ("theta_y", &self.theta_y),
            ("theta_z_given_00", &self.theta_z[0]),
            ("theta_z_given_01", &self.theta_z[1]),
            ("theta_z_given_10", &self.theta_z[2]),
            ("theta_z_given_11", &self.theta_z[3]),
        ];
        for (name, v) in named {
            if !rational::is_probability(v) {
                return Err(Error::InvalidProbability { name: name.into(), value: v.to_string() });
            }
        }
        Ok(())
    }

    /// The two marginal observations implied by the joint distribution.
    pub fn observations(&self) -> Result<(MarginalObservation, MarginalObservation)> {
        self.validate()?;
        let one = rational::one();
        let px = [&one - &self.theta_x, self.theta_x.clone()];
        let py = [&one - &self.theta_y, self.theta_y.clone()];
        let p0 = |x: usize, y: usize| &one - &self.theta_z[2 * x + y];
        let x_kernel = |x: usize| &py[0] * p0(x, 0) + &py[1] * p0(x, 1);
        let y_kernel = |y: usize| &px[0] * p0(0, y) + &px[1] * p0(1, y);
        let obs_x = MarginalObservation::new(x_kernel(0), x_kernel(1), self.theta_x.clone(), "X")?;
        let obs_y = MarginalObservation::new(y_kernel(0), y_kernel(1), self.theta_y.clone(), "Y")?;
        Ok((obs_x, obs_y))
    }
}

/// Inverse-CDF sampler for `Beta(α, β)` over a fixed table.
///
/// The CDF is tabulated on 2049 Chebyshev-spaced abscissae (dense near 0 and
/// 1, where the density of `α, β < 1` blows up) and inverted by binary search
/// plus linear interpolation. Draws are rounded to multiples of `1e-6`.
#[derive(Debug, Clone)]
pub struct BetaSampler {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl BetaSampler {
    pub const TABLE_SIZE: usize = 2049;

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Parse(format!("Beta parameters must be positive, got ({alpha}, {beta})")));
        }
        let n = Self::TABLE_SIZE - 1;
        let xs: Vec<f64> = (0..=n)
            .map(|i| 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / n as f64).cos()))
            .collect();
        let mut cdf: Vec<f64> = xs
            .iter()
            .map(|&x| {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    beta_reg(alpha, beta, x)
                }
            })
            .collect();
        cdf[0] = 0.0;
        cdf[n] = 1.0;
        for i in 1..cdf.len() {
            if cdf[i] < cdf[i - 1] {
                cdf[i] = cdf[i - 1];
            }
        }
        Ok(Self { xs, cdf })
    }

    /// Quantile of `u ∈ [0, 1]` as an `f64`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let hi = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let lo = hi - 1;
        let (c0, c1) = (self.cdf[lo], self.cdf[hi]);
        let (x0, x1) = (self.xs[lo], self.xs[hi]);
        if c1 > c0 {
            x0 + (x1 - x0) * (u - c0) / (c1 - c0)
        } else {
            x0
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Rational {
        let x = self.quantile(rng.random::<f64>());
        let k = (x * MICRO as f64).round().clamp(0.0, MICRO as f64) as i64;
        q(k, MICRO)
    }
}

/// RNG for trial `index` under master `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `θ_X, θ_Y` uniformly from `{1, …, 999999}/10⁶` and the four
/// conditionals from the Beta sampler.
pub fn sample_params<R: Rng + ?Sized>(rng: &mut R, sampler: &BetaSampler) -> JointParams {
    let mut cause = || q(rng.random_range(1..MICRO), MICRO);
    let theta_x = cause();
    let theta_y = cause();
    let theta_z = [sampler.sample(rng), sampler.sample(rng), sampler.sample(rng), sampler.sample(rng)];
    JointParams { theta_x, theta_y, theta_z }
}

/// One row of the experiment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub params: JointParams,
    pub obs_x: MarginalObservation,
    pub obs_y: MarginalObservation,
    pub report: BoundsReport,
    /// The constructive witness lies in the feasible polytope.
    pub witness_valid: bool,
    pub wall_time_secs: f64,
}

impl TrialRecord {
    pub fn prop1_member(&self) -> bool {
        self.report.prop1_member
    }
}

/// Builds and analyses one instance.
pub fn analyse_params(index: u64, seed: u64, params: JointParams) -> Result<TrialRecord> {
    let start = Instant::now();
    let (obs_x, obs_y) = params.observations()?;
    let problem = build_merge_problem(&obs_x, &obs_y)?;
    let report = bounds_report(&problem)?;
    let witness = prop1_witness(&obs_x, &obs_y)?;
    let witness_valid = problem.polytope.contains(witness.entries())
        && problem.a.mul_vec(witness.entries())[0] == problem.family_a.lambda_max
        && problem.b.mul_vec(witness.entries())[0] == problem.family_b.lambda_max;
    Ok(TrialRecord {
        index,
        seed,
        params,
        obs_x,
        obs_y,
        report,
        witness_valid,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

pub fn run_trial(seed: u64, index: u64, sampler: &BetaSampler) -> Result<TrialRecord> {
    let mut rng = trial_rng(seed, index);
    let params = sample_params(&mut rng, sampler);
    analyse_params(index, seed, params)
}

/// Runs `n` trials in parallel; records come back sorted by index.
pub fn run_experiment(n: u64, alpha: f64, beta: f64, seed: u64) -> Result<Vec<TrialRecord>> {
    let sampler = BetaSampler::new(alpha, beta)?;
    let mut records = (0..n)
        .into_par_iter()
        .map(|i| run_trial(seed, i, &sampler))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| r.index);
    Ok(records)
}

/// Aggregates over a batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub trials: usize,
    pub box_below_one: usize,
    pub polygon_below_one: usize,
    /// Fraction of trials with box ratio `< 1`.
    pub fraction_box_below_one: Rational,
    pub fraction_polygon_below_one: Rational,
    /// Mean of `1 − box ratio`.
    pub mean_box_reduction: Rational,
    pub mean_polygon_reduction: Rational,
    pub all_prop1: bool,
    pub all_witnesses_valid: bool,
}

pub fn summarize(records: &[TrialRecord]) -> ExperimentSummary {
    let n = records.len();
    let one = rational::one();
    let box_below = records.iter().filter(|r| r.report.area_ratio_box < one).count();
    let poly_below = records.iter().filter(|r| r.report.area_ratio_polygon < one).count();
    let denom = rational::int(n.max(1) as i64);
    let box_red: Rational = records.iter().map(|r| &one - &r.report.area_ratio_box).sum();
    let poly_red: Rational = records.iter().map(|r| &one - &r.report.area_ratio_polygon).sum();
    ExperimentSummary {
        trials: n,
        box_below_one: box_below,
        polygon_below_one: poly_below,
        fraction_box_below_one: rational::int(box_below as i64) / &denom,
        fraction_polygon_below_one: rational::int(poly_below as i64) / &denom,
        mean_box_reduction: box_red / &denom,
        mean_polygon_reduction: poly_red / &denom,
        all_prop1: records.iter().all(TrialRecord::prop1_member),
        all_witnesses_valid: records.iter().all(|r| r.witness_valid),
    }
}

/// Conditional table of the generic sweep, `P(Z=1 | x, y)` in cell order
/// `00, 01, 10, 11`.
pub fn generic_conditionals() -> [Rational; 4] {
    [q(3, 10), q(4, 5), q(3, 10), q(7, 10)]
}

/// `Z := X ⊕ Y`.
pub fn xor_conditionals() -> [Rational; 4] {
    [q(0, 1), q(1, 1), q(1, 1), q(0, 1)]
}

/// One cell of a cause-marginal sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepFrame {
    pub p_x1: Rational,
    pub p_y1: Rational,
    /// Corners of the prior rectangle (counterclockwise).
    pub prior: Polygon2,
    pub polygon: Polygon2,
    pub report: BoundsReport,
}

/// Sweeps `P(X=1), P(Y=1)` over the interior grid `{i/(n+1)}` for fixed
/// conditionals.
pub fn sweep(conditionals: &[Rational; 4], grid: usize) -> Result<Vec<SweepFrame>> {
    let den = grid as i64 + 1;
    let cells: Vec<(i64, i64)> = (1..=grid as i64).flat_map(|i| (1..=grid as i64).map(move |j| (i, j))).collect();
    cells
        .into_par_iter()
        .map(|(i, j)| {
            let params = JointParams { theta_x: q(i, den), theta_y: q(j, den), theta_z: conditionals.clone() };
            let (obs_x, obs_y) = params.observations()?;
            let report = bounds_report(&build_merge_problem(&obs_x, &obs_y)?)?;
            let (a, b) = (&report.lambda_a_prior, &report.lambda_b_prior);
            let prior = Polygon2::hull(vec![
                Point2::new(a.lo.clone(), b.lo.clone()),
                Point2::new(a.hi.clone(), b.lo.clone()),
                Point2::new(a.hi.clone(), b.hi.clone()),
                Point2::new(a.lo.clone(), b.hi.clone()),
            ]);
            Ok(SweepFrame { p_x1: params.theta_x, p_y1: params.theta_y, prior, polygon: report.polygon.clone(), report })
        })
        .collect()
}

/// The medication example: a 50/50 treatment with recovery kernels
/// `1/2, 2/5` and a second study with `P(Y=1) = 2/5`.
pub fn medication_observations() -> (MarginalObservation, MarginalObservation) {
    let x = MarginalObservation::new(q(1, 2), q(2, 5), q(1, 2), "X").expect("valid constants");
    let y = MarginalObservation::new(q(1, 12), q(1, 1), q(2, 5), "Y").expect("valid constants");
    (x, y)
}
