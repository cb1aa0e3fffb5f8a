//! Acceptance suite. Runs every criterion in sequence, prints one PASS/FAIL
//! line each, and exits non-zero if any criterion fails.
//!
//! Run alone with `cargo test -p scm-marginal --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use scm_marginal::analysis::{and_model_observations, bounds_report, lemma1_interval, prop1_witness, Interval};
use scm_marginal::confounded::{
    confounded_polytope, confounded_query_bounds_many, embed_unconfounded, response_weight_a, response_weight_b,
    ConfoundedInputs, Monotonicity,
};
use scm_marginal::experiment::{
    medication_observations, run_experiment, sample_params, summarize, trial_rng, BetaSampler,
};
use scm_marginal::merge::{build_merge_problem, MergeProblem};
use scm_marginal::oracle::{exhaustive_projection_check, sample_feasible_c, scan_lemma1, vertex_raw_check, RawChecker};
use scm_marginal::polytope::{directional_extremes, enumerate_vertices, project_hull, PreparedLp, Sense};
use scm_marginal::rational::{int, q, to_f64};
use scm_marginal::scm::{enumerate_binary, MarginalObservation};
use scm_marginal::{Error, Rational};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_instance(seed: u64, index: u64) -> (MarginalObservation, MarginalObservation) {
    let sampler = BetaSampler::new(1.0, 1.0).expect("uniform prior");
    let params = sample_params(&mut trial_rng(seed, index), &sampler);
    params.observations().expect("joint-form instances are valid")
}

fn random_problem(seed: u64, index: u64) -> MergeProblem {
    let (x, y) = random_instance(seed, index);
    build_merge_problem(&x, &y).expect("joint-form instances are mergeable")
}

fn err(e: Error) -> String {
    e.to_string()
}

fn worked_example() -> Outcome {
    for theta in [q(1, 2), q(3, 5), q(3, 4), q(9, 10)] {
        let (x, y) = and_model_observations(&theta).map_err(err)?;
        let report = bounds_report(&build_merge_problem(&x, &y).map_err(err)?).map_err(err)?;
        let expected = Interval::new(int(1) - &theta, q(1, 2));
        let star = (int(2) * &theta - int(1)) / (int(2) * &theta);
        ensure(report.lambda_a_merged == expected, || {
            format!("theta {theta}: merged lambda_A {:?}", report.lambda_a_merged)
        })?;
        ensure(report.lambda_b_merged == Interval::point(star.clone()), || {
            format!("theta {theta}: merged lambda_B {:?}, expected {star}", report.lambda_b_merged)
        })?;
    }
    Ok("theta in {1/2, 3/5, 3/4, 9/10}: merged lambda_A = [1-theta, 1/2], lambda_B* exact".into())
}

fn medication() -> Outcome {
    let (x, y) = medication_observations();
    let problem = build_merge_problem(&x, &y).map_err(err)?;
    let report = bounds_report(&problem).map_err(err)?;
    ensure(report.lambda_a_merged == Interval::point(q(2, 5)), || {
        format!("merged lambda_A {:?}", report.lambda_a_merged)
    })?;
    let expected = [q(2, 5), q(1, 2), q(1, 10), int(0)];
    let vector = problem.family_a.response_vector(&q(2, 5)).map_err(err)?;
    ensure(vector.entries() == &expected, || format!("response vector {:?}", vector.entries()))?;
    let vertices = enumerate_vertices(&problem.polytope).map_err(err)?;
    for v in &vertices {
        let a = problem.a.mul_vec(&v.coordinates);
        ensure(a == expected, || format!("vertex with A c = {a:?}"))?;
    }
    Ok(format!("lambda_A = [2/5, 2/5], response vector (2/5, 1/2, 1/10, 0) at all {} vertices", vertices.len()))
}

fn corner_feasibility() -> Outcome {
    let records = run_experiment(1000, 1.0, 1.0, 20_231).map_err(err)?;
    for r in &records {
        ensure(r.report.prop1_member, || format!("trial {}: (lambda_A max, lambda_B max) outside", r.index))?;
        ensure(r.witness_valid, || format!("trial {}: witness violates the constraints", r.index))?;
        let witness = prop1_witness(&r.obs_x, &r.obs_y).map_err(err)?;
        let raw = RawChecker::new(&r.obs_x, &r.obs_y).check(witness.entries());
        ensure(raw.is_some(), || format!("trial {}: witness fails direct substitution", r.index))?;
    }
    Ok(format!("{} trials: corner in polygon and witness exact", records.len()))
}

fn fig3c() -> Outcome {
    let uniform = summarize(&run_experiment(1000, 1.0, 1.0, 7).map_err(err)?);
    let arcsine = summarize(&run_experiment(1000, 0.5, 0.5, 7).map_err(err)?);
    let threshold = q(1, 5);
    ensure(uniform.fraction_box_below_one >= threshold, || {
        format!("alpha=beta=1: fraction {}", to_f64(&uniform.fraction_box_below_one))
    })?;
    ensure(arcsine.fraction_box_below_one >= threshold, || {
        format!("alpha=beta=0.5: fraction {}", to_f64(&arcsine.fraction_box_below_one))
    })?;
    ensure(arcsine.mean_box_reduction > uniform.mean_box_reduction, || {
        format!(
            "mean reduction 0.5: {:.4} <= 1: {:.4}",
            to_f64(&arcsine.mean_box_reduction),
            to_f64(&uniform.mean_box_reduction)
        )
    })?;
    Ok(format!(
        "box ratio < 1: {:.3} (a=b=1), {:.3} (a=b=0.5); mean reduction {:.4} < {:.4}",
        to_f64(&uniform.fraction_box_below_one),
        to_f64(&arcsine.fraction_box_below_one),
        to_f64(&uniform.mean_box_reduction),
        to_f64(&arcsine.mean_box_reduction)
    ))
}

fn cross_method() -> Outcome {
    let mut vertex_total = 0;
    for i in 0..200 {
        let p = random_problem(555, i);
        let vertices = enumerate_vertices(&p.polytope).map_err(err)?;
        vertex_total += vertices.len();
        let hull = project_hull(&vertices, &p.projection);
        let directional = directional_extremes(&p.polytope, &p.projection).map_err(err)?;
        ensure(hull == directional, || format!("instance {i}: hulls differ"))?;
        let mut lp = PreparedLp::new(&p.polytope).map_err(err)?;
        for (objective, extent) in [
            (p.lambda_a_objective(), hull.x_extent()),
            (p.lambda_b_objective(), hull.y_extent()),
        ] {
            let lo = lp.solve(&objective, Sense::Min).optimum().map_err(err)?;
            let hi = lp.solve(&objective, Sense::Max).optimum().map_err(err)?;
            ensure(Some((lo, hi)) == extent, || format!("instance {i}: LP extremes differ from polygon extent"))?;
        }
    }
    Ok(format!("200 instances ({vertex_total} vertices): hulls identical, extents match LP"))
}

fn oracle_equivalence() -> Outcome {
    let (mut tested, mut feasible, mut vertices) = (0, 0, 0);
    for i in 0..50 {
        let p = random_problem(8_888, i);
        let r = sample_feasible_c(&p, 10_000, i).map_err(err)?;
        ensure(r.contradictions() == 0, || format!("instance {i}: {r:?}"))?;
        let (count, failures) = vertex_raw_check(&p).map_err(err)?;
        ensure(failures == 0, || format!("instance {i}: {failures} of {count} vertices fail substitution"))?;
        tested += r.tested;
        feasible += r.feasible_inside_polygon;
        vertices += count;
    }
    Ok(format!("{tested} samples ({feasible} feasible), {vertices} vertices: zero contradictions"))
}

fn q00_interval() -> Outcome {
    for i in 0..500 {
        let (x, y) = random_instance(31_337, i);
        let iv = lemma1_interval(&x, &y).map_err(err)?;
        ensure(iv.is_some(), || format!("instance {i}: empty interval"))?;
        ensure(scan_lemma1(&x, &y, 1000).map_err(err)?, || format!("instance {i}: grid scan disagrees"))?;
    }
    Ok("500 instances: interval nonempty, grid scan of 1000 points agrees".into())
}

fn contains(outer: &(Rational, Rational), inner: &(Rational, Rational)) -> bool {
    outer.0 <= inner.0 && inner.1 <= outer.1
}

/// `None` stands for an empty feasible set, which is contained in anything.
fn bounds(inputs: &ConfoundedInputs, objectives: &[Vec<Rational>]) -> std::result::Result<Option<Vec<(Rational, Rational)>>, String> {
    match confounded_query_bounds_many(inputs, objectives) {
        Ok(b) => Ok(Some(b)),
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn nested(outer: &Option<Vec<(Rational, Rational)>>, inner: &Option<Vec<(Rational, Rational)>>) -> bool {
    match (outer, inner) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(o), Some(i)) => o.iter().zip(i).all(|(o, i)| contains(o, i)),
    }
}

fn confounded_embedding() -> Outcome {
    let objectives: Vec<Vec<Rational>> = (0..4).map(response_weight_a).chain((0..4).map(response_weight_b)).collect();
    let mut infeasible_restrictions = 0;
    for i in 0..100 {
        let (x, y) = random_instance(4_242, i);
        let problem = build_merge_problem(&x, &y).map_err(err)?;
        let report = bounds_report(&problem).map_err(err)?;
        let plain = ConfoundedInputs::from_unconfounded(&x, &y, false);
        let with_iv = ConfoundedInputs::from_unconfounded(&x, &y, true);

        let witness = prop1_witness(&x, &y).map_err(err)?;
        let point = embed_unconfounded(witness.entries(), &x.cause1, &y.cause1);
        ensure(confounded_polytope(&with_iv).map_err(err)?.contains(&point), || {
            format!("instance {i}: embedded witness violates the confounded constraints")
        })?;

        let base = bounds(&plain, &objectives)?;
        let Some(base_bounds) = &base else {
            return Err(format!("instance {i}: confounded LP infeasible"));
        };
        let a = (report.lambda_a_merged.lo.clone(), report.lambda_a_merged.hi.clone());
        let b = (report.lambda_b_merged.lo.clone(), report.lambda_b_merged.hi.clone());
        ensure(contains(&base_bounds[0], &a) && contains(&base_bounds[4], &b), || {
            format!("instance {i}: confounded bounds do not contain the unconfounded ones")
        })?;

        let iv = bounds(&with_iv, &objectives)?;
        ensure(iv.is_some(), || format!("instance {i}: LP with consistent interventional data infeasible"))?;
        let both = Monotonicity { x: true, y: true };
        let mono = bounds(&ConfoundedInputs { monotonic: both, ..plain.clone() }, &objectives)?;
        let iv_mono = bounds(&ConfoundedInputs { monotonic: both, ..with_iv.clone() }, &objectives)?;
        infeasible_restrictions += mono.is_none() as usize + iv_mono.is_none() as usize;
        ensure(nested(&base, &iv), || format!("instance {i}: interventional data widened a bound"))?;
        ensure(nested(&base, &mono), || format!("instance {i}: monotonicity widened a bound"))?;
        ensure(nested(&iv, &iv_mono), || format!("instance {i}: monotonicity widened a bound with do-data"))?;
        ensure(nested(&mono, &iv_mono), || format!("instance {i}: do-data widened a bound under monotonicity"))?;
    }
    Ok(format!(
        "100 inputs: feasible, contain unconfounded bounds, restrictions never widen ({infeasible_restrictions} restricted LPs infeasible)"
    ))
}

const TABLE_1: [&str; 4] = [
    "0101010101010101",
    "0011001100110011",
    "0000111100001111",
    "0000000011111111",
];

fn table_fidelity() -> Outcome {
    let mut cells = 0;
    for (k, h) in enumerate_binary().into_iter().enumerate() {
        ensure(h.id() == k, || format!("h{k} enumerated out of order"))?;
        for (row, (x, y)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            let expected = TABLE_1[row].as_bytes()[k] - b'0';
            ensure(h.eval(x, y) == expected, || format!("h{k}({x},{y}) = {}", h.eval(x, y)))?;
            cells += 1;
        }
    }
    ensure(exhaustive_projection_check(), || "projection check failed".into())?;
    Ok(format!("{cells} cells match, 64 projections agree"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1", "worked example", Duration::from_secs(1), worked_example),
        ("2", "medication regression", Duration::from_secs(1), medication),
        ("3", "corner feasibility", Duration::from_secs(300), corner_feasibility),
        ("4", "area-ratio study", Duration::from_secs(600), fig3c),
        ("5", "cross-method geometry", Duration::from_secs(120), cross_method),
        ("6", "oracle equivalence", Duration::from_secs(600), oracle_equivalence),
        ("7", "q00 interval", Duration::from_secs(120), q00_interval),
        ("8", "confounded embedding", Duration::from_secs(300), confounded_embedding),
        ("9", "table fidelity", Duration::from_secs(1), table_fidelity),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if elapsed <= limit => Ok(detail),
            Ok(detail) => Err(format!("{detail}; exceeded {limit:?}")),
            Err(e) => Err(e),
        };
        match verdict {
            Ok(detail) => println!("PASS criterion {id} ({name}) [{:.2}s]: {detail}", elapsed.as_secs_f64()),
            Err(e) => {
                failures += 1;
                println!("FAIL criterion {id} ({name}) [{:.2}s]: {e}", elapsed.as_secs_f64());
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
