use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scmarg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scmarg")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const MEDICATION: &str = "p_z0_given_x0 = \"1/2\"\np_z0_given_x1 = 0.4\np_z0_given_y0 = \"1/12\"\n\
                          p_z0_given_y1 = 1\np_x1 = 0.5\np_y1 = 0.4\n";

#[test]
fn merge_medication_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "med.toml", MEDICATION);
    let json = dir.path().join("med.json");
    let o = scmarg(&["merge", input.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("merged lambda_A:     [2/5 (0.4), 2/5 (0.4)]"), "{text}");
    assert!(text.contains("response vector A:   (2/5, 1/2, 1/10, 0)"), "{text}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report["lambda_a_merged"]["lo"]["exact"], "2/5");
    assert_eq!(report["prop1_member"], true);
}

#[test]
fn merge_and_example_joint_and_marginal() {
    let dir = tempfile::tempdir().unwrap();
    // theta = 3/4 in marginal form
    let input = write(
        dir.path(),
        "and.toml",
        "p_z0_given_x0 = 0.5\np_z0_given_x1 = 0.5\np_z0_given_y0 = 1\np_z0_given_y1 = \"1/3\"\np_x1 = 0.5\np_y1 = 0.75\n",
    );
    let o = scmarg(&["merge", input.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("lambda_a_merged_lo_exact"), "1/4");
    assert_eq!(col("lambda_a_merged_hi_exact"), "1/2");
    assert_eq!(col("audit_ok"), "true");

    // AND gate with X, Y uniform
    let joint = write(
        dir.path(),
        "joint.toml",
        "theta_x = 0.5\ntheta_y = 0.5\ntheta_z_given_00 = 0\ntheta_z_given_01 = 0\ntheta_z_given_10 = 0\ntheta_z_given_11 = 1\n",
    );
    assert_eq!(scmarg(&["merge", joint.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn merge_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inconsistent = write(
        dir.path(),
        "bad.toml",
        "p_z0_given_x0 = 0.5\np_z0_given_x1 = 0.5\np_z0_given_y0 = 1\np_z0_given_y1 = 1\np_x1 = 0.5\np_y1 = 0.5\n",
    );
    assert_eq!(scmarg(&["merge", inconsistent.to_str().unwrap()]).status.code(), Some(2));
    let malformed = write(dir.path(), "junk.toml", "p_z0_given_x0 = \"abc\"\n");
    assert_eq!(scmarg(&["merge", malformed.to_str().unwrap()]).status.code(), Some(1));
    let missing = dir.path().join("absent.toml");
    assert_eq!(scmarg(&["merge", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn example_and_default_grid() {
    let o = scmarg(&["example-and"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 21);
    assert!(lines[1].starts_with("0.52380952381,11/21,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));

    let o = scmarg(&["example-and", "--theta", "1/2,0.9"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].contains(",1/2,0.5,1/2,"), "{}", lines[1]);
    assert_eq!(scmarg(&["example-and", "--theta", "1"]).status.code(), Some(1));
}

#[test]
fn experiment_is_reproducible() {
    let run = || stdout(&scmarg(&["experiment", "--n", "12", "--seed", "5", "--alpha", "0.5", "--beta", "1/2"]));
    let first = run();
    assert_eq!(first, run());
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines.len(), 14);
    assert!(lines[0].starts_with("record,index,seed,theta_x,theta_x_exact"));
    assert!(!lines[0].contains("wall_time"));
    assert!(lines.last().unwrap().starts_with("summary,"));
    let audit = lines[0].split(',').position(|h| h == "audit_ok").unwrap();
    for l in &lines[1..] {
        assert_eq!(l.split(',').nth(audit), Some("true"), "{l}");
    }
    let timed = stdout(&scmarg(&["experiment", "--n", "2", "--timing"]));
    assert!(timed.lines().next().unwrap().contains("wall_time_secs"));
    assert_eq!(scmarg(&["experiment", "--n", "2", "--alpha", "0"]).status.code(), Some(1));
}

#[test]
fn sweep_frames() {
    let one = stdout(&scmarg(&["sweep", "--grid", "1"]));
    assert_eq!(one.lines().count(), 1);
    let frame: serde_json::Value = serde_json::from_str(one.lines().next().unwrap()).unwrap();
    assert_eq!(frame["p_x1"]["exact"], "1/2");
    assert_eq!(frame["differs_from_prior"], true);
    let xor = stdout(&scmarg(&["sweep", "--conditionals", "xor", "--grid", "2"]));
    assert_eq!(xor.lines().count(), 4);
    assert_eq!(scmarg(&["sweep", "--conditionals", "0.1,0.2"]).status.code(), Some(1));
}

#[test]
fn confounded_commands() {
    let dir = tempfile::tempdir().unwrap();
    let obs = write(
        dir.path(),
        "obs.toml",
        "alpha_00 = 0.5\nalpha_01 = 0\nalpha_10 = 0\nalpha_11 = 0.5\nbeta_00 = 0.5\nbeta_01 = 0\nbeta_10 = 0\nbeta_11 = 0.5\n",
    );
    let iv = write(dir.path(), "do.toml", "do0_z0 = 1\ndo0_z1 = 0\ndo1_z0 = 0\ndo1_z1 = 1\n");
    let (o, i) = (obs.to_str().unwrap(), iv.to_str().unwrap());
    let out = scmarg(&[
        "confounded", o, "--do-x", i, "--do-y", i, "--monotonic-x", "--monotonic-y", "--objective", "pa(2)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("bounds: [1, 1]"), "{text}");
    assert!(text.contains("equality constraints: 37"), "{text}");

    assert_eq!(scmarg(&["confounded", o, "--objective", "pa(9)"]).status.code(), Some(1));
    assert_eq!(scmarg(&["confounded", o, "--objective", "cfx(1,1|0,0,0)"]).status.code(), Some(1));

    let clash = write(
        dir.path(),
        "clash.toml",
        "alpha_00 = 0.25\nalpha_01 = 0.25\nalpha_10 = 0.25\nalpha_11 = 0.25\nbeta_00 = 0.5\nbeta_01 = 0\nbeta_10 = 0.5\nbeta_11 = 0\n",
    );
    let out = scmarg(&["confounded", clash.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("status: infeasible"));
}
