//! Rendering of reports as CSV, text and JSON.
//!
//! Every numeric CSV column `name` holds a 12-significant-digit decimal and is
//! followed by `name_exact` with the exact fraction.

use std::fmt::Write as _;

use scm_marginal::analysis::{BoundsReport, Interval};
use scm_marginal::experiment::{ExperimentSummary, SweepFrame, TrialRecord};
use scm_marginal::polytope::Polygon2;
use scm_marginal::rational::{decimal12, exact};
use scm_marginal::scm::ResponseVector4;
use scm_marginal::Rational;
use serde_json::{json, Value};

/// Ordered `(column, value)` pairs of one CSV record.
#[derive(Debug, Default, Clone)]
pub struct Row {
    cells: Vec<(String, String)>,
}

impl Row {
    pub fn text(&mut self, name: &str, value: impl ToString) -> &mut Self {
        self.cells.push((name.to_string(), value.to_string()));
        self
    }

    pub fn num(&mut self, name: &str, value: &Rational) -> &mut Self {
        self.text(name, decimal12(value));
        self.text(&format!("{name}_exact"), exact(value))
    }

    pub fn interval(&mut self, name: &str, iv: &Interval) -> &mut Self {
        self.num(&format!("{name}_lo"), &iv.lo);
        self.num(&format!("{name}_hi"), &iv.hi)
    }

    pub fn headers(&self) -> Vec<&str> {
        self.cells.iter().map(|(h, _)| h.as_str()).collect()
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.cells.iter().find(|(h, _)| h == name).map(|(_, v)| v.as_str())
    }
}

/// Writes rows under the union of their headers, in first-seen order; cells a
/// row lacks stay empty.
pub fn write_csv(rows: &[Row]) -> Result<String, csv::Error> {
    let mut headers: Vec<&str> = Vec::new();
    for r in rows {
        for h in r.headers() {
            if !headers.contains(&h) {
                headers.push(h);
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&headers)?;
    for r in rows {
        w.write_record(headers.iter().map(|h| r.get(h).unwrap_or("")))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn polygon_exact(p: &Polygon2) -> String {
    p.vertices()
        .iter()
        .map(|v| format!("{} {}", exact(&v.x), exact(&v.y)))
        .collect::<Vec<_>>()
        .join(";")
}

/// Merged intervals inside priors, polygon inside the merged box.
pub fn report_columns(row: &mut Row, report: &BoundsReport) {
    row.interval("lambda_a_prior", &report.lambda_a_prior)
        .interval("lambda_b_prior", &report.lambda_b_prior)
        .interval("lambda_a_merged", &report.lambda_a_merged)
        .interval("lambda_b_merged", &report.lambda_b_merged)
        .num("box_ratio", &report.area_ratio_box)
        .num("polygon_ratio", &report.area_ratio_polygon)
        .interval("gamma_x", &report.gamma_x)
        .interval("gamma_y", &report.gamma_y)
        .text("polygon_exact", polygon_exact(&report.polygon))
        .text("prop1_member", report.prop1_member);
}

pub fn trial_row(record: &TrialRecord, timing: bool) -> Row {
    let mut row = Row::default();
    let p = &record.params;
    row.text("record", "trial").text("index", record.index).text("seed", record.seed);
    row.num("theta_x", &p.theta_x).num("theta_y", &p.theta_y);
    for (k, cell) in ["00", "01", "10", "11"].iter().enumerate() {
        row.num(&format!("theta_z_given_{cell}"), &p.theta_z[k]);
    }
    report_columns(&mut row, &record.report);
    row.text("witness_valid", record.witness_valid);
    let audit = record.report.is_nested() && record.report.prop1_member && record.witness_valid;
    row.text("audit_ok", audit);
    if timing {
        row.text("wall_time_secs", format!("{:.6}", record.wall_time_secs));
    }
    row
}

pub fn summary_row(summary: &ExperimentSummary, records: &[TrialRecord], seed: u64) -> Row {
    let mut row = Row::default();
    let nested = records.iter().all(|r| r.report.is_nested());
    row.text("record", "summary").text("seed", seed).text("trials", summary.trials);
    row.text("prop1_member", summary.all_prop1)
        .text("witness_valid", summary.all_witnesses_valid)
        .text("audit_ok", nested && summary.all_prop1 && summary.all_witnesses_valid)
        .num("fraction_box_below_one", &summary.fraction_box_below_one)
        .num("fraction_polygon_below_one", &summary.fraction_polygon_below_one)
        .num("mean_box_reduction", &summary.mean_box_reduction)
        .num("mean_polygon_reduction", &summary.mean_polygon_reduction);
    row
}

fn show(x: &Rational) -> String {
    let d = decimal12(x);
    let e = exact(x);
    if d == e {
        e
    } else {
        format!("{e} ({d})")
    }
}

fn show_interval(iv: &Interval) -> String {
    format!("[{}, {}]", show(&iv.lo), show(&iv.hi))
}

fn show_vector(v: &ResponseVector4) -> String {
    let parts: Vec<String> = v.entries().iter().map(exact).collect();
    format!("({})", parts.join(", "))
}

/// Human-readable merge report.
pub fn pretty_report(
    report: &BoundsReport,
    unique_a: Option<&ResponseVector4>,
    unique_b: Option<&ResponseVector4>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "prior lambda_A:      {}", show_interval(&report.lambda_a_prior));
    let _ = writeln!(s, "prior lambda_B:      {}", show_interval(&report.lambda_b_prior));
    let _ = writeln!(s, "merged lambda_A:     {}", show_interval(&report.lambda_a_merged));
    let _ = writeln!(s, "merged lambda_B:     {}", show_interval(&report.lambda_b_merged));
    if let Some(v) = unique_a {
        let _ = writeln!(s, "response vector A:   {}", show_vector(v));
    }
    if let Some(v) = unique_b {
        let _ = writeln!(s, "response vector B:   {}", show_vector(v));
    }
    let _ = writeln!(s, "gamma_X:             {}", show_interval(&report.gamma_x));
    let _ = writeln!(s, "gamma_Y:             {}", show_interval(&report.gamma_y));
    let _ = writeln!(s, "box ratio:           {}", show(&report.area_ratio_box));
    let _ = writeln!(s, "polygon ratio:       {}", show(&report.area_ratio_polygon));
    let _ = writeln!(s, "polygon vertices:");
    for v in report.polygon.vertices() {
        let _ = writeln!(s, "  ({}, {})", show(&v.x), show(&v.y));
    }
    let _ = writeln!(s, "(lambda_A max, lambda_B max) feasible: {}", report.prop1_member);
    s
}

fn jnum(x: &Rational) -> Value {
    json!({ "exact": exact(x), "decimal": decimal12(x) })
}

fn jinterval(iv: &Interval) -> Value {
    json!({ "lo": jnum(&iv.lo), "hi": jnum(&iv.hi) })
}

fn jpolygon(p: &Polygon2) -> Value {
    Value::Array(p.vertices().iter().map(|v| json!([jnum(&v.x), jnum(&v.y)])).collect())
}

fn jvector(v: Option<&ResponseVector4>) -> Value {
    v.map_or(Value::Null, |v| Value::Array(v.entries().iter().map(jnum).collect()))
}

pub fn json_report(
    report: &BoundsReport,
    unique_a: Option<&ResponseVector4>,
    unique_b: Option<&ResponseVector4>,
) -> Value {
    json!({
        "lambda_a_prior": jinterval(&report.lambda_a_prior),
        "lambda_b_prior": jinterval(&report.lambda_b_prior),
        "lambda_a_merged": jinterval(&report.lambda_a_merged),
        "lambda_b_merged": jinterval(&report.lambda_b_merged),
        "response_vector_a": jvector(unique_a),
        "response_vector_b": jvector(unique_b),
        "polygon": jpolygon(&report.polygon),
        "box_ratio": jnum(&report.area_ratio_box),
        "polygon_ratio": jnum(&report.area_ratio_polygon),
        "gamma_x": jinterval(&report.gamma_x),
        "gamma_y": jinterval(&report.gamma_y),
        "prop1_member": report.prop1_member,
        "nested": report.is_nested(),
    })
}

/// One line-delimited JSON record per sweep cell.
pub fn sweep_line(index: usize, frame: &SweepFrame) -> String {
    json!({
        "frame": index,
        "p_x1": jnum(&frame.p_x1),
        "p_y1": jnum(&frame.p_y1),
        "prior": jpolygon(&frame.prior),
        "polygon": jpolygon(&frame.polygon),
        "box_ratio": jnum(&frame.report.area_ratio_box),
        "polygon_ratio": jnum(&frame.report.area_ratio_polygon),
        "differs_from_prior": frame.prior != frame.polygon,
    })
    .to_string()
}

pub fn pretty_summary(summary: &ExperimentSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "trials:                     {}", summary.trials);
    let _ = writeln!(s, "box ratio < 1:              {}", show(&summary.fraction_box_below_one));
    let _ = writeln!(s, "polygon ratio < 1:          {}", show(&summary.fraction_polygon_below_one));
    let _ = writeln!(s, "mean box reduction:         {}", show(&summary.mean_box_reduction));
    let _ = writeln!(s, "mean polygon reduction:     {}", show(&summary.mean_polygon_reduction));
    let _ = writeln!(s, "all (lambda max) feasible:  {}", summary.all_prop1);
    let _ = writeln!(s, "all witnesses valid:        {}", summary.all_witnesses_valid);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use scm_marginal::rational::q;

    #[test]
    fn csv_union_of_headers() {
        let mut a = Row::default();
        a.text("record", "trial").num("x", &q(1, 3));
        let mut b = Row::default();
        b.text("record", "summary").text("n", 2);
        let out = write_csv(&[a, b]).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "record,x,x_exact,n");
        assert_eq!(lines[1], "trial,0.333333333333,1/3,");
        assert_eq!(lines[2], "summary,,,2");
    }
}
