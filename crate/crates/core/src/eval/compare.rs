//! Pairwise win/tie/loss tables with the sign-test footer.

use super::stats::{binomial_test, ci_lower};
use std::fmt::Write as _;
use thiserror::Error;

/// Decimal places at which errors are compared.
pub const TIE_DECIMALS: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    A,
    B,
    Tie,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::A => "A",
            Outcome::B => "B",
            Outcome::Tie => "tie",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub stream: String,
    pub error_a: f64,
    pub error_b: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub label_a: String,
    pub label_b: String,
    pub rows: Vec<ComparisonRow>,
    pub wins_a: u64,
    pub wins_b: u64,
    pub ties: u64,
    /// One-tailed sign-test p-value for B's wins over A.
    pub p_value: f64,
    /// 95% lower bound on B's win proportion; 0 when every row tied.
    pub ci_lower: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompareError {
    #[error("result lists differ in length: {a} vs {b} (labels: {labels})")]
    LengthMismatch { a: usize, b: usize, labels: usize },
}

/// Error rounded to the comparison precision, as an integer.
pub fn rounded(error: f64) -> i64 {
    (error * 10f64.powi(TIE_DECIMALS)).round() as i64
}

/// Lower rounded error wins; equal rounded errors tie. B is the strategy
/// under test.
pub fn outcome(error_a: f64, error_b: f64) -> Outcome {
    match rounded(error_a).cmp(&rounded(error_b)) {
        std::cmp::Ordering::Less => Outcome::A,
        std::cmp::Ordering::Greater => Outcome::B,
        std::cmp::Ordering::Equal => Outcome::Tie,
    }
}

pub fn compare(
    results_a: &[f64],
    results_b: &[f64],
    streams: &[String],
    label_a: &str,
    label_b: &str,
) -> Result<ComparisonReport, CompareError> {
    if results_a.len() != results_b.len() || results_a.len() != streams.len() {
        return Err(CompareError::LengthMismatch { a: results_a.len(), b: results_b.len(), labels: streams.len() });
    }
    let rows: Vec<ComparisonRow> = streams
        .iter()
        .zip(results_a.iter().zip(results_b))
        .map(|(s, (&a, &b))| ComparisonRow { stream: s.clone(), error_a: a, error_b: b, outcome: outcome(a, b) })
        .collect();
    let count = |o: Outcome| rows.iter().filter(|r| r.outcome == o).count() as u64;
    let (wins_a, wins_b, ties) = (count(Outcome::A), count(Outcome::B), count(Outcome::Tie));
    Ok(ComparisonReport {
        label_a: label_a.to_string(),
        label_b: label_b.to_string(),
        rows,
        wins_a,
        wins_b,
        ties,
        p_value: binomial_test(wins_b, wins_a),
        ci_lower: ci_lower(wins_b, wins_a, 0.05).unwrap_or(0.0),
    })
}

/// Error formatted at the comparison precision.
pub fn fmt_error(e: f64) -> String {
    format!("{:.*}", TIE_DECIMALS as usize, e)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stream,error_a,error_b,outcome\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", csv_field(&r.stream), fmt_error(r.error_a), fmt_error(r.error_b), r.outcome.label());
        }
        out.push('\n');
        let _ = writeln!(out, "learner_a,{}", csv_field(&self.label_a));
        let _ = writeln!(out, "learner_b,{}", csv_field(&self.label_b));
        let _ = writeln!(out, "wins_a,{}", self.wins_a);
        let _ = writeln!(out, "wins_b,{}", self.wins_b);
        let _ = writeln!(out, "ties,{}", self.ties);
        let _ = writeln!(out, "p_value,{:.5}", self.p_value);
        let _ = writeln!(out, "ci_lower,{:.5}", self.ci_lower);
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| Streams | {} | {} |", self.label_a, self.label_b);
        out.push_str("|---|---:|---:|\n");
        for r in &self.rows {
            let (a, b) = (fmt_error(r.error_a), fmt_error(r.error_b));
            let (a, b) = match r.outcome {
                Outcome::A => (format!("**{a}**"), b),
                Outcome::B => (a, format!("**{b}**")),
                Outcome::Tie => (format!("***{a}***"), format!("***{b}***")),
            };
            let _ = writeln!(out, "| {} | {a} | {b} |", r.stream);
        }
        let _ = writeln!(out, "| **Unique Wins** | **{}** | **{}** |", self.wins_a, self.wins_b);
        let p = if self.p_value < 1e-5 { "< 0.00001".to_string() } else { format!("{:.5}", self.p_value) };
        let _ = writeln!(out, "| **Test Statistics** | p-value: {p} | Confidence Interval: {:.5} --- 1 |", self.ci_lower);
        out.push_str("\nBold marks the lower error, bold italics a tie at five decimals. ");
        out.push_str("The p-value is a one-tailed binomial test of the right column's wins against equiprobable wins and losses.\n");
        out
    }
}
