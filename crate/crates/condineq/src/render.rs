//! JSON and plain-text rendering.
//!
//! JSON carries logs rounded to 12 significant digits; `slack_log` is the
//! difference of the rounded values, so re-parsing a report and recomputing
//! its slacks reproduces them exactly. Text shows 4 decimals of the same
//! rounded values.

use std::fmt::Write as _;

use condineq_core::detineq::{diagnostics_consistent, BoundReport, EigenParams};
use condineq_core::submodular::{HanEqualityReport, PartitionEqualityReport};
use condineq_core::verify::SuiteResult;
use serde::{Deserialize, Serialize};

pub const JSON_DIGITS: usize = 12;

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

pub fn round12(x: f64) -> f64 {
    round_sig(x, JSON_DIGITS)
}

/// The report with presentation rounding applied.
pub fn rounded_report(r: &BoundReport) -> BoundReport {
    let mut out = r.clone();
    out.log_det = round12(r.log_det);
    for e in &mut out.entries {
        e.log_bound = round12(e.log_bound);
        e.reference_log = round12(e.reference_log);
        e.bound = round12(e.log_bound.exp());
        e.slack_log = e.log_bound - e.reference_log;
    }
    for c in &mut out.ordering_checks {
        c.lhs = round12(c.lhs);
        c.rhs = round12(c.rhs);
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn bounds_json(r: &BoundReport) -> String {
    to_json(&rounded_report(r))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn bounds_text(r: &BoundReport) -> String {
    let r = rounded_report(r);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "matrix {} (n = {})  |K| = {:.4}  ln|K| = {:.4}",
        r.matrix_label,
        r.n,
        r.log_det.exp(),
        r.log_det
    );
    if let Some(perm) = &r.permutation {
        let text: Vec<String> = perm.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "reordered as [{}]", text.join(","));
    }
    let rows: Vec<[String; 6]> = r
        .entries
        .iter()
        .map(|e| {
            [
                e.name.clone(),
                e.params.to_string(),
                format!("{:.4}", e.bound),
                format!("{:.4}", e.log_bound),
                format!("{:.4}", e.slack_log),
                yes_no(e.equality).to_string(),
            ]
        })
        .collect();
    let header = [
        "bound", "params", "value", "ln value", "ln slack", "equality",
    ];
    s.push_str(&table(&header, &rows));
    let failed: Vec<_> = r.ordering_checks.iter().filter(|c| !c.holds).collect();
    let _ = writeln!(
        s,
        "ordering checks: {} passed, {} failed",
        r.ordering_checks.len() - failed.len(),
        failed.len()
    );
    for c in failed {
        let _ = writeln!(s, "  FAIL {} ({:.6} vs {:.6})", c.description, c.lhs, c.rhs);
    }
    if !r.diagnostics.is_empty() {
        let _ = writeln!(
            s,
            "equality diagnostics: {} conditions, {} hold, {}",
            r.diagnostics.len(),
            r.diagnostics.iter().filter(|d| d.holds).count(),
            if diagnostics_consistent(&r.diagnostics) {
                "consistent with observed equalities"
            } else {
                "INCONSISTENT with observed equalities"
            }
        );
        for d in r
            .diagnostics
            .iter()
            .filter(|d| d.holds || d.observed_equality)
        {
            let _ = writeln!(
                s,
                "  {}: {} [{}]{}",
                d.link,
                d.condition,
                if d.holds { "holds" } else { "fails" },
                if d.observed_equality {
                    ", equality observed"
                } else {
                    ""
                }
            );
        }
    }
    s
}

/// Left-aligned text columns separated by two spaces.
pub fn table<const N: usize>(header: &[&str; N], rows: &[[String; N]]) -> String {
    let mut widths = header.map(str::len);
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut s = String::new();
    let line = |cells: Vec<&str>, s: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(s, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec(), &mut s);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut s);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub matrix: String,
    pub n: usize,
    pub params: EigenParams,
    pub log_bound: f64,
    pub bound: f64,
    /// `Σ_{i ≤ h+ℓ} ln λ_i`.
    pub log_eigen_product: f64,
    pub eigen_product: f64,
    pub slack_log: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub holds: bool,
}

impl EigenReport {
    pub fn rounded(&self) -> EigenReport {
        let log_bound = round12(self.log_bound);
        let log_eigen_product = round12(self.log_eigen_product);
        EigenReport {
            log_bound,
            bound: round12(log_bound.exp()),
            log_eigen_product,
            eigen_product: round12(log_eigen_product.exp()),
            slack_log: log_bound - log_eigen_product,
            eigenvalues: self.eigenvalues.iter().map(|&v| round12(v)).collect(),
            ..self.clone()
        }
    }

    pub fn text(&self) -> String {
        let r = self.rounded();
        let EigenParams { h, p, l, k } = r.params;
        let values: Vec<String> = r.eigenvalues.iter().map(|v| format!("{v:.4}")).collect();
        let mut s = String::new();
        let _ = writeln!(s, "matrix {} (n = {})", r.matrix, r.n);
        let _ = writeln!(s, "eigenvalues (ascending): {}", values.join(", "));
        let _ = writeln!(s, "params: h={h} p={p} l={l} k={k}");
        let _ = writeln!(s, "bound on product of {} smallest: {:.4}", h + l, r.bound);
        let _ = writeln!(s, "actual product: {:.4}", r.eigen_product);
        let _ = writeln!(
            s,
            "ln slack: {:.4}  holds: {}",
            r.slack_log,
            yes_no(r.holds)
        );
        s
    }
}

/// Determinant-domain view of an entropy value: `exp(2h − n·ln(2πe))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminantView {
    pub value: f64,
    pub inner: f64,
    pub outer: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HanRow {
    #[serde(flatten)]
    pub report: HanEqualityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub determinant: Option<DeterminantView>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub partition: String,
    #[serde(flatten)]
    pub report: PartitionEqualityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub determinant: Option<DeterminantView>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmodularReport {
    pub instance: String,
    pub n: usize,
    /// `f([1:n])`.
    pub value: f64,
    pub submodular: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub han: Vec<HanRow>,
    pub partitions: Vec<PartitionRow>,
}

impl SubmodularReport {
    pub fn holds(&self) -> bool {
        self.han.iter().all(|r| r.report.chain.holds())
            && self.partitions.iter().all(|r| r.report.chain.holds())
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "instance {} (n = {})  f([1:n]) = {:.4}",
            self.instance, self.n, self.value
        );
        let _ = write!(s, "submodular: {}", yes_no(self.submodular));
        if let Some(w) = &self.witness {
            let _ = write!(s, " (violated at {w})");
        }
        s.push('\n');
        if !self.han.is_empty() {
            let rows: Vec<[String; 7]> = self
                .han
                .iter()
                .map(|row| {
                    let r = &row.report;
                    [
                        format!("k={} p={}", r.k, r.p),
                        format!("{:.4}", r.chain.inner.bound),
                        format!("{:.4}", r.chain.outer.bound),
                        yes_no(r.chain.inner.equality).to_string(),
                        yes_no(r.chain.outer.equality).to_string(),
                        yes_no(r.consistent()).to_string(),
                        row.determinant
                            .map(|d| format!("{:.4} / {:.4} / {:.4}", d.value, d.inner, d.outer))
                            .unwrap_or_default(),
                    ]
                })
                .collect();
            s.push_str("conditioned Han chain\n");
            s.push_str(&chain_table(rows));
        }
        if !self.partitions.is_empty() {
            let rows: Vec<[String; 7]> = self
                .partitions
                .iter()
                .map(|row| {
                    let r = &row.report;
                    [
                        format!("p={} {}", r.p, row.partition),
                        format!("{:.4}", r.chain.inner.bound),
                        format!("{:.4}", r.chain.outer.bound),
                        yes_no(r.chain.inner.equality).to_string(),
                        yes_no(r.chain.outer.equality).to_string(),
                        yes_no(r.consistent()).to_string(),
                        row.determinant
                            .map(|d| format!("{:.4} / {:.4} / {:.4}", d.value, d.inner, d.outer))
                            .unwrap_or_default(),
                    ]
                })
                .collect();
            s.push_str("conditioned partition chain\n");
            s.push_str(&chain_table(rows));
        }
        let _ = writeln!(s, "chains hold: {}", yes_no(self.holds()));
        s
    }
}

const CHAIN_HEADER: [&str; 7] = [
    "params",
    "inner",
    "outer",
    "inner eq",
    "outer eq",
    "conditions agree",
    "det view",
];

/// The determinant column is dropped when no row has one.
fn chain_table(rows: Vec<[String; 7]>) -> String {
    if rows.iter().any(|r| !r[6].is_empty()) {
        return table(&CHAIN_HEADER, &rows);
    }
    let short: Vec<[String; 6]> = rows
        .into_iter()
        .map(|[a, b, c, d, e, f, _]| [a, b, c, d, e, f])
        .collect();
    let header: [&str; 6] = CHAIN_HEADER[..6].try_into().unwrap();
    table(&header, &short)
}

pub fn suites_text(results: &[SuiteResult]) -> String {
    let mut s = String::new();
    for r in results {
        let _ = writeln!(
            s,
            "{} {}: trials={} checks={} failures={} max_negative_slack={:.3e}",
            if r.passed() { "PASS" } else { "FAIL" },
            r.suite,
            r.trials,
            r.checks,
            r.failures.len(),
            r.max_negative_slack
        );
        for f in r.failures.iter().take(20) {
            let _ = write!(
                s,
                "  {} | {} {} | slack {:e}",
                f.spec, f.check, f.params, f.slack
            );
            if let Some(w) = &f.witness {
                let _ = write!(s, " | {w}");
            }
            s.push('\n');
        }
        if r.failures.len() > 20 {
            let _ = writeln!(s, "  ... {} more", r.failures.len() - 20);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(4.30406509320417, 4), 4.304);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert_eq!(round_sig(-123456.789, 3), -123000.0);
        assert!(round_sig(f64::NAN, 3).is_nan());
    }

    #[test]
    fn table_alignment() {
        let t = table(&["a", "bb"], &[["xxx".to_string(), "y".to_string()]]);
        assert_eq!(t, "a    bb\nxxx  y\n");
    }
}
