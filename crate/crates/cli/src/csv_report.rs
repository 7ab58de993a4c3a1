//! CSV rendering of convergence reports.
//!
//! Columns: `scheme,gamma,theta,T,tau,rel_error,observed_order,wall_ms`.
//! `theta` is blank for named (non-random) data, `observed_order` is blank
//! on the first row of each scheme, and runs that did not finish carry the
//! literal `NaN` plus a `#` comment with the reason.

use std::fmt::Write as _;

use kdv_core::ConvergenceReport;

pub const HEADER: &str = "scheme,gamma,theta,T,tau,rel_error,observed_order,wall_ms";

fn number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:e}")
    }
}

/// Rows for one scheme, including DNF comments.
pub fn format_block(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    let theta = report.data.theta().map(|t| t.to_string()).unwrap_or_default();
    for (i, &tau) in report.taus.iter().enumerate() {
        if let Some(reason) = &report.dnf[i] {
            let _ = writeln!(out, "# DNF {} tau={tau}: {reason}", report.scheme);
        }
        let order = if i == 0 {
            String::new()
        } else {
            number(report.observed_orders[i - 1])
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            report.scheme,
            report.gamma,
            theta,
            report.t_final,
            tau,
            number(report.rel_errors[i]),
            order,
            number(report.wall_ms[i]),
        );
    }
    out
}

pub fn format_reports(reports: &[ConvergenceReport]) -> String {
    let mut out = format!("{HEADER}\n");
    for r in reports {
        out.push_str(&format_block(r));
    }
    out
}

pub fn aborted_trailer(reason: &str) -> String {
    format!("# ABORTED: {}\n", reason.replace('\n', " "))
}
