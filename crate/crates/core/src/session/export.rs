//! Comma-separated records for traces and Monte Carlo summaries.

use crate::scalar::Real;

use super::{MonteCarloReport, SessionTrace};

pub fn trace_header() -> &'static str {
    "step,gamma,y,max_posterior,ejs,u_tilde"
}

/// One line per channel use. `ejs` is empty when it was not recorded.
pub fn trace_lines<T: Real>(trace: &SessionTrace<T>) -> Vec<String> {
    trace
        .steps
        .iter()
        .map(|s| {
            let ejs = s.ejs.map(|e| format!("{:e}", e.value.to_f64_lossy())).unwrap_or_default();
            format!(
                "{},{},{},{:e},{},{:e}",
                s.t,
                s.gamma,
                s.y,
                s.max_posterior.to_f64_lossy(),
                ejs,
                s.u_tilde.to_f64_lossy()
            )
        })
        .collect()
}

pub fn summary_header() -> &'static str {
    "M,epsilon,scheme,mean_tau,stderr_tau,empirical_pe,theorem1_bound,asymptotic_target,audit_pass_rate,capped,seed"
}

/// Summary row; `audit_pass_rate` is empty for unaudited runs.
pub fn summary_row<T>(report: &MonteCarloReport<T>, m: usize, epsilon: f64, scheme: &str, seed: u64) -> String {
    let audit = report.audit_pass_rate.map(|r| format!("{r}")).unwrap_or_default();
    format!(
        "{m},{epsilon:e},{scheme},{},{},{},{},{},{audit},{},{seed}",
        report.mean_tau,
        report.stderr_tau,
        report.empirical_pe,
        report.theorem1_bound,
        report.asymptotic_target,
        report.capped_trials
    )
}
