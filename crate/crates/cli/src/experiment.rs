use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ejs_core::dmc::{ChannelConstants, ChannelSpec, DEFAULT_BA_TOLERANCE};
use ejs_core::schemes::Scheme;
use ejs_core::session::{
    monte_carlo_with, reliability_frontier, summary_header, summary_row, trace_header, trace_lines,
    MonteCarloOptions, MonteCarloReport, SessionConfig,
};

use crate::config::{Axis, ExperimentConfig};
use crate::error::CliError;

/// One `(scheme, M, epsilon)` cell.
#[derive(Debug, Clone)]
pub struct Cell {
    pub scheme: String,
    pub m: usize,
    pub epsilon: f64,
    pub report: MonteCarloReport<f64>,
}

/// Completed experiment: cells plus the hard-assertion failures found.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub cells: Vec<Cell>,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

fn preamble(cfg: &ExperimentConfig) -> String {
    format!(
        "# ejs-sim {}\n# channel {} sha256={}\n# seed {}\n# trials {}\n# audit {}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.channel.label,
        cfg.channel.sha256,
        cfg.seed,
        cfg.trials,
        if cfg.audit { "on" } else { "off" }
    )
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn cell_stem(scheme: &str, m: usize, epsilon: f64) -> String {
    format!("{}_M{m}_eps{epsilon:e}", scheme.replace(':', "-"))
}

fn constants(cfg: &ExperimentConfig) -> Result<ChannelConstants<f64>, CliError> {
    Ok(cfg.channel.channel.constants(DEFAULT_BA_TOLERANCE)?)
}

/// Runs every `(scheme, M, epsilon)` cell, writes `summary.csv`, `reports.csv`
/// and (with traces on) per-cell trial and trace files under `cfg.out`.
///
/// In-scope audit violations, a mean length above the bound, a rejected
/// error-rate test and failed trials are collected in `failures`; the files
/// are written regardless.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, CliError> {
    let ch = &cfg.channel.channel;
    let consts = constants(cfg)?;
    let schemes = cfg.schemes.iter().map(|s| Scheme::<f64>::parse(s)).collect::<Result<Vec<_>, _>>()?;
    for scheme in &schemes {
        for &m in &cfg.messages {
            scheme.check_channel(ch, m)?;
        }
    }
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    if cfg.traces {
        let dir = cfg.out.join("cells");
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    }

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    for (name, scheme) in cfg.schemes.iter().zip(&schemes) {
        for &m in &cfg.messages {
            for &epsilon in &cfg.epsilons {
                let mut session = SessionConfig::new(m, epsilon, scheme.clone(), cfg.seed);
                session.max_steps = cfg.max_steps;
                session.mc_samples = cfg.ejs_samples;
                let opts = MonteCarloOptions { n_trials: cfg.trials, audit: cfg.audit, keep_traces: cfg.traces };
                let report = monte_carlo_with(&session, ch, &consts, &opts)?;
                let label = format!("{name} M={m} epsilon={epsilon:e}");
                check_cell(&label, &report, &mut failures, &mut warnings);
                if cfg.traces {
                    write_cell_files(cfg, name, m, epsilon, &report)?;
                }
                cells.push(Cell { scheme: name.clone(), m, epsilon, report });
            }
        }
    }

    let mut summary = preamble(cfg);
    summary.push_str(summary_header());
    summary.push('\n');
    for c in &cells {
        summary.push_str(&summary_row(&c.report, c.m, c.epsilon, &c.scheme, cfg.seed));
        summary.push('\n');
    }
    write_file(&cfg.out.join("summary.csv"), &summary)?;
    write_file(&cfg.out.join("reports.csv"), &reports_table(cfg, &consts, &cells))?;
    write_file(&cfg.out.join("channel.json"), &ChannelSpec::from_channel(ch).to_json())?;

    Ok(ExperimentOutcome { cells, failures, warnings })
}

fn check_cell(label: &str, r: &MonteCarloReport<f64>, failures: &mut Vec<String>, warnings: &mut Vec<String>) {
    if let Some((trial, v)) = r.first_violation {
        let msg = format!("{label}: audit {v} (trial {trial})");
        if r.audit_hard_failure() {
            failures.push(msg);
        } else {
            let notes = r.scope.as_ref().map(|s| s.notes.join("; ")).unwrap_or_default();
            warnings.push(format!("{msg}; scheme-out-of-scope: {notes}"));
        }
    }
    if r.theorem1_check() == Some(false) {
        failures.push(format!("{label}: mean tau {} exceeds the bound {}", r.mean_tau, r.theorem1_bound));
    }
    if !r.pe_test_passed {
        failures.push(format!("{label}: {} errors in {} trials reject Pe <= epsilon", r.errors, r.n_trials));
    }
    if r.failed_trials > 0 {
        let e = r.first_error.as_ref().map(ToString::to_string).unwrap_or_default();
        failures.push(format!("{label}: {} trials failed ({e})", r.failed_trials));
    }
    if r.capped_trials > 0 {
        warnings.push(format!("{label}: {} trials hit the step cap of {}", r.capped_trials, r.max_steps));
    }
}

fn write_cell_files(
    cfg: &ExperimentConfig,
    scheme: &str,
    m: usize,
    epsilon: f64,
    r: &MonteCarloReport<f64>,
) -> Result<(), CliError> {
    let stem = cell_stem(scheme, m, epsilon);
    let mut trials = preamble(cfg);
    trials.push_str("trial,true_message,decoded,stopping_time,correct,capped,final_max_posterior,audit_passed\n");
    for t in &r.trials {
        let audit = t.audit_passed.map(|a| a.to_string()).unwrap_or_default();
        let _ = writeln!(
            trials,
            "{},{},{},{},{},{},{:e},{audit}",
            t.trial, t.true_message, t.decoded, t.stopping_time, t.correct, t.capped, t.final_max_posterior
        );
    }
    write_file(&cfg.out.join("cells").join(format!("{stem}_trials.csv")), &trials)?;

    let mut traces = preamble(cfg);
    let _ = writeln!(traces, "trial,{}", trace_header());
    for (t, tr) in r.trials.iter().zip(r.traces.iter().flatten()) {
        for line in trace_lines(tr) {
            let _ = writeln!(traces, "{},{line}", t.trial);
        }
    }
    write_file(&cfg.out.join("cells").join(format!("{stem}_traces.csv")), &traces)
}

fn reports_table(cfg: &ExperimentConfig, consts: &ChannelConstants<f64>, cells: &[Cell]) -> String {
    let mut out = preamble(cfg);
    let _ = writeln!(
        out,
        "# capacity {} c1 {} c2 {} input_dist {:?}",
        consts.capacity, consts.c1, consts.c2, consts.input_dist
    );
    out.push_str(
        "M,epsilon,scheme,n_trials,errors,empirical_pe,pe_ci_low,pe_ci_high,pe_test,mean_tau,stderr_tau,\
         mean_residual,theorem1_bound,theorem1_check,asymptotic_target,burnashev_reference,audit_pass_rate,\
         in_scope,first_violation,capped,failed,max_steps\n",
    );
    for c in cells {
        let r = &c.report;
        let opt = |v: Option<String>| v.unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:e},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.m,
            c.epsilon,
            c.scheme,
            r.n_trials,
            r.errors,
            r.empirical_pe,
            r.pe_interval.0,
            r.pe_interval.1,
            r.pe_test_passed,
            r.mean_tau,
            r.stderr_tau,
            r.mean_residual,
            r.theorem1_bound,
            opt(r.theorem1_check().map(|b| b.to_string())),
            r.asymptotic_target,
            r.burnashev_reference,
            opt(r.audit_pass_rate.map(|v| v.to_string())),
            opt(r.scope.as_ref().map(|s| s.in_scope.to_string())),
            opt(r.first_violation.map(|(t, v)| format!("trial {t} {v}"))),
            r.capped_trials,
            r.failed_trials,
            r.max_steps
        );
    }
    out
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: String,
    pub axis_value: f64,
    pub mean_tau: f64,
    pub log2_inv_eps: f64,
    pub ratio_to_target: f64,
    /// `log2 M / E[tau]`.
    pub rate: f64,
    /// `log2(1/eps) / E[tau]`.
    pub observed_exponent: f64,
    /// `C1 (1 - R / C)` at `rate`.
    pub frontier_exponent: f64,
}

/// Runs the experiment and writes `sweep.csv` along `axis`, with the least-squares
/// slope of `E[tau]` against `log2(1/eps)` or `log2 M` per scheme as comment lines.
pub fn sweep_experiment(cfg: &ExperimentConfig, axis: Axis) -> Result<(ExperimentOutcome, Vec<SweepRow>), CliError> {
    let (swept, other) = match axis {
        Axis::Epsilon => (cfg.epsilons.len(), cfg.messages.len()),
        Axis::Messages => (cfg.messages.len(), cfg.epsilons.len()),
    };
    if swept < 2 {
        return Err(ejs_core::Error::ParameterDomain("a sweep needs at least two axis values".into()).into());
    }
    if other != 1 {
        return Err(CliError::Config("a sweep fixes the other axis to a single value".into()));
    }
    let consts = constants(cfg)?;
    let outcome = run_experiment(cfg)?;
    let rows: Vec<SweepRow> = outcome
        .cells
        .iter()
        .map(|c| {
            let log_m = (c.m as f64).log2();
            let log_inv_eps = (1.0 / c.epsilon).log2();
            let rate = log_m / c.report.mean_tau;
            SweepRow {
                scheme: c.scheme.clone(),
                axis_value: match axis {
                    Axis::Epsilon => c.epsilon,
                    Axis::Messages => c.m as f64,
                },
                mean_tau: c.report.mean_tau,
                log2_inv_eps: log_inv_eps,
                ratio_to_target: c.report.mean_tau / c.report.asymptotic_target,
                rate,
                observed_exponent: log_inv_eps / c.report.mean_tau,
                frontier_exponent: reliability_frontier(rate, consts.capacity, consts.c1),
            }
        })
        .collect();

    let mut out = preamble(cfg);
    let (axis_name, reference) = match axis {
        Axis::Epsilon => ("epsilon", ("1/C1", 1.0 / consts.c1)),
        Axis::Messages => ("M", ("1/C", 1.0 / consts.capacity)),
    };
    for name in &cfg.schemes {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| &r.scheme == name)
            .map(|r| {
                let x = match axis {
                    Axis::Epsilon => r.log2_inv_eps,
                    Axis::Messages => r.axis_value.log2(),
                };
                (x, r.mean_tau)
            })
            .collect();
        let _ = writeln!(out, "# slope {name} {} (reference {} = {})", slope(&pts), reference.0, reference.1);
    }
    let _ = writeln!(
        out,
        "scheme,{axis_name},mean_tau,log2_inv_eps,ratio_to_target,rate,observed_exponent,frontier_exponent"
    );
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scheme,
            r.axis_value,
            r.mean_tau,
            r.log2_inv_eps,
            r.ratio_to_target,
            r.rate,
            r.observed_exponent,
            r.frontier_exponent
        );
    }
    write_file(&cfg.out.join("sweep.csv"), &out)?;
    Ok((outcome, rows))
}

/// Least-squares slope of `y` on `x`.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
