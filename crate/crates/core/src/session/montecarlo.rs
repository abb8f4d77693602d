//! Parallel seeded trials and their aggregate statistics.

use rayon::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::belief::ThresholdParams;
use crate::dmc::{Channel, ChannelConstants};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::schemes::SchemeScope;

use super::audit::{audit_trace, Violation};
use super::bounds::analytic_bounds;
use super::{run_trial, SessionConfig, SessionTrace};

/// Confidence level of the error-rate statements.
pub const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloOptions {
    pub n_trials: usize,
    /// Audit every trace (forces EJS recording).
    pub audit: bool,
    /// Keep the full traces in the report.
    pub keep_traces: bool,
}

impl MonteCarloOptions {
    pub fn new(n_trials: usize) -> Self {
        Self { n_trials, audit: false, keep_traces: false }
    }
}

/// Per-trial outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trial: u64,
    pub true_message: usize,
    pub decoded: usize,
    pub stopping_time: usize,
    pub correct: bool,
    pub capped: bool,
    pub final_max_posterior: f64,
    pub audit_passed: Option<bool>,
    pub first_violation: Option<Violation>,
}

/// Aggregate over all trials of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport<T> {
    pub n_trials: usize,
    /// Mean of `tau~` over finished and capped trials (capped ones count at the cap).
    pub mean_tau: f64,
    pub stderr_tau: f64,
    pub errors: usize,
    pub empirical_pe: f64,
    /// Two-sided Clopper-Pearson interval at [`CONFIDENCE`].
    pub pe_interval: (f64, f64),
    /// One-sided exact binomial test of `Pe <= epsilon` at level `1 - CONFIDENCE`.
    pub pe_test_passed: bool,
    /// Mean of `1 - max rho(tau~)`.
    pub mean_residual: f64,
    pub theorem1_bound: f64,
    pub asymptotic_target: f64,
    pub burnashev_reference: f64,
    /// Fraction of audited traces without violations.
    pub audit_pass_rate: Option<f64>,
    pub capped_trials: usize,
    pub failed_trials: usize,
    pub first_error: Option<Error>,
    /// First violation across trials, with its trial index.
    pub first_violation: Option<(u64, Violation)>,
    pub scope: Option<SchemeScope>,
    pub max_steps: usize,
    pub trials: Vec<TrialSummary>,
    pub traces: Option<Vec<SessionTrace<T>>>,
}

impl<T> MonteCarloReport<T> {
    /// `Some(mean_tau <= theorem1)` when every trace was audited clean.
    pub fn theorem1_check(&self) -> Option<bool> {
        match self.audit_pass_rate {
            Some(r) if r == 1.0 && self.failed_trials == 0 => Some(self.mean_tau <= self.theorem1_bound),
            _ => None,
        }
    }

    /// True if some audit violation counts as a hard failure.
    pub fn audit_hard_failure(&self) -> bool {
        self.first_violation.is_some() && self.scope.as_ref().is_some_and(|s| s.in_scope)
    }
}

/// Runs `n_trials` independent trials of `cfg`.
pub fn monte_carlo<T: Real>(
    cfg: &SessionConfig<T>,
    ch: &Channel<T>,
    consts: &ChannelConstants<T>,
    n_trials: usize,
) -> Result<MonteCarloReport<T>> {
    monte_carlo_with(cfg, ch, consts, &MonteCarloOptions::new(n_trials))
}

/// Runs trials in parallel; aggregation happens in trial order, so the
/// report does not depend on scheduling.
pub fn monte_carlo_with<T: Real>(
    cfg: &SessionConfig<T>,
    ch: &Channel<T>,
    consts: &ChannelConstants<T>,
    opts: &MonteCarloOptions,
) -> Result<MonteCarloReport<T>> {
    if opts.n_trials == 0 {
        return Err(Error::ParameterDomain("need at least one trial".into()));
    }
    cfg.validate()?;
    cfg.scheme.check_channel(ch, cfg.num_messages)?;
    let tp = ThresholdParams::new(cfg.num_messages, cfg.epsilon)?;
    let guarantee = cfg.scheme.guarantee(consts);
    let bounds = analytic_bounds(cfg.num_messages, cfg.epsilon, consts, guarantee.r_min, guarantee.e_min)?;
    let mut cfg = cfg.clone();
    cfg.record_ejs |= opts.audit;
    let max_steps = cfg.resolved_max_steps(consts);
    cfg.max_steps = Some(max_steps);

    type Outcome<T> = Result<(SessionTrace<T>, Option<crate::session::AuditReport>)>;
    let outcomes: Vec<Outcome<T>> = (0..opts.n_trials as u64)
        .into_par_iter()
        .map(|trial| {
            let trace = run_trial(&cfg, ch, consts, trial)?;
            let audit = if opts.audit { Some(audit_trace(&trace, ch, consts, &tp)?) } else { None };
            Ok((trace, audit))
        })
        .collect();

    let mut trials = Vec::with_capacity(opts.n_trials);
    let mut traces = opts.keep_traces.then(Vec::new);
    let mut failed_trials = 0;
    let mut first_error = None;
    let mut first_violation = None;
    let mut scope = None;
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let trial = trial as u64;
        match outcome {
            Err(e) => {
                failed_trials += 1;
                first_error.get_or_insert(e);
            }
            Ok((trace, audit)) => {
                let violation = audit.as_ref().and_then(|a| a.first_violation());
                if let Some(v) = violation {
                    first_violation.get_or_insert((trial, v));
                }
                if let Some(a) = &audit {
                    scope.get_or_insert_with(|| a.scope.clone());
                }
                trials.push(TrialSummary {
                    trial,
                    true_message: trace.true_message,
                    decoded: trace.decoded,
                    stopping_time: trace.stopping_time,
                    correct: trace.correct,
                    capped: trace.capped,
                    final_max_posterior: trace.final_max_posterior.to_f64_lossy(),
                    audit_passed: audit.as_ref().map(|a| a.passed()),
                    first_violation: violation,
                });
                if let Some(t) = traces.as_mut() {
                    t.push(trace);
                }
            }
        }
    }
    if trials.is_empty() {
        return Err(first_error.unwrap_or(Error::ParameterDomain("no trial completed".into())));
    }

    let n = trials.len();
    let taus: Vec<f64> = trials.iter().map(|t| t.stopping_time as f64).collect();
    let mean_tau = pairwise_sum(&taus) / n as f64;
    let stderr_tau = if n > 1 {
        let dev: Vec<f64> = taus.iter().map(|t| (t - mean_tau).powi(2)).collect();
        (pairwise_sum(&dev) / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    let errors = trials.iter().filter(|t| !t.correct).count();
    let residuals: Vec<f64> = trials.iter().map(|t| 1.0 - t.final_max_posterior).collect();
    let epsilon = cfg.epsilon.to_f64_lossy();
    let audit_pass_rate = opts
        .audit
        .then(|| trials.iter().filter(|t| t.audit_passed == Some(true)).count() as f64 / n as f64);

    Ok(MonteCarloReport {
        n_trials: n,
        mean_tau,
        stderr_tau,
        errors,
        empirical_pe: errors as f64 / n as f64,
        pe_interval: clopper_pearson(errors, n, CONFIDENCE),
        pe_test_passed: binomial_test_passes(errors, n, epsilon, CONFIDENCE),
        mean_residual: pairwise_sum(&residuals) / n as f64,
        theorem1_bound: bounds.theorem1.to_f64_lossy(),
        asymptotic_target: bounds.asymptotic_target.to_f64_lossy(),
        burnashev_reference: bounds.burnashev_reference.to_f64_lossy(),
        audit_pass_rate,
        capped_trials: trials.iter().filter(|t| t.capped).count(),
        failed_trials,
        first_error,
        first_violation,
        scope,
        max_steps,
        trials,
        traces,
    })
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Two-sided Clopper-Pearson interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: usize, n: usize, confidence: f64) -> (f64, f64) {
    let alpha = 1.0 - confidence;
    let (kf, nf) = (k as f64, n as f64);
    let lower = if k == 0 { 0.0 } else { beta_quantile(kf, nf - kf + 1.0, alpha / 2.0) };
    let upper = if k == n { 1.0 } else { beta_quantile(kf + 1.0, nf - kf, 1.0 - alpha / 2.0) };
    (lower, upper)
}

/// Exact one-sided binomial test of `p <= p0`: passes unless
/// `P(Bin(n, p0) >= k) < 1 - confidence`, i.e. unless the one-sided lower
/// confidence limit for `p` exceeds `p0`.
pub fn binomial_test_passes(k: usize, n: usize, p0: f64, confidence: f64) -> bool {
    if k == 0 {
        return true;
    }
    let (kf, nf) = (k as f64, n as f64);
    beta_quantile(kf, nf - kf + 1.0, 1.0 - confidence) <= p0
}

fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    Beta::new(a, b).map(|d| d.inverse_cdf(q)).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{Scheme, SchemeId};
    use crate::session::run_session;

    fn bsc(p: f64) -> (Channel<f64>, ChannelConstants<f64>) {
        let ch = Channel::bsc(p).unwrap();
        let k = ch.constants(1e-9).unwrap();
        (ch, k)
    }

    #[test]
    fn single_trial_matches_run_session() {
        let (ch, k) = bsc(0.1);
        let cfg = SessionConfig::new(8, 1e-2, Scheme::new(SchemeId::Alg2), 17);
        let r = monte_carlo(&cfg, &ch, &k, 1).unwrap();
        let tr = run_session(&cfg, &ch, &k).unwrap();
        assert_eq!(r.mean_tau, tr.stopping_time as f64);
        assert_eq!(r.stderr_tau, 0.0);
        assert_eq!(r.empirical_pe, if tr.correct { 0.0 } else { 1.0 });
        assert_eq!(r.mean_residual, 1.0 - tr.final_max_posterior);
    }

    #[test]
    fn near_noiseless_channel_needs_few_steps() {
        let (ch, k) = bsc(1e-3);
        let cfg = SessionConfig::new(2, 0.1, Scheme::new(SchemeId::Alg2), 2);
        let r = monte_carlo(&cfg, &ch, &k, 500).unwrap();
        assert!((1.0..=3.0).contains(&r.mean_tau), "{}", r.mean_tau);
    }

    #[test]
    fn audited_run_is_deterministic_and_clean() {
        let (ch, k) = bsc(0.1);
        let cfg = SessionConfig::new(8, 1e-3, Scheme::new(SchemeId::Alg2), 99);
        let opts = MonteCarloOptions { n_trials: 200, audit: true, keep_traces: false };
        let a = monte_carlo_with(&cfg, &ch, &k, &opts).unwrap();
        let b = monte_carlo_with(&cfg, &ch, &k, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.audit_pass_rate, Some(1.0));
        assert_eq!(a.theorem1_check(), Some(true));
        assert!(!a.audit_hard_failure());
        assert_eq!(a.capped_trials, 0);
    }

    #[test]
    fn clopper_pearson_reference_values() {
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.308_497).abs() < 1e-5);
        let (lo, hi) = clopper_pearson(5, 10, 0.95);
        assert!((lo - 0.187_086).abs() < 1e-5 && (hi - 0.812_914).abs() < 1e-5);
    }

    #[test]
    fn binomial_test_boundaries() {
        assert!(binomial_test_passes(0, 10_000, 1e-3, 0.95));
        assert!(binomial_test_passes(10, 10_000, 1e-3, 0.95));
        assert!(binomial_test_passes(15, 10_000, 1e-3, 0.95));
        assert!(!binomial_test_passes(16, 10_000, 1e-3, 0.95));
    }
}
