//! Step-by-step verification of the EJS floors, the drift identity and the
//! jump bounds along a recorded trace.

use std::fmt;

use crate::belief::ThresholdParams;
use crate::divergences::ejs_of_map;
use crate::dmc::{Channel, ChannelConstants};
use crate::error::Result;
use crate::scalar::{ordered_sum, Real};
use crate::schemes::{RateReliability, SchemeScope};

use super::SessionTrace;

/// Absolute slack for exactly computed quantities.
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Standard errors of slack for sampled EJS values.
pub const SAMPLED_SIGMAS: f64 = 3.0;

/// The individual audit checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    /// `EJS >= R_min`.
    RateFloor,
    /// `EJS >= rho~ E_min` once `max rho >= rho~`.
    ReliabilityFloor,
    /// `E_y[U~(t+1)] = U~(t) + EJS(rho(t), gamma)`.
    Drift,
    /// `|U~(t+1) - U~(t)| <= 4 C2` when `max{U~(t), U~(t+1)} >= 0`.
    UTildeJump,
    /// `|log-odds_i(t+1) - log-odds_i(t)| <= log C2`.
    LogOddsJump,
    /// `|rho_i(t+1) - rho_i(t)| <= min{rho(1-rho), rho'(1-rho')} C2`.
    PosteriorJump,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::RateFloor,
        Check::ReliabilityFloor,
        Check::Drift,
        Check::UTildeJump,
        Check::LogOddsJump,
        Check::PosteriorJump,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Check::RateFloor => "rate-floor",
            Check::ReliabilityFloor => "reliability-floor",
            Check::Drift => "drift",
            Check::UTildeJump => "u-tilde-jump",
            Check::LogOddsJump => "log-odds-jump",
            Check::PosteriorJump => "posterior-jump",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A failed check: `value` was compared against `bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub check: Check,
    pub step: usize,
    pub value: f64,
    pub bound: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at step {}: {} vs {}", self.check, self.step, self.value, self.bound)
    }
}

/// Thresholds and tolerances for [`audit_trace_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSettings<T> {
    pub thresholds: RateReliability<T>,
    pub exact_tolerance: T,
    pub sampled_sigmas: T,
}

impl<T: Real> AuditSettings<T> {
    pub fn new(thresholds: RateReliability<T>) -> Self {
        Self { thresholds, exact_tolerance: T::lit(EXACT_TOLERANCE), sampled_sigmas: T::lit(SAMPLED_SIGMAS) }
    }
}

/// Verdicts for one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub steps: usize,
    /// `(check, evaluations)` in [`Check::ALL`] order.
    pub evaluated: Vec<(Check, usize)>,
    pub violations: Vec<Violation>,
    pub scope: SchemeScope,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// First violation by step, then by check order.
    pub fn first_violation(&self) -> Option<Violation> {
        self.violations.iter().copied().min_by_key(|v| (v.step, v.check))
    }

    /// Violations count as hard failures only when the scheme's hypotheses hold.
    pub fn is_hard_failure(&self) -> bool {
        self.scope.in_scope && !self.passed()
    }

    pub fn evaluations(&self, check: Check) -> usize {
        self.evaluated.iter().find(|(c, _)| *c == check).map_or(0, |(_, n)| *n)
    }
}

/// Audits `trace` against the guarantee of its own scheme.
pub fn audit_trace<T: Real>(
    trace: &SessionTrace<T>,
    ch: &Channel<T>,
    consts: &ChannelConstants<T>,
    tp: &ThresholdParams<T>,
) -> Result<AuditReport> {
    let settings = AuditSettings::new(trace.scheme.guarantee(consts));
    audit_trace_with(trace, ch, consts, tp, &settings)
}

/// Audits `trace` against explicit thresholds.
///
/// Steps without a recorded EJS skip the two floor checks. The jump checks
/// are skipped when `C2` is infinite.
pub fn audit_trace_with<T: Real>(
    trace: &SessionTrace<T>,
    ch: &Channel<T>,
    consts: &ChannelConstants<T>,
    tp: &ThresholdParams<T>,
    settings: &AuditSettings<T>,
) -> Result<AuditReport> {
    let tol = settings.exact_tolerance;
    let RateReliability { r_min, e_min } = settings.thresholds;
    let c2 = consts.c2;
    let jumps = c2.is_finite();
    let log_c2 = c2.log2();
    let mut counts = [0usize; 6];
    let mut violations = Vec::new();
    let mut record = |check: Check, step: usize, ok: bool, value: T, bound: T| {
        counts[Check::ALL.iter().position(|&c| c == check).unwrap_or(0)] += 1;
        if !ok {
            violations.push(Violation { check, step, value: value.to_f64_lossy(), bound: bound.to_f64_lossy() });
        }
    };

    for (k, s) in trace.steps.iter().enumerate() {
        let before = &s.belief;
        let after = trace.belief_after(k);
        let rho = before.rho();

        if let Some(e) = s.ejs {
            let slack = if e.is_exact() { tol } else { tol + settings.sampled_sigmas * e.stderr };
            record(Check::RateFloor, s.t, e.value >= r_min - slack, e.value, r_min);
            if before.max_posterior() >= tp.rho_tilde {
                let floor = tp.rho_tilde * e_min;
                record(Check::ReliabilityFloor, s.t, e.value >= floor - slack, e.value, floor);
            }
        }

        let u_now = before.u_tilde(tp);
        let ejs_realized = ejs_of_map(rho, ch, &s.gamma)?;
        let predictive = before.predictive_distribution(ch, &s.gamma)?;
        let mut terms = Vec::with_capacity(predictive.len());
        for (y, &py) in predictive.iter().enumerate() {
            if py > T::zero() {
                terms.push(py * before.bayes_update(ch, &s.gamma, y)?.u_tilde(tp));
            }
        }
        let expected_next = ordered_sum(terms);
        let drift_target = u_now + ejs_realized;
        if expected_next.is_finite() && drift_target.is_finite() {
            let gap = (expected_next - drift_target).abs();
            record(Check::Drift, s.t, gap <= tol, expected_next, drift_target);
        }

        if jumps {
            let u_next = after.u_tilde(tp);
            if u_now.is_finite() && u_next.is_finite() && u_now.max(u_next) >= T::zero() {
                let bound = T::lit(4.0) * c2;
                let d = (u_next - u_now).abs();
                record(Check::UTildeJump, s.t, d <= bound + tol, d, bound);
            }
            let mut worst_odds = T::zero();
            let mut odds_ok = true;
            let mut worst_post = (T::zero(), T::zero());
            let mut post_ok = true;
            for i in 0..rho.len() {
                let (a, b) = (before.log_odds(i), after.log_odds(i));
                if a.is_finite() && b.is_finite() {
                    let d = (b - a).abs();
                    worst_odds = worst_odds.max(d);
                    odds_ok &= d <= log_c2 + tol;
                }
                let (p, q) = (rho[i], after.rho()[i]);
                let allowed = (p * (T::one() - p)).min(q * (T::one() - q)) * c2;
                let d = (q - p).abs();
                if d - allowed > worst_post.0 - worst_post.1 {
                    worst_post = (d, allowed);
                }
                post_ok &= d <= allowed + tol;
            }
            record(Check::LogOddsJump, s.t, odds_ok, worst_odds, log_c2);
            record(Check::PosteriorJump, s.t, post_ok, worst_post.0, worst_post.1);
        }
    }

    Ok(AuditReport {
        steps: trace.steps.len(),
        evaluated: Check::ALL.iter().copied().zip(counts).collect(),
        violations,
        scope: trace.scheme.scope(ch, consts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{Scheme, SchemeId};
    use crate::session::{run_session, SessionConfig};

    fn bsc() -> (Channel<f64>, ChannelConstants<f64>) {
        let ch = Channel::bsc(0.1).unwrap();
        let k = ch.constants(1e-9).unwrap();
        (ch, k)
    }

    fn audited(id: SchemeId, ch: &Channel<f64>, k: &ChannelConstants<f64>, m: usize, seed: u64) -> AuditReport {
        let mut cfg = SessionConfig::new(m, 1e-3, Scheme::new(id), seed);
        cfg.record_ejs = true;
        cfg.mc_samples = 256;
        cfg.max_steps = Some(400);
        let tr = run_session(&cfg, ch, k).unwrap();
        audit_trace(&tr, ch, k, &ThresholdParams::new(m, 1e-3).unwrap()).unwrap()
    }

    #[test]
    fn maxejs_traces_pass() {
        let (ch, k) = bsc();
        for seed in 0..10 {
            let r = audited(SchemeId::MaxEjs, &ch, &k, 4, seed);
            assert!(r.passed(), "{:?}", r.first_violation());
            assert!(r.evaluations(Check::RateFloor) == r.steps && r.steps > 0);
        }
    }

    #[test]
    fn constant_map_fails_rate_floor() {
        let (ch, k) = bsc();
        let r = audited(SchemeId::Constant, &ch, &k, 4, 0);
        let v = r.first_violation().unwrap();
        assert_eq!((v.check, v.step), (Check::RateFloor, 0));
        assert!(v.value.abs() < 1e-15);
        assert!(r.is_hard_failure());
    }

    #[test]
    fn out_of_scope_scheme_is_flagged() {
        let ch = Channel::ternary_uniform_input(0.25).unwrap().permute_outputs(&[0, 1, 2]).unwrap();
        let skew = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]]).unwrap();
        for c in [ch, skew] {
            let k = c.constants(1e-9).unwrap();
            let r = audited(SchemeId::Ghbz, &c, &k, 4, 3);
            assert!(!r.scope.in_scope);
            assert!(!r.is_hard_failure());
        }
    }
}
