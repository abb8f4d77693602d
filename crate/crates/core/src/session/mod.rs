//! The variable-length transmission loop: encode, transmit, observe the
//! output through feedback, update the posterior, stop once some message
//! reaches `1 - epsilon`, decode MAP.

mod audit;
mod bounds;
mod export;
mod montecarlo;

pub use audit::{audit_trace, audit_trace_with, AuditReport, AuditSettings, Check, Violation};
pub use bounds::{analytic_bounds, reliability_frontier, BoundSet};
pub use export::{summary_header, summary_row, trace_header, trace_lines};
pub use montecarlo::{
    binomial_test_passes, clopper_pearson, monte_carlo, monte_carlo_with, MonteCarloOptions, MonteCarloReport,
    TrialSummary,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::belief::{Belief, ThresholdParams};
use crate::divergences::{ejs_of_encoder, EjsEstimate, DEFAULT_EXPLICIT_SUPPORT_LIMIT, DEFAULT_MC_SAMPLES};
use crate::dmc::{Channel, ChannelConstants};
use crate::encoder::EncodingFunction;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::schemes::Scheme;

/// Step cap used when the expected-length bound cannot be evaluated.
pub const FALLBACK_MAX_STEPS: usize = 100_000;
/// Multiple of the expected-length bound used as the default step cap.
pub const MAX_STEPS_FACTOR: f64 = 10.0;

const AUDIT_STREAM_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Which message the transmitter holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrueMessage {
    Index(usize),
    /// Drawn uniformly at the start of each trial.
    UniformRandom,
}

/// Parameters of one transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig<T> {
    pub num_messages: usize,
    pub epsilon: T,
    pub scheme: Scheme<T>,
    pub seed: u64,
    /// `None` picks `ceil(10 * theorem1)` for the scheme's guarantee.
    pub max_steps: Option<usize>,
    pub true_message: TrueMessage,
    /// Evaluate the encoder's EJS at every step (needed by the audit).
    pub record_ejs: bool,
    pub mc_samples: usize,
}

impl<T: Real> SessionConfig<T> {
    pub fn new(num_messages: usize, epsilon: T, scheme: Scheme<T>, seed: u64) -> Self {
        Self {
            num_messages,
            epsilon,
            scheme,
            seed,
            max_steps: None,
            true_message: TrueMessage::UniformRandom,
            record_ejs: false,
            mc_samples: DEFAULT_MC_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_messages < 2 {
            return Err(Error::ParameterDomain(format!("need M >= 2, got {}", self.num_messages)));
        }
        if !(self.epsilon > T::zero() && self.epsilon < T::one()) {
            return Err(Error::ParameterDomain(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.max_steps == Some(0) {
            return Err(Error::ParameterDomain("max_steps must be at least 1".into()));
        }
        if let TrueMessage::Index(i) = self.true_message {
            if i >= self.num_messages {
                return Err(Error::IndexOutOfRange { index: i, len: self.num_messages });
            }
        }
        Ok(())
    }

    /// The effective step cap.
    pub fn resolved_max_steps(&self, consts: &ChannelConstants<T>) -> usize {
        if let Some(n) = self.max_steps {
            return n;
        }
        let g = self.scheme.guarantee(consts);
        match analytic_bounds(self.num_messages, self.epsilon, consts, g.r_min, g.e_min) {
            Ok(b) if b.theorem1.is_finite() => {
                let cap = (b.theorem1.to_f64_lossy() * MAX_STEPS_FACTOR).ceil();
                if cap >= 1.0 && cap < usize::MAX as f64 {
                    cap as usize
                } else {
                    FALLBACK_MAX_STEPS
                }
            }
            _ => FALLBACK_MAX_STEPS,
        }
    }
}

/// One channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    /// Time index `t`; the step moves `rho(t)` to `rho(t+1)`.
    pub t: usize,
    /// Posterior `rho(t)` before the step.
    pub belief: Belief<T>,
    /// Realized encoding function.
    pub gamma: EncodingFunction,
    pub deterministic: bool,
    pub input: usize,
    pub y: usize,
    /// EJS of the (possibly randomized) encoder at `rho(t)`.
    pub ejs: Option<EjsEstimate<T>>,
    /// `U~(rho(t))`.
    pub u_tilde: T,
    /// `max_i rho_i(t+1)`.
    pub max_posterior: T,
}

/// Complete record of one transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionTrace<T> {
    pub num_messages: usize,
    pub epsilon: T,
    pub scheme: Scheme<T>,
    pub true_message: usize,
    pub steps: Vec<StepRecord<T>>,
    pub final_belief: Belief<T>,
    /// `tau~`; equals the step cap when `capped`.
    pub stopping_time: usize,
    pub decoded: usize,
    pub correct: bool,
    pub final_max_posterior: T,
    pub capped: bool,
}

impl<T: Real> SessionTrace<T> {
    /// `Err(MaxStepsExceeded)` for capped traces.
    pub fn ensure_completed(&self) -> Result<()> {
        if self.capped {
            Err(Error::MaxStepsExceeded { steps: self.stopping_time })
        } else {
            Ok(())
        }
    }

    /// Posterior after step `k` (`rho(k+1)`).
    pub fn belief_after(&self, k: usize) -> &Belief<T> {
        self.steps.get(k + 1).map_or(&self.final_belief, |s| &s.belief)
    }
}

/// Transmission RNG for trial `trial` of master seed `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Independent stream for Monte Carlo EJS estimates, so trajectories do not
/// depend on whether EJS is recorded.
fn audit_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    trial_rng(seed ^ AUDIT_STREAM_SALT, trial)
}

/// Runs trial 0 of `cfg`.
pub fn run_session<T: Real>(cfg: &SessionConfig<T>, ch: &Channel<T>, consts: &ChannelConstants<T>) -> Result<SessionTrace<T>> {
    run_trial(cfg, ch, consts, 0)
}

/// Runs one transmission on the stream `(cfg.seed, trial)`.
pub fn run_trial<T: Real>(
    cfg: &SessionConfig<T>,
    ch: &Channel<T>,
    consts: &ChannelConstants<T>,
    trial: u64,
) -> Result<SessionTrace<T>> {
    cfg.validate()?;
    cfg.scheme.check_channel(ch, cfg.num_messages)?;
    let tp = ThresholdParams::new(cfg.num_messages, cfg.epsilon)?;
    let max_steps = cfg.resolved_max_steps(consts);
    let mut rng = trial_rng(cfg.seed, trial);
    let mut ejs_rng = audit_rng(cfg.seed, trial);
    let true_message = match cfg.true_message {
        TrueMessage::Index(i) => i,
        TrueMessage::UniformRandom => rng.gen_range(0..cfg.num_messages),
    };
    let target = T::one() - cfg.epsilon;
    let mut belief = Belief::uniform(cfg.num_messages);
    let mut steps = Vec::new();
    let mut capped = false;
    while belief.max_posterior() < target {
        if steps.len() >= max_steps {
            capped = true;
            break;
        }
        let enc = cfg.scheme.encode(&belief, ch, consts)?;
        let gamma = enc.realize(&mut rng);
        let input = gamma.get(true_message);
        let y = ch.sample_output(input, &mut rng)?;
        let ejs = if cfg.record_ejs {
            Some(ejs_of_encoder(
                belief.rho(),
                ch,
                &enc,
                cfg.mc_samples,
                DEFAULT_EXPLICIT_SUPPORT_LIMIT,
                &mut ejs_rng,
            )?)
        } else {
            None
        };
        let next = belief.bayes_update(ch, &gamma, y)?;
        steps.push(StepRecord {
            t: steps.len(),
            u_tilde: belief.u_tilde(&tp),
            max_posterior: next.max_posterior(),
            belief,
            gamma,
            deterministic: enc.is_deterministic(),
            input,
            y,
            ejs,
        });
        belief = next;
    }
    let (decoded, final_max_posterior) = belief.map_decode();
    Ok(SessionTrace {
        num_messages: cfg.num_messages,
        epsilon: cfg.epsilon,
        scheme: cfg.scheme.clone(),
        true_message,
        stopping_time: steps.len(),
        steps,
        final_belief: belief,
        decoded,
        correct: decoded == true_message,
        final_max_posterior,
        capped,
    })
}
