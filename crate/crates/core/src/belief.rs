//! Posterior over messages: Bayes updates, predictive outputs, MAP decoding
//! and the shifted log-likelihood `U~` that the drift analysis tracks.
//!
//! Alongside the normalized vector the belief keeps base-2 log weights, so
//! per-message log-odds stay accurate once a posterior is within a few ulp
//! of 1.

use crate::dmc::Channel;
use crate::encoder::EncodingFunction;
use crate::error::{Error, Result};
use crate::scalar::{log2_sum_exp2, ordered_sum, Real};

const BELIEF_TOLERANCE: f64 = 1e-10;

/// Posterior `rho(t)` over `M` messages at step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief<T> {
    rho: Vec<T>,
    log_weights: Vec<T>,
    step: usize,
}

impl<T: Real> Belief<T> {
    /// Uniform prior over `m` messages at step 0.
    pub fn uniform(m: usize) -> Self {
        let w = T::one() / T::from_count(m);
        Self { rho: vec![w; m], log_weights: vec![T::zero(); m], step: 0 }
    }

    /// Belief from an explicit probability vector at step 0.
    pub fn from_probs(rho: Vec<T>) -> Result<Self> {
        if rho.is_empty() || rho.iter().any(|&p| !(p >= T::zero())) {
            return Err(Error::InvalidDistribution(format!("{rho:?}")));
        }
        let s = ordered_sum(rho.iter().copied());
        if (s - T::one()).abs() > T::stochastic_tol(BELIEF_TOLERANCE) {
            return Err(Error::InvalidDistribution(format!("posterior sums to {s}")));
        }
        let rho: Vec<T> = rho.into_iter().map(|p| p / s).collect();
        let log_weights = rho.iter().map(|p| p.log2()).collect();
        Ok(Self { rho, log_weights, step: 0 })
    }

    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    pub fn num_messages(&self) -> usize {
        self.rho.len()
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Largest posterior mass.
    pub fn max_posterior(&self) -> T {
        self.rho.iter().copied().fold(T::zero(), T::max)
    }

    fn check_map(&self, ch: &Channel<T>, gamma: &EncodingFunction) -> Result<()> {
        if gamma.len() != self.rho.len() {
            return Err(Error::DimensionMismatch { expected: self.rho.len(), got: gamma.len() });
        }
        gamma.validate(ch.num_inputs())
    }

    /// `P_rho(y) = sum_j rho_j P(y | gamma(j))`.
    pub fn predictive_distribution(&self, ch: &Channel<T>, gamma: &EncodingFunction) -> Result<Vec<T>> {
        self.check_map(ch, gamma)?;
        let mut out = vec![T::zero(); ch.num_outputs()];
        for (&w, x) in self.rho.iter().zip(gamma.iter()) {
            for (o, &p) in out.iter_mut().zip(ch.row(x)) {
                *o = *o + w * p;
            }
        }
        Ok(out)
    }

    /// Posterior after observing `y` when `gamma` was used.
    pub fn bayes_update(&self, ch: &Channel<T>, gamma: &EncodingFunction, y: usize) -> Result<Self> {
        self.check_map(ch, gamma)?;
        if y >= ch.num_outputs() {
            return Err(Error::IndexOutOfRange { index: y, len: ch.num_outputs() });
        }
        let mass = ordered_sum(self.rho.iter().zip(gamma.iter()).map(|(&w, x)| w * ch.prob(x, y)));
        if !(mass > T::zero()) {
            return Err(Error::ImpossibleObservation { y });
        }
        let mut lw: Vec<T> = self
            .log_weights
            .iter()
            .zip(gamma.iter())
            .map(|(&l, x)| l + ch.prob(x, y).log2())
            .collect();
        let norm = log2_sum_exp2(lw.iter().copied());
        lw.iter_mut().for_each(|l| *l = *l - norm);
        let raw: Vec<T> = lw.iter().map(|l| l.exp2()).collect();
        let total = ordered_sum(raw.iter().copied());
        let rho = raw.into_iter().map(|p| p / total).collect();
        Ok(Self { rho, log_weights: lw, step: self.step + 1 })
    }

    /// Lowest-index message with the largest posterior, and its mass.
    pub fn map_decode(&self) -> (usize, T) {
        let mut best = (0, self.rho[0]);
        for (i, &p) in self.rho.iter().enumerate().skip(1) {
            if p > best.1 {
                best = (i, p);
            }
        }
        best
    }

    /// `log2(rho_i / (1 - rho_i))` computed from the log weights.
    pub fn log_odds(&self, i: usize) -> T {
        let others = log2_sum_exp2(
            self.log_weights.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &l)| l),
        );
        self.log_weights[i] - others
    }

    /// `U~(t) = sum_i rho_i log(rho_i / (1 - rho_i)) - log(rho~ / (1 - rho~))`.
    pub fn u_tilde(&self, tp: &ThresholdParams<T>) -> T {
        let s = ordered_sum((0..self.rho.len()).map(|i| {
            let p = self.rho[i];
            if p > T::zero() {
                p * self.log_odds(i)
            } else {
                T::zero()
            }
        }));
        s - tp.log_threshold_odds()
    }
}

/// Target error `epsilon` and the posterior threshold
/// `rho~ = 1 - 1 / (1 + max{log M, log 1/epsilon})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams<T> {
    pub epsilon: T,
    pub num_messages: usize,
    pub rho_tilde: T,
    level: T,
}

impl<T: Real> ThresholdParams<T> {
    pub fn new(num_messages: usize, epsilon: T) -> Result<Self> {
        if num_messages < 2 {
            return Err(Error::ParameterDomain(format!("need at least 2 messages, got {num_messages}")));
        }
        if !(epsilon > T::zero() && epsilon < T::one()) {
            return Err(Error::ParameterDomain(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        let level = T::from_count(num_messages).log2().max(epsilon.recip().log2());
        let rho_tilde = T::one() - T::one() / (T::one() + level);
        Ok(Self { epsilon, num_messages, rho_tilde, level })
    }

    /// `log2(rho~ / (1 - rho~)) = log2 max{log M, log 1/epsilon}`.
    pub fn log_threshold_odds(&self) -> T {
        self.level.log2()
    }
}
