//! Divergence kernel: KL, J, L, JS and extrinsic Jensen-Shannon (EJS)
//! divergences, the average log-likelihood `U`, and EJS evaluated against
//! deterministic or randomized encoders. All logarithms are base 2.
//!
//! Conventions: `0 log(0/a) = 0` and `b log(b/0) = +inf`. Infinite values
//! propagate through sums.

use rand::Rng;

use crate::dmc::Channel;
use crate::encoder::{Encoder, EncodingFunction, RandomizedEncoder};
use crate::error::{Error, Result};
use crate::scalar::{neg_xlogx, ordered_sum, xlog_ratio, Real};

/// Largest explicit support evaluated exactly by [`ejs_of_encoder`].
pub const DEFAULT_EXPLICIT_SUPPORT_LIMIT: usize = 64;
/// Default number of sampled realizations for product-form encoders.
pub const DEFAULT_MC_SAMPLES: usize = 4096;
/// Mixture masses below this floor are treated as zero.
pub const MASS_FLOOR: f64 = 1e-300;

const WEIGHT_TOLERANCE: f64 = 1e-12;

/// A priori weights `rho` over `M` hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T>(Vec<T>);

impl<T: Real> WeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        check_distribution(&weights, WEIGHT_TOLERANCE)?;
        Ok(Self(weights))
    }

    pub fn uniform(m: usize) -> Self {
        Self(vec![T::one() / T::from_count(m); m])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `M` distributions over a common finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFamily<T> {
    dists: Vec<Vec<T>>,
}

impl<T: Real> DistributionFamily<T> {
    pub fn new(dists: Vec<Vec<T>>) -> Result<Self> {
        let n = dists.first().map_or(0, Vec::len);
        for d in &dists {
            if d.len() != n {
                return Err(Error::SupportMismatch { left: n, right: d.len() });
            }
            check_distribution(d, WEIGHT_TOLERANCE)?;
        }
        Ok(Self { dists })
    }

    /// The family `(P_{gamma(1)}, ..., P_{gamma(M)})` induced by an encoding function.
    pub fn from_encoding(ch: &Channel<T>, gamma: &EncodingFunction) -> Self {
        Self { dists: gamma.iter().map(|x| ch.row(x).to_vec()).collect() }
    }

    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.dists.first().map_or(0, Vec::len)
    }

    pub fn get(&self, i: usize) -> &[T] {
        &self.dists[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.dists.iter().map(Vec::as_slice)
    }

    /// Mixture `sum_i rho_i P_i`.
    pub fn mixture(&self, rho: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.support_size()];
        for (d, &w) in self.dists.iter().zip(rho) {
            for (o, &p) in out.iter_mut().zip(d) {
                *o = *o + w * p;
            }
        }
        out
    }
}

fn check_distribution<T: Real>(p: &[T], tol: f64) -> Result<()> {
    if p.iter().any(|&v| !(v >= T::zero()) || v > T::one()) {
        return Err(Error::InvalidDistribution(format!("entries outside [0, 1]: {p:?}")));
    }
    let s = ordered_sum(p.iter().copied());
    if (s - T::one()).abs() > T::stochastic_tol(tol) {
        return Err(Error::InvalidDistribution(format!("sums to {s}")));
    }
    Ok(())
}

/// Kullback-Leibler divergence `D(p || q)` in bits, possibly `+inf`.
pub fn kl_divergence<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch { left: p.len(), right: q.len() });
    }
    Ok(kl_unchecked(p, q))
}

#[inline]
fn kl_unchecked<T: Real>(p: &[T], q: &[T]) -> T {
    let floor = T::lit(MASS_FLOOR);
    let d = ordered_sum(p.iter().zip(q).map(|(&a, &b)| {
        let b = if b < floor { T::zero() } else { b };
        xlog_ratio(a, b)
    }));
    // tiny negative sums are rounding noise around p == q
    d.max(T::zero())
}

/// Symmetrized divergence `J(P, Q) = D(P||Q) + D(Q||P)`.
pub fn j_divergence<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    Ok(kl_divergence(p, q)? + kl_divergence(q, p)?)
}

/// `L(P, Q) = D(P || (P+Q)/2) + D(Q || (P+Q)/2)`.
pub fn l_divergence<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch { left: p.len(), right: q.len() });
    }
    let half = T::lit(0.5);
    let m: Vec<T> = p.iter().zip(q).map(|(&a, &b)| half * (a + b)).collect();
    Ok(kl_unchecked(p, &m) + kl_unchecked(q, &m))
}

/// Shannon entropy in bits.
pub fn entropy<T: Real>(p: &[T]) -> T {
    ordered_sum(p.iter().map(|&v| neg_xlogx(v)))
}

fn check_weights<T: Real>(rho: &WeightVector<T>, fam: &DistributionFamily<T>) -> Result<()> {
    if rho.len() != fam.len() {
        return Err(Error::WeightDimensionMismatch { weights: rho.len(), family: fam.len() });
    }
    Ok(())
}

/// Jensen-Shannon divergence `sum_i rho_i D(P_i || sum_j rho_j P_j)`.
pub fn js_divergence<T: Real>(rho: &WeightVector<T>, fam: &DistributionFamily<T>) -> Result<T> {
    check_weights(rho, fam)?;
    let mix = fam.mixture(rho.as_slice());
    Ok(ordered_sum(
        rho.as_slice()
            .iter()
            .zip(fam.iter())
            .filter(|(&w, _)| w > T::zero())
            .map(|(&w, p)| w * kl_unchecked(p, &mix)),
    ))
}

/// Jensen-Shannon divergence in entropy form `H(sum rho_i P_i) - sum rho_i H(P_i)`.
pub fn js_divergence_entropy_form<T: Real>(rho: &WeightVector<T>, fam: &DistributionFamily<T>) -> Result<T> {
    check_weights(rho, fam)?;
    let mix = fam.mixture(rho.as_slice());
    let cond = ordered_sum(rho.as_slice().iter().zip(fam.iter()).map(|(&w, p)| w * entropy(p)));
    Ok(entropy(&mix) - cond)
}

/// Extrinsic Jensen-Shannon divergence
/// `sum_i rho_i D(P_i || sum_{j != i} rho_j / (1 - rho_i) P_j)`, or
/// `max_{j != i} D(P_i || P_j)` when `rho_i = 1`.
pub fn ejs_divergence<T: Real>(rho: &WeightVector<T>, fam: &DistributionFamily<T>) -> Result<T> {
    check_weights(rho, fam)?;
    if fam.len() < 2 {
        return Err(Error::DegenerateM(fam.len()));
    }
    Ok(ejs_with(rho.as_slice(), fam.support_size(), |i| fam.get(i)))
}

/// Shared EJS evaluation over a row lookup. The complement mixture for each
/// message is summed directly rather than by subtraction from the full
/// mixture, which keeps the value accurate when one weight approaches 1.
pub(crate) fn ejs_with<'a, T: Real + 'a>(rho: &[T], n_out: usize, dist: impl Fn(usize) -> &'a [T]) -> T {
    let m = rho.len();
    let mut q = vec![T::zero(); n_out];
    let mut total = T::zero();
    for i in 0..m {
        let wi = rho[i];
        if wi <= T::zero() {
            continue;
        }
        let others = ordered_sum((0..m).filter(|&j| j != i).map(|j| rho[j]));
        if others <= T::zero() {
            // point-mass weights: use the most distinguishable rival
            return (0..m)
                .filter(|&j| j != i)
                .map(|j| kl_unchecked(dist(i), dist(j)))
                .fold(T::neg_infinity(), T::max);
        }
        q.iter_mut().for_each(|v| *v = T::zero());
        for j in (0..m).filter(|&j| j != i) {
            let wj = rho[j];
            if wj > T::zero() {
                for (qy, &p) in q.iter_mut().zip(dist(j)) {
                    *qy = *qy + wj * p;
                }
            }
        }
        q.iter_mut().for_each(|v| *v = *v / others);
        total = total + wi * kl_unchecked(dist(i), &q);
    }
    total
}

/// Average log-likelihood `U(rho) = sum_i rho_i log((1 - rho_i) / rho_i)`.
///
/// Returns `-inf` when some weight equals 1.
pub fn avg_log_likelihood<T: Real>(rho: &[T]) -> T {
    let m = rho.len();
    ordered_sum((0..m).map(|i| {
        let others = ordered_sum((0..m).filter(|&j| j != i).map(|j| rho[j]));
        -xlog_ratio(rho[i], others)
    }))
}

/// EJS of the family induced by a deterministic encoding function.
pub fn ejs_of_map<T: Real>(rho: &[T], ch: &Channel<T>, gamma: &EncodingFunction) -> Result<T> {
    if gamma.len() != rho.len() {
        return Err(Error::DimensionMismatch { expected: rho.len(), got: gamma.len() });
    }
    if rho.len() < 2 {
        return Err(Error::DegenerateM(rho.len()));
    }
    if let Some(x) = gamma.iter().find(|&x| x >= ch.num_inputs()) {
        return Err(Error::IndexOutOfRange { index: x, len: ch.num_inputs() });
    }
    Ok(ejs_with(rho, ch.num_outputs(), |i| ch.row(gamma.get(i))))
}

/// EJS value for an encoder, with the standard error of the estimate
/// (zero whenever the value is computed exactly).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EjsEstimate<T> {
    pub value: T,
    pub stderr: T,
}

impl<T: Real> EjsEstimate<T> {
    pub fn exact(value: T) -> Self {
        Self { value, stderr: T::zero() }
    }

    pub fn is_exact(&self) -> bool {
        self.stderr == T::zero()
    }
}

/// EJS averaged over the realizations of a (possibly randomized) encoder.
///
/// Deterministic maps and explicit supports of at most `support_limit`
/// atoms are evaluated exactly. Product-form encoders are estimated from
/// `mc_samples` independent realizations drawn from `rng`.
pub fn ejs_of_encoder<T: Real, R: Rng + ?Sized>(
    rho: &[T],
    ch: &Channel<T>,
    enc: &Encoder<T>,
    mc_samples: usize,
    support_limit: usize,
    rng: &mut R,
) -> Result<EjsEstimate<T>> {
    match enc {
        Encoder::Deterministic(gamma) => Ok(EjsEstimate::exact(ejs_of_map(rho, ch, gamma)?)),
        Encoder::Randomized(RandomizedEncoder::Explicit(atoms)) => {
            if atoms.len() > support_limit {
                return Err(Error::SupportTooLarge { size: atoms.len(), limit: support_limit });
            }
            let mut acc = T::zero();
            for (gamma, w) in atoms {
                acc = acc + *w * ejs_of_map(rho, ch, gamma)?;
            }
            Ok(EjsEstimate::exact(acc))
        }
        Encoder::Randomized(pf @ RandomizedEncoder::ProductForm(_)) => {
            if let Some(gamma) = pf.as_deterministic() {
                return Ok(EjsEstimate::exact(ejs_of_map(rho, ch, &gamma)?));
            }
            if mc_samples == 0 {
                return Err(Error::ZeroSamples);
            }
            // Welford accumulation
            let mut mean = T::zero();
            let mut m2 = T::zero();
            for k in 1..=mc_samples {
                let gamma = pf.sample(rng);
                let v = ejs_of_map(rho, ch, &gamma)?;
                let delta = v - mean;
                mean = mean + delta / T::from_count(k);
                m2 = m2 + delta * (v - mean);
            }
            let stderr = if mc_samples > 1 {
                (m2 / T::from_count(mc_samples - 1) / T::from_count(mc_samples)).sqrt()
            } else {
                T::zero()
            };
            Ok(EjsEstimate { value: mean, stderr })
        }
    }
}
