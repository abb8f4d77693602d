//! Closed-form expected-length bounds and the Burnashev reliability frontier.

use crate::dmc::ChannelConstants;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Analytic reference values for one `(M, epsilon)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSet<T> {
    /// Non-asymptotic upper bound on `E[tau]` for schemes meeting `(R_min, E_min)`.
    pub theorem1: T,
    /// `log M / R_min + log(1/epsilon) / E_min`.
    pub asymptotic_target: T,
    /// `log M / C + log(1/epsilon) / C1`; asymptotic, never asserted.
    pub burnashev_reference: T,
    pub r_min: T,
    pub e_min: T,
    pub capacity: T,
    pub c1: T,
}

impl<T: Real> BoundSet<T> {
    /// `E(R) = C1 (1 - R / C)` for `0 <= R <= C`, zero above capacity.
    pub fn frontier(&self, rate: T) -> T {
        reliability_frontier(rate, self.capacity, self.c1)
    }
}

/// Burnashev's reliability function `C1 (1 - R / C)`, clamped at zero.
pub fn reliability_frontier<T: Real>(rate: T, capacity: T, c1: T) -> T {
    (c1 * (T::one() - rate / capacity)).max(T::zero())
}

/// Evaluates
/// `(log M + log log(M/eps)) / R_min + (log(1/eps) + 1) / E_min + 6 (4 C2)^2 / (R_min E_min)`
/// together with the asymptotic target and the Burnashev reference.
pub fn analytic_bounds<T: Real>(
    num_messages: usize,
    epsilon: T,
    consts: &ChannelConstants<T>,
    r_min: T,
    e_min: T,
) -> Result<BoundSet<T>> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::ParameterDomain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(r_min > T::zero() && e_min >= r_min) {
        return Err(Error::ParameterDomain(format!("need E_min >= R_min > 0, got R_min = {r_min}, E_min = {e_min}")));
    }
    let m = T::from_count(num_messages);
    let ratio = m / epsilon;
    if !(ratio > T::lit(2.0)) {
        return Err(Error::ParameterDomain(format!("M / epsilon = {ratio} must exceed 2")));
    }
    let log_m = m.log2();
    let log_inv_eps = epsilon.recip().log2();
    let jump = T::lit(4.0) * consts.c2;
    let theorem1 = (log_m + ratio.log2().log2()) / r_min
        + (log_inv_eps + T::one()) / e_min
        + T::lit(6.0) * jump * jump / (r_min * e_min);
    Ok(BoundSet {
        theorem1,
        asymptotic_target: log_m / r_min + log_inv_eps / e_min,
        burnashev_reference: log_m / consts.capacity + log_inv_eps / consts.c1,
        r_min,
        e_min,
        capacity: consts.capacity,
        c1: consts.c1,
    })
}
