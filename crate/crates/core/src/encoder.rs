//! Encoding functions: deterministic message-to-input maps and randomized
//! encoders given either as an explicit weighted support or in product form.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Real};

/// Deterministic map `gamma` from message index to channel input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncodingFunction(Vec<usize>);

impl EncodingFunction {
    pub fn new(assignment: Vec<usize>) -> Self {
        Self(assignment)
    }

    /// Every message mapped to input `x`.
    pub fn constant(m: usize, x: usize) -> Self {
        Self(vec![x; m])
    }

    /// Messages `0..k` go to input 0, the rest to input 1.
    pub fn threshold(m: usize, k: usize) -> Self {
        Self((0..m).map(|i| usize::from(i >= k)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Checks that every entry is a valid input for an alphabet of `num_inputs` symbols.
    pub fn validate(&self, num_inputs: usize) -> Result<()> {
        match self.0.iter().find(|&&x| x >= num_inputs) {
            Some(&x) => Err(Error::IndexOutOfRange { index: x, len: num_inputs }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for EncodingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.0.iter().any(|&x| x >= 10) { "." } else { "" };
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Randomized encoder `Gamma`.
#[derive(Debug, Clone, PartialEq)]
pub enum RandomizedEncoder<T> {
    /// Explicit support `{(gamma, lambda_gamma)}`.
    Explicit(Vec<(EncodingFunction, T)>),
    /// Row `i` is `Pr(X = x | message i)`; messages are drawn independently.
    ProductForm(Vec<Vec<T>>),
}

impl<T: Real> RandomizedEncoder<T> {
    /// Validates weights (explicit) or rows (product form) as stochastic.
    pub fn validate(&self, num_inputs: usize) -> Result<()> {
        let tol = T::stochastic_tol(1e-12);
        match self {
            Self::Explicit(atoms) => {
                for (g, w) in atoms {
                    g.validate(num_inputs)?;
                    if !(*w >= T::zero()) {
                        return Err(Error::InvalidDistribution(format!("negative atom weight {w}")));
                    }
                }
                let s = ordered_sum(atoms.iter().map(|(_, w)| *w));
                if (s - T::one()).abs() > tol {
                    return Err(Error::InvalidDistribution(format!("atom weights sum to {s}")));
                }
            }
            Self::ProductForm(rows) => {
                for row in rows {
                    if row.len() != num_inputs {
                        return Err(Error::DimensionMismatch { expected: num_inputs, got: row.len() });
                    }
                    let s = ordered_sum(row.iter().copied());
                    if row.iter().any(|&v| !(v >= T::zero())) || (s - T::one()).abs() > tol {
                        return Err(Error::InvalidDistribution(format!("product-form row {row:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_messages(&self) -> usize {
        match self {
            Self::Explicit(atoms) => atoms.first().map_or(0, |(g, _)| g.len()),
            Self::ProductForm(rows) => rows.len(),
        }
    }

    /// Returns the map when the encoder has a single realization.
    pub fn as_deterministic(&self) -> Option<EncodingFunction> {
        match self {
            Self::Explicit(atoms) => {
                let mut live = atoms.iter().filter(|(_, w)| *w > T::zero());
                let first = live.next()?;
                live.all(|(g, _)| *g == first.0).then(|| first.0.clone())
            }
            Self::ProductForm(rows) => rows
                .iter()
                .map(|row| {
                    let mut support = row.iter().enumerate().filter(|(_, &p)| p > T::zero());
                    let (x, _) = support.next()?;
                    support.next().is_none().then_some(x)
                })
                .collect::<Option<Vec<_>>>()
                .map(EncodingFunction),
        }
    }

    /// Draws one realization.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EncodingFunction {
        match self {
            Self::Explicit(atoms) => {
                let idx = draw_index(atoms.iter().map(|(_, w)| *w), rng);
                atoms[idx].0.clone()
            }
            Self::ProductForm(rows) => {
                EncodingFunction(rows.iter().map(|row| draw_index(row.iter().copied(), rng)).collect())
            }
        }
    }
}

/// Inverse-CDF draw from nonnegative weights; lands on the last positive
/// weight if rounding leaves the cumulative sum short of the uniform draw.
fn draw_index<T: Real, R: Rng + ?Sized>(weights: impl Iterator<Item = T>, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (k, w) in weights.enumerate() {
        let w = w.to_f64_lossy();
        if w > 0.0 {
            last = k;
            acc += w;
            if u < acc {
                return k;
            }
        }
    }
    last
}

/// Either a single map or a distribution over maps.
#[derive(Debug, Clone, PartialEq)]
pub enum Encoder<T> {
    Deterministic(EncodingFunction),
    Randomized(RandomizedEncoder<T>),
}

impl<T: Real> Encoder<T> {
    /// Realized map used for one channel use. Deterministic encoders consume no randomness.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> EncodingFunction {
        match self {
            Self::Deterministic(g) => g.clone(),
            Self::Randomized(r) => r.sample(rng),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Self::Deterministic(_))
    }
}
