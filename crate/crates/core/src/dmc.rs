//! Discrete memoryless channels: validation, sampling, capacity and the
//! constants `C`, `C1`, `C2` that drive every bound in the crate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::divergences::kl_divergence;
use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Real};

/// Row-sum deviation above which a matrix is rejected.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;
/// Tolerance used by [`blahut_arimoto`] when the caller does not pick one.
pub const DEFAULT_BA_TOLERANCE: f64 = 1e-9;
/// Iteration cap for [`blahut_arimoto`].
pub const BA_MAX_ITERATIONS: usize = 100_000;
/// Largest output alphabet searched by [`detect_symmetric_pairing`] by default.
pub const DEFAULT_PAIRING_SEARCH_LIMIT: usize = 8;

const PAIRING_TOLERANCE: f64 = 1e-12;

/// A validated transition matrix `P(Y = y | X = x)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<T> {
    num_inputs: usize,
    num_outputs: usize,
    transition: Vec<T>,
    strictly_positive: bool,
}

impl<T: Real> Channel<T> {
    /// Validates `rows` as a stochastic matrix and renormalizes each row.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let num_inputs = rows.len();
        let num_outputs = rows.first().map_or(0, Vec::len);
        if num_inputs == 0 || num_outputs == 0 {
            return Err(Error::EmptyMatrix);
        }
        let tol = T::stochastic_tol(ROW_SUM_TOLERANCE);
        let mut transition = Vec::with_capacity(num_inputs * num_outputs);
        for (row_idx, row) in rows.iter().enumerate() {
            if row.len() != num_outputs {
                return Err(Error::RaggedRow { row: row_idx, got: row.len(), expected: num_outputs });
            }
            for (col, &v) in row.iter().enumerate() {
                if !(v >= T::zero()) || !v.is_finite() {
                    return Err(Error::NegativeEntry { row: row_idx, col, value: v.to_f64_lossy() });
                }
            }
            let sum = ordered_sum(row.iter().copied());
            if (sum - T::one()).abs() > tol {
                return Err(Error::NonStochasticRow { row: row_idx, sum: sum.to_f64_lossy() });
            }
            transition.extend(row.iter().map(|&v| v / sum));
        }
        let identical = rows.iter().skip(1).all(|row| {
            row.iter()
                .zip(&rows[0])
                .all(|(&a, &b)| (a - b).abs() <= T::lit(PAIRING_TOLERANCE))
        });
        if identical {
            return Err(Error::DegenerateChannel);
        }
        let strictly_positive = transition.iter().all(|&v| v > T::zero());
        Ok(Self { num_inputs, num_outputs, transition, strictly_positive })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: T) -> Result<Self> {
        Self::new(vec![vec![T::one() - p, p], vec![p, T::one() - p]])
    }

    /// K-ary symmetric channel: correct symbol with probability `1 - p`,
    /// every other symbol with probability `p / (K - 1)`.
    pub fn kary_symmetric(k: usize, p: T) -> Result<Self> {
        if k < 2 {
            return Err(Error::ParameterDomain(format!("K-ary symmetric channel needs K >= 2, got {k}")));
        }
        let off = p / T::from_count(k - 1);
        let rows = (0..k)
            .map(|x| (0..k).map(|y| if x == y { T::one() - p } else { off }).collect())
            .collect();
        Self::new(rows)
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    /// True iff every transition probability is strictly positive (finite `C2`).
    pub fn is_strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    pub fn is_binary_input(&self) -> bool {
        self.num_inputs == 2
    }

    /// Output distribution `P_x`.
    ///
    /// Panics if `x` is out of range.
    #[inline]
    pub fn row(&self, x: usize) -> &[T] {
        &self.transition[x * self.num_outputs..(x + 1) * self.num_outputs]
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize) -> T {
        self.transition[x * self.num_outputs + y]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.transition.chunks(self.num_outputs)
    }

    /// Draws one channel output for input `x`.
    pub fn sample_output<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> Result<usize> {
        if x >= self.num_inputs {
            return Err(Error::IndexOutOfRange { index: x, len: self.num_inputs });
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_supported = 0;
        for (y, &p) in self.row(x).iter().enumerate() {
            let p = p.to_f64_lossy();
            if p > 0.0 {
                last_supported = y;
            }
            acc += p;
            if u < acc {
                return Ok(y);
            }
        }
        // u landed in the rounding slack above the accumulated row mass
        Ok(last_supported)
    }

    /// Relabels outputs so that new output `perm[y]` carries old output `y`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_outputs {
            return Err(Error::DimensionMismatch { expected: self.num_outputs, got: perm.len() });
        }
        let rows = self
            .rows()
            .map(|row| {
                let mut out = vec![T::zero(); row.len()];
                for (y, &p) in row.iter().enumerate() {
                    out[perm[y]] = p;
                }
                out
            })
            .collect();
        Self::new(rows)
    }

    /// Casts the transition matrix to another scalar type.
    pub fn cast<U: Real>(&self) -> Result<Channel<U>> {
        Channel::new(
            self.rows()
                .map(|r| r.iter().map(|&v| U::lit(v.to_f64_lossy())).collect())
                .collect(),
        )
    }

    /// Runs [`blahut_arimoto`] at `tol` and derives all channel constants.
    pub fn constants(&self, tol: T) -> Result<ChannelConstants<T>> {
        let cap = blahut_arimoto(self, tol)?;
        channel_constants(self, &cap)
    }
}

impl Channel<f64> {
    /// Binary-input ternary-output channel that is not output-symmetric yet
    /// has the uniform capacity-achieving input distribution.
    ///
    /// Input 0 emits `[1 - eta, eta/2, eta/2]`; input 1 emits
    /// `[0.4 eta, b, 1 - 0.4 eta - b]` with `b` the smallest root of
    /// `D(P_0 || m) = D(P_1 || m)`, `m` the uniform mixture. Defined for
    /// `eta` in `[0.15, 0.35]`, where the orientation `D(P_0||P_1) >= D(P_1||P_0)`
    /// also holds.
    pub fn ternary_uniform_input(eta: f64) -> Result<Self> {
        if !(0.15..=0.35).contains(&eta) {
            return Err(Error::ParameterDomain(format!(
                "ternary uniform-input channel defined for eta in [0.15, 0.35], got {eta}"
            )));
        }
        let a = 0.4 * eta;
        let p0 = [1.0 - eta, eta / 2.0, eta / 2.0];
        let imbalance = |b: f64| {
            let p1 = [a, b, 1.0 - a - b];
            let m: Vec<f64> = p0.iter().zip(&p1).map(|(u, v)| 0.5 * (u + v)).collect();
            kl_divergence(&p0, &m).unwrap() - kl_divergence(&p1, &m).unwrap()
        };
        let grid = 4000;
        let span = 1.0 - a;
        let mut bracket = None;
        let mut prev = (span * 1e-6, imbalance(span * 1e-6));
        for k in 1..grid {
            let b = span * k as f64 / grid as f64;
            let v = imbalance(b);
            if v.signum() != prev.1.signum() {
                bracket = Some((prev.0, b));
                break;
            }
            prev = (b, v);
        }
        let (mut lo, mut hi) = bracket.ok_or_else(|| {
            Error::ParameterDomain(format!("no uniform-input solution for eta = {eta}"))
        })?;
        let lo_sign = imbalance(lo).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if imbalance(mid).signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = 0.5 * (lo + hi);
        Self::new(vec![p0.to_vec(), vec![a, b, 1.0 - a - b]])
    }
}

/// On-disk channel description: `{"inputs": .., "outputs": .., "rows": [[..], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub inputs: usize,
    pub outputs: usize,
    pub rows: Vec<Vec<f64>>,
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ChannelFormat(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel spec serializes")
    }

    pub fn into_channel<T: Real>(self) -> Result<Channel<T>> {
        if self.rows.len() != self.inputs {
            return Err(Error::ChannelFormat(format!(
                "declared {} inputs but found {} rows",
                self.inputs,
                self.rows.len()
            )));
        }
        if let Some((i, r)) = self.rows.iter().enumerate().find(|(_, r)| r.len() != self.outputs) {
            return Err(Error::ChannelFormat(format!(
                "declared {} outputs but row {i} has {} entries",
                self.outputs,
                r.len()
            )));
        }
        Channel::new(self.rows.into_iter().map(|r| r.into_iter().map(T::lit).collect()).collect())
    }

    pub fn from_channel<T: Real>(ch: &Channel<T>) -> Self {
        Self {
            inputs: ch.num_inputs(),
            outputs: ch.num_outputs(),
            rows: ch.rows().map(|r| r.iter().map(|v| v.to_f64_lossy()).collect()).collect(),
        }
    }
}

/// Parses a JSON channel file and validates the matrix.
pub fn parse_channel<T: Real>(text: &str) -> Result<Channel<T>> {
    ChannelSpec::from_json(text)?.into_channel()
}

/// Output of [`blahut_arimoto`].
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult<T> {
    /// Capacity in bits per channel use (lower end of the duality bracket).
    pub capacity: T,
    pub input_dist: Vec<T>,
    /// Final `max_x D(P_x || q) - I(pi; P)`; the true capacity lies within it.
    pub gap: T,
    pub iterations: usize,
    pub tolerance: T,
}

/// `D(P_x || sum_l pi_l P_l)` for every input `x`.
pub fn input_divergences<T: Real>(ch: &Channel<T>, input_dist: &[T]) -> Vec<T> {
    let q = output_distribution(ch, input_dist);
    ch.rows().map(|row| kl_divergence(row, &q).expect("row and mixture share support")).collect()
}

/// Output distribution induced by `input_dist`.
pub fn output_distribution<T: Real>(ch: &Channel<T>, input_dist: &[T]) -> Vec<T> {
    let mut q = vec![T::zero(); ch.num_outputs()];
    for (row, &w) in ch.rows().zip(input_dist) {
        for (qy, &p) in q.iter_mut().zip(row) {
            *qy = *qy + w * p;
        }
    }
    q
}

/// Alternating maximization for the capacity, started from the uniform input
/// and stopped once the duality gap `max_x D_x - sum_x pi_x D_x` drops below `tol`.
pub fn blahut_arimoto<T: Real>(ch: &Channel<T>, tol: T) -> Result<CapacityResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::ParameterDomain("tolerance must be positive".into()));
    }
    let n = ch.num_inputs();
    let mut pi = vec![T::one() / T::from_count(n); n];
    let mut gap = T::infinity();
    for iteration in 0..=BA_MAX_ITERATIONS {
        let d = input_divergences(ch, &pi);
        let lower = ordered_sum(pi.iter().zip(&d).map(|(&p, &dx)| p * dx));
        let upper = d.iter().copied().fold(T::neg_infinity(), T::max);
        gap = upper - lower;
        if gap < tol {
            return Ok(CapacityResult { capacity: lower, input_dist: pi, gap, iterations: iteration, tolerance: tol });
        }
        for (p, &dx) in pi.iter_mut().zip(&d) {
            *p = *p * (dx - upper).exp2();
        }
        let total = ordered_sum(pi.iter().copied());
        pi.iter_mut().for_each(|p| *p = *p / total);
    }
    Err(Error::NoConvergence { iterations: BA_MAX_ITERATIONS, gap: gap.to_f64_lossy() })
}

/// Capacity, capacity-achieving input and the constants `C1`, `C2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConstants<T> {
    /// `C`, bits per use.
    pub capacity: T,
    /// `pi*`.
    pub input_dist: Vec<T>,
    /// `C1 = max_{x, x'} D(P_x || P_x')`, bits.
    pub c1: T,
    /// Ordered input pair `(x, x')` attaining `C1` (first in index order).
    pub c1_pair: (usize, usize),
    /// `C2 = max_y max_x P(y|x) / min_x P(y|x)`.
    pub c2: T,
    pub ba_tolerance: T,
}

impl<T: Real> ChannelConstants<T> {
    /// True if `pi*` is uniform within `tol`.
    pub fn has_uniform_input(&self, tol: T) -> bool {
        let u = T::one() / T::from_count(self.input_dist.len());
        self.input_dist.iter().all(|&p| (p - u).abs() <= tol)
    }
}

/// Derives `C1` and `C2` for a strictly positive channel from a capacity result.
pub fn channel_constants<T: Real>(ch: &Channel<T>, cap: &CapacityResult<T>) -> Result<ChannelConstants<T>> {
    if !ch.is_strictly_positive() {
        return Err(Error::InfiniteC2);
    }
    let mut c1 = T::neg_infinity();
    let mut c1_pair = (0, 0);
    for x in 0..ch.num_inputs() {
        for xp in 0..ch.num_inputs() {
            if x == xp {
                continue;
            }
            let d = kl_divergence(ch.row(x), ch.row(xp))?;
            if d > c1 {
                c1 = d;
                c1_pair = (x, xp);
            }
        }
    }
    let mut c2 = T::one();
    for y in 0..ch.num_outputs() {
        let col = (0..ch.num_inputs()).map(|x| ch.prob(x, y));
        let hi = col.clone().fold(T::neg_infinity(), T::max);
        let lo = col.fold(T::infinity(), T::min);
        c2 = c2.max(hi / lo);
    }
    Ok(ChannelConstants {
        capacity: cap.capacity,
        input_dist: cap.input_dist.clone(),
        c1,
        c1_pair,
        c2,
        ba_tolerance: cap.tolerance,
    })
}

/// Output involution `f` with `P(y|0) = P(f(y)|1)` for every output `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryPairing {
    permutation: Vec<usize>,
}

impl SymmetryPairing {
    /// Accepts an externally supplied involution after checking it against the channel.
    pub fn from_permutation<T: Real>(ch: &Channel<T>, permutation: Vec<usize>) -> Result<Option<Self>> {
        if !ch.is_binary_input() {
            return Err(Error::NotBinaryInput(ch.num_inputs()));
        }
        if permutation.len() != ch.num_outputs() {
            return Err(Error::DimensionMismatch { expected: ch.num_outputs(), got: permutation.len() });
        }
        let n = permutation.len();
        let is_involution = permutation.iter().all(|&v| v < n) && (0..n).all(|y| permutation[permutation[y]] == y);
        let tol = T::lit(PAIRING_TOLERANCE);
        let matches = is_involution && (0..n).all(|y| (ch.prob(0, y) - ch.prob(1, permutation[y])).abs() <= tol);
        Ok(matches.then_some(Self { permutation }))
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }
}

/// Searches for the lexicographically smallest output involution pairing the
/// two rows of a binary-input channel.
pub fn detect_symmetric_pairing<T: Real>(ch: &Channel<T>, search_limit: usize) -> Result<Option<SymmetryPairing>> {
    if !ch.is_binary_input() {
        return Err(Error::NotBinaryInput(ch.num_inputs()));
    }
    let n = ch.num_outputs();
    if n > search_limit {
        return Err(Error::SearchSpaceTooLarge { size: factorial(n), limit: search_limit });
    }
    let tol = T::lit(PAIRING_TOLERANCE);
    let fits = |y: usize, v: usize| {
        (ch.prob(0, y) - ch.prob(1, v)).abs() <= tol && (ch.prob(0, v) - ch.prob(1, y)).abs() <= tol
    };
    let mut f: Vec<Option<usize>> = vec![None; n];
    Ok(pairing_search(0, &mut f, &fits).then(|| SymmetryPairing {
        permutation: f.into_iter().map(|v| v.expect("complete assignment")).collect(),
    }))
}

fn pairing_search(y: usize, f: &mut [Option<usize>], fits: &impl Fn(usize, usize) -> bool) -> bool {
    if y == f.len() {
        return true;
    }
    if f[y].is_some() {
        return pairing_search(y + 1, f, fits);
    }
    // candidates in ascending order give the lexicographically smallest involution first
    for v in y..f.len() {
        if f[v].is_some() || !fits(y, v) {
            continue;
        }
        f[y] = Some(v);
        f[v] = Some(y);
        if pairing_search(y + 1, f, fits) {
            return true;
        }
        f[y] = None;
        f[v] = None;
    }
    false
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn validation_paths() {
        let bsc = Channel::new(vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        assert!(bsc.is_strictly_positive());
        assert_eq!(
            Channel::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap_err(),
            Error::DegenerateChannel
        );
        assert!(matches!(
            Channel::new(vec![vec![0.9, 0.2], vec![0.1, 0.9]]),
            Err(Error::NonStochasticRow { row: 0, .. })
        ));
        assert!(matches!(
            Channel::new(vec![vec![1.1, -0.1], vec![0.1, 0.9]]),
            Err(Error::NegativeEntry { row: 0, col: 1, .. })
        ));
        assert_eq!(Channel::<f64>::new(vec![]).unwrap_err(), Error::EmptyMatrix);
        assert!(matches!(
            Channel::new(vec![vec![1.0], vec![0.5, 0.5]]),
            Err(Error::RaggedRow { row: 1, .. })
        ));
        let z = Channel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!z.is_strictly_positive());
    }

    #[test]
    fn sampling_point_mass_and_reproducibility() {
        let ch = Channel::new(vec![vec![1.0, 0.0], vec![0.3, 0.7]]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..1000 {
            assert_eq!(ch.sample_output(0, &mut rng).unwrap(), 0);
        }
        let draw = |seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..64).map(|_| ch.sample_output(1, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_eq!(ch.sample_output(2, &mut rng).unwrap_err(), Error::IndexOutOfRange { index: 2, len: 2 });
    }

    #[test]
    fn bsc_frequency_matches_row() {
        let ch = Channel::bsc(0.1).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        let n = 1_000_000;
        let ones = (0..n).filter(|_| ch.sample_output(0, &mut rng).unwrap() == 1).count();
        let freq = ones as f64 / n as f64;
        let stderr = (0.1_f64 * 0.9 / n as f64).sqrt();
        assert!((freq - 0.1).abs() <= 3.0 * stderr, "freq {freq}");
    }

    #[test]
    fn capacity_of_bsc_and_identity() {
        let cap = blahut_arimoto(&Channel::bsc(0.1).unwrap(), 1e-9).unwrap();
        assert!((cap.capacity - (1.0 - h2(0.1))).abs() < 1e-9);
        assert!((cap.capacity - 0.531004).abs() < 1e-6);
        assert!(cap.input_dist.iter().all(|&p| (p - 0.5).abs() < 1e-12));
        let id = blahut_arimoto(&Channel::<f64>::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(), 1e-9).unwrap();
        assert!((id.capacity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ternary_channel_has_uniform_input_and_fact1() {
        let ch = Channel::ternary_uniform_input(0.25).unwrap();
        let cap = blahut_arimoto(&ch, 1e-9).unwrap();
        assert!(cap.input_dist.iter().all(|&p| (p - 0.5).abs() < 1e-6), "{:?}", cap.input_dist);
        for d in input_divergences(&ch, &cap.input_dist) {
            assert!((d - cap.capacity).abs() <= 10.0 * 1e-9);
        }
        assert_eq!(detect_symmetric_pairing(&ch, 8).unwrap(), None);
        let k = channel_constants(&ch, &cap).unwrap();
        assert_eq!(k.c1_pair, (0, 1));
        assert!(Channel::ternary_uniform_input(0.45).is_err());
    }

    #[test]
    fn constants_of_bsc() {
        let k = Channel::bsc(0.1).unwrap().constants(1e-9).unwrap();
        let c1 = 0.8 * 9f64.log2();
        assert!((k.c1 - c1).abs() < 1e-12);
        assert!((k.c1 - 2.535940).abs() < 1e-6);
        assert!((k.c2 - 9.0).abs() < 1e-12);
        assert!(k.capacity <= k.c1 && k.c1 <= k.c2.log2() + 1e-12);
        let z = Channel::new(vec![vec![0.9, 0.1, 0.0], vec![0.1, 0.8, 0.1]]).unwrap();
        assert_eq!(z.constants(1e-9).unwrap_err(), Error::InfiniteC2);
    }

    #[test]
    fn near_useless_bsc_constants_shrink() {
        let k = Channel::<f64>::bsc(0.5 - 1e-4).unwrap().constants(1e-12).unwrap();
        assert!(k.c1 < 1e-5);
        assert!((k.c2 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn symmetric_pairings() {
        let bsc = Channel::bsc(0.2).unwrap();
        assert_eq!(detect_symmetric_pairing(&bsc, 8).unwrap().unwrap().permutation(), &[1, 0]);
        let bec = Channel::new(vec![vec![0.7, 0.3, 0.0], vec![0.0, 0.3, 0.7]]).unwrap();
        assert_eq!(detect_symmetric_pairing(&bec, 8).unwrap().unwrap().permutation(), &[2, 1, 0]);
        let big = Channel::new(vec![vec![0.1; 10], {
            let mut r = vec![0.05; 10];
            r[0] = 0.55;
            r
        }])
        .unwrap();
        assert!(matches!(detect_symmetric_pairing(&big, 8), Err(Error::SearchSpaceTooLarge { .. })));
        let tri = Channel::kary_symmetric(3, 0.1).unwrap();
        assert_eq!(detect_symmetric_pairing(&tri, 8).unwrap_err(), Error::NotBinaryInput(3));
        assert!(SymmetryPairing::from_permutation(&bec, vec![2, 1, 0]).unwrap().is_some());
        assert!(SymmetryPairing::from_permutation(&bec, vec![1, 0, 2]).unwrap().is_none());
    }

    #[test]
    fn channel_file_round_trip() {
        let text = r#"{"inputs": 2, "outputs": 2, "rows": [[0.9, 0.1], [0.1, 0.9]]}"#;
        let ch: Channel<f64> = parse_channel(text).unwrap();
        assert_eq!(ch, Channel::bsc(0.1).unwrap());
        let bad = r#"{"inputs": 2, "outputs": 2, "rows": [[0.9, 0.2], [0.1, 0.9]]}"#;
        assert!(matches!(parse_channel::<f64>(bad), Err(Error::NonStochasticRow { .. })));
        let dims = r#"{"inputs": 3, "outputs": 2, "rows": [[0.9, 0.1], [0.1, 0.9]]}"#;
        assert!(matches!(parse_channel::<f64>(dims), Err(Error::ChannelFormat(_))));
        assert!(matches!(parse_channel::<f64>("{"), Err(Error::ChannelFormat(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let k = Channel::<f32>::bsc(0.1).unwrap().constants(1e-5).unwrap();
        assert!((k.capacity - 0.531004).abs() < 1e-4);
        assert!((k.c2 - 9.0).abs() < 1e-4);
    }
}
