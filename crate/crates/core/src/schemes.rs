//! Encoding schemes. Each maps the current posterior (and channel metadata)
//! to a deterministic or randomized encoding function.
//!
//! Message indices are 0-based throughout; a split point `k` means messages
//! `0..k` are sent as input 0.

use std::fmt;
use std::str::FromStr;

use crate::belief::Belief;
use crate::dmc::{detect_symmetric_pairing, Channel, ChannelConstants, DEFAULT_PAIRING_SEARCH_LIMIT};
use crate::divergences::ejs_with;
use crate::encoder::{Encoder, EncodingFunction, RandomizedEncoder};
use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Real};

/// Default cap on `|X|^M` for exhaustive EJS maximization.
pub const DEFAULT_MAXEJS_LIMIT: usize = 1 << 20;
/// Default cap on `M` for the exhaustive binary partition search.
pub const DEFAULT_ALG1_MAX_MESSAGES: usize = 20;
/// Default cap on `K^M` for the exhaustive K-ary fallback.
pub const DEFAULT_KARY_FALLBACK_LIMIT: usize = 1 << 20;

/// Relative slack under which two EJS values count as tied.
const EJS_TIE_TOLERANCE: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Posterior matching
// ---------------------------------------------------------------------------

/// Variable-length posterior matching: message `i` occupies the interval
/// `[sum_{i'<i} rho_i', sum_{i'<=i} rho_i')`, input `x` the interval of
/// `pi*`, and message `i` sends `x` with probability equal to the overlap
/// divided by `rho_i`.
///
/// Zero-overlap candidates are pruned. A message with zero posterior gets a
/// point mass on the input whose interval contains its (empty) interval.
pub fn pm_encoder<T: Real>(b: &Belief<T>, consts: &ChannelConstants<T>) -> Result<RandomizedEncoder<T>> {
    let pi = &consts.input_dist;
    if pi.is_empty() {
        return Err(Error::InvalidDistribution("empty capacity-achieving input".into()));
    }
    let input_edges = prefix_sums(pi);
    let msg_edges = prefix_sums(b.rho());
    let rows = (0..b.num_messages())
        .map(|i| {
            let (lo, hi) = (msg_edges[i], msg_edges[i + 1]);
            let mut row: Vec<T> = (0..pi.len())
                .map(|x| {
                    let overlap = hi.min(input_edges[x + 1]) - lo.max(input_edges[x]);
                    overlap.max(T::zero())
                })
                .collect();
            let mass = ordered_sum(row.iter().copied());
            if b.rho()[i] > T::zero() && mass > T::zero() {
                row.iter_mut().for_each(|v| *v = *v / mass);
            } else {
                let x = (0..pi.len()).find(|&x| input_edges[x + 1] > lo).unwrap_or(pi.len() - 1);
                row = (0..pi.len()).map(|k| if k == x { T::one() } else { T::zero() }).collect();
            }
            row
        })
        .collect();
    Ok(RandomizedEncoder::ProductForm(rows))
}

fn prefix_sums<T: Real>(v: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(v.len() + 1);
    let mut acc = T::zero();
    out.push(acc);
    for &x in v {
        acc = acc + x;
        out.push(acc);
    }
    out
}

// ---------------------------------------------------------------------------
// MaxEJS
// ---------------------------------------------------------------------------

/// Exhaustive maximization of `EJS(rho, gamma)` over all `|X|^M` maps.
/// Ties (within a relative `1e-12`) go to the lexicographically smallest map.
pub fn maxejs_encoder<T: Real>(b: &Belief<T>, ch: &Channel<T>, search_limit: usize) -> Result<EncodingFunction> {
    let m = b.num_messages();
    if m < 2 {
        return Err(Error::DegenerateM(m));
    }
    let n_in = ch.num_inputs();
    let size = (n_in as f64).powi(m as i32);
    if size > search_limit as f64 {
        return Err(Error::SearchSpaceTooLarge { size, limit: search_limit });
    }
    let rho = b.rho();
    let tol = T::lit(EJS_TIE_TOLERANCE);
    let mut digits = vec![0usize; m];
    let mut best = (T::neg_infinity(), digits.clone());
    loop {
        let v = ejs_with(rho, ch.num_outputs(), |i| ch.row(digits[i]));
        if best.0 == T::neg_infinity() || v > best.0 + tol * best.0.abs().max(T::one()) {
            best = (v, digits.clone());
        }
        // odometer increment, last message fastest: lexicographic order
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(EncodingFunction::new(best.1));
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < n_in {
                break;
            }
            digits[pos] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Generalized Horstein-Burnashev-Zigangirov
// ---------------------------------------------------------------------------

/// Split point `k*` (number of leading messages sent as 0) minimizing
/// `|sum_{i<k} rho_i - 1/2|` over `k = 1..=M`; lowest `k` on ties.
pub fn ghbz_split<T: Real>(rho: &[T]) -> usize {
    let half = T::lit(0.5);
    let mut acc = T::zero();
    let mut best = (0, T::infinity());
    for (i, &p) in rho.iter().enumerate() {
        acc = acc + p;
        let d = (acc - half).abs();
        if d < best.1 {
            best = (i + 1, d);
        }
    }
    best.0
}

/// Deterministic median split of the posterior in message order.
pub fn ghbz_encoder<T: Real>(b: &Belief<T>) -> EncodingFunction {
    EncodingFunction::threshold(b.num_messages(), ghbz_split(b.rho()))
}

/// Weighting rule between the two GHBZ candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BzRule<T> {
    /// `lambda = delta_2 / (delta_1 + delta_2)`.
    Proportional,
    /// `lambda = nu(delta_2) / (nu(delta_1) + nu(delta_2))` with
    /// `nu(x) = log((0.5 + (1 - 2p) x) / (0.5 - (1 - 2p) x))`.
    Nu { crossover: T },
}

/// Details of the two-candidate randomized GHBZ encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct BzSplit<T> {
    pub k_star: usize,
    pub k_star2: usize,
    pub delta1: T,
    pub delta2: T,
    pub lambda: T,
}

/// Computes `k*`, `k*_2 = k* - sign(S_{k*} - 1/2)`, the distances `delta_1`,
/// `delta_2` and the weight on the `k*` split under `rule`.
pub fn bz_split<T: Real>(rho: &[T], rule: BzRule<T>) -> Result<BzSplit<T>> {
    let half = T::lit(0.5);
    let k_star = ghbz_split(rho);
    let cum = |k: usize| ordered_sum(rho[..k].iter().copied());
    let s = cum(k_star) - half;
    let k_star2 = if s > T::zero() {
        k_star - 1
    } else if s < T::zero() {
        k_star + 1
    } else {
        k_star
    };
    let delta1 = s.abs();
    let delta2 = (cum(k_star2) - half).abs();
    let lambda = if delta1 + delta2 == T::zero() || k_star2 == k_star {
        T::one()
    } else {
        match rule {
            BzRule::Proportional => delta2 / (delta1 + delta2),
            BzRule::Nu { crossover } => {
                if !(crossover > T::zero() && crossover < half) {
                    return Err(Error::ParameterDomain(format!("crossover must lie in (0, 1/2), got {crossover}")));
                }
                let (n1, n2) = (nu(delta1, crossover), nu(delta2, crossover));
                n2 / (n1 + n2)
            }
        }
    };
    Ok(BzSplit { k_star, k_star2, delta1, delta2, lambda })
}

/// `nu(x) = log2((0.5 + (1 - 2p) x) / (0.5 - (1 - 2p) x))`.
pub fn nu<T: Real>(x: T, p: T) -> T {
    let half = T::lit(0.5);
    let a = (T::one() - p - p) * x;
    ((half + a) / (half - a)).log2()
}

/// Randomized GHBZ encoder: the `k*` split with weight `lambda`, the `k*_2`
/// split with weight `1 - lambda`. Collapses to one atom when the median is hit exactly.
pub fn bz_randomized_encoder<T: Real>(b: &Belief<T>, rule: BzRule<T>) -> Result<RandomizedEncoder<T>> {
    let m = b.num_messages();
    let split = bz_split(b.rho(), rule)?;
    let primary = EncodingFunction::threshold(m, split.k_star);
    if split.lambda >= T::one() {
        return Ok(RandomizedEncoder::Explicit(vec![(primary, T::one())]));
    }
    let secondary = EncodingFunction::threshold(m, split.k_star2);
    Ok(RandomizedEncoder::Explicit(vec![(primary, split.lambda), (secondary, T::one() - split.lambda)]))
}

// ---------------------------------------------------------------------------
// Binary partitions
// ---------------------------------------------------------------------------

/// `delta_gamma = sum_{gamma(j)=0} rho_j - sum_{gamma(j)=1} rho_j`, each side summed in index order.
pub fn imbalance<T: Real>(rho: &[T], gamma: &EncodingFunction) -> T {
    let side = |x: usize| ordered_sum(rho.iter().zip(gamma.iter()).filter(|&(_, g)| g == x).map(|(&p, _)| p));
    side(0) - side(1)
}

/// `0 <= delta_gamma < rho_i` for every message `i` sent as 0.
pub fn check_binary_condition<T: Real>(rho: &[T], gamma: &EncodingFunction) -> bool {
    let delta = imbalance(rho, gamma);
    delta >= T::zero() && rho.iter().zip(gamma.iter()).filter(|&(_, g)| g == 0).all(|(&p, _)| delta < p)
}

/// Exhaustive search for the map with the smallest nonnegative imbalance;
/// the lexicographically smallest map wins ties.
pub fn binary_partition_alg1<T: Real>(b: &Belief<T>, max_messages: usize) -> Result<EncodingFunction> {
    let m = b.num_messages();
    if m > max_messages || m >= usize::BITS as usize {
        return Err(Error::SearchSpaceTooLarge { size: 2f64.powi(m as i32), limit: 1 << max_messages.min(62) });
    }
    let rho = b.rho();
    let mut best: Option<(T, u64)> = None;
    let mut gamma = EncodingFunction::constant(m, 0);
    for code in 0u64..(1u64 << m) {
        gamma = code_to_map(code, m, gamma);
        let delta = imbalance(rho, &gamma);
        if delta >= T::zero() && best.is_none_or(|(d, _)| delta < d) {
            best = Some((delta, code));
        }
    }
    // the all-zero map always has imbalance 1
    let (_, code) = best.expect("nonnegative imbalance exists");
    Ok(code_to_map(code, m, gamma))
}

fn code_to_map(code: u64, m: usize, reuse: EncodingFunction) -> EncodingFunction {
    let mut v = reuse.as_slice().to_vec();
    v.resize(m, 0);
    for (i, g) in v.iter_mut().enumerate() {
        *g = ((code >> (m - 1 - i)) & 1) as usize;
    }
    EncodingFunction::new(v)
}

/// Greedy swap heuristic: repeatedly move the lightest message of the
/// heavier set `S0` to `S1`, swapping the sets whenever `S1` becomes heavier,
/// until the lightest member of `S0` is no lighter than the imbalance.
pub fn binary_partition_alg2<T: Real>(b: &Belief<T>) -> EncodingFunction {
    binary_partition_alg2_traced(b).0
}

/// [`binary_partition_alg2`] together with the number of loop rounds executed.
pub fn binary_partition_alg2_traced<T: Real>(b: &Belief<T>) -> (EncodingFunction, usize) {
    let rho = b.rho();
    let m = rho.len();
    let mut in_s0 = vec![true; m];
    let (mut r0, mut r1) = (T::one(), T::zero());
    let mut delta = T::one();
    let min_s0 = |in_s0: &[bool]| {
        (0..m)
            .filter(|&i| in_s0[i])
            .fold(None, |best: Option<usize>, i| match best {
                Some(k) if rho[k] <= rho[i] => Some(k),
                _ => Some(i),
            })
    };
    let mut rho_min = rho.iter().copied().fold(T::infinity(), T::min);
    let mut rounds = 0;
    let cap = m * m + 1;
    while rho_min < delta && rounds < cap {
        rounds += 1;
        let Some(k) = min_s0(&in_s0) else { break };
        in_s0[k] = false;
        r0 = r0 - rho[k];
        r1 = r1 + rho[k];
        if r0 < r1 {
            in_s0.iter_mut().for_each(|s| *s = !*s);
            std::mem::swap(&mut r0, &mut r1);
        }
        delta = r0 - r1;
        rho_min = min_s0(&in_s0).map_or(T::infinity(), |k| rho[k]);
    }
    (EncodingFunction::new(in_s0.iter().map(|&s| usize::from(!s)).collect()), rounds)
}

// ---------------------------------------------------------------------------
// K-ary symmetric channels
// ---------------------------------------------------------------------------

/// Class masses `sum_{gamma(j)=x} rho_j` for `x < k`.
pub fn class_masses<T: Real>(rho: &[T], gamma: &EncodingFunction, k: usize) -> Vec<T> {
    (0..k)
        .map(|x| ordered_sum(rho.iter().zip(gamma.iter()).filter(|&(_, g)| g == x).map(|(&p, _)| p)))
        .collect()
}

/// For all classes `x, x'` with `m_x >= max{1/K, m_x'}`: `m_x - m_x' <= rho_i`
/// for every message `i` in class `x`.
pub fn check_kary_condition<T: Real>(rho: &[T], gamma: &EncodingFunction, k: usize) -> bool {
    if gamma.iter().any(|g| g >= k) {
        return false;
    }
    first_kary_violation(rho, gamma, k).is_none()
}

/// First `(message, heavy class, light class)` breaking the K-ary condition.
fn first_kary_violation<T: Real>(rho: &[T], gamma: &EncodingFunction, k: usize) -> Option<(usize, usize, usize)> {
    let masses = class_masses(rho, gamma, k);
    let floor = T::one() / T::from_count(k);
    for x in 0..k {
        if masses[x] < floor {
            continue;
        }
        for xp in (0..k).filter(|&xp| xp != x && masses[x] >= masses[xp]) {
            let gap = masses[x] - masses[xp];
            if let Some(i) = (0..rho.len()).find(|&i| gamma.get(i) == x && gap > rho[i]) {
                return Some((i, x, xp));
            }
        }
    }
    None
}

/// K-way partition satisfying [`check_kary_condition`]: largest-first greedy
/// assignment to the lightest class, then a repair loop that moves a violating
/// message from the heavy class to the light one. Each move strictly lowers
/// the sum of squared class masses, so the loop terminates; an exhaustive
/// search over `K^M` maps backs it up.
pub fn kary_symmetric_encoder<T: Real>(b: &Belief<T>, k: usize, fallback_limit: usize) -> Result<EncodingFunction> {
    if k < 2 {
        return Err(Error::ParameterDomain(format!("K-ary partition needs K >= 2, got {k}")));
    }
    let rho = b.rho();
    let m = rho.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &c| rho[c].partial_cmp(&rho[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&c)));
    let mut assign = vec![0usize; m];
    let mut masses = vec![T::zero(); k];
    for &i in &order {
        let x = (0..k).fold(0, |best, x| if masses[x] < masses[best] { x } else { best });
        assign[i] = x;
        masses[x] = masses[x] + rho[i];
    }
    let mut gamma = EncodingFunction::new(assign);
    for _ in 0..(64 * m * m + 64) {
        match first_kary_violation(rho, &gamma, k) {
            None => return Ok(gamma),
            Some((i, _, xp)) => {
                let mut v = gamma.as_slice().to_vec();
                v[i] = xp;
                gamma = EncodingFunction::new(v);
            }
        }
    }
    let size = (k as f64).powi(m as i32);
    if size > fallback_limit as f64 {
        return Err(Error::NoValidPartitionFound { k });
    }
    let mut digits = vec![0usize; m];
    loop {
        let candidate = EncodingFunction::new(digits.clone());
        if check_kary_condition(rho, &candidate, k) {
            return Ok(candidate);
        }
        let mut pos = m;
        loop {
            if pos == 0 {
                return Err(Error::NoValidPartitionFound { k });
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < k {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// True if the channel is K-ary symmetric: square, constant diagonal, constant off-diagonal.
pub fn is_kary_symmetric<T: Real>(ch: &Channel<T>) -> bool {
    let k = ch.num_inputs();
    if k != ch.num_outputs() || k < 2 {
        return false;
    }
    let tol = T::lit(1e-12);
    let diag = ch.prob(0, 0);
    let off = ch.prob(0, 1);
    (0..k).all(|x| {
        (0..k).all(|y| {
            let target = if x == y { diag } else { off };
            (ch.prob(x, y) - target).abs() <= tol
        })
    })
}

// ---------------------------------------------------------------------------
// Scheme selection
// ---------------------------------------------------------------------------

/// Scheme selector identifiers used by configuration files and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Pm,
    MaxEjs,
    Ghbz,
    BzProp,
    BzNu,
    Alg1,
    Alg2,
    Kary,
    /// Sends input 0 for every message. Carries no information; exists to
    /// exercise audit failure paths.
    Constant,
}

impl SchemeId {
    pub const ALL: [SchemeId; 9] = [
        SchemeId::Pm,
        SchemeId::MaxEjs,
        SchemeId::Ghbz,
        SchemeId::BzProp,
        SchemeId::BzNu,
        SchemeId::Alg1,
        SchemeId::Alg2,
        SchemeId::Kary,
        SchemeId::Constant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Pm => "pm",
            SchemeId::MaxEjs => "maxejs",
            SchemeId::Ghbz => "ghbz",
            SchemeId::BzProp => "bz-prop",
            SchemeId::BzNu => "bz-nu",
            SchemeId::Alg1 => "alg1",
            SchemeId::Alg2 => "alg2",
            SchemeId::Kary => "kary",
            SchemeId::Constant => "const",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, SchemeId::Pm | SchemeId::BzProp | SchemeId::BzNu)
    }

    pub fn needs_binary_input(self) -> bool {
        matches!(self, SchemeId::Ghbz | SchemeId::BzProp | SchemeId::BzNu | SchemeId::Alg1 | SchemeId::Alg2)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

/// Rate and reliability floors `(R_min, E_min)` an encoder is audited against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReliability<T> {
    pub r_min: T,
    pub e_min: T,
}

/// Whether a scheme's guarantee hypotheses hold on a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeScope {
    pub in_scope: bool,
    /// False when the largest pairwise divergence is attained by `D(P_1 || P_0)`
    /// rather than `D(P_0 || P_1)` on a binary-input channel.
    pub c1_orientation_ok: bool,
    pub notes: Vec<String>,
}

/// A configured encoding scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme<T> {
    pub id: SchemeId,
    /// Crossover used by `bz-nu`; taken from the channel when it is a BSC.
    pub crossover: Option<T>,
    pub maxejs_limit: usize,
    pub alg1_max_messages: usize,
    pub kary_fallback_limit: usize,
}

impl<T: Real> Scheme<T> {
    pub fn new(id: SchemeId) -> Self {
        Self {
            id,
            crossover: None,
            maxejs_limit: DEFAULT_MAXEJS_LIMIT,
            alg1_max_messages: DEFAULT_ALG1_MAX_MESSAGES,
            kary_fallback_limit: DEFAULT_KARY_FALLBACK_LIMIT,
        }
    }

    /// Parses `id` or `bz-nu:<p>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (id, param) = match spec.split_once(':') {
            Some((id, p)) => (id, Some(p)),
            None => (spec, None),
        };
        let mut scheme = Self::new(id.parse()?);
        if let Some(p) = param {
            let v: f64 = p
                .parse()
                .map_err(|_| Error::ParameterDomain(format!("bad scheme parameter `{p}`")))?;
            if scheme.id != SchemeId::BzNu {
                return Err(Error::ParameterDomain(format!("scheme `{id}` takes no parameter")));
            }
            scheme.crossover = Some(T::lit(v));
        }
        Ok(scheme)
    }

    fn mismatch(&self, reason: impl Into<String>) -> Error {
        Error::SchemeChannelMismatch { scheme: self.id.to_string(), reason: reason.into() }
    }

    /// Checks that the scheme can run at all on `ch` with `m` messages.
    pub fn check_channel(&self, ch: &Channel<T>, m: usize) -> Result<()> {
        if self.id.needs_binary_input() && !ch.is_binary_input() {
            return Err(self.mismatch(format!("needs a binary-input channel, got {} inputs", ch.num_inputs())));
        }
        match self.id {
            SchemeId::BzNu => {
                self.nu_crossover(ch)?;
            }
            SchemeId::Kary if ch.num_inputs() < 2 => return Err(self.mismatch("needs at least two inputs")),
            SchemeId::MaxEjs => {
                let size = (ch.num_inputs() as f64).powi(m as i32);
                if size > self.maxejs_limit as f64 {
                    return Err(self.mismatch(format!("|X|^M = {size} exceeds the search limit {}", self.maxejs_limit)));
                }
            }
            SchemeId::Alg1 if m > self.alg1_max_messages => {
                return Err(self.mismatch(format!("M = {m} exceeds the enumeration limit {}", self.alg1_max_messages)));
            }
            _ => {}
        }
        Ok(())
    }

    fn nu_crossover(&self, ch: &Channel<T>) -> Result<T> {
        if let Some(p) = self.crossover {
            return Ok(p);
        }
        let tol = T::lit(1e-12);
        let is_bsc = ch.num_inputs() == 2
            && ch.num_outputs() == 2
            && (ch.prob(0, 1) - ch.prob(1, 0)).abs() <= tol
            && ch.prob(0, 1) < T::lit(0.5);
        if is_bsc {
            Ok(ch.prob(0, 1))
        } else {
            Err(self.mismatch("needs a crossover parameter (bz-nu:<p>) on channels other than a BSC"))
        }
    }

    /// Encoder for the current posterior.
    pub fn encode(&self, b: &Belief<T>, ch: &Channel<T>, consts: &ChannelConstants<T>) -> Result<Encoder<T>> {
        if self.id.needs_binary_input() && !ch.is_binary_input() {
            return Err(Error::NotBinaryInput(ch.num_inputs()));
        }
        Ok(match self.id {
            SchemeId::Pm => Encoder::Randomized(pm_encoder(b, consts)?),
            SchemeId::MaxEjs => Encoder::Deterministic(maxejs_encoder(b, ch, self.maxejs_limit)?),
            SchemeId::Ghbz => Encoder::Deterministic(ghbz_encoder(b)),
            SchemeId::BzProp => Encoder::Randomized(bz_randomized_encoder(b, BzRule::Proportional)?),
            SchemeId::BzNu => {
                let crossover = self.nu_crossover(ch)?;
                Encoder::Randomized(bz_randomized_encoder(b, BzRule::Nu { crossover })?)
            }
            SchemeId::Alg1 => Encoder::Deterministic(binary_partition_alg1(b, self.alg1_max_messages)?),
            SchemeId::Alg2 => Encoder::Deterministic(binary_partition_alg2(b)),
            SchemeId::Kary => {
                Encoder::Deterministic(kary_symmetric_encoder(b, ch.num_inputs(), self.kary_fallback_limit)?)
            }
            SchemeId::Constant => Encoder::Deterministic(EncodingFunction::constant(b.num_messages(), 0)),
        })
    }

    /// The `(R_min, E_min)` pair the scheme is guaranteed to meet on in-scope channels.
    pub fn guarantee(&self, consts: &ChannelConstants<T>) -> RateReliability<T> {
        let c = consts.capacity;
        match self.id {
            SchemeId::Pm | SchemeId::Ghbz | SchemeId::BzProp | SchemeId::BzNu | SchemeId::Constant => {
                RateReliability { r_min: c, e_min: c }
            }
            SchemeId::MaxEjs | SchemeId::Alg1 | SchemeId::Alg2 | SchemeId::Kary => {
                RateReliability { r_min: c, e_min: consts.c1 }
            }
        }
    }

    /// Checks the channel-class hypotheses behind [`Scheme::guarantee`].
    pub fn scope(&self, ch: &Channel<T>, consts: &ChannelConstants<T>) -> SchemeScope {
        let mut notes = Vec::new();
        let c1_orientation_ok = !ch.is_binary_input() || consts.c1_pair == (0, 1);
        let in_scope = match self.id {
            SchemeId::Pm | SchemeId::MaxEjs | SchemeId::Constant => consts.c1.is_finite(),
            SchemeId::Ghbz | SchemeId::BzProp | SchemeId::BzNu => {
                match detect_symmetric_pairing(ch, DEFAULT_PAIRING_SEARCH_LIMIT) {
                    Ok(Some(_)) => true,
                    Ok(None) => {
                        notes.push("channel has no output symmetry pairing".to_string());
                        false
                    }
                    Err(e) => {
                        notes.push(format!("symmetry check failed: {e}"));
                        false
                    }
                }
            }
            SchemeId::Alg1 | SchemeId::Alg2 => {
                let uniform = ch.is_binary_input() && consts.has_uniform_input(T::lit(1e-6));
                if !uniform {
                    notes.push("capacity-achieving input is not uniform".to_string());
                }
                if !c1_orientation_ok {
                    notes.push("C1 is attained by D(P_1||P_0), not D(P_0||P_1)".to_string());
                }
                uniform && c1_orientation_ok
            }
            SchemeId::Kary => {
                let ok = is_kary_symmetric(ch);
                if !ok {
                    notes.push("channel is not K-ary symmetric".to_string());
                }
                ok
            }
        };
        SchemeScope { in_scope, c1_orientation_ok, notes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergences::ejs_of_map;

    fn belief(rho: &[f64]) -> Belief<f64> {
        Belief::from_probs(rho.to_vec()).unwrap()
    }

    fn map(v: &[usize]) -> EncodingFunction {
        EncodingFunction::new(v.to_vec())
    }

    fn bsc_consts() -> (Channel<f64>, ChannelConstants<f64>) {
        let ch = Channel::bsc(0.1).unwrap();
        let k = ch.constants(1e-9).unwrap();
        (ch, k)
    }

    #[test]
    fn pm_examples() {
        let (_, k) = bsc_consts();
        let RandomizedEncoder::ProductForm(rows) = pm_encoder(&belief(&[0.5, 0.5]), &k).unwrap() else {
            panic!("product form expected")
        };
        assert_eq!(rows, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let RandomizedEncoder::ProductForm(rows) = pm_encoder(&belief(&[0.3, 0.4, 0.3]), &k).unwrap() else {
            panic!("product form expected")
        };
        assert_eq!(rows[0], vec![1.0, 0.0]);
        assert!((rows[1][0] - 0.5).abs() < 1e-12 && (rows[1][1] - 0.5).abs() < 1e-12);
        assert_eq!(rows[2], vec![0.0, 1.0]);
        let single = pm_encoder(&belief(&[1.0]), &k).unwrap();
        assert_eq!(single, RandomizedEncoder::ProductForm(vec![vec![0.5, 0.5]]));
        let zero = pm_encoder(&belief(&[0.7, 0.0, 0.3]), &k).unwrap();
        zero.validate(2).unwrap();
    }

    #[test]
    fn maxejs_examples() {
        let (ch, k) = bsc_consts();
        let g = maxejs_encoder(&belief(&[0.5, 0.5]), &ch, DEFAULT_MAXEJS_LIMIT).unwrap();
        assert_eq!(g, map(&[0, 1]));
        let v = ejs_of_map(&[0.5, 0.5], &ch, &g).unwrap();
        assert!((v - k.c1).abs() < 1e-12);
        let rho = [0.9, 0.05, 0.05];
        let g = maxejs_encoder(&belief(&rho), &ch, DEFAULT_MAXEJS_LIMIT).unwrap();
        assert_eq!(g, map(&[0, 1, 1]));
        assert!(ejs_of_map(&rho, &ch, &g).unwrap() >= 0.9 * k.c1);
        let g = maxejs_encoder(&belief(&[1.0, 0.0]), &ch, DEFAULT_MAXEJS_LIMIT).unwrap();
        assert_eq!(g, map(&[0, 1]));
        assert!((ejs_of_map(&[1.0, 0.0], &ch, &g).unwrap() - k.c1).abs() < 1e-12);
        assert!(matches!(
            maxejs_encoder(&Belief::<f64>::uniform(21), &ch, DEFAULT_MAXEJS_LIMIT),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn ghbz_examples() {
        assert_eq!(ghbz_encoder(&belief(&[0.4, 0.35, 0.25])), map(&[0, 1, 1]));
        assert_eq!(ghbz_encoder(&Belief::<f64>::uniform(4)), map(&[0, 0, 1, 1]));
        assert_eq!(ghbz_encoder(&belief(&[0.7, 0.2, 0.1])), map(&[0, 1, 1]));
    }

    #[test]
    fn bz_examples() {
        let rho: [f64; 3] = [0.4, 0.35, 0.25];
        let s = bz_split(&rho, BzRule::Proportional).unwrap();
        assert_eq!((s.k_star, s.k_star2), (1, 2));
        assert!((s.delta1 - 0.1).abs() < 1e-12 && (s.delta2 - 0.25).abs() < 1e-12);
        assert!((s.lambda - 5.0 / 7.0).abs() < 1e-12);
        let n = bz_split(&rho, BzRule::Nu { crossover: 0.1 }).unwrap();
        assert!((nu(0.25f64, 0.1) - 1.22239).abs() < 1e-5);
        assert!((nu(0.1f64, 0.1) - 0.46566).abs() < 1e-5);
        assert!((n.lambda - 0.72414).abs() < 1e-5);
        assert!(n.lambda >= s.lambda);
        let enc = bz_randomized_encoder(&belief(&rho), BzRule::Proportional).unwrap();
        assert_eq!(
            enc,
            RandomizedEncoder::Explicit(vec![(map(&[0, 1, 1]), s.lambda), (map(&[0, 0, 1]), 1.0 - s.lambda)])
        );
        let balanced = bz_randomized_encoder(&Belief::<f64>::uniform(4), BzRule::Proportional).unwrap();
        assert_eq!(balanced, RandomizedEncoder::Explicit(vec![(map(&[0, 0, 1, 1]), 1.0)]));
        assert!(bz_split(&rho, BzRule::Nu { crossover: 0.6 }).is_err());
    }

    #[test]
    fn alg1_examples() {
        let g = binary_partition_alg1(&belief(&[0.5, 0.3, 0.2]), 20).unwrap();
        assert_eq!(g, map(&[0, 1, 1]));
        assert_eq!(imbalance(&[0.5, 0.3, 0.2], &g), 0.0);
        let rho = [0.6, 0.25, 0.15];
        let g = binary_partition_alg1(&belief(&rho), 20).unwrap();
        assert_eq!(g, map(&[0, 1, 1]));
        assert!((imbalance(&rho, &g) - 0.2).abs() < 1e-12);
        let g = binary_partition_alg1(&Belief::<f64>::uniform(4), 20).unwrap();
        assert_eq!(g, map(&[0, 0, 1, 1]));
        assert!(matches!(
            binary_partition_alg1(&Belief::<f64>::uniform(21), 20),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn alg2_examples() {
        let (g, rounds) = binary_partition_alg2_traced(&belief(&[0.5, 0.3, 0.2]));
        assert_eq!(g, map(&[0, 1, 1]));
        assert_eq!(rounds, 2);
        let (g, rounds) = binary_partition_alg2_traced(&belief(&[1.0]));
        assert_eq!((g, rounds), (map(&[0]), 0));
        // lowest-index tie-break moves message 0 first
        let (g, rounds) = binary_partition_alg2_traced(&Belief::<f64>::uniform(2));
        assert_eq!((g.clone(), rounds), (map(&[1, 0]), 1));
        assert_eq!(imbalance(&[0.5, 0.5], &g), 0.0);
        assert!(check_binary_condition(&[0.5, 0.5], &g));
    }

    #[test]
    fn binary_condition_examples() {
        assert!(check_binary_condition(&[0.5, 0.3, 0.2], &map(&[0, 1, 1])));
        assert!(!check_binary_condition(&[0.5, 0.3, 0.2], &map(&[0, 0, 1])));
        assert!(check_binary_condition(&[0.5, 0.5], &map(&[1, 0])));
    }

    #[test]
    fn kary_examples() {
        let rho = [0.5, 0.3, 0.2];
        let g = kary_symmetric_encoder(&belief(&rho), 3, DEFAULT_KARY_FALLBACK_LIMIT).unwrap();
        assert_eq!(g, map(&[0, 1, 2]));
        assert!(check_kary_condition(&rho, &g, 3));
        let u = [0.25; 4];
        assert!(check_kary_condition(&u, &map(&[0, 1, 2, 3]), 4));
        let g2 = kary_symmetric_encoder(&belief(&rho), 2, DEFAULT_KARY_FALLBACK_LIMIT).unwrap();
        let a2 = binary_partition_alg2(&belief(&rho));
        assert!(check_kary_condition(&rho, &g2, 2));
        assert_eq!(check_kary_condition(&rho, &a2, 2), check_binary_condition(&rho, &a2));
        assert!(!check_kary_condition(&rho, &map(&[0, 0, 1]), 2));
    }

    #[test]
    fn scheme_ids_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.as_str().parse::<SchemeId>().unwrap(), id);
        }
        assert!("nope".parse::<SchemeId>().is_err());
        let s = Scheme::<f64>::parse("bz-nu:0.2").unwrap();
        assert_eq!(s.crossover, Some(0.2));
        assert!(Scheme::<f64>::parse("alg2:0.2").is_err());
    }

    #[test]
    fn scheme_channel_checks() {
        let tri = Channel::kary_symmetric(3, 0.1).unwrap();
        let ghbz = Scheme::<f64>::new(SchemeId::Ghbz);
        assert!(matches!(ghbz.check_channel(&tri, 4), Err(Error::SchemeChannelMismatch { .. })));
        let k = tri.constants(1e-9).unwrap();
        assert_eq!(ghbz.encode(&Belief::uniform(4), &tri, &k).unwrap_err(), Error::NotBinaryInput(3));
        assert!(Scheme::<f64>::new(SchemeId::Kary).scope(&tri, &k).in_scope);
        let ter = Channel::ternary_uniform_input(0.25).unwrap();
        let kt = ter.constants(1e-9).unwrap();
        assert!(Scheme::<f64>::new(SchemeId::Alg2).scope(&ter, &kt).in_scope);
        assert!(!ghbz.scope(&ter, &kt).in_scope);
        assert!(Scheme::<f64>::new(SchemeId::BzNu).check_channel(&ter, 4).is_err());
        assert!(Scheme::<f64>::new(SchemeId::BzNu).check_channel(&Channel::bsc(0.1).unwrap(), 4).is_ok());
    }
}
