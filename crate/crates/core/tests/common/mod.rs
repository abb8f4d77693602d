#![allow(dead_code)]

use rand::Rng;

/// Flat-Dirichlet sample of length `n`.
pub fn simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Strictly positive distribution, entries at least `floor` before renormalizing.
pub fn positive_dist<R: Rng>(rng: &mut R, n: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = simplex(rng, n).into_iter().map(|v| v + floor).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Posterior that is either spread out or concentrated above `peak_floor` on one message.
pub fn posterior<R: Rng>(rng: &mut R, m: usize, peak_floor: f64) -> Vec<f64> {
    if rng.gen_bool(0.5) {
        return simplex(rng, m);
    }
    let peak = peak_floor + (1.0 - peak_floor) * rng.gen::<f64>() * 0.999;
    let i = rng.gen_range(0..m);
    let rest = simplex(rng, m - 1);
    let mut out = Vec::with_capacity(m);
    let mut it = rest.into_iter();
    for j in 0..m {
        out.push(if j == i { peak } else { (1.0 - peak) * it.next().unwrap() });
    }
    out
}

pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(&a, _)| a > 0.0).map(|(&a, &b)| a * (a / b).log2()).sum()
}

pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&a| a > 0.0).map(|&a| a * a.log2()).sum::<f64>()
}

/// `I(Theta; Y)` for `Theta ~ rho` and `Y | Theta = i ~ fam[i]`.
pub fn mutual_information(rho: &[f64], fam: &[Vec<f64>]) -> f64 {
    let n = fam[0].len();
    let mix: Vec<f64> = (0..n).map(|y| rho.iter().zip(fam).map(|(r, p)| r * p[y]).sum()).collect();
    entropy(&mix) - rho.iter().zip(fam).map(|(r, p)| r * entropy(p)).sum::<f64>()
}

pub fn h2(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}
