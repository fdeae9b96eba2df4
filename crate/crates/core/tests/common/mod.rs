#![allow(dead_code)]

use mixorder::chains::{from_w, BdParams, WParams};
use mixorder::Pmf;
use rand::Rng;

/// Edge probabilities of a symmetric path chain with `p_{i-1} + p_i <= 1`
/// and positive holding at state 0.
pub fn random_symmetric_p<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n);
    let mut prev = 0.0;
    for _ in 0..n {
        let x = rng.gen_range(0.05..0.95) * (1.0 - prev);
        p.push(x);
        prev = x;
    }
    p
}

/// Feasible symmetric edge probabilities summing anywhere in their range,
/// used for mixing-time sweeps (uniform `pi`).
pub fn random_feasible_p<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n);
    let mut prev = 0.0;
    for _ in 0..n {
        let x: f64 = rng.gen_range(1e-3..1.0) * (1.0 - prev);
        p.push(x.max(1e-9));
        prev = x;
    }
    p
}

pub fn random_pmf<R: Rng>(rng: &mut R, len: usize) -> Pmf {
    let w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.3..3.0)).collect();
    Pmf::from_weights(&w).unwrap()
}

/// Log-concave pmf: log-increments sorted non-increasing.
pub fn random_log_concave<R: Rng>(rng: &mut R, len: usize) -> Pmf {
    let mut d: Vec<f64> = (1..len).map(|_| rng.gen_range(-1.5..1.5)).collect();
    d.sort_by(|a, b| b.total_cmp(a));
    let mut logw = vec![0.0];
    for x in d {
        logw.push(logw.last().unwrap() + x);
    }
    let w: Vec<f64> = logw.iter().map(|l| l.exp()).collect();
    Pmf::from_weights(&w).unwrap()
}

/// Monotone edge weights for `pi`: `w_i (1/pi_i + 1/pi_{i+1}) <= 1` and
/// `w_{i-1} + w_i <= pi_i`, all positive.
pub fn random_monotone_w<R: Rng>(rng: &mut R, pi: &Pmf) -> Vec<f64> {
    let n = pi.len() - 1;
    let mut w = Vec::with_capacity(n);
    let mut prev = 0.0;
    for i in 0..n {
        let mono = pi[i] * pi[i + 1] / (pi[i] + pi[i + 1]);
        let room = pi[i] - prev;
        let x = rng.gen_range(0.05..0.95) * mono.min(room);
        w.push(x);
        prev = x;
    }
    w
}

pub fn bd_from_w(w: Vec<f64>, pi: &Pmf) -> BdParams {
    from_w(&WParams::new(w, pi.clone()).unwrap()).unwrap()
}

/// A reversible monotone pair `K <= L` sharing `pi`: `L` scales every edge
/// weight of `K` down, adding holding.
pub fn random_monotone_pair<R: Rng>(rng: &mut R, pi: &Pmf) -> (BdParams, BdParams) {
    let wk = random_monotone_w(rng, pi);
    let wl: Vec<f64> = wk.iter().map(|x| x * rng.gen_range(0.05..1.0)).collect();
    (bd_from_w(wk, pi), bd_from_w(wl, pi))
}

/// Random monotone chain with `q_{i+1} + p_i = 1` (non-increasing `p`).
pub fn random_unit_sum_chain<R: Rng>(rng: &mut R, n: usize) -> BdParams {
    let mut p = vec![0.0f64; n + 1];
    p[0] = rng.gen_range(0.05..0.95);
    for i in 1..n {
        p[i] = p[i - 1] * rng.gen_range(0.5..1.0);
    }
    let mut q = vec![0.0f64; n + 1];
    for i in 0..n {
        q[i + 1] = 1.0 - p[i];
    }
    let r: Vec<f64> = (0..=n).map(|i| (1.0 - p[i] - q[i]).max(0.0)).collect();
    BdParams::new(q, r, p).unwrap()
}
