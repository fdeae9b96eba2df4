//! Discrepancies from stationarity and their evolution over time.

use crate::chains::uniform_chain;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::orders::majorization_slack;
use crate::pmf::Pmf;

/// A discrepancy of a law `rho` from a positive stationary `pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    /// `[sum_i pi_i |rho_i/pi_i - 1|^p]^(1/p)`, `p >= 1`.
    Lp(f64),
    /// `max_i |rho_i/pi_i - 1|` (relative pointwise distance).
    Linf,
    /// `max_i (1 - rho_i/pi_i)`.
    Sep,
    /// `(1/2) sum_i pi_i (sqrt(rho_i/pi_i) - 1)^2`.
    Hellinger,
    /// `D(pi || rho)`; infinite when some `rho_i = 0`.
    KlForward,
    /// `D(rho || pi)`.
    KlReverse,
    /// `(1/2) sum_i |rho_i - pi_i|`.
    Tv,
}

pub fn distance(rho: &Pmf, pi: &Pmf, metric: Metric) -> Result<f64> {
    if rho.len() != pi.len() {
        return Err(Error::DimensionMismatch {
            expected: pi.len(),
            found: rho.len(),
        });
    }
    pi.require_positive()?;
    let pairs = rho.weights().iter().zip(pi.weights());
    let value = match metric {
        Metric::Lp(p) => {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!("L^p exponent {p} must be in [1, inf)")));
            }
            pairs
                .map(|(r, s)| s * (r / s - 1.0).abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
        Metric::Linf => pairs.map(|(r, s)| (r / s - 1.0).abs()).fold(0.0, f64::max),
        Metric::Sep => pairs.map(|(r, s)| 1.0 - r / s).fold(0.0, f64::max),
        Metric::Hellinger => 0.5 * pairs.map(|(r, s)| (r.sqrt() - s.sqrt()).powi(2)).sum::<f64>(),
        Metric::KlForward => {
            if rho.weights().iter().any(|r| *r <= 0.0) {
                f64::INFINITY
            } else {
                -pairs.map(|(r, s)| s * (r / s).ln()).sum::<f64>()
            }
        }
        Metric::KlReverse => pairs
            .filter(|(r, _)| **r > 0.0)
            .map(|(r, s)| r * (r / s).ln())
            .sum::<f64>(),
        Metric::Tv => 0.5 * pairs.map(|(r, s)| (r - s).abs()).sum::<f64>(),
    };
    Ok(value)
}

/// All discrepancies of the time-`t` law from stationarity.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub t: usize,
    pub tv: f64,
    pub sep: f64,
    pub l2: f64,
    pub lp: f64,
    pub linf: f64,
    pub hellinger: f64,
    pub kl_pi_rho: f64,
    pub kl_rho_pi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTrace {
    /// Exponent used for the `lp` column.
    pub lp_exponent: f64,
    pub rows: Vec<DistanceRow>,
}

impl DistanceTrace {
    pub fn column(&self, pick: impl Fn(&DistanceRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }
}

fn row_for(t: usize, rho: &Pmf, pi: &Pmf, lp_exponent: f64) -> Result<DistanceRow> {
    Ok(DistanceRow {
        t,
        tv: distance(rho, pi, Metric::Tv)?,
        sep: distance(rho, pi, Metric::Sep)?,
        l2: distance(rho, pi, Metric::Lp(2.0))?,
        lp: distance(rho, pi, Metric::Lp(lp_exponent))?,
        linf: distance(rho, pi, Metric::Linf)?,
        hellinger: distance(rho, pi, Metric::Hellinger)?,
        kl_pi_rho: distance(rho, pi, Metric::KlForward)?,
        kl_rho_pi: distance(rho, pi, Metric::KlReverse)?,
    })
}

/// One row per `t = 0..=horizon`, with an `L^p` column for the given exponent.
pub fn trace_lp(kernel: &Kernel, init: &Pmf, horizon: usize, lp_exponent: f64) -> Result<DistanceTrace> {
    let pi = kernel.stationary()?;
    if init.len() != kernel.size() {
        return Err(Error::DimensionMismatch {
            expected: kernel.size(),
            found: init.len(),
        });
    }
    let mut rows = Vec::with_capacity(horizon + 1);
    let mut rho = init.clone();
    for t in 0..=horizon {
        rows.push(row_for(t, &rho, &pi, lp_exponent)?);
        if t < horizon {
            rho = kernel.evolve(&rho, 1)?;
        }
    }
    Ok(DistanceTrace { lp_exponent, rows })
}

/// [`trace_lp`] with the `lp` column at `p = 1`.
pub fn trace(kernel: &Kernel, init: &Pmf, horizon: usize) -> Result<DistanceTrace> {
    trace_lp(kernel, init, horizon, 1.0)
}

/// Separation only, `t = 0..=horizon`.
pub fn sep_trace(kernel: &Kernel, init: &Pmf, horizon: usize) -> Result<Vec<f64>> {
    let pi = kernel.stationary()?;
    let mut out = Vec::with_capacity(horizon + 1);
    let mut rho = init.clone();
    for t in 0..=horizon {
        out.push(distance(&rho, &pi, Metric::Sep)?);
        if t < horizon {
            rho = kernel.evolve(&rho, 1)?;
        }
    }
    Ok(out)
}

/// Per `t`, the least top-`k` prefix-sum margin of `init K^t` over `init L^t`.
pub fn majorization_slack_trace(k: &Kernel, l: &Kernel, init: &Pmf, horizon: usize) -> Result<Vec<f64>> {
    if k.size() != l.size() || init.len() != k.size() {
        return Err(Error::DimensionMismatch {
            expected: k.size(),
            found: l.size().max(init.len()),
        });
    }
    let mut a = init.weights().to_vec();
    let mut b = a.clone();
    let mut out = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        out.push(majorization_slack(&a, &b).expect("equal lengths"));
        if t < horizon {
            a = k.left_apply(&a);
            b = l.left_apply(&b);
        }
    }
    Ok(out)
}

/// Entry `t`: does the law under `k` majorize the law under `l`?
pub fn majorization_trace(k: &Kernel, l: &Kernel, init: &Pmf, horizon: usize) -> Result<Vec<bool>> {
    Ok(majorization_slack_trace(k, l, init, horizon)?
        .into_iter()
        .map(|s| s >= -1e-12)
        .collect())
}

/// For the uniform chain on `{0..n}`, whether the multiset of `t`-step
/// transition probabilities out of a state is the same for every state.
pub fn start_state_multiset_invariance(n: usize, t: usize) -> Result<bool> {
    let power = uniform_chain(n)?.pow(t);
    let sorted_row = |i: usize| {
        let mut r = power.row(i).to_vec();
        r.sort_by(f64::total_cmp);
        r
    };
    let reference = sorted_row(0);
    Ok((1..=n).all(|i| {
        sorted_row(i)
            .iter()
            .zip(&reference)
            .all(|(a, b)| (a - b).abs() <= 1e-12)
    }))
}
