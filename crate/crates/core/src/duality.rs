//! Strong stationary duals, hitting times and the Lovász–Winkler mixing time
//! of birth-and-death chains started at state 0.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chains::{tmix_from_weights, BdParams};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::pmf::Pmf;
use crate::spectral;

/// Tolerance for the unit-sum condition `q_{i+1} + p_i = 1`.
pub const UNIT_SUM_TOL: f64 = 1e-12;
/// Default seed for Monte Carlo estimates.
pub const DEFAULT_SEED: u64 = 0x005E_ED0F_CA11;
/// Default tail tolerance for [`sep_sum`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;
/// Iteration cap for [`sep_sum`].
pub const SEP_SUM_MAX_STEPS: usize = 10_000_000;
const SEP_FLOOR: f64 = 1e-14;
const MC_CHUNKS: u64 = 64;

/// Absorbing birth-and-death chain on `{0..n}`, absorbed at `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualChain {
    pub q_star: Vec<f64>,
    pub p_star: Vec<f64>,
}

impl DualChain {
    pub fn n(&self) -> usize {
        self.p_star.len() - 1
    }

    pub fn r_star(&self) -> Vec<f64> {
        self.q_star
            .iter()
            .zip(&self.p_star)
            .map(|(q, p)| (1.0 - q - p).max(0.0))
            .collect()
    }

    pub fn kernel(&self) -> Result<Kernel> {
        BdParams::new(self.q_star.clone(), self.r_star(), self.p_star.clone()).map(|b| b.kernel())
    }
}

fn check_pi(bd: &BdParams, pi: &Pmf) -> Result<()> {
    if pi.len() != bd.n() + 1 {
        return Err(Error::DimensionMismatch {
            expected: bd.n() + 1,
            found: pi.len(),
        });
    }
    pi.require_positive()?;
    bd.kernel().check_stationary(pi)
}

/// The strong stationary dual of a chain with `q_{i+1} + p_i = 1`.
pub fn ssd_dual(bd: &BdParams, pi: &Pmf) -> Result<DualChain> {
    if !bd.is_ergodic() {
        return Err(Error::NotErgodic("dual needs an ergodic chain".into()));
    }
    if let Some(i) = bd.unit_sum_violation(UNIT_SUM_TOL) {
        return Err(Error::InvalidParameter(format!(
            "q_{} + p_{} = {} != 1 at index {i}",
            i + 1,
            i,
            bd.q()[i + 1] + bd.p()[i]
        )));
    }
    check_pi(bd, pi)?;
    let n = bd.n();
    let h = pi.cdf();
    let mut q_star = vec![0.0; n + 1];
    let mut p_star = vec![0.0; n + 1];
    for i in 0..n {
        if i > 0 {
            q_star[i] = h[i - 1] / h[i] * bd.p()[i];
        }
        p_star[i] = h[i + 1] / h[i] * bd.q()[i + 1];
    }
    Ok(DualChain { q_star, p_star })
}

/// `P(T > t)` for `t = 0..=horizon`, `T` the absorption time from 0.
pub fn dual_survival(dual: &DualChain, horizon: usize) -> Vec<f64> {
    let n = dual.n();
    let r = dual.r_star();
    let mut law = vec![0.0f64; n + 1];
    law[0] = 1.0;
    let mut out = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        out.push((1.0 - law[n]).max(0.0));
        if t == horizon {
            break;
        }
        let mut next = vec![0.0; n + 1];
        for i in 0..n {
            next[i] += law[i] * r[i];
            if i > 0 {
                next[i - 1] += law[i] * dual.q_star[i];
            }
            next[i + 1] += law[i] * dual.p_star[i];
        }
        next[n] += law[n];
        law = next;
    }
    out
}

/// Expected hitting time of `target` from 0: `sum_{i<target} H_i / (pi_i p_i)`.
pub fn hitting_time_mean(bd: &BdParams, pi: &Pmf, target: usize) -> Result<f64> {
    hitting_time_mean_rates(bd.p(), pi, target)
}

/// The same sum with up-rates `lambda` in place of up-probabilities; for a
/// continuous-time chain it is the expected hitting time of `target`.
pub fn hitting_time_mean_rates(lambda: &[f64], pi: &Pmf, target: usize) -> Result<f64> {
    if target >= pi.len() || lambda.len() != pi.len() {
        return Err(Error::InvalidParameter(format!(
            "target {target} outside a chain on {} states",
            pi.len()
        )));
    }
    let h = pi.cdf();
    let mut total = 0.0;
    for i in 0..target {
        if lambda[i] <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "target {target} unreachable: up-move from {i} is zero"
            )));
        }
        total += h[i] / (pi[i] * lambda[i]);
    }
    Ok(total)
}

/// Expected hitting times of `target` from every state by first-step analysis.
pub fn first_step_hitting_times(kernel: &Kernel, target: usize) -> Result<Vec<f64>> {
    let n = kernel.size();
    if target >= n {
        return Err(Error::InvalidParameter(format!("target {target} out of range")));
    }
    let others: Vec<usize> = (0..n).filter(|&i| i != target).collect();
    let m = others.len();
    let mut a = DMatrix::<f64>::identity(m, m);
    for (r, &i) in others.iter().enumerate() {
        for (c, &j) in others.iter().enumerate() {
            a[(r, c)] -= kernel.get(i, j);
        }
    }
    let h = a
        .lu()
        .solve(&DVector::from_element(m, 1.0))
        .ok_or_else(|| Error::Reducible(format!("target {target} not reachable from every state")))?;
    let mut out = vec![0.0; n];
    for (r, &i) in others.iter().enumerate() {
        if !h[r].is_finite() || h[r] < 0.0 {
            return Err(Error::Reducible(format!("target {target} not reachable from {i}")));
        }
        out[i] = h[r];
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    FirstStep,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    FirstStep,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Mixing time from state 0 under the naive rule (stop at a `pi`-drawn target).
#[derive(Debug, Clone, PartialEq)]
pub struct TmixReport {
    pub value: f64,
    pub method: Method,
    /// Standard error of a Monte Carlo estimate.
    pub se: Option<f64>,
    /// Monte Carlo trajectories found at the top state before stopping.
    pub halting_violations: Option<u64>,
}

/// `sum_{i<n} H_i (1 - H_i) / (pi_i p_i)`.
pub fn tmix_closed(bd: &BdParams, pi: &Pmf) -> Result<TmixReport> {
    if !bd.is_irreducible() {
        return Err(Error::Reducible("mixing time needs an irreducible chain".into()));
    }
    check_pi(bd, pi)?;
    let w: Vec<f64> = (0..bd.n()).map(|i| pi[i] * bd.p()[i]).collect();
    Ok(TmixReport {
        value: tmix_from_weights(&pi.cut_products(), &w),
        method: Method::ClosedForm,
        se: None,
        halting_violations: None,
    })
}

/// Naive-rule mixing time from state 0 of an arbitrary irreducible kernel.
pub fn tmix_oracle(kernel: &Kernel, pi: &Pmf, mode: OracleMode) -> Result<TmixReport> {
    if pi.len() != kernel.size() {
        return Err(Error::DimensionMismatch {
            expected: kernel.size(),
            found: pi.len(),
        });
    }
    if !kernel.is_irreducible() {
        return Err(Error::Reducible("mixing time needs an irreducible chain".into()));
    }
    kernel.check_stationary(pi)?;
    match mode {
        OracleMode::FirstStep => {
            let mut value = 0.0;
            for j in 1..kernel.size() {
                value += pi[j] * first_step_hitting_times(kernel, j)?[0];
            }
            Ok(TmixReport {
                value,
                method: Method::FirstStep,
                se: None,
                halting_violations: None,
            })
        }
        OracleMode::MonteCarlo { samples, seed } => monte_carlo(kernel, pi, samples, seed),
    }
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|c| *c <= u).min(cdf.len() - 1)
}

#[derive(Default, Clone, Copy)]
struct Tally {
    count: u64,
    sum: f64,
    sum_sq: f64,
    violations: u64,
}

fn monte_carlo(kernel: &Kernel, pi: &Pmf, samples: u64, seed: u64) -> Result<TmixReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let size = kernel.size();
    let top = size - 1;
    let target_cdf = pi.cdf();
    let row_cdfs: Vec<Vec<f64>> = (0..size)
        .map(|i| {
            let mut acc = 0.0;
            kernel
                .row(i)
                .iter()
                .map(|x| {
                    acc += x;
                    acc
                })
                .collect()
        })
        .collect();
    let per_chunk = samples / MC_CHUNKS;
    let extra = samples % MC_CHUNKS;
    let tallies: Vec<Tally> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut tally = Tally::default();
            let count = per_chunk + u64::from(chunk < extra);
            for _ in 0..count {
                let target = draw(&target_cdf, rng.gen::<f64>());
                let mut state = 0;
                let mut steps = 0u64;
                while state != target {
                    if state == top {
                        tally.violations += 1;
                    }
                    state = draw(&row_cdfs[state], rng.gen::<f64>());
                    steps += 1;
                }
                let s = steps as f64;
                tally.count += 1;
                tally.sum += s;
                tally.sum_sq += s * s;
            }
            tally
        })
        .collect();
    let total = tallies.iter().fold(Tally::default(), |a, b| Tally {
        count: a.count + b.count,
        sum: a.sum + b.sum,
        sum_sq: a.sum_sq + b.sum_sq,
        violations: a.violations + b.violations,
    });
    let n = total.count as f64;
    let mean = total.sum / n;
    let var = ((total.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(TmixReport {
        value: mean,
        method: Method::MonteCarlo,
        se: Some((var / n).sqrt()),
        halting_violations: Some(total.violations),
    })
}

/// `sum_{t >= 0} sep(t)` from state 0 for a monotone ergodic chain.
///
/// Stops once two consecutive separations fall below `1e-14`, or once
/// `max(sep(t-1), sep(t)) / (1 - SLEM) < tail_tol`; separation from a
/// point mass can stall for one step at a time, hence the pair.
pub fn sep_sum(bd: &BdParams, pi: &Pmf, tail_tol: f64) -> Result<f64> {
    if !bd.is_monotone() {
        return Err(Error::NotMonotone(
            "separation sum identity needs a monotone chain".into(),
        ));
    }
    if !bd.is_ergodic() {
        return Err(Error::NotErgodic("separation sum needs an ergodic chain".into()));
    }
    check_pi(bd, pi)?;
    let n = bd.n();
    if n == 0 {
        return Ok(0.0);
    }
    let gap = 1.0 - spectral::slem(&bd.kernel(), pi)?;
    let (q, r, p) = (bd.q(), bd.r(), bd.p());
    let sep_of = |law: &[f64]| {
        law.iter()
            .zip(pi.weights())
            .map(|(x, s)| 1.0 - x / s)
            .fold(0.0, f64::max)
    };
    let mut law = vec![0.0; n + 1];
    law[0] = 1.0;
    let mut prev = f64::INFINITY;
    let mut total = 0.0;
    for _ in 0..SEP_SUM_MAX_STEPS {
        let sep = sep_of(&law);
        total += sep;
        let recent = prev.max(sep);
        if recent < SEP_FLOOR || recent / gap < tail_tol {
            return Ok(total);
        }
        prev = sep;
        let mut next = vec![0.0; n + 1];
        for i in 0..=n {
            next[i] += law[i] * r[i];
            if i > 0 {
                next[i - 1] += law[i] * q[i];
            }
            if i < n {
                next[i + 1] += law[i] * p[i];
            }
        }
        law = next;
    }
    Err(Error::Numerical(format!(
        "separation sum did not converge in {SEP_SUM_MAX_STEPS} steps"
    )))
}

/// `f_i(rho) = (1 - rho^{i+2}) / ((1 - rho^{i+1})(1 + rho))`, the dual
/// up-probability at `i` of the biased walk; `f_i(1) = (i+2)/(2(i+1))`.
pub fn dual_birth_profile(i: usize, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!("rho = {rho} must be positive")));
    }
    // geometric sums avoid the removable singularity at rho = 1
    let (mut s_lo, mut term) = (0.0, 1.0);
    for _ in 0..=i {
        s_lo += term;
        term *= rho;
    }
    let s_hi = s_lo + term;
    Ok(s_hi / (s_lo * (1.0 + rho)))
}
