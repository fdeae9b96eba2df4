//! Birth-and-death chain families on the path `{0, ..., n}`.

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::pmf::Pmf;
use crate::search::golden_section_min;

const PARAM_TOL: f64 = 1e-12;

/// (death, hold, birth) probabilities `(q_i, r_i, p_i)` for states `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BdParams {
    q: Vec<f64>,
    r: Vec<f64>,
    p: Vec<f64>,
}

impl BdParams {
    pub fn new(q: Vec<f64>, r: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let len = q.len();
        if len == 0 || r.len() != len || p.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: r.len().max(p.len()),
            });
        }
        if q[0].abs() > PARAM_TOL || p[len - 1].abs() > PARAM_TOL {
            return Err(Error::InvalidParameter(
                "death at state 0 and birth at state n must vanish".into(),
            ));
        }
        for i in 0..len {
            let (a, b, c) = (q[i], r[i], p[i]);
            if [a, b, c].iter().any(|x| !x.is_finite() || *x < -PARAM_TOL) {
                return Err(Error::InvalidParameter(format!(
                    "negative probability at state {i}: (q, r, p) = ({a}, {b}, {c})"
                )));
            }
            if (a + b + c - 1.0).abs() > PARAM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "row {i} sums to {}",
                    a + b + c
                )));
            }
        }
        let clamp = |v: Vec<f64>| v.into_iter().map(|x| x.max(0.0)).collect();
        Ok(Self {
            q: clamp(q),
            r: clamp(r),
            p: clamp(p),
        })
    }

    /// Reads the three diagonals of a tridiagonal kernel.
    pub fn from_kernel(kernel: &Kernel) -> Result<Self> {
        if !kernel.is_tridiagonal() {
            return Err(Error::InvalidKernel("kernel is not birth-and-death".into()));
        }
        let len = kernel.size();
        let q = (0..len).map(|i| if i > 0 { kernel.get(i, i - 1) } else { 0.0 }).collect();
        let r = (0..len).map(|i| kernel.get(i, i)).collect();
        let p = (0..len)
            .map(|i| if i + 1 < len { kernel.get(i, i + 1) } else { 0.0 })
            .collect();
        Self::new(q, r, p)
    }

    /// Largest state index `n`.
    pub fn n(&self) -> usize {
        self.q.len() - 1
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn is_irreducible(&self) -> bool {
        (0..self.n()).all(|i| self.p[i] > 0.0 && self.q[i + 1] > 0.0)
    }

    /// Irreducible and aperiodic (some positive holding probability).
    pub fn is_ergodic(&self) -> bool {
        self.is_irreducible() && (self.n() == 0 || self.r.iter().any(|r| *r > 0.0))
    }

    /// Closed-form monotonicity criterion `p_i + q_{i+1} <= 1`.
    pub fn is_monotone(&self) -> bool {
        (0..self.n()).all(|i| self.p[i] + self.q[i + 1] <= 1.0 + PARAM_TOL)
    }

    /// First index where `q_{i+1} + p_i = 1` fails, if any.
    pub fn unit_sum_violation(&self, tol: f64) -> Option<usize> {
        (0..self.n()).find(|&i| (self.p[i] + self.q[i + 1] - 1.0).abs() > tol)
    }

    /// Detailed-balance stationary pmf.
    pub fn stationary(&self) -> Result<Pmf> {
        if !self.is_irreducible() {
            return Err(Error::Reducible("a birth or death probability vanishes".into()));
        }
        let mut weights = vec![1.0; self.q.len()];
        for i in 1..weights.len() {
            weights[i] = weights[i - 1] * self.p[i - 1] / self.q[i];
        }
        Pmf::from_weights(&weights)
    }

    /// The tridiagonal kernel, with its stationary pmf cached when irreducible.
    pub fn kernel(&self) -> Kernel {
        let len = self.q.len();
        let mut entries = vec![0.0; len * len];
        for i in 0..len {
            entries[i * len + i] = self.r[i];
            if i > 0 {
                entries[i * len + i - 1] = self.q[i];
            }
            if i + 1 < len {
                entries[i * len + i + 1] = self.p[i];
            }
        }
        let kernel = Kernel::from_row_major(len, entries).expect("validated parameters");
        match self.stationary() {
            Ok(pi) => kernel.clone().with_stationary(pi).unwrap_or(kernel),
            Err(_) => kernel,
        }
    }
}

/// Symmetric chain with `K(i,i+1) = K(i+1,i) = p_i`; `p` has length `n`.
pub fn symmetric_bd_params(p: &[f64]) -> Result<BdParams> {
    if p.is_empty() {
        return Err(Error::InvalidParameter("need at least one edge".into()));
    }
    let len = p.len() + 1;
    let mut q = vec![0.0; len];
    let mut r = vec![0.0; len];
    let mut birth = vec![0.0; len];
    for i in 0..len {
        let left = if i > 0 { p[i - 1] } else { 0.0 };
        let right = if i < p.len() { p[i] } else { 0.0 };
        if left < 0.0 || right < 0.0 {
            return Err(Error::InvalidParameter(format!("negative edge weight at state {i}")));
        }
        if left + right > 1.0 + PARAM_TOL {
            return Err(Error::InvalidParameter(format!(
                "row {i} off-diagonal mass {} exceeds 1",
                left + right
            )));
        }
        q[i] = left;
        birth[i] = right;
        r[i] = (1.0 - left - right).max(0.0);
    }
    BdParams::new(q, r, birth)
}

pub fn symmetric_bd(p: &[f64]) -> Result<Kernel> {
    Ok(symmetric_bd_params(p)?.kernel())
}

/// Probability 1/2 each way, holding 1/2 at both ends.
pub fn uniform_chain(n: usize) -> Result<Kernel> {
    if n == 0 {
        return Err(Error::InvalidParameter("uniform chain needs n >= 1".into()));
    }
    symmetric_bd(&vec![0.5; n])
}

/// Fastest-mixing monotone chain for a log-concave `pi`:
/// `q_i = pi_{i-1}/(pi_{i-1}+pi_i)`, `p_i = pi_{i+1}/(pi_i+pi_{i+1})`.
pub fn fmmc_logconcave(pi: &Pmf) -> Result<BdParams> {
    pi.require_positive()?;
    if let Some(index) = pi.log_concavity_violation() {
        return Err(Error::NotLogConcave { index });
    }
    let w = pi.weights();
    let len = w.len();
    let at = |i: isize| {
        if i < 0 || i as usize >= len {
            0.0
        } else {
            w[i as usize]
        }
    };
    let mut q = vec![0.0; len];
    let mut r = vec![0.0; len];
    let mut p = vec![0.0; len];
    for i in 0..len {
        let (prev, cur, next) = (at(i as isize - 1), w[i], at(i as isize + 1));
        q[i] = prev / (prev + cur);
        p[i] = next / (cur + next);
        r[i] = ((cur * cur - prev * next) / ((prev + cur) * (cur + next))).max(0.0);
    }
    BdParams::new(q, r, p)
}

/// Biased walk with `p = rho/(1+rho)`, `q = 1/(1+rho)`, no interior holding.
pub fn biased_rw_params(rho: f64, n: usize) -> Result<BdParams> {
    if !(rho > 0.0 && rho.is_finite()) || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "biased walk needs rho > 0 and n >= 1 (got rho={rho}, n={n})"
        )));
    }
    let up = rho / (1.0 + rho);
    let down = 1.0 / (1.0 + rho);
    let len = n + 1;
    let mut q = vec![down; len];
    let mut r = vec![0.0; len];
    let mut p = vec![up; len];
    q[0] = 0.0;
    r[0] = down;
    p[n] = 0.0;
    r[n] = up;
    BdParams::new(q, r, p)
}

pub fn biased_rw(rho: f64, n: usize) -> Result<Kernel> {
    Ok(biased_rw_params(rho, n)?.kernel())
}

/// Edge weights `w_i = pi_i p_i = pi_{i+1} q_{i+1}` paired with their `pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct WParams {
    w: Vec<f64>,
    pi: Pmf,
}

impl WParams {
    /// Requires `w_i >= 0` and `w_{i-1} + w_i <= pi_i` with `w_{-1} = w_n = 0`.
    pub fn new(w: Vec<f64>, pi: Pmf) -> Result<Self> {
        pi.require_positive()?;
        if w.len() + 1 != pi.len() {
            return Err(Error::DimensionMismatch {
                expected: pi.len() - 1,
                found: w.len(),
            });
        }
        if let Some(i) = w.iter().position(|x| !x.is_finite() || *x < -PARAM_TOL) {
            return Err(Error::InvalidParameter(format!("edge weight w_{i} is negative")));
        }
        for i in 0..pi.len() {
            let left = if i > 0 { w[i - 1] } else { 0.0 };
            let right = w.get(i).copied().unwrap_or(0.0);
            if left + right > pi[i] + PARAM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "w_{{i-1}} + w_i = {} exceeds pi_{i} = {}",
                    left + right,
                    pi[i]
                )));
            }
        }
        Ok(Self {
            w: w.into_iter().map(|x| x.max(0.0)).collect(),
            pi,
        })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn pi(&self) -> &Pmf {
        &self.pi
    }
}

/// Birth-and-death parameters for edge weights. Zero weights produce a
/// reducible chain; check [`BdParams::is_ergodic`] before ergodic analyses.
pub fn from_w(params: &WParams) -> Result<BdParams> {
    let pi = params.pi.weights();
    let w = &params.w;
    let len = pi.len();
    let mut q = vec![0.0; len];
    let mut r = vec![0.0; len];
    let mut p = vec![0.0; len];
    for i in 0..len {
        let left = if i > 0 { w[i - 1] } else { 0.0 };
        let right = w.get(i).copied().unwrap_or(0.0);
        q[i] = left / pi[i];
        p[i] = right / pi[i];
        r[i] = (1.0 - (left + right) / pi[i]).max(0.0);
    }
    BdParams::new(q, r, p)
}

/// Mixing time from state 0 of the chain with edge weights `w`:
/// `sum_i H_i (1 - H_i) / w_i`, with `cuts` from [`Pmf::cut_products`].
pub fn tmix_from_weights(cuts: &[f64], w: &[f64]) -> f64 {
    w.iter()
        .enumerate()
        .map(|(i, wi)| {
            let h = cuts[i];
            if *wi > 0.0 {
                h / wi
            } else {
                f64::INFINITY
            }
        })
        .sum()
}

/// `theta_n = 1 / (1 + sqrt(a_n / b_n))` with the path-sum constants
/// `a_n = (n+1)(n^2+2n+3)/12`, `b_n = (n+1)(n-1)(n+3)/12`.
pub fn theta_from_sums(n: usize) -> f64 {
    let nf = n as f64;
    let a = (nf + 1.0) * (nf * nf + 2.0 * nf + 3.0) / 12.0;
    let b = (nf + 1.0) * (nf - 1.0) * (nf + 3.0) / 12.0;
    1.0 / (1.0 + (a / b).sqrt())
}

/// `theta_{m-1} = (sqrt((m^2+2)(m^2-4)) - (m^2-4)) / 6` evaluated at `m = n + 1`.
pub fn theta_closed_form(n: usize) -> f64 {
    let m2 = ((n + 1) * (n + 1)) as f64;
    (((m2 + 2.0) * (m2 - 4.0)).sqrt() - (m2 - 4.0)) / 6.0
}

/// Birth probabilities of the symmetric chain minimizing the
/// Lovász–Winkler mixing time from state 0: uniform for even `n`,
/// alternating `1 - theta_n, theta_n, ...` for odd `n`.
pub fn lw_optimal_path_p(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("path needs n >= 1".into()));
    }
    if n.is_multiple_of(2) {
        return Ok(vec![0.5; n]);
    }
    let theta = theta_closed_form(n);
    Ok((0..n).map(|k| if k % 2 == 0 { 1.0 - theta } else { theta }).collect())
}

pub fn lw_optimal_path(n: usize) -> Result<Kernel> {
    symmetric_bd(&lw_optimal_path_p(n)?)
}

/// Result of a mixing-time optimization over birth-and-death chains.
#[derive(Debug, Clone)]
pub struct OptimizedChain {
    pub params: BdParams,
    /// Edge weights `w_i = pi_i p_i`.
    pub w: Vec<f64>,
    /// Lovász–Winkler mixing time from state 0 at the optimum.
    pub tmix: f64,
}

impl OptimizedChain {
    /// `w_0`, the free coordinate of the holding-free family.
    pub fn w_star(&self) -> f64 {
        self.w[0]
    }
}

/// Minimizes the mixing time from 0 over irreducible chains with the given
/// non-decreasing `pi` and no holding except at the endpoints.
///
/// The family is `w_i = (-1)^i w + a_i` with `a_i = sum_{j=1..i} (-1)^{i-j} pi_j`
/// and `w ∈ [0, pi_0]`; the objective is strictly convex in `w`.
pub fn fmmc_lw(pi: &Pmf) -> Result<OptimizedChain> {
    pi.require_positive()?;
    if !pi.is_non_decreasing() {
        return Err(Error::InvalidParameter("pi must be non-decreasing".into()));
    }
    let n = pi.len() - 1;
    if n == 0 {
        return Err(Error::InvalidParameter("need at least two states".into()));
    }
    let weights = pi.weights();
    let mut offsets = vec![0.0; n];
    for i in 1..n {
        offsets[i] = weights[i] - offsets[i - 1];
    }
    let cuts = pi.cut_products();
    let edge_weights = |w: f64| -> Vec<f64> {
        offsets
            .iter()
            .enumerate()
            .map(|(i, a)| if i % 2 == 0 { a + w } else { a - w })
            .collect()
    };
    let objective = |w: f64| tmix_from_weights(&cuts, &edge_weights(w));
    let (w_star, tmix) = golden_section_min(objective, 0.0, weights[0], 1e-12);
    let w: Vec<f64> = edge_weights(w_star).into_iter().map(|x| x.max(0.0)).collect();
    let params = from_w(&WParams::new(w.clone(), pi.clone())?)?;
    Ok(OptimizedChain { params, w, tmix })
}

/// Minimizes the mixing time from 0 subject to `sum_k pi_k p_k = c`,
/// `c ∈ (0, min_i pi_i]`: `w_k ∝ sqrt(H_k (1 - H_k))`.
pub fn budgeted_min_tmix(pi: &Pmf, c: f64) -> Result<OptimizedChain> {
    pi.require_positive()?;
    let min_pi = pi.weights().iter().copied().fold(f64::INFINITY, f64::min);
    if !(c > 0.0 && c <= min_pi + PARAM_TOL) {
        return Err(Error::InvalidParameter(format!(
            "edge budget {c} outside (0, {min_pi}]"
        )));
    }
    let n = pi.len() - 1;
    if n == 0 {
        return Err(Error::InvalidParameter("need at least two states".into()));
    }
    let roots: Vec<f64> = pi.cut_products().iter().map(|h| h.sqrt()).collect();
    let total: f64 = roots.iter().sum();
    let w: Vec<f64> = roots.iter().map(|s| c * s / total).collect();
    let params = from_w(&WParams::new(w.clone(), pi.clone())?)?;
    Ok(OptimizedChain {
        params,
        w,
        tmix: total * total / c,
    })
}

/// Ladder-game weights `p_i ∝ sqrt((i+1)(n-i))`, summing to 1.
pub fn ladder_sqrt_weights(n: usize) -> Vec<f64> {
    normalized((0..n).map(|i| (((i + 1) * (n - i)) as f64).sqrt()).collect())
}

/// Parabolic weights `p_i ∝ (i+1)(n-i)`, summing to 1.
pub fn ladder_parabolic_weights(n: usize) -> Vec<f64> {
    normalized((0..n).map(|i| ((i + 1) * (n - i)) as f64).collect())
}

/// Uniform rung placement `p_i = 1/n`.
pub fn ladder_uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}
