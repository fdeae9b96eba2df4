//! Down-sets, stochastic monotonicity and the comparison relation `K ⪯ L`.
//!
//! For a fixed stationary pmf `pi` on a poset, `K ⪯ L` means
//! `<K f, g>_pi <= <L f, g>_pi` for every pair of nonnegative non-increasing
//! functions `f, g`. It suffices to test indicators of down-sets, so every
//! check here runs over the enumerated order ideals of the poset.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::pmf::Pmf;
use crate::poset::Poset;

/// Default cap on the number of enumerated ideals.
pub const DEFAULT_DOWNSET_CAP: usize = 1_000_000;
/// Default absolute tolerance on inner-product differences.
pub const DEFAULT_TOL: f64 = 1e-10;

/// An order ideal: `y` in the set and `x <= y` imply `x` in the set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DownSet {
    members: Vec<bool>,
    indices: Vec<usize>,
}

impl DownSet {
    fn from_words(size: usize, words: &[u64]) -> Self {
        let members: Vec<bool> = (0..size).map(|i| words[i / 64] >> (i % 64) & 1 == 1).collect();
        let indices = (0..size).filter(|&i| members[i]).collect();
        Self { members, indices }
    }

    /// Wraps a mask after checking it is closed downward.
    pub fn new(poset: &Poset, members: Vec<bool>) -> Result<Self> {
        if members.len() != poset.size() {
            return Err(Error::DimensionMismatch {
                expected: poset.size(),
                found: members.len(),
            });
        }
        if !poset.is_down_set(&members) {
            return Err(Error::InvalidParameter("mask is not a down-set".into()));
        }
        let indices = (0..members.len()).filter(|&i| members[i]).collect();
        Ok(Self { members, indices })
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    /// Member states in increasing order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members[x]
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn words_for(size: usize) -> usize {
    size.div_ceil(64).max(1)
}

fn cmp_as_integer(a: &[u64], b: &[u64]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

/// All order ideals of `poset`, including the empty and the full set,
/// sorted by their membership mask read as a binary integer.
///
/// Grows ideals breadth-first from the empty set by adjoining any element
/// whose strict predecessors are already present.
pub fn enumerate_down_sets(poset: &Poset, cap: usize) -> Result<Vec<DownSet>> {
    let n = poset.size();
    let nw = words_for(n);
    let preds: Vec<Vec<u64>> = poset
        .strict_predecessors()
        .into_iter()
        .map(|ps| {
            let mut w = vec![0u64; nw];
            for p in ps {
                w[p / 64] |= 1 << (p % 64);
            }
            w
        })
        .collect();

    let empty = vec![0u64; nw];
    let mut seen: HashSet<Vec<u64>> = HashSet::from([empty.clone()]);
    let mut queue = VecDeque::from([empty]);
    while let Some(mask) = queue.pop_front() {
        for x in 0..n {
            if mask[x / 64] >> (x % 64) & 1 == 1 {
                continue;
            }
            let addable = preds[x].iter().zip(&mask).all(|(p, m)| p & !m == 0);
            if !addable {
                continue;
            }
            let mut next = mask.clone();
            next[x / 64] |= 1 << (x % 64);
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(Error::DownSetCap { cap });
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    let mut masks: Vec<Vec<u64>> = seen.into_iter().collect();
    masks.sort_by(|a, b| cmp_as_integer(a, b));
    Ok(masks.iter().map(|m| DownSet::from_words(n, m)).collect())
}

/// Outcome of testing `K ⪯ L` over all down-set pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub holds: bool,
    /// `max_(D,E) <K 1_D, 1_E> - <L 1_D, 1_E>`; never negative since `E = ∅` gives 0.
    pub worst_violation: f64,
    /// The maximizing `(D, E)` pair.
    pub witness: (DownSet, DownSet),
}

/// `(K 1_D)(i)` for every state `i`.
fn kernel_on_indicator(k: &Kernel, d: &DownSet) -> Vec<f64> {
    (0..k.size())
        .map(|i| {
            let row = k.row(i);
            d.indices().iter().map(|&j| row[j]).sum()
        })
        .collect()
}

/// Tests `K ⪯ L` with respect to `pi` and the order generating `ideals`.
pub fn compare_with(
    k: &Kernel,
    l: &Kernel,
    pi: &Pmf,
    ideals: &[DownSet],
    tol: f64,
) -> Result<ComparisonReport> {
    if k.size() != l.size() {
        return Err(Error::DimensionMismatch {
            expected: k.size(),
            found: l.size(),
        });
    }
    k.check_stationary(pi)?;
    l.check_stationary(pi)?;
    if ideals.is_empty() {
        return Err(Error::InvalidParameter("no down-sets supplied".into()));
    }

    let per_d: Vec<(f64, usize, usize)> = ideals
        .par_iter()
        .enumerate()
        .map(|(di, d)| {
            let kd = kernel_on_indicator(k, d);
            let ld = kernel_on_indicator(l, d);
            let u: Vec<f64> = (0..k.size()).map(|i| pi[i] * (kd[i] - ld[i])).collect();
            let mut best = (f64::NEG_INFINITY, di, 0);
            for (ei, e) in ideals.iter().enumerate() {
                let s: f64 = e.indices().iter().map(|&i| u[i]).sum();
                if s > best.0 {
                    best = (s, di, ei);
                }
            }
            best
        })
        .collect();
    // sequential reduction keeps the witness independent of thread scheduling
    let (worst, di, ei) = per_d
        .into_iter()
        .fold((f64::NEG_INFINITY, 0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    Ok(ComparisonReport {
        holds: worst <= tol,
        worst_violation: worst,
        witness: (ideals[di].clone(), ideals[ei].clone()),
    })
}

/// Tests `K ⪯ L`, enumerating the down-sets of `poset` with the default cap.
pub fn compare(
    k: &Kernel,
    l: &Kernel,
    pi: &Pmf,
    poset: &Poset,
    tol: f64,
) -> Result<ComparisonReport> {
    let ideals = enumerate_down_sets(poset, DEFAULT_DOWNSET_CAP)?;
    compare_with(k, l, pi, &ideals, tol)
}

/// Stochastic monotonicity checked on down-set indicators: each `K 1_D`
/// must be non-increasing along the order.
pub fn is_monotone_with(kernel: &Kernel, poset: &Poset, ideals: &[DownSet], tol: f64) -> bool {
    let n = poset.size();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| poset.lt(x, y))
        .collect();
    ideals.par_iter().all(|d| {
        let v = kernel_on_indicator(kernel, d);
        pairs.iter().all(|&(x, y)| v[x] >= v[y] - tol)
    })
}

pub fn is_monotone(kernel: &Kernel, poset: &Poset, tol: f64) -> Result<bool> {
    if kernel.size() != poset.size() {
        return Err(Error::DimensionMismatch {
            expected: poset.size(),
            found: kernel.size(),
        });
    }
    let ideals = enumerate_down_sets(poset, DEFAULT_DOWNSET_CAP)?;
    Ok(is_monotone_with(kernel, poset, &ideals, tol))
}

/// `pi(D ∩ E) >= pi(D) pi(E)` for all down-sets `D, E`.
pub fn has_positive_correlations_with(pi: &Pmf, ideals: &[DownSet], tol: f64) -> bool {
    let mass: Vec<f64> = ideals.iter().map(|d| pi.mass_of(d.members())).collect();
    ideals.par_iter().enumerate().all(|(a, d)| {
        ideals.iter().enumerate().all(|(b, e)| {
            let joint: f64 = d
                .indices()
                .iter()
                .filter(|&&i| e.contains(i))
                .map(|&i| pi[i])
                .sum();
            joint >= mass[a] * mass[b] - tol
        })
    })
}

pub fn has_positive_correlations(pi: &Pmf, poset: &Poset, tol: f64) -> Result<bool> {
    if pi.len() != poset.size() {
        return Err(Error::DimensionMismatch {
            expected: poset.size(),
            found: pi.len(),
        });
    }
    pi.require_positive()?;
    let ideals = enumerate_down_sets(poset, DEFAULT_DOWNSET_CAP)?;
    Ok(has_positive_correlations_with(pi, &ideals, tol))
}

/// True when, for each `k`, the `k` largest entries of `v` sum to at least
/// the `k` largest entries of `w` (minus `tol`).
pub fn majorizes(v: &[f64], w: &[f64], tol: f64) -> bool {
    majorization_slack(v, w).is_some_and(|s| s >= -tol)
}

/// `min_k (top-k sum of v) - (top-k sum of w)`, or `None` on length mismatch.
pub fn majorization_slack(v: &[f64], w: &[f64]) -> Option<f64> {
    if v.len() != w.len() {
        return None;
    }
    let sorted_desc = |x: &[f64]| {
        let mut s = x.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (sv, sw) = (sorted_desc(v), sorted_desc(w));
    let mut acc_v = 0.0;
    let mut acc_w = 0.0;
    let mut slack = f64::INFINITY;
    for (a, b) in sv.iter().zip(&sw) {
        acc_v += a;
        acc_w += b;
        slack = slack.min(acc_v - acc_w);
    }
    Some(slack)
}

/// `mu` is stochastically larger than `nu`: `mu(D) <= nu(D)` on every down-set.
pub fn dominates(mu: &Pmf, nu: &Pmf, poset: &Poset, tol: f64) -> Result<bool> {
    if mu.len() != nu.len() || mu.len() != poset.size() {
        return Err(Error::DimensionMismatch {
            expected: poset.size(),
            found: mu.len().max(nu.len()),
        });
    }
    let ideals = enumerate_down_sets(poset, DEFAULT_DOWNSET_CAP)?;
    Ok(ideals
        .iter()
        .all(|d| mu.mass_of(d.members()) <= nu.mass_of(d.members()) + tol))
}

/// Kernel stochastic ordering `L <=_st K`: `K 1_D <= L 1_D` entrywise for
/// every down-set. Within monotone kernels sharing `pi` this implies `K ⪯ L`,
/// though interesting comparisons rarely satisfy it.
pub fn stochastically_below(l: &Kernel, k: &Kernel, poset: &Poset, tol: f64) -> Result<bool> {
    let ideals = enumerate_down_sets(poset, DEFAULT_DOWNSET_CAP)?;
    Ok(ideals.iter().all(|d| {
        let kd = kernel_on_indicator(k, d);
        let ld = kernel_on_indicator(l, d);
        kd.iter().zip(&ld).all(|(a, b)| *a <= b + tol)
    }))
}
