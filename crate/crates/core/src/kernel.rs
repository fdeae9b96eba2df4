//! Row-stochastic transition kernels and their elementary algebra.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pmf::Pmf;

/// Tolerance on each row sum.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Entries in `[-CLAMP_TOL, 0)` are treated as round-off and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;
/// Residual tolerance for `pi K = pi`.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Tolerance for detailed balance `pi_i K(i,j) = pi_j K(j,i)`.
pub const REVERSIBLE_TOL: f64 = 1e-10;

/// A row-stochastic `N x N` matrix, stored row-major, with an optional
/// cached stationary distribution.
#[derive(Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    entries: Vec<f64>,
    stationary: Option<Pmf>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.size {
            list.entry(&self.row(i));
        }
        list.finish()
    }
}

impl Kernel {
    /// Builds a kernel from its rows, clamping round-off negatives.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: bad.len(),
            });
        }
        Self::from_row_major(size, rows.into_iter().flatten().collect())
    }

    pub fn from_row_major(size: usize, mut entries: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidKernel("empty state space".into()));
        }
        if entries.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                found: entries.len(),
            });
        }
        for (idx, x) in entries.iter_mut().enumerate() {
            let (i, j) = (idx / size, idx % size);
            if !x.is_finite() {
                return Err(Error::InvalidKernel(format!("entry ({i},{j}) is {x}")));
            }
            if *x < -CLAMP_TOL {
                return Err(Error::InvalidKernel(format!(
                    "entry ({i},{j}) = {x} is negative"
                )));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
            if *x > 1.0 + CLAMP_TOL {
                return Err(Error::InvalidKernel(format!("entry ({i},{j}) = {x} exceeds 1")));
            }
        }
        for i in 0..size {
            let s: f64 = entries[i * size..(i + 1) * size].iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidKernel(format!("row {i} sums to {s}")));
            }
        }
        Ok(Self {
            size,
            entries,
            stationary: None,
        })
    }

    /// Products and mixtures of valid kernels; skips validation.
    fn from_parts(size: usize, entries: Vec<f64>) -> Self {
        Self {
            size,
            entries,
            stationary: None,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut entries = vec![0.0; size * size];
        for i in 0..size {
            entries[i * size + i] = 1.0;
        }
        Self::from_parts(size, entries)
    }

    /// The kernel that jumps to `pi` in one step from every state.
    pub fn trivial(pi: &Pmf) -> Self {
        let size = pi.len();
        let entries = (0..size).flat_map(|_| pi.weights().iter().copied()).collect();
        Self {
            size,
            entries,
            stationary: Some(pi.clone()),
        }
    }

    /// Attaches a stationary distribution after checking `pi K = pi`.
    pub fn with_stationary(mut self, pi: Pmf) -> Result<Self> {
        self.check_stationary(&pi)?;
        self.stationary = Some(pi);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.size).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn cached_stationary(&self) -> Option<&Pmf> {
        self.stationary.as_ref()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.size, self.size, &self.entries)
    }

    /// `(K f)(i) = sum_j K(i,j) f(j)`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|i| self.row(i).iter().zip(f).map(|(k, x)| k * x).sum())
            .collect()
    }

    /// `(mu K)(j) = sum_i mu(i) K(i,j)`.
    pub fn left_apply(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for (i, m) in mu.iter().enumerate() {
            if *m == 0.0 {
                continue;
            }
            for (o, k) in out.iter_mut().zip(self.row(i)) {
                *o += m * k;
            }
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Kernel) -> Result<Kernel> {
        self.check_same_size(other)?;
        let n = self.size;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let out = &mut entries[i * n..(i + 1) * n];
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        let mut product = Kernel::from_parts(n, entries);
        if let (Some(a), Some(b)) = (&self.stationary, &other.stationary) {
            if a == b {
                product.stationary = Some(a.clone());
            }
        }
        Ok(product)
    }

    /// Product of a nonempty sequence of kernels, left to right.
    pub fn product(kernels: &[Kernel]) -> Result<Kernel> {
        let (first, rest) = kernels
            .split_first()
            .ok_or_else(|| Error::InvalidParameter("empty kernel product".into()))?;
        rest.iter().try_fold(first.clone(), |acc, k| acc.mul(k))
    }

    pub fn pow(&self, t: usize) -> Kernel {
        let mut result = Kernel::identity(self.size);
        result.stationary = self.stationary.clone();
        let mut base = self.clone();
        let mut e = t;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same size");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same size");
            }
        }
        result
    }

    pub fn transpose_entries(&self) -> Vec<f64> {
        let n = self.size;
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                t[j * n + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn max_abs_diff(&self, other: &Kernel) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|(pi K)_j - pi_j|`.
    pub fn stationary_residual(&self, pi: &Pmf) -> f64 {
        self.left_apply(pi.weights())
            .iter()
            .zip(pi.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_stationary(&self, pi: &Pmf) -> Result<()> {
        if pi.len() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: pi.len(),
            });
        }
        let residual = self.stationary_residual(pi);
        if residual > STATIONARY_TOL {
            return Err(Error::NotStationary { residual });
        }
        Ok(())
    }

    /// Largest `|pi_i K(i,j) - pi_j K(j,i)|`.
    pub fn reversibility_defect(&self, pi: &Pmf) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.size {
            for j in (i + 1)..self.size {
                defect = defect.max((pi[i] * self.get(i, j) - pi[j] * self.get(j, i)).abs());
            }
        }
        defect
    }

    pub fn is_reversible(&self, pi: &Pmf) -> bool {
        pi.len() == self.size && self.reversibility_defect(pi) <= REVERSIBLE_TOL
    }

    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        (0..self.size).all(|j| {
            let s: f64 = (0..self.size).map(|i| self.get(i, j)).sum();
            (s - 1.0).abs() <= tol
        })
    }

    /// True when only the diagonal and the two adjacent diagonals are nonzero.
    pub fn is_tridiagonal(&self) -> bool {
        (0..self.size).all(|i| {
            (0..self.size).all(|j| i.abs_diff(j) <= 1 || self.get(i, j) == 0.0)
        })
    }

    /// True when every state reaches every other along positive entries.
    pub fn is_irreducible(&self) -> bool {
        let n = self.size;
        let reach_all = |forward: bool| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(i) = queue.pop_front() {
                for j in 0..n {
                    let w = if forward { self.get(i, j) } else { self.get(j, i) };
                    if w > 0.0 && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach_all(true) && reach_all(false)
    }

    /// The unique stationary pmf of an irreducible kernel.
    ///
    /// Tridiagonal kernels use the detailed-balance product; anything else
    /// goes through a dense solve of `(K^T - I) pi = 0` with one equation
    /// replaced by the normalization.
    pub fn stationary(&self) -> Result<Pmf> {
        if let Some(pi) = &self.stationary {
            return Ok(pi.clone());
        }
        if !self.is_irreducible() {
            return Err(Error::Reducible(
                "no unique stationary distribution".into(),
            ));
        }
        let pi = if self.is_tridiagonal() {
            self.birth_death_stationary()
        } else {
            self.dense_stationary()?
        };
        self.check_stationary(&pi)?;
        Ok(pi)
    }

    fn birth_death_stationary(&self) -> Pmf {
        let n = self.size;
        let mut weights = vec![1.0; n];
        for i in 1..n {
            weights[i] = weights[i - 1] * self.get(i - 1, i) / self.get(i, i - 1);
        }
        let total: f64 = weights.iter().sum();
        Pmf::from_vec_unchecked(weights.into_iter().map(|w| w / total).collect())
    }

    fn dense_stationary(&self) -> Result<Pmf> {
        let n = self.size;
        let mut a = self.to_matrix().transpose() - DMatrix::<f64>::identity(n, n);
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = DVector::<f64>::zeros(n);
        b[n - 1] = 1.0;
        let x = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Reducible("singular stationary system".into()))?;
        let mut weights: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        if weights.iter().any(|w| *w <= 0.0) {
            return Err(Error::Reducible("stationary solution has zero mass".into()));
        }
        Ok(Pmf::from_vec_unchecked(weights))
    }

    /// The `L^2(pi)` adjoint `K*(i,j) = pi_j K(j,i) / pi_i`.
    pub fn time_reversal(&self, pi: &Pmf) -> Result<Kernel> {
        pi.require_positive()?;
        self.check_stationary(pi)?;
        let n = self.size;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = pi[j] * self.get(j, i) / pi[i];
            }
        }
        let mut reversed = Kernel::from_parts(n, entries);
        reversed.stationary = Some(pi.clone());
        Ok(reversed)
    }

    /// Law of `X_t` when `X_0 ~ init`.
    pub fn evolve(&self, init: &Pmf, t: usize) -> Result<Pmf> {
        if init.len() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: init.len(),
            });
        }
        let mut mu = init.weights().to_vec();
        for _ in 0..t {
            mu = self.left_apply(&mu);
        }
        Ok(Pmf::from_vec_unchecked(mu))
    }

    /// `(1 - lambda) k0 + lambda k1`.
    pub fn mixture(lambda: f64, k0: &Kernel, k1: &Kernel) -> Result<Kernel> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "mixture weight {lambda} outside [0,1]"
            )));
        }
        k0.check_same_size(k1)?;
        let entries = k0
            .entries
            .iter()
            .zip(&k1.entries)
            .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
            .collect();
        let mut mixed = Kernel::from_parts(k0.size, entries);
        if let (Some(a), Some(b)) = (&k0.stationary, &k1.stationary) {
            if a == b {
                mixed.stationary = Some(a.clone());
            }
        }
        Ok(mixed)
    }

    /// Weighted mixture `sum_v w_v K_v` for weights summing to 1.
    pub fn weighted_sum(weights: &[f64], kernels: &[Kernel]) -> Result<Kernel> {
        if weights.len() != kernels.len() || kernels.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: kernels.len(),
                found: weights.len(),
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > ROW_SUM_TOL || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must be a pmf (sum {total})"
            )));
        }
        let n = kernels[0].size;
        let mut entries = vec![0.0; n * n];
        for (w, k) in weights.iter().zip(kernels) {
            kernels[0].check_same_size(k)?;
            for (e, x) in entries.iter_mut().zip(&k.entries) {
                *e += w * x;
            }
        }
        Ok(Kernel::from_parts(n, entries))
    }

    /// Block kernel acting as `cells[c].0` inside cell `c` (whose states are
    /// listed, in local order, by `cells[c].1`) and never crossing cells.
    pub fn direct_sum(size: usize, cells: &[(Kernel, Vec<usize>)]) -> Result<Kernel> {
        let mut owner = vec![usize::MAX; size];
        for (c, (kernel, states)) in cells.iter().enumerate() {
            if kernel.size != states.len() {
                return Err(Error::DimensionMismatch {
                    expected: states.len(),
                    found: kernel.size,
                });
            }
            for &s in states {
                if s >= size {
                    return Err(Error::InvalidParameter(format!(
                        "cell {c} names state {s} outside 0..{size}"
                    )));
                }
                if owner[s] != usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "state {s} appears in cells {} and {c}",
                        owner[s]
                    )));
                }
                owner[s] = c;
            }
        }
        if let Some(s) = owner.iter().position(|o| *o == usize::MAX) {
            return Err(Error::InvalidParameter(format!(
                "state {s} is not covered by any cell"
            )));
        }
        let mut entries = vec![0.0; size * size];
        for (kernel, states) in cells {
            for (a, &x) in states.iter().enumerate() {
                for (b, &y) in states.iter().enumerate() {
                    entries[x * size + y] = kernel.get(a, b);
                }
            }
        }
        Ok(Kernel::from_parts(size, entries))
    }

    fn check_same_size(&self, other: &Kernel) -> Result<()> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: other.size,
            });
        }
        Ok(())
    }
}
