//! Small test systems: card shuffles ordered by Bruhat order, spin systems
//! under the product order, single-site update kernels and scan orders.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::orders::{has_positive_correlations, DEFAULT_TOL};
use crate::pmf::Pmf;
use crate::poset::Poset;

/// Largest deck for which the Bruhat order is built.
pub const MAX_BRUHAT_DECK: usize = 5;
/// Largest deck for which permutations are enumerated.
pub const MAX_DECK: usize = 8;
/// Largest spin-system state space (the order is stored densely).
pub const MAX_SPIN_STATES: usize = 4096;

/// All permutations of `{0..n}` in lexicographic order.
#[derive(Debug, Clone)]
pub struct PermutationSpace {
    n: usize,
    states: Vec<Vec<u8>>,
    inv: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
}

fn inversions(x: &[u8]) -> usize {
    (0..x.len())
        .map(|i| (i + 1..x.len()).filter(|&j| x[i] > x[j]).count())
        .sum()
}

fn next_permutation(x: &mut [u8]) -> bool {
    let Some(i) = (1..x.len()).rev().find(|&i| x[i - 1] < x[i]) else {
        return false;
    };
    let j = (i..x.len()).rev().find(|&j| x[j] > x[i - 1]).expect("successor exists");
    x.swap(i - 1, j);
    x[i..].reverse();
    true
}

impl PermutationSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DECK {
            return Err(Error::InvalidParameter(format!(
                "deck size {n} outside 1..={MAX_DECK}"
            )));
        }
        let mut states = Vec::new();
        let mut x: Vec<u8> = (0..n as u8).collect();
        loop {
            states.push(x.clone());
            if !next_permutation(&mut x) {
                break;
            }
        }
        let inv = states.iter().map(|s| inversions(s)).collect();
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { n, states, inv, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn inv(&self, state: usize) -> usize {
        self.inv[state]
    }

    pub fn index_of(&self, perm: &[u8]) -> Option<usize> {
        self.index.get(perm).copied()
    }

    /// Closure of the covers `x -> x (i j)` that raise `inv` by exactly one.
    pub fn bruhat_poset(&self) -> Result<Poset> {
        if self.n > MAX_BRUHAT_DECK {
            return Err(Error::InvalidParameter(format!(
                "Bruhat order limited to decks of at most {MAX_BRUHAT_DECK} cards"
            )));
        }
        let mut covers = Vec::new();
        for (x, perm) in self.states.iter().enumerate() {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    let mut y = perm.clone();
                    y.swap(i, j);
                    let y = self.index[&y];
                    if self.inv[y] == self.inv[x] + 1 {
                        covers.push((x, y));
                    }
                }
            }
        }
        Poset::from_covers(self.len(), &covers)
    }

    /// `pi(x) ∝ ((1 - p)/p)^inv(x)`.
    pub fn shuffle_stationary(&self, p: f64) -> Result<Pmf> {
        check_sort_probability(p)?;
        let ratio = (1.0 - p) / p;
        let weights: Vec<f64> = self.inv.iter().map(|&k| ratio.powi(k as i32)).collect();
        Pmf::from_weights(&weights)
    }

    /// Sorts the cards at positions `i - 1, i` with probability `p` and
    /// anti-sorts them otherwise (`i` in `1..n`).
    pub fn shuffle_site_kernel(&self, i: usize, p: f64) -> Result<Kernel> {
        check_sort_probability(p)?;
        if i == 0 || i >= self.n {
            return Err(Error::InvalidParameter(format!(
                "position {i} outside 1..{}",
                self.n
            )));
        }
        let m = self.len();
        let mut entries = vec![0.0; m * m];
        for (x, perm) in self.states.iter().enumerate() {
            let mut sorted = perm.clone();
            if sorted[i - 1] > sorted[i] {
                sorted.swap(i - 1, i);
            }
            let mut anti = sorted.clone();
            anti.swap(i - 1, i);
            entries[x * m + self.index[&sorted]] += p;
            entries[x * m + self.index[&anti]] += 1.0 - p;
        }
        Kernel::from_row_major(m, entries)?.with_stationary(self.shuffle_stationary(p)?)
    }
}

fn check_sort_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("sort probability {p} outside (0,1)")))
    }
}

/// Permutations of `{0..n}` with the Bruhat order.
pub fn bruhat_poset(n: usize) -> Result<Poset> {
    PermutationSpace::new(n)?.bruhat_poset()
}

/// The site-`i` shuffle kernel on decks of `n` cards.
pub fn shuffle_site_kernel(n: usize, i: usize, p: f64) -> Result<Kernel> {
    PermutationSpace::new(n)?.shuffle_site_kernel(i, p)
}

/// Configurations `{0..spins-1}^sites` of a graph, ordered coordinatewise.
/// State index is the mixed-radix number with site 0 least significant.
#[derive(Debug, Clone)]
pub struct SpinSpace {
    sites: usize,
    spins: usize,
    edges: Vec<(usize, usize)>,
}

impl SpinSpace {
    pub fn new(sites: usize, spins: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if sites == 0 || spins < 2 {
            return Err(Error::InvalidParameter("need a site and two spin values".into()));
        }
        let states = (spins as u128).checked_pow(sites as u32).unwrap_or(u128::MAX);
        if states > MAX_SPIN_STATES as u128 {
            return Err(Error::InvalidParameter(format!(
                "{spins}^{sites} configurations exceed {MAX_SPIN_STATES}"
            )));
        }
        if let Some(&(u, v)) = edges.iter().find(|(u, v)| *u >= sites || *v >= sites || u == v) {
            return Err(Error::InvalidParameter(format!("bad edge ({u}, {v})")));
        }
        Ok(Self { sites, spins, edges })
    }

    /// Rectangular grid with nearest-neighbour edges; site `r * cols + c`.
    pub fn grid(rows: usize, cols: usize, spins: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Self::new(rows * cols, spins, edges)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.spins.pow(self.sites as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spin(&self, state: usize, site: usize) -> usize {
        (state / self.spins.pow(site as u32)) % self.spins
    }

    pub fn poset(&self) -> Poset {
        Poset::product(&vec![self.spins; self.sites])
    }

    /// Configurations agreeing off `site`, each listed by increasing spin at `site`.
    pub fn site_classes(&self, site: usize) -> Vec<Vec<usize>> {
        let stride = self.spins.pow(site as u32);
        (0..self.len())
            .filter(|&x| self.spin(x, site) == 0)
            .map(|base| (0..self.spins).map(|s| base + s * stride).collect())
            .collect()
    }

    /// `pi(x) ∝ exp(beta * #{edges whose endpoints agree})`.
    pub fn ising_pmf(&self, beta: f64) -> Result<Pmf> {
        let weights: Vec<f64> = (0..self.len())
            .map(|x| {
                let agree = self
                    .edges
                    .iter()
                    .filter(|(u, v)| self.spin(x, *u) == self.spin(x, *v))
                    .count();
                (beta * agree as f64).exp()
            })
            .collect();
        Pmf::from_weights(&weights)
    }
}

/// Within each class, jump to a `pi`-conditional draw from that class.
/// Each conditional must have positive correlations on the induced order.
pub fn class_update_kernel(pi: &Pmf, poset: &Poset, classes: &[Vec<usize>], tol: f64) -> Result<Kernel> {
    pi.require_positive()?;
    let mut cells = Vec::with_capacity(classes.len());
    for (c, states) in classes.iter().enumerate() {
        let conditional = Pmf::from_weights(&states.iter().map(|&x| pi[x]).collect::<Vec<_>>())?;
        let local = poset.restrict(states);
        if !has_positive_correlations(&conditional, &local, tol)? {
            return Err(Error::NoPositiveCorrelations { class: c });
        }
        cells.push((Kernel::trivial(&conditional), states.clone()));
    }
    Kernel::direct_sum(pi.len(), &cells)?.with_stationary(pi.clone())
}

/// Heat-bath update at `site`.
pub fn spin_site_kernel(space: &SpinSpace, pi: &Pmf, site: usize) -> Result<Kernel> {
    if pi.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            found: pi.len(),
        });
    }
    if site >= space.sites() {
        return Err(Error::InvalidParameter(format!("site {site} out of range")));
    }
    class_update_kernel(pi, &space.poset(), &space.site_classes(site), DEFAULT_TOL)
}

/// Whether every single-site conditional law is stochastically increasing
/// in the configuration elsewhere (checked on every comparable class pair).
pub fn is_monotone_system(space: &SpinSpace, pi: &Pmf, tol: f64) -> bool {
    let poset = space.poset();
    (0..space.sites()).all(|site| {
        let classes = space.site_classes(site);
        let tails: Vec<Vec<f64>> = classes
            .iter()
            .map(|states| {
                let total: f64 = states.iter().map(|&x| pi[x]).sum();
                let mut acc = 0.0;
                let mut tail: Vec<f64> = states
                    .iter()
                    .rev()
                    .map(|&x| {
                        acc += pi[x] / total;
                        acc
                    })
                    .collect();
                tail.reverse();
                tail
            })
            .collect();
        (0..classes.len()).all(|a| {
            (0..classes.len()).all(|b| {
                !poset.leq(classes[a][0], classes[b][0])
                    || tails[a].iter().zip(&tails[b]).all(|(lo, hi)| *lo <= hi + tol)
            })
        })
    })
}

/// Systematic scan `K_{v_1} ... K_{v_k}` over `sequence`, and random scan
/// `sum_v w_v K_v` over all sites (uniform weights by default).
pub fn scan_kernels(
    space: &SpinSpace,
    pi: &Pmf,
    sequence: &[usize],
    weights: Option<&[f64]>,
) -> Result<(Kernel, Kernel)> {
    if sequence.is_empty() {
        return Err(Error::InvalidParameter("empty site sequence".into()));
    }
    let site_kernels = (0..space.sites())
        .map(|v| spin_site_kernel(space, pi, v))
        .collect::<Result<Vec<_>>>()?;
    let mut factors = Vec::with_capacity(sequence.len());
    for &v in sequence {
        let k = site_kernels
            .get(v)
            .ok_or_else(|| Error::InvalidParameter(format!("site {v} out of range")))?;
        factors.push(k.clone());
    }
    let systematic = Kernel::product(&factors)?;
    let uniform = vec![1.0 / space.sites() as f64; space.sites()];
    let weights = weights.unwrap_or(&uniform);
    let random = Kernel::weighted_sum(weights, &site_kernels)?;
    Ok((systematic, random))
}

/// Random convex combination of `terms` uniformly drawn permutation matrices.
pub fn doubly_stochastic_sample(n_states: usize, seed: u64, terms: usize) -> Result<Kernel> {
    if terms == 0 || n_states == 0 {
        return Err(Error::InvalidParameter("need at least one state and one term".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..terms).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-12).collect();
    let total: f64 = raw.iter().sum();
    let mut entries = vec![0.0; n_states * n_states];
    let mut perm: Vec<usize> = (0..n_states).collect();
    for w in raw {
        perm.shuffle(&mut rng);
        for (i, &j) in perm.iter().enumerate() {
            entries[i * n_states + j] += w / total;
        }
    }
    Kernel::from_row_major(n_states, entries)?.with_stationary(Pmf::uniform(n_states))
}
