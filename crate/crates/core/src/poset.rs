use crate::error::{Error, Result};

/// A finite partial order on `0..size`, stored as a dense `leq` relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    size: usize,
    leq: Vec<bool>,
}

impl Poset {
    /// Validates reflexivity, antisymmetry and transitivity.
    pub fn from_relation(size: usize, leq: Vec<bool>) -> Result<Self> {
        if leq.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                found: leq.len(),
            });
        }
        let poset = Self { size, leq };
        poset.validate()?;
        Ok(poset)
    }

    /// Reflexive-transitive closure of a covering (or any generating) relation.
    pub fn from_covers(size: usize, covers: &[(usize, usize)]) -> Result<Self> {
        let mut leq = vec![false; size * size];
        for i in 0..size {
            leq[i * size + i] = true;
        }
        for &(a, b) in covers {
            if a >= size || b >= size {
                return Err(Error::InvalidPoset(format!("cover ({a},{b}) out of range")));
            }
            leq[a * size + b] = true;
        }
        for k in 0..size {
            for i in 0..size {
                if !leq[i * size + k] {
                    continue;
                }
                for j in 0..size {
                    if leq[k * size + j] {
                        leq[i * size + j] = true;
                    }
                }
            }
        }
        Self::from_relation(size, leq)
    }

    /// The chain `0 < 1 < ... < size - 1`.
    pub fn linear(size: usize) -> Self {
        let leq = (0..size * size).map(|k| k / size <= k % size).collect();
        Self { size, leq }
    }

    pub fn antichain(size: usize) -> Self {
        let leq = (0..size * size).map(|k| k / size == k % size).collect();
        Self { size, leq }
    }

    /// Coordinatewise order on `prod_c {0..radix_c - 1}`; state index is the
    /// mixed-radix number with coordinate 0 least significant.
    pub fn product(radices: &[usize]) -> Self {
        let size: usize = radices.iter().product();
        let digits = |mut x: usize| {
            radices
                .iter()
                .map(|r| {
                    let d = x % r;
                    x /= r;
                    d
                })
                .collect::<Vec<_>>()
        };
        let all: Vec<Vec<usize>> = (0..size).map(digits).collect();
        let mut leq = vec![false; size * size];
        for x in 0..size {
            for y in 0..size {
                leq[x * size + y] = all[x].iter().zip(&all[y]).all(|(a, b)| a <= b);
            }
        }
        Self { size, leq }
    }

    /// The order induced on `states` (re-indexed `0..states.len()`).
    pub fn restrict(&self, states: &[usize]) -> Self {
        let m = states.len();
        let leq = (0..m * m)
            .map(|k| self.leq(states[k / m], states[k % m]))
            .collect();
        Self { size: m, leq }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.size + y]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size).all(|x| self.leq(x, x))
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.size).all(|x| (0..self.size).all(|y| x == y || !(self.leq(x, y) && self.leq(y, x))))
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.size;
        (0..n).all(|x| {
            (0..n).all(|y| !self.leq(x, y) || (0..n).all(|z| !self.leq(y, z) || self.leq(x, z)))
        })
    }

    fn validate(&self) -> Result<()> {
        if !self.is_reflexive() {
            return Err(Error::InvalidPoset("relation is not reflexive".into()));
        }
        if !self.is_antisymmetric() {
            return Err(Error::InvalidPoset("relation is not antisymmetric".into()));
        }
        if !self.is_transitive() {
            return Err(Error::InvalidPoset("relation is not transitive".into()));
        }
        Ok(())
    }

    /// True when every pair of elements is comparable.
    pub fn is_linear(&self) -> bool {
        (0..self.size).all(|x| (0..self.size).all(|y| self.leq(x, y) || self.leq(y, x)))
    }

    /// True when `y in mask` and `x <= y` force `x in mask`.
    pub fn is_down_set(&self, mask: &[bool]) -> bool {
        (0..self.size).all(|y| {
            !mask[y] || (0..self.size).all(|x| !self.leq(x, y) || mask[x])
        })
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&y| (0..self.size).all(|x| !self.lt(x, y)))
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&x| (0..self.size).all(|y| !self.lt(x, y)))
            .collect()
    }

    /// Strict predecessors of each element.
    pub fn strict_predecessors(&self) -> Vec<Vec<usize>> {
        (0..self.size)
            .map(|y| (0..self.size).filter(|&x| self.lt(x, y)).collect())
            .collect()
    }
}
