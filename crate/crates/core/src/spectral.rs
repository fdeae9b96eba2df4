//! Spectra of reversible kernels.
//!
//! A kernel reversible for `pi` is similar to the symmetric matrix
//! `D^{1/2} K D^{-1/2}` (`D = diag(pi)`), so its spectrum is real.
//! Birth-and-death kernels take a Sturm-sequence bisection path on the
//! symmetric tridiagonal form; all others use a dense symmetric eigensolve.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::pmf::Pmf;

/// Tolerance used to identify unit eigenvalues and `-1`.
pub const ERGODIC_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Real eigenvalues sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

fn check_reversible(kernel: &Kernel, pi: &Pmf) -> Result<()> {
    if pi.len() != kernel.size() {
        return Err(Error::DimensionMismatch {
            expected: kernel.size(),
            found: pi.len(),
        });
    }
    pi.require_positive()?;
    if !kernel.is_reversible(pi) {
        return Err(Error::NotReversible {
            defect: kernel.reversibility_defect(pi),
        });
    }
    Ok(())
}

fn symmetrized(kernel: &Kernel, pi: &Pmf) -> DMatrix<f64> {
    let n = kernel.size();
    let s: Vec<f64> = pi.weights().iter().map(|w| w.sqrt()).collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = s[i] * kernel.get(i, j) / s[j];
        }
    }
    (&m + m.transpose()) * 0.5
}

fn sort_desc(mut v: Vec<f64>) -> Spectrum {
    v.sort_by(|a, b| b.total_cmp(a));
    Spectrum { eigenvalues: v }
}

/// Dense symmetric eigensolve with a reconstruction check.
pub fn dense_spectrum(kernel: &Kernel, pi: &Pmf) -> Result<Spectrum> {
    check_reversible(kernel, pi)?;
    let sym = symmetrized(kernel, pi);
    let eig = SymmetricEigen::new(sym.clone());
    let rebuilt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues)
        * eig.eigenvectors.transpose();
    let err = (&rebuilt - &sym).abs().max();
    if err > RECONSTRUCTION_TOL {
        return Err(Error::Numerical(format!(
            "eigendecomposition reconstruction error {err:.3e}"
        )));
    }
    Ok(sort_desc(eig.eigenvalues.iter().copied().collect()))
}

/// Eigenvalues of a reversible birth-and-death kernel by bisection on
/// Sturm counts of its symmetric tridiagonal form.
pub fn tridiagonal_spectrum(kernel: &Kernel, pi: &Pmf) -> Result<Spectrum> {
    check_reversible(kernel, pi)?;
    if !kernel.is_tridiagonal() {
        return Err(Error::InvalidKernel("kernel is not tridiagonal".into()));
    }
    let n = kernel.size();
    let diag: Vec<f64> = (0..n).map(|i| kernel.get(i, i)).collect();
    let off_sq: Vec<f64> = (0..n.saturating_sub(1))
        .map(|i| kernel.get(i, i + 1) * kernel.get(i + 1, i))
        .collect();
    // number of eigenvalues strictly below x
    let count_below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..n {
            let e2 = if i > 0 { off_sq[i - 1] } else { 0.0 };
            d = diag[i] - x - if i > 0 { e2 / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (1.0 + x.abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut eigenvalues = Vec::with_capacity(n);
    for k in 0..n {
        let (mut lo, mut hi) = (-1.0 - 1e-6, 1.0 + 1e-6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        eigenvalues.push(0.5 * (lo + hi));
    }
    Ok(sort_desc(eigenvalues))
}

/// Real spectrum of a kernel reversible for `pi`.
pub fn spectrum_reversible(kernel: &Kernel, pi: &Pmf) -> Result<Spectrum> {
    if kernel.is_tridiagonal() {
        tridiagonal_spectrum(kernel, pi)
    } else {
        dense_spectrum(kernel, pi)
    }
}

/// Second-largest eigenvalue in modulus of an ergodic reversible kernel.
pub fn slem(kernel: &Kernel, pi: &Pmf) -> Result<f64> {
    let spec = spectrum_reversible(kernel, pi)?;
    let ev = &spec.eigenvalues;
    let unit = ev.iter().filter(|l| (*l - 1.0).abs() <= ERGODIC_TOL).count();
    if unit != 1 {
        return Err(Error::NotErgodic(format!(
            "eigenvalue 1 has multiplicity {unit}"
        )));
    }
    if ev.iter().any(|l| *l <= -1.0 + ERGODIC_TOL) {
        return Err(Error::NotErgodic("eigenvalue -1 present (periodic)".into()));
    }
    Ok(ev[1..].iter().map(|l| l.abs()).fold(0.0, f64::max))
}

/// `1 / (1 - SLEM)`.
pub fn relaxation_time(kernel: &Kernel, pi: &Pmf) -> Result<f64> {
    Ok(1.0 / (1.0 - slem(kernel, pi)?))
}

/// Known spectrum of the biased walk: 1 and `2 sqrt(pq) cos(pi j/(n+1))`.
pub fn biased_rw_spectrum(rho: f64, n: usize) -> Spectrum {
    let p = rho / (1.0 + rho);
    let q = 1.0 / (1.0 + rho);
    let scale = 2.0 * (p * q).sqrt();
    let mut ev = vec![1.0];
    ev.extend((1..=n).map(|j| scale * (std::f64::consts::PI * j as f64 / (n + 1) as f64).cos()));
    sort_desc(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{biased_rw, uniform_chain};

    #[test]
    fn small_spectra() {
        let k = uniform_chain(1).unwrap();
        let s = spectrum_reversible(&k, &Pmf::uniform(2)).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14 && s.eigenvalues[1].abs() < 1e-14);

        let id = Kernel::identity(4);
        let s = spectrum_reversible(&id, &Pmf::uniform(4)).unwrap();
        assert!(s.eigenvalues.iter().all(|l| (l - 1.0).abs() < 1e-14));
        assert!(matches!(slem(&id, &Pmf::uniform(4)), Err(Error::NotErgodic(_))));
    }

    #[test]
    fn slem_examples() {
        let k = uniform_chain(2).unwrap();
        assert!((slem(&k, &Pmf::uniform(3)).unwrap() - 0.5).abs() < 1e-12);
        assert!((relaxation_time(&k, &Pmf::uniform(3)).unwrap() - 2.0).abs() < 1e-11);

        let k = biased_rw(4.0, 5).unwrap();
        let pi = k.stationary().unwrap();
        let expected = 0.8 * 3f64.sqrt() / 2.0;
        assert!((slem(&k, &pi).unwrap() - expected).abs() < 1e-12);

        let k = uniform_chain(3).unwrap();
        let expected = 1.0 / (1.0 - (std::f64::consts::PI / 4.0).cos());
        assert!((relaxation_time(&k, &Pmf::uniform(4)).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn fast_path_matches_dense() {
        for (rho, n) in [(0.5, 7), (2.0, 12), (1.0, 20)] {
            let k = biased_rw(rho, n).unwrap();
            let pi = k.stationary().unwrap();
            let a = tridiagonal_spectrum(&k, &pi).unwrap();
            let b = dense_spectrum(&k, &pi).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_reversible() {
        let cycle = Kernel::from_rows(vec![
            vec![0.2, 0.8, 0.0],
            vec![0.0, 0.2, 0.8],
            vec![0.8, 0.0, 0.2],
        ])
        .unwrap();
        assert!(matches!(
            spectrum_reversible(&cycle, &Pmf::uniform(3)),
            Err(Error::NotReversible { .. })
        ));
    }

    #[test]
    fn lazy_mixture_relaxation_grows_like_inverse_eps() {
        let k0 = uniform_chain(2).unwrap();
        let pi = Pmf::uniform(3);
        for eps in [0.1, 0.01, 0.001] {
            let k = Kernel::mixture(eps, &Kernel::identity(3), &k0).unwrap();
            // 1 - (1 - eps + eps/2) = eps/2
            let rt = relaxation_time(&k, &pi).unwrap();
            assert!((rt * eps - 2.0).abs() < 1e-6, "eps={eps} rt={rt}");
        }
    }
}
