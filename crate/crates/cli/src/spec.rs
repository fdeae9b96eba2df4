//! JSON chain specifications and their construction.

use mixorder::chains::{
    biased_rw_params, budgeted_min_tmix, fmmc_logconcave, fmmc_lw, from_w, lw_optimal_path_p, symmetric_bd_params,
    BdParams, WParams,
};
use mixorder::structures::{spin_site_kernel, PermutationSpace, SpinSpace};
use mixorder::{Error, Kernel, Pmf, Poset, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChainSpec {
    SymmetricBd {
        p: Vec<f64>,
    },
    Uniform {
        n: usize,
    },
    FmmcLogconcave {
        pi: Vec<f64>,
    },
    BiasedRw {
        rho: f64,
        n: usize,
    },
    FromW {
        w: Vec<f64>,
        pi: Vec<f64>,
    },
    /// Path optimum for uniform `pi` when only `n` is given, otherwise the
    /// optimum over holding-free chains for the supplied `pi`.
    LwOptimal {
        n: Option<usize>,
        pi: Option<Vec<f64>>,
    },
    Budgeted {
        pi: Vec<f64>,
        c: f64,
    },
    ShuffleSite {
        n: usize,
        i: usize,
        p: f64,
    },
    SpinSite {
        rows: usize,
        cols: usize,
        #[serde(default = "two")]
        spins: usize,
        beta: f64,
        site: usize,
    },
    Raw {
        matrix: Vec<Vec<f64>>,
        #[serde(alias = "stationary")]
        pi: Option<Vec<f64>>,
        // Informational fields written by `build`; ignored on input.
        #[serde(rename = "monotone")]
        _monotone: Option<bool>,
        #[serde(rename = "reversible")]
        _reversible: Option<bool>,
        #[serde(rename = "birth_death")]
        _birth_death: Option<serde_json::Value>,
        #[serde(rename = "tmix")]
        _tmix: Option<f64>,
    },
}

fn two() -> usize {
    2
}

/// A constructed chain with the data every subcommand needs.
#[derive(Debug, Clone)]
pub struct Chain {
    pub kernel: Kernel,
    pub pi: Pmf,
    /// The natural order of the state space.
    pub poset: Poset,
    /// Birth-and-death parameters when the kernel is tridiagonal on a path.
    pub bd: Option<BdParams>,
    /// Optimal mixing time from 0 reported by an optimizing constructor.
    pub optimum: Option<f64>,
}

/// Accepts exact probability vectors unchanged and normalizes anything else.
pub fn parse_pmf(weights: &[f64]) -> Result<Pmf> {
    Pmf::new(weights.to_vec()).or_else(|_| Pmf::from_weights(weights))
}

fn from_bd(bd: BdParams, pi: Option<Pmf>, optimum: Option<f64>) -> Result<Chain> {
    let pi = match pi {
        Some(pi) => pi,
        None => bd.stationary()?,
    };
    let kernel = bd.kernel().with_stationary(pi.clone())?;
    Ok(Chain {
        poset: Poset::linear(kernel.size()),
        kernel,
        pi,
        bd: Some(bd),
        optimum,
    })
}

impl ChainSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("chain spec: {e}")))
    }

    pub fn build(&self) -> Result<Chain> {
        match self {
            ChainSpec::SymmetricBd { p } => {
                let bd = symmetric_bd_params(p)?;
                from_bd(bd, Some(Pmf::uniform(p.len() + 1)), None)
            }
            ChainSpec::Uniform { n } => {
                if *n == 0 {
                    return Err(Error::InvalidParameter("uniform chain needs n >= 1".into()));
                }
                from_bd(symmetric_bd_params(&vec![0.5; *n])?, Some(Pmf::uniform(n + 1)), None)
            }
            ChainSpec::FmmcLogconcave { pi } => {
                let pi = parse_pmf(pi)?;
                from_bd(fmmc_logconcave(&pi)?, Some(pi), None)
            }
            ChainSpec::BiasedRw { rho, n } => from_bd(biased_rw_params(*rho, *n)?, None, None),
            ChainSpec::FromW { w, pi } => {
                let pi = parse_pmf(pi)?;
                from_bd(from_w(&WParams::new(w.clone(), pi.clone())?)?, Some(pi), None)
            }
            ChainSpec::LwOptimal { n, pi } => match (n, pi) {
                (Some(n), None) => from_bd(symmetric_bd_params(&lw_optimal_path_p(*n)?)?, Some(Pmf::uniform(n + 1)), None),
                (n, Some(pi)) => {
                    let pi = parse_pmf(pi)?;
                    if let Some(n) = n {
                        if pi.len() != n + 1 {
                            return Err(Error::DimensionMismatch {
                                expected: n + 1,
                                found: pi.len(),
                            });
                        }
                    }
                    let opt = fmmc_lw(&pi)?;
                    from_bd(opt.params, Some(pi), Some(opt.tmix))
                }
                (None, None) => Err(Error::InvalidParameter("lw_optimal needs n or pi".into())),
            },
            ChainSpec::Budgeted { pi, c } => {
                let pi = parse_pmf(pi)?;
                let opt = budgeted_min_tmix(&pi, *c)?;
                from_bd(opt.params, Some(pi), Some(opt.tmix))
            }
            ChainSpec::ShuffleSite { n, i, p } => {
                let space = PermutationSpace::new(*n)?;
                let pi = space.shuffle_stationary(*p)?;
                Ok(Chain {
                    kernel: space.shuffle_site_kernel(*i, *p)?.with_stationary(pi.clone())?,
                    pi,
                    poset: space.bruhat_poset()?,
                    bd: None,
                    optimum: None,
                })
            }
            ChainSpec::SpinSite {
                rows,
                cols,
                spins,
                beta,
                site,
            } => {
                let space = SpinSpace::grid(*rows, *cols, *spins)?;
                let pi = space.ising_pmf(*beta)?;
                Ok(Chain {
                    kernel: spin_site_kernel(&space, &pi, *site)?.with_stationary(pi.clone())?,
                    pi,
                    poset: space.poset(),
                    bd: None,
                    optimum: None,
                })
            }
            ChainSpec::Raw { matrix, pi, .. } => {
                let kernel = Kernel::from_rows(matrix.clone())?;
                let (kernel, pi) = match pi {
                    Some(w) => {
                        let pi = parse_pmf(w)?;
                        (kernel.with_stationary(pi.clone())?, pi)
                    }
                    None => {
                        let pi = kernel.stationary()?;
                        (kernel, pi)
                    }
                };
                let bd = if kernel.is_tridiagonal() {
                    BdParams::from_kernel(&kernel).ok()
                } else {
                    None
                };
                Ok(Chain {
                    poset: Poset::linear(kernel.size()),
                    kernel,
                    pi,
                    bd,
                    optimum: None,
                })
            }
        }
    }
}
