//! Subcommand bodies. Each returns the text to emit.

use std::fmt::Write;

use mixorder::chains::uniform_chain;
use mixorder::duality::{
    dual_survival, sep_sum, ssd_dual, tmix_closed, tmix_oracle, OracleMode, TmixReport, DEFAULT_TAIL_TOL,
};
use mixorder::mixing::{majorization_trace, trace};
use mixorder::orders::{compare_with, enumerate_down_sets, is_monotone_with, DownSet};
use mixorder::spectral::{relaxation_time, slem, spectrum_reversible};
use mixorder::{Error, Kernel, Pmf, Poset};
use serde_json::json;

use crate::format::sig;
use crate::spec::{parse_pmf, Chain};
use crate::Failure;

pub const METRICS: [&str; 7] = ["tv", "sep", "l2", "linf", "hellinger", "kl_fwd", "kl_rev"];

fn need_bd(chain: &Chain, what: &str) -> Result<mixorder::chains::BdParams, Failure> {
    chain
        .bd
        .clone()
        .ok_or_else(|| Failure::Validation(format!("{what} needs a birth-and-death chain")))
}

pub fn build(chain: &Chain, tol: f64, cap: usize) -> Result<String, Failure> {
    let ideals = enumerate_down_sets(&chain.poset, cap)?;
    let mut doc = json!({
        "kind": "raw",
        "matrix": chain.kernel.rows(),
        "stationary": chain.pi.weights(),
        "monotone": is_monotone_with(&chain.kernel, &chain.poset, &ideals, tol),
        "reversible": chain.kernel.is_reversible(&chain.pi),
    });
    if let Some(bd) = &chain.bd {
        doc["birth_death"] = json!({ "q": bd.q(), "r": bd.r(), "p": bd.p() });
    }
    if let Some(t) = chain.optimum {
        doc["tmix"] = json!(t);
    }
    let mut out = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Numerical(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

pub fn parse_start(start: &str, size: usize, pi: &Pmf) -> Result<Pmf, Failure> {
    if start == "pi" {
        return Ok(pi.clone());
    }
    match start.parse::<usize>() {
        Ok(i) if i < size => Ok(Pmf::point_mass(size, i)),
        Ok(i) => Err(Failure::Validation(format!("start state {i} outside 0..{size}"))),
        Err(_) => Err(Failure::Validation(format!("start must be a state index or \"pi\", got {start:?}"))),
    }
}

pub fn parse_metrics(list: &str) -> Result<Vec<&'static str>, Failure> {
    let wanted: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if let Some(bad) = wanted.iter().find(|m| !METRICS.contains(m)) {
        return Err(Failure::Validation(format!(
            "unknown metric {bad:?}; choose from {}",
            METRICS.join(",")
        )));
    }
    if wanted.is_empty() {
        return Err(Failure::Validation("no metrics selected".into()));
    }
    Ok(METRICS.iter().copied().filter(|m| wanted.contains(m)).collect())
}

pub fn trace_csv(chain: &Chain, init: &Pmf, horizon: usize, metrics: &[&str], precision: usize) -> Result<String, Failure> {
    let tr = trace(&chain.kernel, init, horizon)?;
    let mut out = String::from("t");
    for m in metrics {
        out.push(',');
        out.push_str(m);
    }
    out.push('\n');
    for row in &tr.rows {
        write!(out, "{}", row.t).unwrap();
        for m in metrics {
            let v = match *m {
                "tv" => row.tv,
                "sep" => row.sep,
                "l2" => row.l2,
                "linf" => row.linf,
                "hellinger" => row.hellinger,
                "kl_fwd" => row.kl_pi_rho,
                _ => row.kl_rho_pi,
            };
            write!(out, ",{}", sig(v, precision)).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn fmt_set(d: &DownSet) -> String {
    let items: Vec<String> = d.indices().iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

pub fn compare(a: &Chain, b: &Chain, poset: &Poset, tol: f64, cap: usize, precision: usize) -> Result<String, Failure> {
    if a.kernel.size() != b.kernel.size() {
        return Err(Error::DimensionMismatch {
            expected: a.kernel.size(),
            found: b.kernel.size(),
        }
        .into());
    }
    if a.pi.max_abs_diff(&b.pi) > tol {
        return Err(Failure::Validation(format!(
            "stationary distributions differ by {}",
            sig(a.pi.max_abs_diff(&b.pi), 3)
        )));
    }
    let ideals = enumerate_down_sets(poset, cap)?;
    let ab = compare_with(&a.kernel, &b.kernel, &a.pi, &ideals, tol)?;
    let ba = compare_with(&b.kernel, &a.kernel, &a.pi, &ideals, tol)?;
    let verdict = match (ab.holds, ba.holds) {
        (true, true) => "equal",
        (true, false) => "A<=B",
        (false, true) => "B<=A",
        (false, false) => "incomparable",
    };
    let mut out = format!("{verdict}\n");
    for (name, rep) in [("A<=B", &ab), ("B<=A", &ba)] {
        writeln!(
            out,
            "{name} worst_violation {} witness D={} E={}",
            sig(rep.worst_violation, precision),
            fmt_set(&rep.witness.0),
            fmt_set(&rep.witness.1)
        )
        .unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TmixMethod {
    Closed,
    FirstStep,
    MonteCarlo,
}

fn report_lines(out: &mut String, label: &str, rep: &TmixReport) {
    writeln!(out, "{label} {:.6}", rep.value).unwrap();
    if let Some(se) = rep.se {
        writeln!(out, "se {se:.6}").unwrap();
    }
    if let Some(v) = rep.halting_violations {
        writeln!(out, "halting_violations {v}").unwrap();
    }
}

pub fn tmix(chain: &Chain, method: Option<TmixMethod>, samples: u64, seed: u64) -> Result<String, Failure> {
    if !chain.kernel.is_irreducible() {
        return Err(Error::Reducible("mixing time needs an irreducible chain".into()).into());
    }
    let method = method.unwrap_or(if chain.bd.is_some() {
        TmixMethod::Closed
    } else {
        TmixMethod::FirstStep
    });
    let closed = match &chain.bd {
        Some(bd) => Some(tmix_closed(bd, &chain.pi)?),
        None => None,
    };
    let mut out = String::new();
    match method {
        TmixMethod::Closed => {
            let Some(rep) = closed.clone() else {
                return Err(Failure::Validation("closed form needs a birth-and-death chain".into()));
            };
            writeln!(out, "method closed_form").unwrap();
            report_lines(&mut out, "tmix", &rep);
            let check = tmix_oracle(&chain.kernel, &chain.pi, OracleMode::FirstStep)?;
            report_lines(&mut out, "first_step", &check);
        }
        TmixMethod::FirstStep => {
            let rep = tmix_oracle(&chain.kernel, &chain.pi, OracleMode::FirstStep)?;
            writeln!(out, "method first_step").unwrap();
            report_lines(&mut out, "tmix", &rep);
            if let Some(c) = &closed {
                report_lines(&mut out, "closed_form", c);
            }
        }
        TmixMethod::MonteCarlo => {
            let rep = tmix_oracle(&chain.kernel, &chain.pi, OracleMode::MonteCarlo { samples, seed })?;
            writeln!(out, "method monte_carlo").unwrap();
            report_lines(&mut out, "tmix", &rep);
            writeln!(out, "samples {samples}\nseed {seed}").unwrap();
            match &closed {
                Some(c) => report_lines(&mut out, "closed_form", c),
                None => report_lines(
                    &mut out,
                    "first_step",
                    &tmix_oracle(&chain.kernel, &chain.pi, OracleMode::FirstStep)?,
                ),
            }
        }
    }
    if let Some(t) = chain.optimum {
        writeln!(out, "optimum {t:.6}").unwrap();
    }
    Ok(out)
}

pub fn dual(chain: &Chain, horizon: Option<usize>, precision: usize) -> Result<String, Failure> {
    let bd = need_bd(chain, "the dual")?;
    let d = ssd_dual(&bd, &chain.pi)?;
    let mut out = String::new();
    match horizon {
        Some(h) => {
            out.push_str("t,survival\n");
            for (t, s) in dual_survival(&d, h).iter().enumerate() {
                writeln!(out, "{t},{}", sig(*s, precision)).unwrap();
            }
        }
        None => {
            out.push_str("i,q_star,r_star,p_star\n");
            for (i, r) in d.r_star().iter().enumerate() {
                writeln!(
                    out,
                    "{i},{},{},{}",
                    sig(d.q_star[i], precision),
                    sig(*r, precision),
                    sig(d.p_star[i], precision)
                )
                .unwrap();
            }
        }
    }
    Ok(out)
}

pub fn spectrum(chain: &Chain, precision: usize) -> Result<String, Failure> {
    let spec = spectrum_reversible(&chain.kernel, &chain.pi)?;
    let mut out = String::new();
    let s = slem(&chain.kernel, &chain.pi)?;
    writeln!(out, "slem {}", sig(s, precision)).unwrap();
    writeln!(out, "relaxation_time {}", sig(relaxation_time(&chain.kernel, &chain.pi)?, precision)).unwrap();
    out.push_str("k,eigenvalue\n");
    for (k, l) in spec.eigenvalues.iter().enumerate() {
        writeln!(out, "{k},{}", sig(*l, precision)).unwrap();
    }
    Ok(out)
}

pub const SUITES: [&str; 7] = [
    "stationary",
    "reversible",
    "monotone",
    "below_identity",
    "above_trivial",
    "uniform_fastest",
    "sep_sum",
];

pub enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn run_suite(name: &str, chain: &Chain, ideals: &[DownSet], tol: f64, horizon: usize) -> Result<Outcome, Failure> {
    let k = &chain.kernel;
    let pi = &chain.pi;
    Ok(match name {
        "stationary" => {
            let r = k.stationary_residual(pi);
            check(r <= tol, format!("residual {}", sig(r, 3)))
        }
        "reversible" => {
            let d = k.reversibility_defect(pi);
            check(d <= tol, format!("defect {}", sig(d, 3)))
        }
        "monotone" => check(is_monotone_with(k, &chain.poset, ideals, tol), format!("{} down-sets", ideals.len())),
        "below_identity" => {
            let rep = compare_with(k, &Kernel::identity(k.size()), pi, ideals, tol)?;
            check(rep.holds, format!("worst violation {}", sig(rep.worst_violation, 3)))
        }
        "above_trivial" => {
            let rep = compare_with(&Kernel::trivial(pi), k, pi, ideals, tol)?;
            check(rep.holds, format!("worst violation {}", sig(rep.worst_violation, 3)))
        }
        "uniform_fastest" => {
            let uniform = Pmf::uniform(k.size());
            if chain.bd.is_none() || k.size() < 2 || pi.max_abs_diff(&uniform) > tol {
                return Ok(Outcome::Skip("needs a birth-and-death chain with uniform pi".into()));
            }
            let fastest = uniform_chain(k.size() - 1)?;
            let ok = majorization_trace(k, &fastest, &Pmf::point_mass(k.size(), 0), horizon)?;
            let first_bad = ok.iter().position(|b| !b);
            check(
                first_bad.is_none(),
                match first_bad {
                    Some(t) => format!("fails at t={t}"),
                    None => format!("t<={horizon}"),
                },
            )
        }
        "sep_sum" => {
            let Some(bd) = &chain.bd else {
                return Ok(Outcome::Skip("needs a birth-and-death chain".into()));
            };
            if let Some(i) = bd.unit_sum_violation(1e-12) {
                return Ok(Outcome::Skip(format!("q_(i+1) + p_i != 1 at index {i}")));
            }
            if !bd.is_monotone() || !bd.is_ergodic() {
                return Ok(Outcome::Skip("needs a monotone ergodic chain".into()));
            }
            let s = sep_sum(bd, pi, DEFAULT_TAIL_TOL)?;
            let t = tmix_closed(bd, pi)?.value;
            let rel = (s - t).abs() / t.max(1.0);
            check(rel <= 1e-8, format!("sum {} vs tmix {}", sig(s, 9), sig(t, 9)))
        }
        other => {
            return Err(Failure::Validation(format!(
                "unknown suite {other:?}; choose from {}",
                SUITES.join(",")
            )))
        }
    })
}

/// Runs the named suites; returns the report and whether none failed.
pub fn verify(chain: &Chain, suites: &[String], tol: f64, cap: usize, horizon: usize) -> Result<(String, bool), Failure> {
    let ideals = enumerate_down_sets(&chain.poset, cap)?;
    let names: Vec<&str> = if suites.is_empty() {
        SUITES.to_vec()
    } else {
        suites.iter().map(String::as_str).collect()
    };
    let mut out = String::new();
    let mut all_ok = true;
    for name in names {
        let (tag, detail) = match run_suite(name, chain, &ideals, tol, horizon)? {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                all_ok = false;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        writeln!(out, "{name} {tag} {detail}").unwrap();
    }
    Ok((out, all_ok))
}

/// Stationary pmf for `optimize`: an explicit vector wins over the spec's.
pub fn target_pi(chain: Option<&Chain>, pi: Option<&[f64]>) -> Result<Pmf, Failure> {
    match (pi, chain) {
        (Some(w), _) => Ok(parse_pmf(w)?),
        (None, Some(c)) => Ok(c.pi.clone()),
        (None, None) => Err(Failure::Validation("optimize needs --pi or a chain spec".into())),
    }
}
