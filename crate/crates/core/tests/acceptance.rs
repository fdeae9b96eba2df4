//! End-to-end acceptance checks. Runs without the libtest harness and
//! prints one PASS/FAIL line per criterion.

mod common;

use std::time::Instant;

use mixorder::chains::{
    fmmc_logconcave, ladder_parabolic_weights, ladder_sqrt_weights, ladder_uniform_weights,
    lw_optimal_path, lw_optimal_path_p, symmetric_bd, symmetric_bd_params, theta_closed_form,
    theta_from_sums, tmix_from_weights, uniform_chain, BdParams,
};
use mixorder::duality::{
    dual_survival, sep_sum, ssd_dual, tmix_closed, tmix_oracle, OracleMode, DEFAULT_SEED,
    DEFAULT_TAIL_TOL,
};
use mixorder::mixing::{majorization_slack_trace, sep_trace, trace};
use mixorder::orders::{compare, compare_with, enumerate_down_sets, DEFAULT_DOWNSET_CAP};
use mixorder::spectral::{biased_rw_spectrum, dense_spectrum, slem, spectrum_reversible};
use mixorder::structures::{
    doubly_stochastic_sample, scan_kernels, spin_site_kernel, PermutationSpace, SpinSpace,
};
use mixorder::{Kernel, Pmf, Poset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(20_240_101);
    r.set_stream(stream);
    r
}

fn uniform_tmix(p: &[f64]) -> f64 {
    let pi = Pmf::uniform(p.len() + 1);
    let w: Vec<f64> = p.iter().map(|x| x * pi[0]).collect();
    tmix_from_weights(&pi.cut_products(), &w)
}

fn path_majorization() -> Outcome {
    let mut r = rng(1);
    let mut worst = f64::INFINITY;
    for case in 0..200 {
        let n = 2 + case % 7;
        let p = random_p(&mut r, n);
        let k = symmetric_bd(&p).map_err(|e| e.to_string())?;
        let u = uniform_chain(n).unwrap();
        let slack = majorization_slack_trace(&k, &u, &Pmf::point_mass(n + 1, 0), 200)
            .map_err(|e| e.to_string())?;
        let m = slack.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.min(m);
        ensure(m >= -TOL, || format!("case {case}: slack {m:e} with p={p:?}"))?;
    }
    Ok(format!("200 chains, min slack {worst:.2e}"))
}

fn random_p(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    common::random_symmetric_p(r, n)
}

fn product_preservation() -> Outcome {
    let mut r = rng(2);
    for case in 0..100 {
        let n = 1 + case % 6;
        let pi = common::random_pmf(&mut r, n + 1);
        let line = Poset::linear(n + 1);
        let ideals = enumerate_down_sets(&line, DEFAULT_DOWNSET_CAP).unwrap();
        let pairs: Vec<(Kernel, Kernel)> = (0..4)
            .map(|_| {
                let (k, l) = common::random_monotone_pair(&mut r, &pi);
                (k.kernel(), l.kernel())
            })
            .collect();
        let (k, l) = &pairs[0];
        ensure(compare_with(k, l, &pi, &ideals, TOL).unwrap().holds, || {
            format!("case {case}: generated pair not ordered")
        })?;
        for t in 1..=6 {
            let rep = compare_with(&k.pow(t), &l.pow(t), &pi, &ideals, TOL).unwrap();
            ensure(rep.holds, || format!("case {case}: K^{t} vs L^{t} violation {:e}", rep.worst_violation))?;
        }
        for t in 1..=4 {
            let ks: Vec<Kernel> = pairs[..t].iter().map(|p| p.0.clone()).collect();
            let ls: Vec<Kernel> = pairs[..t].iter().map(|p| p.1.clone()).collect();
            let rep = compare_with(
                &Kernel::product(&ks).unwrap(),
                &Kernel::product(&ls).unwrap(),
                &pi,
                &ideals,
                TOL,
            )
            .unwrap();
            ensure(rep.holds, || format!("case {case}: mixed product t={t} violation {:e}", rep.worst_violation))?;
        }
    }
    Ok("100 pairs, powers t<=6, mixed products t<=4".into())
}

fn ssd_identity() -> Outcome {
    let u = BdParams::from_kernel(&uniform_chain(2).unwrap()).unwrap();
    let d = ssd_dual(&u, &Pmf::uniform(3)).map_err(|e| e.to_string())?;
    let s = dual_survival(&d, 2);
    ensure((s[0] - 1.0).abs() < TOL && (s[1] - 1.0).abs() < TOL && (s[2] - 0.25).abs() < TOL, || {
        format!("uniform n=2 survival {s:?}")
    })?;
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = 1 + case % 8;
        let bd = common::random_unit_sum_chain(&mut r, n);
        let pi = bd.stationary().unwrap();
        let dual = ssd_dual(&bd, &pi).map_err(|e| format!("case {case}: {e}"))?;
        let surv = dual_survival(&dual, 500);
        let sep = sep_trace(&bd.kernel(), &Pmf::point_mass(n + 1, 0), 500).unwrap();
        let dev = surv.iter().zip(&sep).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(dev);
        ensure(dev <= TOL, || format!("case {case}: deviation {dev:e}"))?;
    }
    Ok(format!("100 chains, t<=500, max deviation {worst:.2e}; uniform n=2 gives (1, 1, 1/4)"))
}

fn tmix_agreement() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = 1 + case % 8;
        let pi = common::random_pmf(&mut r, n + 1);
        let bd = common::bd_from_w(common::random_monotone_w(&mut r, &pi), &pi);
        let closed = tmix_closed(&bd, &pi).unwrap().value;
        let fs = tmix_oracle(&bd.kernel(), &pi, OracleMode::FirstStep).unwrap().value;
        let rel = (closed - fs).abs();
        worst = worst.max(rel);
        ensure(rel <= 1e-8, || format!("case {case}: closed {closed} vs first-step {fs}"))?;
    }
    let u = uniform_chain(2).unwrap();
    let pi = Pmf::uniform(3);
    let closed = tmix_closed(&BdParams::from_kernel(&u).unwrap(), &pi).unwrap().value;
    ensure((closed - 8.0 / 3.0).abs() < 1e-12, || format!("uniform n=2 closed form {closed}"))?;
    let mut mc_lines = Vec::new();
    for (name, k, pi) in [
        ("uniform n=2", u.clone(), pi.clone()),
        ("optimal n=3", lw_optimal_path(3).unwrap(), Pmf::uniform(4)),
    ] {
        let exact = tmix_oracle(&k, &pi, OracleMode::FirstStep).unwrap().value;
        let mc = tmix_oracle(&k, &pi, OracleMode::MonteCarlo { samples: 1_000_000, seed: DEFAULT_SEED })
            .unwrap();
        let se = mc.se.unwrap();
        let z = (mc.value - exact) / se;
        ensure(z.abs() <= 4.0, || format!("{name}: MC {} vs {exact}, z = {z:.2}", mc.value))?;
        ensure(mc.halting_violations == Some(0), || format!("{name}: halting violations"))?;
        mc_lines.push(format!("{name} z={z:.2}"));
    }
    Ok(format!(
        "closed vs first-step max abs dev {worst:.1e} over 100 chains; uniform n=2 = 8/3; MC {}",
        mc_lines.join(", ")
    ))
}

fn sep_sum_identity() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = 1 + case % 8;
        let pi = common::random_pmf(&mut r, n + 1);
        let bd = common::bd_from_w(common::random_monotone_w(&mut r, &pi), &pi);
        let s = sep_sum(&bd, &pi, DEFAULT_TAIL_TOL).map_err(|e| format!("case {case}: {e}"))?;
        let t = tmix_closed(&bd, &pi).unwrap().value;
        worst = worst.max((s - t).abs());
        ensure((s - t).abs() <= 1e-7, || format!("case {case}: sum {s} vs T_mix {t}"))?;
    }
    Ok(format!("50 chains, max |sum sep - T_mix| = {worst:.2e}"))
}

fn theta_optimality() -> Outcome {
    let mut r = rng(6);
    let t3 = uniform_tmix(&lw_optimal_path_p(3).unwrap());
    ensure((t3 - (2.5 + 6f64.sqrt())).abs() < 1e-10, || format!("n=3 optimum {t3}"))?;
    for n in [3usize, 5, 7] {
        let (a, b) = (theta_from_sums(n), theta_closed_form(n));
        ensure((a - b).abs() <= 1e-12, || format!("n={n}: theta {a} vs {b}"))?;
        let best = uniform_tmix(&lw_optimal_path_p(n).unwrap());
        let unif = uniform_tmix(&vec![0.5; n]);
        ensure(best < unif, || format!("n={n}: optimum {best} not below uniform {unif}"))?;
        let steps = 1_000_000;
        for s in 1..steps {
            let x = s as f64 / steps as f64;
            let p: Vec<f64> = (0..n).map(|k| if k % 2 == 0 { 1.0 - x } else { x }).collect();
            let v = uniform_tmix(&p);
            ensure(v >= best - 1e-12, || format!("n={n}: grid point {x} gives {v} < {best}"))?;
        }
        for _ in 0..200 {
            let p = common::random_feasible_p(&mut r, n);
            let v = uniform_tmix(&p);
            ensure(v >= best - 1e-12, || format!("n={n}: random p {p:?} gives {v} < {best}"))?;
        }
    }
    Ok("n in {3,5,7}: formulas agree, grid and 200 random vectors never beat optimum; n=3 gives 5/2+sqrt(6)".into())
}

fn even_uniform_optimality() -> Outcome {
    let mut r = rng(7);
    for n in [2usize, 4, 6] {
        let unif = uniform_tmix(&vec![0.5; n]);
        for _ in 0..500 {
            let p = common::random_feasible_p(&mut r, n);
            let v = uniform_tmix(&p);
            ensure(v >= unif - 1e-12, || format!("n={n}: {p:?} gives {v} < {unif}"))?;
        }
    }
    Ok("n in {2,4,6}: 500 random vectors each, none below uniform".into())
}

fn ladder_optimum() -> Outcome {
    for n in 2..=50usize {
        let sq = uniform_tmix(&ladder_sqrt_weights(n));
        let un = uniform_tmix(&ladder_uniform_weights(n));
        let pa = uniform_tmix(&ladder_parabolic_weights(n));
        let closed = (n * n * (n + 2)) as f64 / 6.0;
        // at n = 2 all three weightings are (1/2, 1/2)
        let beats = if n == 2 {
            sq <= un.min(pa) + 1e-12
        } else {
            sq < un && sq < pa
        };
        ensure(beats, || format!("n={n}: sqrt {sq}, uniform {un}, parabolic {pa}"))?;
        ensure((un - pa).abs() <= 1e-9 * un && (un - closed).abs() <= 1e-9 * un, || {
            format!("n={n}: uniform {un}, parabolic {pa}, n^2(n+2)/6 = {closed}")
        })?;
    }
    for n in 2..=8usize {
        let k = symmetric_bd(&ladder_uniform_weights(n)).unwrap();
        let fs = tmix_oracle(&k, &Pmf::uniform(n + 1), OracleMode::FirstStep).unwrap().value;
        let closed = (n * n * (n + 2)) as f64 / 6.0;
        ensure((fs - closed).abs() < 1e-8 * closed, || format!("n={n}: first-step {fs} vs {closed}"))?;
    }
    let n = 400usize;
    let ratio = uniform_tmix(&ladder_sqrt_weights(n)) / (n as f64).powi(3);
    let target = std::f64::consts::PI.powi(2) / 64.0;
    let rel = (ratio - target).abs() / target;
    ensure(rel <= 0.02, || format!("n=400: T/n^3 = {ratio}, target {target}"))?;
    Ok(format!("n=3..50 strict ordering, n=2 all equal; uniform = parabolic = n^2(n+2)/6; n=400 T/n^3 = {ratio:.5} ({:.2}% off)", 100.0 * rel))
}

fn slem_results() -> Outcome {
    let mut worst: f64 = 0.0;
    for rho in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for n in 1..=50usize {
            let k = mixorder::chains::biased_rw(rho, n).unwrap();
            let pi = k.stationary().unwrap();
            let closed = biased_rw_spectrum(rho, n);
            for numeric in [dense_spectrum(&k, &pi), spectrum_reversible(&k, &pi)] {
                let numeric = numeric.map_err(|e| e.to_string())?;
                let dev = closed
                    .eigenvalues
                    .iter()
                    .zip(&numeric.eigenvalues)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(dev);
                ensure(dev <= 1e-8, || format!("rho={rho} n={n}: deviation {dev:e}"))?;
            }
        }
    }
    let mut r = rng(9);
    for case in 0..500 {
        let n = 1 + case % 6;
        let p = random_p(&mut r, n);
        let bd = symmetric_bd_params(&p).unwrap();
        let pi = Pmf::uniform(n + 1);
        let s = slem(&bd.kernel(), &pi).map_err(|e| format!("case {case}: {e}"))?;
        let s0 = slem(&uniform_chain(n).unwrap(), &pi).unwrap();
        ensure(s >= s0 - 1e-12, || format!("case {case}: slem {s} < uniform {s0} for {p:?}"))?;
    }
    Ok(format!("closed-form spectra max dev {worst:.1e}; uniform minimal over 500 kernels"))
}

fn censoring_suite() -> Outcome {
    let grid = SpinSpace::grid(2, 2, 2).unwrap();
    let poset = grid.poset();
    let ideals = enumerate_down_sets(&poset, DEFAULT_DOWNSET_CAP).unwrap();
    let id16 = Kernel::identity(16);
    for beta in [0.2, 0.5, 1.0] {
        let pi = grid.ising_pmf(beta).unwrap();
        for v in 0..4 {
            let k = spin_site_kernel(&grid, &pi, v).map_err(|e| e.to_string())?;
            let rep = compare_with(&k, &id16, &pi, &ideals, TOL).unwrap();
            ensure(rep.holds, || format!("Ising beta={beta} site {v}: {:e}", rep.worst_violation))?;
        }
        let (syst, rand) = scan_kernels(&grid, &pi, &[0, 1, 2, 3], None).unwrap();
        let rep = compare_with(&syst, &rand, &pi, &ideals, TOL).unwrap();
        ensure(rep.holds, || format!("scan beta={beta}: {:e}", rep.worst_violation))?;
    }
    let mut ideal_counts = Vec::new();
    for n in [3usize, 4] {
        let space = PermutationSpace::new(n).unwrap();
        let bruhat = space.bruhat_poset().unwrap();
        let ideals = enumerate_down_sets(&bruhat, DEFAULT_DOWNSET_CAP).unwrap();
        ideal_counts.push(ideals.len());
        let id = Kernel::identity(space.len());
        for p in [0.3, 0.5, 0.7] {
            for i in 1..n {
                let k = space.shuffle_site_kernel(i, p).unwrap();
                let pi = space.shuffle_stationary(p).unwrap();
                let rep = compare_with(&k, &id, &pi, &ideals, TOL).unwrap();
                ensure(rep.holds, || format!("S_{n} p={p} i={i}: {:e}", rep.worst_violation))?;
            }
        }
    }
    let mut r = rng(10);
    for case in 0..200u64 {
        let size = r.gen_range(2..=8usize);
        let terms = r.gen_range(1..=6usize);
        let k = doubly_stochastic_sample(size, 1000 + case, terms).unwrap();
        let rep = compare(&k, &Kernel::identity(size), &Pmf::uniform(size), &Poset::linear(size), TOL).unwrap();
        ensure(rep.holds, || format!("doubly stochastic case {case}: {:e}", rep.worst_violation))?;
    }
    Ok(format!(
        "Ising beta in {{0.2,0.5,1.0}} and scans; S3/S4 ({} / {} ideals); 200 doubly stochastic",
        ideal_counts[0], ideal_counts[1]
    ))
}

fn distance_orderings() -> Outcome {
    let mut r = rng(11);
    for case in 0..50 {
        let n = 1 + case % 8;
        let pi = common::random_pmf(&mut r, n + 1);
        let (k, l) = common::random_monotone_pair(&mut r, &pi);
        let start = Pmf::point_mass(n + 1, 0);
        let a = trace(&k.kernel(), &start, 500).unwrap();
        let b = trace(&l.kernel(), &start, 500).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            ensure(x.tv <= y.tv + TOL && x.sep <= y.sep + TOL && x.l2 <= y.l2 + TOL, || {
                format!("pair case {case} t={}: tv {} / {}, sep {} / {}, l2 {} / {}", x.t, x.tv, y.tv, x.sep, y.sep, x.l2, y.l2)
            })?;
        }
    }
    for case in 0..50 {
        let n = 1 + case % 8;
        let pi = common::random_log_concave(&mut r, n + 1);
        let k = fmmc_logconcave(&pi).unwrap().kernel();
        let fast = sep_trace(&k, &Pmf::point_mass(n + 1, 0), 500).unwrap();
        let slow = sep_trace(&uniform_chain(n).unwrap(), &Pmf::point_mass(n + 1, 0), 500).unwrap();
        for (t, (x, y)) in fast.iter().zip(&slow).enumerate() {
            ensure(*x <= y + TOL, || format!("log-concave case {case} t={t}: {x} > {y}"))?;
        }
    }
    Ok("50 ordered pairs (tv, sep, l2) and 50 log-concave chains vs uniform (sep), t<=500".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("path majorization", path_majorization),
        ("product preservation", product_preservation),
        ("strong stationary dual identity", ssd_identity),
        ("mixing time triple agreement", tmix_agreement),
        ("separation sum identity", sep_sum_identity),
        ("odd-n alternating optimum", theta_optimality),
        ("even-n uniform optimum", even_uniform_optimality),
        ("ladder optimum", ladder_optimum),
        ("SLEM results", slem_results),
        ("censoring suite", censoring_suite),
        ("distance orderings", distance_orderings),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
