mod common;

use mixorder::orders::{compare_with, enumerate_down_sets, has_positive_correlations, is_monotone, DEFAULT_TOL};
use mixorder::structures::{
    class_update_kernel, doubly_stochastic_sample, is_monotone_system, scan_kernels, spin_site_kernel,
    PermutationSpace, SpinSpace,
};
use mixorder::{Kernel, Pmf, Poset};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn shuffle_kernels_monotone_and_below_identity() {
    for n in 2..=4 {
        let space = PermutationSpace::new(n).unwrap();
        let bruhat = space.bruhat_poset().unwrap();
        let ideals = enumerate_down_sets(&bruhat, 10_000).unwrap();
        for x in 0..space.len() {
            for y in 0..space.len() {
                if bruhat.lt(x, y) {
                    assert!(space.inv(x) < space.inv(y));
                }
            }
        }
        for p in [0.3, 0.5, 0.7] {
            for i in 1..n {
                let k = space.shuffle_site_kernel(i, p).unwrap();
                let pi = space.shuffle_stationary(p).unwrap();
                assert!(is_monotone(&k, &bruhat, DEFAULT_TOL).unwrap());
                let id = Kernel::identity(space.len());
                assert!(compare_with(&k, &id, &pi, &ideals, DEFAULT_TOL).unwrap().holds);
            }
        }
    }
}

#[test]
fn censoring_never_speeds_up() {
    let grid = SpinSpace::grid(2, 2, 2).unwrap();
    let ideals = enumerate_down_sets(&grid.poset(), 1000).unwrap();
    let pi = grid.ising_pmf(0.7).unwrap();
    let site: Vec<Kernel> = (0..4).map(|v| spin_site_kernel(&grid, &pi, v).unwrap()).collect();
    let sequences: [&[usize]; 5] = [&[0, 1], &[2, 2], &[0, 3, 1], &[3, 1, 0, 2], &[1, 1, 2, 0]];
    for seq in sequences {
        let full = Kernel::product(&seq.iter().map(|&v| site[v].clone()).collect::<Vec<_>>()).unwrap();
        for skip in 0..seq.len() {
            let kept: Vec<Kernel> = seq
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != skip)
                .map(|(_, &v)| site[v].clone())
                .collect();
            let censored = Kernel::product(&kept).unwrap();
            assert!(compare_with(&full, &censored, &pi, &ideals, DEFAULT_TOL).unwrap().holds, "{seq:?} skip {skip}");
        }
    }
}

/// Reverse bound: `nu` random-scan steps sit below the mixture of one
/// systematic sweep (with the probability the random scan replays it) and
/// the identity. Experimental; checked on the 2x2 system only.
#[test]
fn random_scan_power_below_systematic_mixture() {
    let grid = SpinSpace::grid(2, 2, 2).unwrap();
    let ideals = enumerate_down_sets(&grid.poset(), 1000).unwrap();
    for beta in [0.3, 1.0] {
        let pi = grid.ising_pmf(beta).unwrap();
        let order = [0, 1, 2, 3];
        let (syst, rand) = scan_kernels(&grid, &pi, &order, None).unwrap();
        let replay = 0.25f64.powi(4);
        let bound = Kernel::mixture(replay, &Kernel::identity(16), &syst).unwrap();
        assert!(compare_with(&rand.pow(4), &bound, &pi, &ideals, DEFAULT_TOL).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn site_conditionals_have_positive_correlations(seed in any::<u64>(), beta in 0.0f64..1.5) {
        let grid = SpinSpace::grid(2, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poset = grid.poset();
        for pi in [grid.ising_pmf(beta).unwrap(), common::random_pmf(&mut rng, 16)] {
            for v in 0..4 {
                prop_assert!(spin_site_kernel(&grid, &pi, v).is_ok());
                for class in grid.site_classes(v) {
                    let cond = Pmf::from_weights(&class.iter().map(|&x| pi[x]).collect::<Vec<_>>()).unwrap();
                    prop_assert!(has_positive_correlations(&cond, &poset.restrict(&class), DEFAULT_TOL).unwrap());
                }
            }
        }
        prop_assert!(is_monotone_system(&grid, &grid.ising_pmf(beta).unwrap(), 1e-12));
    }

    #[test]
    fn site_kernels_below_identity_and_scans_ordered(beta in 0.0f64..1.5, three_spins in any::<bool>()) {
        let space = if three_spins { SpinSpace::grid(1, 3, 3).unwrap() } else { SpinSpace::grid(2, 2, 2).unwrap() };
        let pi = space.ising_pmf(beta).unwrap();
        let ideals = enumerate_down_sets(&space.poset(), 100_000).unwrap();
        let id = Kernel::identity(space.len());
        for v in 0..space.sites() {
            let k = spin_site_kernel(&space, &pi, v).unwrap();
            prop_assert!(k.is_reversible(&pi));
            prop_assert!(compare_with(&k, &id, &pi, &ideals, DEFAULT_TOL).unwrap().holds);
        }
        let order: Vec<usize> = (0..space.sites()).collect();
        let (syst, rand) = scan_kernels(&space, &pi, &order, None).unwrap();
        prop_assert!(compare_with(&syst, &rand, &pi, &ideals, DEFAULT_TOL).unwrap().holds);
    }

    #[test]
    fn doubly_stochastic_below_identity(seed in any::<u64>(), size in 1usize..9, terms in 1usize..8) {
        let k = doubly_stochastic_sample(size, seed, terms).unwrap();
        prop_assert!(k.is_doubly_stochastic(1e-12));
        let line = Poset::linear(size);
        let ideals = enumerate_down_sets(&line, 100).unwrap();
        let rep = compare_with(&k, &Kernel::identity(size), &Pmf::uniform(size), &ideals, DEFAULT_TOL).unwrap();
        prop_assert!(rep.holds);
    }
}

#[test]
fn class_kernel_error_names_class() {
    let poset = Poset::antichain(3);
    let classes = vec![vec![0], vec![1, 2]];
    let err = class_update_kernel(&Pmf::uniform(3), &poset, &classes, 1e-12).unwrap_err();
    assert!(err.to_string().contains("class 1"));
}
