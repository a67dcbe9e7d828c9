use std::sync::Arc;

use cakecut::classes;
use cakecut::generate;
use cakecut::oracle;
use cakecut::rational::to_f64;
use cakecut::simplex::KuhnTriangulation;
use cakecut::sperner::{self, check_sperner, fully_labeled, happy_sets, label_vertex, SolveOptions, SpernerCheck};
use cakecut::two_agent;
use cakecut::valuation::{equity_gap, ValuationFn};
use cakecut::{AdditiveInstance, GlobalInstance, Rational, SolveStatus, Valuations};
use num_traits::Signed;

fn max_abs(inst: &AdditiveInstance) -> f64 {
    to_f64(&inst.max_abs_density())
}

#[test]
fn odd_parity_up_to_four_agents() {
    for seed in 0..12u64 {
        let n = 2 + (seed % 3) as usize;
        let nonneg = generate::nonnegative(seed, n, 5);
        let ordered = generate::value_ordered(seed, n, 5);
        for inst in [nonneg, ordered] {
            for m in [1u64, 3, 8, 16, 32] {
                if n == 4 && m > 16 {
                    continue;
                }
                assert_eq!(check_sperner(&inst, m).unwrap(), SpernerCheck::Ok, "seed {seed} m {m}");
                assert_eq!(fully_labeled(&inst, m).unwrap().len() % 2, 1, "seed {seed} m {m}");
            }
        }
    }
    let inst = generate::nonnegative(99, 4, 4);
    assert_eq!(fully_labeled(&inst, 32).unwrap().len() % 2, 1);
}

#[test]
fn labels_depend_only_on_the_cutset() {
    for seed in 0..5u64 {
        let inst = generate::nonnegative(seed, 3, 6);
        let coarse = KuhnTriangulation::new(3, 8).unwrap();
        for p in coarse.vertices() {
            let x = p.to_cutset();
            let label = label_vertex(&inst, &x).unwrap();
            for scale in [2u64, 4] {
                let q = cakecut::simplex::GridPoint::new(
                    p.coords().iter().map(|k| k * scale).collect(),
                    8 * scale,
                )
                .unwrap();
                assert_eq!(label_vertex(&inst, &q.to_cutset()).unwrap(), label);
            }
            let h = happy_sets(&inst, &x).unwrap();
            assert_eq!(h.happier.iter().filter(|&&i| i == h.happiest.0).count(), 1);
            assert!(h.happier.iter().all(|i| h.happy.contains(i)));
            assert_eq!(h.happiest.0, h.happier[0]);
        }
    }
}

#[test]
fn barycenter_gap_shrinks_within_the_continuity_band() {
    for seed in 0..6u64 {
        let inst = generate::nonnegative(40 + seed, 3, 6);
        let l = max_abs(&inst);
        let mut previous: Option<(u64, f64)> = None;
        for m in [8u64, 16, 32, 64] {
            let opts = SolveOptions { eps: 1e-12, m0: m, mmax: m };
            let report = sperner::solve(&inst, &opts).unwrap();
            let gap = to_f64(report.levels[0].barycenter_gap.as_ref().unwrap());
            // every barycenter lies within the cell diameter of an equitable point
            assert!(gap <= 4.0 * l * 2.0 / (3.0 * m as f64) + 1e-12, "seed {seed} m {m}: {gap}");
            if let Some((pm, pg)) = previous {
                let band = l * 2f64.sqrt() * 2.0 / pm as f64;
                assert!(gap <= pg + band, "seed {seed}: {gap} > {pg} + {band}");
            }
            previous = Some((m, gap));
        }
    }
}

#[test]
fn converged_reports_are_self_consistent() {
    for seed in 0..8u64 {
        let inst = generate::nonnegative(60 + seed, 3 + (seed % 2) as usize, 5);
        let opts = SolveOptions { eps: 1e-6, m0: 8, mmax: 128 };
        let report = sperner::solve(&inst, &opts).unwrap();
        assert!(report.is_converged());
        let best = report.best.as_ref().unwrap();
        assert_eq!(best.values, inst.evaluate(&best.cutset).unwrap());
        assert_eq!(best.gap, equity_gap(&best.values).unwrap());
        assert!(to_f64(&best.gap) <= 1e-6);
        let counts = report.fully_labeled_counts();
        assert!(counts.iter().all(|&(_, c)| c % 2 == 1));
        // sanity band against the coarse grid
        let grid = oracle::min_gap_grid(&inst, opts.m0).unwrap();
        assert!(best.gap <= grid.gap);
    }
}

#[test]
fn global_mode_budget_and_convergence() {
    let vals: Vec<ValuationFn> = vec![
        Arc::new(|x: &[f64]| x[0].sqrt()),
        Arc::new(|x: &[f64]| (1.0 + x[1]).ln() * (1.0 + x[0])),
        Arc::new(|x: &[f64]| x[2] * x[2] + x[2]),
    ];
    let inst = GlobalInstance::new(vals).unwrap();
    let tight = sperner::solve(&inst, &SolveOptions { eps: 1e-300, m0: 4, mmax: 8 }).unwrap();
    assert_eq!(tight.status, SolveStatus::BudgetExhausted);
    assert_eq!(tight.resolution_reached, 8);
    assert!(tight.best.is_some());
    let report = sperner::solve(&inst, &SolveOptions { eps: 1e-6, m0: 8, mmax: 1024 }).unwrap();
    assert!(report.is_converged(), "{:?}", report.levels);
    let best = report.best.unwrap();
    assert!(equity_gap(&inst.evaluate(&best.cutset).unwrap()).unwrap() <= 1e-6);

    let bad: Vec<ValuationFn> = vec![Arc::new(|_: &[f64]| 1.0), Arc::new(|x: &[f64]| x[1])];
    assert!(GlobalInstance::new(bad).is_err());
}

#[test]
fn value_ordered_instances_are_never_falsified() {
    for seed in 0..15u64 {
        let inst = generate::value_ordered(200 + seed, 3, 5);
        assert!(classes::is_value_ordered(&inst));
        for m in [5u64, 12, 32] {
            assert_eq!(classes::sann_falsify(&inst, m).unwrap(), None, "seed {seed} m {m}");
        }
        for x in generate::cutsets(seed, 3, 50) {
            assert!(classes::prefix_bound_check(&inst, &x).unwrap());
        }
    }
}

#[test]
fn identical_and_single_peaked_families() {
    for seed in 0..25u64 {
        let inst = generate::identical(seed, 4, 6);
        assert!(classes::is_identical(&inst));
        assert!(classes::is_value_ordered(&inst));
        let d = generate::single_peaked_density(seed, 6);
        assert!(classes::is_single_peaked(&d));
        if !d.total().is_negative() {
            let p = classes::split_profile(&d).unwrap();
            assert!(p.l <= p.theta && p.theta <= p.r);
            assert!(p.sign_property_holds(&d));
        }
    }
}

#[test]
fn split_cake_threshold_order_solves() {
    for seed in 0..10u64 {
        let inst = generate::split_cake(300 + seed, 3, 5);
        for d in inst.densities() {
            let p = classes::split_profile(d).unwrap();
            assert!(p.sign_property_holds(d));
        }
        let pi = classes::sann_permutation_split_cake(&inst).unwrap();
        let ordered = inst.permute(&pi).unwrap();
        let report = sperner::solve(&ordered, &SolveOptions { eps: 1e-6, m0: 8, mmax: 256 }).unwrap();
        assert!(report.is_converged(), "seed {seed}: {:?}", report.status);
    }
}

#[test]
fn bisection_matches_simplex_solver_for_two_agents() {
    for seed in 0..50u64 {
        let inst = generate::positive(seed, 2, 6);
        let eps = 1e-6;
        let bis = two_agent::solve_two(&inst, eps).unwrap();
        let simplex = sperner::solve(&inst, &SolveOptions { eps, m0: 8, mmax: 1024 }).unwrap();
        assert!(simplex.is_converged());
        let t_simplex = &simplex.best_cutset().unwrap().parts()[0];
        assert!(to_f64(&(t_simplex - &bis.t)).abs() <= 2.0 * eps, "seed {seed}");
        for (a, b) in bis.values.iter().zip(simplex.values().unwrap()) {
            assert!(to_f64(&(a - b)).abs() <= 2.0 * eps * max_abs(&inst), "seed {seed}");
        }
    }
}

#[test]
fn grid_oracle_is_monotone_along_divisors() {
    for seed in 0..4u64 {
        let inst = generate::nonnegative(seed, 3, 4);
        let g = |m| oracle::min_gap_grid(&inst, m).unwrap().gap;
        let (g5, g10, g30) = (g(5), g(10), g(30));
        assert!(g10 <= g5 && g30 <= g10);
    }
}

#[test]
fn sanp_orientation() {
    for seed in 0..5u64 {
        let inst = generate::nonnegative(seed, 3, 4);
        let neg = inst.negate();
        let opts = SolveOptions::default();
        let a = sperner::solve(&inst, &opts).unwrap();
        let b = sperner::solve_sanp(&neg, &opts).unwrap();
        assert_eq!(a.best_cutset(), b.best_cutset());
        let flipped: Vec<Rational> = a.values().unwrap().iter().map(|v| -v).collect();
        assert_eq!(b.values().unwrap(), flipped.as_slice());
        assert_eq!(neg.evaluate(b.best_cutset().unwrap()).unwrap(), flipped);
    }
}
