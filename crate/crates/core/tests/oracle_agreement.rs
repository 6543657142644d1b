//! Closed forms against the truncated chain on a fixed parameter grid.

mod common;

use approx::assert_abs_diff_eq;
use common::{exact_f02_prime, params, rel, solve, GRID};
use prioq_core::analytic::{
    boundary_values, mean_length_class2, mean_lengths, pgf_f1, pgf_f2, pgf_joint, server_occupancy,
    L2Route,
};
use prioq_core::ctmc::{marginal_distributions, metrics, pgf_partial_sums};

#[test]
fn occupancy_matches_chain() {
    for (l1, l2, mu) in GRID {
        let p = params(l1, l2, mu);
        let a = server_occupancy(&p).unwrap();
        assert_eq!(a.p_class1, l1 / mu);
        assert_eq!(a.p_class2, l2 / mu);
        assert!((a.p_free - (1.0 - p.rho())).abs() <= 2.0 * f64::EPSILON);
        let c = metrics(&solve(&p).solution);
        assert_abs_diff_eq!(c.occupancy.p_free, a.p_free, epsilon = 1e-8);
        assert_abs_diff_eq!(c.occupancy.p_class1, a.p_class1, epsilon = 1e-8);
        assert_abs_diff_eq!(c.occupancy.p_class2, a.p_class2, epsilon = 1e-8);
    }
}

#[test]
fn mean_lengths_match_chain() {
    for (l1, l2, mu) in GRID {
        let p = params(l1, l2, mu);
        let c = metrics(&solve(&p).solution);
        let l1_formula = l1 * (mu + l2) / (mu * (mu - l1));
        let rho = p.rho();
        let a = mean_lengths(&p).unwrap();
        assert!(rel(a.l1, l1_formula) < 1e-12);
        assert!(rel(c.l1, l1_formula) < 1e-6, "{:?}", (l1, l2, mu));
        assert!(rel(c.l_total, rho / (1.0 - rho)) < 1e-6);
        assert!(rel(a.l2, c.l2) < 1e-6);
        let via_derivative = mean_length_class2(&p, L2Route::PgfDerivative).unwrap();
        assert!(rel(via_derivative, c.l2) < 1e-4);
    }
}

#[test]
fn boundary_values_match_chain() {
    for (l1, l2, mu) in GRID {
        let p = params(l1, l2, mu);
        let c = metrics(&solve(&p).solution);
        let b = boundary_values(&p).unwrap();
        assert!(rel(b.f02_at_1, l2 / (mu + l1)) < 1e-12);
        assert!(rel(c.f02_at_1, b.f02_at_1) < 1e-6);
        assert!(rel(c.f02_prime_at_1, exact_f02_prime(&p)) < 1e-8);
        assert!(rel(b.f02_prime_at_1, c.f02_prime_at_1) < 1e-4);
    }
}

#[test]
fn pgfs_match_partial_sums_on_grid() {
    let zs = [0.0, 0.25, 0.5, 0.75, 1.0];
    for (l1, l2, mu) in GRID {
        let p = params(l1, l2, mu);
        let sol = solve(&p).solution;
        for z1 in zs {
            for z2 in zs {
                let sums = pgf_partial_sums(&sol, z1, z2);
                let at = (l1, l2, mu, z1, z2);
                if z1 == 0.0 {
                    // Only states with i >= 1 carry phase 1; F1 is undefined at 0.
                    assert!(pgf_f1(&p, z1, z2).is_err());
                    assert_eq!(sums.f1, 0.0);
                } else {
                    assert_abs_diff_eq!(pgf_f1(&p, z1, z2).unwrap(), sums.f1, epsilon = 1e-7);
                }
                assert_abs_diff_eq!(pgf_f2(&p, z1, z2).unwrap(), sums.f2, epsilon = 1e-7);
                let joint = pgf_joint(&p, z1, z2).unwrap();
                assert!(
                    (joint - sums.joint).abs() < 1e-7,
                    "{at:?}: {joint} vs {}",
                    sums.joint
                );
            }
        }
        assert_abs_diff_eq!(pgf_joint(&p, 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-10);
    }
}

#[test]
fn total_count_is_geometric() {
    for (l1, l2, mu) in GRID {
        let p = params(l1, l2, mu);
        let rho = p.rho();
        let m = marginal_distributions(&solve(&p).solution);
        for (n, pn) in m.total.iter().enumerate().take(40) {
            assert_abs_diff_eq!(*pn, (1.0 - rho) * rho.powi(n as i32), epsilon = 1e-8);
        }
    }
}

#[test]
fn single_class_marginals_are_geometric() {
    let only1 = metrics(&solve(&params(1.0, 0.0, 2.0)).solution);
    assert_abs_diff_eq!(only1.l1, 1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(only1.l2, 0.0, epsilon = 1e-12);

    let m = marginal_distributions(&solve(&params(0.0, 1.0, 2.0)).solution);
    assert_abs_diff_eq!(m.class1[0], 1.0, epsilon = 1e-12);
    for (n, pn) in m.class2.iter().enumerate().take(30) {
        assert_abs_diff_eq!(*pn, 0.5f64.powi(n as i32 + 1), epsilon = 1e-8);
    }
}
