use alloc::vec;
use alloc::vec::Vec;

use super::solve::StationarySolution;
use crate::analytic::ServerOccupancy;
use crate::model::ServerPhase;

/// Everything the closed forms predict, read off a stationary vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtmcMetrics {
    pub p000: f64,
    pub occupancy: ServerOccupancy,
    /// `sum i p(i, j, k)`
    pub l1: f64,
    /// `sum j p(i, j, k)`
    pub l2: f64,
    pub l_total: f64,
    /// `sum_j p(0, j, 2)`
    pub f02_at_1: f64,
    /// `sum_j j p(0, j, 2)`
    pub f02_prime_at_1: f64,
    pub tail_mass: f64,
    pub residual: f64,
}

/// Per-class and total count distributions, indexed by count.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub class1: Vec<f64>,
    pub class2: Vec<f64>,
    pub total: Vec<f64>,
}

/// Truncated power sums matching `F1`, `F2` and `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgfSums {
    pub f1: f64,
    pub f2: f64,
    pub joint: f64,
}

pub fn metrics(sol: &StationarySolution) -> CtmcMetrics {
    let mut m = CtmcMetrics {
        p000: 0.0,
        occupancy: ServerOccupancy {
            p_class1: 0.0,
            p_class2: 0.0,
            p_free: 0.0,
        },
        l1: 0.0,
        l2: 0.0,
        l_total: 0.0,
        f02_at_1: 0.0,
        f02_prime_at_1: 0.0,
        tail_mass: sol.tail_mass,
        residual: sol.residual,
    };
    for (s, p) in sol.iter() {
        match s.phase {
            ServerPhase::Free => m.occupancy.p_free += p,
            ServerPhase::ServingClass1 => m.occupancy.p_class1 += p,
            ServerPhase::ServingClass2 => {
                m.occupancy.p_class2 += p;
                if s.n1 == 0 {
                    m.f02_at_1 += p;
                    m.f02_prime_at_1 += s.n2 as f64 * p;
                }
            }
        }
        m.l1 += s.n1 as f64 * p;
        m.l2 += s.n2 as f64 * p;
    }
    m.p000 = m.occupancy.p_free;
    m.l_total = m.l1 + m.l2;
    m
}

pub fn marginal_distributions(sol: &StationarySolution) -> Marginals {
    let (n1_max, n2_max) = sol.caps();
    let mut out = Marginals {
        class1: vec![0.0; n1_max + 1],
        class2: vec![0.0; n2_max + 1],
        total: vec![0.0; n1_max + n2_max + 1],
    };
    for (s, p) in sol.iter() {
        out.class1[s.n1] += p;
        out.class2[s.n2] += p;
        out.total[s.n1 + s.n2] += p;
    }
    out
}

fn powers(z: f64, n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    for _ in 0..=n {
        table.push(acc);
        acc *= z;
    }
    table
}

pub fn pgf_partial_sums(sol: &StationarySolution, z1: f64, z2: f64) -> PgfSums {
    let (n1_max, n2_max) = sol.caps();
    let pow1 = powers(z1, n1_max);
    let pow2 = powers(z2, n2_max);
    let mut sums = PgfSums {
        f1: 0.0,
        f2: 0.0,
        joint: 0.0,
    };
    for (s, p) in sol.iter() {
        let term = p * pow1[s.n1] * pow2[s.n2];
        match s.phase {
            ServerPhase::ServingClass1 => sums.f1 += term,
            ServerPhase::ServingClass2 => sums.f2 += term,
            ServerPhase::Free => {}
        }
        sums.joint += term;
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmc::{auto_truncate, TruncationSpec};
    use crate::model::ModelParams;

    fn solved(l1: f64, l2: f64, mu: f64) -> StationarySolution {
        let params = ModelParams::new(l1, l2, mu).unwrap();
        auto_truncate(&params, &TruncationSpec::default())
            .unwrap()
            .solution
    }

    #[test]
    fn reference_point_metrics() {
        let m = metrics(&solved(1.0, 1.0, 4.0));
        assert!(m.tail_mass < 1e-12);
        assert!((m.p000 - 0.5).abs() < 1e-8);
        assert!((m.l1 - 5.0 / 12.0).abs() < 1e-6 * 5.0 / 12.0);
        assert!((m.l_total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_system() {
        let m = metrics(&solved(0.0, 0.0, 1.0));
        assert_eq!(m.p000, 1.0);
        assert_eq!((m.l1, m.l2), (0.0, 0.0));
    }

    #[test]
    fn marginals_are_normalized_and_geometric_in_total() {
        let d = marginal_distributions(&solved(1.0, 1.0, 4.0));
        for col in [&d.class1, &d.class2, &d.total] {
            assert!((col.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        for (n, p) in d.total.iter().enumerate().take(31) {
            assert!((p - 0.5 * 0.5f64.powi(n as i32)).abs() < 1e-8, "n={n}");
        }
        let only2 = marginal_distributions(&solved(0.0, 1.0, 2.0));
        assert!((only2.class1[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_sums_at_one_and_origin() {
        let sol = solved(2.0, 1.0, 5.0);
        let at_one = pgf_partial_sums(&sol, 1.0, 1.0);
        assert!((at_one.joint - 1.0).abs() < 1e-12);
        let origin = pgf_partial_sums(&sol, 0.0, 0.0);
        assert_eq!(origin.joint, sol.prob(&crate::model::SystemState::EMPTY));
        assert_eq!(origin.f1, 0.0);
    }
}
