use prioq_core::sim::{replication_rng, simulate_replication, SimConfig};
use prioq_core::ModelParams;
use proptest::prelude::*;
use rand_core::RngCore;

#[test]
fn replication_streams_start_differently() {
    for seed in [0u64, 1, 7, 0x5EED, u64::MAX] {
        let heads: Vec<[u64; 4]> = (0..64)
            .map(|r| {
                let mut rng = replication_rng(seed, r);
                [
                    rng.next_u64(),
                    rng.next_u64(),
                    rng.next_u64(),
                    rng.next_u64(),
                ]
            })
            .collect();
        let mut draws: Vec<u64> = heads.iter().flatten().copied().collect();
        draws.sort_unstable();
        draws.dedup();
        assert_eq!(draws.len(), 64 * 4, "overlapping draws for seed {seed}");
    }
}

#[test]
fn replications_are_reproducible() {
    let p = ModelParams::new(1.0, 1.0, 4.0).unwrap();
    let c = SimConfig::new(11, 2, 10_000);
    let a = simulate_replication(&p, &c, 1, None).unwrap();
    let b = simulate_replication(&p, &c, 1, None).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, simulate_replication(&p, &c, 0, None).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn occupancy_partitions_measured_time(
        l1 in 0.0f64..2.0, l2 in 0.0f64..2.0, mu in 0.5f64..4.0, seed in any::<u64>()
    ) {
        prop_assume!(l1 + l2 > 0.01);
        let p = ModelParams::new(l1, l2, mu).unwrap();
        let r = simulate_replication(&p, &SimConfig::new(seed, 1, 2_000), 0, None).unwrap();
        prop_assert!((r.p_free + r.p_class1 + r.p_class2 - 1.0).abs() < 1e-12);
        prop_assert!(r.l1 >= 0.0 && r.l2 >= 0.0);
        prop_assert_eq!(r.departures[0] + r.departures[1], 2_000 - 200);
    }
}
