//! The nominal 95% interval for L1 should cover the exact value in most of
//! 100 independent runs; 90 leaves room for binomial scatter.

use prioq::sim::run;
use prioq_core::sim::SimConfig;
use prioq_core::ModelParams;

#[test]
fn l1_interval_coverage_over_meta_runs() {
    let p = ModelParams::new(1.0, 1.0, 4.0).unwrap();
    let exact = 5.0 / 12.0;
    let covered = (0..100u64)
        .filter(|k| {
            let config = SimConfig::new(1_000 + k, 10, 40_000);
            run(&p, &config).unwrap().l1.covers(exact).unwrap()
        })
        .count();
    println!("L1 covered in {covered} of 100 runs");
    assert!(covered >= 90, "coverage {covered}/100");
}
