use prioq::trace::{audit, format_event, parse_event, read_trace, write_trace};
use prioq_core::sim::{EventKind, SimConfig};
use prioq_core::ModelParams;
use proptest::prelude::*;

fn trace(p: &ModelParams, seed: u64, horizon: u64) -> Vec<prioq_core::sim::TraceEvent> {
    let mut buf = Vec::new();
    write_trace(p, &SimConfig::new(seed, 1, horizon), 0, &mut buf).unwrap();
    read_trace(buf.as_slice()).unwrap()
}

#[test]
fn heavy_traffic_trace_respects_discipline() {
    let p = ModelParams::new(1.2, 1.6, 3.0).unwrap();
    let events = trace(&p, 99, 50_000);
    let summary = audit(&events).unwrap();
    assert_eq!(summary.departures.iter().sum::<u64>(), 50_000);
    // The scenario actually exercises priority: class 2 waits while class 1 is served.
    assert!(events
        .iter()
        .any(|e| e.kind == EventKind::ServiceStart && e.class == 1 && e.state.n2 > 0));
}

#[test]
fn swapping_two_class2_starts_is_caught() {
    let p = ModelParams::new(0.5, 2.0, 3.0).unwrap();
    let mut events = trace(&p, 5, 2_000);
    let starts: Vec<usize> = events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EventKind::ServiceStart && e.class == 2)
        .map(|(i, _)| i)
        .collect();
    // Relabel one start with a later customer of the same class.
    let (a, b) = (starts[10], starts[11]);
    events[a].customer = events[b].customer;
    assert!(audit(&events).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulated_traces_pass_audit(
        l1 in 0.0f64..3.0, l2 in 0.0f64..3.0, mu in 0.5f64..4.0, seed in any::<u64>()
    ) {
        prop_assume!(l1 + l2 > 0.05);
        let p = ModelParams::new(l1, l2, mu).unwrap();
        let events = trace(&p, seed, 1_500);
        prop_assert!(audit(&events).is_ok());
        for e in events.iter().take(50) {
            prop_assert_eq!(parse_event(&format_event(e), 1).unwrap(), *e);
        }
    }
}
