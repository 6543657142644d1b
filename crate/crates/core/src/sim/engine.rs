use alloc::collections::VecDeque;

use super::rng::{replication_rng, ExpSampler};
use super::SimConfig;
use crate::error::{Error, Result};
use crate::model::{ModelParams, ServerPhase, SystemState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrival,
    ServiceStart,
    Departure,
}

/// One line of the audit trace. `state` is the system state after the event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: EventKind,
    /// 1 or 2
    pub class: u8,
    pub customer: u64,
    pub state: SystemState,
}

/// Time averages and mean sojourns over the measurement window of one
/// replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationResult {
    pub p_free: f64,
    pub p_class1: f64,
    pub p_class2: f64,
    pub l1: f64,
    pub l2: f64,
    /// Mean sojourn of class-1 customers departing in the window.
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub measured_time: f64,
    pub departures: [u64; 2],
}

#[derive(Debug, Clone, Copy)]
struct Customer {
    id: u64,
    arrival: f64,
}

#[derive(Debug, Default)]
struct Accumulators {
    idle: f64,
    busy: [f64; 2],
    area: [f64; 2],
    sojourn: [f64; 2],
    departed: [u64; 2],
}

/// Runs replication `replication` of `config` to completion.
///
/// The server takes the head of the class-1 line whenever it frees up and
/// falls back to the class-2 line; a service in progress always finishes.
/// Measurement covers the interval between the `warmup_events`-th and the
/// `horizon_events`-th departure.
pub fn simulate_replication(
    params: &ModelParams,
    config: &SimConfig,
    replication: usize,
    mut trace: Option<&mut dyn FnMut(&TraceEvent)>,
) -> Result<ReplicationResult> {
    params.validate()?;
    config.validate()?;
    if params.lambda1 + params.lambda2 == 0.0 {
        return Err(Error::Config(
            "both arrival rates are zero; nothing to simulate".into(),
        ));
    }

    let mut rng = replication_rng(config.seed, replication);
    let arrivals = [
        ExpSampler::new(params.lambda1),
        ExpSampler::new(params.lambda2),
    ];
    let service = ExpSampler::new(params.mu);

    let mut next_arrival = [arrivals[0].sample(&mut rng), arrivals[1].sample(&mut rng)];
    let mut next_departure = f64::INFINITY;
    let mut waiting: [VecDeque<Customer>; 2] = [VecDeque::new(), VecDeque::new()];
    let mut in_service: Option<(usize, Customer)> = None;
    let mut count = [0usize; 2];
    let mut next_id = 0u64;
    let mut departures = 0u64;
    let mut measuring = config.warmup_events == 0;
    let mut acc = Accumulators::default();
    let mut now = 0.0;

    let state_of = |count: &[usize; 2], in_service: &Option<(usize, Customer)>| {
        let phase = match in_service {
            None => ServerPhase::Free,
            Some((0, _)) => ServerPhase::ServingClass1,
            Some(_) => ServerPhase::ServingClass2,
        };
        SystemState::new(count[0], count[1], phase)
    };

    while departures < config.horizon_events {
        let (time, event) =
            if next_departure <= next_arrival[0] && next_departure <= next_arrival[1] {
                (next_departure, None)
            } else if next_arrival[0] <= next_arrival[1] {
                (next_arrival[0], Some(0))
            } else {
                (next_arrival[1], Some(1))
            };

        if measuring {
            let dt = time - now;
            match in_service {
                None => acc.idle += dt,
                Some((class, _)) => acc.busy[class] += dt,
            }
            acc.area[0] += count[0] as f64 * dt;
            acc.area[1] += count[1] as f64 * dt;
        }
        now = time;

        let mut started = None;
        match event {
            Some(class) => {
                let customer = Customer {
                    id: next_id,
                    arrival: now,
                };
                next_id += 1;
                count[class] += 1;
                next_arrival[class] = now + arrivals[class].sample(&mut rng);
                if in_service.is_none() {
                    in_service = Some((class, customer));
                    next_departure = now + service.sample(&mut rng);
                    started = Some((class, customer));
                } else {
                    waiting[class].push_back(customer);
                }
                if let Some(sink) = trace.as_mut() {
                    sink(&TraceEvent {
                        time: now,
                        kind: EventKind::Arrival,
                        class: class as u8 + 1,
                        customer: customer.id,
                        state: state_of(&count, &in_service),
                    });
                }
            }
            None => {
                let (class, customer) = in_service.take().expect("departure from a busy server");
                count[class] -= 1;
                departures += 1;
                if measuring {
                    acc.sojourn[class] += now - customer.arrival;
                    acc.departed[class] += 1;
                }
                if departures == config.warmup_events {
                    measuring = true;
                }
                let next = waiting[0]
                    .pop_front()
                    .map(|c| (0, c))
                    .or_else(|| waiting[1].pop_front().map(|c| (1, c)));
                next_departure = match next {
                    Some(_) => now + service.sample(&mut rng),
                    None => f64::INFINITY,
                };
                in_service = next;
                started = next;
                if let Some(sink) = trace.as_mut() {
                    sink(&TraceEvent {
                        time: now,
                        kind: EventKind::Departure,
                        class: class as u8 + 1,
                        customer: customer.id,
                        state: state_of(&count, &in_service),
                    });
                }
            }
        }
        if let (Some(sink), Some((class, customer))) = (trace.as_mut(), started) {
            sink(&TraceEvent {
                time: now,
                kind: EventKind::ServiceStart,
                class: class as u8 + 1,
                customer: customer.id,
                state: state_of(&count, &in_service),
            });
        }
    }

    let measured_time = acc.idle + acc.busy[0] + acc.busy[1];
    let mean_sojourn = |class: usize| {
        (acc.departed[class] > 0).then(|| acc.sojourn[class] / acc.departed[class] as f64)
    };
    Ok(ReplicationResult {
        p_free: acc.idle / measured_time,
        p_class1: acc.busy[0] / measured_time,
        p_class2: acc.busy[1] / measured_time,
        l1: acc.area[0] / measured_time,
        l2: acc.area[1] / measured_time,
        w1: mean_sojourn(0),
        w2: mean_sojourn(1),
        measured_time,
        departures: acc.departed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    fn params(l1: f64, l2: f64, mu: f64) -> ModelParams {
        ModelParams::new(l1, l2, mu).unwrap()
    }

    #[test]
    fn deterministic_per_seed_and_replication() {
        let config = SimConfig::new(42, 2, 20_000);
        let p = params(1.0, 1.0, 4.0);
        let a = simulate_replication(&p, &config, 1, None).unwrap();
        let b = simulate_replication(&p, &config, 1, None).unwrap();
        assert_eq!(a, b);
        let c = simulate_replication(&p, &config, 0, None).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn occupancy_partitions_time() {
        let config = SimConfig::new(3, 1, 50_000);
        let r = simulate_replication(&params(2.0, 1.0, 5.0), &config, 0, None).unwrap();
        assert!((r.p_free + r.p_class1 + r.p_class2 - 1.0).abs() < 1e-12);
        assert!(r.measured_time > 0.0);
        assert_eq!(r.departures[0] + r.departures[1], 45_000);
    }

    #[test]
    fn single_class_mm1() {
        let config = SimConfig::new(11, 1, 400_000);
        let r = simulate_replication(&params(1.0, 0.0, 2.0), &config, 0, None).unwrap();
        assert!((r.p_free - 0.5).abs() < 0.02);
        assert!((r.l1 - 1.0).abs() < 0.1);
        assert_eq!(r.l2, 0.0);
        assert_eq!(r.w2, None);
    }

    #[test]
    fn trace_states_match_counts() {
        let config = SimConfig {
            warmup_events: 0,
            ..SimConfig::new(5, 1, 2_000)
        };
        let mut events = Vec::new();
        let mut sink = |e: &TraceEvent| events.push(*e);
        simulate_replication(&params(1.5, 1.0, 3.0), &config, 0, Some(&mut sink)).unwrap();
        assert!(events.iter().all(|e| e.state.is_valid()));
        assert_eq!(
            events
                .iter()
                .filter(|e| e.kind == EventKind::Departure)
                .count(),
            2_000
        );
        assert!(events.windows(2).all(|w| w[0].time <= w[1].time));
    }

    #[test]
    fn config_errors() {
        let p = params(1.0, 1.0, 4.0);
        let zero = SimConfig {
            horizon_events: 0,
            warmup_events: 0,
            ..SimConfig::default()
        };
        assert!(matches!(
            simulate_replication(&p, &zero, 0, None),
            Err(Error::Config(_))
        ));
        let long_warmup = SimConfig {
            warmup_events: 10,
            horizon_events: 10,
            ..SimConfig::default()
        };
        assert!(simulate_replication(&p, &long_warmup, 0, None).is_err());
        let idle = params(0.0, 0.0, 1.0);
        assert!(simulate_replication(&idle, &SimConfig::new(1, 1, 10), 0, None).is_err());
    }

    #[test]
    fn unstable_runs_terminate() {
        let config = SimConfig::new(9, 1, 5_000);
        let r = simulate_replication(&params(3.0, 2.0, 4.0), &config, 0, None).unwrap();
        assert!(r.p_free < 0.05);
    }
}
