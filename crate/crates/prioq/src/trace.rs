//! Line-oriented event trace and its discipline audit.
//!
//! One record per line, space separated:
//!
//! ```text
//! <time> <event> <class> <customer> <n1> <n2> <phase>
//! ```
//!
//! `time` is written with 17 significant digits in scientific notation,
//! `event` is one of `arrive`, `start`, `depart`, `class` is 1 or 2,
//! `customer` is a per-replication id assigned in arrival order, and
//! `n1 n2 phase` is the state after the event (`phase` uses the codes 0, 1,
//! 2 for idle, serving class 1, serving class 2).

use std::collections::{HashSet, VecDeque};
use std::io::{self, BufRead, Write};

use prioq_core::sim::{simulate_replication, EventKind, SimConfig, TraceEvent};
use prioq_core::{ModelParams, ServerPhase, SystemState};
use thiserror::Error;

pub fn format_event(e: &TraceEvent) -> String {
    let kind = match e.kind {
        EventKind::Arrival => "arrive",
        EventKind::ServiceStart => "start",
        EventKind::Departure => "depart",
    };
    format!(
        "{:.16e} {kind} {} {} {} {} {}",
        e.time,
        e.class,
        e.customer,
        e.state.n1,
        e.state.n2,
        e.state.phase.code()
    )
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("record {record}: {reason}")]
    Violation { record: usize, reason: String },
}

pub fn parse_event(line: &str, number: usize) -> Result<TraceEvent, TraceError> {
    let bad = |reason: &str| TraceError::Parse {
        line: number,
        reason: reason.to_string(),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 7 {
        return Err(bad("expected 7 fields"));
    }
    let kind = match fields[1] {
        "arrive" => EventKind::Arrival,
        "start" => EventKind::ServiceStart,
        "depart" => EventKind::Departure,
        _ => return Err(bad("unknown event type")),
    };
    let num = |i: usize| {
        fields[i]
            .parse::<u64>()
            .map_err(|_| bad("malformed integer"))
    };
    let phase = ServerPhase::from_code(num(6)? as u8).ok_or_else(|| bad("unknown phase"))?;
    let class = num(2)? as u8;
    if class != 1 && class != 2 {
        return Err(bad("class must be 1 or 2"));
    }
    Ok(TraceEvent {
        time: fields[0].parse().map_err(|_| bad("malformed time"))?,
        kind,
        class,
        customer: num(3)?,
        state: SystemState::new(num(4)? as usize, num(5)? as usize, phase),
    })
}

pub fn read_trace<R: BufRead>(reader: R) -> Result<Vec<TraceEvent>, Box<dyn std::error::Error>> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(parse_event(&line, i + 1)?);
    }
    Ok(events)
}

/// Simulates one replication and streams its trace to `out`.
pub fn write_trace<W: Write>(
    params: &ModelParams,
    config: &SimConfig,
    replication: usize,
    out: &mut W,
) -> anyhow::Result<()> {
    let mut io_error: Option<io::Error> = None;
    let mut sink = |e: &TraceEvent| {
        if io_error.is_none() {
            if let Err(err) = writeln!(out, "{}", format_event(e)) {
                io_error = Some(err);
            }
        }
    };
    simulate_replication(params, config, replication, Some(&mut sink))?;
    match io_error {
        Some(err) => Err(err.into()),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditSummary {
    pub records: usize,
    pub departures: [u64; 2],
}

/// Replays a trace and checks the service discipline:
///
/// * times never decrease and every recorded state is valid;
/// * counts move by exactly one on arrivals and departures;
/// * a service, once started, ends with that customer's departure before any
///   other service starts (no preemption);
/// * a class-2 service only starts when no class-1 customer is present;
/// * within a class, customers start service in arrival order, and so
///   depart in arrival order too.
pub fn audit(events: &[TraceEvent]) -> Result<AuditSummary, TraceError> {
    let mut counts = [0usize; 2];
    let mut serving: Option<(u8, u64)> = None;
    let mut last_time = f64::NEG_INFINITY;
    let mut seen = HashSet::new();
    let mut waiting: [VecDeque<u64>; 2] = [VecDeque::new(), VecDeque::new()];
    let mut departures = [0u64; 2];

    for (record, e) in events.iter().enumerate() {
        let fail = |reason: String| TraceError::Violation { record, reason };
        if e.time < last_time {
            return Err(fail(format!("time goes backwards to {}", e.time)));
        }
        last_time = e.time;
        if !e.state.is_valid() {
            return Err(fail(format!("invalid state {:?}", e.state)));
        }
        let class = e.class as usize - 1;
        match e.kind {
            EventKind::Arrival => {
                if !seen.insert(e.customer) {
                    return Err(fail(format!("customer {} arrives twice", e.customer)));
                }
                waiting[class].push_back(e.customer);
                counts[class] += 1;
            }
            EventKind::ServiceStart => {
                if let Some((_, busy)) = serving {
                    return Err(fail(format!(
                        "customer {} starts while customer {busy} is still in service",
                        e.customer
                    )));
                }
                if e.class == 2 && e.state.n1 > 0 {
                    return Err(fail(format!(
                        "class-2 customer {} starts with {} class-1 customers waiting",
                        e.customer, e.state.n1
                    )));
                }
                match waiting[class].pop_front() {
                    Some(head) if head == e.customer => {}
                    Some(head) => {
                        return Err(fail(format!(
                            "class-{} customer {} starts ahead of customer {head}",
                            e.class, e.customer
                        )))
                    }
                    None => {
                        return Err(fail(format!(
                            "customer {} starts without waiting",
                            e.customer
                        )))
                    }
                }
                serving = Some((e.class, e.customer));
            }
            EventKind::Departure => {
                if serving != Some((e.class, e.customer)) {
                    return Err(fail(format!(
                        "customer {} departs without being in service",
                        e.customer
                    )));
                }
                serving = None;
                counts[class] -= 1;
                departures[class] += 1;
            }
        }
        if (e.state.n1, e.state.n2) != (counts[0], counts[1]) {
            return Err(fail(format!(
                "recorded counts ({}, {}) disagree with replayed ({}, {})",
                e.state.n1, e.state.n2, counts[0], counts[1]
            )));
        }
        // The phase is only settled once a start record follows a departure
        // or an arrival to an idle server, so compare on start records.
        if e.kind == EventKind::ServiceStart {
            let expected = if e.class == 1 {
                ServerPhase::ServingClass1
            } else {
                ServerPhase::ServingClass2
            };
            if e.state.phase != expected {
                return Err(fail(format!(
                    "start record carries phase {:?}",
                    e.state.phase
                )));
            }
        }
    }
    Ok(AuditSummary {
        records: events.len(),
        departures,
    })
}
