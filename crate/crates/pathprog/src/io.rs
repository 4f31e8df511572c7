//! Serialized interchange formats.
//!
//! * Task files: `{"vertices": [{"id": 0, "wcet": 3}, ...],
//!   "edges": [[0, 1], ...], "deadline": 16, "period": 16}` with dense ids
//!   `0..n`; `deadline`/`period` are omitted while unassigned.
//! * Reservation files: `{"kind": "gang"|"ordinary", "m": 2,
//!   "budgets": ["14", "27/2"], "deadline": 16, "period": 16, "n": 2}`,
//!   budgets as exact rational strings.
//! * Trace files: makespan, envelope, and per-processor interval arrays.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reservation::{GangReservation, OrdinaryReservation, Reservation};
use crate::sim::ScheduleTrace;
use crate::task::DagTask;
use crate::time::Time;

#[derive(Serialize, Deserialize)]
struct VertexFile {
    id: usize,
    wcet: i64,
}

#[derive(Serialize, Deserialize)]
struct TaskFile {
    vertices: Vec<VertexFile>,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    deadline: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<u64>,
}

/// Serializes a task to pretty-printed JSON.
pub fn task_to_json(task: &DagTask) -> String {
    let file = TaskFile {
        vertices: task
            .vertices()
            .map(|v| VertexFile {
                id: v,
                wcet: task.wcet(v) as i64,
            })
            .collect(),
        edges: task.edges().to_vec(),
        deadline: task.deadline,
        period: task.period,
    };
    serde_json::to_string_pretty(&file).expect("task serialization cannot fail")
}

/// Parses and fully validates a task: dense ids, non-negative wcets, and
/// every structural invariant.
pub fn task_from_json(json: &str) -> Result<DagTask> {
    let file: TaskFile =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let n = file.vertices.len();
    let mut wcet = vec![None; n];
    for v in &file.vertices {
        if v.id >= n || wcet[v.id].is_some() {
            return Err(Error::InvalidVertexIds);
        }
        if v.wcet < 0 {
            return Err(Error::NegativeWcet(v.id, v.wcet));
        }
        wcet[v.id] = Some(v.wcet as u64);
    }
    let wcet: Vec<u64> = wcet.into_iter().map(|w| w.unwrap()).collect();
    let mut task = DagTask::new(wcet, file.edges);
    task.deadline = file.deadline;
    task.period = file.period;
    task.validate()?;
    Ok(task)
}

#[derive(Serialize, Deserialize)]
struct ReservationFile {
    kind: String,
    m: usize,
    budgets: Vec<String>,
    deadline: u64,
    period: u64,
    n: usize,
}

/// Serializes a reservation system to pretty-printed JSON.
pub fn reservation_to_json(reservation: &Reservation) -> String {
    let file = ReservationFile {
        kind: reservation.kind().to_string(),
        m: reservation.m(),
        budgets: reservation
            .budgets()
            .iter()
            .map(|b| b.to_string())
            .collect(),
        deadline: reservation.deadline(),
        period: reservation.period(),
        n: reservation.n(),
    };
    serde_json::to_string_pretty(&file).expect("reservation serialization cannot fail")
}

/// Parses a reservation system, checking the budget list length and, for
/// gangs, that all budgets agree.
pub fn reservation_from_json(json: &str) -> Result<Reservation> {
    let file: ReservationFile =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    if file.m == 0 || file.budgets.len() != file.m {
        return Err(Error::Parse(format!(
            "expected {} budgets, found {}",
            file.m,
            file.budgets.len()
        )));
    }
    let budgets: Vec<Time> = file
        .budgets
        .iter()
        .map(|s| {
            crate::time::parse_decimal(s)
                .ok_or_else(|| Error::Parse(format!("invalid budget {:?}", s)))
        })
        .collect::<Result<_>>()?;
    match file.kind.as_str() {
        "gang" => {
            if budgets.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::Parse("gang budgets must be identical".into()));
            }
            Ok(Reservation::Gang(GangReservation {
                m: file.m,
                budget: budgets[0],
                deadline: file.deadline,
                period: file.period,
                n: file.n,
            }))
        }
        "ordinary" => Ok(Reservation::Ordinary(OrdinaryReservation {
            m: file.m,
            budgets,
            deadline: file.deadline,
            period: file.period,
            n: file.n,
        })),
        other => Err(Error::Parse(format!("unknown reservation kind {:?}", other))),
    }
}

#[derive(Serialize)]
struct IntervalFile {
    start: String,
    end: String,
    vertex: usize,
}

#[derive(Serialize)]
struct TraceFile {
    makespan: String,
    completed: bool,
    envelope: Vec<usize>,
    busy_time: String,
    nonbusy_time: String,
    preemptions: usize,
    processors: Vec<Vec<IntervalFile>>,
    arrivals: Vec<Option<String>>,
    finishes: Vec<Option<String>>,
}

/// Serializes a schedule trace (timestamps as exact rational strings).
pub fn trace_to_json(trace: &ScheduleTrace) -> String {
    let file = TraceFile {
        makespan: trace.makespan.to_string(),
        completed: trace.completed,
        envelope: trace.envelope.vertices().to_vec(),
        busy_time: trace.busy_time.to_string(),
        nonbusy_time: trace.nonbusy_time.to_string(),
        preemptions: trace.preemptions,
        processors: trace
            .processors
            .iter()
            .map(|list| {
                list.iter()
                    .map(|iv| IntervalFile {
                        start: iv.start.to_string(),
                        end: iv.end.to_string(),
                        vertex: iv.vertex,
                    })
                    .collect()
            })
            .collect(),
        arrivals: trace
            .arrival
            .iter()
            .map(|a| a.map(|t| t.to_string()))
            .collect(),
        finishes: trace
            .finish
            .iter()
            .map(|f| f.map(|t| t.to_string()))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("trace serialization cannot fail")
}
