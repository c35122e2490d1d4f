use serde::{Deserialize, Serialize};

/// Per-rank events, in the order they must occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    PrepareStart,
    PrepareEnd,
    TransferToStart,
    TransferToEnd,
    Launch,
    KernelEnd,
    TransferFromStart,
    TransferFromEnd,
}

impl EventKind {
    pub const ALL: [EventKind; 8] = [
        EventKind::PrepareStart,
        EventKind::PrepareEnd,
        EventKind::TransferToStart,
        EventKind::TransferToEnd,
        EventKind::Launch,
        EventKind::KernelEnd,
        EventKind::TransferFromStart,
        EventKind::TransferFromEnd,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// seconds from job start
    pub time: f64,
    pub rank: u32,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExecutionTimeline {
    pub events: Vec<Event>,
    /// Expanded-key broadcast to every DPU, ahead of all rank activity.
    pub key_broadcast: Option<Interval>,
}

impl ExecutionTimeline {
    pub fn push(&mut self, rank: u32, kind: EventKind, time: f64) {
        self.events.push(Event { time, rank, kind });
    }

    /// Orders events by time; ties keep rank and lifecycle order.
    pub fn sort(&mut self) {
        self.events.sort_by(|a, b| {
            a.time.total_cmp(&b.time).then(a.rank.cmp(&b.rank)).then(a.kind.cmp(&b.kind))
        });
    }

    pub fn makespan(&self) -> f64 {
        let last = self.events.iter().map(|e| e.time).fold(0.0, f64::max);
        last.max(self.key_broadcast.map_or(0.0, |b| b.end))
    }

    pub fn ranks(&self) -> Vec<u32> {
        let mut r: Vec<u32> = self.events.iter().map(|e| e.rank).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    pub fn time_of(&self, rank: u32, kind: EventKind) -> Option<f64> {
        self.events.iter().find(|e| e.rank == rank && e.kind == kind).map(|e| e.time)
    }

    /// Intervals between `start` and `end` events of every rank.
    pub fn intervals(&self, start: EventKind, end: EventKind) -> Vec<Interval> {
        self.ranks()
            .into_iter()
            .filter_map(|r| {
                Some(Interval { start: self.time_of(r, start)?, end: self.time_of(r, end)? })
            })
            .collect()
    }

    /// Wall time covered by at least one of `intervals`.
    pub fn covered(mut intervals: Vec<Interval>) -> f64 {
        intervals.retain(|i| i.end > i.start);
        intervals.sort_by(|a, b| a.start.total_cmp(&b.start));
        let mut total = 0.0;
        let mut current: Option<Interval> = None;
        for i in intervals {
            match current.as_mut() {
                Some(c) if i.start <= c.end => c.end = c.end.max(i.end),
                _ => {
                    if let Some(c) = current.take() {
                        total += c.len();
                    }
                    current = Some(i);
                }
            }
        }
        total + current.map_or(0.0, |c| c.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rank: u32,
    pub first: EventKind,
    pub second: EventKind,
    pub message: String,
}

/// Checks the per-rank ordering rules. Violations are returned, not raised.
pub fn validate_timeline(t: &ExecutionTimeline) -> Vec<Violation> {
    use EventKind::*;
    let mut out = Vec::new();
    let broadcast_end = t.key_broadcast.map(|b| b.end);

    for rank in t.ranks() {
        let evs: Vec<&Event> = t.events.iter().filter(|e| e.rank == rank).collect();
        for kind in EventKind::ALL {
            let n = evs.iter().filter(|e| e.kind == kind).count();
            if n != 1 {
                out.push(Violation {
                    rank,
                    first: kind,
                    second: kind,
                    message: format!("rank {rank}: {kind:?} occurs {n} times, expected once"),
                });
            }
        }
        for e in &evs {
            if !(e.time.is_finite() && e.time >= 0.0) {
                out.push(Violation {
                    rank,
                    first: e.kind,
                    second: e.kind,
                    message: format!("rank {rank}: {:?} at invalid time {}", e.kind, e.time),
                });
            }
        }
        for pair in evs.windows(2) {
            if pair[1].time < pair[0].time {
                out.push(Violation {
                    rank,
                    first: pair[0].kind,
                    second: pair[1].kind,
                    message: format!(
                        "rank {rank}: timestamps decrease from {:?} to {:?}",
                        pair[0].kind, pair[1].kind
                    ),
                });
            }
        }
        for (before, after) in EventKind::ALL.iter().zip(EventKind::ALL.iter().skip(1)) {
            let (Some(a), Some(b)) = (
                evs.iter().find(|e| e.kind == *before),
                evs.iter().find(|e| e.kind == *after),
            ) else {
                continue;
            };
            if b.time < a.time {
                out.push(Violation {
                    rank,
                    first: *before,
                    second: *after,
                    message: format!(
                        "rank {rank}: {after:?} at {} precedes {before:?} at {}",
                        b.time, a.time
                    ),
                });
            }
        }
        if let (Some(end), Some(p)) = (broadcast_end, evs.iter().find(|e| e.kind == PrepareStart)) {
            if p.time < end {
                out.push(Violation {
                    rank,
                    first: PrepareStart,
                    second: PrepareStart,
                    message: format!("rank {rank}: prepare starts before the key broadcast ends"),
                });
            }
        }
    }
    out
}
