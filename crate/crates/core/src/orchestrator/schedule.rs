//! Rank scheduling for the three host strategies.
//!
//! The host prepares buffers serially. Each rank has its own transfer
//! channel, and a rank never computes while its own inbound transfer runs.

use serde::{Deserialize, Serialize};

use crate::machine::{EventKind, ExecutionTimeline, Interval};

use super::Strategy;

/// Durations, in seconds, of the phases of one rank.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RankCost {
    pub prepare: f64,
    pub transfer_to: f64,
    pub kernel: f64,
    pub transfer_from: f64,
}

/// Lays the ranks out in time. `broadcast` is the duration of the key
/// broadcast that precedes everything else, when there is one.
pub fn schedule(strategy: Strategy, ranks: &[RankCost], broadcast: Option<f64>) -> ExecutionTimeline {
    use EventKind::*;
    let mut tl = ExecutionTimeline {
        key_broadcast: broadcast.map(|d| Interval { start: 0.0, end: d }),
        ..Default::default()
    };
    let start = broadcast.unwrap_or(0.0);

    // Inbound side. `host` is when the host thread is free again.
    let mut host = start;
    let mut arrivals = Vec::with_capacity(ranks.len());
    for (i, r) in ranks.iter().enumerate() {
        let rank = i as u32;
        tl.push(rank, PrepareStart, host);
        host += r.prepare;
        tl.push(rank, PrepareEnd, host);
        tl.push(rank, TransferToStart, host);
        let arrived = host + r.transfer_to;
        tl.push(rank, TransferToEnd, arrived);
        arrivals.push(arrived);
        match strategy {
            // the host waits for the transfer before moving on
            Strategy::Sync | Strategy::AsyncRankExecution => host = arrived,
            Strategy::AsyncRankTransfer => {}
        }
    }

    let launches: Vec<f64> = match strategy {
        Strategy::Sync => vec![host; ranks.len()],
        Strategy::AsyncRankTransfer => {
            let all = arrivals.iter().copied().fold(host, f64::max);
            vec![all; ranks.len()]
        }
        Strategy::AsyncRankExecution => arrivals.clone(),
    };
    let kernel_ends: Vec<f64> = launches.iter().zip(ranks).map(|(l, r)| l + r.kernel).collect();
    for (i, (&l, &k)) in launches.iter().zip(&kernel_ends).enumerate() {
        tl.push(i as u32, Launch, l);
        tl.push(i as u32, KernelEnd, k);
    }

    match strategy {
        Strategy::Sync => {
            // blocked until the last DPU finishes, then one rank at a time
            let mut t = kernel_ends.iter().copied().fold(host, f64::max);
            for (i, r) in ranks.iter().enumerate() {
                tl.push(i as u32, TransferFromStart, t);
                t += r.transfer_from;
                tl.push(i as u32, TransferFromEnd, t);
            }
        }
        Strategy::AsyncRankTransfer | Strategy::AsyncRankExecution => {
            for (i, (r, &k)) in ranks.iter().zip(&kernel_ends).enumerate() {
                tl.push(i as u32, TransferFromStart, k);
                tl.push(i as u32, TransferFromEnd, k + r.transfer_from);
            }
        }
    }
    tl.sort();
    tl
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::validate_timeline;
    use proptest::prelude::*;
    use crate::orchestrator::Strategy;
    use proptest::strategy::Strategy as _;

    const MS: f64 = 1e-3;

    fn uniform(n: usize) -> Vec<RankCost> {
        vec![RankCost { prepare: 2.0 * MS, transfer_to: 10.0 * MS, kernel: 30.0 * MS, transfer_from: 5.0 * MS }; n]
    }

    fn last_arrival(tl: &ExecutionTimeline) -> f64 {
        tl.events
            .iter()
            .filter(|e| e.kind == EventKind::TransferToEnd)
            .map(|e| e.time)
            .fold(0.0, f64::max)
    }

    #[test]
    fn async_transfer_overlaps_preparation() {
        let tl = schedule(Strategy::AsyncRankTransfer, &uniform(4), None);
        assert!((last_arrival(&tl) - 18.0 * MS).abs() < 1e-12);
        for r in 0..4 {
            assert!((tl.time_of(r, EventKind::Launch).unwrap() - 18.0 * MS).abs() < 1e-12);
        }
        let sync = schedule(Strategy::Sync, &uniform(4), None);
        assert!((last_arrival(&sync) - 48.0 * MS).abs() < 1e-12);
    }

    #[test]
    fn async_execution_launches_after_own_transfer() {
        let tl = schedule(Strategy::AsyncRankExecution, &uniform(4), None);
        for r in 0..4u32 {
            let expect = (r + 1) as f64 * 12.0 * MS;
            assert!((tl.time_of(r, EventKind::Launch).unwrap() - expect).abs() < 1e-12);
        }
        let expect = (48.0 + 30.0 + 5.0) * MS;
        assert!((tl.makespan() - expect).abs() < 1e-12);
    }

    #[test]
    fn sync_single_rank_is_serial_sum() {
        let tl = schedule(Strategy::Sync, &uniform(1), Some(1.0 * MS));
        assert!((tl.makespan() - 48.0 * MS).abs() < 1e-12);
        assert!(validate_timeline(&tl).is_empty());
    }

    #[test]
    fn one_rank_all_strategies_agree() {
        let r = uniform(1);
        let a = schedule(Strategy::Sync, &r, Some(3e-6));
        let b = schedule(Strategy::AsyncRankTransfer, &r, Some(3e-6));
        let c = schedule(Strategy::AsyncRankExecution, &r, Some(3e-6));
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    fn rank_cost() -> impl proptest::strategy::Strategy<Value = RankCost> {
        (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(p, x, k, r)| RankCost {
            prepare: p,
            transfer_to: x,
            kernel: k,
            transfer_from: r,
        })
    }

    proptest! {
        #[test]
        fn overlap_never_hurts(ranks in proptest::collection::vec(rank_cost(), 1..12), b in 0.0..0.1f64) {
            let sync = schedule(Strategy::Sync, &ranks, Some(b));
            let pim1 = schedule(Strategy::AsyncRankTransfer, &ranks, Some(b));
            let pim2 = schedule(Strategy::AsyncRankExecution, &ranks, Some(b));
            for tl in [&sync, &pim1, &pim2] {
                prop_assert!(validate_timeline(tl).is_empty());
            }
            prop_assert!(pim1.makespan() <= sync.makespan() + 1e-12);
            prop_assert!(pim2.makespan() <= sync.makespan() + 1e-12);
        }

        #[test]
        fn uniform_ranks_favor_async_transfer(n in 1usize..40, c in rank_cost()) {
            let ranks = vec![c; n];
            let pim1 = schedule(Strategy::AsyncRankTransfer, &ranks, None).makespan();
            let pim2 = schedule(Strategy::AsyncRankExecution, &ranks, None).makespan();
            prop_assert!(pim1 <= pim2 + 1e-12);
        }
    }
}
