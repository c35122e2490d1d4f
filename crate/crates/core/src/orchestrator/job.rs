use rayon::prelude::*;
use serde::Serialize;

use crate::config::{KernelCosts, DEFAULT_MRAM_RESERVED_BYTES};
use crate::crypto::sha256::padded_block_count;
use crate::crypto::{
    key_expansion, AesKey, GfLookupTables, Sha256Digest, AES_BLOCK_BYTES, EXPANDED_KEY_BYTES,
    SHA256_DIGEST_BYTES,
};
use crate::machine::{
    effective_ipc, simulate_rank_kernel, simulate_transfer, Direction, DpuWorkload, EventKind,
    ExecutionTimeline, MachineProfile,
};

use super::dpu_program::{run_aes_dpu, run_sha_dpu};
use super::partition::{partition_aes, partition_sha, PartitionPlan};
use super::schedule::{schedule, RankCost};
use super::{JobError, Strategy, Topology};

/// Everything a job is priced against.
#[derive(Debug, Clone, PartialEq)]
pub struct Machine {
    pub profile: MachineProfile,
    pub kernels: KernelCosts,
    pub mram_reserved_bytes: u64,
}

impl Default for Machine {
    fn default() -> Self {
        Machine {
            profile: MachineProfile::default(),
            kernels: KernelCosts::default(),
            mram_reserved_bytes: DEFAULT_MRAM_RESERVED_BYTES,
        }
    }
}

/// Sizes of a job, enough to price it without running it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JobShape {
    Aes { buffer_len: u64 },
    Sha { message_lengths: Vec<u64> },
}

impl JobShape {
    pub fn payload_bytes(&self) -> u64 {
        match self {
            JobShape::Aes { buffer_len } => *buffer_len,
            JobShape::Sha { message_lengths } => message_lengths.iter().sum(),
        }
    }

    /// Bytes the DPUs hand back: the ciphertext, or one digest per message.
    pub fn result_bytes(&self) -> u64 {
        match self {
            JobShape::Aes { buffer_len } => *buffer_len,
            JobShape::Sha { message_lengths } => {
                SHA256_DIGEST_BYTES as u64 * message_lengths.len() as u64
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Workload<'a> {
    Aes { buffer: &'a [u8], key: AesKey },
    Sha { messages: &'a [Vec<u8>] },
}

impl Workload<'_> {
    pub fn shape(&self) -> JobShape {
        match self {
            Workload::Aes { buffer, .. } => JobShape::Aes { buffer_len: buffer.len() as u64 },
            Workload::Sha { messages } => JobShape::Sha {
                message_lengths: messages.iter().map(|m| m.len() as u64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PhaseTimes {
    pub prepare: f64,
    pub cpu_to_dpu: f64,
    pub kernel: f64,
    pub dpu_to_cpu: f64,
}

impl PhaseTimes {
    /// Wall time during which each phase was active on at least one rank.
    pub fn from_timeline(t: &ExecutionTimeline) -> Self {
        use EventKind::*;
        let covered = |a, b| ExecutionTimeline::covered(t.intervals(a, b));
        let mut inbound = t.intervals(TransferToStart, TransferToEnd);
        inbound.extend(t.key_broadcast);
        PhaseTimes {
            prepare: covered(PrepareStart, PrepareEnd),
            cpu_to_dpu: ExecutionTimeline::covered(inbound),
            kernel: covered(Launch, KernelEnd),
            dpu_to_cpu: covered(TransferFromStart, TransferFromEnd),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricedJob {
    pub strategy: Strategy,
    pub topology: Topology,
    pub plan: PartitionPlan,
    pub rank_costs: Vec<RankCost>,
    pub timeline: ExecutionTimeline,
    pub makespan: f64,
    pub phase_times: PhaseTimes,
    /// Payload moved host to DPU, excluding the key broadcast.
    pub bytes_to_dpu: u64,
    pub bytes_from_dpu: u64,
    pub key_broadcasts: u32,
    pub broadcast_bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum JobOutput {
    Ciphertext(Vec<u8>),
    Digests(Vec<Sha256Digest>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobResult {
    pub output: JobOutput,
    pub priced: PricedJob,
}

impl JobResult {
    pub fn makespan(&self) -> f64 {
        self.priced.makespan
    }

    pub fn timeline(&self) -> &ExecutionTimeline {
        &self.priced.timeline
    }

    pub fn phase_times(&self) -> PhaseTimes {
        self.priced.phase_times
    }
}

fn check_topology(top: &Topology, p: &MachineProfile) -> Result<(), JobError> {
    effective_ipc(top.tasklets, p)?;
    let dom = |m: String| Err(JobError::Domain(m));
    if top.ranks == 0 || top.ranks > p.num_ranks {
        return dom(format!("rank count {} outside 1..={}", top.ranks, p.num_ranks));
    }
    if top.dpus_per_rank == 0 || top.dpus_per_rank > p.dpus_per_rank {
        return dom(format!("DPUs per rank {} outside 1..={}", top.dpus_per_rank, p.dpus_per_rank));
    }
    if top.total_dpus() > p.usable_dpus {
        return dom(format!("{} DPUs requested, {} usable", top.total_dpus(), p.usable_dpus));
    }
    Ok(())
}

struct DpuJob {
    bytes_in: u64,
    bytes_out: u64,
    workload: DpuWorkload,
}

fn dpu_jobs(shape: &JobShape, plan: &PartitionPlan, tasklets: u32) -> Vec<DpuJob> {
    match (shape, plan) {
        (JobShape::Aes { .. }, PartitionPlan::Aes { slices }) => slices
            .iter()
            .enumerate()
            .map(|(d, s)| DpuJob {
                bytes_in: s.length,
                bytes_out: s.length,
                workload: DpuWorkload::units(d as u32, s.length / AES_BLOCK_BYTES as u64, tasklets),
            })
            .collect(),
        (JobShape::Sha { message_lengths }, PartitionPlan::Sha { assignments }) => assignments
            .iter()
            .enumerate()
            .map(|(d, idx)| DpuJob {
                bytes_in: idx.iter().map(|&i| message_lengths[i]).sum(),
                bytes_out: SHA256_DIGEST_BYTES as u64 * idx.len() as u64,
                workload: DpuWorkload::items(
                    d as u32,
                    idx.iter().map(|&i| padded_block_count(message_lengths[i])).collect(),
                    tasklets,
                ),
            })
            .collect(),
        _ => unreachable!("plan built for a different algorithm"),
    }
}

/// Prices a job from its sizes alone.
pub fn price_job(
    shape: &JobShape,
    strategy: Strategy,
    topology: &Topology,
    machine: &Machine,
) -> Result<PricedJob, JobError> {
    let p = &machine.profile;
    check_topology(topology, p)?;
    let n_dpus = topology.total_dpus();
    let (plan, cost) = match shape {
        JobShape::Aes { buffer_len } => (partition_aes(*buffer_len, n_dpus)?, &machine.kernels.aes128),
        JobShape::Sha { message_lengths } => {
            (partition_sha(message_lengths, n_dpus)?, &machine.kernels.sha256)
        }
    };
    cost.check_wram(topology.tasklets, p)?;

    let jobs = dpu_jobs(shape, &plan, topology.tasklets);
    let available = p.mram_bytes.saturating_sub(machine.mram_reserved_bytes);
    for j in &jobs {
        let needed = j.bytes_in + j.bytes_out;
        if needed > available {
            return Err(JobError::Capacity { dpu: j.workload.dpu_id, needed, available });
        }
    }

    let mut rank_costs = Vec::with_capacity(topology.ranks as usize);
    for rank in jobs.chunks(topology.dpus_per_rank as usize) {
        let ins: Vec<u64> = rank.iter().map(|j| j.bytes_in).collect();
        let outs: Vec<u64> = rank.iter().map(|j| j.bytes_out).collect();
        let workloads: Vec<DpuWorkload> = rank.iter().map(|j| j.workload.clone()).collect();
        rank_costs.push(RankCost {
            prepare: ins.iter().sum::<u64>() as f64 / p.host_prepare_rate,
            transfer_to: simulate_transfer(&ins, Direction::ToDpu, p),
            kernel: simulate_rank_kernel(&workloads, cost, p)?,
            transfer_from: simulate_transfer(&outs, Direction::FromDpu, p),
        });
    }

    let (key_broadcasts, broadcast_bytes, broadcast) = match shape {
        JobShape::Aes { .. } => {
            let per_rank = vec![EXPANDED_KEY_BYTES as u64; topology.dpus_per_rank as usize];
            let duration = simulate_transfer(&per_rank, Direction::ToDpu, p);
            (1, EXPANDED_KEY_BYTES as u64 * n_dpus as u64, Some(duration))
        }
        JobShape::Sha { .. } => (0, 0, None),
    };

    let timeline = schedule(strategy, &rank_costs, broadcast);
    Ok(PricedJob {
        strategy,
        topology: *topology,
        makespan: timeline.makespan(),
        phase_times: PhaseTimes::from_timeline(&timeline),
        bytes_to_dpu: jobs.iter().map(|j| j.bytes_in).sum(),
        bytes_from_dpu: jobs.iter().map(|j| j.bytes_out).sum(),
        plan,
        rank_costs,
        timeline,
        key_broadcasts,
        broadcast_bytes,
    })
}

/// Runs a job: the DPU programs produce the output, the model prices it.
pub fn run_job(
    workload: &Workload<'_>,
    strategy: Strategy,
    topology: &Topology,
    machine: &Machine,
) -> Result<JobResult, JobError> {
    let priced = price_job(&workload.shape(), strategy, topology, machine)?;
    let tasklets = topology.tasklets;
    let output = match (workload, &priced.plan) {
        (Workload::Aes { buffer, key }, PartitionPlan::Aes { slices }) => {
            let ks = key_expansion(key);
            let tables = GfLookupTables::shared();
            let cache = machine.kernels.aes128.wram_cache_bytes as usize;
            let parts: Vec<Vec<u8>> = slices
                .par_iter()
                .map(|s| {
                    let mram = &buffer[s.offset as usize..(s.offset + s.length) as usize];
                    run_aes_dpu(mram, &ks, tables, tasklets, cache)
                })
                .collect();
            JobOutput::Ciphertext(parts.concat())
        }
        (Workload::Sha { messages }, PartitionPlan::Sha { assignments }) => {
            let cache = machine.kernels.sha256.wram_cache_bytes as usize;
            let per_dpu: Vec<Vec<Sha256Digest>> = assignments
                .par_iter()
                .map(|idx| {
                    let resident: Vec<&[u8]> = idx.iter().map(|&i| messages[i].as_slice()).collect();
                    run_sha_dpu(&resident, tasklets, cache)
                })
                .collect();
            let mut digests = vec![Sha256Digest([0; 32]); messages.len()];
            for (idx, ds) in assignments.iter().zip(per_dpu) {
                for (&i, d) in idx.iter().zip(ds) {
                    digests[i] = d;
                }
            }
            JobOutput::Digests(digests)
        }
        _ => unreachable!("plan built for a different algorithm"),
    };
    Ok(JobResult { output, priced })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{aes128_encrypt_buffer, sha256_digest};
    use crate::machine::{validate_timeline, MIB};

    fn key() -> AesKey {
        AesKey::from_hex("000102030405060708090a0b0c0d0e0f").unwrap()
    }

    #[test]
    fn aes_job_matches_whole_buffer_encryption() {
        let buf: Vec<u8> = (0..16 * 1000).map(|i| (i % 253) as u8).collect();
        let expected = aes128_encrypt_buffer(&buf, &key_expansion(&key())).unwrap();
        let m = Machine::default();
        for s in Strategy::ALL {
            let r = run_job(&Workload::Aes { buffer: &buf, key: key() }, s, &Topology::new(2, 3, 11), &m)
                .unwrap();
            assert_eq!(r.output, JobOutput::Ciphertext(expected.clone()));
            assert!(validate_timeline(r.timeline()).is_empty());
            assert_eq!(r.priced.key_broadcasts, 1);
            assert_eq!(r.priced.bytes_to_dpu, buf.len() as u64);
            assert_eq!(r.priced.bytes_from_dpu, buf.len() as u64);
        }
    }

    #[test]
    fn sha_job_preserves_order() {
        let msgs: Vec<Vec<u8>> = (0..37).map(|i| vec![(i * 3) as u8; i * 17]).collect();
        let r = run_job(&Workload::Sha { messages: &msgs }, Strategy::Sync, &Topology::new(2, 5, 16), &Machine::default())
            .unwrap();
        let JobOutput::Digests(d) = r.output else { panic!() };
        for (m, d) in msgs.iter().zip(&d) {
            assert_eq!(*d, sha256_digest(m));
        }
        assert_eq!(r.priced.bytes_from_dpu, 32 * 37);
        assert_eq!(r.priced.key_broadcasts, 0);
    }

    #[test]
    fn sync_single_rank_phases_sum_to_makespan() {
        let shape = JobShape::Aes { buffer_len: 8 * MIB };
        let j = price_job(&shape, Strategy::Sync, &Topology::new(1, 64, 16), &Machine::default()).unwrap();
        let p = j.phase_times;
        let sum = p.prepare + p.cpu_to_dpu + p.kernel + p.dpu_to_cpu;
        assert!((sum - j.makespan).abs() <= 1e-12 * j.makespan);
    }

    #[test]
    fn mram_capacity_is_enforced() {
        // 63 MiB usable per DPU; input plus ciphertext must fit
        let shape = JobShape::Aes { buffer_len: 32 * MIB };
        let err = price_job(&shape, Strategy::Sync, &Topology::new(1, 1, 16), &Machine::default());
        assert!(matches!(err, Err(JobError::Capacity { dpu: 0, .. })));
        let ok = JobShape::Aes { buffer_len: 31 * MIB };
        assert!(price_job(&ok, Strategy::Sync, &Topology::new(1, 1, 16), &Machine::default()).is_ok());
    }

    #[test]
    fn topology_errors() {
        let m = Machine::default();
        let shape = JobShape::Aes { buffer_len: 1024 };
        for top in [
            Topology::new(0, 64, 16),
            Topology::new(41, 64, 16),
            Topology::new(1, 65, 16),
            Topology::new(1, 64, 0),
            Topology::new(1, 64, 25),
        ] {
            assert!(price_job(&shape, Strategy::Sync, &top, &m).is_err(), "{top:?}");
        }
        let faulty = Machine {
            profile: MachineProfile { usable_dpus: 2500, ..MachineProfile::default() },
            ..Machine::default()
        };
        assert!(price_job(&shape, Strategy::Sync, &Topology::new(40, 64, 16), &faulty).is_err());
    }
}
