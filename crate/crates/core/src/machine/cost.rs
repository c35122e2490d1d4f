use serde::{Deserialize, Serialize};

use super::profile::{MachineProfile, MRAM_ALIGNMENT};
use super::MachineError;

/// Per-unit price of a kernel. A unit is one 16-byte AES block or one
/// 64-byte SHA-256 compression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelCost {
    pub instructions_per_unit: u64,
    pub mram_read_bytes_per_unit: u64,
    pub mram_write_bytes_per_unit: u64,
    /// Private WRAM cache of each tasklet.
    pub wram_cache_bytes: u64,
    pub unit_bytes: u64,
    /// Written once when an item (a whole message) completes.
    #[serde(default)]
    pub mram_write_bytes_per_item: u64,
}

impl KernelCost {
    pub fn validate(&self) -> Result<(), MachineError> {
        let bad = |m: &str| Err(MachineError::InvalidCost(m.to_string()));
        if self.instructions_per_unit == 0 {
            return bad("instructions_per_unit must be positive");
        }
        if self.unit_bytes == 0 {
            return bad("unit_bytes must be positive");
        }
        if self.wram_cache_bytes == 0 || !self.wram_cache_bytes.is_multiple_of(MRAM_ALIGNMENT) {
            return bad("wram_cache_bytes must be a positive multiple of 8");
        }
        Ok(())
    }

    /// Every tasklet's cache must fit in WRAM at once.
    pub fn check_wram(&self, tasklets: u32, profile: &MachineProfile) -> Result<(), MachineError> {
        if self.wram_cache_bytes * tasklets as u64 > profile.wram_bytes {
            return Err(MachineError::WramOverflow {
                tasklets,
                cache_bytes: self.wram_cache_bytes,
                wram_bytes: profile.wram_bytes,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Work {
    /// Interchangeable units, split evenly with the remainder going to the
    /// lowest tasklet ids.
    Units(u64),
    /// Indivisible items given by their unit counts, dealt round-robin.
    Items(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpuWorkload {
    pub dpu_id: u32,
    pub tasklets: u32,
    pub work: Work,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TaskletShare {
    pub units: u64,
    /// Unit counts of the items this tasklet owns; empty for `Work::Units`.
    pub items: Vec<u64>,
}

impl DpuWorkload {
    pub fn units(dpu_id: u32, total_units: u64, tasklets: u32) -> Self {
        DpuWorkload { dpu_id, tasklets, work: Work::Units(total_units) }
    }

    pub fn items(dpu_id: u32, items: Vec<u64>, tasklets: u32) -> Self {
        DpuWorkload { dpu_id, tasklets, work: Work::Items(items) }
    }

    pub fn total_units(&self) -> u64 {
        match &self.work {
            Work::Units(n) => *n,
            Work::Items(items) => items.iter().sum(),
        }
    }

    /// Work per tasklet id, indexed by `me()`.
    pub fn tasklet_shares(&self) -> Vec<TaskletShare> {
        let t = self.tasklets.max(1) as usize;
        match &self.work {
            Work::Units(n) => {
                let (base, extra) = (n / t as u64, (n % t as u64) as usize);
                (0..t)
                    .map(|id| TaskletShare {
                        units: base + u64::from(id < extra),
                        items: Vec::new(),
                    })
                    .collect()
            }
            Work::Items(items) => {
                let mut shares = vec![TaskletShare::default(); t];
                for (i, &u) in items.iter().enumerate() {
                    let s = &mut shares[i % t];
                    s.units += u;
                    s.items.push(u);
                }
                shares
            }
        }
    }
}

/// Instructions retired per cycle with `tasklets` resident.
pub fn effective_ipc(tasklets: u32, profile: &MachineProfile) -> Result<f64, MachineError> {
    if tasklets == 0 || tasklets > profile.max_tasklets {
        return Err(MachineError::TaskletRange { tasklets, max: profile.max_tasklets });
    }
    let sat = profile.pipeline_saturation_tasklets;
    Ok(tasklets.min(sat) as f64 / sat as f64)
}

/// Cycles for one MRAM<->WRAM transfer: flat for small sizes, then linear.
pub fn mram_access_cycles(
    offset: u64,
    bytes: u64,
    profile: &MachineProfile,
) -> Result<f64, MachineError> {
    if bytes == 0 || bytes > profile.max_mram_access_bytes {
        return Err(MachineError::MramAccessSize { bytes, max: profile.max_mram_access_bytes });
    }
    if !offset.is_multiple_of(MRAM_ALIGNMENT) || !bytes.is_multiple_of(MRAM_ALIGNMENT) {
        return Err(MachineError::MramMisaligned { offset, bytes, align: MRAM_ALIGNMENT });
    }
    Ok(access(bytes, profile))
}

fn access(bytes: u64, profile: &MachineProfile) -> f64 {
    profile.mram_fixed_cycles.max(profile.mram_cycles_per_byte * bytes as f64)
}

/// Cycles to stream `bytes` through a cache, one aligned access per refill.
fn stream_cycles(bytes: u64, cache_bytes: u64, profile: &MachineProfile) -> f64 {
    if bytes == 0 {
        return 0.0;
    }
    let chunk = cache_bytes.min(profile.max_mram_access_bytes) / MRAM_ALIGNMENT * MRAM_ALIGNMENT;
    let (full, rem) = (bytes / chunk, bytes % chunk);
    let mut cycles = full as f64 * access(chunk, profile);
    if rem > 0 {
        cycles += access(rem.div_ceil(MRAM_ALIGNMENT) * MRAM_ALIGNMENT, profile);
    }
    cycles
}

fn share_mram_cycles(share: &TaskletShare, cost: &KernelCost, profile: &MachineProfile) -> f64 {
    let stream = |units: u64| {
        stream_cycles(units * cost.mram_read_bytes_per_unit, cost.wram_cache_bytes, profile)
            + stream_cycles(units * cost.mram_write_bytes_per_unit, cost.wram_cache_bytes, profile)
    };
    if share.items.is_empty() {
        return stream(share.units);
    }
    let per_item_write = if cost.mram_write_bytes_per_item > 0 {
        stream_cycles(cost.mram_write_bytes_per_item, cost.wram_cache_bytes, profile)
    } else {
        0.0
    };
    share.items.iter().map(|&u| stream(u) + per_item_write).sum()
}

/// Cycles to retire every tasklet's instructions: the total divided by the
/// IPC of the tasklets that have any work.
fn pipeline_cycles(per_tasklet: &[u64], profile: &MachineProfile) -> f64 {
    let active = per_tasklet.iter().filter(|&&n| n > 0).count() as u32;
    if active == 0 {
        return 0.0;
    }
    let sat = profile.pipeline_saturation_tasklets;
    let total: u64 = per_tasklet.iter().sum();
    total as f64 * sat as f64 / active.min(sat) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelCycles {
    pub compute: f64,
    pub mram: f64,
}

impl KernelCycles {
    pub fn total(&self) -> f64 {
        self.compute + self.mram
    }
}

pub fn dpu_kernel_cycles(
    workload: &DpuWorkload,
    cost: &KernelCost,
    profile: &MachineProfile,
) -> Result<KernelCycles, MachineError> {
    effective_ipc(workload.tasklets, profile)?;
    cost.validate()?;
    cost.check_wram(workload.tasklets, profile)?;
    let shares = workload.tasklet_shares();
    let per_tasklet: Vec<u64> = shares.iter().map(|s| s.units * cost.instructions_per_unit).collect();
    let compute = pipeline_cycles(&per_tasklet, profile);
    let mram = shares.iter().map(|s| share_mram_cycles(s, cost, profile)).sum();
    Ok(KernelCycles { compute, mram })
}

/// Kernel time of one DPU in seconds.
pub fn simulate_dpu_kernel(
    workload: &DpuWorkload,
    cost: &KernelCost,
    profile: &MachineProfile,
) -> Result<f64, MachineError> {
    Ok(dpu_kernel_cycles(workload, cost, profile)?.total() / profile.dpu_frequency)
}

/// A rank completes when its slowest DPU does.
pub fn simulate_rank_kernel(
    workloads: &[DpuWorkload],
    cost: &KernelCost,
    profile: &MachineProfile,
) -> Result<f64, MachineError> {
    let mut slowest = 0.0f64;
    for w in workloads {
        slowest = slowest.max(simulate_dpu_kernel(w, cost, profile)?);
    }
    Ok(slowest)
}
