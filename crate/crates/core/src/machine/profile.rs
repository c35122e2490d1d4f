use serde::{Deserialize, Serialize};

use super::MachineError;

pub const KIB: u64 = 1024;
pub const MIB: u64 = 1024 * 1024;

/// Every parameter of the simulated machine.
///
/// Sizes are per DPU, bandwidths are per rank. The MRAM access constants
/// and transfer bandwidths are model parameters, not measured values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineProfile {
    pub dpus_per_rank: u32,
    pub num_ranks: u32,
    pub usable_dpus: u32,
    /// Hz
    pub dpu_frequency: f64,
    pub max_tasklets: u32,
    pub pipeline_saturation_tasklets: u32,
    pub wram_bytes: u64,
    pub mram_bytes: u64,
    pub iram_bytes: u64,
    /// bytes/s, host to the DPUs of one rank
    pub cpu_to_dpu_bandwidth_per_rank: f64,
    /// bytes/s, DPUs of one rank to host
    pub dpu_to_cpu_bandwidth_per_rank: f64,
    /// bytes/s of serial host-side buffer preparation
    pub host_prepare_rate: f64,
    pub mram_fixed_cycles: f64,
    pub mram_cycles_per_byte: f64,
    /// Largest single MRAM<->WRAM transfer; accesses are 8-byte aligned.
    pub max_mram_access_bytes: u64,
}

/// MRAM transfers must start and end on this boundary.
pub const MRAM_ALIGNMENT: u64 = 8;

pub fn default_profile() -> MachineProfile {
    MachineProfile {
        dpus_per_rank: 64,
        num_ranks: 40,
        usable_dpus: 2560,
        dpu_frequency: 450e6,
        max_tasklets: 24,
        pipeline_saturation_tasklets: 11,
        wram_bytes: 64 * KIB,
        mram_bytes: 64 * MIB,
        iram_bytes: 24 * KIB,
        cpu_to_dpu_bandwidth_per_rank: 6.68e9,
        dpu_to_cpu_bandwidth_per_rank: 4.74e9,
        host_prepare_rate: 16e9,
        mram_fixed_cycles: 64.0,
        mram_cycles_per_byte: 0.5,
        max_mram_access_bytes: 2048,
    }
}

impl Default for MachineProfile {
    fn default() -> Self {
        default_profile()
    }
}

impl MachineProfile {
    pub fn total_dpus(&self) -> u64 {
        self.dpus_per_rank as u64 * self.num_ranks as u64
    }

    pub fn from_json(s: &str) -> Result<Self, MachineError> {
        let p: MachineProfile =
            serde_json::from_str(s).map_err(|e| MachineError::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    /// Checks the profile invariants, reporting every one that fails.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let counts = [
            ("dpus_per_rank", self.dpus_per_rank as u64),
            ("num_ranks", self.num_ranks as u64),
            ("usable_dpus", self.usable_dpus as u64),
            ("max_tasklets", self.max_tasklets as u64),
            ("pipeline_saturation_tasklets", self.pipeline_saturation_tasklets as u64),
            ("wram_bytes", self.wram_bytes),
            ("mram_bytes", self.mram_bytes),
            ("iram_bytes", self.iram_bytes),
            ("max_mram_access_bytes", self.max_mram_access_bytes),
        ];
        for (name, v) in counts {
            if v == 0 {
                out.push(format!("{name} must be strictly positive"));
            }
        }
        let rates = [
            ("dpu_frequency", self.dpu_frequency),
            ("cpu_to_dpu_bandwidth_per_rank", self.cpu_to_dpu_bandwidth_per_rank),
            ("dpu_to_cpu_bandwidth_per_rank", self.dpu_to_cpu_bandwidth_per_rank),
            ("host_prepare_rate", self.host_prepare_rate),
            ("mram_fixed_cycles", self.mram_fixed_cycles),
            ("mram_cycles_per_byte", self.mram_cycles_per_byte),
        ];
        for (name, v) in rates {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!("{name} must be finite and strictly positive"));
            }
        }
        if self.usable_dpus as u64 > self.total_dpus() {
            out.push(format!(
                "usable_dpus ({}) must not exceed dpus_per_rank x num_ranks ({})",
                self.usable_dpus,
                self.total_dpus()
            ));
        }
        if self.pipeline_saturation_tasklets > self.max_tasklets {
            out.push(format!(
                "pipeline_saturation_tasklets ({}) must not exceed max_tasklets ({})",
                self.pipeline_saturation_tasklets, self.max_tasklets
            ));
        }
        if !self.max_mram_access_bytes.is_multiple_of(MRAM_ALIGNMENT) {
            out.push(format!(
                "max_mram_access_bytes ({}) must be a multiple of {MRAM_ALIGNMENT}",
                self.max_mram_access_bytes
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<(), MachineError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(MachineError::InvalidProfile(v))
        }
    }
}
