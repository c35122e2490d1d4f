use serde::{Deserialize, Serialize};

use super::MachineProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToDpu,
    FromDpu,
}

/// One batched transfer between the host and the DPUs of a single rank.
pub fn simulate_transfer(bytes_per_dpu: &[u64], direction: Direction, profile: &MachineProfile) -> f64 {
    let total: u64 = bytes_per_dpu.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let bandwidth = match direction {
        Direction::ToDpu => profile.cpu_to_dpu_bandwidth_per_rank,
        Direction::FromDpu => profile.dpu_to_cpu_bandwidth_per_rank,
    };
    total as f64 / bandwidth
}
