use serde::{Deserialize, Serialize};

use crate::config::{measure_aes_block, measure_sha_block};
use crate::machine::KernelCost;

use super::Algorithm;

/// Peak rates of a processor-centric host.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostProfile {
    pub name: String,
    pub peak_ops_per_second: f64,
    pub peak_bytes_per_second: f64,
}

impl Default for HostProfile {
    /// Xeon Silver 4215: 8 cores at 2.5 GHz, 16 int32 lanes on 2 vector
    /// ports; six channels of DDR4-2666.
    fn default() -> Self {
        HostProfile {
            name: "xeon-silver-4215".into(),
            peak_ops_per_second: 8.0 * 2.5e9 * 16.0 * 2.0,
            peak_bytes_per_second: 6.0 * 2666e6 * 8.0,
        }
    }
}

impl HostProfile {
    pub fn ridge_point(&self) -> f64 {
        self.peak_ops_per_second / self.peak_bytes_per_second
    }
}

/// Operations and the memory traffic they generate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RooflineInput {
    pub operations: f64,
    pub bytes: f64,
}

impl RooflineInput {
    /// Arithmetic operations over bytes loaded and stored by one kernel unit,
    /// counted on the instrumented kernel. Table lookups count as traffic.
    pub fn measured(algorithm: Algorithm) -> Self {
        let t = match algorithm {
            Algorithm::Aes128 => measure_aes_block(),
            Algorithm::Sha256 => measure_sha_block(),
        };
        RooflineInput { operations: t.alu_ops as f64, bytes: t.memory_bytes() as f64 }
    }

    /// All instructions of one unit over its payload bytes.
    pub fn from_cost(cost: &KernelCost) -> Self {
        RooflineInput {
            operations: cost.instructions_per_unit as f64,
            bytes: cost.unit_bytes as f64,
        }
    }

    pub fn intensity(&self) -> f64 {
        self.operations / self.bytes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundedness {
    MemoryBound,
    ComputeBound,
}

impl Boundedness {
    pub fn name(&self) -> &'static str {
        match self {
            Boundedness::MemoryBound => "memory_bound",
            Boundedness::ComputeBound => "compute_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCharacterization {
    pub operations_per_byte: f64,
    pub machine_ridge_point: f64,
    pub classification: Boundedness,
    /// Instructions per payload byte, for reference.
    pub payload_operations_per_byte: Option<f64>,
}

pub fn characterize(input: RooflineInput, host: &HostProfile) -> KernelCharacterization {
    let operations_per_byte = input.intensity();
    let machine_ridge_point = host.ridge_point();
    let classification = if operations_per_byte < machine_ridge_point {
        Boundedness::MemoryBound
    } else {
        Boundedness::ComputeBound
    };
    KernelCharacterization {
        operations_per_byte,
        machine_ridge_point,
        classification,
        payload_operations_per_byte: None,
    }
}

/// Places a kernel on the host roofline by its measured memory traffic.
pub fn characterize_kernel(algorithm: Algorithm, cost: &KernelCost, host: &HostProfile) -> KernelCharacterization {
    KernelCharacterization {
        payload_operations_per_byte: Some(RooflineInput::from_cost(cost).intensity()),
        ..characterize(RooflineInput::measured(algorithm), host)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::KernelCosts;

    #[test]
    fn both_kernels_are_memory_bound() {
        let k = KernelCosts::default();
        let host = HostProfile::default();
        for (alg, cost) in [(Algorithm::Aes128, &k.aes128), (Algorithm::Sha256, &k.sha256)] {
            let c = characterize_kernel(alg, cost, &host);
            assert_eq!(c.classification, Boundedness::MemoryBound, "{alg}: {c:?}");
        }
    }

    #[test]
    fn above_the_ridge_is_compute_bound() {
        let host = HostProfile::default();
        let ridge = host.ridge_point();
        let hi = RooflineInput { operations: ridge * 1.01, bytes: 1.0 };
        assert_eq!(characterize(hi, &host).classification, Boundedness::ComputeBound);
        let at = RooflineInput { operations: ridge, bytes: 1.0 };
        assert_eq!(characterize(at, &host).classification, Boundedness::ComputeBound);
        let lo = RooflineInput { operations: ridge * 0.99, bytes: 1.0 };
        assert_eq!(characterize(lo, &host).classification, Boundedness::MemoryBound);
    }

    #[test]
    fn payload_intensity_sits_above_the_ridge() {
        // counting every instruction against payload bytes alone places AES
        // far to the right of the ridge; the traffic-based figure does not
        let k = KernelCosts::default();
        let c = characterize(RooflineInput::from_cost(&k.aes128), &HostProfile::default());
        assert_eq!(c.classification, Boundedness::ComputeBound);
        assert_eq!(RooflineInput::from_cost(&k.aes128).intensity(), 152.0);
    }
}
