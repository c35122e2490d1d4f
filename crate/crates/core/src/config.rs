//! The JSON configuration document shared by the CLI, the simulator and the
//! experiment harness.

use serde::{Deserialize, Serialize};

use crate::bench::{ExperimentSpec, HostProfile};
use crate::crypto::aes::{encrypt_state, key_expansion};
use crate::crypto::sha256::compress;
use crate::crypto::tally::CountingTally;
use crate::crypto::{build_gf_tables, AesKey, GfLookupTables, AES_BLOCK_BYTES, SHA256_BLOCK_BYTES, SHA256_DIGEST_BYTES};
use crate::machine::{KernelCost, MachineProfile, MIB, MRAM_ALIGNMENT};

/// Per-tasklet WRAM cache: 24 tasklets x 2 KiB leaves room for the tables.
pub const DEFAULT_CACHE_BYTES: u64 = 2048;
pub const DEFAULT_MRAM_RESERVED_BYTES: u64 = MIB;

/// Executed-operation counts of one kernel unit, from the instrumented kernels.
pub fn measure_aes_block() -> CountingTally {
    let ks = key_expansion(&AesKey([0x2b; 16]));
    let mut tally = CountingTally::default();
    let mut state = [0u8; 16];
    encrypt_state(&mut state, &ks, &build_gf_tables(), &mut tally);
    tally
}

pub fn measure_sha_block() -> CountingTally {
    let mut tally = CountingTally::default();
    let mut state = [0u32; 8];
    compress(&mut state, &[0u8; 64], &mut tally);
    tally
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelCosts {
    pub aes128: KernelCost,
    pub sha256: KernelCost,
}

impl KernelCosts {
    /// Instruction counts taken from the instrumented kernels.
    pub fn measured() -> Self {
        KernelCosts {
            aes128: KernelCost {
                instructions_per_unit: measure_aes_block().instructions(),
                mram_read_bytes_per_unit: AES_BLOCK_BYTES as u64,
                mram_write_bytes_per_unit: AES_BLOCK_BYTES as u64,
                wram_cache_bytes: DEFAULT_CACHE_BYTES,
                unit_bytes: AES_BLOCK_BYTES as u64,
                mram_write_bytes_per_item: 0,
            },
            sha256: KernelCost {
                instructions_per_unit: measure_sha_block().instructions(),
                mram_read_bytes_per_unit: SHA256_BLOCK_BYTES as u64,
                mram_write_bytes_per_unit: 0,
                wram_cache_bytes: DEFAULT_CACHE_BYTES,
                unit_bytes: SHA256_BLOCK_BYTES as u64,
                mram_write_bytes_per_item: SHA256_DIGEST_BYTES as u64,
            },
        }
    }
}

impl Default for KernelCosts {
    fn default() -> Self {
        Self::measured()
    }
}

fn default_reserved() -> u64 {
    DEFAULT_MRAM_RESERVED_BYTES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub profile: MachineProfile,
    #[serde(default)]
    pub kernels: KernelCosts,
    #[serde(default)]
    pub host: HostProfile,
    /// MRAM per DPU held back for runtime metadata.
    #[serde(default = "default_reserved")]
    pub mram_reserved_bytes: u64,
    #[serde(default)]
    pub experiments: Vec<ExperimentSpec>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            profile: MachineProfile::default(),
            kernels: KernelCosts::default(),
            host: HostProfile::default(),
            mram_reserved_bytes: DEFAULT_MRAM_RESERVED_BYTES,
            experiments: Vec::new(),
        }
    }
}

impl Config {
    pub fn from_json(s: &str) -> Result<Self, String> {
        let c: Config = serde_json::from_str(s).map_err(|e| e.to_string())?;
        c.profile.validate().map_err(|e| e.to_string())?;
        Ok(c)
    }

    /// Profile invariants plus whether the kernels fit the DPU memories at
    /// the largest tasklet count.
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.profile.violations();
        if !out.is_empty() {
            return out;
        }
        let p = &self.profile;
        for (name, cost, tables) in [
            ("aes128", &self.kernels.aes128, GfLookupTables::WRAM_BYTES as u64),
            ("sha256", &self.kernels.sha256, 0),
        ] {
            if let Err(e) = cost.validate() {
                out.push(format!("{name} kernel cost: {e}"));
                continue;
            }
            let wram = cost.wram_cache_bytes * p.max_tasklets as u64 + tables;
            if wram > p.wram_bytes {
                out.push(format!(
                    "{name} needs {wram} bytes of WRAM at {} tasklets, wram_bytes is {}",
                    p.max_tasklets, p.wram_bytes
                ));
            }
            if cost.wram_cache_bytes % MRAM_ALIGNMENT != 0 {
                out.push(format!("{name} wram_cache_bytes must be a multiple of {MRAM_ALIGNMENT}"));
            }
        }
        if self.mram_reserved_bytes >= p.mram_bytes {
            out.push(format!(
                "mram_reserved_bytes ({}) must be below mram_bytes ({})",
                self.mram_reserved_bytes, p.mram_bytes
            ));
        }
        out
    }

    pub fn machine(&self) -> crate::orchestrator::Machine {
        crate::orchestrator::Machine {
            profile: self.profile.clone(),
            kernels: self.kernels.clone(),
            mram_reserved_bytes: self.mram_reserved_bytes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measured_counts_are_frozen() {
        // 11 key additions, 10 S-box passes and row shifts, 9 column mixes
        let aes = measure_aes_block();
        assert_eq!((aes.alu_ops, aes.loads, aes.stores), (608, 1224, 600));
        assert_eq!(aes.instructions(), 2432);
        // word loads, 48 schedule steps, 64 rounds, feed-forward
        let sha = measure_sha_block();
        assert_eq!((sha.alu_ops, sha.loads, sha.stores), (2392, 392, 72));
        assert_eq!(sha.instructions(), 2856);
    }

    #[test]
    fn empty_config_uses_defaults() {
        let c = Config::from_json("{}").unwrap();
        assert_eq!(c, Config::default());
        assert!(Config::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn default_config_is_consistent() {
        assert!(Config::default().violations().is_empty());
        let mut c = Config::default();
        c.kernels.aes128.wram_cache_bytes = 4096;
        assert_eq!(c.violations().len(), 1, "{:?}", c.violations());
        c.mram_reserved_bytes = c.profile.mram_bytes;
        assert_eq!(c.violations().len(), 2);
    }
}
