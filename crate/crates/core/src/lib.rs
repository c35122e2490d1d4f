//! Cryptographic kernels for a simulated near-memory processing machine.
//!
//! * [`crypto`]: AES-128 and SHA-256 structured as DPU kernels, plus
//!   table-free reference implementations.
//! * [`machine`]: the analytic model of ranks, DPUs, tasklets and memories.
//! * [`orchestrator`]: host-side partitioning and the three rank scheduling
//!   strategies.
//! * [`bench`]: scaling experiments, host baseline, roofline classification
//!   and CSV output.

pub mod crypto;

pub mod bench;
pub mod cli;
pub mod config;
pub mod machine;
pub mod orchestrator;

pub use crypto::reference;
