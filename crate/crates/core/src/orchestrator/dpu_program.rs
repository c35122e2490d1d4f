//! Functional emulation of the DPU programs.
//!
//! Each tasklet owns the share [`DpuWorkload::tasklet_shares`] assigns it,
//! pulls its input from MRAM through a private WRAM cache one refill at a
//! time, and writes results back to MRAM. The pricing model uses the same
//! share rule, so what is priced is what runs.

use crate::crypto::aes::encrypt_blocks_in_place;
use crate::crypto::{ExpandedKey, GfLookupTables, Sha256Digest, Sha256Stream, AES_BLOCK_BYTES};
use crate::machine::DpuWorkload;

/// Encrypts one DPU's MRAM buffer into its `cryptedBuffer`.
pub fn run_aes_dpu(
    mram_in: &[u8],
    ks: &ExpandedKey,
    tables: &GfLookupTables,
    tasklets: u32,
    cache_bytes: usize,
) -> Vec<u8> {
    let blocks = (mram_in.len() / AES_BLOCK_BYTES) as u64;
    let shares = DpuWorkload::units(0, blocks, tasklets).tasklet_shares();
    let lines = (cache_bytes / AES_BLOCK_BYTES).max(1) * AES_BLOCK_BYTES;
    let mut mram_out = vec![0u8; mram_in.len()];
    let mut cache = vec![0u8; lines];

    let mut start = 0usize;
    for share in shares {
        let end = start + share.units as usize * AES_BLOCK_BYTES;
        let mut pos = start;
        while pos < end {
            let n = lines.min(end - pos);
            cache[..n].copy_from_slice(&mram_in[pos..pos + n]);
            encrypt_blocks_in_place(&mut cache[..n], ks, tables);
            mram_out[pos..pos + n].copy_from_slice(&cache[..n]);
            pos += n;
        }
        start = end;
    }
    mram_out
}

/// Hashes the messages resident on one DPU, returning digests in message
/// order. Message `i` belongs to tasklet `i % tasklets`.
pub fn run_sha_dpu(messages: &[&[u8]], tasklets: u32, cache_bytes: usize) -> Vec<Sha256Digest> {
    let t = tasklets.max(1) as usize;
    let mut digests = vec![Sha256Digest([0; 32]); messages.len()];
    let mut cache = vec![0u8; cache_bytes.max(64)];
    for tasklet in 0..t {
        for (i, msg) in messages.iter().enumerate().skip(tasklet).step_by(t) {
            let mut stream = Sha256Stream::new();
            for chunk in msg.chunks(cache.len()) {
                cache[..chunk.len()].copy_from_slice(chunk);
                stream.update(&cache[..chunk.len()]);
            }
            digests[i] = stream.finalize();
        }
    }
    digests
}
