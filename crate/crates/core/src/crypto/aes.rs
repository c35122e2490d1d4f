//! AES-128 encryption kernel.
//!
//! Byte-oriented and table-driven: SubBytes is an S-box lookup and
//! MixColumns reads the `mul2`/`mul3` tables instead of multiplying in the
//! field. The state is a 16-byte column-major array. Blocks are independent,
//! so a buffer can be split at any block boundary.

use super::tables::{GfLookupTables, ROUND_CONSTANTS, SBOX};
use super::tally::{NoTally, OpTally};
use super::{AesKey, CryptoError, ExpandedKey, StateBlock, AES_BLOCK_BYTES};

/// Host-side key schedule. Each word depends on the previous one, so this
/// is never split across tasklets or DPUs.
pub fn key_expansion(key: &AesKey) -> ExpandedKey {
    let mut ks = [0u8; 176];
    ks[..16].copy_from_slice(&key.0);
    for i in 4..44 {
        let mut word = [ks[4 * i - 4], ks[4 * i - 3], ks[4 * i - 2], ks[4 * i - 1]];
        if i % 4 == 0 {
            word = [
                SBOX[word[1] as usize] ^ ROUND_CONSTANTS[i / 4 - 1],
                SBOX[word[2] as usize],
                SBOX[word[3] as usize],
                SBOX[word[0] as usize],
            ];
        }
        for j in 0..4 {
            ks[4 * i + j] = ks[4 * i - 16 + j] ^ word[j];
        }
    }
    ExpandedKey(ks)
}

#[inline(always)]
fn add_round_key<T: OpTally>(state: &mut [u8; 16], round_key: &[u8], tally: &mut T) {
    for (s, k) in state.iter_mut().zip(round_key) {
        *s ^= *k;
    }
    tally.load(32, 1);
    tally.alu(16);
    tally.store(16, 1);
}

#[inline(always)]
fn sub_bytes<T: OpTally>(state: &mut [u8; 16], sbox: &[u8; 256], tally: &mut T) {
    for s in state.iter_mut() {
        *s = sbox[*s as usize];
    }
    tally.load(32, 1);
    tally.store(16, 1);
}

#[inline(always)]
fn shift_rows<T: OpTally>(state: &mut [u8; 16], tally: &mut T) {
    let t = *state;
    for c in 0..4 {
        state[1 + 4 * c] = t[1 + 4 * ((c + 1) % 4)];
        state[2 + 4 * c] = t[2 + 4 * ((c + 2) % 4)];
        state[3 + 4 * c] = t[3 + 4 * ((c + 3) % 4)];
    }
    // row 0 stays put
    tally.load(12, 1);
    tally.store(12, 1);
}

#[inline(always)]
fn mix_columns<T: OpTally>(state: &mut [u8; 16], tables: &GfLookupTables, tally: &mut T) {
    let (m2, m3) = (&tables.mul2, &tables.mul3);
    for col in state.chunks_exact_mut(4) {
        let [a0, a1, a2, a3] = [col[0], col[1], col[2], col[3]];
        col[0] = m2[a0 as usize] ^ m3[a1 as usize] ^ a2 ^ a3;
        col[1] = a0 ^ m2[a1 as usize] ^ m3[a2 as usize] ^ a3;
        col[2] = a0 ^ a1 ^ m2[a2 as usize] ^ m3[a3 as usize];
        col[3] = m3[a0 as usize] ^ a1 ^ a2 ^ m2[a3 as usize];
    }
    tally.load(4 * (4 + 8), 1);
    tally.alu(4 * 12);
    tally.store(4 * 4, 1);
}

/// Encrypts one block in place, reporting executed operations to `tally`.
pub fn encrypt_state<T: OpTally>(
    state: &mut [u8; 16],
    ks: &ExpandedKey,
    tables: &GfLookupTables,
    tally: &mut T,
) {
    add_round_key(state, ks.round_key(0), tally);
    for round in 1..10 {
        sub_bytes(state, &tables.sbox, tally);
        shift_rows(state, tally);
        mix_columns(state, tables, tally);
        add_round_key(state, ks.round_key(round), tally);
    }
    sub_bytes(state, &tables.sbox, tally);
    shift_rows(state, tally);
    add_round_key(state, ks.round_key(10), tally);
}

pub fn aes128_encrypt_block(
    block: StateBlock,
    ks: &ExpandedKey,
    tables: &GfLookupTables,
) -> StateBlock {
    let mut state = block.0;
    encrypt_state(&mut state, ks, tables, &mut NoTally);
    StateBlock(state)
}

/// Encrypts whole blocks in place. The caller guarantees alignment.
pub fn encrypt_blocks_in_place(buf: &mut [u8], ks: &ExpandedKey, tables: &GfLookupTables) {
    debug_assert!(buf.len().is_multiple_of(AES_BLOCK_BYTES));
    for chunk in buf.chunks_exact_mut(AES_BLOCK_BYTES) {
        let state: &mut [u8; 16] = chunk.try_into().unwrap();
        encrypt_state(state, ks, tables, &mut NoTally);
    }
}

pub fn aes128_encrypt_buffer(buffer: &[u8], ks: &ExpandedKey) -> Result<Vec<u8>, CryptoError> {
    if !buffer.len().is_multiple_of(AES_BLOCK_BYTES) {
        return Err(CryptoError::Alignment { len: buffer.len(), unit: AES_BLOCK_BYTES });
    }
    let mut out = buffer.to_vec();
    encrypt_blocks_in_place(&mut out, ks, GfLookupTables::shared());
    Ok(out)
}
