//! SHA-256 kernel.
//!
//! A message is consumed in 64-byte blocks, strictly in order: each
//! compression needs the chaining value left by the previous block, which is
//! why a single message never spreads over several tasklets or DPUs.
//! [`Sha256Stream`] accepts input in arbitrary pieces so a tasklet can feed
//! it straight from its WRAM cache.

use super::tally::{NoTally, OpTally};
use super::{Message, Sha256Digest, SHA256_BLOCK_BYTES, SHA256_MAX_MESSAGE_BYTES};

const K: [u32; 64] = [
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
];

const H0: [u32; 8] = [
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a, 0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
];

/// One compression of a 64-byte block into the chaining value.
pub fn compress<T: OpTally>(state: &mut [u32; 8], block: &[u8; 64], tally: &mut T) {
    let mut w = [0u32; 64];
    for (t, word) in block.chunks_exact(4).enumerate() {
        w[t] = u32::from_be_bytes([word[0], word[1], word[2], word[3]]);
    }
    // four byte loads, three shifts and three ors per word
    tally.load(64, 1);
    tally.alu(16 * 6);
    tally.store(16, 4);

    for t in 16..64 {
        let s0 = w[t - 15].rotate_right(7) ^ w[t - 15].rotate_right(18) ^ (w[t - 15] >> 3);
        let s1 = w[t - 2].rotate_right(17) ^ w[t - 2].rotate_right(19) ^ (w[t - 2] >> 10);
        w[t] = w[t - 16].wrapping_add(s0).wrapping_add(w[t - 7]).wrapping_add(s1);
    }
    tally.load(48 * 4, 4);
    tally.alu(48 * 13);
    tally.store(48, 4);

    let [mut a, mut b, mut c, mut d, mut e, mut f, mut g, mut h] = *state;
    tally.load(8, 4);
    for t in 0..64 {
        let big_s1 = e.rotate_right(6) ^ e.rotate_right(11) ^ e.rotate_right(25);
        let ch = (e & f) ^ (!e & g);
        let t1 = h.wrapping_add(big_s1).wrapping_add(ch).wrapping_add(K[t]).wrapping_add(w[t]);
        let big_s0 = a.rotate_right(2) ^ a.rotate_right(13) ^ a.rotate_right(22);
        let maj = (a & b) ^ (a & c) ^ (b & c);
        let t2 = big_s0.wrapping_add(maj);
        h = g;
        g = f;
        f = e;
        e = d.wrapping_add(t1);
        d = c;
        c = b;
        b = a;
        a = t1.wrapping_add(t2);
    }
    tally.load(64 * 2, 4);
    tally.alu(64 * 26);

    for (s, v) in state.iter_mut().zip([a, b, c, d, e, f, g, h]) {
        *s = s.wrapping_add(v);
    }
    tally.alu(8);
    tally.store(8, 4);
}

/// Bytes appended after a `len`-byte message: 0x80, zeros, and the 64-bit
/// big-endian bit length. Returns the tail buffer and how much of it is used.
fn padding_tail(len: u64) -> ([u8; 72], usize) {
    let mut tail = [0u8; 72];
    tail[0] = 0x80;
    let used_in_block = (len % 64) as usize;
    let zeros = (55 + 64 - used_in_block) % 64;
    let n = 1 + zeros + 8;
    tail[1 + zeros..n].copy_from_slice(&(len.wrapping_mul(8)).to_be_bytes());
    (tail, n)
}

pub fn sha256_pad(message: &Message) -> Vec<u8> {
    let (tail, n) = padding_tail(message.len() as u64);
    let mut out = Vec::with_capacity(message.len() + n);
    out.extend_from_slice(&message.0);
    out.extend_from_slice(&tail[..n]);
    out
}

/// Number of 64-byte compressions needed for a message of `len` bytes.
pub fn padded_block_count(len: u64) -> u64 {
    (len + 9).div_ceil(SHA256_BLOCK_BYTES as u64)
}

#[derive(Clone)]
pub struct Sha256Stream {
    state: [u32; 8],
    pending: [u8; 64],
    pending_len: usize,
    total_len: u64,
}

impl Default for Sha256Stream {
    fn default() -> Self {
        Self::new()
    }
}

impl Sha256Stream {
    pub fn new() -> Self {
        Sha256Stream { state: H0, pending: [0; 64], pending_len: 0, total_len: 0 }
    }

    pub fn update(&mut self, data: &[u8]) {
        self.update_tallied(data, &mut NoTally);
    }

    pub fn update_tallied<T: OpTally>(&mut self, mut data: &[u8], tally: &mut T) {
        self.total_len += data.len() as u64;
        assert!(self.total_len <= SHA256_MAX_MESSAGE_BYTES, "message too long for SHA-256");

        if self.pending_len > 0 {
            let take = (64 - self.pending_len).min(data.len());
            self.pending[self.pending_len..self.pending_len + take].copy_from_slice(&data[..take]);
            self.pending_len += take;
            data = &data[take..];
            if self.pending_len < 64 {
                return;
            }
            let block = self.pending;
            compress(&mut self.state, &block, tally);
            self.pending_len = 0;
        }
        let mut blocks = data.chunks_exact(64);
        for block in &mut blocks {
            compress(&mut self.state, block.try_into().unwrap(), tally);
        }
        let rest = blocks.remainder();
        self.pending[..rest.len()].copy_from_slice(rest);
        self.pending_len = rest.len();
    }

    pub fn finalize(self) -> Sha256Digest {
        self.finalize_tallied(&mut NoTally)
    }

    pub fn finalize_tallied<T: OpTally>(mut self, tally: &mut T) -> Sha256Digest {
        let total = self.total_len;
        let (tail, n) = padding_tail(total);
        self.update_tallied(&tail[..n], tally);
        debug_assert_eq!(self.pending_len, 0);
        let mut out = [0u8; 32];
        for (chunk, word) in out.chunks_exact_mut(4).zip(self.state) {
            chunk.copy_from_slice(&word.to_be_bytes());
        }
        tally.store(8, 4);
        Sha256Digest(out)
    }
}

pub fn sha256_digest(message: &[u8]) -> Sha256Digest {
    let mut s = Sha256Stream::new();
    s.update(message);
    s.finalize()
}
