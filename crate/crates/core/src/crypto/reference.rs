//! Reference AES-128 and SHA-256.
//!
//! Nothing here touches the kernel tables. Field multiplication is done by
//! shift-and-reduce, the S-box is derived from multiplicative inverses and
//! the affine map, and the SHA-256 constants are computed from integer roots
//! of primes. These functions are slow and exist to check the kernels.

use std::sync::OnceLock;

/// Product in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1.
pub fn gf_mul(a: u8, b: u8) -> u8 {
    let mut acc: u16 = 0;
    let (a, b) = (a as u16, b as u16);
    for bit in 0..8 {
        if b & (1 << bit) != 0 {
            acc ^= a << bit;
        }
    }
    for bit in (8..16).rev() {
        if acc & (1 << bit) != 0 {
            acc ^= 0x11b << (bit - 8);
        }
    }
    acc as u8
}

/// Multiplicative inverse by exhaustive search; 0 maps to 0.
pub fn gf_inv(a: u8) -> u8 {
    if a == 0 {
        return 0;
    }
    (1..=255u8).find(|&b| gf_mul(a, b) == 1).expect("every nonzero element is invertible")
}

pub fn sbox(x: u8) -> u8 {
    let b = gf_inv(x);
    b ^ b.rotate_left(1) ^ b.rotate_left(2) ^ b.rotate_left(3) ^ b.rotate_left(4) ^ 0x63
}

/// [`sbox`] evaluated once for every byte.
fn derived_sbox() -> &'static [u8; 256] {
    static TABLE: OnceLock<[u8; 256]> = OnceLock::new();
    TABLE.get_or_init(|| core::array::from_fn(|i| sbox(i as u8)))
}

pub fn round_constants() -> [u8; 10] {
    let mut rc = [0u8; 10];
    let mut v = 1u8;
    for slot in rc.iter_mut() {
        *slot = v;
        v = gf_mul(v, 2);
    }
    rc
}

pub fn key_expansion(key: &[u8; 16]) -> [u8; 176] {
    let rc = round_constants();
    let mut words = [[0u8; 4]; 44];
    for (i, w) in words.iter_mut().take(4).enumerate() {
        w.copy_from_slice(&key[4 * i..4 * i + 4]);
    }
    for i in 4..44 {
        let mut temp = words[i - 1];
        if i % 4 == 0 {
            temp.rotate_left(1);
            for t in temp.iter_mut() {
                *t = sbox(*t);
            }
            temp[0] ^= rc[i / 4 - 1];
        }
        for j in 0..4 {
            words[i][j] = words[i - 4][j] ^ temp[j];
        }
    }
    let mut out = [0u8; 176];
    for (i, w) in words.iter().enumerate() {
        out[4 * i..4 * i + 4].copy_from_slice(w);
    }
    out
}

/// FIPS-197 cipher on a `state[row][col]` matrix.
pub fn encrypt_block(block: &[u8; 16], round_keys: &[u8; 176]) -> [u8; 16] {
    let mut state = [[0u8; 4]; 4];
    for c in 0..4 {
        for r in 0..4 {
            state[r][c] = block[r + 4 * c];
        }
    }
    let add_key = |state: &mut [[u8; 4]; 4], round: usize| {
        for c in 0..4 {
            for r in 0..4 {
                state[r][c] ^= round_keys[16 * round + 4 * c + r];
            }
        }
    };

    add_key(&mut state, 0);
    for round in 1..=10 {
        for row in state.iter_mut() {
            for b in row.iter_mut() {
                *b = derived_sbox()[*b as usize];
            }
        }
        for (r, row) in state.iter_mut().enumerate() {
            row.rotate_left(r);
        }
        if round != 10 {
            for c in 0..4 {
                let col = [state[0][c], state[1][c], state[2][c], state[3][c]];
                for r in 0..4 {
                    state[r][c] = gf_mul(col[r], 2)
                        ^ gf_mul(col[(r + 1) % 4], 3)
                        ^ col[(r + 2) % 4]
                        ^ col[(r + 3) % 4];
                }
            }
        }
        add_key(&mut state, round);
    }

    let mut out = [0u8; 16];
    for c in 0..4 {
        for r in 0..4 {
            out[r + 4 * c] = state[r][c];
        }
    }
    out
}

/// Encrypts every 16-byte block independently. Panics on a ragged tail.
pub fn encrypt_buffer(buf: &[u8], key: &[u8; 16]) -> Vec<u8> {
    assert!(buf.len().is_multiple_of(16), "reference encrypt_buffer needs whole blocks");
    let rk = key_expansion(key);
    buf.chunks_exact(16)
        .flat_map(|chunk| encrypt_block(chunk.try_into().unwrap(), &rk))
        .collect()
}

fn first_primes(n: usize) -> Vec<u128> {
    let mut primes = Vec::with_capacity(n);
    let mut candidate = 2u128;
    while primes.len() < n {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| !candidate.is_multiple_of(p)) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Largest `r` with `r^k <= n`, by bisection.
fn integer_root(n: u128, k: u32) -> u128 {
    let (mut lo, mut hi) = (0u128, 1u128 << (128 / k));
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        match mid.checked_pow(k) {
            Some(v) if v <= n => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

/// First 32 fractional bits of the cube roots of the first 64 primes.
pub fn sha256_round_constants() -> [u32; 64] {
    let mut k = [0u32; 64];
    for (slot, p) in k.iter_mut().zip(first_primes(64)) {
        *slot = integer_root(p << 96, 3) as u32;
    }
    k
}

/// First 32 fractional bits of the square roots of the first 8 primes.
pub fn sha256_initial_state() -> [u32; 8] {
    let mut h = [0u32; 8];
    for (slot, p) in h.iter_mut().zip(first_primes(8)) {
        *slot = integer_root(p << 64, 2) as u32;
    }
    h
}

pub fn sha256(message: &[u8]) -> [u8; 32] {
    let k = sha256_round_constants();
    let mut h = sha256_initial_state();

    let mut padded = message.to_vec();
    padded.push(0x80);
    while padded.len() % 64 != 56 {
        padded.push(0);
    }
    padded.extend_from_slice(&((message.len() as u64) * 8).to_be_bytes());

    for block in padded.chunks(64) {
        let mut w: Vec<u32> = block
            .chunks(4)
            .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        for t in 16..64 {
            let s0 = w[t - 15].rotate_right(7) ^ w[t - 15].rotate_right(18) ^ (w[t - 15] >> 3);
            let s1 = w[t - 2].rotate_right(17) ^ w[t - 2].rotate_right(19) ^ (w[t - 2] >> 10);
            w.push(
                w[t - 16]
                    .wrapping_add(s0)
                    .wrapping_add(w[t - 7])
                    .wrapping_add(s1),
            );
        }
        let mut v = h;
        for t in 0..64 {
            let [a, b, c, d, e, f, g, hh] = v;
            let s1 = e.rotate_right(6) ^ e.rotate_right(11) ^ e.rotate_right(25);
            let ch = (e & f) ^ (!e & g);
            let t1 = hh.wrapping_add(s1).wrapping_add(ch).wrapping_add(k[t]).wrapping_add(w[t]);
            let s0 = a.rotate_right(2) ^ a.rotate_right(13) ^ a.rotate_right(22);
            let maj = (a & b) ^ (a & c) ^ (b & c);
            let t2 = s0.wrapping_add(maj);
            v = [t1.wrapping_add(t2), a, b, c, d.wrapping_add(t1), e, f, g];
        }
        for (hi, vi) in h.iter_mut().zip(v) {
            *hi = hi.wrapping_add(vi);
        }
    }

    let mut out = [0u8; 32];
    for (i, word) in h.iter().enumerate() {
        out[4 * i..4 * i + 4].copy_from_slice(&word.to_be_bytes());
    }
    out
}
