//! AES-128 encryption and SHA-256 hashing as they run on a DPU.
//!
//! The [`aes`] and [`sha256`] modules hold the table-driven kernels. The
//! [`reference`] module holds straightforward implementations that share no
//! code or tables with the kernels and serve as test oracles.

pub mod aes;
pub mod reference;
pub mod sha256;
pub mod tables;
pub mod tally;

use std::fmt;

use thiserror::Error;

pub use aes::{aes128_encrypt_block, aes128_encrypt_buffer, key_expansion};
pub use sha256::{sha256_digest, sha256_pad, Sha256Stream};
pub use tables::{build_gf_tables, GfLookupTables};

pub const AES_BLOCK_BYTES: usize = 16;
pub const AES_KEY_BYTES: usize = 16;
pub const EXPANDED_KEY_BYTES: usize = 176;
pub const SHA256_BLOCK_BYTES: usize = 64;
pub const SHA256_DIGEST_BYTES: usize = 32;
/// Longest message whose bit length fits the 64-bit length field.
pub const SHA256_MAX_MESSAGE_BYTES: u64 = (1 << 61) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    #[error("buffer length {len} is not a multiple of {unit} bytes")]
    Alignment { len: usize, unit: usize },
    #[error("expected {expected} bytes, got {got}")]
    Length { expected: usize, got: usize },
    #[error("invalid hex: {0}")]
    Hex(String),
}

macro_rules! byte_newtype {
    ($(#[$meta:meta])* $name:ident, $len:expr) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash)]
        pub struct $name(pub [u8; $len]);

        impl $name {
            pub const LEN: usize = $len;

            pub fn from_slice(bytes: &[u8]) -> Result<Self, CryptoError> {
                let arr: [u8; $len] = bytes.try_into().map_err(|_| CryptoError::Length {
                    expected: $len,
                    got: bytes.len(),
                })?;
                Ok(Self(arr))
            }

            /// Parses lowercase or uppercase hex without separators.
            pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
                let bytes = hex::decode(s.trim()).map_err(|e| CryptoError::Hex(e.to_string()))?;
                Self::from_slice(&bytes)
            }

            pub fn to_hex(&self) -> String {
                hex::encode(self.0)
            }

            pub fn as_bytes(&self) -> &[u8; $len] {
                &self.0
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self.to_hex())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }
    };
}

byte_newtype!(
    /// The original 128-bit cipher key.
    AesKey,
    AES_KEY_BYTES
);
byte_newtype!(
    /// Eleven 16-byte round keys; the first equals the cipher key.
    ExpandedKey,
    EXPANDED_KEY_BYTES
);
byte_newtype!(
    /// A 4x4 AES state, column-major: byte `r + 4c` is row `r`, column `c`.
    StateBlock,
    AES_BLOCK_BYTES
);
byte_newtype!(Sha256Digest, SHA256_DIGEST_BYTES);

impl ExpandedKey {
    pub fn round_key(&self, round: usize) -> &[u8] {
        &self.0[round * 16..(round + 1) * 16]
    }
}

/// A message to hash.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Message(pub Vec<u8>);

impl Message {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<&[u8]> for Message {
    fn from(b: &[u8]) -> Self {
        Message(b.to_vec())
    }
}

impl From<Vec<u8>> for Message {
    fn from(b: Vec<u8>) -> Self {
        Message(b)
    }
}

impl AsRef<[u8]> for Message {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}
