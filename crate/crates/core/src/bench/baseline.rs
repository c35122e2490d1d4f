use std::hint::black_box;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::crypto::{aes128_encrypt_buffer, key_expansion, sha256_digest, AesKey, AES_BLOCK_BYTES};
use crate::orchestrator::{JobOutput, Workload};

use super::{Algorithm, BenchError};

/// A generated workload that owns its bytes.
#[derive(Debug, Clone, PartialEq)]
pub enum OwnedWorkload {
    Aes { buffer: Vec<u8>, key: AesKey },
    Sha { messages: Vec<Vec<u8>> },
}

impl OwnedWorkload {
    pub fn as_workload(&self) -> Workload<'_> {
        match self {
            OwnedWorkload::Aes { buffer, key } => Workload::Aes { buffer, key: *key },
            OwnedWorkload::Sha { messages } => Workload::Sha { messages },
        }
    }
}

/// Seeded random plaintext, or `bytes / message_bytes` random messages.
pub fn sample_workload(algorithm: Algorithm, bytes: u64, message_bytes: u64, seed: u64) -> OwnedWorkload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match algorithm {
        Algorithm::Aes128 => {
            let mut key = [0u8; 16];
            rng.fill_bytes(&mut key);
            let mut buffer = vec![0u8; bytes as usize];
            rng.fill_bytes(&mut buffer);
            OwnedWorkload::Aes { buffer, key: AesKey(key) }
        }
        Algorithm::Sha256 => {
            let count = (bytes / message_bytes.max(1)) as usize;
            let messages = (0..count)
                .map(|_| {
                    let mut m = vec![0u8; message_bytes as usize];
                    rng.fill_bytes(&mut m);
                    m
                })
                .collect();
            OwnedWorkload::Sha { messages }
        }
    }
}

pub fn host_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineMeasurement {
    pub threads: usize,
    pub bytes: u64,
    /// Wall-clock seconds of each repetition, in run order.
    pub samples: Vec<f64>,
    pub median_seconds: f64,
    pub output: JobOutput,
}

impl BaselineMeasurement {
    pub fn seconds_per_byte(&self) -> f64 {
        if self.bytes == 0 {
            0.0
        } else {
            self.median_seconds / self.bytes as f64
        }
    }
}

fn median(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn compute(workload: &Workload<'_>, threads: usize) -> JobOutput {
    match *workload {
        Workload::Aes { buffer, key } => {
            let ks = key_expansion(&key);
            if threads == 1 {
                return JobOutput::Ciphertext(aes128_encrypt_buffer(buffer, &ks).expect("aligned"));
            }
            let blocks = buffer.len() / AES_BLOCK_BYTES;
            let chunk = blocks.div_ceil(threads).max(1) * AES_BLOCK_BYTES;
            let parts: Vec<Vec<u8>> = buffer
                .par_chunks(chunk)
                .map(|c| aes128_encrypt_buffer(c, &ks).expect("aligned"))
                .collect();
            JobOutput::Ciphertext(parts.concat())
        }
        Workload::Sha { messages } => {
            if threads == 1 {
                JobOutput::Digests(messages.iter().map(|m| sha256_digest(m)).collect())
            } else {
                JobOutput::Digests(messages.par_iter().map(|m| sha256_digest(m)).collect())
            }
        }
    }
}

/// Wall-clock time of the kernels on this machine's CPU, median of
/// `repetitions` runs.
pub fn run_host_baseline(
    workload: &Workload<'_>,
    threads: usize,
    repetitions: u32,
) -> Result<BaselineMeasurement, BenchError> {
    if threads == 0 || repetitions == 0 {
        return Err(BenchError::Spec("baseline needs at least one thread and one repetition".into()));
    }
    if let Workload::Aes { buffer, .. } = workload {
        if buffer.len() % AES_BLOCK_BYTES != 0 {
            return Err(BenchError::Spec(format!(
                "baseline buffer of {} bytes is not block aligned",
                buffer.len()
            )));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::Spec(e.to_string()))?;
    let mut samples = Vec::with_capacity(repetitions as usize);
    let mut output = None;
    for _ in 0..repetitions {
        let start = Instant::now();
        let out = pool.install(|| compute(black_box(workload), threads));
        samples.push(start.elapsed().as_secs_f64());
        output = Some(black_box(out));
    }
    Ok(BaselineMeasurement {
        threads,
        bytes: workload.shape().payload_bytes(),
        median_seconds: median(&samples),
        samples,
        output: output.expect("at least one repetition"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn baseline_output_matches_oracle() {
        let w = sample_workload(Algorithm::Aes128, 4096, 0, 7);
        let OwnedWorkload::Aes { buffer, key } = &w else { unreachable!() };
        let expected = reference::encrypt_buffer(buffer, key.as_bytes());
        for threads in [1, 3] {
            let m = run_host_baseline(&w.as_workload(), threads, 5).unwrap();
            assert_eq!(m.samples.len(), 5);
            assert_eq!(m.output, JobOutput::Ciphertext(expected.clone()));
        }
        let w = sample_workload(Algorithm::Sha256, 4096, 1000, 7);
        let OwnedWorkload::Sha { messages } = &w else { unreachable!() };
        assert_eq!(messages.len(), 4);
        let m = run_host_baseline(&w.as_workload(), 2, 5).unwrap();
        let JobOutput::Digests(d) = m.output else { unreachable!() };
        for (msg, d) in messages.iter().zip(d) {
            assert_eq!(d.0, reference::sha256(msg));
        }
    }

    #[test]
    fn samples_are_seeded() {
        assert_eq!(sample_workload(Algorithm::Aes128, 64, 0, 1), sample_workload(Algorithm::Aes128, 64, 0, 1));
        assert_ne!(sample_workload(Algorithm::Aes128, 64, 0, 1), sample_workload(Algorithm::Aes128, 64, 0, 2));
    }
}
