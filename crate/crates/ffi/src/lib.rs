//! C ABI over `pimcrypt`.
//!
//! Every function returns a [`PimStatus`]; on failure the message is kept in
//! a thread-local slot readable through [`pim_last_error_message`]. Handles
//! are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use pimcrypt::config::Config;
use pimcrypt::crypto::{aes128_encrypt_buffer, key_expansion, sha256_digest, AesKey};
use pimcrypt::orchestrator::{run_job, JobError, JobOutput, JobResult, Strategy, Topology, Workload};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Alignment = 3,
    Capacity = 4,
    Config = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PimStrategy {
    Sync = 0,
    AsyncRankTransfer = 1,
    AsyncRankExecution = 2,
}

impl From<PimStrategy> for Strategy {
    fn from(s: PimStrategy) -> Self {
        match s {
            PimStrategy::Sync => Strategy::Sync,
            PimStrategy::AsyncRankTransfer => Strategy::AsyncRankTransfer,
            PimStrategy::AsyncRankExecution => Strategy::AsyncRankExecution,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PimTopology {
    pub ranks: u32,
    pub dpus_per_rank: u32,
    pub tasklets: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PimPhaseTimes {
    pub prepare: f64,
    pub cpu_to_dpu: f64,
    pub kernel: f64,
    pub dpu_to_cpu: f64,
    pub makespan: f64,
}

/// Machine profile, kernel costs and host profile.
pub struct PimConfig(Config);

/// Output and priced timeline of a finished job.
pub struct PimJob(JobResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: PimStatus, msg: impl Into<String>) -> PimStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> PimStatus) -> PimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(PimStatus::Panic, "internal panic"),
    }
}

fn job_status(e: &JobError) -> PimStatus {
    match e {
        JobError::Alignment { .. } => PimStatus::Alignment,
        JobError::Capacity { .. } => PimStatus::Capacity,
        JobError::Domain(_) | JobError::Machine(_) => PimStatus::InvalidArgument,
    }
}

/// Reads `len` bytes; a null pointer is accepted for an empty span.
unsafe fn bytes<'a>(p: *const u8, len: usize) -> Option<&'a [u8]> {
    if len == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(p, len))
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn pim_config_new_default() -> *mut PimConfig {
    Box::into_raw(Box::new(PimConfig(Config::default())))
}

/// Parses a JSON config document into a new handle.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pim_config_from_json(json: *const c_char, out: *mut *mut PimConfig) -> PimStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return fail(PimStatus::NullPointer, "null argument");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(PimStatus::InvalidArgument, "config is not UTF-8");
        };
        match Config::from_json(text) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(PimConfig(c)));
                PimStatus::Ok
            }
            Err(e) => fail(PimStatus::Config, e),
        }
    })
}

/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pim_config_free(config: *mut PimConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Encrypts `len` bytes in ECB mode on the host. `out` receives `len` bytes.
///
/// # Safety
/// `key` points to 16 bytes, `input` and `out` to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pim_aes128_encrypt(key: *const u8, input: *const u8, len: usize, out: *mut u8) -> PimStatus {
    guarded(|| {
        let (Some(k), Some(data)) = (bytes(key, 16), bytes(input, len)) else {
            return fail(PimStatus::NullPointer, "null argument");
        };
        if out.is_null() && len > 0 {
            return fail(PimStatus::NullPointer, "null output");
        }
        let ks = key_expansion(&AesKey::from_slice(k).expect("16 bytes"));
        match aes128_encrypt_buffer(data, &ks) {
            Ok(ct) => {
                ptr::copy_nonoverlapping(ct.as_ptr(), out, ct.len());
                PimStatus::Ok
            }
            Err(e) => fail(PimStatus::Alignment, e.to_string()),
        }
    })
}

/// # Safety
/// `message` points to `len` bytes and `digest` to 32 writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pim_sha256(message: *const u8, len: usize, digest: *mut u8) -> PimStatus {
    guarded(|| {
        let Some(m) = bytes(message, len) else {
            return fail(PimStatus::NullPointer, "null message");
        };
        if digest.is_null() {
            return fail(PimStatus::NullPointer, "null digest");
        }
        ptr::copy_nonoverlapping(sha256_digest(m).0.as_ptr(), digest, 32);
        PimStatus::Ok
    })
}

unsafe fn finish(
    config: *const PimConfig,
    topology: PimTopology,
    strategy: PimStrategy,
    workload: Workload<'_>,
    out: *mut *mut PimJob,
) -> PimStatus {
    let config = if config.is_null() { &Config::default() } else { &(*config).0 };
    let t = Topology::new(topology.ranks, topology.dpus_per_rank, topology.tasklets);
    match run_job(&workload, strategy.into(), &t, &config.machine()) {
        Ok(r) => {
            *out = Box::into_raw(Box::new(PimJob(r)));
            PimStatus::Ok
        }
        Err(e) => fail(job_status(&e), e.to_string()),
    }
}

/// Runs a distributed encryption job. A null `config` uses the defaults.
///
/// # Safety
/// `key` points to 16 bytes, `input` to `len` bytes, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pim_run_aes(
    config: *const PimConfig,
    topology: PimTopology,
    strategy: PimStrategy,
    key: *const u8,
    input: *const u8,
    len: usize,
    out: *mut *mut PimJob,
) -> PimStatus {
    guarded(|| {
        let (Some(k), Some(buffer)) = (bytes(key, 16), bytes(input, len)) else {
            return fail(PimStatus::NullPointer, "null argument");
        };
        if out.is_null() {
            return fail(PimStatus::NullPointer, "null output handle");
        }
        let key = AesKey::from_slice(k).expect("16 bytes");
        finish(config, topology, strategy, Workload::Aes { buffer, key }, out)
    })
}

/// Runs a distributed hashing job over `count` messages.
///
/// # Safety
/// `messages` and `lengths` point to `count` entries each; every message
/// pointer covers its length.
#[no_mangle]
pub unsafe extern "C" fn pim_run_sha(
    config: *const PimConfig,
    topology: PimTopology,
    strategy: PimStrategy,
    messages: *const *const u8,
    lengths: *const usize,
    count: usize,
    out: *mut *mut PimJob,
) -> PimStatus {
    guarded(|| {
        if out.is_null() || (count > 0 && (messages.is_null() || lengths.is_null())) {
            return fail(PimStatus::NullPointer, "null argument");
        }
        let mut owned = Vec::with_capacity(count);
        for i in 0..count {
            let Some(m) = bytes(*messages.add(i), *lengths.add(i)) else {
                return fail(PimStatus::NullPointer, format!("message {i} is null"));
            };
            owned.push(m.to_vec());
        }
        finish(config, topology, strategy, Workload::Sha { messages: &owned }, out)
    })
}

fn output_bytes(job: &PimJob) -> Vec<u8> {
    match &job.0.output {
        JobOutput::Ciphertext(c) => c.clone(),
        JobOutput::Digests(d) => d.iter().flat_map(|d| d.0).collect(),
    }
}

/// Ciphertext length, or 32 bytes per digest.
///
/// # Safety
/// `job` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pim_job_output_len(job: *const PimJob) -> usize {
    match job.as_ref() {
        Some(j) => match &j.0.output {
            JobOutput::Ciphertext(c) => c.len(),
            JobOutput::Digests(d) => 32 * d.len(),
        },
        None => 0,
    }
}

/// # Safety
/// `job` must be a live handle; `out` points to `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pim_job_copy_output(job: *const PimJob, out: *mut u8, capacity: usize) -> PimStatus {
    guarded(|| {
        let Some(j) = job.as_ref() else {
            return fail(PimStatus::NullPointer, "null job");
        };
        let data = output_bytes(j);
        if data.len() > capacity {
            return fail(PimStatus::BufferTooSmall, format!("need {} bytes, have {capacity}", data.len()));
        }
        if !data.is_empty() {
            if out.is_null() {
                return fail(PimStatus::NullPointer, "null output");
            }
            ptr::copy_nonoverlapping(data.as_ptr(), out, data.len());
        }
        PimStatus::Ok
    })
}

/// # Safety
/// `job` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pim_job_phase_times(job: *const PimJob, out: *mut PimPhaseTimes) -> PimStatus {
    let (Some(j), false) = (job.as_ref(), out.is_null()) else {
        return fail(PimStatus::NullPointer, "null argument");
    };
    let p = j.0.phase_times();
    *out = PimPhaseTimes {
        prepare: p.prepare,
        cpu_to_dpu: p.cpu_to_dpu,
        kernel: p.kernel,
        dpu_to_cpu: p.dpu_to_cpu,
        makespan: j.0.makespan(),
    };
    PimStatus::Ok
}

/// # Safety
/// `job` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pim_job_free(job: *mut PimJob) {
    if !job.is_null() {
        drop(Box::from_raw(job));
    }
}
