use crate::crypto::AES_BLOCK_BYTES;

use super::JobError;

/// Contiguous byte range of the input owned by one DPU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slice {
    pub offset: u64,
    pub length: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionPlan {
    /// Block-aligned slices, one per DPU, in DPU order.
    Aes { slices: Vec<Slice> },
    /// Message indices owned by each DPU. Messages are never split.
    Sha { assignments: Vec<Vec<usize>> },
}

impl PartitionPlan {
    pub fn dpu_count(&self) -> usize {
        match self {
            PartitionPlan::Aes { slices } => slices.len(),
            PartitionPlan::Sha { assignments } => assignments.len(),
        }
    }

    /// Checks coverage and alignment against the input it was built for.
    pub fn check(&self, input_len: u64) -> Result<(), String> {
        match self {
            PartitionPlan::Aes { slices } => {
                let mut cursor = 0;
                for (i, s) in slices.iter().enumerate() {
                    if s.offset != cursor {
                        return Err(format!("slice {i} starts at {} not {cursor}", s.offset));
                    }
                    if s.length % AES_BLOCK_BYTES as u64 != 0 {
                        return Err(format!("slice {i} length {} is not block aligned", s.length));
                    }
                    cursor += s.length;
                }
                if cursor != input_len {
                    return Err(format!("slices cover {cursor} of {input_len} bytes"));
                }
            }
            PartitionPlan::Sha { assignments } => {
                let mut seen = vec![false; input_len as usize];
                for idx in assignments.iter().flatten() {
                    match seen.get_mut(*idx) {
                        Some(s) if !*s => *s = true,
                        Some(_) => return Err(format!("message {idx} assigned twice")),
                        None => return Err(format!("message {idx} out of range")),
                    }
                }
                if let Some(missing) = seen.iter().position(|s| !s) {
                    return Err(format!("message {missing} unassigned"));
                }
            }
        }
        Ok(())
    }
}

/// Splits a buffer into contiguous runs of whole blocks; the first
/// `blocks % n_dpus` DPUs take one extra block.
pub fn partition_aes(buffer_len: u64, n_dpus: u32) -> Result<PartitionPlan, JobError> {
    let block = AES_BLOCK_BYTES as u64;
    if !buffer_len.is_multiple_of(block) {
        return Err(JobError::Alignment { len: buffer_len, unit: block });
    }
    if n_dpus == 0 {
        return Err(JobError::Domain("at least one DPU is required".into()));
    }
    let blocks = buffer_len / block;
    let (base, extra) = (blocks / n_dpus as u64, blocks % n_dpus as u64);
    let mut offset = 0;
    let slices = (0..n_dpus as u64)
        .map(|d| {
            let length = (base + u64::from(d < extra)) * block;
            let s = Slice { offset, length };
            offset += length;
            s
        })
        .collect();
    Ok(PartitionPlan::Aes { slices })
}

/// Deals whole messages to DPUs round-robin by index.
pub fn partition_sha(message_lengths: &[u64], n_dpus: u32) -> Result<PartitionPlan, JobError> {
    if n_dpus == 0 {
        return Err(JobError::Domain("at least one DPU is required".into()));
    }
    let mut assignments = vec![Vec::new(); n_dpus as usize];
    for i in 0..message_lengths.len() {
        assignments[i % n_dpus as usize].push(i);
    }
    Ok(PartitionPlan::Sha { assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lengths(plan: &PartitionPlan) -> Vec<u64> {
        match plan {
            PartitionPlan::Aes { slices } => slices.iter().map(|s| s.length).collect(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn aes_examples() {
        let plan = partition_aes(8 << 20, 64).unwrap();
        assert!(lengths(&plan).iter().all(|&l| l == 131072));
        assert_eq!(lengths(&partition_aes(1600, 3).unwrap()), vec![544, 528, 528]);
        let one = partition_aes(4096, 1).unwrap();
        assert_eq!(one, PartitionPlan::Aes { slices: vec![Slice { offset: 0, length: 4096 }] });
    }

    #[test]
    fn aes_errors() {
        assert!(matches!(partition_aes(17, 2), Err(JobError::Alignment { .. })));
        assert!(matches!(partition_aes(32, 0), Err(JobError::Domain(_))));
    }

    #[test]
    fn sha_examples() {
        let counts = |p: PartitionPlan| match p {
            PartitionPlan::Sha { assignments } => {
                assignments.iter().map(Vec::len).collect::<Vec<_>>()
            }
            _ => unreachable!(),
        };
        assert!(counts(partition_sha(&[32768; 1024], 64).unwrap()).iter().all(|&n| n == 16));
        assert_eq!(counts(partition_sha(&[1; 5], 2).unwrap()), vec![3, 2]);
        let single = counts(partition_sha(&[100], 7).unwrap());
        assert_eq!(single.iter().filter(|&&n| n > 0).count(), 1);
        assert!(matches!(partition_sha(&[1; 3], 0), Err(JobError::Domain(_))));
    }

    proptest! {
        #[test]
        fn aes_plan_covers_exactly(blocks in 0u64..5000, n in 1u32..200) {
            let plan = partition_aes(blocks * 16, n).unwrap();
            prop_assert!(plan.check(blocks * 16).is_ok());
            let l = lengths(&plan);
            let (min, max) = (l.iter().min().unwrap(), l.iter().max().unwrap());
            prop_assert!(max - min <= 16);
        }

        #[test]
        fn sha_plan_covers_exactly(m in 0usize..3000, n in 1u32..200) {
            prop_assert!(partition_sha(&vec![0; m], n).unwrap().check(m as u64).is_ok());
        }
    }
}
