use pimcrypt::crypto::{aes128_encrypt_buffer, key_expansion, sha256_digest, AesKey};
use pimcrypt::machine::validate_timeline;
use pimcrypt::orchestrator::{
    price_job, run_job, JobError, JobOutput, JobShape, Machine, Strategy, Topology, Workload,
};
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

fn topology() -> impl proptest::strategy::Strategy<Value = Topology> {
    (1u32..6, 1u32..65, 1u32..25).prop_map(|(r, d, t)| Topology::new(r, d, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn aes_output_independent_of_topology(blocks in 0usize..400, seed in any::<u8>(), top in topology()) {
        let buf: Vec<u8> = (0..blocks * 16).map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed)).collect();
        let key = AesKey([seed; 16]);
        let expected = aes128_encrypt_buffer(&buf, &key_expansion(&key)).unwrap();
        for s in Strategy::ALL {
            let r = run_job(&Workload::Aes { buffer: &buf, key }, s, &top, &Machine::default()).unwrap();
            prop_assert_eq!(&r.output, &JobOutput::Ciphertext(expected.clone()));
            prop_assert!(validate_timeline(r.timeline()).is_empty());
        }
    }

    #[test]
    fn sha_output_independent_of_topology(lens in proptest::collection::vec(0usize..3000, 1..40), top in topology()) {
        let msgs: Vec<Vec<u8>> = lens.iter().enumerate().map(|(i, &n)| vec![i as u8; n]).collect();
        let r = run_job(&Workload::Sha { messages: &msgs }, Strategy::AsyncRankExecution, &top, &Machine::default()).unwrap();
        let JobOutput::Digests(d) = r.output else { panic!("expected digests") };
        prop_assert_eq!(d.len(), msgs.len());
        for (m, d) in msgs.iter().zip(d) {
            prop_assert_eq!(d, sha256_digest(m));
        }
        prop_assert_eq!(r.priced.bytes_from_dpu, 32 * msgs.len() as u64);
    }

    #[test]
    fn overlap_never_hurts(blocks in 1u64..1_000_000, top in topology()) {
        let shape = JobShape::Aes { buffer_len: blocks * 16 };
        let m = Machine::default();
        let t = |s| price_job(&shape, s, &top, &m).unwrap().makespan;
        let (sync, pim1, pim2) = (t(Strategy::Sync), t(Strategy::AsyncRankTransfer), t(Strategy::AsyncRankExecution));
        prop_assert!(pim1 <= sync && pim2 <= sync, "{} {} {}", sync, pim1, pim2);
    }
}

#[test]
fn one_broadcast_per_job_regardless_of_ranks() {
    let m = Machine::default();
    for ranks in [1, 7, 40] {
        let j = price_job(&JobShape::Aes { buffer_len: 1 << 20 }, Strategy::AsyncRankTransfer, &Topology::new(ranks, 64, 16), &m)
            .unwrap();
        assert_eq!(j.key_broadcasts, 1);
        assert_eq!(j.broadcast_bytes, 176 * 64 * ranks as u64);
        assert!(j.timeline.key_broadcast.is_some());
    }
}

#[test]
fn misaligned_job_is_rejected() {
    let err = run_job(
        &Workload::Aes { buffer: &[0u8; 33], key: AesKey([0; 16]) },
        Strategy::Sync,
        &Topology::new(1, 2, 16),
        &Machine::default(),
    );
    assert!(matches!(err, Err(JobError::Alignment { len: 33, unit: 16 })));
}
