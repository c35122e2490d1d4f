use pimcrypt::crypto::{
    aes128_encrypt_block, aes128_encrypt_buffer, key_expansion, sha256_digest, sha256_pad, AesKey, GfLookupTables,
    Message, Sha256Stream, StateBlock,
};
use pimcrypt::reference;
use proptest::prelude::*;
use sha2::{Digest, Sha256};

proptest! {
    #[test]
    fn sha256_agrees_with_sha2(msg in proptest::collection::vec(any::<u8>(), 0..2000)) {
        let ours = sha256_digest(&msg);
        let theirs: [u8; 32] = Sha256::digest(&msg).into();
        prop_assert_eq!(ours.0, theirs);
    }

    #[test]
    fn streaming_matches_one_shot(msg in proptest::collection::vec(any::<u8>(), 0..1000), cuts in proptest::collection::vec(0usize..1000, 0..6)) {
        let mut cuts: Vec<usize> = cuts.into_iter().map(|c| c.min(msg.len())).collect();
        cuts.sort_unstable();
        let mut s = Sha256Stream::new();
        let mut at = 0;
        for c in cuts {
            s.update(&msg[at..c]);
            at = c;
        }
        s.update(&msg[at..]);
        prop_assert_eq!(s.finalize(), sha256_digest(&msg));
    }

    #[test]
    fn padding_is_block_aligned(len in 0usize..300) {
        let padded = sha256_pad(&Message(vec![0xaa; len]));
        prop_assert_eq!(padded.len() % 64, 0);
        prop_assert!(padded.len() >= len + 9 && padded.len() < len + 9 + 64);
        prop_assert_eq!(&padded[padded.len() - 8..], &((len as u64) * 8).to_be_bytes());
    }

    #[test]
    fn lut_aes_agrees_with_oracle(key in any::<[u8; 16]>(), blocks in proptest::collection::vec(any::<[u8; 16]>(), 1..20)) {
        let ks = key_expansion(&AesKey(key));
        prop_assert_eq!(&ks.0[..], &reference::key_expansion(&key)[..]);
        let buf: Vec<u8> = blocks.concat();
        prop_assert_eq!(aes128_encrypt_buffer(&buf, &ks).unwrap(), reference::encrypt_buffer(&buf, &key));
        let first = aes128_encrypt_block(StateBlock(blocks[0]), &ks, GfLookupTables::shared());
        prop_assert_eq!(first.0, reference::encrypt_block(&blocks[0], &reference::key_expansion(&key)));
    }
}

#[test]
fn fips_197_appendix_c1() {
    let key = AesKey::from_hex("000102030405060708090a0b0c0d0e0f").unwrap();
    let pt = StateBlock::from_hex("00112233445566778899aabbccddeeff").unwrap();
    let ct = aes128_encrypt_block(pt, &key_expansion(&key), GfLookupTables::shared());
    assert_eq!(ct.to_hex(), "69c4e0d86a7b0430d8cdb78070b4c55a");
}

#[test]
fn misaligned_buffer_is_rejected() {
    let ks = key_expansion(&AesKey([0; 16]));
    assert!(aes128_encrypt_buffer(&[0u8; 15], &ks).is_err());
}
