use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pimcrypt::bench::parse_csv;

const FIPS_KEY: &str = "000102030405060708090a0b0c0d0e0f";

fn pimcrypt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pimcrypt")).args(args).output().expect("spawn pimcrypt")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn encrypt_fips_block() {
    let dir = tempfile::tempdir().unwrap();
    let (input, out) = (dir.path().join("pt"), dir.path().join("ct"));
    fs::write(&input, hex::decode("00112233445566778899aabbccddeeff").unwrap()).unwrap();
    let o = pimcrypt(&["encrypt", "--key", FIPS_KEY, "--in", p(&input), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(hex::encode(fs::read(&out).unwrap()), "69c4e0d86a7b0430d8cdb78070b4c55a");
    let text = stdout(&o);
    for key in ["makespan_s=", "kernel_s=", "cpu_to_dpu_s=", "key_broadcasts=1"] {
        assert!(text.contains(key), "{key} missing from {text}");
    }
}

#[test]
fn single_rank_summaries_match_across_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pt");
    fs::write(&input, vec![7u8; 16 * 4096]).unwrap();
    let mut summaries = Vec::new();
    for s in ["sync", "pim1", "pim2"] {
        let out = dir.path().join(s);
        let o = pimcrypt(&[
            "encrypt", "--key", FIPS_KEY, "--in", p(&input), "--out", p(&out), "--ranks", "1", "--strategy", s,
        ]);
        assert_eq!(code(&o), 0);
        let lines: Vec<String> = stdout(&o).lines().filter(|l| !l.starts_with("strategy=")).map(String::from).collect();
        summaries.push((lines, fs::read(&out).unwrap()));
    }
    assert_eq!(summaries[0], summaries[1]);
    assert_eq!(summaries[1], summaries[2]);
}

#[test]
fn encrypt_error_codes_and_padding() {
    let dir = tempfile::tempdir().unwrap();
    let (empty, odd, out) = (dir.path().join("empty"), dir.path().join("odd"), dir.path().join("out"));
    fs::write(&empty, b"").unwrap();
    fs::write(&odd, [1u8; 20]).unwrap();

    let o = pimcrypt(&["encrypt", "--key", FIPS_KEY, "--in", p(&empty), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(fs::read(&out).unwrap().is_empty());

    assert_eq!(code(&pimcrypt(&["encrypt", "--key", "xyz", "--in", p(&empty), "--out", p(&out)])), 2);
    assert_eq!(code(&pimcrypt(&["encrypt", "--key", FIPS_KEY, "--in", p(&odd), "--out", p(&out)])), 3);
    let missing = dir.path().join("missing");
    assert_eq!(code(&pimcrypt(&["encrypt", "--key", FIPS_KEY, "--in", p(&missing), "--out", p(&out)])), 4);
    assert_eq!(code(&pimcrypt(&["encrypt", "--key", FIPS_KEY, "--in", p(&empty), "--out", p(&out), "--strategy", "fast"])), 2);

    let o = pimcrypt(&["encrypt", "--key", FIPS_KEY, "--in", p(&odd), "--out", p(&out), "--pad"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("input_bytes=20\n"));
    let mut padded = vec![1u8; 20];
    padded.resize(32, 0);
    let key: [u8; 16] = hex::decode(FIPS_KEY).unwrap().try_into().unwrap();
    assert_eq!(fs::read(&out).unwrap(), pimcrypt::reference::encrypt_buffer(&padded, &key));
}

#[test]
fn hash_files_and_directories() {
    let dir = tempfile::tempdir().unwrap();
    let msgs = dir.path().join("msgs");
    fs::create_dir(&msgs).unwrap();
    fs::write(msgs.join("a"), b"abc").unwrap();
    fs::write(msgs.join("b"), b"").unwrap();
    fs::write(msgs.join("c"), vec![9u8; 5000]).unwrap();
    let out = dir.path().join("digests");

    let o = pimcrypt(&["hash", "--in", p(&msgs), "--out", p(&out), "--dpus-per-rank", "2"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let lines: Vec<String> = fs::read_to_string(&out).unwrap().lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    assert_eq!(lines[1], "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

    // explicit order wins over name order
    let (c, a) = (msgs.join("c"), msgs.join("a"));
    let o = pimcrypt(&["hash", "--in", p(&c), p(&a), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let again: Vec<String> = fs::read_to_string(&out).unwrap().lines().map(String::from).collect();
    assert_eq!(again, vec![lines[2].clone(), lines[0].clone()]);

    let missing = dir.path().join("nope");
    assert_eq!(code(&pimcrypt(&["hash", "--in", p(&missing), "--out", p(&out)])), 4);
    let empty = dir.path().join("empty_dir");
    fs::create_dir(&empty).unwrap();
    assert_eq!(code(&pimcrypt(&["hash", "--in", p(&empty), "--out", p(&out)])), 3);
}

#[test]
fn bench_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let o = pimcrypt(&["bench", "--experiment", "tasklet_scaling", "--out-dir", p(dir.path())]);
    assert_eq!(code(&o), 0, "{o:?}");
    for alg in ["aes128", "sha256"] {
        let text = fs::read_to_string(dir.path().join(format!("tasklet_scaling_{alg}.csv"))).unwrap();
        assert_eq!(parse_csv(&text).unwrap().rows.len(), 24);
    }

    let o = pimcrypt(&[
        "bench", "--experiment", "rank_scaling", "--algorithm", "sha256", "--out-dir", p(dir.path()), "--no-baseline",
        "--parallel",
    ]);
    assert_eq!(code(&o), 0, "{o:?}");
    for s in ["sync", "pim1", "pim2"] {
        let text = fs::read_to_string(dir.path().join(format!("rank_scaling_sha256_{s}.csv"))).unwrap();
        let parsed = parse_csv(&text).unwrap();
        let ranks: Vec<u32> = parsed.rows.iter().map(|r| r.sweep).collect();
        assert_eq!(ranks, (1..=40).collect::<Vec<_>>());
        assert!(parsed.rows.iter().all(|r| r.baseline_s.is_none()));
    }

    let o = pimcrypt(&["bench", "--experiment", "fig9", "--out-dir", p(dir.path())]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("tasklet_scaling") && err.contains("rank_scaling"), "{err}");
}

#[test]
fn bench_reads_experiments_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiments": [{"experiment": "weak_scaling", "algorithm": "aes128", "sweep": [1, 4, 16, 64]}]}"#)
        .unwrap();
    let o = pimcrypt(&["bench", "--experiment", "weak_scaling", "--config", p(&cfg), "--out-dir", p(dir.path())]);
    assert_eq!(code(&o), 0, "{o:?}");
    let parsed = parse_csv(&fs::read_to_string(dir.path().join("weak_scaling_aes128.csv")).unwrap()).unwrap();
    assert_eq!(parsed.rows.len(), 4);

    fs::write(&cfg, r#"{"experiments": [{"experiment": "weak_scaling", "algorithm": "aes128", "sweep": [4, 1]}]}"#).unwrap();
    let o = pimcrypt(&["bench", "--experiment", "weak_scaling", "--config", p(&cfg), "--out-dir", p(dir.path())]);
    assert_eq!(code(&o), 2);
}

#[test]
fn validate_profiles() {
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../profiles");
    for f in ["default.json", "experiments.json"] {
        let o = pimcrypt(&["validate", "--profile", p(&shipped.join(f))]);
        assert_eq!(code(&o), 0, "{f}: {o:?}");
        assert!(stdout(&o).contains("status=ok"));
    }

    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(shipped.join("default.json")).unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, text.replace("\"usable_dpus\": 2560", "\"usable_dpus\": 2561")).unwrap();
    let o = pimcrypt(&["validate", "--profile", p(&bad)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stderr).unwrap().contains("usable_dpus"));

    fs::write(&bad, text.replace("\"iram_bytes\": 24576,", "")).unwrap();
    let o = pimcrypt(&["validate", "--profile", p(&bad)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stderr).unwrap().contains("iram_bytes"));

    assert_eq!(code(&pimcrypt(&["validate", "--profile", p(&dir.path().join("none.json"))])), 4);
}
