//! The `pimcrypt` command line.
//!
//! Exit codes: 0 ok, 2 usage, 3 data or configuration, 4 I/O.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::bench::{
    characterize_kernel, emit_csv, run_experiments, Algorithm, ExperimentKind, ExperimentSpec,
};
use crate::config::Config;
use crate::crypto::{AesKey, AES_BLOCK_BYTES};
use crate::machine::MachineProfile;
use crate::orchestrator::{run_job, JobError, JobOutput, JobResult, Strategy, Topology, Workload};

#[derive(Debug, Parser)]
#[command(name = "pimcrypt", version, about = "AES-128 and SHA-256 on a simulated UPMEM PIM machine")]
pub struct Cli {
    /// Print the full event timeline after a run.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encrypt a block-aligned file with AES-128 (ECB).
    Encrypt(EncryptArgs),
    /// Hash each input file with SHA-256, one digest per line.
    Hash(HashArgs),
    /// Run simulated experiments and write one CSV per result.
    Bench(BenchArgs),
    /// Check a profile or config file.
    Validate(ValidateArgs),
    /// Place both kernels on the host roofline.
    Roofline(RooflineArgs),
}

#[derive(Debug, Args)]
pub struct TopologyArgs {
    #[arg(long)]
    pub ranks: Option<u32>,
    #[arg(long)]
    pub dpus_per_rank: Option<u32>,
    #[arg(long)]
    pub tasklets: Option<u32>,
    #[arg(long, default_value = "sync", value_parser = parse_strategy)]
    pub strategy: Strategy,
    /// Machine profile, or a full config with a `profile` key.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncryptArgs {
    /// 128-bit key as 32 hex characters.
    #[arg(long)]
    pub key: String,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Zero-fill the input to the next 16-byte boundary.
    #[arg(long)]
    pub pad: bool,
    #[command(flatten)]
    pub topology: TopologyArgs,
}

#[derive(Debug, Args)]
pub struct HashArgs {
    /// A directory (files hashed in name order) or one or more files.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub topology: TopologyArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Experiment name, or `all`.
    #[arg(long)]
    pub experiment: String,
    /// Restrict to one algorithm.
    #[arg(long)]
    pub algorithm: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Overrides the seed of every experiment.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Leave the host-CPU column empty.
    #[arg(long)]
    pub no_baseline: bool,
    /// Run the simulations concurrently.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub profile: PathBuf,
}

#[derive(Debug, Args)]
pub struct RooflineArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<JobError> for CliError {
    fn from(e: JobError) -> Self {
        CliError::Data(e.to_string())
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Reads either a bare machine profile or a full config document.
pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let is_config = value.as_object().is_some_and(|o| {
        o.is_empty() || ["profile", "kernels", "host", "experiments", "mram_reserved_bytes"].iter().any(|k| o.contains_key(*k))
    });
    let config = if is_config {
        Config::from_json(&text)
    } else {
        MachineProfile::from_json(&text)
            .map(|profile| Config { profile, ..Config::default() })
            .map_err(|e| e.to_string())
    };
    config.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn config_or_default(path: Option<&Path>) -> Result<Config, CliError> {
    path.map(load_config).transpose().map(Option::unwrap_or_default)
}

impl TopologyArgs {
    fn resolve(&self, config: &Config) -> Topology {
        Topology::new(
            self.ranks.unwrap_or(1),
            self.dpus_per_rank.unwrap_or(config.profile.dpus_per_rank),
            self.tasklets.unwrap_or(16),
        )
    }
}

fn summary(out: &mut String, result: &JobResult, verbose: u8) {
    let p = &result.priced;
    let t = p.topology;
    let ph = p.phase_times;
    let lines: [(&str, String); 13] = [
        ("strategy", p.strategy.short_name().into()),
        ("ranks", t.ranks.to_string()),
        ("dpus_per_rank", t.dpus_per_rank.to_string()),
        ("tasklets", t.tasklets.to_string()),
        ("bytes_to_dpu", p.bytes_to_dpu.to_string()),
        ("bytes_from_dpu", p.bytes_from_dpu.to_string()),
        ("key_broadcasts", p.key_broadcasts.to_string()),
        ("broadcast_bytes", p.broadcast_bytes.to_string()),
        ("prepare_s", ph.prepare.to_string()),
        ("cpu_to_dpu_s", ph.cpu_to_dpu.to_string()),
        ("kernel_s", ph.kernel.to_string()),
        ("dpu_to_cpu_s", ph.dpu_to_cpu.to_string()),
        ("makespan_s", p.makespan.to_string()),
    ];
    for (k, v) in lines {
        let _ = writeln!(out, "{k}={v}");
    }
    if verbose > 0 {
        for e in &p.timeline.events {
            let _ = writeln!(out, "event={:?} rank={} time_s={}", e.kind, e.rank, e.time);
        }
    }
}

fn cmd_encrypt(args: &EncryptArgs, verbose: u8) -> Result<String, CliError> {
    let key = AesKey::from_hex(&args.key).map_err(|e| CliError::Usage(format!("--key: {e}")))?;
    let config = config_or_default(args.topology.profile.as_deref())?;
    let mut data = fs::read(&args.input).map_err(io(&args.input))?;
    let input_bytes = data.len();
    if data.len() % AES_BLOCK_BYTES != 0 {
        if !args.pad {
            return Err(CliError::Data(format!(
                "input is {input_bytes} bytes, not a multiple of {AES_BLOCK_BYTES}; pass --pad to zero-fill"
            )));
        }
        data.resize(data.len().next_multiple_of(AES_BLOCK_BYTES), 0);
    }
    let topology = args.topology.resolve(&config);
    let result = run_job(&Workload::Aes { buffer: &data, key }, args.topology.strategy, &topology, &config.machine())?;
    let JobOutput::Ciphertext(ct) = &result.output else { unreachable!("AES job yields ciphertext") };
    fs::write(&args.out, ct).map_err(io(&args.out))?;
    let mut out = format!("algorithm=aes128\ninput_bytes={input_bytes}\noutput_bytes={}\n", ct.len());
    summary(&mut out, &result, verbose);
    Ok(out)
}

fn hash_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    if let [single] = inputs {
        if single.is_dir() {
            let mut files = Vec::new();
            for entry in fs::read_dir(single).map_err(io(single))? {
                let path = entry.map_err(io(single))?.path();
                if path.is_file() {
                    files.push(path);
                }
            }
            files.sort();
            return Ok(files);
        }
    }
    Ok(inputs.to_vec())
}

fn cmd_hash(args: &HashArgs, verbose: u8) -> Result<String, CliError> {
    let config = config_or_default(args.topology.profile.as_deref())?;
    let files = hash_inputs(&args.inputs)?;
    if files.is_empty() {
        return Err(CliError::Data("no messages to hash".into()));
    }
    let messages = files
        .iter()
        .map(|f| fs::read(f).map_err(io(f)))
        .collect::<Result<Vec<_>, _>>()?;
    let topology = args.topology.resolve(&config);
    let result = run_job(&Workload::Sha { messages: &messages }, args.topology.strategy, &topology, &config.machine())?;
    let JobOutput::Digests(digests) = &result.output else { unreachable!("SHA job yields digests") };
    let text: String = digests.iter().map(|d| format!("{}\n", d.to_hex())).collect();
    fs::write(&args.out, text).map_err(io(&args.out))?;
    let mut out = format!("algorithm=sha256\nmessages={}\n", messages.len());
    summary(&mut out, &result, verbose);
    Ok(out)
}

fn cmd_bench(args: &BenchArgs) -> Result<String, CliError> {
    let kinds: Vec<ExperimentKind> = if args.experiment == "all" {
        ExperimentKind::ALL.to_vec()
    } else {
        vec![args.experiment.parse().map_err(|e: String| CliError::Usage(format!("{e}, all")))?]
    };
    let algorithm: Option<Algorithm> =
        args.algorithm.as_deref().map(str::parse).transpose().map_err(CliError::Usage)?;
    let config = config_or_default(args.config.as_deref())?;
    let source = if config.experiments.is_empty() { ExperimentSpec::defaults() } else { config.experiments.clone() };
    let specs: Vec<ExperimentSpec> = source
        .into_iter()
        .filter(|s| kinds.contains(&s.experiment) && algorithm.is_none_or(|a| a == s.algorithm))
        .map(|mut s| {
            if let Some(seed) = args.seed {
                s.seed = seed;
            }
            if args.no_baseline {
                s.baseline = Some(false);
            }
            s
        })
        .collect();
    if specs.is_empty() {
        return Err(CliError::Usage(format!("config has no `{}` experiments", args.experiment)));
    }
    for s in &specs {
        s.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let results = run_experiments(&specs, &config.machine(), args.parallel).map_err(|e| CliError::Data(e.to_string()))?;
    fs::create_dir_all(&args.out_dir).map_err(io(&args.out_dir))?;
    let mut out = String::new();
    for r in &results {
        let path = args.out_dir.join(format!("{}.csv", r.name));
        emit_csv(r, &path).map_err(|e| match e {
            crate::bench::BenchError::Io(source) => CliError::Io { path: path.clone(), source },
            other => CliError::Data(other.to_string()),
        })?;
        let _ = writeln!(out, "csv={} rows={}", path.display(), r.rows.len());
    }
    Ok(out)
}

fn cmd_validate(args: &ValidateArgs) -> Result<String, CliError> {
    let config = load_config(&args.profile)?;
    let violations = config.violations();
    if violations.is_empty() {
        let p = &config.profile;
        Ok(format!(
            "status=ok\ntotal_dpus={}\nusable_dpus={}\nwram_bytes={}\nmram_bytes={}\n",
            p.total_dpus(),
            p.usable_dpus,
            p.wram_bytes,
            p.mram_bytes
        ))
    } else {
        let lines: Vec<String> = violations.iter().map(|v| format!("violation={v}")).collect();
        Err(CliError::Data(format!("status=invalid\n{}", lines.join("\n"))))
    }
}

fn cmd_roofline(args: &RooflineArgs) -> Result<String, CliError> {
    let config = config_or_default(args.config.as_deref())?;
    let mut out = format!("host={}\n", config.host.name);
    for (alg, cost) in [(Algorithm::Aes128, &config.kernels.aes128), (Algorithm::Sha256, &config.kernels.sha256)] {
        let c = characterize_kernel(alg, cost, &config.host);
        let _ = writeln!(
            out,
            "algorithm={alg} operations_per_byte={} ridge_point={} classification={} payload_operations_per_byte={}",
            c.operations_per_byte,
            c.machine_ridge_point,
            c.classification.name(),
            c.payload_operations_per_byte.unwrap_or(f64::NAN),
        );
    }
    Ok(out)
}

/// Runs one parsed command, returning its stdout text.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Encrypt(a) => cmd_encrypt(a, cli.verbose),
        Command::Hash(a) => cmd_hash(a, cli.verbose),
        Command::Bench(a) => cmd_bench(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Roofline(a) => cmd_roofline(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
