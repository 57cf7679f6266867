//! `gm` — norms, radius schedules, verification suites, coefficient dumps,
//! and backend benchmarks from the command line.
//!
//! Exit codes: 0 success (and, for `verify`, every check passed), 1 usage or
//! resource errors, 2 one or more verification failures. Reports go to
//! stdout or, with `--out`, are written atomically (temp file + rename).
//! JSON reports keep all wall-clock data in a separate `timing` block so
//! that byte-level comparisons of the `payload` block are reproducible.

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gowers_core::bench::{run_correlation_bench, BENCH_CSV_HEADER};
use gowers_core::delta::{build_tower, tail_report, uk_norm};
use gowers_core::measure::embed_tensor;
use gowers_core::verify::{run_suite, CheckResult, CheckStatus, SuiteConfig};
use gowers_core::{Backend, Budget, EngineOpts, FreqBox, MeasureSpec};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

pub const VERIFY_CSV_HEADER: &str = "check,status,measured,tolerance,seed,spec_digest";

#[derive(Parser)]
#[command(name = "gm", version, about = "Uniformity-norm engine CLI")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute norms of order 1..=k at one truncation radius.
    Norm(NormArgs),
    /// Norm series along a growing radius schedule, with growth verdicts.
    Tower(TowerArgs),
    /// Run the verification suite on seeded inputs.
    Verify(VerifyArgs),
    /// Dump a measure's coefficients inside a frequency box.
    Oracle(OracleArgs),
    /// Time the naive and FFT correlation backends against each other.
    Bench(BenchArgs),
}

#[derive(Args)]
struct EngineArgs {
    /// Correlation backend: naive, fft, or auto.
    #[arg(long, default_value = "auto")]
    backend: String,
    /// Memory budget in array elements; overrides GM_BUDGET_ELEMENTS.
    #[arg(long)]
    budget: Option<u64>,
}

impl EngineArgs {
    fn opts(&self) -> anyhow::Result<EngineOpts> {
        let backend: Backend = self.backend.parse()?;
        Ok(EngineOpts { backend, budget: resolve_budget(self.budget)? })
    }
}

#[derive(Args)]
struct NormArgs {
    /// Measure spec: inline JSON (starts with '{') or a file path.
    #[arg(long)]
    spec: String,
    /// Highest norm order to report.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Truncation radius of the frequency box.
    #[arg(long = "M", default_value_t = 8)]
    m: usize,
    #[command(flatten)]
    engine: EngineArgs,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TowerArgs {
    /// Measure spec: inline JSON (starts with '{') or a file path.
    #[arg(long)]
    spec: String,
    /// Highest norm order to report.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Strictly increasing radius schedule, e.g. 4,8,16,32.
    #[arg(long = "M-schedule", value_delimiter = ',', default_value = "4,8,16,32")]
    schedule: Vec<usize>,
    #[command(flatten)]
    engine: EngineArgs,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which check to run: all, gcs, triangle, monotonicity, abs_value,
    /// mon_bound, ac_equivalence, or phin_chain.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Seed for the generated inputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cyclic group size for brute-force comparisons.
    #[arg(long = "N", default_value_t = 16)]
    n: usize,
    /// Norm-order knob; checks clamp it to their exact regime.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Truncation radius for torus-side checks.
    #[arg(long = "M", default_value_t = 8)]
    m: usize,
    #[command(flatten)]
    engine: EngineArgs,
    /// json (one result per line) or csv.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Measure spec: inline JSON (starts with '{') or a file path.
    #[arg(long)]
    spec: String,
    /// Coefficients are dumped for all frequencies with |xi|_inf <= M.
    #[arg(long = "M", default_value_t = 8)]
    m: usize,
    #[command(flatten)]
    engine: EngineArgs,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Radii to sweep, e.g. 8,16,32,64.
    #[arg(long = "M", value_delimiter = ',', default_value = "8,16,32,64")]
    ms: Vec<usize>,
    /// Ambient dimension of the frequency box.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Number of difference blocks in the correlated rows.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Seed for the random row pair.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which backend's rows to emit: both, naive, or fft. Agreement is
    /// always computed from both.
    #[arg(long, default_value = "both")]
    backend: String,
    /// Memory budget in array elements; overrides GM_BUDGET_ELEMENTS.
    #[arg(long)]
    budget: Option<u64>,
    /// csv (default) or json.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Norm(args) => run_norm(args),
        Command::Tower(args) => run_tower(args),
        Command::Verify(args) => run_verify(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Bench(args) => run_bench(args),
    }
}

fn run_norm(args: NormArgs) -> anyhow::Result<u8> {
    if args.k == 0 {
        bail!("--k must be at least 1");
    }
    let spec = load_spec(&args.spec)?;
    let opts = args.engine.opts()?;
    let start = Instant::now();
    let tower = build_tower(&spec, args.k - 1, args.m, &opts)?;
    let norms = (1..=args.k).map(|j| uk_norm(&tower, j)).collect::<gowers_core::Result<Vec<_>>>()?;
    let report = serde_json::json!({
        "payload": {
            "command": "norm",
            "d": spec.dim()?,
            "k": args.k,
            "m": args.m,
            "backend": opts.backend,
            "spec_digest": spec.digest(),
            "norms": norms,
        },
        "timing": { "total_seconds": start.elapsed().as_secs_f64() },
    });
    emit(&args.out, &serde_json::to_string_pretty(&report)?)?;
    Ok(0)
}

fn run_tower(args: TowerArgs) -> anyhow::Result<u8> {
    if args.k == 0 {
        bail!("--k must be at least 1");
    }
    let spec = load_spec(&args.spec)?;
    let opts = args.engine.opts()?;
    let report = tail_report(&spec, args.k, &args.schedule, &opts)?;
    let mut value = serde_json::to_value(&report)?;
    let body = value.as_object_mut().expect("reports serialize to objects");
    let timing = body.remove("timing").unwrap_or_else(|| serde_json::json!({}));
    body.insert("command".into(), serde_json::json!("tower"));
    let wrapper = serde_json::json!({ "payload": value, "timing": timing });
    emit(&args.out, &serde_json::to_string_pretty(&wrapper)?)?;
    Ok(0)
}

fn run_verify(args: VerifyArgs) -> anyhow::Result<u8> {
    let cfg = SuiteConfig {
        seed: args.seed,
        n: args.n,
        k: args.k,
        m: args.m,
        opts: args.engine.opts()?,
    };
    let results = run_suite(&args.suite, &cfg)?;
    let content = match args.format {
        Format::Json => {
            results.iter().map(CheckResult::to_json_line).collect::<Vec<_>>().join("\n")
        }
        Format::Csv => {
            let mut lines = vec![VERIFY_CSV_HEADER.to_string()];
            lines.extend(results.iter().map(|r| {
                let status = match r.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "fail",
                    CheckStatus::Skipped => "skipped",
                };
                format!(
                    "{},{status},{},{},{},{}",
                    r.check, r.measured, r.tolerance, r.seed, r.spec_digest
                )
            }));
            lines.join("\n")
        }
    };
    emit(&args.out, &content)?;
    let failed = results.iter().any(|r| r.status == CheckStatus::Fail);
    Ok(if failed { 2 } else { 0 })
}

fn run_oracle(args: OracleArgs) -> anyhow::Result<u8> {
    let spec = load_spec(&args.spec)?;
    let opts = args.engine.opts()?;
    let start = Instant::now();
    let d = spec.dim()?;
    let shape = FreqBox::new(d, 0, args.m, opts.budget)?;
    let tensor = embed_tensor(&spec.oracle()?, shape)?;
    let layout = shape.layout();
    let coefficients: Vec<serde_json::Value> = tensor
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, z)| serde_json::json!({ "xi": layout.coords(i), "re": z.re, "im": z.im }))
        .collect();
    let report = serde_json::json!({
        "payload": {
            "command": "oracle",
            "d": d,
            "m": args.m,
            "spec_digest": spec.digest(),
            "coefficients": coefficients,
        },
        "timing": { "total_seconds": start.elapsed().as_secs_f64() },
    });
    emit(&args.out, &serde_json::to_string_pretty(&report)?)?;
    Ok(0)
}

fn run_bench(args: BenchArgs) -> anyhow::Result<u8> {
    if args.d == 0 || args.k == 0 {
        bail!("--d and --k must be at least 1");
    }
    let keep: Option<&str> = match args.backend.as_str() {
        "both" => None,
        "naive" => Some("naive"),
        "fft" => Some("fft"),
        other => bail!("unknown backend filter `{other}`; expected both, naive, or fft"),
    };
    let budget = resolve_budget(args.budget)?;
    let start = Instant::now();
    let rows = run_correlation_bench(args.d, args.k, &args.ms, args.seed, budget)?;
    let rows: Vec<_> =
        rows.into_iter().filter(|r| keep.is_none_or(|b| r.backend == b)).collect();
    let content = match args.format {
        Format::Csv => {
            let mut lines = vec![BENCH_CSV_HEADER.to_string()];
            lines.extend(rows.iter().map(|r| r.to_csv_line()));
            lines.join("\n")
        }
        Format::Json => {
            // Seconds are wall-clock data, so full rows live in the timing
            // block; the payload keeps only the deterministic agreement data.
            let agreement: Vec<serde_json::Value> = rows
                .iter()
                .filter(|r| r.backend == "naive" || keep.is_some())
                .map(|r| {
                    serde_json::json!({
                        "m": r.m,
                        "elements": r.elements,
                        "max_abs_diff": r.max_abs_diff,
                    })
                })
                .collect();
            let report = serde_json::json!({
                "payload": {
                    "command": "bench",
                    "d": args.d,
                    "k": args.k,
                    "schedule": args.ms,
                    "agreement": agreement,
                },
                "timing": {
                    "total_seconds": start.elapsed().as_secs_f64(),
                    "rows": rows,
                },
            });
            serde_json::to_string_pretty(&report)?
        }
    };
    emit(&args.out, &content)?;
    Ok(0)
}

/// Inline JSON (leading '{') or a path to a JSON file.
fn load_spec(raw: &str) -> anyhow::Result<MeasureSpec> {
    let text = if raw.trim_start().starts_with('{') {
        raw.to_string()
    } else {
        std::fs::read_to_string(raw).with_context(|| format!("reading spec file `{raw}`"))?
    };
    let spec: MeasureSpec =
        serde_json::from_str(&text).map_err(|e| anyhow!("malformed measure spec: {e}"))?;
    spec.validate().map_err(|e| anyhow!("invalid measure spec: {e}"))?;
    Ok(spec)
}

/// Flag beats the GM_BUDGET_ELEMENTS environment variable beats the default.
fn resolve_budget(flag: Option<u64>) -> anyhow::Result<Budget> {
    if let Some(v) = flag {
        return Ok(Budget::elements(v));
    }
    match std::env::var("GM_BUDGET_ELEMENTS") {
        Ok(s) => {
            let v: u64 = s
                .trim()
                .parse()
                .map_err(|_| anyhow!("GM_BUDGET_ELEMENTS must be an integer, got `{s}`"))?;
            Ok(Budget::elements(v))
        }
        Err(_) => Ok(Budget::default()),
    }
}

/// Print to stdout, or write atomically next to the destination.
fn emit(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        None => {
            println!("{content}");
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating a temporary report in {}", dir.display()))?;
            tmp.write_all(content.as_bytes())?;
            tmp.write_all(b"\n")?;
            tmp.persist(path)
                .map_err(|e| anyhow!("writing report to {}: {}", path.display(), e.error))?;
            Ok(())
        }
    }
}
