//! `furst`: one binary over the whole construction — Σ(M) enumeration, circle
//! orbits, convergents and Dirichlet pairs, Δ-nets, digit strata, subgroup
//! sums, the end-to-end solvers, and the check suite.
//!
//! Conventions, uniformly across subcommands:
//! - stdout carries the requested report; `--format json|csv|human` picks the
//!   rendering (JSON is the machine interface, CSV the scan/stream interface,
//!   human the spot check). CSV output is headerless; columns are documented
//!   per subcommand.
//! - big integers and rationals cross the boundary as decimal strings
//!   (`"31104"`, `"151936633/3000000021"`), both directions; floats print
//!   shortest-round-trip.
//! - exit 0: success. exit 2: rejected input or a failed run — one line
//!   `{"error":{"kind":...,"message":...}}` on stderr. exit 64: usage (an
//!   unknown flag/subcommand, or a value of the wrong shape for its flag).
//!   `verify-all` exits 1 when a check fails.
//! - `--threads N` caps the worker pool; env `FURST_THREADS` is the same knob
//!   (the flag wins). Orchestration itself is single-threaded.
//! - reruns with identical inputs and seed are byte-identical.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use furst_core::alpha::{baker_probe, convergents, dirichlet_approx, psi_bad_witness, PsiSpec};
use furst_core::circle::{dispersion, sigma_alpha, Angle, Metric, PointSet};
use furst_core::digits::{combinatorial_search, YSet};
use furst_core::harmonics::{
    exp_sum, lemma5_scan, lemma6_batch, lemma6_check, lemma7_check, lemma8_search, mult_order,
    subgroup, BumpSpec,
};
use furst_core::netgen::{build_net, DigitSet};
use furst_core::pipeline::{
    measure_density, run_theorem1, solve_inhomogeneous, PipelineConfig, PipelineReport,
    SolveMode, SolveResult, DEFAULT_EPS,
};
use furst_core::real::RealSpec;
use furst_core::sunits::{
    count_lattice, count_pow_bound, enumerate_sigma, gap_report, Quadrant, SUnit, SUnitParams,
    ELEMENT_BUDGET,
};
use furst_core::verify::{self, Level};
use furst_core::Error;

// ---------------------------------------------------------------------------
// failure plumbing

/// A rejected invocation: machine-readable kind + message, exit 2.
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Failure { kind, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { kind: e.kind(), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { kind: "io", message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { kind: "parse", message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

// ---------------------------------------------------------------------------
// argument tree

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Parser)]
#[command(
    name = "furst",
    version,
    about = "Effective density of {a^u b^v α} on the circle: enumeration, nets, digit strata, subgroup sums, solvers",
    max_term_width = 100
)]
struct Cli {
    /// Output rendering; each subcommand documents its default (JSON unless
    /// stated otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Cap on worker threads for parallel scans (FURST_THREADS mirrors this;
    /// the flag wins).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

/// The coprime base pair.
#[derive(Args)]
struct Bases {
    /// First base, a ≥ 2.
    #[arg(long)]
    a: u64,
    /// Second base, b ≥ 2, coprime to a.
    #[arg(long)]
    b: u64,
}

impl Bases {
    fn params(&self) -> CliResult<SUnitParams> {
        Ok(SUnitParams::new(self.a, self.b)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Σ(M) = {a^u b^v ≤ M}: enumeration, exact counts, gap statistics.
    #[command(subcommand)]
    Sunits(SunitsCmd),
    /// Orbits {qα} on ℚ/ℤ and their exact dispersion.
    #[command(subcommand)]
    Circle(CircleCmd),
    /// Continued fractions: convergents, Dirichlet pairs, ψ-badness, log-ratio probe.
    #[command(subcommand)]
    Alpha(AlphaCmd),
    /// The pigeonhole Δ-net grown from one orbit gap.
    #[command(subcommand)]
    Net(NetCmd),
    /// Digit-set strata: the large-and-short stratum search.
    #[command(subcommand)]
    Digits(DigitsCmd),
    /// The subgroup ⟨b⟩ mod a^ℓ: orders, exponential sums, the staged checks.
    #[command(subcommand)]
    Harmonics(HarmonicsCmd),
    /// One full staged run from a config file.
    Run(RunArgs),
    /// Minimize ‖qα − β‖ over q ∈ Σ(N), brute-force or staged.
    Solve(SolveArgs),
    /// Dispersion of Σ_α(Q^e) against the asymptotic bound.
    Density(DensityArgs),
    /// The twelve-part check suite (default output: one line per check).
    VerifyAll(VerifyArgs),
}

#[derive(Subcommand)]
enum SunitsCmd {
    /// List Σ(M), ascending. CSV columns: u,v,value.
    Enum {
        #[command(flatten)]
        bases: Bases,
        /// Enumeration cutoff (decimal).
        #[arg(long = "M")]
        m: String,
        /// Shorthand for --format json.
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Shorthand for --format csv.
        #[arg(long)]
        csv: bool,
    },
    /// Exact |{(u,v) : a^u b^v ≤ bound}| next to the two-term size estimate.
    Count {
        #[command(flatten)]
        bases: Bases,
        /// Count below this value (decimal).
        #[arg(long = "M", conflicts_with = "t")]
        m: Option<String>,
        /// Count below e^t instead: u·ln a + v·ln b ≤ t, decided by certified
        /// interval arithmetic.
        #[arg(long)]
        t: Option<f64>,
        /// Require u, v ≥ 1 instead of u, v ≥ 0.
        #[arg(long)]
        positive: bool,
    },
    /// Consecutive gaps of Σ(M) with the β-normalized constant.
    /// CSV columns: q,diff.
    Gaps {
        #[command(flatten)]
        bases: Bases,
        /// Enumeration cutoff (decimal).
        #[arg(long = "M")]
        m: String,
        /// Normalization exponent β > 2 for (q′−q)/q · (ln q)^{1/(β−1)}.
        #[arg(long)]
        beta: f64,
    },
}

#[derive(Subcommand)]
enum CircleCmd {
    /// Exact dispersion of a point list: one `p/q` per line, values in [0, 1).
    Dispersion {
        /// File of circle points.
        #[arg(long = "points-file")]
        points_file: PathBuf,
        /// Measure on ℝ/ℤ instead of [0, 1] with endpoint walls.
        #[arg(long)]
        circular: bool,
    },
    /// The orbit {qα mod 1 : q ∈ Σ(M)} for α = A/Q, sorted. CSV: one angle per line.
    SigmaAlpha {
        #[command(flatten)]
        bases: Bases,
        /// Enumeration cutoff (decimal).
        #[arg(long = "M")]
        m: String,
        /// Numerator of α.
        #[arg(long = "A")]
        a_num: String,
        /// Denominator of α, coprime to A.
        #[arg(long = "Q")]
        q_den: String,
    },
}

#[derive(Subcommand)]
enum AlphaCmd {
    /// All convergents p/q with q ≤ limit. CSV columns: index,p,q.
    Convergents {
        /// Real-number spec: bare rational ("5/7"), {"rational":"5/7"},
        /// {"cf":[a0,a1,...],"period_from":i}, or {"decimal":"0.63...","bits":256}.
        #[arg(long)]
        spec: String,
        /// Denominator cutoff (decimal).
        #[arg(long = "q-limit")]
        q_limit: String,
    },
    /// The Dirichlet pair: coprime (A, Q), Q ≤ N, |x − A/Q| ≤ 1/(QN), verified.
    Dirichlet {
        /// Real-number spec (see `convergents --help`).
        #[arg(long)]
        spec: String,
        /// Denominator budget (decimal).
        #[arg(long = "N")]
        n: String,
    },
    /// Certify ‖qx‖ ≥ ψ(q) = k₁q^{−k₂} for all q ≤ N, or report the violating q.
    PsiBad {
        /// Real-number spec (see `convergents --help`).
        #[arg(long)]
        spec: String,
        /// Scale k₁ > 0 of ψ.
        #[arg(long)]
        k1: f64,
        /// Decay exponent k₂ ≥ 1 of ψ.
        #[arg(long)]
        k2: f64,
        /// Scan bound (decimal).
        #[arg(long = "N")]
        n: String,
    },
    /// Convergent table of log a/log b with certified q^β·|x − p/q| enclosures
    /// and the minimum constant c₀ certified positive.
    Baker {
        #[command(flatten)]
        bases: Bases,
        /// Scaling exponent applied to each denominator.
        #[arg(long, default_value_t = furst_core::regression::BETA)]
        beta: f64,
        /// Denominator cutoff (decimal).
        #[arg(long = "q-limit")]
        q_limit: String,
        /// Working precision for the row enclosures.
        #[arg(long, default_value_t = 256)]
        bits: u32,
    },
}

#[derive(Subcommand)]
enum NetCmd {
    /// Grow the Δ-net of α = A/Q at budget M and certify its windows.
    Build {
        #[command(flatten)]
        bases: Bases,
        /// Numerator of α.
        #[arg(long = "A")]
        a_num: String,
        /// Denominator of α, coprime to A.
        #[arg(long = "Q")]
        q_den: String,
        /// Orbit budget M (decimal); the net lives on Σ_α(M·Q).
        #[arg(long = "M")]
        m: String,
        /// Shorthand for --format json (the default).
        #[arg(long)]
        json: bool,
        /// Include the full net point list in the JSON report.
        #[arg(long = "emit-points")]
        emit_points: bool,
    },
}

#[derive(Subcommand)]
enum DigitsCmd {
    /// Search the grid s = n − jℓ for a stratum with X ≥ a^{(1/2−2ε)ℓ}.
    Search {
        /// DigitSet JSON file: {"a":2,"n":8,"residues":["0","3",...]}.
        #[arg(long = "in")]
        input: PathBuf,
        /// Fibre width exponent ℓ ≥ 1.
        #[arg(long)]
        l: u32,
        /// Slack ε ∈ (0, 1/4) in the size threshold.
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Subcommand)]
enum HarmonicsCmd {
    /// S = ord(b mod a^ℓ); prints the bare number.
    Order {
        #[command(flatten)]
        bases: Bases,
        /// Modulus exponent: the subgroup lives mod a^ℓ.
        #[arg(long)]
        l: u32,
    },
    /// The full descriptor (S, ϰ, ℓ₁) of ⟨b⟩ mod a^ℓ.
    Subgroup {
        #[command(flatten)]
        bases: Bases,
        /// Modulus exponent.
        #[arg(long)]
        l: u32,
    },
    /// Exhaustive vanishing scan of σ(m) = Σ_{s∈𝔖} e(ms/a^ℓ) over m ∈ [1, a^ℓ).
    /// CSV streams the raw sums: m,re,im,abs.
    Lemma5 {
        #[command(flatten)]
        bases: Bases,
        /// Modulus exponent.
        #[arg(long)]
        l: u32,
        /// Violation threshold relative to S.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Orbit-averaged bound Σ_{s∈𝔖}|σ(ms)|² ≤ w_m·S·Y for one m or m = 1..max.
    /// CSV columns: m,lhs,rhs,ratio,pass.
    Lemma6 {
        /// 𝔜-set JSON file (as emitted inside run reports).
        #[arg(long = "y")]
        y_file: PathBuf,
        /// Second base b, coprime to the file's a.
        #[arg(long)]
        b: u64,
        /// Single multiplier m ≥ 1.
        #[arg(long, conflicts_with = "m_max")]
        m: Option<u64>,
        /// Check every m in 1..=m-max instead.
        #[arg(long = "m-max")]
        m_max: Option<u64>,
    },
    /// Mean-square equidistribution remainder of the triangle bump over w = 0..S−1.
    Lemma7 {
        /// 𝔜-set JSON file.
        #[arg(long = "y")]
        y_file: PathBuf,
        /// Second base b.
        #[arg(long)]
        b: u64,
        /// Bump sharpness H > 1.
        #[arg(long = "H")]
        h: f64,
        /// Target point z as a rational.
        #[arg(long)]
        z: String,
    },
    /// Minimize ‖b^w·x/a^s − z‖ over the fibre; success iff err ≤ 1/H exactly.
    Lemma8 {
        /// 𝔜-set JSON file.
        #[arg(long = "y")]
        y_file: PathBuf,
        /// Second base b.
        #[arg(long)]
        b: u64,
        /// Digit depth s ≥ ℓ of the fibre x = λ + y·a^{s−ℓ}.
        #[arg(long)]
        s: u32,
        /// Target point z as a rational.
        #[arg(long)]
        z: String,
        /// Success threshold 1/H, H > 1.
        #[arg(long = "H")]
        h: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// RunConfig JSON file (see --help for the schema).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed; recorded in the report.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// First base, a ≥ 2.
    #[arg(long, default_value_t = 2)]
    a: u64,
    /// Second base, b ≥ 2, coprime to a.
    #[arg(long, default_value_t = 3)]
    b: u64,
    /// α spec (bare rational or RealSpec JSON).
    #[arg(long)]
    alpha: String,
    /// β spec (bare rational or RealSpec JSON).
    #[arg(long)]
    beta: String,
    /// Search window: q ranges over Σ(N) (decimal).
    #[arg(long = "N")]
    n: String,
    /// brute: exhaustive certified scan. pipeline: the staged construction,
    /// which falls back to the scan (with a reason) when it declines.
    #[arg(long)]
    mode: String,
}

#[derive(Args)]
struct DensityArgs {
    /// First base, a ≥ 2.
    #[arg(long)]
    a: u64,
    /// Second base, b ≥ 2, coprime to a.
    #[arg(long)]
    b: u64,
    /// Numerator of α.
    #[arg(long = "A")]
    a_num: String,
    /// Denominator of α, coprime to A.
    #[arg(long = "Q")]
    q_den: String,
    /// Budget exponent: the orbit is Σ_α(⌊Q^e⌋), e ≥ 1.
    #[arg(long)]
    exponent: f64,
    /// Slack in the asymptotic bound exponent 1/8 − ε.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// fast: trimmed trial matrices (seconds). full: the complete frozen
    /// acceptance matrices (minutes).
    #[arg(long, default_value = "fast")]
    level: String,
    /// Where to write the frozen-constants snapshot (written after a full
    /// run, or whenever this flag is given). Default: regression-constants.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// run config

fn schema_one() -> u32 {
    1
}

fn default_budget() -> u64 {
    ELEMENT_BUDGET as u64
}

/// On-disk request for `furst run`: the staged-construction config plus
/// CLI-level knobs.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    /// Config schema version; this binary reads 1.
    #[serde(default = "schema_one")]
    schema: u32,
    /// Recorded in the report. Runs are deterministic; the seed is an
    /// identity for reproducibility bookkeeping, and reruns with the same
    /// config and seed are byte-identical.
    #[serde(default)]
    seed: u64,
    /// Default rendering when --format is absent.
    #[serde(default)]
    format: Option<Format>,
    /// Cap on every enumerated set the run records (net points, |Σ(⌊d⌋)|,
    /// |𝔜|); exceeding it fails the run after the fact. The library
    /// additionally hard-stops any single enumeration at 4·10⁶ elements.
    #[serde(default = "default_budget")]
    element_budget: u64,
    /// The staged construction: bases, anchor A/Q, δ, ε, targets, overrides.
    pipeline: PipelineConfig,
}

// ---------------------------------------------------------------------------
// parsing and printing helpers

fn parse_biguint(what: &str, s: &str) -> CliResult<BigUint> {
    s.trim()
        .parse::<BigUint>()
        .map_err(|e| Failure::new("parse", format!("{what}: {s:?} is not a decimal integer ({e})")))
}

fn parse_rational(what: &str, s: &str) -> CliResult<BigRational> {
    let t = s.trim();
    let (n, d) = t.split_once('/').unwrap_or((t, "1"));
    let num: BigInt = n
        .trim()
        .parse()
        .map_err(|e| Failure::new("parse", format!("{what}: bad numerator in {t:?} ({e})")))?;
    let den: BigInt = d
        .trim()
        .parse()
        .map_err(|e| Failure::new("parse", format!("{what}: bad denominator in {t:?} ({e})")))?;
    if den.is_zero() {
        return Err(Failure::new("parse", format!("{what}: zero denominator in {t:?}")));
    }
    Ok(BigRational::new(num, den))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::new("parse", format!("{}: {e}", path.display())))
}

/// Pretty-print a report. Top-level objects get the mandatory `"schema": 1`
/// version field (and alphabetical keys); bare streams (arrays) mirror the
/// library types untouched.
fn print_json<T: Serialize>(v: &T) -> CliResult<()> {
    let mut val = serde_json::to_value(v)?;
    if let Some(obj) = val.as_object_mut() {
        obj.entry("schema").or_insert(1.into());
    }
    println!("{}", serde_json::to_string_pretty(&val)?);
    Ok(())
}

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn sunit_label(q: &SUnit, a: u64, b: u64) -> String {
    format!("{a}^{}·{b}^{} = {}", q.u, q.v, q.value)
}

// ---------------------------------------------------------------------------
// dispatch

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land on stdout and exit 0; true usage errors
            // land on stderr and exit 64.
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": {"kind": f.kind, "message": f.message}})
            );
            ExitCode::from(2)
        }
    }
}

fn init_threads(flag: Option<usize>) -> CliResult<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("FURST_THREADS") {
            Ok(s) if s.trim().is_empty() => None,
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|e| {
                Failure::new("invalid_params", format!("FURST_THREADS={s:?}: {e}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Failure::new("invalid_params", "thread count must be ≥ 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new("internal", format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<u8> {
    init_threads(cli.threads)?;
    let fmt = |pick: Option<Format>, default: Format| pick.or(cli.format).unwrap_or(default);
    match cli.cmd {
        Cmd::Sunits(c) => cmd_sunits(c, cli.format),
        Cmd::Circle(c) => cmd_circle(c, fmt(None, Format::Json)),
        Cmd::Alpha(c) => cmd_alpha(c, fmt(None, Format::Json)),
        Cmd::Net(c) => cmd_net(c, cli.format),
        Cmd::Digits(c) => cmd_digits(c, fmt(None, Format::Json)),
        Cmd::Harmonics(c) => cmd_harmonics(c, fmt(None, Format::Json)),
        Cmd::Run(args) => cmd_run(args, cli.format),
        Cmd::Solve(args) => cmd_solve(args, fmt(None, Format::Json)),
        Cmd::Density(args) => cmd_density(args, fmt(None, Format::Json)),
        Cmd::VerifyAll(args) => cmd_verify_all(args, fmt(None, Format::Human)),
    }
}

// ---------------------------------------------------------------------------
// sunits

fn cmd_sunits(cmd: SunitsCmd, global: Option<Format>) -> CliResult<u8> {
    match cmd {
        SunitsCmd::Enum { bases, m, json, csv } => {
            let params = bases.params()?;
            let m = parse_biguint("M", &m)?;
            let list = enumerate_sigma(&params, &m)?;
            let fmt = if json {
                Format::Json
            } else if csv {
                Format::Csv
            } else {
                global.unwrap_or(Format::Json)
            };
            match fmt {
                Format::Json => print_json(&list)?,
                Format::Csv => {
                    let mut out = std::io::stdout().lock();
                    for e in &list {
                        writeln!(out, "{},{},{}", e.u, e.v, e.value)?;
                    }
                }
                Format::Human => {
                    for e in &list {
                        println!("{}", sunit_label(e, params.a, params.b));
                    }
                }
            }
            Ok(0)
        }
        SunitsCmd::Count { bases, m, t, positive } => {
            let params = bases.params()?;
            let quadrant = if positive { Quadrant::Positive } else { Quadrant::NonNeg };
            let report = match (m, t) {
                (Some(m), None) => count_pow_bound(&params, &parse_biguint("M", &m)?, quadrant)?,
                (None, Some(t)) => count_lattice(&params, t, quadrant)?,
                _ => {
                    return Err(Failure::new(
                        "invalid_params",
                        "exactly one of --M and --t is required",
                    ))
                }
            };
            match global.unwrap_or(Format::Json) {
                Format::Json => print_json(&report)?,
                Format::Csv => println!("{},{:?}", report.count, report.two_term_estimate),
                Format::Human => {
                    let rel = (report.count as f64 - report.two_term_estimate).abs()
                        / (report.count as f64).max(1.0);
                    println!(
                        "count = {} (two-term estimate {:.4}, relative gap {:.4})",
                        report.count, report.two_term_estimate, rel
                    );
                }
            }
            Ok(0)
        }
        SunitsCmd::Gaps { bases, m, beta } => {
            let params = bases.params()?;
            let m = parse_biguint("M", &m)?;
            let report = gap_report(&params, &m, beta)?;
            match global.unwrap_or(Format::Json) {
                Format::Json => print_json(&report)?,
                Format::Csv => {
                    let mut out = std::io::stdout().lock();
                    for e in &report.entries {
                        writeln!(out, "{},{}", e.q, e.diff)?;
                    }
                }
                Format::Human => println!(
                    "{} gaps; max {} at ({}, {}); (q′−q)/q·(ln q)^(1/(β−1)) ≤ {:.6} for β = {}",
                    report.entries.len(),
                    report.max_gap,
                    report.argmax_pair.lo,
                    report.argmax_pair.hi,
                    report.normalized_constant,
                    report.beta
                ),
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// circle

fn cmd_circle(cmd: CircleCmd, fmt: Format) -> CliResult<u8> {
    match cmd {
        CircleCmd::Dispersion { points_file, circular } => {
            let text = std::fs::read_to_string(&points_file)
                .map_err(|e| Failure::new("io", format!("{}: {e}", points_file.display())))?;
            let mut angles = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let r = parse_rational(&format!("line {}", i + 1), line)?;
                angles.push(Angle::from_unit_rational(&r)?);
            }
            let points = PointSet::from_angles(angles);
            let metric = if circular { Metric::Circular } else { Metric::Interval };
            let d = dispersion(&points, metric)?;
            match fmt {
                Format::Human => println!("{d}"),
                _ => print_json(&serde_json::json!({
                    "points": points.len(),
                    "metric": if circular { "circular" } else { "interval" },
                    "dispersion": d.to_string(),
                }))?,
            }
            Ok(0)
        }
        CircleCmd::SigmaAlpha { bases, m, a_num, q_den } => {
            let params = bases.params()?;
            let m = parse_biguint("M", &m)?;
            let alpha =
                Angle::new(parse_biguint("A", &a_num)?, parse_biguint("Q", &q_den)?)?;
            let points = sigma_alpha(&params, &m, &alpha)?;
            match fmt {
                Format::Json => print_json(&points)?,
                Format::Csv | Format::Human => {
                    let mut out = std::io::stdout().lock();
                    for p in points.iter() {
                        writeln!(out, "{}/{}", p.num(), p.den())?;
                    }
                }
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// alpha

fn cmd_alpha(cmd: AlphaCmd, fmt: Format) -> CliResult<u8> {
    match cmd {
        AlphaCmd::Convergents { spec, q_limit } => {
            let x = RealSpec::parse(&spec)?;
            let limit = parse_biguint("q-limit", &q_limit)?;
            let rows = convergents(&x, &limit)?;
            match fmt {
                Format::Csv => {
                    let mut out = std::io::stdout().lock();
                    for c in &rows {
                        writeln!(out, "{},{},{}", c.index, c.p, c.q)?;
                    }
                }
                Format::Human => {
                    for c in &rows {
                        println!("{:>3}: {}/{}", c.index, c.p, c.q);
                    }
                }
                Format::Json => print_json(&rows)?,
            }
            Ok(0)
        }
        AlphaCmd::Dirichlet { spec, n } => {
            let x = RealSpec::parse(&spec)?;
            let n = parse_biguint("N", &n)?;
            let (a, q) = dirichlet_approx(&x, &n)?;
            match fmt {
                Format::Human => println!("{a}/{q}"),
                _ => print_json(&serde_json::json!({
                    "a": a.to_string(),
                    "q": q.to_string(),
                }))?,
            }
            Ok(0)
        }
        AlphaCmd::PsiBad { spec, k1, k2, n } => {
            let x = RealSpec::parse(&spec)?;
            let witness = psi_bad_witness(&x, &PsiSpec { k1, k2 }, &parse_biguint("N", &n)?)?;
            print_json(&witness)?;
            Ok(0)
        }
        AlphaCmd::Baker { bases, beta, q_limit, bits } => {
            let params = bases.params()?;
            let limit = parse_biguint("q-limit", &q_limit)?;
            let report = baker_probe(&params, beta, &limit, bits)?;
            match fmt {
                Format::Csv => {
                    let mut out = std::io::stdout().lock();
                    for r in &report.rows {
                        writeln!(out, "{},{},{},{:?},{:?}", r.index, r.p, r.q, r.scaled_lo, r.scaled_hi)?;
                    }
                }
                Format::Human => {
                    println!(
                        "{} convergents of log {}/log {} up to q ≤ {limit}; min q^{beta}·|x − p/q| ∈ [{:?}, {:?}]",
                        report.rows.len(),
                        params.a,
                        params.b,
                        report.c0_lo,
                        report.c0_hi
                    );
                }
                Format::Json => print_json(&report)?,
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// net / digits

fn cmd_net(cmd: NetCmd, global: Option<Format>) -> CliResult<u8> {
    match cmd {
        NetCmd::Build { bases, a_num, q_den, m, json, emit_points } => {
            let params = bases.params()?;
            let alpha =
                Angle::new(parse_biguint("A", &a_num)?, parse_biguint("Q", &q_den)?)?;
            let m = parse_biguint("M", &m)?;
            let report = build_net(&params, &alpha, &m)?;
            let fmt = if json { Format::Json } else { global.unwrap_or(Format::Json) };
            match fmt {
                Format::Human => {
                    println!(
                        "net of {} points for α = {}/{} at M = {}: gap 1/d = {} (q = {}, {}), Δ = {} ≈ {:.6}, dispersion {} ≈ {:.6}",
                        report.net.len(),
                        report.alpha.num(),
                        report.alpha.den(),
                        report.m,
                        report.inv_gap.recip(),
                        report.q_lo,
                        report.q_hi,
                        report.delta,
                        rat_f64(&report.delta),
                        report.net_dispersion,
                        rat_f64(&report.net_dispersion),
                    );
                }
                _ => {
                    let mut v = serde_json::to_value(&report)?;
                    let obj = v.as_object_mut().expect("report is an object");
                    if !emit_points {
                        obj.remove("net");
                    }
                    obj.entry("schema").or_insert(1.into());
                    println!("{}", serde_json::to_string_pretty(&v)?);
                }
            }
            Ok(0)
        }
    }
}

fn cmd_digits(cmd: DigitsCmd, fmt: Format) -> CliResult<u8> {
    match cmd {
        DigitsCmd::Search { input, l, eps } => {
            let ds: DigitSet = read_json(&input)?;
            let report = combinatorial_search(&ds, l, eps)?;
            match fmt {
                Format::Human => println!(
                    "s = {}, λ = {}, X = {} {} threshold a^((1/2−2ε)ℓ) = {:.3} ({})",
                    report.stratum.s,
                    report.stratum.lambda,
                    report.stratum.x,
                    if report.pass { "≥" } else { "<" },
                    report.threshold,
                    if report.pass { "pass" } else { "thin" },
                ),
                _ => print_json(&report)?,
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// harmonics

fn load_y(y_file: &PathBuf, b: u64) -> CliResult<(YSet, furst_core::harmonics::SubgroupDescriptor)> {
    let y: YSet = read_json(y_file)?;
    let params = SUnitParams::new(y.a, b)?;
    let desc = subgroup(&params, y.l)?;
    Ok((y, desc))
}

fn cmd_harmonics(cmd: HarmonicsCmd, fmt: Format) -> CliResult<u8> {
    match cmd {
        HarmonicsCmd::Order { bases, l } => {
            bases.params()?;
            println!("{}", mult_order(bases.b, bases.a, l)?);
            Ok(0)
        }
        HarmonicsCmd::Subgroup { bases, l } => {
            let desc = subgroup(&bases.params()?, l)?;
            print_json(&desc)?;
            Ok(0)
        }
        HarmonicsCmd::Lemma5 { bases, l, tolerance } => {
            let desc = subgroup(&bases.params()?, l)?;
            match fmt {
                Format::Csv => {
                    let mut out = std::io::BufWriter::new(std::io::stdout().lock());
                    for m in 1..desc.modulus() {
                        let v = exp_sum(&desc, m);
                        writeln!(out, "{m},{:?},{:?},{:?}", v.re, v.im, v.abs())?;
                    }
                    out.flush()?;
                }
                Format::Json => print_json(&lemma5_scan(&desc, tolerance)?)?,
                Format::Human => {
                    let rep = lemma5_scan(&desc, tolerance)?;
                    println!(
                        "scanned {} multipliers mod {}^{}: {} violations of |σ(m)| ≤ {:e}·S (max ratio {:.3e}); observed vanishing order {:?} vs ℓ₁ = {}",
                        rep.scanned,
                        desc.a,
                        desc.l,
                        rep.violations.len(),
                        rep.tolerance,
                        rep.max_ratio,
                        rep.empirical_l1,
                        rep.l1,
                    );
                }
            }
            Ok(0)
        }
        HarmonicsCmd::Lemma6 { y_file, b, m, m_max } => {
            let (y, desc) = load_y(&y_file, b)?;
            match m_max {
                Some(mx) => {
                    if mx == 0 {
                        return Err(Failure::new("invalid_params", "--m-max must be ≥ 1"));
                    }
                    let ms: Vec<u64> = (1..=mx).collect();
                    let checks = lemma6_batch(&y, &desc, &ms)?;
                    match fmt {
                        Format::Csv | Format::Human => {
                            let mut out = std::io::stdout().lock();
                            for c in &checks {
                                writeln!(
                                    out,
                                    "{},{:?},{:?},{:?},{}",
                                    c.m, c.lhs, c.rhs, c.ratio, c.pass
                                )?;
                            }
                        }
                        Format::Json => print_json(&checks)?,
                    }
                }
                None => {
                    let check = lemma6_check(&y, &desc, m.unwrap_or(1))?;
                    match fmt {
                        Format::Human => println!(
                            "m = {}: Σ|σ(ms)|² = {:.6} ≤ w_m·S·Y = {:.6} (ratio {:.3e}, {})",
                            check.m,
                            check.lhs,
                            check.rhs,
                            check.ratio,
                            if check.pass { "pass" } else { "FAIL" },
                        ),
                        _ => print_json(&check)?,
                    }
                }
            }
            Ok(0)
        }
        HarmonicsCmd::Lemma7 { y_file, b, h, z } => {
            let (y, desc) = load_y(&y_file, b)?;
            let z = parse_rational("z", &z)?;
            let check = lemma7_check(&y, &desc, &BumpSpec::new(h)?, &z)?;
            match fmt {
                Format::Human => println!(
                    "mean R² = {:.6e} = {:.4}·‖f′‖²/Y; best w = {} with R = {:.6e}",
                    check.mean_square, check.ratio, check.best_w, check.best_r,
                ),
                _ => print_json(&check)?,
            }
            Ok(0)
        }
        HarmonicsCmd::Lemma8 { y_file, b, s, z, h } => {
            let (y, desc) = load_y(&y_file, b)?;
            let z = parse_rational("z", &z)?;
            let outcome = lemma8_search(&y, &desc, s, &z, h)?;
            match fmt {
                Format::Human => println!(
                    "best of {} pairs: w = {}, y = {}, x = {}, ‖b^w x/a^s − z‖ = {} ≈ {:.3e} ({} 1/H)",
                    outcome.scanned,
                    outcome.w,
                    outcome.y,
                    outcome.x,
                    outcome.err,
                    rat_f64(&outcome.err),
                    if outcome.success { "≤" } else { ">" },
                ),
                _ => print_json(&outcome)?,
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// run / solve / density

fn human_pipeline(rep: &PipelineReport) -> String {
    let mut s = String::new();
    let (a, b) = (rep.config.params.a, rep.config.params.b);
    let _ = writeln!(
        s,
        "α = {}/{}, M = {}: net {} points, Δ = {} ≈ {:.5}, dispersion ≈ {:.5}",
        rep.alpha.num(),
        rep.alpha.den(),
        rep.m,
        rep.net.net.len(),
        rep.net.delta,
        rat_f64(&rep.net.delta),
        rat_f64(&rep.net.net_dispersion),
    );
    let _ = writeln!(
        s,
        "digits: |𝔛_{}| = {} (≥ √a^n/2: {}); stratum s = {}, ℓ = {}, λ = {}, X = {}",
        rep.n,
        rep.lemma2.x_n,
        if rep.lemma2.pass { "yes" } else { "no" },
        rep.search.stratum.s,
        rep.l,
        rep.search.stratum.lambda,
        rep.search.stratum.x,
    );
    let _ = writeln!(
        s,
        "subgroup: S = {} mod {}^{}, ϰ = {}, ℓ₁ = {}; H = {}; exponent budget {}; carry cap b^(a^ℓ) ≤ a^(s/2): {}",
        rep.subgroup.order,
        a,
        rep.subgroup.l,
        rep.subgroup.kappa,
        rep.subgroup.l1,
        rep.h,
        if rep.budget.pass { "pass" } else { "exceeded" },
        if rep.bw_cap_ok { "yes" } else { "no" },
    );
    for t in &rep.targets {
        let _ = writeln!(
            s,
            "z = {}: q* = {}, ‖q*α − z‖ = {} ≈ {:.4e} (search err {} 1/H; within claim: {})",
            t.z,
            sunit_label(&t.q_star, a, b),
            t.error,
            rat_f64(&t.error),
            if t.search.success { "≤" } else { ">" },
            t.within_claimed,
        );
    }
    s.pop();
    s
}

fn cmd_run(args: RunArgs, global: Option<Format>) -> CliResult<u8> {
    let cfg: RunConfig = read_json(&args.config)?;
    if cfg.schema != 1 {
        return Err(Failure::new(
            "invalid_params",
            format!("config schema {} unsupported (this binary reads 1)", cfg.schema),
        ));
    }
    if cfg.element_budget == 0 {
        return Err(Failure::new("invalid_params", "element_budget must be > 0"));
    }
    let mut rep = run_theorem1(&cfg.pipeline)?;
    rep.seed = Some(args.seed.unwrap_or(cfg.seed));
    for (what, size) in [
        ("net point count", rep.net.point_count),
        ("|Σ(⌊d⌋)|", rep.net.k),
        ("|𝔜|", rep.y_set.y),
    ] {
        if size > cfg.element_budget {
            return Err(Failure::new(
                "budget",
                format!("{what} = {size} exceeds element_budget = {}", cfg.element_budget),
            ));
        }
    }
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&rep)? + "\n")
            .map_err(|e| Failure::new("io", format!("{}: {e}", out.display())))?;
    }
    match global.or(cfg.format).unwrap_or(Format::Json) {
        // Direct struct serialization keeps stdout byte-identical to --out.
        Format::Json => println!("{}", serde_json::to_string_pretty(&rep)?),
        Format::Human => println!("{}", human_pipeline(&rep)),
        Format::Csv => {
            let mut out = std::io::stdout().lock();
            for t in &rep.targets {
                writeln!(
                    out,
                    "{},{},{},{}",
                    t.z, t.q_star.value, t.error, t.within_claimed
                )?;
            }
        }
    }
    Ok(0)
}

fn cmd_solve(args: SolveArgs, fmt: Format) -> CliResult<u8> {
    let params = SUnitParams::new(args.a, args.b)?;
    let alpha = RealSpec::parse(&args.alpha)?;
    let beta = RealSpec::parse(&args.beta)?;
    let n = parse_biguint("N", &args.n)?;
    let mode: SolveMode = args.mode.parse()?;
    let result = solve_inhomogeneous(&params, &alpha, &beta, &n, mode)?;
    match fmt {
        Format::Human => print_solve_human(&result, args.a, args.b),
        Format::Csv => {
            // u,v,value,err_lo,err_hi (lo = hi when the error is exact)
            println!(
                "{},{},{},{},{}",
                result.q.u,
                result.q.v,
                result.q.value,
                result.error.lo(),
                result.error.hi()
            );
        }
        Format::Json => print_json(&result)?,
    }
    Ok(0)
}

fn print_solve_human(result: &SolveResult, a: u64, b: u64) {
    use furst_core::pipeline::ErrorValue;
    let err = match &result.error {
        ErrorValue::Exact { value } => format!("{value} ≈ {:.6e}", rat_f64(value)),
        ErrorValue::Interval { lo, hi } => {
            format!("[{:.6e}, {:.6e}]", rat_f64(lo), rat_f64(hi))
        }
    };
    let mode = match (&result.mode, &result.fallback) {
        (SolveMode::Brute, None) => "exhaustive scan".to_string(),
        (_, Some(reason)) => format!("scan after the staged run declined: {reason}"),
        (SolveMode::Pipeline, None) => "staged construction".to_string(),
    };
    println!("q = {}, ‖qα − β‖ = {err} ({mode})", sunit_label(&result.q, a, b));
}

fn cmd_density(args: DensityArgs, fmt: Format) -> CliResult<u8> {
    let params = SUnitParams::new(args.a, args.b)?;
    let alpha = Angle::new(
        parse_biguint("A", &args.a_num)?,
        parse_biguint("Q", &args.q_den)?,
    )?;
    let report = measure_density(&params, &alpha, args.exponent, args.eps)?;
    match fmt {
        Format::Human => {
            let bound = match (report.paper_bound, report.vacuous) {
                (Some(b), Some(true)) => format!("asymptotic bound {b:.4} (≥ 1/2: says nothing yet)"),
                (Some(b), _) => format!("asymptotic bound {b:.4}"),
                _ => "asymptotic bound undefined at this size".to_string(),
            };
            println!(
                "Σ_α({}) has {} points, dispersion = {} ≈ {:.6}; {bound}",
                report.m,
                report.point_count,
                report.dispersion,
                rat_f64(&report.dispersion),
            );
        }
        Format::Csv => println!(
            "{},{},{}",
            report.m, report.point_count, report.dispersion
        ),
        Format::Json => print_json(&report)?,
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify-all

fn cmd_verify_all(args: VerifyArgs, fmt: Format) -> CliResult<u8> {
    let level: Level = args.level.parse()?;
    let mut outcomes = Vec::with_capacity(verify::CHECKS.len());
    for check in verify::CHECKS {
        let outcome = check(level);
        if fmt != Format::Json {
            println!("{}", outcome.line());
        }
        outcomes.push(outcome);
    }
    let all_pass = outcomes.iter().all(|o| o.pass);
    let report = verify::VerifyReport { level, outcomes, all_pass };
    if fmt == Format::Json {
        print_json(&report)?;
    } else {
        let failed = report.outcomes.iter().filter(|o| !o.pass).count();
        match failed {
            0 => println!("all {} checks passed", report.outcomes.len()),
            n => println!("{n} of {} checks FAILED", report.outcomes.len()),
        }
    }
    if level == Level::Full || args.out.is_some() {
        let path = args
            .out
            .unwrap_or_else(|| PathBuf::from("regression-constants.json"));
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&verify::regression_snapshot())? + "\n",
        )
        .map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
        eprintln!("frozen-constants snapshot written to {}", path.display());
    }
    Ok(if all_pass { 0 } else { 1 })
}
