//! Command-line front end: form I/O, classification, construction runs,
//! scans and report emission.
//!
//! Exit codes: 0 success, 1 usage/input, 2 domain error (no li-point, search
//! exhausted, …), 3 precision or digit budget exhausted. Certified quantities
//! are always printed as lo/hi pairs, bigints as decimal strings.

use crate::approx::{self, ScanEngine, ScanFilter};
use crate::canonical::{reduce_canonical, CanonicalKind};
use crate::error::{QdError, Result};
use crate::exact::{IntVector, DEFAULT_PRECISION};
use crate::extremal::{self, ln_bigint, ExtremalSequence, LimitPoint, PhiSchedule, SeedParam};
use crate::pell;
use crate::qform::QuadraticForm;
use crate::spectral;
use crate::witt;
use clap::{Args, Parser, Subcommand};
use num::{BigInt, Signed};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

/// Defaults shared by runs; flags win over the QD_THREADS environment
/// variable, which wins over these values.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub precision: u32,
    pub threads: usize,
    pub digit_budget: u64,
    pub c0: u64,
    pub witness_cap: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: DEFAULT_PRECISION,
            threads: 1,
            digit_budget: extremal::DEFAULT_DIGIT_BUDGET,
            c0: extremal::DEFAULT_C0,
            witness_cap: witt::DEFAULT_WITNESS_CAP,
        }
    }
}

#[derive(Parser)]
#[command(name = "qd", about = "exact constructions on quadratic hypersurfaces over Q", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for scans (overrides QD_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Working precision in bits for interval quantities.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// JSON run configuration; flags win over QD_THREADS, which wins over this.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FormArg {
    /// Path to a form JSON file ({"dim": 3, "coeffs": [[0,1,1],[2,2,-1]]}).
    #[arg(long)]
    form: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a form, echo its canonical JSON and basic invariants.
    Form(FormArg),
    /// Witt decomposition: kernel, hyperbolic pairs, anisotropic part.
    Witt {
        #[command(flatten)]
        form: FormArg,
        /// Isotropic witness search cap (points visited).
        #[arg(long, default_value_t = witt::DEFAULT_WITNESS_CAP)]
        cap: u64,
    },
    /// Reduce to a canonical shape (t0²−a1t1²−… or t0t1−a2t2²−…).
    Canonical(FormArg),
    /// Fundamental (and further) solutions of u² − a·v² = 1.
    Pell {
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// A solution of x² − a·y² − b·z² = 1 with xz ≠ 0.
    Trinomial {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Build the extremal sequence; JSONL, one record per index.
    Extremal {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        steps: usize,
        /// Seed size parameter B.
        #[arg(long, short = 'B')]
        big_b: Option<String>,
        /// Direct ℓ for hyperbolic-shape seeds.
        #[arg(long)]
        l: Option<String>,
        /// Also emit k automorphism images of the limit point.
        #[arg(long, default_value_t = 0)]
        orbit: usize,
        /// Also write the certified limit point as JSON (input for `scan`).
        #[arg(long)]
        xi_out: Option<PathBuf>,
    },
    /// Isotropic chains for Witt index ≥ 2 with growth/decay conditions.
    Chain {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        steps: usize,
        /// Decay schedule: log (= log(3X)/X) or sqrt (= X^-1/2).
        #[arg(long, default_value = "log")]
        phi: String,
    },
    /// Best-approximation scan; CSV records of the minimal points.
    Scan {
        /// Path to a limit point JSON (from `extremal --output`).
        #[arg(long)]
        xi: PathBuf,
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        xmax: u64,
        /// all | nonzero | zero (of q).
        #[arg(long, default_value = "all")]
        filter: String,
        /// Exhaustive engine instead of the anchored fast sweep.
        #[arg(long, default_value_t = false)]
        exact: bool,
    },
    /// Exponent estimates from scan records.
    Exponents {
        #[arg(long)]
        records: PathBuf,
    },
    /// Certified enclosure of the growth root ρ_n.
    Rho {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Transfer-operator fit of a sequence JSONL dump.
    Fit {
        #[arg(long)]
        seq: PathBuf,
    },
    /// form → canonical → extremal → limit → scan → exponents → fit report.
    Pipeline {
        #[command(flatten)]
        form: FormArg,
        #[arg(long, default_value_t = 18)]
        steps: usize,
        #[arg(long, short = 'B')]
        big_b: Option<String>,
        #[arg(long)]
        l: Option<String>,
        #[arg(long, default_value_t = 300)]
        xmax: u64,
    },
}

pub fn run(argv: Vec<OsString>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap renders its own message (including --help / --version)
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { 0 } else { 1 };
        }
    };
    let file_config: RunConfig = match &cli.config {
        Some(path) => match std::fs::read_to_string(path).map_err(QdError::from).and_then(|s| Ok(serde_json::from_str(&s)?)) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: bad config file: {e}");
                return 1;
            }
        },
        None => RunConfig::default(),
    };
    let threads = cli
        .threads
        .or_else(|| std::env::var("QD_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(file_config.threads)
        .max(1);
    let config = RunConfig {
        precision: cli.precision.unwrap_or(file_config.precision),
        threads,
        ..file_config
    };
    match dispatch(cli.command, &config, cli.output.as_deref()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_form(path: &std::path::Path) -> Result<QuadraticForm> {
    QuadraticForm::from_json(&std::fs::read_to_string(path)?)
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    s.parse().map_err(|_| QdError::BadInput(format!("bad integer {s:?}")))
}

fn emit(output: Option<&std::path::Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, content)?;
        }
        None => {
            let mut stdout = std::io::stdout();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn seed_param(big_b: &Option<String>, l: &Option<String>) -> Result<SeedParam> {
    match (big_b, l) {
        (Some(_), Some(_)) => Err(QdError::BadInput("give either --B or --l, not both".into())),
        (Some(b), None) => Ok(SeedParam::B(parse_bigint(b)?)),
        (None, Some(l)) => Ok(SeedParam::Ell(parse_bigint(l)?)),
        (None, None) => Ok(SeedParam::Auto),
    }
}

fn build_sequence(
    q: &QuadraticForm,
    steps: usize,
    param: &SeedParam,
    config: &RunConfig,
) -> Result<(crate::canonical::CanonicalReduction, ExtremalSequence)> {
    let red = reduce_canonical(q)?;
    let seed = extremal::initial_points(&red, param, config.c0)?;
    let mut seq = extremal::from_seed(&red, seed)?;
    seq.set_digit_budget(config.digit_budget);
    extremal::extend(&mut seq, steps)?;
    Ok((red, seq))
}

#[derive(Serialize)]
struct SequenceLine {
    i: usize,
    point: Vec<String>,
    q: String,
    det: Option<String>,
    growth_ratio: Option<f64>,
    wedge_ratio: Option<f64>,
    b_traces: Vec<String>,
    wedge_norm_sqs: Vec<String>,
}

fn sequence_jsonl(seq: &ExtremalSequence) -> Result<String> {
    let mut out = String::new();
    let header = serde_json::json!({ "form": seq.form(), "n": seq.n() });
    out.push_str(&serde_json::to_string(&header)?);
    out.push('\n');
    let logs: Vec<f64> = seq.points().iter().map(|p| 0.5 * ln_bigint(&p.norm_sq())).collect();
    for (i, p) in seq.points().iter().enumerate() {
        let jmax = seq.n().min(i);
        let line = SequenceLine {
            i,
            point: p.to_decimal_strings(),
            q: seq.form().eval_q(p)?.to_string(),
            det: if i >= seq.n() { Some(seq.window_det(i).to_string()) } else { None },
            growth_ratio: if i > 0 { Some(logs[i] / logs[i - 1]) } else { None },
            wedge_ratio: if i > 0 {
                let wsq = crate::exact::wedge_norm_sq(&seq.points()[i - 1], p)?;
                Some((0.5 * (ln_bigint(&wsq) + ln_bigint(&seq.points()[i - 1].norm_sq()) - ln_bigint(&p.norm_sq()))).exp())
            } else {
                None
            },
            b_traces: (1..=jmax).map(|j| seq.b_trace(i, j).to_string()).collect(),
            wedge_norm_sqs: (1..=jmax).map(|j| seq.wedge_trace_sq(i, j).to_string()).collect(),
        };
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    Ok(out)
}

fn sequence_from_jsonl(content: &str) -> Result<ExtremalSequence> {
    let mut lines = content.lines().filter(|l| !l.trim().is_empty());
    let header: serde_json::Value =
        serde_json::from_str(lines.next().ok_or_else(|| QdError::BadInput("empty sequence file".into()))?)?;
    let form: QuadraticForm = serde_json::from_value(
        header.get("form").cloned().ok_or_else(|| QdError::BadInput("sequence header lacks a form".into()))?,
    )?;
    let mut points = Vec::new();
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line)?;
        let coords: Vec<String> = serde_json::from_value(
            v.get("point").cloned().ok_or_else(|| QdError::BadInput("sequence line lacks a point".into()))?,
        )?;
        points.push(IntVector::from_decimal_strings(&coords)?);
    }
    extremal::sequence_from_points(form, points)
}

#[derive(Serialize)]
struct PipelineReport {
    form: QuadraticForm,
    canonical_kind: CanonicalKind,
    n: usize,
    rho: (String, String),
    steps: usize,
    det_abs: String,
    growth_ratio_last: f64,
    growth_ratio_window: (f64, f64),
    wedge_ratio_window: (f64, f64),
    limit_error_radius: (String, String),
    lambda_hat: f64,
    lambda: f64,
    mm_value: f64,
    fit_alpha: f64,
    fit_max_deviation: f64,
    lower_bound_min_value_times_x: f64,
    scan_records: usize,
    scan_sequence_minimizers_seen: usize,
}

fn dispatch(cmd: Command, config: &RunConfig, output: Option<&std::path::Path>) -> Result<()> {
    match cmd {
        Command::Form(f) => {
            let q = read_form(&f.form)?;
            let sig = q.signature();
            let report = serde_json::json!({
                "form": q,
                "dim": q.dim(),
                "rank": q.rank(),
                "signature": sig,
            });
            emit(output, &serde_json::to_string_pretty(&report)?)
        }
        Command::Witt { form, cap } => {
            let q = read_form(&form.form)?;
            let d = witt::witt_decompose(&q, cap)?;
            emit(output, &serde_json::to_string_pretty(&d)?)
        }
        Command::Canonical(f) => {
            let q = read_form(&f.form)?;
            let red = reduce_canonical(&q)?;
            emit(output, &serde_json::to_string_pretty(&red)?)
        }
        Command::Pell { a, count } => {
            let a = parse_bigint(&a)?;
            let sols = pell::pell_solutions(&a, count.max(1))?;
            emit(output, &serde_json::to_string_pretty(&sols)?)
        }
        Command::Trinomial { a, b } => {
            let (x, y, z) = pell::trinomial_solve(&parse_bigint(&a)?, &parse_bigint(&b)?)?;
            let report = serde_json::json!({ "x": x.to_string(), "y": y.to_string(), "z": z.to_string() });
            emit(output, &serde_json::to_string_pretty(&report)?)
        }
        Command::Extremal { form, steps, big_b, l, orbit, xi_out } => {
            let q = read_form(&form.form)?;
            let param = seed_param(&big_b, &l)?;
            let (red, seq) = build_sequence(&q, steps, &param, config)?;
            let mut out = sequence_jsonl(&seq)?;
            if let Some(path) = xi_out {
                let lp = extremal::limit_point(&seq, config.precision)?;
                std::fs::write(path, serde_json::to_string(&lp)?)?;
            }
            if orbit > 0 {
                let lp = extremal::limit_point(&seq, config.precision)?;
                for (k, im) in extremal::orbit(&red, &lp, orbit)?.iter().enumerate() {
                    let (rlo, rhi) = im.error_radius.display_pair(12);
                    let line = serde_json::json!({
                        "orbit_index": k,
                        "direction": im.direction.to_decimal_strings(),
                        "error_radius": [rlo, rhi],
                    });
                    out.push_str(&serde_json::to_string(&line)?);
                    out.push('\n');
                }
            }
            emit(output, &out)
        }
        Command::Chain { form, steps, phi } => {
            let q = read_form(&form.form)?;
            let schedule = PhiSchedule::parse(&phi)?;
            let report = extremal::isotropic_chain(&q, steps, schedule, config.witness_cap, config.digit_budget, config.precision)?;
            let mut out = String::new();
            for (i, p) in report.points.iter().enumerate() {
                let line = serde_json::json!({ "i": i + 1, "point": p.to_decimal_strings() });
                out.push_str(&serde_json::to_string(&line)?);
                out.push('\n');
            }
            for (i, lhs, rhs, ok) in extremal::chain::phi_checkpoints(&report, config.precision.max(192))? {
                let (llo, lhi) = lhs.display_pair(12);
                let (rlo, rhi) = rhs.display_pair(12);
                let line = serde_json::json!({
                    "checkpoint": i,
                    "lhs": [llo, lhi],
                    "phi": [rlo, rhi],
                    "certified": ok,
                });
                out.push_str(&serde_json::to_string(&line)?);
                out.push('\n');
            }
            emit(output, &out)
        }
        Command::Scan { xi, form, xmax, filter, exact } => {
            let q = read_form(&form.form)?;
            let lp: LimitPoint = serde_json::from_str(&std::fs::read_to_string(xi)?)?;
            let filter = ScanFilter::parse(&filter)?;
            let engine = if exact { ScanEngine::Exact } else { ScanEngine::Fast };
            let recs = approx::scan(&lp, xmax, filter, &q, engine, config.threads, config.precision)?;
            emit(output, &approx::records_to_csv(&recs))
        }
        Command::Exponents { records } => {
            let recs = approx::records_from_csv(&std::fs::read_to_string(records)?)?;
            let est = approx::estimate_exponents(&recs)?;
            let n = recs.first().map(|r| r.minimizer.len() - 1).unwrap_or(2);
            let report = serde_json::json!({
                "estimate": est,
                "mm_value": approx::mm_value(est.lambda_hat, est.lambda, n),
            });
            emit(output, &serde_json::to_string_pretty(&report)?)
        }
        Command::Rho { n, tol } => {
            let bits = (-tol.log2()).ceil().max(8.0) as u32;
            let r = spectral::rho(n, bits)?;
            let (lo, hi) = r.display_pair(((bits as f64) * 0.302) as u32 + 4);
            emit(output, &serde_json::to_string_pretty(&serde_json::json!({ "n": n, "rho": [lo, hi] }))?)
        }
        Command::Fit { seq } => {
            let sequence = sequence_from_jsonl(&std::fs::read_to_string(seq)?)?;
            let fit = spectral::appendix_fit(&sequence)?;
            emit(output, &serde_json::to_string_pretty(&fit)?)
        }
        Command::Pipeline { form, steps, big_b, l, xmax } => {
            let q = read_form(&form.form)?;
            let param = seed_param(&big_b, &l)?;
            let (red, seq) = build_sequence(&q, steps, &param, config)?;
            let n = seq.n();
            let rho_iv = spectral::rho(n as u32, 96)?;
            let lp = extremal::limit_point(&seq, config.precision)?;
            let diag = extremal::diagnostics(&seq, 64);
            let seq_records = approx::records_from_sequence(&seq, &lp, ScanFilter::All, config.precision)?;
            let est = approx::estimate_exponents(&seq_records)?;
            let nonzero_records = approx::records_from_sequence(&seq, &lp, ScanFilter::NonZerosOfQ, config.precision)?;
            let lower = approx::lower_bound_monitor(&nonzero_records, n)?;
            let fit = spectral::appendix_fit(&seq)?;
            let scan_recs =
                approx::scan(&lp, xmax, ScanFilter::All, seq.form(), ScanEngine::Fast, config.threads, config.precision)?;
            let seen = scan_recs.iter().filter(|r| seq.points().contains(&r.minimizer)).count();

            let growth_window = {
                let tail: Vec<f64> = diag.growth_ratios.iter().skip(diag.growth_ratios.len().saturating_sub(4)).cloned().collect();
                (tail.iter().cloned().fold(f64::MAX, f64::min), tail.iter().cloned().fold(f64::MIN, f64::max))
            };
            let wedge_window = {
                let tail = &diag.wedge_ratios[n.min(diag.wedge_ratios.len())..];
                (tail.iter().cloned().fold(f64::MAX, f64::min), tail.iter().cloned().fold(f64::MIN, f64::max))
            };
            let (rlo, rhi) = rho_iv.display_pair(16);
            let (elo, ehi) = lp.error_radius.display_pair(8);
            let report = PipelineReport {
                form: q,
                canonical_kind: red.kind,
                n,
                rho: (rlo, rhi),
                steps,
                det_abs: seq.window_det(n).abs().to_string(),
                growth_ratio_last: *diag.growth_ratios.last().unwrap(),
                growth_ratio_window: growth_window,
                wedge_ratio_window: wedge_window,
                limit_error_radius: (elo, ehi),
                lambda_hat: est.lambda_hat,
                lambda: est.lambda,
                mm_value: approx::mm_value(est.lambda_hat, est.lambda, n),
                fit_alpha: fit.alpha,
                fit_max_deviation: fit.deviations.iter().cloned().fold(0.0, f64::max),
                lower_bound_min_value_times_x: lower.min_value_times_x,
                scan_records: scan_recs.len(),
                scan_sequence_minimizers_seen: seen,
            };
            emit(output, &serde_json::to_string_pretty(&report)?)
        }
    }
}
