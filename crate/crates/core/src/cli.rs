//! `qtrain` command line.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 numeric-domain error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classical::{generate_marks, ripple_count_marks, MarkTape};
use crate::distribution::ErrorDistribution;
use crate::error::{Error, Result};
use crate::field::{integrate_field, parse_field_spec, FieldProfile};
use crate::json::to_canonical_string;
use crate::params::{make_params, ProtocolParams};
use crate::seeded_rng;
use crate::stats::{compare_integral, exact_moments, wrap_error, EmpiricalMoments, MomentReport};
use crate::strings::{
    decode_string, gram_identity_error, imprint_string, special_strings,
    string_gram_matrix, BitString, Decoded,
};
use crate::train::{
    closed_form_error_prob, outcome_distribution, prepare_uniform_state, OutcomeSample,
    OutcomeSampler,
};
use crate::vm::vm_outcome_distribution;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;

/// Smallest trial count `compare` accepts.
pub const MIN_COMPARE_TRIALS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "qtrain", version, about = "Field-integral measurement with a single particle, and its baselines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outcome distribution, exact moments and optional samples for one integral.
    Measure(MeasureArgs),
    /// Error-probability curve p(δI) with δI in units of α.
    Figure2(Figure2Args),
    /// Quantum protocol vs classical counter, Monte Carlo plus analytic references.
    Compare(CompareArgs),
    /// Marker tape counted by sequential ripple-counting bits.
    Marks(MarksArgs),
    /// Special string set, its Gram matrix, and single-shot decoding.
    Strings(StringsArgs),
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    /// Number of qubits N (K = 2^N sites).
    #[arg(long = "n")]
    pub n_qubits: u32,
    /// Resolution α.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

impl ProtocolArgs {
    fn params(&self) -> Result<ProtocolParams> {
        make_params(self.n_qubits, self.alpha)
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct IntegralSource {
    /// Integral I given directly.
    #[arg(long)]
    pub integral: Option<f64>,
    /// Field spec: constant:<v>:<A>:<B>, gaussian:<amp>:<mu>:<sigma>:<A>:<B>, or table:<csv path>.
    #[arg(long)]
    pub field: Option<String>,
}

impl IntegralSource {
    fn resolve(&self) -> Result<(f64, Option<FieldProfile>)> {
        match (&self.integral, &self.field) {
            (Some(i), None) if i.is_finite() => Ok((*i, None)),
            (Some(i), None) => Err(Error::InvalidParams(format!("integral must be finite, got {i}"))),
            (None, Some(spec)) => {
                let field = parse_field_spec(spec)?;
                Ok((integrate_field(&field), Some(field)))
            }
            _ => Err(Error::InvalidParams("give exactly one of --integral or --field".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Single particle, inner products with the outcome basis.
    Train,
    /// N qubits, product-form outcome law.
    Vm,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub protocol_args: ProtocolArgs,
    #[command(flatten)]
    pub source: IntegralSource,
    #[arg(long, value_enum, default_value_t = Protocol::Train)]
    pub protocol: Protocol,
    /// Number of simulated measurements (0 = distribution only).
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Figure2Args {
    #[arg(long = "n", default_value_t = 7)]
    pub n_qubits: u32,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Lower end of δI/α (default −K/2).
    #[arg(long, allow_hyphen_values = true)]
    pub min: Option<f64>,
    /// Upper end of δI/α (default K/2).
    #[arg(long, allow_hyphen_values = true)]
    pub max: Option<f64>,
    /// Curve points per unit of α; integer δI/α always fall on the grid.
    #[arg(long, default_value_t = 16)]
    pub per_alpha: u32,
    /// True integral; enables the discrete outcome markers.
    #[arg(long, requires = "markers_output")]
    pub integral: Option<f64>,
    /// Where to write the outcome-marker CSV.
    #[arg(long, requires = "integral")]
    pub markers_output: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub protocol_args: ProtocolArgs,
    #[command(flatten)]
    pub source: IntegralSource,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MarksArgs {
    /// Number of counting bits N.
    #[arg(long = "n")]
    pub n_bits: u32,
    /// Deterministic tape with this many marks.
    #[arg(long, conflicts_with = "field", required_unless_present = "field")]
    pub count: Option<usize>,
    /// Field the marker crosses (needs --seed).
    #[arg(long, requires = "seed")]
    pub field: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct StringsArgs {
    #[arg(long = "n")]
    pub n: u32,
    /// Imprint string n (1-based) on the particle and decode it.
    #[arg(long, conflicts_with = "bits")]
    pub imprint: Option<usize>,
    /// Imprint an arbitrary 0/1 string of length 2^N and try to decode it.
    #[arg(long)]
    pub bits: Option<String>,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    pub format: TextFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { &mut *stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(artifact) => match artifact.deliver(stdout) {
            Ok(()) => EXIT_OK,
            Err(e) => report(stderr, &e),
        },
        Err(e) => report(stderr, &e),
    }
}

fn report(stderr: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    e.exit_code()
}

/// Output of one command: a primary artifact plus optional side files.
pub struct Artifact {
    pub body: String,
    pub output: Option<PathBuf>,
    pub extra_files: Vec<(PathBuf, String)>,
}

impl Artifact {
    fn new(body: String, output: Option<PathBuf>) -> Self {
        Self {
            body,
            output,
            extra_files: Vec::new(),
        }
    }

    fn deliver(self, stdout: &mut dyn Write) -> Result<()> {
        for (path, text) in &self.extra_files {
            std::fs::write(path, text)?;
        }
        match &self.output {
            Some(path) => std::fs::write(path, &self.body)?,
            None => stdout.write_all(self.body.as_bytes())?,
        }
        Ok(())
    }
}

pub fn execute(command: &Command) -> Result<Artifact> {
    match command {
        Command::Measure(a) => cmd_measure(a),
        Command::Figure2(a) => cmd_figure2(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Marks(a) => cmd_marks(a),
        Command::Strings(a) => cmd_strings(a),
    }
}

#[derive(Serialize)]
struct SampleSummary {
    trials: usize,
    seed: u64,
    first: OutcomeSample,
    empirical: EmpiricalMoments,
}

#[derive(Serialize)]
struct MeasureReport<'a> {
    command: &'static str,
    protocol: Protocol,
    params: ProtocolParams,
    integral: f64,
    field: Option<&'a FieldProfile>,
    distribution: &'a ErrorDistribution,
    moments: MomentReport,
    sample: Option<SampleSummary>,
}

pub fn cmd_measure(args: &MeasureArgs) -> Result<Artifact> {
    let params = args.protocol_args.params()?;
    let (integral, field) = args.source.resolve()?;
    let dist = match args.protocol {
        Protocol::Train => outcome_distribution(integral, &params),
        Protocol::Vm => vm_outcome_distribution(integral, &params),
    };
    let sample = if args.trials > 0 {
        let seed = args
            .seed
            .ok_or_else(|| Error::InvalidParams("--seed is required when --trials > 0".into()))?;
        let sampler = OutcomeSampler::new(&dist);
        let mut rng = seeded_rng(seed, 1);
        let draws: Vec<OutcomeSample> = (0..args.trials).map(|_| sampler.sample(&mut rng)).collect();
        let errors: Vec<f64> = draws.iter().map(|d| d.delta_i).collect();
        Some(SampleSummary {
            trials: args.trials,
            seed,
            first: draws[0],
            empirical: EmpiricalMoments::from_errors(&errors),
        })
    } else {
        None
    };
    let report = MeasureReport {
        command: "measure",
        protocol: args.protocol,
        params,
        integral,
        field: field.as_ref(),
        distribution: &dist,
        moments: exact_moments(&dist),
        sample,
    };
    Ok(Artifact::new(to_canonical_string(&report)?, args.output.clone()))
}

pub fn cmd_figure2(args: &Figure2Args) -> Result<Artifact> {
    let params = make_params(args.n_qubits, args.alpha)?;
    if args.per_alpha == 0 {
        return Err(Error::InvalidParams("--per-alpha must be positive".into()));
    }
    let half = params.k_sites() as f64 / 2.0;
    let lo = args.min.unwrap_or(-half);
    let hi = args.max.unwrap_or(half);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParams(format!("need min < max, got [{lo}, {hi}]")));
    }
    let pa = args.per_alpha as f64;
    let (j0, j1) = ((lo * pa).ceil() as i64, (hi * pa).floor() as i64);
    let mut body = String::from("delta_i,p\n");
    for j in j0..=j1 {
        let u = j as f64 / pa;
        let p = closed_form_error_prob(u * params.alpha(), &params);
        writeln!(body, "{u},{p:.17e}").unwrap();
    }
    let mut artifact = Artifact::new(body, args.output.clone());

    if let (Some(integral), Some(path)) = (args.integral, &args.markers_output) {
        // Reachable errors αm − I, i.e. αn − (I mod α), folded into the plotted window.
        let mut markers: Vec<(f64, f64)> = (0..params.k_sites())
            .map(|m| {
                let d = wrap_error(params.alpha() * m as f64, integral, &params);
                (d / params.alpha(), closed_form_error_prob(d, &params))
            })
            .filter(|(u, _)| (lo..=hi).contains(u))
            .collect();
        markers.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut text = String::from("delta_i,p\n");
        for (u, p) in markers {
            writeln!(text, "{u},{p:.17e}").unwrap();
        }
        artifact.extra_files.push((path.clone(), text));
    }
    Ok(artifact)
}

pub fn cmd_compare(args: &CompareArgs) -> Result<Artifact> {
    let params = args.protocol_args.params()?;
    if args.trials < MIN_COMPARE_TRIALS {
        return Err(Error::InvalidParams(format!(
            "--trials {} is too small for stable moments; use at least {MIN_COMPARE_TRIALS} (10^5 recommended)",
            args.trials
        )));
    }
    let (integral, _) = args.source.resolve()?;
    let report = compare_integral(integral, &params, args.trials, args.seed)?;
    let body = match args.format {
        ReportFormat::Json => to_canonical_string(&report)?,
        ReportFormat::Csv => report.to_csv(),
    };
    Ok(Artifact::new(body, args.output.clone()))
}

pub fn cmd_marks(args: &MarksArgs) -> Result<Artifact> {
    if !(1..=63).contains(&args.n_bits) {
        return Err(Error::InvalidParams(format!(
            "number of bits must be in 1..=63, got {}",
            args.n_bits
        )));
    }
    let tape = match (args.count, &args.field, args.seed) {
        (Some(c), None, _) => MarkTape::with_count(c),
        (None, Some(spec), Some(seed)) => generate_marks(&parse_field_spec(spec)?, args.alpha, seed)?,
        _ => {
            return Err(Error::InvalidParams(
                "give --count, or --field together with --seed".into(),
            ))
        }
    };
    let trace = ripple_count_marks(&tape, args.n_bits);
    let mut out = String::new();
    writeln!(out, "marks: {}", trace.initial_marks).unwrap();
    for (j, (bit, left)) in trace.bits.iter().zip(&trace.surviving).enumerate() {
        writeln!(out, "pass {}: bit {} surviving {}", j + 1, *bit as u8, left).unwrap();
    }
    writeln!(out, "bits (LSB first): {}", trace.lsb_first()).unwrap();
    writeln!(out, "bits (MSB first): {}", trace.msb_first()).unwrap();
    writeln!(out, "value: {}", trace.value()).unwrap();
    if trace.wrapped() {
        writeln!(
            out,
            "note: {} marks exceed {} bits; the value is the count mod {}",
            trace.initial_marks,
            args.n_bits,
            1u64 << args.n_bits
        )
        .unwrap();
    }
    Ok(Artifact::new(out, args.output.clone()))
}

#[derive(Serialize)]
struct StringsReport {
    n: u32,
    strings: Vec<String>,
    gram: Vec<Vec<f64>>,
    gram_max_deviation: f64,
    decoded: Option<Decoded>,
}

pub fn cmd_strings(args: &StringsArgs) -> Result<Artifact> {
    let set = special_strings(args.n)?;
    let gram = string_gram_matrix(&set);
    let deviation = gram_identity_error(&gram);
    let uniform = prepare_uniform_state(&make_params(args.n, 1.0)?);
    let decoded = match (args.imprint, &args.bits) {
        (Some(idx), None) => Some(decode_string(&imprint_string(&uniform, set.get(idx)?)?, &set)?),
        (None, Some(bits)) => {
            let bits = BitString::parse(bits)?;
            Some(decode_string(&imprint_string(&uniform, &bits)?, &set)?)
        }
        _ => None,
    };

    let body = match args.format {
        TextFormat::Text => {
            let mut out = set.to_lines();
            out.push_str("gram:\n");
            for row in &gram {
                let cells: Vec<String> = row.iter().map(|z| format!("{:.3}", z.re + 0.0)).collect();
                writeln!(out, "{}", cells.join(" ")).unwrap();
            }
            writeln!(out, "gram max deviation from identity: {deviation:e}").unwrap();
            if let Some(d) = &decoded {
                writeln!(out, "decoded: {}", d.index).unwrap();
            }
            out
        }
        TextFormat::Json => to_canonical_string(&StringsReport {
            n: set.n(),
            strings: set.strings().iter().map(|s| s.to_string()).collect(),
            gram: gram.iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            gram_max_deviation: deviation,
            decoded,
        })?,
    };
    Ok(Artifact::new(body, args.output.clone()))
}
