//! Command-line surface.
//!
//! Exit status: 0 when every computed route agrees, 2 on parse/validation
//! failures, 3 when independent routes disagree (which indicates a bug,
//! not bad input).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use valbar::{
    analyze_sheaf, anisotropy_report, barcode_from_digits, barcode_from_snf,
    bockstein_rank, detection_report, digit_profile, parse_matrix_document,
    parse_sheaf_document, render_text, serialize_document, smith_normal_form,
    stability_check, AnalyzeOptions, Barcode, BarcodeSummary, ClockNetwork,
    DvrMatrix, NetworkSheaf, Result, SheafDocument, Valuation,
};

#[derive(Parser)]
#[command(
    name = "valbar",
    version,
    about = "Arithmetic barcodes for network sheaves over truncated valuation rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run all applicable barcode routes on a sheaf file and compare them
    Analyze(AnalyzeArgs),
    /// Smith normal form of a matrix file
    Snf(MatrixArgs),
    /// Digit profile and digit-route barcode of a matrix file
    Digits(MatrixArgs),
    /// Per-cycle holonomy table of a sheaf file
    Holonomy(SheafArgs),
    /// Compare the truncated barcodes of two coboundary files
    Stability(StabilityArgs),
    /// Clock-network detection report across register widths
    Consensus(ConsensusArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable table
    Text,
    /// Stable JSON
    Structured,
}

#[derive(Args)]
struct OutputArgs {
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RingOverrides {
    /// Override the document's prime
    #[arg(long)]
    p: Option<u64>,
    /// Override the document's working precision
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Sheaf description file
    file: PathBuf,
    #[command(flatten)]
    ring: RingOverrides,
    /// Also run a seeded random gauge-invariance self-check
    #[arg(long)]
    seed: Option<u64>,
    /// Tamper with the digit route to exercise the disagreement path
    #[arg(long, hide = true)]
    corrupt_route: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct MatrixArgs {
    /// Matrix description file
    file: PathBuf,
    #[command(flatten)]
    ring: RingOverrides,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SheafArgs {
    /// Sheaf description file
    file: PathBuf,
    #[command(flatten)]
    ring: RingOverrides,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct StabilityArgs {
    /// First matrix file
    file_a: PathBuf,
    /// Second matrix file
    file_b: PathBuf,
    #[command(flatten)]
    ring: RingOverrides,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ConsensusArgs {
    /// Sheaf description file with a clock_ratios block
    file: PathBuf,
    #[command(flatten)]
    ring: RingOverrides,
    /// Analyze a single register width instead of 1..=precision
    #[arg(long)]
    bits: Option<u32>,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Analyze(args) => {
            let doc = load_sheaf_document(&args.file, &args.ring)?;
            let sheaf = doc.to_sheaf()?;
            let options = AnalyzeOptions {
                seed: args.seed,
                corrupt_digit_route: args.corrupt_route,
            };
            let report = analyze_sheaf(&sheaf, &options)?;
            let agreement = report.agreement;
            emit(&args.output, render_text(&report), &report)?;
            Ok(exit_for(agreement))
        }
        Command::Snf(args) => {
            let delta = load_matrix(&args.file, &args.ring)?;
            let report = SnfOutput::compute(&delta);
            emit(&args.output, report.render(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Digits(args) => {
            let delta = load_matrix(&args.file, &args.ring)?;
            let report = DigitsOutput::compute(&delta)?;
            emit(&args.output, report.render(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Holonomy(args) => {
            let doc = load_sheaf_document(&args.file, &args.ring)?;
            let sheaf = doc.to_sheaf()?;
            let report = HolonomyOutput::compute(&sheaf)?;
            emit(&args.output, report.render(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Stability(args) => {
            let a = load_matrix(&args.file_a, &args.ring)?;
            let b = load_matrix(&args.file_b, &args.ring)?;
            let report = StabilityOutput::compute(&a, &b)?;
            let stable = report.truncated_equal;
            emit(&args.output, report.render(), &report)?;
            Ok(exit_for(stable))
        }
        Command::Consensus(args) => {
            let doc = load_sheaf_document(&args.file, &args.ring)?;
            let network = doc.to_clock_network()?;
            let precision = doc.ring.m;
            let report = ConsensusOutput::compute(&network, precision, args.bits)?;
            emit(&args.output, report.render(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_for(agreement: bool) -> ExitCode {
    if agreement {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn load_sheaf_document(path: &PathBuf, overrides: &RingOverrides) -> Result<SheafDocument> {
    let text = std::fs::read_to_string(path)?;
    let mut doc = parse_sheaf_document(&text)?;
    if let Some(p) = overrides.p {
        doc.ring.p = p;
    }
    if let Some(m) = overrides.precision {
        doc.ring.m = m;
    }
    Ok(doc)
}

fn load_matrix(path: &PathBuf, overrides: &RingOverrides) -> Result<DvrMatrix> {
    let text = std::fs::read_to_string(path)?;
    let mut doc = parse_matrix_document(&text)?;
    if let Some(p) = overrides.p {
        doc.ring.p = p;
    }
    if let Some(m) = overrides.precision {
        doc.ring.m = m;
    }
    doc.to_matrix()
}

fn emit<T: Serialize>(output: &OutputArgs, text: String, structured: &T) -> Result<()> {
    let rendered = match output.format {
        Format::Text => text,
        Format::Structured => serialize_document(structured)?,
    };
    match &output.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn barcode_summary(b: &Barcode) -> BarcodeSummary {
    BarcodeSummary {
        finite: b.finite_bars.clone(),
        infinite: b.infinite_bars,
        censored: b.censored_bars,
    }
}

#[derive(Serialize)]
struct SnfOutput {
    ring: String,
    exponents: Vec<String>,
    rank: usize,
    barcode: BarcodeSummary,
}

impl SnfOutput {
    fn compute(delta: &DvrMatrix) -> SnfOutput {
        let snf = smith_normal_form(delta);
        let barcode = barcode_from_snf(&snf, delta.rows());
        SnfOutput {
            ring: delta.ring().to_string(),
            exponents: snf.exponents.iter().map(Valuation::to_string).collect(),
            rank: snf.rank,
            barcode: barcode_summary(&barcode),
        }
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ring       {}", self.ring);
        let _ = writeln!(out, "exponents  {}", self.exponents.join(" "));
        let _ = writeln!(out, "rank       {}", self.rank);
        let _ = writeln!(out, "barcode    {}", barcode_line(&self.barcode));
        out
    }
}

#[derive(Serialize)]
struct DigitsOutput {
    ring: String,
    d: Vec<usize>,
    stabilized: bool,
    censored: usize,
    bockstein_rank: usize,
    barcode: BarcodeSummary,
}

impl DigitsOutput {
    fn compute(delta: &DvrMatrix) -> Result<DigitsOutput> {
        let profile = digit_profile(delta)?;
        let barcode = barcode_from_digits(delta, &profile);
        Ok(DigitsOutput {
            ring: delta.ring().to_string(),
            d: profile.d.clone(),
            stabilized: profile.stabilized,
            censored: profile.censored,
            bockstein_rank: bockstein_rank(delta),
            barcode: barcode_summary(&barcode),
        })
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ring            {}", self.ring);
        let d = self.d.iter().map(usize::to_string).collect::<Vec<_>>();
        let status = if self.stabilized {
            "stabilized"
        } else {
            "not stabilized"
        };
        let _ = writeln!(out, "digit profile   {}  ({status})", d.join(" "));
        let _ = writeln!(out, "censored        {}", self.censored);
        let _ = writeln!(out, "bockstein rank  {}", self.bockstein_rank);
        let _ = writeln!(out, "barcode         {}", barcode_line(&self.barcode));
        out
    }
}

#[derive(Serialize)]
struct HolonomyRow {
    cycle: usize,
    edge: String,
    /// Rank-1 sheaves report a single bar; higher rank lists the
    /// elementary divisor exponents of the holonomy defect.
    exponents: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spread: Option<u32>,
}

#[derive(Serialize)]
struct HolonomyOutput {
    ring: String,
    cycles: Vec<HolonomyRow>,
}

impl HolonomyOutput {
    fn compute(sheaf: &NetworkSheaf) -> Result<HolonomyOutput> {
        let rows = anisotropy_report(sheaf)?
            .into_iter()
            .map(|c| HolonomyRow {
                cycle: c.cycle,
                edge: c.edge_id,
                exponents: c.exponents.iter().map(Valuation::to_string).collect(),
                spread: c.spread,
            })
            .collect();
        Ok(HolonomyOutput {
            ring: sheaf.ring().to_string(),
            cycles: rows,
        })
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ring   {}", self.ring);
        if self.cycles.is_empty() {
            let _ = writeln!(out, "no fundamental cycles");
            return out;
        }
        for row in &self.cycles {
            let spread = match row.spread {
                Some(s) => format!("  spread {s}"),
                None => String::new(),
            };
            let _ = writeln!(
                out,
                "cycle {} (edge {}): {}{spread}",
                row.cycle,
                row.edge,
                row.exponents.join(" ")
            );
        }
        out
    }
}

#[derive(Serialize)]
struct StabilityOutput {
    ring: String,
    congruence_level: String,
    truncated_equal: bool,
    barcode_a: BarcodeSummary,
    barcode_b: BarcodeSummary,
}

impl StabilityOutput {
    fn compute(a: &DvrMatrix, b: &DvrMatrix) -> Result<StabilityOutput> {
        let report = stability_check(a, b)?;
        Ok(StabilityOutput {
            ring: a.ring().to_string(),
            congruence_level: report.congruence_level.to_string(),
            truncated_equal: report.truncated_equal,
            barcode_a: barcode_summary(&report.barcode_a),
            barcode_b: barcode_summary(&report.barcode_b),
        })
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ring              {}", self.ring);
        let _ = writeln!(out, "congruence level  {}", self.congruence_level);
        let _ = writeln!(out, "barcode a         {}", barcode_line(&self.barcode_a));
        let _ = writeln!(out, "barcode b         {}", barcode_line(&self.barcode_b));
        let verdict = if self.truncated_equal {
            "bars below the congruence level agree"
        } else {
            "bars below the congruence level DIFFER (arithmetic bug)"
        };
        let _ = writeln!(out, "verdict           {verdict}");
        out
    }
}

#[derive(Serialize)]
struct ConsensusCycleRow {
    cycle: usize,
    edge: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    bar: Option<String>,
    residual_exponent: i64,
    /// Detectability per analyzed register width, in `widths` order.
    detectable: Vec<bool>,
}

#[derive(Serialize)]
struct ConsensusOutput {
    ring: String,
    widths: Vec<u32>,
    cycles: Vec<ConsensusCycleRow>,
    recommended_bits: u32,
}

impl ConsensusOutput {
    fn compute(
        network: &ClockNetwork,
        precision: u32,
        bits: Option<u32>,
    ) -> Result<ConsensusOutput> {
        let widths: Vec<u32> = match bits {
            Some(b) => vec![b],
            None => (1..=precision).collect(),
        };
        let mut cycles: Vec<ConsensusCycleRow> = Vec::new();
        let mut recommended = 1;
        for (i, &b) in widths.iter().enumerate() {
            let report = detection_report(network, b, precision)?;
            recommended = report.recommended_bits;
            if i == 0 {
                cycles = report
                    .cycles
                    .iter()
                    .map(|c| ConsensusCycleRow {
                        cycle: c.cycle,
                        edge: c.edge_id.clone(),
                        bar: c.bar.map(|v| v.to_string()),
                        residual_exponent: c.residual_exponent,
                        detectable: Vec::with_capacity(widths.len()),
                    })
                    .collect();
            }
            for (row, c) in cycles.iter_mut().zip(report.cycles.iter()) {
                row.detectable.push(c.detectable);
            }
        }
        let ring = format!("Z/2^{precision}");
        Ok(ConsensusOutput {
            ring,
            widths,
            cycles,
            recommended_bits: recommended,
        })
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ring              {}", self.ring);
        if self.cycles.is_empty() {
            let _ = writeln!(out, "no fundamental cycles (tree network)");
        }
        for row in &self.cycles {
            let label = match (&row.bar, row.residual_exponent) {
                (Some(bar), _) => format!("bar {bar}"),
                (None, r) => format!("rate-scale inconsistent (net 2^{r})"),
            };
            let _ = writeln!(out, "cycle {} (edge {}): {label}", row.cycle, row.edge);
        }
        let _ = writeln!(out, "recommended bits  {}", self.recommended_bits);
        if !self.cycles.is_empty() {
            let _ = writeln!(out, "detection");
            for (i, &b) in self.widths.iter().enumerate() {
                let marks = self
                    .cycles
                    .iter()
                    .map(|c| if c.detectable[i] { "X" } else { "-" })
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(out, "  bits {b:>2}: {marks}");
            }
        }
        out
    }
}

fn barcode_line(b: &BarcodeSummary) -> String {
    let finite = b
        .finite
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    format!(
        "finite [{finite}]  infinite {}  censored {}",
        b.infinite, b.censored
    )
}
