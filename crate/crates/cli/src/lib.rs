//! `qqfdr` command-line tool: `analyze`, `plot` and `simulate`.
//!
//! Exit codes: 0 on success, 1 on I/O failure, 2 on invalid input or
//! arguments. Diagnostics go to standard error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qqfdr::{
    build_plot_model, min_attainable_fdr_with, order_tests, parse_pvalues, q_values, q_values_with,
    render_svg, simulate_pvalues, stepup, write_pvalues_csv, write_report, Column, Format,
    IngestError, Method, OrderedTests, PValueSet, ParseOptions, Readouts, RenderOptions, SimSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qqfdr",
    version,
    about = "False discovery rates read off a Q-Q plot of p-values"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Step-up analysis: JSON summary plus a per-test CSV table.
    Analyze(AnalyzeArgs),
    /// Render the FDR-annotated Q-Q plot as SVG.
    Plot(PlotArgs),
    /// Write a seeded synthetic p-value set as CSV (id,p).
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Plain,
    Csv,
    Tsv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Bh,
    By,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PatternArg {
    Independent,
    Equicorrelated,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// p-value file (plain, CSV or TSV)
    #[arg(long)]
    pub input: PathBuf,
    /// Input layout; inferred from the extension when omitted (.csv, .tsv, otherwise plain)
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Column holding p-values: a header name or a 1-based index
    #[arg(long, default_value = "p")]
    pub p_column: String,
    /// Column holding test ids: a header name or a 1-based index [default: "id" when present]
    #[arg(long)]
    pub id_column: Option<String>,
    /// Replace p-values equal to 0 with this positive value instead of rejecting them
    #[arg(long)]
    pub clamp_zero: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// FDR level
    #[arg(long, default_value_t = 0.05)]
    pub q: f64,
    /// Step-up procedure
    #[arg(long, value_enum, default_value = "bh")]
    pub method: MethodArg,
    /// JSON summary output
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    /// Per-test CSV output
    #[arg(long, default_value = "table.csv")]
    pub table: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Reference FDR level; sets significance and the read-off callouts
    #[arg(long, default_value_t = 0.05)]
    pub q: f64,
    /// Extra FDR lines, comma separated (e.g. 0.05,0.1,0.3)
    #[arg(long, value_delimiter = ',')]
    pub q_lines: Vec<f64>,
    /// SVG output
    #[arg(long, default_value = "plot.svg")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 720)]
    pub width: u32,
    #[arg(long, default_value_t = 720)]
    pub height: u32,
    #[arg(long, default_value_t = 60)]
    pub margin: u32,
    /// Point radius in pixels
    #[arg(long, default_value_t = 3.0)]
    pub radius: f64,
    /// Decimal places for coordinates
    #[arg(long, default_value_t = 4)]
    pub precision: usize,
    /// Upper end of the y axis; points above it are drawn as triangles at the edge
    #[arg(long)]
    pub y_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of tests
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "independent")]
    pub pattern: PatternArg,
    /// Fraction of non-null tests
    #[arg(long, default_value_t = 0.05)]
    pub pi1: f64,
    /// Mean shift of non-null statistics
    #[arg(long, default_value_t = 3.5)]
    pub effect: f64,
    /// Equicorrelation (equicorrelated pattern only)
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// CSV output
    #[arg(long, default_value = "pvalues.csv")]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn check_level(q: f64) -> Result<(), CliError> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("q must be in (0,1], got {q}")))
    }
}

fn parse_column(spec: &str) -> Result<Column, CliError> {
    match spec.parse::<usize>() {
        Ok(0) => Err(CliError::Validation("column indices start at 1".into())),
        Ok(n) => Ok(Column::Index(n - 1)),
        Err(_) => Ok(Column::Name(spec.to_string())),
    }
}

fn load(args: &InputArgs) -> Result<OrderedTests, CliError> {
    let format = match args.format {
        Some(FormatArg::Plain) => Format::Plain,
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Tsv) => Format::Tsv,
        None => Format::from_extension(args.input.extension().and_then(|e| e.to_str())),
    };
    let options = ParseOptions {
        p_column: parse_column(&args.p_column)?,
        id_column: args.id_column.as_deref().map(parse_column).transpose()?,
        clamp_zero: args.clamp_zero,
    };
    let file = File::open(&args.input)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.input.display())))?;
    let set =
        parse_pvalues(BufReader::new(file), format, &options).map_err(
            |e| match CliError::from(e) {
                CliError::Validation(m) => {
                    CliError::Validation(format!("{}: {m}", args.input.display()))
                }
                io => io,
            },
        )?;
    Ok(order_tests(&set))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn summary(k: usize, m: usize, q: f64, alpha: Option<f64>) -> String {
    let alpha = alpha.map_or_else(|| "none".to_string(), |a| a.to_string());
    format!("k*={k} of m={m} significant at FDR q={q} (alpha={alpha})")
}

pub fn run_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    check_level(args.q)?;
    let ordered = load(&args.input)?;
    let method = match args.method {
        MethodArg::Bh => Method::Bh,
        MethodArg::By => Method::By,
    };
    let result = stepup(&ordered, args.q, method).map_err(validation)?;
    let qvals = q_values_with(&ordered, method);
    let readouts = Readouts::new(&result, min_attainable_fdr_with(&ordered, method));
    let (json, csv) = write_report(&result, &qvals, &readouts, &ordered);
    write_file(&args.out, &json)?;
    write_file(&args.table, &csv)?;
    let _ = writeln!(
        stdout,
        "{}",
        summary(result.k_star, ordered.m(), args.q, result.alpha_implied)
    );
    Ok(())
}

pub fn run_plot(args: &PlotArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    check_level(args.q)?;
    for &q in &args.q_lines {
        check_level(q)?;
    }
    let ordered = load(&args.input)?;
    let model = build_plot_model(&ordered, &q_values(&ordered), args.q, &args.q_lines)
        .map_err(validation)?;
    let opts = RenderOptions {
        width_px: args.width,
        height_px: args.height,
        margin_px: args.margin,
        point_radius_px: args.radius,
        precision: args.precision,
        y_limit: args.y_max,
    };
    let svg = render_svg(&model, &opts).map_err(validation)?;
    write_file(&args.out, &svg)?;
    let ro = &model.readouts;
    let _ = writeln!(
        stdout,
        "{}",
        summary(ro.k_star, ordered.m(), args.q, ro.alpha_implied)
    );
    Ok(())
}

pub fn run_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let spec = SimSpec {
        m: args.m,
        pattern: match args.pattern {
            PatternArg::Independent => qqfdr::Pattern::Independent,
            PatternArg::Equicorrelated => qqfdr::Pattern::Equicorrelated,
        },
        pi1: args.pi1,
        effect: args.effect,
        rho: args.rho,
        seed: args.seed,
    };
    let set: PValueSet = simulate_pvalues(&spec).map_err(validation)?;
    write_file(&args.out, &write_pvalues_csv(&set))?;
    let _ = writeln!(
        stdout,
        "wrote {} p-values to {}",
        set.m(),
        args.out.display()
    );
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Analyze(a) => run_analyze(a, stdout),
        Command::Plot(a) => run_plot(a, stdout),
        Command::Simulate(a) => run_simulate(a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_specs() {
        assert_eq!(parse_column("2").unwrap(), Column::Index(1));
        assert_eq!(parse_column("pval").unwrap(), Column::Name("pval".into()));
        assert!(parse_column("0").is_err());
    }

    #[test]
    fn summary_line() {
        assert_eq!(
            summary(4, 4, 0.05, Some(0.04)),
            "k*=4 of m=4 significant at FDR q=0.05 (alpha=0.04)"
        );
        assert_eq!(
            summary(0, 1, 0.05, None),
            "k*=0 of m=1 significant at FDR q=0.05 (alpha=none)"
        );
    }

    #[test]
    fn level_check() {
        assert!(check_level(1.0).is_ok());
        let e = check_level(1.5).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_VALIDATION);
        assert!(e.message().contains("q must be in (0,1]"));
    }

    #[test]
    fn help_exits_zero() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["qqfdr", "--help"], &mut out, &mut err), EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("analyze"));
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            run(["qqfdr", "analyze", "--help"], &mut out, &mut err),
            EXIT_OK
        );
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("[default: 0.05]"));
        assert!(text.contains("[default: bh]"));
    }

    #[test]
    fn unknown_flag_is_validation_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            run(["qqfdr", "analyze", "--bogus"], &mut out, &mut err),
            EXIT_VALIDATION
        );
    }
}
