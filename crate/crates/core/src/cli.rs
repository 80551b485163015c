//! Command-line surface. Each subcommand parses its arguments, calls the
//! library operation, and renders the result as a [`Table`].
//!
//! Exit codes: 0 success or pass, 1 check failed, 2 parse or usage error,
//! 3 evaluation error, 4 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::catalog;
use crate::expr::{self, parse_complex, FamilyExpr, ParseError};
use crate::output::{self, EvalRecord, Format, Table};
use crate::probe::{
    self, GridSpec, HypothesesInput, ProbeError, ScanOptions, Thresholds, DEFAULT_RADIUS, DEFAULT_SAMPLES,
    DEFAULT_SEGMENT_SAMPLES,
};
use crate::schwarzian::{self, CheckError, IdentityReport, Mobius, Tolerance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_EVAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "schwarzian-lab", version, about = "Schwarzian derivatives and normality probes for f_n(z)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jet, Schwarzian and spherical derivative of f_n at z
    Eval(EvalArgs),
    /// Pointwise check of a Schwarzian identity
    Identity(IdentityArgs),
    /// Marty statistic (spherical derivative of f_n) over a grid
    ScanMarty(ScanArgs),
    /// Marty statistic of the Schwarzian family S_{f_n} over a grid
    ScanSd(ScanArgs),
    /// Segment mean-value bound |f_n(z) - f_n(z0)| <= K |z - z0|
    Bound(BoundArgs),
    /// Derivative floor, value bound and the implied Schwarzian bound on a grid
    Hypotheses(HypothesesArgs),
}

fn complex_arg(s: &str) -> Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Family source text, e.g. "exp(n*z)" (repeatable)
    #[arg(long = "family", allow_hyphen_values = true)]
    pub family: Vec<String>,
    /// Named family from the built-in catalog (repeatable)
    #[arg(long = "catalog")]
    pub catalog: Vec<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long, default_value_t = 1)]
    pub n_min: u32,
    #[arg(long, default_value_t = 64)]
    pub n_max: u32,
}

impl RangeArgs {
    fn values(&self) -> Result<Vec<u32>, String> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(format!("need 1 <= n-min <= n-max (got {}..{})", self.n_min, self.n_max));
        }
        Ok((self.n_min..=self.n_max).collect())
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// re0,re1,im0,im1,nx,ny
    #[arg(long, default_value = "-1,1,-1,1,41,41", allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, env = "SCHWARZIAN_LAB_SEED", default_value_t = 0)]
    pub seed: u64,
}

impl GridArgs {
    fn spec(&self) -> Result<GridSpec, String> {
        let parts: Vec<&str> = self.grid.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(format!("--grid needs re0,re1,im0,im1,nx,ny (got '{}')", self.grid));
        }
        let float = |s: &str| s.parse::<f64>().map_err(|e| format!("bad grid bound '{s}': {e}"));
        let count = |s: &str| s.parse::<usize>().map_err(|e| format!("bad grid count '{s}': {e}"));
        let g = GridSpec::new(
            (float(parts[0])?, float(parts[1])?),
            (float(parts[2])?, float(parts[3])?),
            count(parts[4])?,
            count(parts[5])?,
        )
        .and_then(|g| g.with_neighborhood(self.radius, self.samples))
        .map_err(|e| e.to_string())?;
        Ok(g)
    }
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    #[arg(long, default_value_t = Tolerance::default().abs)]
    pub tol_abs: f64,
    #[arg(long, default_value_t = Tolerance::default().rel)]
    pub tol_rel: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub n: f64,
    /// Complex point in a+bi form, e.g. 1.5-2i
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub z: Complex64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityKind {
    MobiusInvariance,
    Composition,
    Reciprocal,
    Conjugation,
}

impl IdentityKind {
    fn name(self) -> &'static str {
        match self {
            IdentityKind::MobiusInvariance => "mobius-invariance",
            IdentityKind::Composition => "composition",
            IdentityKind::Reciprocal => "reciprocal",
            IdentityKind::Conjugation => "conjugation",
        }
    }
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(value_enum)]
    pub kind: IdentityKind,
    /// f, then g for composition and conjugation. A catalog pair name
    /// (example4, example7) supplies f, g and φ for conjugation.
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub n: f64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub z: Complex64,
    /// Möbius coefficients a,b,c,d; each may be an expression in n
    #[arg(long, visible_alias = "phi", allow_hyphen_values = true)]
    pub mobius: Option<String>,
    /// Value omitted by f, for the reciprocal check
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub omitted: Option<Complex64>,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = Thresholds::default().slope_threshold, allow_hyphen_values = true)]
    pub slope_threshold: f64,
    #[arg(long, default_value_t = Thresholds::default().decay_threshold, allow_hyphen_values = true)]
    pub decay_threshold: f64,
    #[arg(long, default_value_t = Thresholds::default().cap)]
    pub cap: f64,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub z0: Complex64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub z: Complex64,
    #[arg(long, default_value_t = DEFAULT_SEGMENT_SAMPLES)]
    pub segment_samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HypothesesArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Derivative floor ε
    #[arg(long)]
    pub epsilon: f64,
    /// Point ζ for the value bound
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub zeta: Complex64,
    /// Value bound L
    #[arg(long = "value-bound")]
    pub value_bound: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A failure mapped to an exit code and a stderr message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_PARSE, message: message.into() }
    }

    fn eval(message: impl Into<String>) -> Self {
        Failure { code: EXIT_EVAL, message: message.into() }
    }

    fn parse(src: &str, e: &ParseError) -> Self {
        let caret = " ".repeat(e.position);
        Failure::usage(format!("{e}\n  {src}\n  {caret}^"))
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        Failure::eval(e.to_string())
    }
}

impl From<ProbeError> for Failure {
    fn from(e: ProbeError) -> Self {
        match e {
            ProbeError::Eval(_) => Failure::eval(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

/// Output of a successful run: the rendered table and whether every check
/// passed.
struct Outcome {
    table: Table,
    pass: bool,
    output: OutputArgs,
}

impl FamilyArgs {
    fn resolve(&self) -> Result<Vec<FamilyExpr>, Failure> {
        let mut out = Vec::new();
        for src in &self.family {
            out.push(expr::parse(src).map_err(|e| Failure::parse(src, &e))?);
        }
        for name in &self.catalog {
            let f = catalog::family(name).ok_or_else(|| {
                let names: Vec<_> = catalog::FAMILIES.iter().map(|e| e.name).collect();
                Failure::usage(format!("unknown catalog family '{name}' (known: {})", names.join(", ")))
            })?;
            out.push(f);
        }
        Ok(out)
    }

    fn single(&self) -> Result<FamilyExpr, Failure> {
        let mut fams = self.resolve()?;
        match fams.len() {
            1 => Ok(fams.remove(0)),
            k => Err(Failure::usage(format!("expected exactly one family (--family or --catalog), got {k}"))),
        }
    }
}

/// Möbius coefficients given as four expressions in `n` (not `z`).
fn mobius_from_text(text: &str, n: f64) -> Result<Mobius, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(Failure::usage(format!("--mobius needs a,b,c,d (got '{text}')")));
    }
    let mut coef = [Complex64::new(0.0, 0.0); 4];
    for (slot, part) in coef.iter_mut().zip(&parts) {
        let e = expr::parse(part.trim()).map_err(|e| Failure::parse(part.trim(), &e))?;
        if e.uses_var() {
            return Err(Failure::usage(format!("Möbius coefficient '{part}' must not depend on z")));
        }
        *slot = e.eval_jet(n, Complex64::new(0.0, 0.0)).map_err(|e| Failure::eval(e.to_string()))?.v;
    }
    Mobius::new(coef[0], coef[1], coef[2], coef[3]).map_err(|e| Failure::usage(e.to_string()))
}

fn run_eval(a: EvalArgs) -> Result<Outcome, Failure> {
    let f = a.family.single()?;
    let jet = f.eval_jet(a.n, a.z).map_err(|e| Failure::eval(e.to_string()))?;
    let rec = EvalRecord {
        family: f.source().map_or_else(|| f.to_string(), str::to_string),
        n: a.n,
        z: a.z,
        jet: jet.components(),
        schwarzian: schwarzian::schwarzian(&jet).map_err(|e| e.to_string()),
        spherical: schwarzian::spherical_derivative(&jet),
    };
    Ok(Outcome { table: output::eval_table(&rec), pass: true, output: a.output })
}

fn run_identity(a: IdentityArgs) -> Result<Outcome, Failure> {
    let tol = Tolerance::new(a.tolerance.tol_abs, a.tolerance.tol_rel);
    let mobius = |what: &str| -> Result<Mobius, Failure> {
        let text = a.mobius.as_deref().ok_or_else(|| Failure::usage(format!("{what} needs --mobius a,b,c,d")))?;
        mobius_from_text(text, a.n)
    };
    let report: IdentityReport = match a.kind {
        IdentityKind::MobiusInvariance => {
            let f = a.family.single()?;
            schwarzian::check_mobius_invariance(&f, a.n, &mobius("mobius-invariance")?, a.z, tol)?
        }
        IdentityKind::Composition => {
            let fams = a.family.resolve()?;
            let [f, g] = <[FamilyExpr; 2]>::try_from(fams)
                .map_err(|v| Failure::usage(format!("composition needs f and g, got {} families", v.len())))?;
            schwarzian::check_composition_law(&f, &g, a.n, a.z, tol)?
        }
        IdentityKind::Reciprocal => {
            let f = a.family.single()?;
            let w = a.omitted.unwrap_or(Complex64::new(0.0, 0.0));
            schwarzian::check_reciprocal(&f, a.n, w, a.z, tol)?
        }
        IdentityKind::Conjugation => {
            let pair = match a.family.catalog.as_slice() {
                [name] if a.family.family.is_empty() => catalog::pair(name),
                _ => None,
            };
            let (f, g, phi) = match pair {
                Some(p) => {
                    let phi = match &a.mobius {
                        Some(text) => mobius_from_text(text, a.n)?,
                        None => p.phi(a.n).map_err(|e| Failure::usage(e.to_string()))?,
                    };
                    (p.f(), p.g(), phi)
                }
                None => {
                    let fams = a.family.resolve()?;
                    let [f, g] = <[FamilyExpr; 2]>::try_from(fams).map_err(|v| {
                        Failure::usage(format!("conjugation needs f and g (or a catalog pair), got {}", v.len()))
                    })?;
                    (f, g, mobius("conjugation")?)
                }
            };
            schwarzian::check_conjugation(&f, &g, &phi, a.n, a.z, tol)?
        }
    };
    Ok(Outcome { table: output::identity_table(a.kind.name(), &report), pass: report.pass, output: a.output })
}

fn run_scan(a: ScanArgs, sd: bool) -> Result<Outcome, Failure> {
    let f = a.family.single()?;
    let n_values = a.range.values().map_err(Failure::usage)?;
    let grid = a.grid.spec().map_err(Failure::usage)?;
    let thresholds = Thresholds::new(a.slope_threshold, a.decay_threshold, a.cap)?;
    if a.workers == Some(0) {
        return Err(Failure::usage("--workers must be positive"));
    }
    let opts = ScanOptions { seed: a.grid.seed, workers: a.workers };
    let report = if sd {
        probe::sd_family_scan(&f, &grid, &n_values, &opts)?
    } else {
        probe::marty_scan(&f, &grid, &n_values, &opts)?
    };
    Ok(Outcome { table: output::scan_table(&report, &thresholds), pass: true, output: a.output })
}

fn run_bound(a: BoundArgs) -> Result<Outcome, Failure> {
    let f = a.family.single()?;
    let n_values = a.range.values().map_err(Failure::usage)?;
    if a.segment_samples < 2 {
        return Err(Failure::usage("--segment-samples must be at least 2"));
    }
    let reports = probe::local_bound_estimate(&f, &n_values, a.z0, a.z, a.segment_samples)
        .map_err(|e| Failure::eval(e.to_string()))?;
    let pass = reports.iter().all(|r| r.pass);
    Ok(Outcome { table: output::bound_table(&reports), pass, output: a.output })
}

fn run_hypotheses(a: HypothesesArgs) -> Result<Outcome, Failure> {
    let f = a.family.single()?;
    let n_values = a.range.values().map_err(Failure::usage)?;
    let grid = a.grid.spec().map_err(Failure::usage)?;
    if !(a.epsilon > 0.0) || !a.value_bound.is_finite() {
        return Err(Failure::usage("need --epsilon > 0 and a finite --value-bound"));
    }
    let input = HypothesesInput { epsilon: a.epsilon, zeta: a.zeta, value_bound: a.value_bound, seed: a.grid.seed };
    let rep = probe::hypotheses_check(&f, &n_values, &grid, &input)?;
    Ok(Outcome { table: output::hypotheses_table(&rep), pass: rep.pass, output: a.output })
}

fn grid_warnings(cmd: &Command) -> Vec<String> {
    let grid = match cmd {
        Command::ScanMarty(a) | Command::ScanSd(a) => &a.grid,
        Command::Hypotheses(a) => &a.grid,
        _ => return Vec::new(),
    };
    grid.spec().map(|g| g.warnings()).unwrap_or_default()
}

/// Runs a parsed command, writing the table to stdout (or `--out`) and
/// diagnostics to `stderr`. Returns the exit code.
pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    for w in grid_warnings(&cli.command) {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let result = match cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Identity(a) => run_identity(a),
        Command::ScanMarty(a) => run_scan(a, false),
        Command::ScanSd(a) => run_scan(a, true),
        Command::Bound(a) => run_bound(a),
        Command::Hypotheses(a) => run_hypotheses(a),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    let text = outcome.table.render(outcome.output.format);
    let written = match &outcome.output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_IO;
    }
    if outcome.pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli, stdout, stderr),
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = stdout.write_all(rendered.as_bytes());
                EXIT_OK
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
                EXIT_PARSE
            }
        }
    }
}
