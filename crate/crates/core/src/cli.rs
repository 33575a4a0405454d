//! Command-line front end: spectra, tables of potentials and wavefunctions,
//! and the verification suite.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 a
//! verification check failed.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::coth::RadialFunction;
use crate::eckart::{self, EckartParams};
use crate::error::{Error, Result};
use crate::extensions::ExtensionKind;
use crate::hulthen::{self, ExampleCase, HulthenParams, RationalHulthen};
use crate::oracle::{mixed_points, OracleConfig, Grid};
use crate::output::{Format, Key, Table};
use crate::verify::{self, Scope};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hulthen-susy", version, about = "Exact spectra of Eckart and deformed Hulthén potentials and their rational extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the bound-state spectrum.
    Spectrum(SpectrumArgs),
    /// Tabulate a potential or a normalized wavefunction.
    Table(TableArgs),
    /// Run closed-form-versus-numerical checks on seeded random parameters.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Eckart,
    Hulthen,
    HulthenExt,
    HulthenRat,
    ExampleI,
    ExampleIi,
    ExampleIii,
    ExampleIv,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Eckart => "eckart",
            Family::Hulthen => "hulthen",
            Family::HulthenExt => "hulthen-ext",
            Family::HulthenRat => "hulthen-rat",
            Family::ExampleI => "example-i",
            Family::ExampleIi => "example-ii",
            Family::ExampleIii => "example-iii",
            Family::ExampleIv => "example-iv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Potential,
    Wavefunction,
}

/// Family selection and parameters.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Extension kind: I, II or III.
    #[arg(long)]
    pub kind: Option<ExtensionKind>,
    /// Seed polynomial degree.
    #[arg(long)]
    pub m: Option<usize>,
    /// Hierarchy member.
    #[arg(long)]
    pub i: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = Quantity::Potential)]
    pub what: Quantity,
    /// State index; required for wavefunctions.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// all, specfun, eckart, susy, extensions, hulthen or oracle.
    #[arg(long, default_value = "all")]
    pub scope: Scope,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Lower bound on the oracle's coarsest grid; overrides the environment.
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A validated family with its parameters.
pub enum Model {
    Eckart(EckartParams),
    Hierarchy { params: HulthenParams, i: usize },
    Rational(RationalHulthen),
    Example { case: ExampleCase, params: HulthenParams },
}

fn required(v: Option<f64>, flag: &str, family: Family) -> Result<f64> {
    v.ok_or_else(|| Error::Domain(format!("--{flag} is required for family {}", family.name())))
}

impl Model {
    pub fn from_args(a: &ModelArgs) -> Result<Self> {
        let f = a.family;
        let hulthen = || -> Result<HulthenParams> {
            HulthenParams::new(
                required(a.mu, "mu", f)?,
                required(a.delta, "delta", f)?,
                required(a.q, "q", f)?,
            )
        };
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| Error::Domain(format!("--{flag} is required for family {}", f.name())))
        };
        Ok(match f {
            Family::Eckart => Model::Eckart(EckartParams::new(
                required(a.a, "A", f)?,
                required(a.b, "B", f)?,
                required(a.alpha, "alpha", f)?,
            )?),
            Family::Hulthen => Model::Hierarchy {
                params: hulthen()?,
                i: 0,
            },
            Family::HulthenExt => Model::Hierarchy {
                params: hulthen()?,
                i: need(a.i, "i")?,
            },
            Family::HulthenRat => {
                let kind = a.kind.ok_or_else(|| {
                    Error::Domain(format!("--kind is required for family {}", f.name()))
                })?;
                Model::Rational(RationalHulthen::new(hulthen()?, kind, need(a.m, "m")?, need(a.i, "i")?)?)
            }
            Family::ExampleI | Family::ExampleIi | Family::ExampleIii | Family::ExampleIv => {
                let case = match f {
                    Family::ExampleI => ExampleCase::I(a.i.unwrap_or(1)),
                    Family::ExampleIi => ExampleCase::II,
                    Family::ExampleIii => ExampleCase::III,
                    _ => ExampleCase::IV,
                };
                let params = hulthen()?;
                case.validate(&params)?;
                Model::Example { case, params }
            }
        })
    }

    fn hulthen_params(&self) -> Option<&HulthenParams> {
        match self {
            Model::Eckart(_) => None,
            Model::Hierarchy { params, .. } | Model::Example { params, .. } => Some(params),
            Model::Rational(h) => Some(h.params()),
        }
    }

    /// `key=value` list for the header.
    pub fn params_label(&self) -> String {
        match self {
            Model::Eckart(p) => format!("A={},B={},alpha={}", p.a(), p.b(), p.alpha()),
            Model::Hierarchy { params: p, i } => {
                let mut s = format!("mu={},delta={},q={}", p.mu(), p.delta(), p.q());
                if *i > 0 {
                    s += &format!(",i={i}");
                }
                s
            }
            Model::Rational(h) => {
                let p = h.params();
                format!(
                    "mu={},delta={},q={},kind={},m={},i={}",
                    p.mu(),
                    p.delta(),
                    p.q(),
                    h.kind(),
                    h.m(),
                    h.i()
                )
            }
            Model::Example { case, params: p } => {
                let mut s = format!("mu={},delta={},q={}", p.mu(), p.delta(), p.q());
                if let ExampleCase::I(i) = case {
                    s += &format!(",i={i}");
                }
                s
            }
        }
    }

    fn coordinate(&self) -> &'static str {
        match self {
            Model::Eckart(_) => "r",
            _ => "x",
        }
    }

    /// Left end of the domain and the potential's length scale.
    fn domain(&self) -> (f64, f64) {
        match self {
            Model::Eckart(p) => (0.0, 1.0 / p.alpha()),
            _ => {
                let p = self.hulthen_params().expect("Hulthén family");
                (p.x_min(), 1.0 / p.delta())
            }
        }
    }

    /// Sorted `(index, energy)` pairs, or the reason the spectrum is empty.
    pub fn spectrum(&self) -> Result<(Vec<(i64, f64)>, Option<String>)> {
        if let Some(p) = self.hulthen_params() {
            if !p.has_bound_states() {
                return Ok((Vec::new(), Some(hulthen::NO_BOUND_STATES.to_string())));
            }
        }
        let rows = match self {
            Model::Eckart(p) => eckart::spectrum(p)?
                .into_iter()
                .map(|s| (s.index, s.energy))
                .collect(),
            Model::Hierarchy { params, i } => {
                let s = hulthen::extended_spectrum(params, *i)?;
                if s.states.is_empty() {
                    return Ok((Vec::new(), s.reason));
                }
                s.states.iter().map(|s| (s.index, s.energy)).collect()
            }
            Model::Rational(h) => h
                .indices()
                .into_iter()
                .map(|n| Ok((n, h.energy(n)?)))
                .collect::<Result<Vec<_>>>()?,
            Model::Example { case, params } => case
                .spectrum(params)?
                .into_iter()
                .map(|l| (l.index, l.energy))
                .collect(),
        };
        Ok((rows, None))
    }

    pub fn potential(&self, x: f64) -> Result<f64> {
        match self {
            Model::Eckart(p) => eckart::potential(p, x),
            Model::Hierarchy { params, i } => hulthen::extended_potential(params, *i, x),
            Model::Rational(h) => h.potential(x),
            Model::Example { case, params } => case.potential(params, x),
        }
    }

    /// The normalized wavefunction of state `n`.
    pub fn wavefunction(&self, n: i64) -> Result<Box<dyn RadialFunction>> {
        let regular = || {
            usize::try_from(n)
                .map_err(|_| Error::Index(format!("state index must be non-negative, got {n}")))
        };
        Ok(match self {
            Model::Eckart(p) => Box::new(eckart::normalized_profile(p, regular()?)?),
            Model::Hierarchy { params, i } => Box::new(hulthen::state(params, *i, regular()?)?),
            Model::Rational(h) => Box::new(h.state(n)?),
            Model::Example { case, params } => Box::new(case.generic(params)?.state(n)?),
        })
    }
}

/// Uniform samples over `[from, to]`, both ends included.
fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| from + (to - from) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Where `|psi|` has fallen below `1e-10 sup |psi|` for good, capped at `60 L`.
fn support_end(psi: &dyn RadialFunction, edge: f64, length: f64) -> f64 {
    const STEPS: usize = 3000;
    let h = 60.0 * length / STEPS as f64;
    let vals: Vec<f64> = (1..=STEPS).map(|k| psi.value(edge + k as f64 * h).abs()).collect();
    let sup = vals.iter().cloned().fold(0.0, f64::max);
    let last = vals.iter().rposition(|v| *v > 1e-10 * sup).unwrap_or(STEPS - 1);
    edge + ((last + 2).min(STEPS)) as f64 * h
}

/// Sample points for a table.
///
/// Potentials default to a log/linear mix from `1e-8 L` to `60 L` past the
/// edge. Wavefunctions default to uniform samples over the state's support,
/// on which trapezoidal sums stay close to the true norm.
fn sample_points(
    model: &Model,
    args: &TableArgs,
    psi: Option<&dyn RadialFunction>,
) -> Result<Vec<f64>> {
    let (edge, length) = model.domain();
    if args.samples < 2 {
        return Err(Error::Domain(format!("--samples must be at least 2, got {}", args.samples)));
    }
    let lo = edge + 1e-8 * length;
    let from = args.from.unwrap_or(lo);
    if !(from > edge) {
        return Err(Error::Domain(format!(
            "--from must lie inside the domain, {} > {edge}",
            model.coordinate()
        )));
    }
    let default_to = match psi {
        Some(f) => support_end(f, edge, length),
        None => edge + 60.0 * length,
    };
    let to = args.to.unwrap_or(default_to);
    if !(to > from) {
        return Err(Error::Domain(format!("--to must exceed --from, got [{from}, {to}]")));
    }
    if psi.is_none() && args.from.is_none() && args.to.is_none() {
        let n_log = args.samples / 5;
        let n_lin = args.samples - n_log;
        return Ok(mixed_points(1e-8 * length, length, 60.0 * length, n_log.max(2), n_lin)
            .into_iter()
            .map(|t| edge + t)
            .collect());
    }
    Ok(linspace(from, to, args.samples))
}

fn header(model: &Model, family: Family) -> Vec<(String, String)> {
    vec![
        ("family".into(), family.name().into()),
        ("params".into(), model.params_label()),
    ]
}

pub fn spectrum_table(args: &SpectrumArgs) -> Result<Table> {
    let model = Model::from_args(&args.model)?;
    let (rows, status) = model.spectrum()?;
    Ok(Table {
        meta: header(&model, args.model.family),
        key_name: "index".into(),
        rows: rows.into_iter().map(|(n, e)| (Key::Index(n), e)).collect(),
        status,
    })
}

pub fn table(args: &TableArgs) -> Result<Table> {
    let model = Model::from_args(&args.model)?;
    let mut meta = header(&model, args.model.family);
    let psi = match args.what {
        Quantity::Potential => {
            meta.push(("quantity".into(), "potential".into()));
            None
        }
        Quantity::Wavefunction => {
            let n = args
                .n
                .ok_or_else(|| Error::Domain("--n is required for --what wavefunction".into()))?;
            if let Some(p) = model.hulthen_params() {
                if !p.has_bound_states() {
                    return Err(Error::NoBoundStates(crate::error::Violation::new(
                        "q < 2 mu / delta^2",
                        format!("mu = {}, delta = {}, q = {}", p.mu(), p.delta(), p.q()),
                    )));
                }
            }
            meta.push(("quantity".into(), "wavefunction".into()));
            meta.push(("n".into(), n.to_string()));
            Some(model.wavefunction(n)?)
        }
    };
    let points = sample_points(&model, args, psi.as_deref())?;
    let rows = points
        .into_iter()
        .map(|x| {
            let v = match &psi {
                Some(f) => f.value(x),
                None => model.potential(x)?,
            };
            if !v.is_finite() {
                return Err(Error::Numeric(format!("non-finite value at {} = {x}", model.coordinate())));
            }
            Ok((Key::Coord(x), v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        meta,
        key_name: model.coordinate().into(),
        rows,
        status: None,
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numeric(_) => EXIT_NUMERIC,
        _ => EXIT_INVALID,
    }
}

fn emit(output: &OutputArgs, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Domain(format!("cannot write output: {e}"))),
    }
}

/// Parse `args` and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => EXIT_INVALID,
            };
        }
    };
    let result = match &cli.command {
        Command::Spectrum(a) => spectrum_table(a).and_then(|t| {
            if let Some(s) = &t.status {
                let _ = writeln!(stderr, "{s}");
            }
            emit(&a.output, &t.render(a.output.format), stdout).map(|_| EXIT_OK)
        }),
        Command::Table(a) => {
            table(a).and_then(|t| emit(&a.output, &t.render(a.output.format), stdout).map(|_| EXIT_OK))
        }
        Command::Verify(a) => {
            let mut cfg = OracleConfig::from_env();
            if let Some(n) = a.grid_points {
                cfg.n_points = n.max(Grid::MIN_POINTS);
            }
            let report = verify::run(a.scope, a.seed, &cfg);
            let text = match a.output.format {
                Format::Csv => report.to_text(),
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
                    s.push('\n');
                    s
                }
            };
            emit(&a.output, &text, stdout).map(|_| {
                if report.passed() {
                    EXIT_OK
                } else {
                    EXIT_VERIFY_FAILED
                }
            })
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("hulthen-susy").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn hulthen_spectrum_rows() {
        let (code, out, _) =
            run_str(&["spectrum", "--family", "hulthen", "--mu", "2", "--delta", "1", "--q", "0.5"]);
        assert_eq!(code, 0);
        assert_eq!(
            out,
            "# family=hulthen params=mu=2,delta=1,q=0.5\nindex,value\n0,-6.12500000000000\n1,-0.500000000000000\n"
        );
    }

    #[test]
    fn missing_parameter_is_a_validation_error() {
        let (code, _, err) = run_str(&["spectrum", "--family", "hulthen", "--mu", "2", "--delta", "1"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("--q is required"), "{err}");
    }

    #[test]
    fn violated_condition_is_named() {
        let (code, _, err) = run_str(&["spectrum", "--family", "eckart", "--A", "1", "--B", "0.5", "--alpha", "1"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("B > A^2"), "{err}");
    }

    #[test]
    fn eckart_table_uses_r() {
        let (code, out, _) = run_str(&[
            "table", "--family", "eckart", "--A", "1", "--B", "4", "--alpha", "1", "--samples", "50",
        ]);
        assert_eq!(code, 0);
        assert!(out.lines().nth(1) == Some("r,value"), "{out}");
        assert_eq!(out.lines().count(), 52);
    }
}
