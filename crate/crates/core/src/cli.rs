//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain error, 2 parse error (flags, files,
//! JSON), 3 non-converged numerics. A report is still written when the
//! numerics did not converge.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    boundedness_diagnostic, compactness_diagnostic, lower_bound_check, operator_norm_curve,
    schur_inequality_check, DiagnosticConfig, PowerConfig,
};
use crate::error::Error as NumError;
use crate::measure::{
    carleson_report, dyadic_grid, moment_decay_report, moment_sequence, Atom, Density, Measure,
};
use crate::quadrature::QuadratureSpec;
use crate::report::{fmt_f64, to_json, Csv};
use crate::specialfn::{hardy_constant, kernel_integral, KernelParams, KernelVariable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numerics(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Numerics(_) => 3,
        }
    }
}

impl From<NumError> for CliError {
    fn from(e: NumError) -> Self {
        match e {
            NumError::Domain(_) | NumError::Resource(_) => CliError::Domain(e.to_string()),
            NumError::Quadrature { .. } | NumError::NotConverged(_) => {
                CliError::Numerics(e.to_string())
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dhilbert",
    version,
    about = "Moment, Carleson and norm experiments for Derivative-Hilbert operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Output {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for matrix products (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct OperatorArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
}

#[derive(Debug, Args)]
struct PowerArgs {
    /// Relative tolerance of the power iteration.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
}

impl PowerArgs {
    fn config(&self) -> PowerConfig {
        PowerConfig {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of moments μ_0..μ_N.
    Moments {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Tail ratios μ([t,1))/(1-t)^s on the grid t_j = 1 - 2^-j.
    Carleson {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 24)]
        levels: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Growth of μ_n (n+1)^s up to N.
    Decay {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 4096)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Norm estimates of S_μ at increasing truncations.
    Norm {
        #[arg(long)]
        measure: PathBuf,
        #[command(flatten)]
        params: OperatorArgs,
        #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024")]
        trunc: Vec<usize>,
        #[command(flatten)]
        power: PowerArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Beta constant of the kernel and its numerical integrals.
    Kernel {
        #[command(flatten)]
        params: OperatorArgs,
        /// Panels per half interval.
        #[arg(long, default_value_t = 100)]
        panels: usize,
        /// Gauss–Legendre points per panel.
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Seeded check of the kernel ℓ² inequality.
    Schur {
        #[command(flatten)]
        params: OperatorArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 2048)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Carleson, moment-decay and norm indicators side by side.
    Equivalence {
        #[arg(long)]
        measure: PathBuf,
        #[command(flatten)]
        params: OperatorArgs,
        #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024")]
        trunc: Vec<usize>,
        #[arg(long, default_value_t = 24)]
        levels: usize,
        #[arg(long, default_value_t = 4096)]
        decay_n: usize,
        #[command(flatten)]
        power: PowerArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Norms of S_μ minus its finite-rank heads.
    Compactness {
        #[arg(long)]
        measure: PathBuf,
        #[command(flatten)]
        params: OperatorArgs,
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
        cuts: Vec<usize>,
        #[command(flatten)]
        power: PowerArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Test-function lower bound ratios.
    Lowerbound {
        #[arg(long)]
        measure: PathBuf,
        #[command(flatten)]
        params: OperatorArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.9,0.99,0.999")]
        t: Vec<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Write a measure file.
    InitMeasure {
        /// Start from a named preset.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        /// Point mass as `t:c`; repeatable.
        #[arg(long, value_parser = parse_atom)]
        atom: Vec<Atom>,
        /// Density `scale t^a (1-t)^b` as `a:b:scale`; repeatable.
        #[arg(long, value_parser = parse_density)]
        density: Vec<Density>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Lebesgue,
}

impl Preset {
    fn measure(self) -> Measure {
        match self {
            Preset::Lebesgue => Measure::lebesgue(),
        }
    }
}

fn parse_numbers(s: &str, count: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != count {
        return Err(format!("expected {count} ':'-separated numbers, got '{s}'"));
    }
    parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect()
}

fn parse_atom(s: &str) -> Result<Atom, String> {
    let v = parse_numbers(s, 2)?;
    Ok(Atom { t: v[0], c: v[1] })
}

fn parse_density(s: &str) -> Result<Density, String> {
    let v = parse_numbers(s, 3)?;
    Ok(Density {
        a: v[0],
        b: v[1],
        scale: v[2],
    })
}

/// Measure file contents: either a preset name or an explicit measure.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MeasureFile {
    Preset(Preset),
    Explicit(Measure),
}

/// Reads and validates a measure file.
pub fn load_measure(path: &Path) -> Result<Measure, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read measure file {}: {e}", path.display())))?;
    parse_measure(&text)
}

pub fn parse_measure(text: &str) -> Result<Measure, CliError> {
    let file: MeasureFile = serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("invalid measure specification: {e}")))?;
    Ok(match file {
        MeasureFile::Preset(p) => p.measure(),
        MeasureFile::Explicit(m) => m.validated()?,
    })
}

pub fn measure_to_json(m: &Measure) -> String {
    to_json(m).expect("measures serialize")
}

fn params(p: &OperatorArgs) -> Result<KernelParams, CliError> {
    Ok(KernelParams::new(p.alpha, p.beta)?)
}

#[derive(Serialize)]
struct Envelope<'a, P: Serialize, R: Serialize> {
    command: &'a str,
    params: P,
    result: R,
}

struct Emitted {
    text: String,
    converged: bool,
}

impl Emitted {
    fn ok(text: String) -> Self {
        Self {
            text,
            converged: true,
        }
    }
}

fn json<P: Serialize, R: Serialize>(command: &str, params: P, result: R) -> Result<String, CliError> {
    to_json(&Envelope {
        command,
        params,
        result,
    })
    .map_err(|e| CliError::Numerics(format!("cannot serialize report: {e}")))
}

fn write_report(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("warning: numerics did not converge; report written anyway");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    match jobs {
        None => f(),
        Some(0) => Err(CliError::Domain("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Domain(format!("cannot build thread pool: {e}")))?
            .install(f),
    }
}

/// Runs a subcommand and writes its report; `Ok(false)` means the report
/// was written but some iteration did not converge.
fn execute(command: Command) -> Result<bool, CliError> {
    if let Command::InitMeasure {
        preset,
        atom,
        density,
        output,
    } = command
    {
        let base = preset.map(Preset::measure).unwrap_or_default();
        let m = base.plus(&Measure::new(atom, density)?);
        write_report(&measure_to_json(&m), output.as_deref())?;
        return Ok(true);
    }
    let (jobs, output) = match &command {
        Command::Moments { out, .. }
        | Command::Carleson { out, .. }
        | Command::Decay { out, .. }
        | Command::Norm { out, .. }
        | Command::Kernel { out, .. }
        | Command::Schur { out, .. }
        | Command::Equivalence { out, .. }
        | Command::Compactness { out, .. }
        | Command::Lowerbound { out, .. } => (out.jobs, out.output.clone()),
        Command::InitMeasure { .. } => unreachable!(),
    };
    let emitted = with_jobs(jobs, move || emit(command))?;
    write_report(&emitted.text, output.as_deref())?;
    Ok(emitted.converged)
}

fn emit(command: Command) -> Result<Emitted, CliError> {
    match command {
        Command::Moments { measure, n, out } => {
            let m = load_measure(&measure)?;
            let seq = moment_sequence(&m, n)?;
            Ok(Emitted::ok(match out.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct P<'a> {
                        measure: &'a Measure,
                        n: usize,
                    }
                    json("moments", P { measure: &m, n }, seq.values())?
                }
                Format::Csv => {
                    let mut csv = Csv::new(&["n", "moment"]);
                    for (i, v) in seq.values().iter().enumerate() {
                        csv.row([i.to_string(), fmt_f64(*v)]);
                    }
                    csv.finish()
                }
            }))
        }
        Command::Carleson {
            measure,
            s,
            levels,
            out,
        } => {
            let m = load_measure(&measure)?;
            if levels == 0 {
                return Err(CliError::Domain("--levels must be positive".into()));
            }
            let r = carleson_report(&m, s, &dyadic_grid(levels))?;
            Ok(Emitted::ok(match out.format {
                Format::Json => json("carleson", serde_json::json!({ "s": s, "levels": levels }), &r)?,
                Format::Csv => {
                    let mut csv = Csv::new(&["t", "ratio"]);
                    for (t, x) in r.grid.iter().zip(&r.ratios) {
                        csv.row([fmt_f64(*t), fmt_f64(*x)]);
                    }
                    csv.finish()
                }
            }))
        }
        Command::Decay { measure, s, n, out } => {
            let m = load_measure(&measure)?;
            let d = moment_decay_report(&m, s, n)?;
            Ok(Emitted::ok(match out.format {
                Format::Json => json("decay", serde_json::json!({ "s": s, "n": n }), d)?,
                Format::Csv => {
                    let mut csv = Csv::new(&["exponent", "n_max", "sup", "trend"]);
                    csv.row([fmt_f64(d.exponent), d.n_max.to_string(), fmt_f64(d.sup), fmt_f64(d.trend)]);
                    csv.finish()
                }
            }))
        }
        Command::Norm {
            measure,
            params: pa,
            trunc,
            power,
            out,
        } => {
            let p = params(&pa)?;
            let m = load_measure(&measure)?;
            let c = operator_norm_curve(&m, &p, &trunc, &power.config())?;
            let text = match out.format {
                Format::Json => json(
                    "norm",
                    serde_json::json!({ "alpha": p.alpha(), "beta": p.beta(), "power": power.config() }),
                    &c,
                )?,
                Format::Csv => {
                    let mut csv = Csv::new(&["N", "estimate", "growth_ratio", "converged"]);
                    for i in 0..c.truncations.len() {
                        let g = if i == 0 {
                            String::new()
                        } else {
                            fmt_f64(c.growth_ratios[i - 1])
                        };
                        csv.row([
                            c.truncations[i].to_string(),
                            fmt_f64(c.estimates[i]),
                            g,
                            c.converged[i].to_string(),
                        ]);
                    }
                    csv.finish()
                }
            };
            Ok(Emitted {
                text,
                converged: c.all_converged(),
            })
        }
        Command::Kernel {
            params: pa,
            panels,
            order,
            tol,
            out,
        } => {
            let p = params(&pa)?;
            let spec = QuadratureSpec {
                panels,
                order,
                tolerance: tol,
            };
            let constant = hardy_constant(&p)?;
            let over_x = kernel_integral(&p, KernelVariable::X, &spec)?;
            let over_y = kernel_integral(&p, KernelVariable::Y, &spec)?;
            let deviation = (over_x - constant).abs().max((over_y - constant).abs());
            Ok(Emitted::ok(match out.format {
                Format::Json => json(
                    "kernel",
                    serde_json::json!({ "alpha": p.alpha(), "beta": p.beta(), "quadrature": spec }),
                    serde_json::json!({
                        "constant": constant,
                        "integral_x": over_x,
                        "integral_y": over_y,
                        "max_deviation": deviation,
                    }),
                )?,
                Format::Csv => {
                    let mut csv = Csv::new(&["alpha", "beta", "constant", "integral_x", "integral_y", "max_deviation"]);
                    csv.row([
                        fmt_f64(p.alpha()),
                        fmt_f64(p.beta()),
                        fmt_f64(constant),
                        fmt_f64(over_x),
                        fmt_f64(over_y),
                        fmt_f64(deviation),
                    ]);
                    csv.finish()
                }
            }))
        }
        Command::Schur {
            params: pa,
            trials,
            k,
            seed,
            out,
        } => {
            let p = params(&pa)?;
            let r = schur_inequality_check(&p, trials, k, seed)?;
            Ok(Emitted::ok(match out.format {
                Format::Json => json("schur", serde_json::json!({ "generator": "ChaCha8" }), &r)?,
                Format::Csv => {
                    let mut csv = Csv::new(&["trial", "ratio"]);
                    for (i, x) in r.ratios.iter().enumerate() {
                        csv.row([i.to_string(), fmt_f64(*x)]);
                    }
                    csv.finish()
                }
            }))
        }
        Command::Equivalence {
            measure,
            params: pa,
            trunc,
            levels,
            decay_n,
            power,
            out,
        } => {
            let p = params(&pa)?;
            let m = load_measure(&measure)?;
            if levels == 0 {
                return Err(CliError::Domain("--levels must be positive".into()));
            }
            let config = DiagnosticConfig {
                truncations: trunc,
                grid: dyadic_grid(levels),
                decay_n,
                power: power.config(),
            };
            let r = boundedness_diagnostic(&m, &p, &config)?;
            let text = match out.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct P<'a> {
                        measure: &'a Measure,
                        levels: usize,
                        decay_n: usize,
                        power: PowerConfig,
                    }
                    json(
                        "equivalence",
                        P {
                            measure: &m,
                            levels,
                            decay_n,
                            power: config.power,
                        },
                        &r,
                    )?
                }
                Format::Csv => {
                    let mut csv = Csv::new(&["quantity", "index", "value"]);
                    for (t, x) in r.carleson.grid.iter().zip(&r.carleson.ratios) {
                        csv.row(["carleson_ratio".to_string(), fmt_f64(*t), fmt_f64(*x)]);
                    }
                    csv.row(["carleson_sup".into(), String::new(), fmt_f64(r.carleson.sup_ratio)]);
                    csv.row(["carleson_trend".into(), String::new(), fmt_f64(r.carleson.vanishing_trend)]);
                    csv.row(["moment_sup".into(), String::new(), fmt_f64(r.moment_decay.sup)]);
                    csv.row(["moment_trend".into(), String::new(), fmt_f64(r.moment_decay.trend)]);
                    for (n, e) in r.norm_curve.truncations.iter().zip(&r.norm_curve.estimates) {
                        csv.row(["norm_estimate".to_string(), n.to_string(), fmt_f64(*e)]);
                    }
                    csv.row(["moment_constant".into(), String::new(), fmt_f64(r.moment_constant)]);
                    csv.row(["hardy_bound".into(), String::new(), fmt_f64(r.hardy_bound)]);
                    csv.finish()
                }
            };
            Ok(Emitted {
                text,
                converged: r.norm_curve.all_converged(),
            })
        }
        Command::Compactness {
            measure,
            params: pa,
            n,
            cuts,
            power,
            out,
        } => {
            let p = params(&pa)?;
            let m = load_measure(&measure)?;
            let r = compactness_diagnostic(&m, &p, n, &cuts, &power.config())?;
            let converged = r.iter().all(|x| x.converged);
            let text = match out.format {
                Format::Json => json(
                    "compactness",
                    serde_json::json!({ "alpha": p.alpha(), "beta": p.beta(), "n": n, "power": power.config() }),
                    &r,
                )?,
                Format::Csv => {
                    let mut csv = Csv::new(&["mcut", "tail_norm", "converged"]);
                    for x in &r {
                        csv.row([x.mcut.to_string(), fmt_f64(x.norm), x.converged.to_string()]);
                    }
                    csv.finish()
                }
            };
            Ok(Emitted { text, converged })
        }
        Command::Lowerbound {
            measure,
            params: pa,
            t,
            out,
        } => {
            let p = params(&pa)?;
            let m = load_measure(&measure)?;
            let r = lower_bound_check(&m, &p, &t)?;
            Ok(Emitted::ok(match out.format {
                Format::Json => json(
                    "lowerbound",
                    serde_json::json!({ "alpha": p.alpha(), "beta": p.beta() }),
                    &r,
                )?,
                Format::Csv => {
                    let mut csv = Csv::new(&["t", "truncation", "tail_mass", "dh_norm", "ratio"]);
                    for x in &r {
                        csv.row([
                            fmt_f64(x.t),
                            x.truncation.to_string(),
                            fmt_f64(x.tail_mass),
                            fmt_f64(x.dh_norm),
                            fmt_f64(x.ratio),
                        ]);
                    }
                    csv.finish()
                }
            }))
        }
        Command::InitMeasure { .. } => unreachable!("handled before dispatch"),
    }
}
