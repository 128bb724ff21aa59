//! Command-line surface: `eval`, `check <suite>`, `synthesize`, `rule-info`.
//!
//! Settings are layered: built-in defaults, then the JSON config file
//! (`--config` or `RADIAL_SYNTH_CONFIG`), then flags.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::checks::{self, SuiteReport, DEFAULT_LAMBDAS};
use crate::config::{format_complex, parse_complex, GridSpec, OutputFormat, ProblemSpec, RunConfig};
use crate::error::{Error, Result};
use crate::measure::LineMeasure;
use crate::quadrature::SphereAverageRule;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const DEFAULTS: &str = "\
Defaults (override with a JSON config file or flags):
  quad_order                 64      sphere-average nodes
  series_tol                 1e-16   relative series truncation
  max_terms                  200     series term cap
  depth_cap                  3       nested sphere averages per evaluation
  grid                       0:4:0.125 (33 radii)
  seed                       20240917
  tolerances.product_formula 1e-8
  tolerances.laplacian       1e-5    at laplacian_step 1e-3
  tolerances.richardson_min  12      richardson_max 20
  tolerances.degree          1e-7    degree_witness 1e-3
  tolerances.commutativity   1e-9
  tolerances.eigenfunction   1e-8
  tolerances.axis_lift       1e-14
Exit codes: 0 all checks within tolerance, 1 a check failed, 2 error.";

fn complex_arg(s: &str) -> std::result::Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn grid_arg(s: &str) -> std::result::Result<GridSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "radial-synth", version, about = "Spherical functions, radial measure algebra and spherical-monomial synthesis on (R^n, SO(n))", after_long_help = DEFAULTS)]
pub struct Cli {
    /// JSON run configuration, merged under the flags.
    #[arg(long, env = "RADIAL_SYNTH_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    #[arg(long, global = true)]
    pub series_tol: Option<f64>,
    #[arg(long, global = true)]
    pub depth_cap: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the main tolerance of the selected check suite.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<OutputFormat>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate J_lambda and its lambda-derivatives.
    Eval(EvalArgs),
    /// Run a residual check over a parameter grid.
    Check {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Fit a radial target from a JSON problem description.
    Synthesize(SynthesizeArgs),
    /// Print the sphere-average rule for a dimension.
    RuleInfo {
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, value_parser = complex_arg, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub lambda: Vec<Complex64>,
    #[arg(long, conflicts_with = "grid", allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, value_parser = grid_arg)]
    pub grid: Option<GridSpec>,
    /// Lambda-derivative orders to print.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub degree: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    pub problem: PathBuf,
    /// Also write the (radius, target, fit, residual) table here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    ProductFormula {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
        dim: Vec<usize>,
        #[arg(long, value_parser = complex_arg, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<Complex64>,
        /// Base-point radii.
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        r: Vec<f64>,
        /// Translation radii; defaults to the --r list.
        #[arg(long, value_delimiter = ',')]
        s: Vec<f64>,
    },
    Laplacian {
        #[arg(long, value_delimiter = ',', default_values_t = [3usize])]
        dim: Vec<usize>,
        #[arg(long, value_parser = complex_arg, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<Complex64>,
        #[arg(long, value_parser = grid_arg, default_value = "0.1:5:0.1")]
        grid: GridSpec,
        #[arg(long)]
        h: Option<f64>,
    },
    Monomial {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "-1")]
        lambda: Complex64,
        #[arg(long, default_value_t = 1)]
        degree: usize,
    },
    Commutativity {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
        dim: Vec<usize>,
        /// Letters (atom radii) the words are built from.
        #[arg(long, value_delimiter = ',', default_values_t = [0.8, 1.7, 2.5])]
        words: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
        lengths: Vec<usize>,
    },
    Eigenfunction {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
        dim: Vec<usize>,
        #[arg(long, value_parser = complex_arg, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<Complex64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        r: Vec<f64>,
    },
    Lift {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// LineMeasure JSON; with --nu, replaces the default measure pairs.
        #[arg(long, requires = "nu")]
        mu: Option<PathBuf>,
        #[arg(long, requires = "mu")]
        nu: Option<PathBuf>,
    },
    /// Every suite at its defaults.
    All,
}

impl Cli {
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_path(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.quad_order {
            cfg.quad_order = v;
        }
        if let Some(v) = self.series_tol {
            cfg.series_tol = v;
        }
        if let Some(v) = self.depth_cap {
            cfg.depth_cap = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct EvalRow {
    dim: usize,
    lambda: String,
    degree: usize,
    r: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct RuleInfo<'a> {
    dim: usize,
    order: usize,
    normalizer: f64,
    raw_mass: f64,
    nodes: &'a [f64],
    weights: &'a [f64],
}

fn read_line_measure(path: &Path) -> Result<LineMeasure> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn lambdas_or_default(lambda: &[Complex64]) -> Vec<Complex64> {
    if lambda.is_empty() {
        DEFAULT_LAMBDAS.to_vec()
    } else {
        lambda.to_vec()
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))
}

fn report_bytes<C: Serialize>(report: &SuiteReport<C>, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => json_bytes(report),
        OutputFormat::Csv => csv_bytes(&report.cases),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = cli.run_config()?;
    let (bytes, code) = execute(cli, &cfg)?;
    emit(cli.out.as_deref(), &bytes)?;
    Ok(code)
}

/// Produces the output bytes and exit code without writing them.
pub fn execute(cli: &Cli, cfg: &RunConfig) -> Result<(Vec<u8>, i32)> {
    let t = &cfg.tolerances;
    let tol = |default: f64| cli.tol.unwrap_or(default);
    let graded = |failed: bool| if failed { EXIT_CHECK_FAILED } else { EXIT_OK };
    match &cli.command {
        Command::Eval(args) => {
            let radii = match (args.r, args.grid) {
                (Some(r), None) => vec![r],
                (None, Some(g)) => g.points()?,
                _ => return Err(Error::InvalidArgument("eval needs exactly one of --r or --grid".into())),
            };
            let mut rows = Vec::new();
            for &lambda in &args.lambda {
                let s = cfg.spherical(lambda, args.dim)?;
                for &degree in &args.degree {
                    for &r in &radii {
                        let v = s.eval_derivative(degree, r)?;
                        rows.push(EvalRow {
                            dim: args.dim,
                            lambda: format_complex(lambda),
                            degree,
                            r,
                            re: v.re,
                            im: v.im,
                        });
                    }
                }
            }
            let bytes = match cfg.format {
                OutputFormat::Json => json_bytes(&rows)?,
                OutputFormat::Csv => csv_bytes(&rows)?,
            };
            Ok((bytes, EXIT_OK))
        }
        Command::Check { suite } => match suite {
            Suite::ProductFormula { dim, lambda, r, s } => {
                let rhos = if s.is_empty() { r } else { s };
                let rep = checks::product_formula(cfg, dim, &lambdas_or_default(lambda), rhos, r, tol(t.product_formula))?;
                Ok((report_bytes(&rep, cfg.format)?, graded(rep.failed())))
            }
            Suite::Laplacian { dim, lambda, grid, h } => {
                let lambdas = if lambda.is_empty() {
                    vec![Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(1.0, 1.0)]
                } else {
                    lambda.clone()
                };
                let rep = checks::laplacian(
                    cfg,
                    dim,
                    &lambdas,
                    &grid.points()?,
                    h.unwrap_or(t.laplacian_step),
                    tol(t.laplacian),
                )?;
                Ok((report_bytes(&rep, cfg.format)?, graded(rep.failed())))
            }
            Suite::Monomial { dim, lambda, degree } => {
                let rep = checks::monomial(cfg, *dim, *lambda, *degree, tol(t.degree))?;
                Ok((report_bytes(&rep, cfg.format)?, graded(rep.failed())))
            }
            Suite::Commutativity { dim, words, lengths } => {
                let rep = checks::commutativity(cfg, dim, words, lengths, tol(t.commutativity))?;
                Ok((report_bytes(&rep, cfg.format)?, graded(rep.failed())))
            }
            Suite::Eigenfunction { dim, lambda, r } => {
                let rep = checks::eigenfunction(cfg, dim, &lambdas_or_default(lambda), r, tol(t.eigenfunction))?;
                Ok((report_bytes(&rep, cfg.format)?, graded(rep.failed())))
            }
            Suite::Lift { dim, mu, nu } => {
                let pairs = match (mu, nu) {
                    (Some(mu), Some(nu)) => vec![(read_line_measure(mu)?, read_line_measure(nu)?)],
                    _ => checks::default_lift_pairs(),
                };
                let rep = checks::lift(cfg, *dim, &pairs, tol(t.axis_lift))?;
                Ok((report_bytes(&rep, cfg.format)?, graded(rep.failed())))
            }
            Suite::All => {
                if cfg.format == OutputFormat::Csv {
                    return Err(Error::InvalidArgument(
                        "check all emits JSON only; run a single suite for CSV".into(),
                    ));
                }
                let rep = checks::full_suite(cfg)?;
                Ok((json_bytes(&rep)?, graded(!rep.passed)))
            }
        },
        Command::Synthesize(args) => {
            let spec = ProblemSpec::from_path(&args.problem)?;
            let problem = spec.build(args.problem.parent())?;
            let result = crate::synthesis::fit(&problem)?;
            if let Some(path) = &args.csv {
                let file = std::fs::File::create(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                result.write_residual_csv(file)?;
            }
            let bytes = match cfg.format {
                OutputFormat::Json => json_bytes(&result)?,
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    result.write_residual_csv(&mut buf)?;
                    buf
                }
            };
            Ok((bytes, EXIT_OK))
        }
        Command::RuleInfo { dim } => {
            let rule = SphereAverageRule::new(*dim, cfg.quad_order)?;
            let info = RuleInfo {
                dim: rule.dim(),
                order: rule.order(),
                normalizer: rule.normalizer(),
                raw_mass: rule.raw_mass(),
                nodes: rule.nodes(),
                weights: rule.weights(),
            };
            Ok((json_bytes(&info)?, EXIT_OK))
        }
    }
}
