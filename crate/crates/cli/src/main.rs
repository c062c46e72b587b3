use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use fup_core::bounds::{build_schedule, cantor_fup_table, check_improvement, kappa, FupFamily};
use fup_core::cantor::{build_iterate_exact, cantor_function, parse_length, CantorSpec, GrowthCondition, GrowthKind, RadialCantorSpec};
use fup_core::harness::{default_suites, random_pairs, run_experiment, run_property_suites, ExperimentConfig};
use fup_core::nyquist::{check_weak_subadditivity, rho_exact_1d};
use fup_core::porosity::{certify_cantor_porosity, verify_porosity_1d};
use fup_core::tf::gabor::{gabor_multiplier_norm, gram_dense, lattice_restriction, write_matrix_dump, EigenMethod, Lattice2d, RestrictionSource};
use fup_core::tf::radial::daubechies_radial_spectrum;
use fup_core::{build_iterate, FupError};

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] FupError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "fup", version, about = "Cantor sets, porosity, Nyquist densities and time-frequency localization bounds")]
struct Cli {
    /// Seed for randomized checks (recorded in outputs).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON experiment config (for `run` and `bounds table`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Config override `key=value` (repeatable; beats --config).
    #[arg(long = "set", global = true)]
    set: Vec<String>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cantor iterates.
    #[command(subcommand)]
    Cantor(CantorCmd),
    /// Porosity verification.
    #[command(subcommand)]
    Porosity(PorosityCmd),
    /// Nyquist densities and subadditivity.
    #[command(subcommand)]
    Density(DensityCmd),
    /// Constants, schedules and bound tables.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Time-frequency operators.
    #[command(subcommand)]
    Ops(OpsCmd),
    /// Run a named experiment (radial_fup, gabor_fup) and emit CSV.
    Run { experiment: Option<String> },
}

#[derive(Args, Debug, Clone)]
struct SpecArgs {
    /// Base M.
    #[arg(short = 'M', long = "base", default_value_t = 3)]
    m: u32,
    /// Digit alphabet, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,2")]
    alphabet: Vec<u32>,
    /// Iteration depth n.
    #[arg(short, long, default_value_t = 1)]
    n: u32,
    /// Length L, a decimal or `p/q`.
    #[arg(short = 'L', long = "length", default_value = "1")]
    length: String,
}

impl SpecArgs {
    fn spec(&self) -> CliResult<CantorSpec> {
        Ok(CantorSpec::with_length(self.m, self.alphabet.clone(), self.n, parse_length(&self.length)?)?)
    }
}

#[derive(Subcommand, Debug)]
enum CantorCmd {
    /// Intervals of the iterate (exact endpoints when L is rational).
    Build(SpecArgs),
    /// Measure against (|A|/M)^n L.
    Measure(SpecArgs),
    /// Cantor function at x.
    Function {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        x: f64,
    },
}

#[derive(Subcommand, Debug)]
enum PorosityCmd {
    /// Exact sweep over scales [alpha_min, alpha_max].
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        alpha_min: f64,
        #[arg(long)]
        alpha_max: f64,
    },
    /// Certificate with nu = M^-2 on scales >= L M^{1-n}.
    Certify(SpecArgs),
}

#[derive(Subcommand, Debug)]
enum DensityCmd {
    /// Exact maximal density for windows of length `window`.
    Rho {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        window: f64,
    },
    /// Weak subadditivity on random pairs.
    Subadd {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
    },
}

#[derive(Subcommand, Debug)]
enum BoundsCmd {
    /// kappa_d(x).
    Kappa {
        #[arg(short, long, default_value_t = 1)]
        d: u32,
        #[arg(long)]
        x: f64,
    },
    /// Radius schedule and product bound.
    Schedule {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        h: f64,
        #[arg(short, long, default_value_t = 1)]
        d: u32,
        #[arg(short, long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        r0_fraction: f64,
    },
    /// Per-n bound table for the configured family (radial_fup or gabor_fup config).
    Table,
    /// Optimized-vs-Hermite-window comparison on (0, 10].
    Improvement {
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

#[derive(Subcommand, Debug)]
enum OpsCmd {
    /// Radial localization spectrum (d = 1).
    RadialSpectrum {
        #[arg(long)]
        radius: f64,
        #[arg(short = 'M', long = "base", default_value_t = 3)]
        m: u32,
        #[arg(long, value_delimiter = ',', default_value = "0,2")]
        alphabet: Vec<u32>,
        #[arg(short, long, default_value_t = 0)]
        n: u32,
        /// Number of leading eigenvalues to print.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Gabor multiplier norm on the square product of the iterate.
    GaborNorm {
        #[command(flatten)]
        spec: SpecArgs,
        /// Lattice spacing (both axes).
        #[arg(long)]
        spacing: f64,
        #[arg(long, default_value_t = fup_core::tf::gabor::DEFAULT_MATRIX_CAP)]
        cap: usize,
        #[arg(long)]
        sparsified: bool,
        #[arg(long)]
        power: bool,
        /// Dense Gram dump path.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run property suites.
    Verify {
        /// Comma separated suite names; default all, empty string for none.
        #[arg(long, value_delimiter = ',')]
        suites: Option<Vec<String>>,
    },
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(cli: &Cli, v: &Value) -> CliResult<()> {
    emit(cli, &format!("{}\n", serde_json::to_string_pretty(v)?))
}

fn run(cli: &Cli) -> CliResult<bool> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.cmd {
        Command::Cantor(c) => match c {
            CantorCmd::Build(s) => {
                let spec = s.spec()?;
                let set = build_iterate(&spec)?;
                let exact = build_iterate_exact(&spec, 16)?.map(|u| {
                    u.endpoints().iter().map(|(a, b)| vec![a.to_string(), b.to_string()]).collect::<Vec<_>>()
                });
                emit_json(cli, &json!({"spec": spec, "intervals": set, "exact": exact}))?;
            }
            CantorCmd::Measure(s) => {
                let spec = s.spec()?;
                let set = build_iterate(&spec)?;
                let exact = build_iterate_exact(&spec, 16)?.map(|u| u.measure().to_string());
                emit_json(
                    cli,
                    &json!({"measure": set.measure(), "expected": spec.expected_measure(), "exact": exact, "intervals": set.len()}),
                )?;
            }
            CantorCmd::Function { spec, x } => {
                let spec = spec.spec()?;
                emit_json(cli, &json!({"x": x, "value": cantor_function(&spec, *x)}))?;
            }
        },
        Command::Porosity(c) => {
            let w = match c {
                PorosityCmd::Verify { spec, nu, alpha_min, alpha_max } => {
                    verify_porosity_1d(&build_iterate(&spec.spec()?)?, *nu, *alpha_min, *alpha_max)?
                }
                PorosityCmd::Certify(s) => certify_cantor_porosity(&s.spec()?)?,
            };
            emit_json(cli, &serde_json::to_value(&w)?)?;
            return Ok(w.is_verified());
        }
        Command::Density(c) => match c {
            DensityCmd::Rho { spec, window } => {
                let r = rho_exact_1d(&build_iterate(&spec.spec()?)?, *window)?;
                emit_json(cli, &serde_json::to_value(&r)?)?;
            }
            DensityCmd::Subadd { spec, pairs } => {
                let spec = spec.spec()?;
                let ps = random_pairs(spec.l(), *pairs, seed);
                let rep = check_weak_subadditivity(&spec, &ps)?;
                emit_json(cli, &json!({"seed": seed, "report": rep}))?;
                return Ok(rep.pass);
            }
        },
        Command::Bounds(c) => match c {
            BoundsCmd::Kappa { d, x } => emit_json(cli, &json!({"d": d, "x": x, "kappa": kappa(*d, *x)?}))?,
            BoundsCmd::Schedule { nu, h, d, p, r0_fraction } => {
                emit_json(cli, &serde_json::to_value(build_schedule(*nu, *h, *d, *p, *r0_fraction)?)?)?
            }
            BoundsCmd::Table => {
                let cfg = ExperimentConfig::resolve(None, cli.config.as_deref(), &cli.set)?;
                let rule = cfg.rule();
                let (family, kind) = if cfg.experiment == "gabor_fup" {
                    (FupFamily::Product { dim: 2, m: cfg.m, alphabet: cfg.alphabet.clone(), rule }, GrowthKind::Increasing)
                } else {
                    (
                        FupFamily::Radial { d: 1, m: cfg.m, alphabet: cfg.alphabet.clone(), rule, n_cut: cfg.n_cut },
                        GrowthKind::Radius,
                    )
                };
                let cond = GrowthCondition::new(kind, cfg.growth_c1, cfg.growth_c2, cfg.m)?;
                let t = cantor_fup_table(&family, &cond, &cfg.radii, &cfg.ns())?;
                emit_json(cli, &serde_json::to_value(&t)?)?;
            }
            BoundsCmd::Improvement { count } => {
                let grid: Vec<f64> = (1..=*count).map(|i| 10.0 * i as f64 / *count as f64).collect();
                let rep = check_improvement(&grid);
                emit_json(cli, &serde_json::to_value(&rep)?)?;
                return Ok(rep.pass);
            }
        },
        Command::Ops(c) => match c {
            OpsCmd::RadialSpectrum { radius, m, alphabet, n, top } => {
                let spec = RadialCantorSpec::new(1, *radius, *m, alphabet.clone(), *n)?;
                let s = daubechies_radial_spectrum(&spec, 0)?;
                emit_json(
                    cli,
                    &json!({
                        "norm": s.norm(),
                        "trace": s.trace(),
                        "volume": spec.volume(),
                        "cutoff": s.cutoff,
                        "tail_bound": s.tail_bound,
                        "argmax": s.argmax,
                        "eigenvalues": s.eigenvalues.iter().take(*top).collect::<Vec<_>>(),
                    }),
                )?;
            }
            OpsCmd::GaborNorm { spec, spacing, cap, sparsified, power, dump } => {
                let set = build_iterate(&spec.spec()?)?;
                let lattice = Lattice2d::square(1, *spacing)?;
                let r = lattice_restriction(&lattice, RestrictionSource::Product(&[set.clone(), set]))?;
                let method = if *power { EigenMethod::Power } else { EigenMethod::Lanczos };
                let g = gabor_multiplier_norm(&r, *cap, *sparsified, method)?;
                if let Some(path) = dump {
                    if r.len() > *cap {
                        return Err(FupError::MatrixCap { size: r.len(), cap: *cap }.into());
                    }
                    write_matrix_dump(std::io::BufWriter::new(std::fs::File::create(path)?), &gram_dense(&r.points))?;
                }
                emit_json(cli, &serde_json::to_value(&g)?)?;
            }
            OpsCmd::Verify { suites } => {
                let sel: Vec<String> = match suites {
                    None => default_suites(),
                    Some(v) => v.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
                };
                let rep = run_property_suites(&sel, seed)?;
                emit_json(cli, &serde_json::to_value(&rep)?)?;
                return Ok(rep.pass);
            }
        },
        Command::Run { experiment } => {
            let mut set = cli.set.clone();
            if let Some(s) = cli.seed {
                set.push(format!("seed={s}"));
            }
            let cfg = ExperimentConfig::resolve(experiment.as_deref(), cli.config.as_deref(), &set)?;
            let (csv, pass) = run_experiment(&cfg)?;
            let out = cli.out.clone().or_else(|| cfg.out.clone().map(PathBuf::from));
            match out {
                Some(p) => std::fs::write(p, csv)?,
                None => print!("{csv}"),
            }
            return Ok(pass);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
