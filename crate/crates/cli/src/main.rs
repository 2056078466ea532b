//! `yamabe-cone`: bounds, isoperimetric profiles, line minimization and the
//! verification suites from the command line.
//!
//! Exit codes: 0 success, 1 verification failure or I/O error, 2 bad
//! arguments or manifold spec, 3 formula not applicable, 4 no convergence.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use yamabe_cone::bounds::{compare_bounds, ricci_bounded_line_bound, write_reports_csv, write_reports_json, Confirmation};
use yamabe_cone::isoperimetry::{cone_iso_profile, sphere_iso_profile};
use yamabe_cone::variational::{minimize_line, LineProblem, MinimizeOptions, MinimizeRecord};
use yamabe_cone::verify::{self, Suite};
use yamabe_cone::{BoundReport, Catalog, CatalogEntry, EinsteinData, Error, Formula, SphericalCone};

#[derive(Parser, Debug)]
#[command(name = "yamabe-cone", version, about = "Yamabe constant bounds via spherical cones")]
struct Cli {
    /// TOML file with default values for any of the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower bounds for Y(M), Y(M x S^1) and Y(M x R) of a catalog manifold.
    Bound {
        #[command(flatten)]
        target: Target,
        /// Report only this formula (ilias, rv, corollary1.4, theorem1.2).
        #[arg(long)]
        formula: Option<String>,
        /// Also run the line minimizer and attach its value.
        #[arg(long)]
        confirm: bool,
        #[command(flatten)]
        line: LineArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Minimize the Yamabe quotient over functions of the line variable.
    Minimize {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        line: LineArgs,
        /// Relative Euler-Lagrange residual at which to stop.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Write the minimizer samples (t,value) to this CSV file.
        #[arg(long)]
        minimizer_csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Isoperimetric profile of the spherical cone next to that of the round sphere.
    Profile {
        #[command(flatten)]
        target: Target,
        /// Number of volume fractions, spaced evenly in (0, 1).
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a seeded property suite.
    Verify {
        /// curvature, symmetrization, stability, minkowski, variational or all.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct Target {
    /// Manifold spec, e.g. sphere:4, cp2, product:sphere:2,sphere:2.
    #[arg(value_name = "MANIFOLD", conflicts_with = "manifold")]
    positional: Option<String>,
    #[arg(long)]
    manifold: Option<String>,
    /// JSON catalog with extra entries [{name, n, lambda, volume, einstein, rv?}].
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LineArgs {
    /// Number of grid nodes on [-T, T].
    #[arg(long)]
    grid: Option<usize>,
    /// Half-width T of the line domain.
    #[arg(long)]
    domain: Option<f64>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

/// Values read from `--config`; flags take precedence.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    manifold: Option<String>,
    catalog: Option<PathBuf>,
    formula: Option<String>,
    confirm: Option<bool>,
    grid: Option<usize>,
    domain: Option<f64>,
    tolerance: Option<f64>,
    max_iterations: Option<usize>,
    minimizer_csv: Option<PathBuf>,
    samples: Option<usize>,
    suite: Option<String>,
    seed: Option<u64>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

/// Marks errors that should map to a specific exit code.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(Exit(code, _)) = err.downcast_ref::<Exit>() {
        return *code;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Parse { .. } => 2,
                Error::FormulaInapplicable(_) => 3,
                Error::Convergence { .. } => 4,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_config(path: Option<&Path>) -> anyhow::Result<FileConfig> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).map_err(|e| anyhow::Error::new(Exit(2, format!("config {}: {e}", path.display()))))
}

fn resolve(target: &Target, cfg: &FileConfig) -> anyhow::Result<CatalogEntry> {
    let spec = target
        .positional
        .clone()
        .or_else(|| target.manifold.clone())
        .or_else(|| cfg.manifold.clone())
        .ok_or_else(|| Exit(2, "no manifold given; pass it positionally or with --manifold".into()))?;
    let mut catalog = Catalog::builtin();
    if let Some(path) = target.catalog.as_ref().or(cfg.catalog.as_ref()) {
        let file = File::open(path).with_context(|| format!("opening catalog {}", path.display()))?;
        catalog
            .extend_from_json(file)
            .map_err(|e| Exit(2, format!("catalog {}: {e}", path.display())))?;
    }
    Ok(catalog.resolve(&spec)?)
}

fn open_output(out: &OutputArgs, cfg: &FileConfig) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out.output.as_ref().or(cfg.output.as_ref()) {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn format_of(out: &OutputArgs, cfg: &FileConfig, default: Format) -> Format {
    out.format.or(cfg.format).unwrap_or(default)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let cfg = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Bound { target, formula, confirm, line, out } => {
            let entry = resolve(target, &cfg)?;
            let confirm = (*confirm || cfg.confirm.unwrap_or(false)).then(|| Confirmation {
                half_width: line.domain.or(cfg.domain).unwrap_or(12.0),
                grid: line.grid.or(cfg.grid).unwrap_or(4001),
            });
            let mut reports = compare_bounds(&entry, confirm)?;
            if let Some(f) = formula.as_ref().or(cfg.formula.as_ref()) {
                reports = select_formula(&entry, reports, f)?;
            }
            let mut w = open_output(out, &cfg)?;
            match format_of(out, &cfg, Format::Json) {
                Format::Json => write_reports_json(&reports, &mut w)?,
                Format::Csv => write_reports_csv(&reports, &mut w)?,
            }
            w.flush()?;
            Ok(0)
        }
        Command::Minimize { target, line, tolerance, max_iterations, minimizer_csv, out } => {
            let entry = resolve(target, &cfg)?;
            if !entry.einstein {
                return Err(Error::FormulaInapplicable(format!(
                    "{} is not Einstein, so its scalar curvature is not a known constant",
                    entry.name
                ))
                .into());
            }
            let normalized = entry.normalized()?;
            let problem = LineProblem::normalized(
                entry.n,
                normalized.volume,
                line.domain.or(cfg.domain).unwrap_or(12.0),
                line.grid.or(cfg.grid).unwrap_or(4001),
            )?;
            let defaults = MinimizeOptions::default();
            let opts = MinimizeOptions {
                residual_tol: tolerance.or(cfg.tolerance).unwrap_or(defaults.residual_tol),
                max_iterations: max_iterations.or(cfg.max_iterations).unwrap_or(defaults.max_iterations),
                ..defaults
            };
            let (record, failure) = match minimize_line(&problem, &opts) {
                Ok(res) => {
                    if let Some(path) = minimizer_csv.as_ref().or(cfg.minimizer_csv.as_ref()) {
                        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                        res.minimizer.write_csv(BufWriter::new(file))?;
                    }
                    (MinimizeRecord::new(&problem, res.value, res.residual, res.iterations)?, None)
                }
                Err(e @ Error::Convergence { best_value, residual, iterations }) => {
                    (MinimizeRecord::new(&problem, best_value, residual, iterations)?, Some(e))
                }
                Err(e) => return Err(e.into()),
            };
            let mut w = open_output(out, &cfg)?;
            match format_of(out, &cfg, Format::Json) {
                Format::Json => writeln!(w, "{}", serde_json::to_string(&record)?)?,
                Format::Csv => {
                    let mut c = csv_writer(&mut w);
                    c.serialize(&record)?;
                    c.flush()?;
                }
            }
            w.flush()?;
            match failure {
                Some(e) => Err(e.into()),
                None => Ok(0),
            }
        }
        Command::Profile { target, samples, out } => {
            let entry = resolve(target, &cfg)?;
            let samples = samples.or(cfg.samples).unwrap_or(99);
            if samples < 2 {
                bail!(Exit(2, format!("--samples must be at least 2, got {samples}")));
            }
            let base = EinsteinData::new(
                entry.name.clone(),
                entry.n,
                entry.volume,
                entry.lambda,
                entry.n as f64 * entry.lambda,
                entry.einstein,
            )?;
            let cone = SphericalCone::new(&base)?;
            let mut rows = Vec::with_capacity(samples);
            for i in 1..=samples {
                let beta = i as f64 / (samples + 1) as f64;
                let c = cone_iso_profile(&cone, beta)?;
                let s = sphere_iso_profile(entry.n + 1, beta)?;
                rows.push(ProfileRow { beta, cone_perimeter: c, sphere_perimeter: s, abs_diff: (c - s).abs() });
            }
            let mut w = open_output(out, &cfg)?;
            match format_of(out, &cfg, Format::Csv) {
                Format::Csv => {
                    let mut c = csv_writer(&mut w);
                    for r in &rows {
                        c.serialize(r)?;
                    }
                    c.flush()?;
                }
                Format::Json => {
                    for r in &rows {
                        writeln!(w, "{}", serde_json::to_string(r)?)?;
                    }
                }
            }
            w.flush()?;
            Ok(0)
        }
        Command::Verify { suite, seed, out } => {
            let name = suite.as_ref().or(cfg.suite.as_ref()).map_or("all", |s| s.as_str());
            let suite: Suite = name.parse().map_err(|_| {
                Exit(2, format!("unknown suite {name:?}; expected curvature, symmetrization, stability, minkowski, variational or all"))
            })?;
            let seed = seed.or(cfg.seed).unwrap_or(42);
            let results = verify::run(suite, seed);
            let mut w = open_output(out, &cfg)?;
            match format_of(out, &cfg, Format::Json) {
                Format::Json => {
                    for r in &results {
                        writeln!(w, "{}", serde_json::to_string(r)?)?;
                    }
                }
                Format::Csv => {
                    let mut c = csv_writer(&mut w);
                    c.write_record(["suite", "check", "passed", "trials", "worst", "tolerance"])?;
                    for r in &results {
                        c.write_record([
                            r.suite.clone(),
                            r.check.clone(),
                            r.passed.to_string(),
                            r.trials.to_string(),
                            r.worst.map_or(String::new(), |x| x.to_string()),
                            r.tolerance.to_string(),
                        ])?;
                    }
                    c.flush()?;
                }
            }
            w.flush()?;
            match results.iter().find(|r| !r.passed) {
                Some(first) => {
                    let detail = json!({"suite": first.suite, "check": first.check, "counterexample": first.counterexample});
                    eprintln!("verification failed: {detail}");
                    Ok(1)
                }
                None => Ok(0),
            }
        }
    }
}

#[derive(Serialize)]
struct ProfileRow {
    beta: f64,
    cone_perimeter: f64,
    sphere_perimeter: f64,
    abs_diff: f64,
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::Writer::from_writer(w)
}

fn select_formula(entry: &CatalogEntry, reports: Vec<BoundReport>, name: &str) -> anyhow::Result<Vec<BoundReport>> {
    let formula: Formula = serde_json::from_value(json!(name)).map_err(|_| {
        Exit(2, format!("unknown formula {name:?}; expected ilias, rv, corollary1.4 or theorem1.2"))
    })?;
    let kept: Vec<BoundReport> = reports.into_iter().filter(|r| r.formula == formula).collect();
    if kept.is_empty() && formula == Formula::RicciBounded {
        return Ok(vec![ricci_bounded_line_bound(entry)?]);
    }
    if kept.is_empty() {
        let why = match formula {
            Formula::Rv => format!("Rv is not known for {}", entry.name),
            Formula::EinsteinCircle => format!("{} is not Einstein", entry.name),
            Formula::RicciBounded => unreachable!("computed directly above"),
            Formula::Ilias => format!("no Ilias bound for {}", entry.name),
        };
        return Err(Error::FormulaInapplicable(why).into());
    }
    Ok(kept)
}
