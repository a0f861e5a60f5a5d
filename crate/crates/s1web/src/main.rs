use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use s1web::config::{parse_region, Mode, Param, PlotKind};
use s1web::{plot, run_suite, ConfigError, SuiteConfig};

#[derive(Parser)]
#[command(name = "s1web", version, about = "Verify the Riccati foliation and 4-web on the ruled surface over y^2 = x(x-1)(x-t)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Config file of `key = value` lines, applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Curve parameter, e.g. `2`, `2+0i`, `1+i`.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    /// Sample count of every seeded per-point check.
    #[arg(long)]
    samples: Option<usize>,
    /// Points of the curvature and hexagon sweep at `t`.
    #[arg(long)]
    curvature_points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Comma separated sweep parameters, or `none`.
    #[arg(long, allow_hyphen_values = true)]
    sweep: Option<String>,
    /// Real ranges `xmin,xmax,zmin,zmax` of the sampling box.
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    /// Certify the non-hexagonal control web in place of the 4-web.
    #[arg(long)]
    control_web: bool,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Figures to write: leaves, web, discriminant, orbits (comma separated).
    #[arg(long, value_delimiter = ',')]
    plot: Vec<String>,
    /// Directory for figures.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
}

fn build_config(args: &VerifyArgs) -> Result<SuiteConfig, ConfigError> {
    let mut c = SuiteConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        c.apply_file(&text)?;
    }
    if let Some(t) = &args.t {
        c.t = t.parse::<Param>()?;
    }
    if let Some(m) = &args.mode {
        c.mode = m.parse::<Mode>()?;
    }
    if let Some(n) = args.samples {
        c.samples = c.samples.uniform(n);
    }
    if let Some(n) = args.curvature_points {
        c.samples.curvature_points = n;
    }
    if let Some(seed) = args.seed {
        c.seed = seed;
    }
    for kv in &args.tol {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::BadValue { key: "tol".into(), value: kv.clone() })?;
        c.tol.set(k.trim(), v)?;
    }
    if let Some(s) = &args.sweep {
        c.set("sweep", s)?;
    }
    if let Some(r) = &args.region {
        c.region = parse_region(r, c.region)?;
    }
    if args.control_web {
        c.control_web = true;
    }
    if let Some(out) = &args.out {
        c.out = Some(out.clone());
    }
    if !args.plot.is_empty() {
        c.plots = args.plot.iter().map(|p| p.parse::<PlotKind>()).collect::<Result<_, _>>()?;
    }
    if let Some(d) = &args.plot_dir {
        c.plot_dir = d.clone();
    }
    c.validate()?;
    Ok(c)
}

fn verify(args: &VerifyArgs) -> ExitCode {
    let config = match build_config(args) {
        Ok(c) => c,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    let report = run_suite(&config);
    for c in &report.checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let residual = c.max_residual.map_or("-".to_string(), |r| format!("{r:.3e}"));
        eprintln!("{status} {:<40} residual {residual:>10} tol {:.1e} samples {}", c.label(), c.tolerance, c.samples);
    }
    for n in &report.notes {
        eprintln!("note: {n}");
    }
    match &config.out {
        Some(path) => {
            if let Err(err) = report.write(path) {
                eprintln!("error: {err}");
                return ExitCode::from(2);
            }
        }
        None => match report.to_json() {
            Ok(json) => print!("{json}"),
            Err(err) => {
                eprintln!("error: {err}");
                return ExitCode::from(2);
            }
        },
    }
    for kind in &config.plots {
        match plot::emit_plot(*kind, &config, &config.plot_dir) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(err) => {
                eprintln!("error: {err}");
                return ExitCode::from(2);
            }
        }
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    eprintln!("{verdict}: {} of {} checks passed", report.summary.passed, report.summary.checks);
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match &cli.command {
        Command::Verify(args) => verify(args),
    }
}
