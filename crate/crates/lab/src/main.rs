use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semiperiodic_core::thresholds::{format_rational, Exponent};
use semiperiodic_core::threshold_table;
use semiperiodic_lab::plot::render_svg;
use semiperiodic_lab::{run_experiment, ExperimentConfig, LabError, ScalingReport};

/// Scaling experiments for the Schrodinger flow on T^m x R^n.
#[derive(Parser)]
#[command(name = "semiperiodic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Print every regularity threshold at (p, q, r).
    Table {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        r: Option<String>,
    },
    /// Run every *.yaml config in a directory, in name order.
    Suite { dir: PathBuf },
    /// Write an SVG of a saved report next to it (or to --out).
    Plot {
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_exponent(s: &str) -> Result<Exponent, LabError> {
    s.parse::<Exponent>().map_err(|e| LabError::Config(format!("bad exponent {s:?}: {e}")))
}

fn create(path: &Path) -> Result<std::fs::File, LabError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(std::fs::File::create(path)?)
}

fn write_outputs(cfg: &ExperimentConfig, report: &ScalingReport) -> Result<(), LabError> {
    match &cfg.output.report {
        Some(path) => {
            use std::io::Write;
            writeln!(create(path)?, "{}", report.to_json()?)?;
        }
        None => println!("{}", report.to_json()?),
    }
    if let Some(path) = &cfg.output.csv {
        report.write_norms_csv(create(path)?)?;
    }
    if let Some(path) = &cfg.output.triples {
        report.write_triples_csv(create(path)?)?;
    }
    if let Some(path) = &cfg.output.plot {
        use std::io::Write;
        create(path)?.write_all(render_svg(report).as_bytes())?;
    }
    Ok(())
}

fn run_one(path: &Path) -> Result<bool, LabError> {
    let cfg = ExperimentConfig::load(path)?;
    let report = run_experiment(&cfg)?;
    write_outputs(&cfg, &report)?;
    for line in report.summary() {
        eprintln!("{line}");
    }
    Ok(report.pass)
}

fn table(m: usize, n: usize, p: &str, q: &str, r: Option<&str>) -> Result<bool, LabError> {
    if m == 0 || n == 0 {
        return Err(LabError::Config("m and n must be positive".into()));
    }
    let p = parse_exponent(p)?;
    let q = parse_exponent(q)?;
    let r = match r {
        Some(r) => parse_exponent(r)?,
        None => p,
    };
    println!("m={m} n={n} p={p} q={q} r={r}");
    for e in threshold_table(m, n).evaluate(p, q, r) {
        println!("{:<22} {:<34} {}", e.name, e.formula, format_rational(e.value));
    }
    Ok(true)
}

fn suite(dir: &Path) -> Result<bool, LabError> {
    let mut configs: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| LabError::Config(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "yaml" || x == "yml"))
        .collect();
    configs.sort();
    if configs.is_empty() {
        return Err(LabError::Config(format!("no configs in {}", dir.display())));
    }
    // Validate everything first so a typo fails fast with status 2.
    for c in &configs {
        ExperimentConfig::load(c)?;
    }
    let mut all = true;
    for c in &configs {
        eprintln!("== {}", c.display());
        all &= run_one(c)?;
    }
    Ok(all)
}

fn plot(report: &Path, out: Option<&Path>) -> Result<bool, LabError> {
    let text = std::fs::read_to_string(report)?;
    let parsed = ScalingReport::from_json(&text).map_err(|e| LabError::Config(format!("{}: {e}", report.display())))?;
    let target = out.map(Path::to_path_buf).unwrap_or_else(|| report.with_extension("svg"));
    std::fs::write(&target, render_svg(&parsed))?;
    eprintln!("wrote {}", target.display());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => run_one(config),
        Command::Table { m, n, p, q, r } => table(*m, *n, p, q, r.as_deref()),
        Command::Suite { dir } => suite(dir),
        Command::Plot { report, out } => plot(report, out.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
