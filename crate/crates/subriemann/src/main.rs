use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subriemann::config::{Scenario, ScenarioFile, Suite};
use subriemann::{fixture, Error, Result};

/// Numerical verification of Gauss–Bonnet limits in contact sub-Riemannian
/// three-manifolds.
#[derive(Parser)]
#[command(name = "subriemann", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Run(ScenarioArgs),
    /// List the shipped manifold and surface fixtures.
    ListFixtures,
    /// Write the cumulative profile (c, A(c)) of a surface as CSV.
    EmitProfile(ScenarioArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Manifold or surface fixture, by name or path; may be repeated.
    #[arg(long)]
    fixture: Vec<String>,
    /// Comma-separated epsilon values.
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    /// Output path prefix (the run report gets .csv and .json). Defaults to stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_depth: Option<u32>,
    /// Record wall-clock milliseconds per row (reports are then not reproducible).
    #[arg(long)]
    timing: bool,
}

impl ScenarioArgs {
    fn scenario(self, default_suite: Option<Suite>) -> Result<Scenario> {
        let mut file = match &self.config {
            Some(p) => ScenarioFile::load(p)?,
            None => ScenarioFile::default(),
        };
        if let Some(s) = self.suite.or(file.suite).or(default_suite) {
            file.suite = Some(s);
        }
        for name in &self.fixture {
            if fixture::is_manifold(name) {
                file.manifold = Some(name.clone());
            } else if fixture::is_surface(name) {
                file.surface = Some(name.clone());
            } else if !fixture::is_path(name) {
                return Err(Error::fixture(name, "no such manifold or surface fixture"));
            } else if fixture::manifold(name).is_ok() {
                file.manifold = Some(name.clone());
            } else {
                fixture::surface(name)?;
                file.surface = Some(name.clone());
            }
        }
        if let Some(e) = self.epsilon {
            file.epsilon = Some(e);
        }
        if let Some(o) = self.out {
            file.out = Some(o);
        }
        if let Some(s) = self.seed {
            file.seed = s;
        }
        if let Some(d) = self.max_depth {
            file.quadrature.max_depth = d;
        }
        file.timing |= self.timing;
        Scenario::resolve(file)
    }
}

fn run(args: ScenarioArgs) -> Result<u8> {
    let scenario = args.scenario(None)?;
    let report = subriemann::run_scenario(&scenario)?;
    match &scenario.out {
        Some(prefix) => {
            let (csv, json) = report.write_files(prefix.as_ref())?;
            let failed = report.rows.iter().filter(|r| r.failed_assertion()).count();
            let asserted = report.rows.iter().filter(|r| r.asserted()).count();
            eprintln!("{} of {asserted} asserted rows pass; wrote {} and {}", asserted - failed, csv.display(), json.display());
        }
        None => print!("{}", report.csv_string()?),
    }
    Ok(report.exit_code())
}

fn list_fixtures() -> Result<u8> {
    let mut out = std::io::stdout().lock();
    let io = |e| Error::Io { path: "<stdout>".into(), source: e };
    writeln!(out, "manifolds:").map_err(io)?;
    for m in fixture::shipped_manifolds() {
        let note = if m.contact { "" } else { " [not contact]" };
        writeln!(out, "  {:<20} {}{note}", m.name, m.description).map_err(io)?;
    }
    writeln!(out, "surfaces:").map_err(io)?;
    for s in fixture::shipped_surfaces() {
        writeln!(out, "  {:<20} chi = {:<3} {}", s.name, s.euler_characteristic, s.description).map_err(io)?;
    }
    Ok(0)
}

fn emit_profile(args: ScenarioArgs) -> Result<u8> {
    let scenario = args.scenario(Some(Suite::LimitSlope))?;
    let rows = subriemann::emit_profile(&scenario)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["c", "A"])?;
    for (c, a) in rows {
        w.write_record([c.to_string(), a.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    match &scenario.out {
        Some(p) => std::fs::write(p, bytes).map_err(|source| Error::Io { path: p.into(), source })?,
        None => std::io::stdout().write_all(&bytes).map_err(|source| Error::Io { path: "<stdout>".into(), source })?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::ListFixtures => list_fixtures(),
        Command::EmitProfile(a) => emit_profile(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_setup() { 2 } else { 1 })
        }
    }
}
