use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use framelab::runner::{
    self, exit, Analysis, ConfigFile, ExperimentConfig, ExperimentReport, Status, REPORT_FILE,
};
use framelab::Error;
use serde_json::json;

/// Numerical laboratory for autonomous dynamical systems.
#[derive(Parser)]
#[command(name = "framelab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment(s) in a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed; overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Use the 512-wide regularity grid.
        #[arg(long)]
        heavy: bool,
        /// Write only the JSON reports, no CSV or binary artifacts.
        #[arg(long)]
        json_only: bool,
    },
    /// Print the system catalog.
    ListSystems {
        /// Emit the catalog as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write plot-ready CSV for one analysis of a stored report.
    Export {
        /// Report file or the directory containing report.json.
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        analysis: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a stored report and its artifacts.
    Verify {
        /// Report file or the directory containing report.json.
        #[arg(long)]
        report: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::NotInReport(_) | Error::Json(_) | Error::Io(_) => exit::CONFIG_ERROR,
                _ => exit::ANALYSIS_FAILED,
            }
        }
    };
    ExitCode::from(code as u8)
}

fn execute(command: Command) -> framelab::Result<i32> {
    runner::configure_threads()?;
    match command {
        Command::Run {
            config,
            out,
            seed,
            heavy,
            json_only,
        } => run(&config, out, seed, heavy, json_only),
        Command::ListSystems { json } => {
            let catalog = runner::list_systems();
            let text = if json {
                serde_json::to_string_pretty(&catalog)? + "\n"
            } else {
                let mut t = String::new();
                for e in catalog {
                    t += &format!("{}  {}\n    branch: {}\n", e.name, e.summary, e.branch);
                    for p in e.parameters {
                        let default = p.default.map(|d| format!(" = {d}")).unwrap_or_default();
                        t += &format!("    {}: {}{default}  {}\n", p.name, p.kind, p.description);
                    }
                }
                t
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            Ok(exit::PASS)
        }
        Command::Export { report, analysis, out } => {
            let path = report_file(&report);
            let rep = ExperimentReport::load(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let dir = path.parent().unwrap_or(Path::new("."));
            for p in runner::export_plot_data(&rep, dir, Analysis::parse(&analysis)?, &out)? {
                println!("{}", p.display());
            }
            Ok(exit::PASS)
        }
        Command::Verify { report } => {
            let path = report_file(&report);
            if !path.exists() {
                return Err(Error::Config(format!("{} does not exist", path.display())));
            }
            let v = runner::verify(&path)?;
            for c in &v.checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            println!("verify: {}", if v.passed { "passed" } else { "failed" });
            Ok(if v.passed { exit::PASS } else { exit::ANALYSIS_FAILED })
        }
    }
}

fn report_file(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(REPORT_FILE)
    } else {
        p.to_path_buf()
    }
}

fn run(config: &Path, out: Option<PathBuf>, seed: Option<u64>, heavy: bool, json_only: bool) -> framelab::Result<i32> {
    let file = ConfigFile::load(config)?;
    let batch = matches!(file, ConfigFile::Batch { .. });
    let mut configs: Vec<ExperimentConfig> = file.experiments();
    for c in &mut configs {
        if let Some(s) = seed {
            c.seed = s;
        }
        c.heavy |= heavy;
        c.validate()?;
    }
    if !batch {
        let mut c = configs.pop().expect("single config");
        if out.is_some() {
            c.output_dir = out;
        }
        let report = runner::run(&c, !json_only)?;
        summarize(&report);
        match &c.output_dir {
            Some(dir) => {
                report.write(dir)?;
                eprintln!("report written to {}", dir.join(REPORT_FILE).display());
            }
            None => println!("{}", report.to_json()?),
        }
        return Ok(report.exit_code());
    }
    let base = out.unwrap_or_else(|| PathBuf::from("framelab-out"));
    for (i, c) in configs.iter_mut().enumerate() {
        if c.output_dir.is_none() {
            c.output_dir = Some(base.join(format!("{i:02}-{}", c.system.name())));
        }
    }
    let batch = runner::run_batch(&configs, Some(&base), !json_only)?;
    let mut entries = Vec::new();
    for (c, r) in configs.iter().zip(&batch.reports) {
        summarize(r);
        let dir = c.output_dir.as_ref().expect("output dir assigned");
        r.write(dir)?;
        entries.push(json!({
            "system": c.system.name(),
            "dir": dir.strip_prefix(&base).unwrap_or(dir),
            "passed": r.passed,
        }));
    }
    std::fs::create_dir_all(&base)?;
    let summary = json!({"experiments": entries, "passed": batch.passed});
    std::fs::write(base.join("batch.json"), serde_json::to_string_pretty(&summary)?)?;
    eprintln!("batch summary written to {}", base.join("batch.json").display());
    Ok(batch.exit_code())
}

fn summarize(report: &ExperimentReport) {
    eprintln!("{} ({})", report.config.system.name(), report.system.framing);
    for r in &report.analyses {
        let status = match r.status {
            Status::Passed => "pass",
            Status::Failed => "FAIL",
            Status::Skipped => "skip",
        };
        let note = r.error.as_deref().or(r.gate.as_deref()).unwrap_or("");
        eprintln!("  {status} {:<17} {note}", r.analysis.name());
    }
}
