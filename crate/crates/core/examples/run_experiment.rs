//! Builds an experiment config in code, runs it, and writes the reports and
//! artifacts the `framelab` binary would produce.

use framelab::runner::{run, Analysis, ExperimentConfig, SystemSpec};

fn main() -> framelab::Result<()> {
    let mut config = ExperimentConfig::new(
        SystemSpec::Heis { b: [2, 1, 1, 1], k: 1 },
        vec![Analysis::Autonomy, Analysis::Classify, Analysis::Lyapunov],
    );
    config.seed = 42;
    let dir = std::env::temp_dir().join("framelab_example_run");
    config.output_dir = Some(dir.clone());

    let report = run(&config, true)?;
    report.write(&dir)?;
    for rec in &report.analyses {
        println!("{:<10} {:?}", rec.analysis.name(), rec.status);
    }
    for art in &report.artifacts {
        println!("artifact {} ({} bytes)", art.path, art.bytes);
    }
    println!("passed: {}, reports in {}", report.passed, dir.display());
    println!("{}", report.to_normalized_json()?.lines().take(12).collect::<Vec<_>>().join("\n"));
    Ok(())
}
