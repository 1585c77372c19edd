//! Run the whole pipeline from a config, then run it again to show that
//! completed stages are skipped.
//!
//! The config used here enables the synthetic front end, so no external
//! corpora are needed: generation, featurizing, training, evaluation,
//! density, unmasking, and similarity all run into one output tree, each
//! stage guarded by a manifest keyed on the config and input hashes.

use dialectid::config::RunConfig;
use dialectid::pipeline;

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let mut config = RunConfig::synthetic(&dir.path().join("out"), 23);
    let synth = config.synth.as_mut().unwrap();
    synth.regions = 4;
    synth.constructions_per_region = 3;
    synth.probability = 0.03;
    synth.train = 40;
    synth.dev = 10;
    synth.test = 10;
    synth.words_per_sample = 300;
    config.classify.c_grid = vec![0.1, 1.0];
    config.unmasking.rounds = 2;

    println!("first run:");
    for outcome in pipeline::run(&config)? {
        println!("  {:<11} {}", outcome.stage, if outcome.skipped { "skipped" } else { "ran" });
    }

    println!("second run:");
    for outcome in pipeline::run(&config)? {
        assert!(outcome.skipped);
        println!("  {:<11} skipped (manifest hit)", outcome.stage);
    }

    let report = std::fs::read_to_string(config.output_dir.join("report/cxg_report.csv"))?;
    println!("\nevaluation report:\n{report}");
    Ok(())
}
