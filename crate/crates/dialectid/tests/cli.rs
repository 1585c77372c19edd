//! Binary-level checks: exit codes, stage sequencing across separate
//! invocations, flag overrides, and the manifest cache env var.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dialectid"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(
        &path,
        r#"
seed = 31
output_dir = "out"

[synth]
regions = 3
constructions_per_region = 2
probability = 0.05
train = 10
dev = 4
test = 4
words_per_sample = 120

[classify]
c_grid = [1.0]

[unmasking]
rounds = 1
"#,
    )
    .unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn run_executes_all_stages_and_then_skips() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());

    let first = bin().arg("run").arg("--config").arg(&config).output().unwrap();
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let text = stdout(&first);
    for stage in ["synth", "featurize", "train", "eval", "density", "unmask", "similarity"] {
        assert!(text.contains(&format!("{stage}: done")), "missing {stage} in:\n{text}");
    }
    assert!(dir.path().join("out/report/cxg_report.csv").exists());

    let second = bin().arg("run").arg("--config").arg(&config).output().unwrap();
    assert!(second.status.success());
    assert!(stdout(&second).contains("synth: up to date"));
}

#[test]
fn stages_compose_across_separate_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());

    for (command, artifact) in [
        ("synth", "out/samples.ndjson"),
        ("featurize", "out/vectors/cxg.txt"),
        ("train", "out/models/cxg.json"),
        ("eval", "out/report/cxg_confusion.csv"),
        ("similarity", "out/report/cxg_similarity.csv"),
    ] {
        let output = bin().arg(command).arg("--config").arg(&config).output().unwrap();
        assert!(
            output.status.success(),
            "{command}: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        assert!(dir.path().join(artifact).exists(), "{command} missed {artifact}");
    }
}

#[test]
fn out_of_order_stage_fails_with_stage_tag_and_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let output = bin().arg("train").arg("--config").arg(&config).output().unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("stage train"), "{err}");
}

#[test]
fn missing_config_file_is_a_clean_error() {
    let output = bin().arg("run").arg("--config").arg("/nonexistent/run.toml").output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"));
}

#[test]
fn seed_override_changes_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let samples = dir.path().join("out/samples.ndjson");

    assert!(bin().arg("synth").arg("--config").arg(&config).status().unwrap().success());
    let baseline = std::fs::read_to_string(&samples).unwrap();

    assert!(bin()
        .args(["synth", "--seed", "99"])
        .arg("--config")
        .arg(&config)
        .status()
        .unwrap()
        .success());
    assert_ne!(std::fs::read_to_string(&samples).unwrap(), baseline);
}

#[test]
fn unmask_rounds_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    assert!(bin().args(["run", "--jobs", "2"]).arg("--config").arg(&config).status().unwrap().success());

    let output = bin()
        .args(["unmask", "--rounds", "3"])
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert!(output.status.success());
    let curve = std::fs::read_to_string(dir.path().join("out/report/unmasking.csv")).unwrap();
    // Header plus up to rounds+1 points (fewer if the space exhausts).
    assert!(curve.lines().count() <= 5);
    assert!(curve.lines().count() >= 3);
}

#[test]
fn cache_env_var_moves_the_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let config = write_config(dir.path());

    let output = bin()
        .arg("synth")
        .arg("--config")
        .arg(&config)
        .env("DIALECTID_CACHE", &cache)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    assert!(cache.join("synth.json").exists());
    assert!(!dir.path().join("out/manifests/synth.json").exists());

    // Same cache, same config: the second invocation is a no-op.
    let again = bin()
        .arg("synth")
        .arg("--config")
        .arg(&config)
        .env("DIALECTID_CACHE", &cache)
        .output()
        .unwrap();
    assert!(stdout(&again).contains("synth: up to date"));
}
