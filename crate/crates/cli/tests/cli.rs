use std::fs;
use std::process::{Command, Output};

fn replica(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_replica")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_optimal_program() {
    let o = replica(&["eval", "* 10 10", "--inputs", "10,20,30", "--target", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "value=100 consumed=3 fitness=0 infix=10*10\n");
}

#[test]
fn eval_leading_minus_and_negative_inputs() {
    let o = replica(&["eval", "- 30 -5", "--inputs", "-5,30", "--target", "-1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "value=35 consumed=3 fitness=36 infix=30-(-5)\n");
}

#[test]
fn eval_incomplete_is_domain_failure() {
    let o = replica(&["eval", "+ 10", "--inputs", "10,20,30", "--target", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("reason=Incomplete"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let o = replica(&["eval", "* 10 10", "--inputs", "10", "--target", "1", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = replica(&["repro-tables", "--verbose"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_lists_flags() {
    let o = replica(&["run", "--help"]);
    let text = stdout(&o);
    for flag in ["--config", "--seed", "--output"] {
        assert!(text.contains(flag), "{text}");
    }
}

#[test]
fn repro_tables_passes() {
    let o = replica(&["repro-tables"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("11/11 checks passed\n"));
}

const CONFIG: &str = r#"
[eca]
model = "generational"
n_gen = 2000

[environment]
inputs = [10, 20, 30]
target = 100

[experiment]
n_runs = 2
base_seed = 5
log_stride = 10
window = 20
"#;

#[test]
fn run_is_repeatable_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    let args = ["run", "--config", cfg.to_str().unwrap(), "--seed", "9", "--output", out.to_str().unwrap()];
    let a = replica(&args);
    let b = replica(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("classification="));
    for name in ["generations.csv", "population.tsv", "meta"] {
        assert!(out.join("seed_9").join(name).exists());
    }
}

#[test]
fn zero_generation_run_fails_without_initial_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, CONFIG.replace("n_gen = 2000", "n_gen = 0")).unwrap();
    let out = dir.path().join("out");
    let o = replica(&["run", "--config", cfg.to_str().unwrap(), "--seed", "1", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let pop = fs::read_to_string(out.join("seed_1/population.tsv")).unwrap();
    let has_optimum = pop.lines().any(|l| l.starts_with("0\t"));
    if !has_optimum {
        assert!(stdout(&o).contains("classification=Failed"));
    }
}

#[test]
fn experiment_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    let o = replica(&["experiment", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("run=")).count(), 2);
    assert!(out.join("summary").exists());
    assert!(out.join("run_0/generations.csv").exists());
    assert!(out.join("run_1/population.tsv").exists());
}

#[test]
fn bad_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, CONFIG.replace("n_gen = 2000", "lambda = 0")).unwrap();
    let o = replica(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda"));
}
