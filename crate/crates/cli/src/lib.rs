//! Subcommand implementations for the `replica` binary. Each command writes
//! its report to the given writer and returns the process exit code.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use replica_core::experiment::execute_run;
use replica_core::golden;
use replica_core::{
    evaluate, fitness, load_config, parse_genome, render_infix, run_experiment, Environment, EvalResult,
    ExperimentConfig,
};

pub const EXIT_OK: u8 = 0;
/// Invalid genome or failed reproduction.
pub const EXIT_DOMAIN: u8 = 1;
/// Bad arguments or configuration.
pub const EXIT_USAGE: u8 = 2;

pub fn cmd_eval(out: &mut impl Write, err: &mut impl Write, genome: &str, inputs: &[i64], target: i64) -> io::Result<u8> {
    let env = match Environment::new(inputs.to_vec(), target) {
        Ok(env) => env,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let g = match parse_genome(genome, &env) {
        Ok(g) => g,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let fit = fitness(&g, &env);
    match evaluate(&g, &env) {
        EvalResult::Valid { value, consumed } => {
            let infix = render_infix(&g, &env).expect("valid genomes render");
            writeln!(out, "value={value} consumed={consumed} fitness={fit} infix={infix}")?;
            Ok(EXIT_OK)
        }
        EvalResult::Invalid(reason) => {
            writeln!(out, "invalid reason={reason} fitness={fit}")?;
            Ok(EXIT_DOMAIN)
        }
    }
}

fn load(err: &mut impl Write, path: &Path, output: Option<PathBuf>) -> io::Result<Option<ExperimentConfig>> {
    match load_config(path) {
        Ok(mut cfg) => {
            if let Some(dir) = output {
                cfg.output_dir = dir;
            }
            Ok(Some(cfg))
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            Ok(None)
        }
    }
}

/// One run with `seed` (default: the config's base seed), artifacts under
/// `<output_dir>/seed_<seed>`.
pub fn cmd_run(
    out: &mut impl Write,
    err: &mut impl Write,
    config: &Path,
    seed: Option<u64>,
    output: Option<PathBuf>,
) -> io::Result<u8> {
    let Some(cfg) = load(err, config, output)? else {
        return Ok(EXIT_USAGE);
    };
    let seed = seed.unwrap_or(cfg.base_seed);
    let dir = cfg.output_dir.join(format!("seed_{seed}"));
    match execute_run(&cfg, 0, seed, &dir) {
        Ok((outcome, _)) => {
            let c = outcome.classification;
            let first = c
                .generation_of_first_optimum
                .map_or_else(|| "none".to_string(), |g| g.to_string());
            writeln!(out, "seed={seed}")?;
            writeln!(out, "classification={}", c.behavior)?;
            writeln!(out, "first_optimum={first}")?;
            writeln!(out, "distinct_genomes={}", c.terminal_diversity)?;
            writeln!(out, "artifacts={}", dir.display())?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            Ok(EXIT_DOMAIN)
        }
    }
}

pub fn cmd_experiment(out: &mut impl Write, err: &mut impl Write, config: &Path, output: Option<PathBuf>) -> io::Result<u8> {
    let Some(cfg) = load(err, config, output)? else {
        return Ok(EXIT_USAGE);
    };
    match run_experiment(&cfg) {
        Ok(summary) => {
            for r in &summary.runs {
                let first = r
                    .classification
                    .generation_of_first_optimum
                    .map_or_else(|| "none".to_string(), |g| g.to_string());
                writeln!(
                    out,
                    "run={} seed={} classification={} first_optimum={first} distinct_genomes={}",
                    r.run, r.seed, r.classification.behavior, r.classification.terminal_diversity
                )?;
            }
            writeln!(out, "fraction_converged={}", summary.fraction_converged)?;
            writeln!(out, "fraction_oscillating={}", summary.fraction_oscillating)?;
            writeln!(out, "fraction_with_optimum={}", summary.fraction_with_optimum)?;
            writeln!(out, "summary={}", cfg.output_dir.join("summary").display())?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            Ok(EXIT_DOMAIN)
        }
    }
}

pub fn cmd_repro_tables(out: &mut impl Write) -> io::Result<u8> {
    let checks = golden::check_reference_tables();
    let passed = checks.iter().filter(|c| c.passed()).count();
    for c in &checks {
        let tag = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{tag} {}: {} expected={} computed={}",
            c.label, c.program, c.expected, c.computed
        )?;
    }
    writeln!(out, "{passed}/{} checks passed", checks.len())?;
    Ok(if passed == checks.len() { EXIT_OK } else { EXIT_DOMAIN })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(genome: &str) -> (u8, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cmd_eval(&mut out, &mut err, genome, &[10, 20, 30], 100).unwrap();
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_reports() {
        let (code, out, _) = eval("* 10 10");
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "value=100 consumed=3 fitness=0 infix=10*10\n");

        let (code, out, _) = eval("+ / 20 30 / * - 30 20 10 / * 20 30 10");
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("value=1 consumed=15 fitness=99 "), "{out}");

        let (code, out, _) = eval("+ 10");
        assert_eq!(code, EXIT_DOMAIN);
        assert_eq!(out, "invalid reason=Incomplete fitness=INF\n");
    }

    #[test]
    fn eval_parse_errors_name_token_and_position() {
        let (code, _, err) = eval("* 10 40");
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("`40`") && err.contains("position 2"), "{err}");
        let (code, _, err) = eval("* 10 %");
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("`%`") && err.contains("position 2"), "{err}");
    }

    #[test]
    fn repro_tables_all_pass() {
        let mut out = Vec::new();
        assert_eq!(cmd_repro_tables(&mut out).unwrap(), EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        assert!(text.ends_with("11/11 checks passed\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 11);
    }

    #[test]
    fn missing_config_is_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cmd_run(&mut out, &mut err, Path::new("/no/such/file.toml"), None, None).unwrap();
        assert_eq!(code, EXIT_USAGE);
        assert!(String::from_utf8(err).unwrap().contains("/no/such/file.toml"));
    }
}
