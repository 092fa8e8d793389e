use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use epikit::dot::{action_dot, dynamic_dot, epistemic_dot};
use epikit::reduction::FuzzParams;
use epikit::{
    bisimilar, load_scenario, parse_formula, render_formula, results_json, soundness_fuzz,
    translate, AxiomSchema, Model, WorldId,
};

#[derive(Parser)]
#[command(name = "epikit", version, about = "Dynamic epistemic model checking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario; exits non-zero if any fails.
    Check {
        scenario: PathBuf,
        /// Print results as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write a model as Graphviz DOT.
    Dot {
        scenario: PathBuf,
        /// A model reference such as `M0`, `M0^A0` or `D+`, or an action model name.
        model: String,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite a formula into an equivalent update-free one.
    Translate {
        formula: String,
        /// Scenario whose signature declares the actions.
        #[arg(long)]
        sig: PathBuf,
    },
    /// Check axiom schemes on random dynamic models.
    Fuzz {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated scheme ids, `sound` or `all`.
        #[arg(long, default_value = "all")]
        schemas: String,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Decide bisimilarity of two pointed models.
    Bisim {
        scenario: PathBuf,
        m1: String,
        w1: String,
        m2: String,
        w2: String,
    },
}

/// Writes to standard output; a closed pipe ends output quietly.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { scenario, json } => {
            let s = load_scenario(&scenario)?;
            let results = s.run_checks();
            if json {
                emit(&format!("{}\n", results_json(&results)))?;
            } else {
                let mut out = String::new();
                for r in &results {
                    let status = if r.pass { "PASS" } else { "FAIL" };
                    let mut line = format!(
                        "{status} [{}] {}: expected {}, got {} ({:.3} ms)",
                        r.index,
                        r.check,
                        r.expected,
                        r.actual,
                        r.elapsed.as_secs_f64() * 1e3
                    );
                    if let Some(e) = &r.error {
                        line.push_str(&format!(" error: {e}"));
                    }
                    out.push_str(&line);
                    out.push('\n');
                }
                let passed = results.iter().filter(|r| r.pass).count();
                out.push_str(&format!("{passed}/{} passed\n", results.len()));
                emit(&out)?;
            }
            Ok(if results.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Dot {
            scenario,
            model,
            output,
        } => {
            let s = load_scenario(&scenario)?;
            let text = if let Some(a) = s.action_models.get(&model) {
                action_dot(a)
            } else {
                match s.resolve(&model)? {
                    Model::Epistemic(m) => epistemic_dot(&model, &m),
                    Model::Dynamic(d) => dynamic_dot(&model, &d),
                }
            };
            match output {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => emit(&text)?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Translate { formula, sig } => {
            let s = load_scenario(&sig)?;
            let phi = parse_formula(&formula, &s.sig)?;
            emit(&format!("{}\n", render_formula(&translate(&phi, &s.sig)?)))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuzz {
            trials,
            seed,
            schemas,
            json,
        } => {
            let schemas = AxiomSchema::parse_list(&schemas)?;
            let report = soundness_fuzz(&schemas, trials, &FuzzParams::default(), seed)?;
            if json {
                emit(&format!("{}\n", serde_json::to_string_pretty(&report)?))?;
            } else {
                emit(&report.to_string())?;
                let mut seen = Vec::new();
                for schema in &schemas {
                    if !seen.contains(&schema.id()) {
                        seen.push(schema.id());
                        eprintln!("{schema}: {} failures", report.failures_for(*schema));
                    }
                }
                eprintln!(
                    "{} trials, {} instances, {} failures",
                    report.trials,
                    report.instances,
                    report.failures.len()
                );
            }
            let unsound = schemas
                .iter()
                .filter(|s| s.is_sound())
                .any(|s| report.failures_for(*s) > 0);
            Ok(if unsound {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Bisim {
            scenario,
            m1,
            w1,
            m2,
            w2,
        } => {
            let s = load_scenario(&scenario)?;
            let world = |w: &str| -> Result<WorldId> {
                match w.parse() {
                    Ok(id) => Ok(id),
                    Err(_) => bail!("bad world name `{w}`"),
                }
            };
            let left = s.resolve(&m1)?;
            let right = s.resolve(&m2)?;
            let result = bisimilar(
                left.epistemic(),
                &world(&w1)?,
                right.epistemic(),
                &world(&w2)?,
            )?;
            emit(&format!("{result}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
