use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fell_core::conv::{run_verification, VerificationReport, VerifySpec};
use fell_core::ktheory::{solve_six_term, TwoStrataSes};
use fell_core::scenario::{fmt_num, run_scenario, ScenarioName, ScenarioReport, ScenarioSpec};
use serde_json::{json, Value};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "fell-lab",
    version,
    about = "Fell algebra examples: scenarios, K-theory and projection checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named example end to end.
    Example {
        /// aab-ab, broken-heart, broken-heart-wedge, twisted-sphere or pinch.
        name: String,
        /// Scenario parameter, repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// K-theory of a two-strata extension.
    Ktheory {
        #[command(subcommand)]
        command: KtheoryCommand,
    },
    /// Check that an element is a projection.
    Verify {
        file: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// List scenarios and their parameters.
    List,
}

#[derive(Subcommand, Debug)]
enum KtheoryCommand {
    /// Solve the six-term sequence described by a JSON file.
    Solve {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match cli.command {
        Command::Example { name, params, json } => example(&name, &params, json),
        Command::Ktheory {
            command: KtheoryCommand::Solve { file, json },
        } => ktheory_solve(&file, json),
        Command::Verify {
            file,
            samples,
            tol,
            json,
        } => verify(&file, samples, tol, json),
        Command::List => {
            let mut s = String::new();
            for n in ScenarioName::ALL {
                let _ = writeln!(s, "{n}");
                for p in n.parameters() {
                    let _ = writeln!(
                        s,
                        "  {:<8} default {:<6} range {}",
                        p.name, p.default, p.range
                    );
                }
            }
            emit(&s);
            ExitCode::SUCCESS
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("fell-lab: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn read(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn example(name: &str, params: &[String], json: bool) -> ExitCode {
    let spec = match ScenarioSpec::parse(name, params) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let report = match run_scenario(&spec) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    if json {
        emit(&json_text(
            serde_json::to_value(&report).expect("report serializes"),
        ));
    } else {
        emit(&scenario_text(&report));
    }
    ExitCode::from(report.exit_code() as u8)
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => fmt_num(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn scenario_text(r: &ScenarioReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario {}", r.scenario);
    if let Ok(Value::Object(params)) = serde_json::to_value(&r.parameters) {
        let parts: Vec<String> = params
            .iter()
            .map(|(k, v)| format!("{k}={}", value_text(v)))
            .collect();
        let _ = writeln!(s, "parameters {}", parts.join(" "));
    }
    for c in &r.checks {
        let _ = writeln!(
            s,
            "{}  {}: expected {}, observed {} [{}]",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.expected,
            c.observed,
            c.source
        );
    }
    for (k, v) in &r.flags {
        let _ = writeln!(s, "flag {k} = {v}");
    }
    if let Some(v) = &r.verification {
        s.push_str(&verification_text(v));
    }
    let _ = writeln!(s, "result {}", if r.passed { "PASS" } else { "FAIL" });
    s
}

fn verification_text(v: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "max_idempotency_defect {}",
        fmt_num(v.max_idempotency_defect)
    );
    let _ = writeln!(
        s,
        "max_selfadjoint_defect {}",
        fmt_num(v.max_selfadjoint_defect)
    );
    let _ = writeln!(s, "fullness_floor {}", fmt_num(v.fullness_floor));
    let _ = writeln!(s, "samples_used {}", v.samples_used);
    let _ = writeln!(s, "tolerance {}", fmt_num(v.tolerance));
    for d in &v.continuity_defects {
        let _ = writeln!(
            s,
            "continuity {} / {}: defect {}, escaping {} {}",
            d.class,
            d.path,
            fmt_num(d.defect),
            fmt_num(d.escaping),
            if d.passed { "pass" } else { "fail" }
        );
    }
    s
}

fn json_text(v: Value) -> String {
    format!(
        "{}\n",
        serde_json::to_string_pretty(&v).expect("report serializes")
    )
}

fn ktheory_solve(path: &Path, json: bool) -> ExitCode {
    let text = match read(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let ses: TwoStrataSes = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => return usage(format!("{}: {e}", path.display())),
    };
    match solve_six_term(&ses) {
        Ok((k0, k1)) => {
            if json {
                emit(&format!(
                    "{}\n",
                    json!({ "k0": k0.to_string(), "k1": k1.to_string() })
                ));
            } else {
                emit(&format!("K0 = {k0}, K1 = {k1}\n"));
            }
            ExitCode::SUCCESS
        }
        Err(e) => usage(e),
    }
}

fn verify(path: &Path, samples: Option<usize>, tol: Option<f64>, json: bool) -> ExitCode {
    let text = match read(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let spec: VerifySpec = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => return usage(format!("{}: {e}", path.display())),
    };
    let report = match run_verification(&spec, samples, tol) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    if json {
        emit(&json_text(
            serde_json::to_value(&report).expect("report serializes"),
        ));
    } else {
        emit(&format!(
            "{}result {}\n",
            verification_text(&report),
            if report.passed { "PASS" } else { "FAIL" }
        ));
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
