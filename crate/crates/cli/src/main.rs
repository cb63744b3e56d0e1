mod args;
mod commands;
mod input;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use rayon::prelude::*;
use serde_json::{json, Value};

use args::{Cli, Common};
use commands::{Ctx, Outcome, Payload};

fn render(p: &Payload) -> String {
    match p {
        Payload::Json(v) => {
            let mut s = serde_json::to_string_pretty(v).expect("json");
            s.push('\n');
            s
        }
        Payload::Dot(d) => d.clone(),
    }
}

fn run_one(cli: &Cli, paths: &[PathBuf]) -> Result<Outcome> {
    let inputs = paths
        .iter()
        .map(|p| input::read_json(p))
        .collect::<Result<Vec<Value>>>()?;
    let ctx = Ctx {
        inputs: &inputs,
        format: cli.common.format,
        strategy: cli.common.strategy.as_deref(),
    };
    commands::run(&cli.command, &ctx)
}

/// Several files for a one-input command: each is an independent instance.
fn run_many(cli: &Cli) -> Result<Outcome> {
    let Common { input, jobs, .. } = &cli.common;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads((*jobs).max(1))
        .build()
        .context("thread pool")?;
    let results: Vec<Result<Outcome>> =
        pool.install(|| input.par_iter().map(|p| run_one(cli, std::slice::from_ref(p))).collect());
    let mut code = 0;
    let mut summary = Vec::new();
    let mut json_items = Vec::new();
    let mut dot = String::new();
    for (path, r) in input.iter().zip(results) {
        let file = path.display().to_string();
        match r {
            Ok(o) => {
                code = code.max(o.code);
                summary.push(format!("{file}: {}", o.summary));
                match o.payload {
                    Payload::Json(v) => json_items.push(json!({ "file": file, "result": v })),
                    Payload::Dot(d) => dot.push_str(&d),
                }
            }
            Err(e) => {
                code = 2;
                summary.push(format!("{file}: error: {e:#}"));
                json_items.push(json!({ "file": file, "error": format!("{e:#}") }));
            }
        }
    }
    let payload = if dot.is_empty() {
        Payload::Json(Value::Array(json_items))
    } else {
        Payload::Dot(dot)
    };
    Ok(Outcome {
        payload,
        code,
        summary: summary.join("\n"),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = if cli.common.input.len() > 1 && commands::is_single_input(&cli.command) {
        run_many(&cli)
    } else {
        run_one(&cli, &cli.common.input)
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = render(&outcome.payload);
    match &cli.common.output {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    eprintln!("{}", outcome.summary);
    ExitCode::from(outcome.code)
}
