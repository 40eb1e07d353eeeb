use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use subsetspace::flow::{integrate_to_collision, FlowConfig};
use subsetspace::harness::{estimate_holder, estimate_lipschitz, sample_fset, suite_names, verify, MapId, RunConfig, Stratum};
use subsetspace::norm::Exponent;
use subsetspace::selector::SelectorConfig;
use subsetspace::{geodesic_in_larger, quasigeodesic, r2, r3, rn2, selector_retraction, FSet, Result};

#[derive(Parser)]
#[command(name = "subsetspace", version, about = "Finite subset spaces: retractions, paths, collision flow and property checks")]
struct Cli {
    /// Print wall time to stderr.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an invariant suite (or a module group, or `all`) and print its JSON report.
    Verify {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List suite identifiers.
    Suites,
    /// Apply a retraction to a set read as JSON.
    Retract {
        map: RetractMap,
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = subsetspace::retract::DEFAULT_TAU)]
        tau: f64,
        #[arg(long, default_value_t = 2048)]
        sphere_samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        eps_coll: f64,
    },
    /// Build a path between two sets given as {"x": ..., "y": ...}.
    Path {
        kind: PathKind,
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collision flow tools.
    Flow {
        #[command(subcommand)]
        command: FlowCommand,
    },
    /// Print sample `index` of a stratum as JSON.
    Sample {
        #[arg(long, default_value = "generic")]
        stratum: Stratum,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        p: Option<Exponent>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Empirical Lipschitz (or Hölder, for `holder`) ratio of a map.
    Estimate {
        map: MapId,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dump one row per pair.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArg {
    /// JSON input file; stdin when absent or `-`.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FlowCommand {
    /// Integrate to the first collision. Reads a set from --input, or
    /// samples a generic one from --n, --dim, --p and --seed.
    Run {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value = "2")]
        p: Exponent,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        eps_coll: f64,
        #[arg(long, default_value_t = 0.1)]
        theta: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: usize,
        /// CSV of accepted steps: t, delta, then coordinates.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RetractMap {
    R2,
    R3,
    Rn2,
    Selector,
    Flow,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathKind {
    Quasigeodesic,
    Geodesic,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairInput {
    x: FSet,
    y: FSet,
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => Ok(fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n"))?,
        None => writeln!(io::stdout(), "{text}")?,
    }
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_json(&fs::read_to_string(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { suite, config, out } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.timing |= cli.timing;
            let report = verify(&suite, &cfg)?;
            for c in &report.checks {
                let verdict = match (c.threshold, c.pass) {
                    (None, _) => "REPORT",
                    (Some(_), true) => "PASS",
                    (Some(_), false) => "FAIL",
                };
                eprintln!("[{verdict}] {} max={:e} threshold={:?} samples={}", c.name, c.max_ratio, c.threshold, c.samples);
            }
            emit(&report.to_json(), out.as_deref())?;
            Ok(report.passed())
        }
        Command::Suites => {
            for s in suite_names() {
                println!("{s}");
            }
            Ok(true)
        }
        Command::Retract { map, input, tau, sphere_samples, eps_coll } => {
            let x: FSet = serde_json::from_str(&read_input(input.input.as_deref())?)?;
            let selector = SelectorConfig::new(sphere_samples, 0)?;
            let out = match map {
                RetractMap::R2 => r2(&x)?,
                RetractMap::R3 => r3(&x)?,
                RetractMap::Rn2 => rn2(&x, tau, &selector)?,
                RetractMap::Selector => selector_retraction(&x, &selector),
                RetractMap::Flow => {
                    let cfg = FlowConfig { eps_coll, ..FlowConfig::default() };
                    cfg.validate()?;
                    subsetspace::holder_retraction(&x, &cfg)?
                }
            };
            emit(&serde_json::to_string(&out)?, None)?;
            Ok(true)
        }
        Command::Path { kind, input, out } => {
            let pair: PairInput = serde_json::from_str(&read_input(input.input.as_deref())?)?;
            let path = match kind {
                PathKind::Quasigeodesic => quasigeodesic(&pair.x, &pair.y)?,
                PathKind::Geodesic => geodesic_in_larger(&pair.x, &pair.y)?,
            };
            emit(&serde_json::to_string_pretty(&path)?, out.as_deref())?;
            Ok(true)
        }
        Command::Flow { command: FlowCommand::Run { input, n, dim, p, seed, eps_coll, theta, max_steps, trace } } => {
            let x = match input {
                Some(path) => serde_json::from_str(&read_input(Some(&path))?)?,
                None => {
                    let cfg = RunConfig { n, dim, p, seed, samples: 1, ..RunConfig::default() };
                    cfg.validate()?;
                    sample_fset(&cfg, Stratum::Generic, 0)
                }
            };
            let cfg = FlowConfig { eps_coll, step_safety: theta, max_steps, trace: trace.is_some(), ..FlowConfig::default() };
            cfg.validate()?;
            let res = integrate_to_collision(&x, &cfg)?;
            if let Some(path) = trace {
                let mut w = csv::Writer::from_path(path)?;
                let mut header = vec!["t".to_string(), "delta".to_string()];
                for i in 0..x.len() {
                    header.extend((0..x.dim()).map(|k| format!("u{i}_{k}")));
                }
                w.write_record(&header)?;
                for row in &res.trace {
                    let mut rec = vec![row.t.to_string(), row.min_separation.to_string()];
                    rec.extend(row.points.iter().flat_map(|q| q.iter().map(|c| c.to_string())));
                    w.write_record(&rec)?;
                }
                w.flush()?;
            }
            let summary = json!({
                "input": x,
                "collision_time": res.collision_time,
                "steps": res.steps,
                "rejected_steps": res.rejected_steps,
                "terminal": res.terminal,
                "retract": res.retract,
            });
            emit(&serde_json::to_string_pretty(&summary)?, None)?;
            Ok(true)
        }
        Command::Sample { stratum, index, config, n, dim, p, seed } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.n = n.unwrap_or(cfg.n);
            cfg.dim = dim.unwrap_or(cfg.dim);
            cfg.p = p.unwrap_or(cfg.p);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.validate()?;
            emit(&serde_json::to_string_pretty(&sample_fset(&cfg, stratum, index))?, None)?;
            Ok(true)
        }
        Command::Estimate { map, config, csv } => {
            let cfg = load_config(config.as_deref())?;
            let est = if map == MapId::Holder { estimate_holder(map, &cfg)? } else { estimate_lipschitz(map, &cfg)? };
            if let Some(path) = csv {
                est.write_csv(fs::File::create(path)?)?;
            }
            let pass = map.lipschitz_bound().is_none_or(|b| est.max_ratio <= b * (1.0 + 1e-9));
            emit(&serde_json::to_string_pretty(&est)?, None)?;
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timing = cli.timing;
    let start = Instant::now();
    let outcome = run(cli);
    if timing {
        eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    }
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
