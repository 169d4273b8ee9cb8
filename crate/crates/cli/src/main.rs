use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cml_arm::experiment::{cmd_configs, cmd_experiment, cmd_reach, cmd_solve};
use cml_arm::{Error, ExperimentConfig, MethodSelection, Pipeline};

/// Robot arm control with cognitive map learners.
#[derive(Debug, Parser)]
#[command(name = "cml-arm", version)]
struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// resonator, hopfield or both.
    #[arg(long, global = true)]
    method: Option<MethodSelection>,
    /// 2d or 3d-gripper.
    #[arg(long, global = true)]
    pipeline: Option<Pipeline>,
    /// Number of sampled targets.
    #[arg(long, global = true)]
    targets: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate attainable points and grid coverage.
    Reach,
    /// Solve a single target.
    Solve {
        /// "x,y" for 2d, "x,y,z" for 3d-gripper.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        target: Point,
    },
    /// Solve sampled targets with each method.
    Experiment,
    /// Count distinct accepted configurations per target.
    Configs {
        /// Factorizations per target.
        #[arg(long)]
        inits: Option<usize>,
    },
}

#[derive(Debug, Clone)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> Result<Point, String> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("{c:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if !(2..=3).contains(&coords.len()) {
        return Err("expected 2 or 3 comma-separated numbers".into());
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err("coordinates must be finite".into());
    }
    Ok(Point(coords))
}

fn load_config(cli: &Cli) -> cml_arm::Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(method) = cli.method {
        config.method = method;
    }
    if let Some(pipeline) = cli.pipeline {
        config.pipeline = pipeline;
    }
    if let Some(targets) = cli.targets {
        config.targets = targets;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Command::Configs { inits: Some(inits) } = cli.command {
        config.inits = inits;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli, config: &ExperimentConfig) -> cml_arm::Result<String> {
    Ok(match &cli.command {
        Command::Reach => serde_json::to_string_pretty(&cmd_reach(config)?)?,
        Command::Solve { target } => {
            let s = cmd_solve(config, target.0.clone())?;
            serde_json::to_string_pretty(&serde_json::json!({
                "desired_indices": s.desired_indices,
                "final_effector": s.final_effector,
                "displacement": s.displacement,
                "similarity_to_target": s.factor_result.similarity_to_target,
            }))?
        }
        Command::Experiment => serde_json::to_string_pretty(&cmd_experiment(config)?.summary)?,
        Command::Configs { .. } => serde_json::to_string_pretty(&cmd_configs(config)?)?,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_)
        | Error::InvalidDimension(_)
        | Error::InvalidCodebookSize(_)
        | Error::InvalidRange { .. }
        | Error::InvalidGraph(_)
        | Error::Toml(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli).and_then(|config| run(&cli, &config));
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
