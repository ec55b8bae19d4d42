//! Argument parsing and dispatch for the `qtm` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtm_core::search::{Dimension, GridSpec, Objective, SearchParam, SearchSpec};
use qtm_core::sweep::{Axis, Output, ParamId, SweepSpec};
use qtm_core::transistor::{DEFAULT_FD_STEP, DEFAULT_THRESHOLD};
use qtm_core::{MachineConfig, ValidationPolicy};

use crate::error::{CliError, Result};
use crate::format::Format;
use crate::input::{apply_override, load_table, machine_from_table};
use crate::manifest::{manifest_path, RunManifest};
use crate::request::{execute_with_threads, Rendered, Request};

#[derive(Debug, Parser)]
#[command(name = "qtm", version, about = "Driven three-terminal quantum thermal machine")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Machine configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration value, e.g. `--set hot.temperature=0.9`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output file; a manifest is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true, env = "QTM_THREADS")]
    pub threads: Option<usize>,
    /// Accept equal bath temperatures.
    #[arg(long, global = true)]
    pub relax_validation: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Currents, power, entropy production, mode and efficiency at one point.
    Point,
    /// One- or two-parameter map.
    Sweep(SweepArgs),
    /// Transistor figures of merit along the driving frequency.
    Transistor(TransistorArgs),
    /// Seeded parameter search.
    Search(SearchArgs),
    /// Re-run the request recorded in a manifest.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `PARAM:MIN:MAX:COUNT`, e.g. `drive_freq:0.005:0.995:201`.
    #[arg(long, value_parser = parse_axis)]
    pub axis1: Axis,
    #[arg(long, value_parser = parse_axis)]
    pub axis2: Option<Axis>,
    /// Add the transistor columns `r` and `g`.
    #[arg(long)]
    pub transistor: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct TransistorArgs {
    /// Driving-frequency grid `MIN:MAX:COUNT`.
    #[arg(long, value_parser = parse_grid, default_value = "0.005:0.995:199")]
    pub omega: GridSpec,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Relative finite-difference step.
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    pub step: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveKind {
    Transistor,
    Modes,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value = "transistor")]
    pub objective: ObjectiveKind,
    /// `PARAM:MIN:MAX` or `PARAM:MIN:MAX:log`. Repeatable.
    #[arg(long = "dim", value_parser = parse_dim, required = true)]
    pub dims: Vec<Dimension>,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 4)]
    pub refine_rounds: usize,
    #[arg(long, default_value_t = 5)]
    pub refine_points: usize,
    #[arg(long, default_value_t = 5)]
    pub top_k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Driving-frequency grid `MIN:MAX:COUNT`.
    #[arg(long, value_parser = parse_grid)]
    pub omega: Option<GridSpec>,
    /// Transistor objective: `r, g` threshold.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Transistor objective: switch the cold coupling off.
    #[arg(long)]
    pub two_terminal: bool,
    /// Transistor objective: also count windows away from the hot resonance.
    #[arg(long)]
    pub any_window: bool,
    /// Mode objective: hot-peak grid `MIN:MAX:COUNT` (detuning held fixed).
    #[arg(long, value_parser = parse_grid, default_value = "1:2:51")]
    pub hot_center: GridSpec,
    /// Mode objective: widest driving-frequency range for the switching count.
    #[arg(long, default_value_t = 0.5)]
    pub span: f64,
}

fn split_numbers(s: &str, n: usize) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != n {
        return Err(format!("expected {n} colon-separated numbers in `{s}`"));
    }
    parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    s.parse::<usize>().map_err(|e| format!("count `{s}`: {e}"))
}

pub fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let (head, count) = s.rsplit_once(':').ok_or_else(|| format!("expected MIN:MAX:COUNT, got `{s}`"))?;
    let v = split_numbers(head, 2)?;
    Ok(GridSpec {
        min: v[0],
        max: v[1],
        count: parse_count(count)?,
    })
}

pub fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    let (param, rest) = s.split_once(':').ok_or_else(|| format!("expected PARAM:MIN:MAX:COUNT, got `{s}`"))?;
    let g = parse_grid(rest)?;
    Ok(Axis::new(param.parse::<ParamId>()?, g.min, g.max, g.count))
}

pub fn parse_dim(s: &str) -> std::result::Result<Dimension, String> {
    let (param, rest) = s.split_once(':').ok_or_else(|| format!("expected PARAM:MIN:MAX[:log], got `{s}`"))?;
    let param = param.parse::<SearchParam>()?;
    let (rest, log) = match rest.strip_suffix(":log") {
        Some(r) => (r, true),
        None => (rest, false),
    };
    let v = split_numbers(rest, 2)?;
    Ok(Dimension {
        param,
        min: v[0],
        max: v[1],
        log,
    })
}

fn policy(common: &Common) -> ValidationPolicy {
    if common.relax_validation {
        ValidationPolicy::relaxed()
    } else {
        ValidationPolicy::default()
    }
}

/// Loads the machine; `drive_freq` may be omitted when the command scans it.
fn machine(common: &Common, scans_drive: bool) -> Result<MachineConfig> {
    let mut table = load_table(common.config.as_deref())?;
    for o in &common.overrides {
        apply_override(&mut table, o)?;
    }
    if scans_drive && !table.contains_key("drive_freq") {
        table.insert("drive_freq".into(), toml::Value::Float(0.5));
    }
    machine_from_table(&table)
}

fn format_for(explicit: Option<Format>, out: Option<&Path>) -> Format {
    explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    })
}

/// Turns parsed arguments into a request.
pub fn build_request(cli: &Cli) -> Result<Request> {
    let common = &cli.common;
    let request = match &cli.command {
        Command::Point => Request::Point {
            config: machine(common, false)?,
            policy: policy(common),
        },
        Command::Sweep(a) => {
            let scans = a.axis1.param == ParamId::DriveFreq || a.axis2.is_some_and(|x| x.param == ParamId::DriveFreq);
            let mut spec = SweepSpec::new(machine(common, scans)?, a.axis1, a.axis2);
            spec.policy = policy(common);
            if a.transistor {
                spec = spec.with_output(Output::Transistor);
            }
            Request::Sweep {
                spec,
                format: format_for(a.format, common.out.as_deref()),
            }
        }
        Command::Transistor(a) => Request::Transistor {
            config: machine(common, true)?,
            omega: a.omega,
            threshold: a.threshold,
            step: a.step,
            policy: policy(common),
            format: format_for(a.format, common.out.as_deref()),
        },
        Command::Search(a) => {
            let objective = match a.objective {
                ObjectiveKind::Transistor => Objective::TransistorWindow {
                    omega: a.omega.unwrap_or(GridSpec { min: 0.005, max: 0.995, count: 199 }),
                    threshold: a.threshold,
                    two_terminal: a.two_terminal,
                    require_resonance: !a.any_window,
                },
                ObjectiveKind::Modes => Objective::ModeRichness {
                    omega: a.omega.unwrap_or(GridSpec { min: 0.005, max: 0.995, count: 101 }),
                    hot_center: a.hot_center,
                    span: a.span,
                },
            };
            Request::Search {
                spec: SearchSpec {
                    template: machine(common, true)?,
                    objective,
                    dims: a.dims.clone(),
                    samples: a.samples,
                    refine_rounds: a.refine_rounds,
                    refine_points: a.refine_points,
                    top_k: a.top_k,
                    seed: a.seed,
                    policy: policy(common),
                },
            }
        }
        Command::Replay { manifest } => RunManifest::read(manifest)?.request,
    };
    Ok(request)
}

/// Writes the output and its manifest, or the output alone to stdout.
pub fn deliver(request: &Request, rendered: &Rendered, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, &rendered.output)
                .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
            RunManifest::new(request.clone(), vec![path.to_path_buf()]).write(&manifest_path(path))?;
        }
        None => std::io::stdout().lock().write_all(rendered.output.as_bytes())?,
    }
    Ok(())
}

/// Runs the parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let request = build_request(cli)?;
    let out = match (&cli.command, &cli.common.out) {
        (_, Some(p)) => Some(p.clone()),
        (Command::Replay { manifest }, None) => RunManifest::read(manifest)?.outputs.first().cloned(),
        _ => None,
    };
    if matches!(cli.command, Command::Replay { .. }) && out.is_none() {
        return Err(CliError::Validation("manifest lists no output file; pass --out".into()));
    }
    if cli.common.threads == Some(0) {
        return Err(CliError::Validation("--threads must be at least 1".into()));
    }
    let rendered = execute_with_threads(&request, cli.common.threads)?;
    for w in &rendered.warnings {
        eprintln!("warning: {w}");
    }
    deliver(&request, &rendered, out.as_deref())?;
    // Keep stdout clean when it carries the data.
    if out.is_some() {
        print!("{}", rendered.summary);
    } else {
        eprint!("{}", rendered.summary);
    }
    Ok(())
}
