//! Fully resolved run requests and their execution.
//!
//! A [`Request`] holds everything a command needs after the configuration
//! file, overrides and flags have been merged, so running it again (from a
//! [`RunManifest`](crate::manifest::RunManifest)) reproduces the output bytes.

use qtm_core::search::{run_search, GridSpec, SearchSpec};
use qtm_core::sweep::{resonance_lines, run_sweep, SweepSpec};
use qtm_core::transistor::scan;
use qtm_core::{evaluate_point, MachineConfig, ModeReport, Temperatures, ValidationPolicy};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Result;
use crate::format::{self, fmt_f64, Format};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Request {
    Point {
        config: MachineConfig,
        policy: ValidationPolicy,
    },
    Sweep {
        spec: SweepSpec,
        format: Format,
    },
    Transistor {
        config: MachineConfig,
        omega: GridSpec,
        threshold: f64,
        step: f64,
        policy: ValidationPolicy,
        format: Format,
    },
    Search {
        spec: SearchSpec,
    },
}

impl Request {
    pub fn name(&self) -> &'static str {
        match self {
            Request::Point { .. } => "point",
            Request::Sweep { .. } => "sweep",
            Request::Transistor { .. } => "transistor",
            Request::Search { .. } => "search",
        }
    }
}

/// What a run produces: the file contents plus human-readable notes.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    /// Bytes for the output file.
    pub output: String,
    /// Short report for the terminal.
    pub summary: String,
    pub warnings: Vec<String>,
}

/// Executes a request on the current rayon pool.
pub fn execute(request: &Request) -> Result<Rendered> {
    match request {
        Request::Point { config, policy } => point(config, policy),
        Request::Sweep { spec, format } => sweep(spec, *format),
        Request::Transistor {
            config,
            omega,
            threshold,
            step,
            policy,
            format,
        } => transistor(config, *omega, *threshold, *step, policy, *format),
        Request::Search { spec } => search(spec),
    }
}

/// Executes a request on a dedicated pool of `threads` workers (the global pool when `None`).
pub fn execute_with_threads(request: &Request, threads: Option<usize>) -> Result<Rendered> {
    match threads {
        None => execute(request),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| crate::error::CliError::Runtime(format!("cannot start {n} workers: {e}")))?;
            pool.install(|| execute(request))
        }
    }
}

fn point(config: &MachineConfig, policy: &ValidationPolicy) -> Result<Rendered> {
    let warnings = config.validate(policy)?;
    let report = ModeReport::new(evaluate_point(config)?, &Temperatures::from(config))?;
    let p = &report.point;
    let doc = json!({
        "version": VERSION,
        "config": config,
        "j_hot": format::json_f64(p.j_hot),
        "j_cold": format::json_f64(p.j_cold),
        "j_mid": format::json_f64(p.j_mid),
        "power": format::json_f64(p.power),
        "entropy_rate": format::json_f64(p.entropy_rate),
        "entropy_pos": format::json_f64(p.entropy_pos),
        "entropy_neg": format::json_f64(p.entropy_neg),
        "mode": report.mode,
        "phi": format::json_f64(report.exergy),
        "warnings": warnings,
    });
    let summary = [
        ("J_h", p.j_hot),
        ("J_c", p.j_cold),
        ("J_m", p.j_mid),
        ("P", p.power),
        ("entropy rate", p.entropy_rate),
        ("phi", report.exergy),
    ]
    .iter()
    .map(|(k, v)| format!("{k:>13} = {}\n", fmt_f64(*v)))
    .chain(std::iter::once(format!("{:>13} = {}\n", "mode", report.mode)))
    .collect();
    Ok(Rendered {
        output: format::pretty(&doc)?,
        summary,
        warnings: warnings.iter().map(|w| w.to_string()).collect(),
    })
}

fn sweep(spec: &SweepSpec, fmt: Format) -> Result<Rendered> {
    let warnings = spec.template.validate(&spec.policy).map(|w| w.iter().map(|w| w.to_string()).collect());
    let result = run_sweep(spec)?;
    let errors = result.cells.iter().filter(|c| c.is_error()).count();
    let modes: Vec<&str> = result.distinct_modes().iter().map(|m| m.as_str()).collect();
    let mut summary = format!(
        "{} cells, {} invalid; modes: {}\n",
        result.cells.len(),
        errors,
        if modes.is_empty() { "none".to_string() } else { modes.join(", ") }
    );
    if let Ok(lines) = resonance_lines(spec) {
        summary.push_str(&format!(
            "hot resonance: hot.center = {} + drive_freq\n",
            fmt_f64(lines.hot.intercept)
        ));
        if let Some(c) = lines.cold {
            summary.push_str(&format!(
                "cold resonance: hot.center = {} - drive_freq\n",
                fmt_f64(c.intercept)
            ));
        }
    }
    let output = match fmt {
        Format::Csv => format::sweep_csv(&result)?,
        Format::Json => format::sweep_json(&result, VERSION)?,
    };
    Ok(Rendered {
        output,
        summary,
        // The template itself may sit outside the swept region's validity; cells carry their own errors.
        warnings: warnings.unwrap_or_default(),
    })
}

fn transistor(
    config: &MachineConfig,
    omega: GridSpec,
    threshold: f64,
    step: f64,
    policy: &ValidationPolicy,
    fmt: Format,
) -> Result<Rendered> {
    let warnings = config.validate(policy)?;
    let result = scan(config, &omega.values(), threshold, step)?;
    let mut summary = format!("{} windows with r, g > {}\n", result.windows.len(), fmt_f64(threshold));
    for w in &result.windows {
        summary.push_str(&format!(
            "  drive_freq {} .. {} (width {}), min r {}, g {} .. {}{}\n",
            fmt_f64(w.omega_min),
            fmt_f64(w.omega_max),
            fmt_f64(w.width()),
            fmt_f64(w.min_r),
            fmt_f64(w.min_g),
            fmt_f64(w.max_g),
            if w.has_unreliable_gain { " (contains unreliable gain)" } else { "" }
        ));
    }
    let output = match fmt {
        Format::Csv => format::transistor_csv(&result)?,
        Format::Json => format::transistor_json(
            &result,
            json!({ "version": VERSION, "config": config, "omega": omega, "threshold": threshold, "step": step }),
        )?,
    };
    Ok(Rendered {
        output,
        summary,
        warnings: warnings.iter().map(|w| w.to_string()).collect(),
    })
}

fn search(spec: &SearchSpec) -> Result<Rendered> {
    let outcome = run_search(spec)?;
    let mut warnings = Vec::new();
    if outcome.candidates.is_empty() {
        warnings.push("no feasible configuration in the search space".to_string());
    }
    let mut summary = format!(
        "{} configurations evaluated, {} feasible\n",
        outcome.evaluated, outcome.feasible
    );
    for (i, c) in outcome.candidates.iter().enumerate() {
        let params: Vec<String> = c
            .params
            .iter()
            .map(|(p, v)| format!("{p}={}", fmt_f64(*v)))
            .collect();
        summary.push_str(&format!("#{} score {}: {}\n", i + 1, fmt_f64(c.score), params.join(" ")));
    }
    let output = format::search_json(&outcome, json!({ "version": VERSION, "spec": spec }))?;
    Ok(Rendered {
        output,
        summary,
        warnings,
    })
}
