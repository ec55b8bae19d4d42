//! Seeded parameter search.
//!
//! Candidates are drawn by Latin-hypercube sampling over a box of machine
//! parameters, scored in parallel, and the best few are polished by a
//! shrinking coordinate-wise grid search. For a given [`SearchSpec`]
//! (seed included) the outcome is identical on every run and thread count.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{MachineConfig, ValidationPolicy};
use crate::currents::evaluate_point;
use crate::error::{Error, Result};
use crate::modes::{classify, OperatingMode};
use crate::sweep::{linspace, richest_span};
use crate::transistor::{transistor_point, windows_from_points, TransistorWindow, DEFAULT_FD_STEP};

/// A searchable machine parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SearchParam {
    #[serde(rename = "drive_freq")]
    DriveFreq,
    #[serde(rename = "hot.temperature")]
    HotTemperature,
    #[serde(rename = "mid.temperature")]
    MidTemperature,
    #[serde(rename = "cold.temperature")]
    ColdTemperature,
    /// `T_m = T_c + offset`.
    #[serde(rename = "mid.offset")]
    MidOffset,
    #[serde(rename = "hot.center")]
    HotCenter,
    #[serde(rename = "cold.center")]
    ColdCenter,
    /// `ω_c = ω_h − Δ`.
    #[serde(rename = "detuning")]
    Detuning,
    /// Common width of both Lorentzian peaks.
    #[serde(rename = "width")]
    Width,
    #[serde(rename = "hot.kappa")]
    HotKappa,
    #[serde(rename = "cold.kappa")]
    ColdKappa,
}

impl SearchParam {
    const ALL: [SearchParam; 11] = [
        SearchParam::DriveFreq,
        SearchParam::HotTemperature,
        SearchParam::MidTemperature,
        SearchParam::ColdTemperature,
        SearchParam::MidOffset,
        SearchParam::HotCenter,
        SearchParam::ColdCenter,
        SearchParam::Detuning,
        SearchParam::Width,
        SearchParam::HotKappa,
        SearchParam::ColdKappa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SearchParam::DriveFreq => "drive_freq",
            SearchParam::HotTemperature => "hot.temperature",
            SearchParam::MidTemperature => "mid.temperature",
            SearchParam::ColdTemperature => "cold.temperature",
            SearchParam::MidOffset => "mid.offset",
            SearchParam::HotCenter => "hot.center",
            SearchParam::ColdCenter => "cold.center",
            SearchParam::Detuning => "detuning",
            SearchParam::Width => "width",
            SearchParam::HotKappa => "hot.kappa",
            SearchParam::ColdKappa => "cold.kappa",
        }
    }

    /// Relative parameters are applied after absolute ones.
    fn is_relative(self) -> bool {
        matches!(self, SearchParam::MidOffset | SearchParam::Detuning)
    }

    fn apply(self, cfg: &mut MachineConfig, v: f64) {
        match self {
            SearchParam::DriveFreq => cfg.drive_freq = v,
            SearchParam::HotTemperature => cfg.hot.temperature = v,
            SearchParam::MidTemperature => cfg.mid.temperature = v,
            SearchParam::ColdTemperature => cfg.cold.temperature = v,
            SearchParam::MidOffset => cfg.mid.temperature = cfg.cold.temperature + v,
            SearchParam::HotCenter => cfg.hot.center = v,
            SearchParam::ColdCenter => cfg.cold.center = v,
            SearchParam::Detuning => cfg.cold.center = cfg.hot.center - v,
            SearchParam::Width => {
                cfg.hot.width = v;
                cfg.cold.width = v;
            }
            SearchParam::HotKappa => cfg.hot.kappa = v,
            SearchParam::ColdKappa => cfg.cold.kappa = v,
        }
    }
}

impl fmt::Display for SearchParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SearchParam::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown search parameter `{s}`"))
    }
}

/// One dimension of the search box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub param: SearchParam,
    pub min: f64,
    pub max: f64,
    /// Sample uniformly in `log10` instead of linearly.
    #[serde(default)]
    pub log: bool,
}

impl Dimension {
    pub fn linear(param: SearchParam, min: f64, max: f64) -> Self {
        Self { param, min, max, log: false }
    }

    pub fn log(param: SearchParam, min: f64, max: f64) -> Self {
        Self { param, min, max, log: true }
    }

    /// Maps a unit-interval coordinate onto the dimension.
    fn value(&self, u: f64) -> f64 {
        if self.min == self.max {
            return self.min;
        }
        if self.log {
            let (lo, hi) = (self.min.log10(), self.max.log10());
            10f64.powf(lo + (hi - lo) * u)
        } else {
            self.min + (self.max - self.min) * u
        }
    }

    fn check(&self) -> Result<()> {
        let ok = self.min.is_finite() && self.max.is_finite() && self.max >= self.min;
        if !ok || (self.log && self.min <= 0.0) {
            return Err(Error::Domain(format!(
                "search dimension {} has invalid bounds {}..{}",
                self.param, self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Evenly spaced grid description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

/// What a search maximises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// Width of the widest window in which `r` and `g` both exceed `threshold`.
    TransistorWindow {
        omega: GridSpec,
        threshold: f64,
        /// Switch the cold coupling off.
        two_terminal: bool,
        /// Count only windows containing the hot sideband resonance `Ω = ω_h − ω₀`.
        require_resonance: bool,
    },
    /// Number of distinct modes on an `(Ω, ω_h)` map at fixed detuning, plus
    /// the number met by the richest `Ω`-range of width at most `span` at any
    /// single `ω_h`.
    ModeRichness {
        omega: GridSpec,
        hot_center: GridSpec,
        span: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub template: MachineConfig,
    pub objective: Objective,
    pub dims: Vec<Dimension>,
    pub samples: usize,
    #[serde(default = "default_rounds")]
    pub refine_rounds: usize,
    #[serde(default = "default_refine_points")]
    pub refine_points: usize,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    pub seed: u64,
    #[serde(default)]
    pub policy: ValidationPolicy,
}

fn default_rounds() -> usize {
    4
}
fn default_refine_points() -> usize {
    5
}
fn default_top_k() -> usize {
    5
}

/// Objective-specific information about a scored candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Details {
    Transistor {
        window: Option<TransistorWindow>,
    },
    Modes {
        map_modes: Vec<OperatingMode>,
        span_modes: usize,
        /// Richest `Ω`-range, absent when no mode was found.
        span: Option<ModeSpan>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpan {
    pub hot_center: f64,
    pub omega_start: f64,
    pub omega_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Parameter values in the order of [`SearchSpec::dims`].
    pub params: Vec<(SearchParam, f64)>,
    pub config: MachineConfig,
    pub score: f64,
    pub details: Details,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Best candidates, highest score first.
    pub candidates: Vec<Candidate>,
    pub evaluated: usize,
    pub feasible: usize,
}

impl SearchSpec {
    fn check(&self) -> Result<()> {
        for d in &self.dims {
            d.check()?;
        }
        if self.samples == 0 {
            return Err(Error::Domain("search needs at least one sample".into()));
        }
        if self.refine_rounds > 0 && self.refine_points < 2 {
            return Err(Error::Domain("refinement needs at least 2 points per dimension".into()));
        }
        Ok(())
    }

    /// Configuration at unit-cube coordinates `u`.
    pub fn config_at(&self, u: &[f64]) -> (Vec<(SearchParam, f64)>, MachineConfig) {
        let params: Vec<_> = self
            .dims
            .iter()
            .zip(u)
            .map(|(d, &x)| (d.param, d.value(x)))
            .collect();
        let mut cfg = self.template;
        for relative in [false, true] {
            for &(p, v) in params.iter().filter(|(p, _)| p.is_relative() == relative) {
                p.apply(&mut cfg, v);
            }
        }
        if let Objective::TransistorWindow { two_terminal: true, .. } = self.objective {
            cfg.cold.kappa = 0.0;
        }
        (params, cfg)
    }
}

/// Scores one configuration; `None` when it is infeasible.
pub fn score(cfg: &MachineConfig, objective: &Objective, policy: &ValidationPolicy) -> Option<(f64, Details)> {
    cfg.validate(policy).ok()?;
    match *objective {
        Objective::TransistorWindow {
            omega,
            threshold,
            require_resonance,
            ..
        } => {
            let points = omega
                .values()
                .into_iter()
                .map(|o| {
                    let mut c = *cfg;
                    c.drive_freq = o;
                    transistor_point(&c, DEFAULT_FD_STEP)
                })
                .collect::<Result<Vec<_>>>()
                .ok()?;
            let resonance = cfg.hot.center - cfg.wm.omega0;
            let window = windows_from_points(&points, threshold)
                .into_iter()
                .filter(|w| !require_resonance || w.contains(resonance))
                .fold(None, |best: Option<TransistorWindow>, w| match best {
                    Some(b) if b.width() >= w.width() => Some(b),
                    _ => Some(w),
                });
            Some((window.map_or(0.0, |w| w.width()), Details::Transistor { window }))
        }
        Objective::ModeRichness {
            omega,
            hot_center,
            span,
        } => {
            let omegas = omega.values();
            let detuning = cfg.detuning();
            let mut map_modes = BTreeSet::new();
            let mut best_span = (0, None);
            for wh in hot_center.values() {
                let trace: Vec<_> = omegas
                    .iter()
                    .map(|&o| {
                        let mut c = *cfg;
                        c.hot.center = wh;
                        c.cold.center = wh - detuning;
                        c.drive_freq = o;
                        let mode = c
                            .validate(policy)
                            .and_then(|_| evaluate_point(&c))
                            .and_then(|p| classify(&p))
                            .ok();
                        (o, mode)
                    })
                    .collect();
                map_modes.extend(
                    trace
                        .iter()
                        .filter_map(|(_, m)| *m)
                        .filter(|m| *m != OperatingMode::Degenerate),
                );
                let (n, a, b) = richest_span(&trace, span);
                if n > best_span.0 {
                    let span = ModeSpan {
                        hot_center: wh,
                        omega_start: a,
                        omega_end: b,
                    };
                    best_span = (n, Some(span));
                }
            }
            let score = (map_modes.len() + best_span.0) as f64;
            Some((
                score,
                Details::Modes {
                    map_modes: map_modes.into_iter().collect(),
                    span_modes: best_span.0,
                    span: best_span.1,
                },
            ))
        }
    }
}

fn latin_hypercube(n: usize, dims: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut columns = Vec::with_capacity(dims);
    for _ in 0..dims {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        let col: Vec<f64> = strata
            .into_iter()
            .map(|s| (s as f64 + rng.random::<f64>()) / n as f64)
            .collect();
        columns.push(col);
    }
    (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect()
}

struct Scored {
    u: Vec<f64>,
    score: f64,
    details: Details,
}

fn evaluate_all(spec: &SearchSpec, points: Vec<Vec<f64>>) -> Vec<Option<Scored>> {
    points
        .into_par_iter()
        .map(|u| {
            let (_, cfg) = spec.config_at(&u);
            score(&cfg, &spec.objective, &spec.policy).map(|(score, details)| Scored { u, score, details })
        })
        .collect()
}

/// Runs the search described by `spec`.
pub fn run_search(spec: &SearchSpec) -> Result<SearchOutcome> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dims = spec.dims.len();
    let samples = latin_hypercube(spec.samples, dims, &mut rng);
    let mut evaluated = samples.len();
    let scored = evaluate_all(spec, samples);
    let mut feasible: Vec<Scored> = scored.into_iter().flatten().collect();
    let mut n_feasible = feasible.len();
    // Stable sort: ties keep sampling order.
    feasible.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut seeds: Vec<Scored> = Vec::new();
    for s in feasible {
        if seeds.len() == spec.top_k {
            break;
        }
        if !seeds.iter().any(|k| same_point(spec, &k.u, &s.u)) {
            seeds.push(s);
        }
    }

    let mut polished = Vec::with_capacity(seeds.len());
    for mut best in seeds {
        let mut radius = 0.25;
        for _ in 0..spec.refine_rounds {
            for d in 0..dims {
                let trials: Vec<Vec<f64>> = linspace(-radius, radius, spec.refine_points)
                    .into_iter()
                    .map(|delta| {
                        let mut u = best.u.clone();
                        u[d] = (u[d] + delta).clamp(0.0, 1.0);
                        u
                    })
                    .collect();
                evaluated += trials.len();
                for s in evaluate_all(spec, trials).into_iter().flatten() {
                    n_feasible += 1;
                    if s.score > best.score {
                        best = s;
                    }
                }
            }
            radius *= 0.5;
        }
        polished.push(best);
    }
    polished.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut candidates: Vec<Candidate> = Vec::new();
    for s in polished {
        if candidates.iter().any(|c| {
            let (params, _) = spec.config_at(&s.u);
            c.params == params
        }) {
            continue;
        }
        let (params, config) = spec.config_at(&s.u);
        candidates.push(Candidate {
            params,
            config,
            score: s.score,
            details: s.details,
        });
    }
    Ok(SearchOutcome {
        candidates,
        evaluated,
        feasible: n_feasible,
    })
}

fn same_point(spec: &SearchSpec, a: &[f64], b: &[f64]) -> bool {
    spec.config_at(a).0 == spec.config_at(b).0
}
