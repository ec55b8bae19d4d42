//! Parallel one- and two-dimensional parameter sweeps.
//!
//! Cells are evaluated independently and collected in row-major order, so the
//! output does not depend on how many worker threads are used.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{MachineConfig, ValidationPolicy};
use crate::currents::{evaluate_point, Temperatures, ThermoPoint};
use crate::error::{Error, Result};
use crate::modes::{classify, exergy_efficiency, OperatingMode};
use crate::transistor::{check_omega_grid, transistor_point, DEFAULT_FD_STEP};

/// A sweepable machine parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamId {
    #[serde(rename = "drive_freq")]
    DriveFreq,
    #[serde(rename = "hot.center")]
    HotCenter,
    #[serde(rename = "cold.center")]
    ColdCenter,
    /// Moves `ω_h` and `ω_c` together, keeping the template detuning.
    #[serde(rename = "hot.center_locked")]
    HotCenterLocked,
    #[serde(rename = "mid.temperature")]
    MidTemperature,
    #[serde(rename = "hot.temperature")]
    HotTemperature,
    #[serde(rename = "cold.temperature")]
    ColdTemperature,
}

impl ParamId {
    pub const ALL: [ParamId; 7] = [
        ParamId::DriveFreq,
        ParamId::HotCenter,
        ParamId::ColdCenter,
        ParamId::HotCenterLocked,
        ParamId::MidTemperature,
        ParamId::HotTemperature,
        ParamId::ColdTemperature,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamId::DriveFreq => "drive_freq",
            ParamId::HotCenter => "hot.center",
            ParamId::ColdCenter => "cold.center",
            ParamId::HotCenterLocked => "hot.center_locked",
            ParamId::MidTemperature => "mid.temperature",
            ParamId::HotTemperature => "hot.temperature",
            ParamId::ColdTemperature => "cold.temperature",
        }
    }

    /// Sets this parameter on `cfg`. `detuning` is used by the locked axis.
    pub fn apply(self, cfg: &mut MachineConfig, value: f64, detuning: f64) {
        match self {
            ParamId::DriveFreq => cfg.drive_freq = value,
            ParamId::HotCenter => cfg.hot.center = value,
            ParamId::ColdCenter => cfg.cold.center = value,
            ParamId::HotCenterLocked => {
                cfg.hot.center = value;
                cfg.cold.center = value - detuning;
            }
            ParamId::MidTemperature => cfg.mid.temperature = value,
            ParamId::HotTemperature => cfg.hot.temperature = value,
            ParamId::ColdTemperature => cfg.cold.temperature = value,
        }
    }

    fn is_hot_center(self) -> bool {
        matches!(self, ParamId::HotCenter | ParamId::HotCenterLocked)
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ParamId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ParamId::ALL.iter().map(|p| p.as_str()).collect();
                format!("unknown sweep parameter `{s}` (expected one of {})", known.join(", "))
            })
    }
}

/// Evenly spaced values of one parameter, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: ParamId,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(param: ParamId, min: f64, max: f64, count: usize) -> Self {
        Self { param, min, max, count }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }

    /// Grid spacing.
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    fn check(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Domain(format!("axis {} needs at least 2 points", self.param)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::Domain(format!(
                "axis {} needs finite bounds with max > min (got {}..{})",
                self.param, self.min, self.max
            )));
        }
        Ok(())
    }
}

/// `count` evenly spaced values from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    max
                } else {
                    min + (max - min) * (i as f64 / (count - 1) as f64)
                }
            })
            .collect(),
    }
}

/// Quantities computed for every cell in addition to the currents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Currents,
    Mode,
    Exergy,
    Transistor,
}

pub fn default_outputs() -> BTreeSet<Output> {
    [Output::Currents, Output::Mode, Output::Exergy].into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub template: MachineConfig,
    pub axis1: Axis,
    #[serde(default)]
    pub axis2: Option<Axis>,
    #[serde(default = "default_outputs")]
    pub outputs: BTreeSet<Output>,
    #[serde(default)]
    pub policy: ValidationPolicy,
}

impl SweepSpec {
    pub fn new(template: MachineConfig, axis1: Axis, axis2: Option<Axis>) -> Self {
        Self {
            template,
            axis1,
            axis2,
            outputs: default_outputs(),
            policy: ValidationPolicy::default(),
        }
    }

    pub fn with_output(mut self, output: Output) -> Self {
        self.outputs.insert(output);
        self
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.count, self.axis2.map_or(1, |a| a.count))
    }

    /// Configuration of the cell at `(a1, a2)`.
    pub fn cell_config(&self, a1: f64, a2: Option<f64>) -> MachineConfig {
        let detuning = self.template.detuning();
        let mut cfg = self.template;
        self.axis1.param.apply(&mut cfg, a1, detuning);
        if let (Some(axis), Some(v)) = (self.axis2, a2) {
            axis.param.apply(&mut cfg, v, detuning);
        }
        cfg
    }

    fn check(&self) -> Result<()> {
        self.axis1.check()?;
        if let Some(a2) = self.axis2 {
            a2.check()?;
            if a2.param == self.axis1.param {
                return Err(Error::Domain(format!("both axes sweep {}", a2.param)));
            }
        }
        if !self.outputs.contains(&Output::Currents) {
            return Err(Error::Domain("sweep outputs must include currents".into()));
        }
        Ok(())
    }
}

/// One grid point of a sweep.
///
/// Cells whose parameters violate a precondition keep their place in the grid:
/// their numeric fields are NaN, `mode` is `None` and `error` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapCell {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub point: ThermoPoint,
    pub mode: Option<OperatingMode>,
    pub phi: f64,
    pub r: Option<f64>,
    pub g: Option<f64>,
    pub error: Option<String>,
}

const NAN_POINT: ThermoPoint = ThermoPoint {
    j_hot: f64::NAN,
    j_cold: f64::NAN,
    j_mid: f64::NAN,
    power: f64::NAN,
    entropy_rate: f64::NAN,
    entropy_pos: f64::NAN,
    entropy_neg: f64::NAN,
};

impl MapCell {
    fn failed(axis1: f64, axis2: Option<f64>, outputs: &BTreeSet<Output>, err: Error) -> Self {
        let transistor = outputs.contains(&Output::Transistor).then_some(f64::NAN);
        Self {
            axis1,
            axis2,
            point: NAN_POINT,
            mode: None,
            phi: f64::NAN,
            r: transistor,
            g: transistor,
            error: Some(err.to_string()),
        }
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    /// Mode label as written to CSV: the mode name, `error`, or empty when not requested.
    pub fn label(&self) -> &'static str {
        match (&self.error, self.mode) {
            (Some(_), _) => "error",
            (None, Some(m)) => m.as_str(),
            (None, None) => "",
        }
    }
}

/// Evaluates one configuration with the requested outputs.
pub fn evaluate_cell(
    cfg: &MachineConfig,
    outputs: &BTreeSet<Output>,
    policy: &ValidationPolicy,
    axis1: f64,
    axis2: Option<f64>,
) -> MapCell {
    let attempt = || -> Result<MapCell> {
        cfg.validate(policy)?;
        let point = evaluate_point(cfg)?;
        let temps = Temperatures::from(cfg);
        let mode = if outputs.contains(&Output::Mode) {
            Some(classify(&point)?)
        } else {
            None
        };
        let phi = if outputs.contains(&Output::Exergy) {
            exergy_efficiency(&point, &temps)?
        } else {
            f64::NAN
        };
        let (r, g) = if outputs.contains(&Output::Transistor) {
            let t = transistor_point(cfg, DEFAULT_FD_STEP)?;
            (Some(t.r), Some(t.g))
        } else {
            (None, None)
        };
        Ok(MapCell {
            axis1,
            axis2,
            point,
            mode,
            phi,
            r,
            g,
            error: None,
        })
    };
    attempt().unwrap_or_else(|e| MapCell::failed(axis1, axis2, outputs, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Row-major: index `i1 * n2 + i2`.
    pub cells: Vec<MapCell>,
}

impl SweepResult {
    pub fn cell(&self, i1: usize, i2: usize) -> &MapCell {
        let (_, n2) = self.spec.shape();
        &self.cells[i1 * n2 + i2]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[MapCell]> {
        let (_, n2) = self.spec.shape();
        self.cells.chunks(n2)
    }

    /// Distinct non-degenerate mode labels present in the map.
    pub fn distinct_modes(&self) -> BTreeSet<OperatingMode> {
        self.cells
            .iter()
            .filter_map(|c| c.mode)
            .filter(|m| *m != OperatingMode::Degenerate)
            .collect()
    }
}

/// Runs the sweep on the current rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.check()?;
    let a1 = spec.axis1.values();
    let a2: Vec<Option<f64>> = match spec.axis2 {
        Some(axis) => axis.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let coords: Vec<(f64, Option<f64>)> = a1
        .iter()
        .flat_map(|&x| a2.iter().map(move |&y| (x, y)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(x, y)| evaluate_cell(&spec.cell_config(x, y), &spec.outputs, &spec.policy, x, y))
        .collect();
    Ok(SweepResult {
        spec: spec.clone(),
        cells,
    })
}

/// Runs the sweep on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(spec: &SweepSpec, threads: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_sweep(spec))
}

/// A straight line `ω_h = slope·Ω + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn at(&self, omega: f64) -> f64 {
        self.slope * omega + self.intercept
    }
}

/// Sideband resonances in the `(Ω, ω_h)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceLines {
    /// `ω_h = ω₀ + Ω`.
    pub hot: Line,
    /// `ω_c = ω₀ − Ω`, i.e. `ω_h = ω₀ − Ω + Δ`. Only a line in this plane
    /// when the detuning is locked.
    pub cold: Option<Line>,
}

/// Resonance overlays for a sweep over the driving frequency and the hot peak.
///
/// ```
/// use qtm_core::sweep::{resonance_lines, Axis, ParamId, SweepSpec};
/// # use qtm_core::{LorentzianBath, MachineConfig, OhmicBath, WorkingMedium};
/// # let template = MachineConfig {
/// #     wm: WorkingMedium::default(),
/// #     hot: LorentzianBath { temperature: 0.8, center: 1.5, width: 0.05, kappa: 0.01 },
/// #     cold: LorentzianBath { temperature: 0.2, center: 0.75, width: 0.05, kappa: 0.01 },
/// #     mid: OhmicBath { temperature: 0.5, gamma_m: 0.1 },
/// #     drive_freq: 0.5,
/// # };
/// let spec = SweepSpec::new(
///     template,
///     Axis::new(ParamId::DriveFreq, 0.005, 0.995, 201),
///     Some(Axis::new(ParamId::HotCenterLocked, 1.0, 2.0, 201)),
/// );
/// let lines = resonance_lines(&spec).unwrap();
/// assert_eq!((lines.hot.slope, lines.hot.intercept), (1.0, 1.0));
/// let cold = lines.cold.unwrap();
/// assert_eq!(cold.slope, -1.0);
/// assert!((cold.intercept - 1.75).abs() < 1e-15);
/// ```
pub fn resonance_lines(spec: &SweepSpec) -> Result<ResonanceLines> {
    let axes = [Some(spec.axis1), spec.axis2];
    let params: Vec<ParamId> = axes.iter().flatten().map(|a| a.param).collect();
    let has_drive = params.contains(&ParamId::DriveFreq);
    let hot_axis = params.iter().copied().find(|p| p.is_hot_center());
    let Some(hot_axis) = hot_axis.filter(|_| has_drive) else {
        return Err(Error::Domain(
            "resonance lines need a drive_freq axis and a hot.center axis".into(),
        ));
    };
    let w0 = spec.template.wm.omega0;
    let cold = (hot_axis == ParamId::HotCenterLocked).then(|| Line {
        slope: -1.0,
        intercept: w0 + spec.template.detuning(),
    });
    Ok(ResonanceLines {
        hot: Line {
            slope: 1.0,
            intercept: w0,
        },
        cold,
    })
}

/// A maximal run of equal labels along the driving-frequency axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRun {
    pub omega_start: f64,
    pub omega_end: f64,
    /// `None` for points that could not be evaluated.
    pub mode: Option<OperatingMode>,
}

/// Run-length encoding of `(Ω, label)` samples.
pub fn run_length(samples: &[(f64, Option<OperatingMode>)]) -> Vec<ModeRun> {
    let mut runs: Vec<ModeRun> = Vec::new();
    for &(omega, mode) in samples {
        match runs.last_mut() {
            Some(run) if run.mode == mode => run.omega_end = omega,
            _ => runs.push(ModeRun {
                omega_start: omega,
                omega_end: omega,
                mode,
            }),
        }
    }
    runs
}

/// Labels along a driving-frequency grid, run-length encoded.
pub fn mode_sequence_along_omega(template: &MachineConfig, omega_grid: &[f64]) -> Result<Vec<ModeRun>> {
    Ok(run_length(&mode_samples(template, omega_grid)?))
}

fn mode_samples(template: &MachineConfig, omega_grid: &[f64]) -> Result<Vec<(f64, Option<OperatingMode>)>> {
    check_omega_grid(omega_grid, template.wm.omega0)?;
    Ok(omega_grid
        .par_iter()
        .map(|&omega| {
            let mut cfg = *template;
            cfg.drive_freq = omega;
            let mode = evaluate_point(&cfg).and_then(|p| classify(&p)).ok();
            (omega, mode)
        })
        .collect())
}

/// Largest number of distinct non-degenerate modes met by any sub-range of
/// the samples whose extent is at most `span`, with that sub-range.
pub fn richest_span(samples: &[(f64, Option<OperatingMode>)], span: f64) -> (usize, f64, f64) {
    let mut best = (0, f64::NAN, f64::NAN);
    for (i, &(start, _)) in samples.iter().enumerate() {
        let mut seen = BTreeSet::new();
        let mut end = start;
        for &(omega, mode) in &samples[i..] {
            if omega - start > span {
                break;
            }
            end = omega;
            if let Some(m) = mode.filter(|m| *m != OperatingMode::Degenerate) {
                seen.insert(m);
            }
        }
        if seen.len() > best.0 {
            best = (seen.len(), start, end);
        }
    }
    best
}

/// Labels of a single `Ω`-sweep, for use with [`richest_span`].
pub fn omega_trace(template: &MachineConfig, omega_grid: &[f64]) -> Result<Vec<(f64, Option<OperatingMode>)>> {
    mode_samples(template, omega_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{LorentzianBath, OhmicBath, WorkingMedium};

    fn template() -> MachineConfig {
        MachineConfig {
            wm: WorkingMedium::default(),
            hot: LorentzianBath {
                temperature: 0.8,
                center: 1.5,
                width: 0.05,
                kappa: 0.01,
            },
            cold: LorentzianBath {
                temperature: 0.2,
                center: 0.75,
                width: 0.05,
                kappa: 0.01,
            },
            mid: OhmicBath {
                temperature: 0.5,
                gamma_m: 0.1,
            },
            drive_freq: 0.5,
        }
    }

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace(0.005, 0.995, 201);
        assert_eq!(v.len(), 201);
        assert_eq!(v[0], 0.005);
        assert_eq!(v[200], 0.995);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn locked_axis_keeps_detuning() {
        let spec = SweepSpec::new(
            template(),
            Axis::new(ParamId::HotCenterLocked, 1.0, 2.0, 3),
            None,
        );
        let cfg = spec.cell_config(1.2, None);
        assert_eq!(cfg.hot.center, 1.2);
        assert!((cfg.detuning() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn param_names_round_trip() {
        for p in ParamId::ALL {
            assert_eq!(p.as_str().parse::<ParamId>().unwrap(), p);
        }
        assert!("hot.kappa".parse::<ParamId>().is_err());
    }

    #[test]
    fn invalid_cells_keep_their_place() {
        // Sweeping T_m beyond T_h breaks the temperature ordering.
        let spec = SweepSpec::new(
            template(),
            Axis::new(ParamId::MidTemperature, 0.3, 0.9, 4),
            None,
        );
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.cells.len(), 4);
        let last = &res.cells[3];
        assert!(last.is_error());
        assert!(last.point.j_hot.is_nan());
        assert_eq!(last.label(), "error");
        assert!(!res.cells[0].is_error());
    }

    #[test]
    fn bad_specs_are_rejected() {
        let same = SweepSpec::new(
            template(),
            Axis::new(ParamId::DriveFreq, 0.1, 0.9, 3),
            Some(Axis::new(ParamId::DriveFreq, 0.1, 0.9, 3)),
        );
        assert!(run_sweep(&same).is_err());
        let short = SweepSpec::new(template(), Axis::new(ParamId::DriveFreq, 0.1, 0.9, 1), None);
        assert!(run_sweep(&short).is_err());
    }

    #[test]
    fn resonance_lines_need_the_right_axes() {
        let spec = SweepSpec::new(
            template(),
            Axis::new(ParamId::DriveFreq, 0.1, 0.9, 3),
            Some(Axis::new(ParamId::MidTemperature, 0.3, 0.6, 3)),
        );
        assert!(resonance_lines(&spec).is_err());
    }

    #[test]
    fn detuning_zero_lines_cross_at_omega0() {
        let mut t = template();
        t.cold.center = t.hot.center;
        let spec = SweepSpec::new(
            t,
            Axis::new(ParamId::HotCenterLocked, 1.0, 2.0, 3),
            Some(Axis::new(ParamId::DriveFreq, 0.1, 0.9, 3)),
        );
        let l = resonance_lines(&spec).unwrap();
        let cold = l.cold.unwrap();
        assert_eq!(l.hot.at(0.0), 1.0);
        assert_eq!(cold.at(0.0), 1.0);
    }

    #[test]
    fn cold_line_at_given_drive() {
        let mut t = template();
        t.cold.center = t.hot.center - 0.3;
        let spec = SweepSpec::new(
            t,
            Axis::new(ParamId::DriveFreq, 0.1, 0.9, 3),
            Some(Axis::new(ParamId::HotCenterLocked, 1.0, 2.0, 3)),
        );
        let cold = resonance_lines(&spec).unwrap().cold.unwrap();
        assert!((cold.at(0.2) - 1.1).abs() < 1e-15);
    }

    #[test]
    fn unlocked_axis_has_no_cold_line() {
        let spec = SweepSpec::new(
            template(),
            Axis::new(ParamId::DriveFreq, 0.1, 0.9, 3),
            Some(Axis::new(ParamId::HotCenter, 1.0, 2.0, 3)),
        );
        assert!(resonance_lines(&spec).unwrap().cold.is_none());
    }

    #[test]
    fn run_length_cases() {
        use OperatingMode::*;
        let constant: Vec<_> = (0..5).map(|i| (i as f64, Some(Engine))).collect();
        let runs = run_length(&constant);
        assert_eq!(runs.len(), 1);
        assert_eq!((runs[0].omega_start, runs[0].omega_end), (0.0, 4.0));

        let alternating: Vec<_> = (0..6)
            .map(|i| (i as f64, Some(if i % 2 == 0 { Engine } else { HeatPump })))
            .collect();
        let runs = run_length(&alternating);
        assert_eq!(runs.len(), 6);
        assert!(runs.iter().all(|r| r.omega_start == r.omega_end));

        let grouped = [
            (0.0, Some(Engine)),
            (1.0, Some(Engine)),
            (2.0, None),
            (3.0, Some(Wasteful)),
            (4.0, Some(Wasteful)),
        ];
        let runs = run_length(&grouped);
        assert_eq!(runs.len(), 3);
        assert_eq!(runs[1].mode, None);
        assert_eq!((runs[2].omega_start, runs[2].omega_end), (3.0, 4.0));
    }

    #[test]
    fn richest_span_respects_width() {
        use OperatingMode::*;
        let s = [
            (0.0, Some(Engine)),
            (0.2, Some(EnginePump)),
            (0.4, Some(HeatPump)),
            (0.6, Some(Degenerate)),
            (0.8, Some(Wasteful)),
        ];
        assert_eq!(richest_span(&s, 0.45).0, 3);
        assert_eq!(richest_span(&s, 0.1).0, 1);
        assert_eq!(richest_span(&s, 1.0).0, 4);
    }
}
