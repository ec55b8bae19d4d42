//! Thermal-transistor figures of merit.
//!
//! The driving frequency modulates the input power `P`, and the hot-bath
//! current `J_h` is the output. The output-to-input ratio is
//! `r = |J_h / P|`, and the differential gain is
//! `g = |∂J_h/∂P| = |(∂J_h/∂Ω) / (∂P/∂Ω)|`. Derivatives come from a central
//! difference in `Ω`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::MachineConfig;
use crate::currents::{evaluate_point, ThermoPoint, ZERO_BAND};
use crate::error::{Error, Result};

/// Relative finite-difference step in `Ω`.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Absolute floor on the step, in units of `ω₀`.
pub const MIN_FD_STEP: f64 = 1e-8;
/// Below this `|∂P/∂Ω|` the gain is reported but flagged unreliable.
pub const RELIABLE_SLOPE: f64 = 1e-10;
/// The "useful transistor" threshold on both `r` and `g`.
pub const DEFAULT_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransistorPoint {
    pub omega_drive: f64,
    pub point: ThermoPoint,
    /// `+inf` when `|P|` is inside the zero band.
    pub r: f64,
    /// `+inf` when `|∂P/∂Ω|` is inside the zero band.
    pub g: f64,
    pub dj_hot_domega: f64,
    pub dpower_domega: f64,
    /// False when `|∂P/∂Ω| < RELIABLE_SLOPE`.
    pub g_reliable: bool,
}

impl TransistorPoint {
    /// Both figures of merit strictly exceed `threshold` and are finite.
    pub fn passes(&self, threshold: f64) -> bool {
        self.r.is_finite() && self.g.is_finite() && self.r > threshold && self.g > threshold
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den.abs() < ZERO_BAND {
        f64::INFINITY
    } else {
        (num / den).abs()
    }
}

/// Figures of merit at the driving frequency of `cfg`.
///
/// `step` is relative to `Ω`, with an absolute floor of [`MIN_FD_STEP`]`·ω₀`.
pub fn transistor_point(cfg: &MachineConfig, step: f64) -> Result<TransistorPoint> {
    let omega = cfg.drive_freq;
    let w0 = cfg.wm.omega0;
    if !(step > 0.0) {
        return Err(Error::Domain(format!("finite-difference step must be > 0 (got {step})")));
    }
    let h = (step * omega).max(MIN_FD_STEP * w0);
    if !(omega - h > 0.0 && omega + h < w0) {
        return Err(Error::Domain(format!(
            "difference stencil [{}, {}] leaves (0, {w0})",
            omega - h,
            omega + h
        )));
    }
    let at = |o: f64| {
        let mut c = *cfg;
        c.drive_freq = o;
        evaluate_point(&c)
    };
    let point = at(omega)?;
    let up = at(omega + h)?;
    let down = at(omega - h)?;
    let dj = (up.j_hot - down.j_hot) / (2.0 * h);
    let dp = (up.power - down.power) / (2.0 * h);
    Ok(TransistorPoint {
        omega_drive: omega,
        point,
        r: ratio(point.j_hot, point.power),
        g: ratio(dj, dp),
        dj_hot_domega: dj,
        dpower_domega: dp,
        g_reliable: dp.abs() >= RELIABLE_SLOPE,
    })
}

/// A maximal run of consecutive grid points on which the device is a useful transistor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransistorWindow {
    pub omega_min: f64,
    pub omega_max: f64,
    pub min_r: f64,
    pub min_g: f64,
    pub max_g: f64,
    /// Some point inside the window has an unreliable gain.
    pub has_unreliable_gain: bool,
}

impl TransistorWindow {
    pub fn width(&self) -> f64 {
        self.omega_max - self.omega_min
    }

    pub fn contains(&self, omega: f64) -> bool {
        self.omega_min <= omega && omega <= self.omega_max
    }
}

/// Run-length construction of windows from per-point pass flags.
///
/// A window needs at least two passing points so that it has non-zero width.
pub fn windows_from_points(points: &[TransistorPoint], threshold: f64) -> Vec<TransistorWindow> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < points.len() {
        if !points[i].passes(threshold) {
            i += 1;
            continue;
        }
        let start = i;
        while i < points.len() && points[i].passes(threshold) {
            i += 1;
        }
        let run = &points[start..i];
        if run.len() >= 2 {
            let fold = |f: fn(f64, f64) -> f64, init: f64, get: fn(&TransistorPoint) -> f64| {
                run.iter().map(get).fold(init, f)
            };
            out.push(TransistorWindow {
                omega_min: run[0].omega_drive,
                omega_max: run[run.len() - 1].omega_drive,
                min_r: fold(f64::min, f64::INFINITY, |p| p.r),
                min_g: fold(f64::min, f64::INFINITY, |p| p.g),
                max_g: fold(f64::max, 0.0, |p| p.g),
                has_unreliable_gain: run.iter().any(|p| !p.g_reliable),
            });
        }
    }
    out
}

/// Figures of merit along a driving-frequency grid together with the windows found on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransistorScan {
    pub threshold: f64,
    pub points: Vec<TransistorPoint>,
    pub windows: Vec<TransistorWindow>,
}

impl TransistorScan {
    pub fn widest(&self) -> Option<&TransistorWindow> {
        self.windows
            .iter()
            .fold(None, |best: Option<&TransistorWindow>, w| match best {
                Some(b) if b.width() >= w.width() => Some(b),
                _ => Some(w),
            })
    }

    pub fn in_window(&self, omega: f64) -> bool {
        self.windows.iter().any(|w| w.contains(omega))
    }
}

pub(crate) fn check_omega_grid(grid: &[f64], omega0: f64) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::Domain(format!(
            "driving-frequency grid needs at least 3 points (got {})",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("driving-frequency grid must be strictly increasing".into()));
    }
    if !(grid[0] > 0.0 && grid[grid.len() - 1] < omega0) {
        return Err(Error::Domain(format!(
            "driving-frequency grid must lie inside (0, {omega0})"
        )));
    }
    Ok(())
}

/// Evaluates the figures of merit on every grid point (in parallel) and
/// extracts the windows.
pub fn scan(template: &MachineConfig, omega_grid: &[f64], threshold: f64, step: f64) -> Result<TransistorScan> {
    check_omega_grid(omega_grid, template.wm.omega0)?;
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!("threshold must be > 0 (got {threshold})")));
    }
    let points = omega_grid
        .par_iter()
        .map(|&omega| {
            let mut c = *template;
            c.drive_freq = omega;
            transistor_point(&c, step)
        })
        .collect::<Result<Vec<_>>>()?;
    let windows = windows_from_points(&points, threshold);
    Ok(TransistorScan {
        threshold,
        points,
        windows,
    })
}

/// Useful-transistor windows of `template` along `omega_grid`.
pub fn find_windows(template: &MachineConfig, omega_grid: &[f64], threshold: f64) -> Result<Vec<TransistorWindow>> {
    Ok(scan(template, omega_grid, threshold, DEFAULT_FD_STEP)?.windows)
}
