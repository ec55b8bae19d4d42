//! Period-averaged heat currents, power and entropy production in the
//! weak-coupling regime.
//!
//! Each driven bath exchanges energy with the oscillator at the two
//! sidebands `ω₀ ± Ω`. With `w_p = 𝒥(ω₀+pΩ) [n((ω₀+pΩ)/T) − n(ω₀/T_m)]`,
//!
//! ```text
//! J_ν = 1/(4Mω₀) Σ_p (ω₀+pΩ) w_p
//! P   = −Ω/(4Mω₀) Σ_ν Σ_p p w_p
//! ```
//!
//! and the static bath closes the energy balance, `J_m = −P − J_h − J_c`.
//! Signs: `J_ν > 0` when heat flows into the oscillator, `P > 0` when work is
//! done on it.

use serde::{Deserialize, Serialize};

use crate::bath::LorentzianBath;
use crate::bose::bose_occupation;
use crate::config::{MachineConfig, Terminal};
use crate::error::{Error, Result};

/// Magnitudes below this are treated as exactly zero when classifying signs.
pub const ZERO_BAND: f64 = 1e-14;

/// Currents, power and entropy production at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub j_hot: f64,
    pub j_cold: f64,
    pub j_mid: f64,
    pub power: f64,
    pub entropy_rate: f64,
    pub entropy_pos: f64,
    pub entropy_neg: f64,
}

impl ThermoPoint {
    /// `|P + J_h + J_c + J_m|`.
    pub fn first_law_residual(&self) -> f64 {
        (self.power + self.j_hot + self.j_cold + self.j_mid).abs()
    }

    /// Largest magnitude among the four energy flows.
    pub fn scale(&self) -> f64 {
        self.power
            .abs()
            .max(self.j_hot.abs())
            .max(self.j_cold.abs())
            .max(self.j_mid.abs())
    }
}

/// Bath temperatures `(T_h, T_m, T_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Temperatures {
    pub hot: f64,
    pub mid: f64,
    pub cold: f64,
}

impl From<&MachineConfig> for Temperatures {
    fn from(cfg: &MachineConfig) -> Self {
        Self {
            hot: cfg.hot.temperature,
            mid: cfg.mid.temperature,
            cold: cfg.cold.temperature,
        }
    }
}

/// The three entropy-production contributions written in terms of `P`, `J_c`
/// and `J_h` alone, in that order.
pub fn entropy_terms(power: f64, j_hot: f64, j_cold: f64, t: &Temperatures) -> [f64; 3] {
    [
        power / t.mid,
        j_cold / t.mid * (1.0 - t.mid / t.cold),
        j_hot / t.mid * (1.0 - t.mid / t.hot),
    ]
}

/// `−Σ_ν J_ν / T_ν` over all three baths.
pub fn entropy_rate_from_currents(point: &ThermoPoint, t: &Temperatures) -> f64 {
    -(point.j_hot / t.hot + point.j_mid / t.mid + point.j_cold / t.cold)
}

struct Sidebands {
    /// `(ω₀ + pΩ, w_p)` for `p = +1, −1`.
    terms: [(f64, f64); 2],
}

fn check_drive(cfg: &MachineConfig) -> Result<()> {
    let omega = cfg.drive_freq;
    if !(omega > 0.0 && omega < cfg.wm.omega0) {
        return Err(Error::Domain(format!(
            "driving frequency {omega} outside the supported range (0, {})",
            cfg.wm.omega0
        )));
    }
    Ok(())
}

fn sidebands(cfg: &MachineConfig, bath: &LorentzianBath, mid_occupation: f64) -> Result<Sidebands> {
    let w0 = cfg.wm.omega0;
    let mut terms = [(0.0, 0.0); 2];
    for (slot, p) in terms.iter_mut().zip([1.0, -1.0]) {
        let omega = w0 + p * cfg.drive_freq;
        let occupation = bose_occupation(omega / bath.temperature)? - mid_occupation;
        *slot = (omega, bath.spectral_density(&cfg.wm, omega) * occupation);
    }
    Ok(Sidebands { terms })
}

fn bath_of(cfg: &MachineConfig, which: Terminal) -> &LorentzianBath {
    match which {
        Terminal::Hot => &cfg.hot,
        Terminal::Cold => &cfg.cold,
    }
}

/// Heat current drawn from one of the driven baths.
pub fn heat_current(cfg: &MachineConfig, which: Terminal) -> Result<f64> {
    check_drive(cfg)?;
    let n_mid = bose_occupation(cfg.wm.omega0 / cfg.mid.temperature)?;
    let s = sidebands(cfg, bath_of(cfg, which), n_mid)?;
    Ok(current_of(cfg, &s))
}

/// Total power exchanged through the two modulated couplings.
pub fn total_power(cfg: &MachineConfig) -> Result<f64> {
    check_drive(cfg)?;
    let n_mid = bose_occupation(cfg.wm.omega0 / cfg.mid.temperature)?;
    let hot = sidebands(cfg, &cfg.hot, n_mid)?;
    let cold = sidebands(cfg, &cfg.cold, n_mid)?;
    Ok(power_of(cfg, &hot, &cold))
}

fn prefactor(cfg: &MachineConfig) -> f64 {
    1.0 / (4.0 * cfg.wm.mass * cfg.wm.omega0)
}

fn current_of(cfg: &MachineConfig, s: &Sidebands) -> f64 {
    let [(wp, up), (wm, dn)] = s.terms;
    prefactor(cfg) * (wp * up + wm * dn)
}

fn power_of(cfg: &MachineConfig, hot: &Sidebands, cold: &Sidebands) -> f64 {
    let odd = (hot.terms[0].1 - hot.terms[1].1) + (cold.terms[0].1 - cold.terms[1].1);
    -cfg.drive_freq * prefactor(cfg) * odd
}

/// Evaluates every thermodynamic quantity at one operating point.
///
/// ```
/// use qtm_core::{evaluate_point, LorentzianBath, MachineConfig, OhmicBath, WorkingMedium};
/// let cfg = MachineConfig {
///     wm: WorkingMedium::default(),
///     hot: LorentzianBath { temperature: 0.8, center: 1.5, width: 0.05, kappa: 0.01 },
///     cold: LorentzianBath { temperature: 0.2, center: 0.75, width: 0.05, kappa: 0.01 },
///     mid: OhmicBath { temperature: 0.5, gamma_m: 0.1 },
///     drive_freq: 0.5,
/// };
/// let p = evaluate_point(&cfg).unwrap();
/// assert!(p.first_law_residual() <= 1e-12 * p.scale());
/// assert!(p.entropy_rate >= 0.0);
/// ```
pub fn evaluate_point(cfg: &MachineConfig) -> Result<ThermoPoint> {
    check_drive(cfg)?;
    let n_mid = bose_occupation(cfg.wm.omega0 / cfg.mid.temperature)?;
    let hot = sidebands(cfg, &cfg.hot, n_mid)?;
    let cold = sidebands(cfg, &cfg.cold, n_mid)?;

    let j_hot = current_of(cfg, &hot);
    let j_cold = current_of(cfg, &cold);
    let power = power_of(cfg, &hot, &cold);
    let j_mid = -power - j_hot - j_cold;

    let terms = entropy_terms(power, j_hot, j_cold, &Temperatures::from(cfg));
    let entropy_pos: f64 = terms.iter().filter(|t| **t > 0.0).sum();
    let entropy_neg: f64 = terms.iter().filter(|t| **t < 0.0).sum();
    Ok(ThermoPoint {
        j_hot,
        j_cold,
        j_mid,
        power,
        entropy_rate: terms[0] + terms[1] + terms[2],
        entropy_pos,
        entropy_neg,
    })
}
