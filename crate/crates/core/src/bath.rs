//! Working medium and the two spectral-density families.
//!
//! All quantities are expressed in natural units: frequencies and
//! temperatures in units of the oscillator frequency, `ħ = k_B = 1`.

use serde::{Deserialize, Serialize};

/// The quantum harmonic oscillator that mediates every energy exchange.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkingMedium {
    #[serde(default = "unit")]
    pub omega0: f64,
    #[serde(default = "unit")]
    pub mass: f64,
}

fn unit() -> f64 {
    1.0
}

impl Default for WorkingMedium {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            mass: 1.0,
        }
    }
}

/// A structured bath whose spectral density is a Lorentzian peak.
///
/// The amplitude is stored as the dimensionless `kappa`; the dimensional
/// amplitude is recovered by [`LorentzianBath::amplitude`]. `kappa = 0`
/// decouples the bath entirely, which is how two-terminal machines are built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzianBath {
    pub temperature: f64,
    pub center: f64,
    pub width: f64,
    pub kappa: f64,
}

impl LorentzianBath {
    /// `d = kappa * center^2 * omega0^2`.
    pub fn amplitude(&self, wm: &WorkingMedium) -> f64 {
        self.kappa * self.center * self.center * wm.omega0 * wm.omega0
    }

    /// Spectral density `d M γ ω / ((ω² − ω_c²)² + γ² ω²)` at `omega >= 0`.
    ///
    /// ```
    /// use qtm_core::{LorentzianBath, WorkingMedium};
    /// let bath = LorentzianBath { temperature: 0.8, center: 1.5, width: 0.05, kappa: 0.01 };
    /// let wm = WorkingMedium::default();
    /// let peak = bath.spectral_density(&wm, 1.5);
    /// let expected = bath.amplitude(&wm) * wm.mass / (bath.width * bath.center);
    /// assert!((peak - expected).abs() < 1e-15 * expected);
    /// assert_eq!(bath.spectral_density(&wm, 0.0), 0.0);
    /// ```
    pub fn spectral_density(&self, wm: &WorkingMedium, omega: f64) -> f64 {
        let detune = omega * omega - self.center * self.center;
        let damp = self.width * omega;
        self.amplitude(wm) * wm.mass * self.width * omega / (detune * detune + damp * damp)
    }
}

/// A static bath with a strictly Ohmic spectral density `M γ_m ω`.
///
/// In the weak-damping limit the currents do not depend on `gamma_m`; it is
/// kept so that configurations describe the physical bath completely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OhmicBath {
    pub temperature: f64,
    #[serde(default = "default_gamma_m")]
    pub gamma_m: f64,
}

fn default_gamma_m() -> f64 {
    0.1
}

impl OhmicBath {
    pub fn spectral_density(&self, wm: &WorkingMedium, omega: f64) -> f64 {
        wm.mass * self.gamma_m * omega
    }
}

/// Free-function form of [`LorentzianBath::spectral_density`].
pub fn spectral_lorentzian(bath: &LorentzianBath, wm: &WorkingMedium, omega: f64) -> f64 {
    bath.spectral_density(wm, omega)
}

/// Free-function form of [`OhmicBath::spectral_density`].
pub fn spectral_ohmic(bath: &OhmicBath, wm: &WorkingMedium, omega: f64) -> f64 {
    bath.spectral_density(wm, omega)
}
