//! Machine configuration and its validation rules.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bath::{LorentzianBath, OhmicBath, WorkingMedium};
use crate::error::{Error, Result};

/// Full parameter set of the three-terminal machine.
///
/// The hot and cold couplings are both modulated as `cos(Ωt)` and in phase;
/// the middle coupling is static. That protocol is built into the closed-form
/// currents and is not a configuration option.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineConfig {
    #[serde(default)]
    pub wm: WorkingMedium,
    pub hot: LorentzianBath,
    pub cold: LorentzianBath,
    pub mid: OhmicBath,
    pub drive_freq: f64,
}

impl MachineConfig {
    /// Detuning `ω_h − ω_c` between the two Lorentzian peaks.
    pub fn detuning(&self) -> f64 {
        self.hot.center - self.cold.center
    }

    /// The two-terminal machine obtained by switching off the cold coupling.
    pub fn without_cold(&self) -> Self {
        let mut cfg = *self;
        cfg.cold.kappa = 0.0;
        cfg
    }

    /// The two-terminal machine obtained by switching off the hot coupling.
    pub fn without_hot(&self) -> Self {
        let mut cfg = *self;
        cfg.hot.kappa = 0.0;
        cfg
    }

    /// Checks every invariant and returns the soft warnings that remain.
    pub fn validate(&self, policy: &ValidationPolicy) -> Result<Vec<Warning>> {
        positive("wm.omega0", self.wm.omega0)?;
        positive("wm.mass", self.wm.mass)?;
        for (name, bath) in [("hot", &self.hot), ("cold", &self.cold)] {
            positive(&format!("{name}.temperature"), bath.temperature)?;
            positive(&format!("{name}.center"), bath.center)?;
            positive(&format!("{name}.width"), bath.width)?;
            non_negative(&format!("{name}.kappa"), bath.kappa)?;
        }
        positive("mid.temperature", self.mid.temperature)?;
        positive("mid.gamma_m", self.mid.gamma_m)?;
        positive("drive_freq", self.drive_freq)?;
        if self.drive_freq >= self.wm.omega0 {
            return Err(Error::invalid(
                "drive_freq",
                format!(
                    "must lie below omega0 = {} (got {})",
                    self.wm.omega0, self.drive_freq
                ),
            ));
        }

        let (th, tm, tc) = (self.hot.temperature, self.mid.temperature, self.cold.temperature);
        let ordered = if policy.relaxed {
            th >= tm && tm >= tc
        } else {
            th > tm && tm > tc
        };
        if !ordered {
            let rel = if policy.relaxed { ">=" } else { ">" };
            return Err(Error::invalid(
                "mid.temperature",
                format!("temperatures must satisfy T_h {rel} T_m {rel} T_c (got {th}, {tm}, {tc})"),
            ));
        }

        let mut warnings = Vec::new();
        for (which, bath) in [(Terminal::Hot, &self.hot), (Terminal::Cold, &self.cold)] {
            if bath.kappa >= policy.kappa_warn {
                warnings.push(Warning::StrongCoupling {
                    bath: which,
                    kappa: bath.kappa,
                });
            }
            if bath.width >= policy.width_warn * self.wm.omega0 {
                warnings.push(Warning::BroadPeak {
                    bath: which,
                    width: bath.width,
                });
            }
        }
        if th >= self.wm.omega0 {
            warnings.push(Warning::NotQuantumRegime { t_hot: th });
        }
        Ok(warnings)
    }
}

fn positive(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0 (got {value})")))
    }
}

fn non_negative(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and >= 0 (got {value})")))
    }
}

/// Knobs for [`MachineConfig::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationPolicy {
    /// Accept equal temperatures (test fixtures and equilibrium limits).
    pub relaxed: bool,
    /// Coupling above which the perturbative currents are flagged.
    pub kappa_warn: f64,
    /// Peak width (in units of `omega0`) above which the underdamped picture is flagged.
    pub width_warn: f64,
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        Self {
            relaxed: false,
            kappa_warn: 0.1,
            width_warn: 0.5,
        }
    }
}

impl ValidationPolicy {
    pub fn relaxed() -> Self {
        Self {
            relaxed: true,
            ..Self::default()
        }
    }
}

/// The two driven terminals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    Hot,
    Cold,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Terminal::Hot => "hot",
            Terminal::Cold => "cold",
        })
    }
}

/// Conditions under which the formulas still evaluate but leave their regime of validity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    StrongCoupling { bath: Terminal, kappa: f64 },
    BroadPeak { bath: Terminal, width: f64 },
    NotQuantumRegime { t_hot: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::StrongCoupling { bath, kappa } => write!(
                f,
                "{bath}.kappa = {kappa} is not small; perturbative currents may be inaccurate"
            ),
            Warning::BroadPeak { bath, width } => write!(
                f,
                "{bath}.width = {width} is not small compared to omega0; outside the underdamped regime"
            ),
            Warning::NotQuantumRegime { t_hot } => {
                write!(f, "hot.temperature = {t_hot} is not below omega0; outside the quantum regime")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> MachineConfig {
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

    fn field_of(err: Error) -> String {
        match err {
            Error::InvalidConfig { field, .. } => field,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn base_is_clean() {
        assert!(base().validate(&ValidationPolicy::default()).unwrap().is_empty());
        assert!((base().detuning() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn ordering_is_strict_unless_relaxed() {
        let mut cfg = base();
        cfg.hot.temperature = 0.5;
        let err = cfg.validate(&ValidationPolicy::default()).unwrap_err();
        assert_eq!(field_of(err), "mid.temperature");
        cfg.cold.temperature = 0.5;
        assert!(cfg.validate(&ValidationPolicy::relaxed()).is_ok());
    }

    #[test]
    fn drive_must_stay_below_omega0() {
        let mut cfg = base();
        cfg.drive_freq = 1.0;
        assert_eq!(field_of(cfg.validate(&ValidationPolicy::default()).unwrap_err()), "drive_freq");
        cfg.drive_freq = 0.0;
        assert_eq!(field_of(cfg.validate(&ValidationPolicy::relaxed()).unwrap_err()), "drive_freq");
    }

    #[test]
    fn bad_fields_are_named() {
        let mut cfg = base();
        cfg.cold.width = -0.1;
        assert_eq!(field_of(cfg.validate(&ValidationPolicy::default()).unwrap_err()), "cold.width");
        let mut cfg = base();
        cfg.hot.kappa = f64::NAN;
        assert_eq!(field_of(cfg.validate(&ValidationPolicy::default()).unwrap_err()), "hot.kappa");
        let mut cfg = base();
        cfg.wm.mass = 0.0;
        assert_eq!(field_of(cfg.validate(&ValidationPolicy::default()).unwrap_err()), "wm.mass");
    }

    #[test]
    fn soft_conditions_warn() {
        let mut cfg = base();
        cfg.hot.kappa = 0.2;
        cfg.cold.width = 0.6;
        cfg.hot.temperature = 1.2;
        let w = cfg.validate(&ValidationPolicy::default()).unwrap();
        assert_eq!(w.len(), 3);
        assert!(w.iter().any(|w| matches!(w, Warning::NotQuantumRegime { .. })));
    }

    #[test]
    fn reductions_zero_one_coupling() {
        assert_eq!(base().without_cold().cold.kappa, 0.0);
        assert_eq!(base().without_hot().hot.kappa, 0.0);
        assert!(base().without_cold().validate(&ValidationPolicy::default()).is_ok());
    }
}
