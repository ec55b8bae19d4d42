//! Period-averaged thermodynamics of a driven three-terminal quantum thermal machine.
//!
//! A quantum harmonic oscillator is coupled to a hot and a cold bath through
//! couplings modulated as `cos(Ωt)`, both with Lorentzian spectral densities,
//! and statically to an Ohmic bath at an intermediate temperature. In the
//! weak-coupling regime the period-averaged heat currents and power have
//! closed forms ([`currents`]); from them follow the entropy production, the
//! operating mode and exergy efficiency ([`modes`]), the thermal-transistor
//! figures of merit ([`transistor`]), parameter maps ([`sweep`]) and a seeded
//! parameter search ([`search`]).
//!
//! Units: `ħ = k_B = 1`, frequencies and temperatures in units of `ω₀`.
//!
//! ```
//! use qtm_core::{evaluate_point, LorentzianBath, MachineConfig, ModeReport, OhmicBath,
//!                Temperatures, WorkingMedium};
//!
//! let cfg = MachineConfig {
//!     wm: WorkingMedium::default(),
//!     hot: LorentzianBath { temperature: 0.8, center: 1.5, width: 0.05, kappa: 0.01 },
//!     cold: LorentzianBath { temperature: 0.2, center: 0.75, width: 0.05, kappa: 0.01 },
//!     mid: OhmicBath { temperature: 0.5, gamma_m: 0.1 },
//!     drive_freq: 0.5,
//! };
//! let report = ModeReport::new(evaluate_point(&cfg)?, &Temperatures::from(&cfg))?;
//! assert!((0.0..=1.0).contains(&report.exergy));
//! # Ok::<(), qtm_core::Error>(())
//! ```

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod bose;
pub mod config;
pub mod currents;
pub mod error;
pub mod modes;
pub mod search;
pub mod sweep;
pub mod transistor;

pub use bath::{spectral_lorentzian, spectral_ohmic, LorentzianBath, OhmicBath, WorkingMedium};
pub use bose::bose_occupation;
pub use config::{MachineConfig, Terminal, ValidationPolicy, Warning};
pub use currents::{
    entropy_rate_from_currents, evaluate_point, heat_current, total_power, Temperatures, ThermoPoint,
    ZERO_BAND,
};
pub use error::{Error, Result};
pub use modes::{classify, exergy_efficiency, ModeReport, OperatingMode};
pub use sweep::{mode_sequence_along_omega, resonance_lines, run_sweep, SweepSpec};
pub use transistor::{find_windows, transistor_point, TransistorPoint, TransistorWindow};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/currents.md")]
    mod currents {}
    #[doc = include_str!("../../../book/src/modes.md")]
    mod modes {}
    #[doc = include_str!("../../../book/src/transistor.md")]
    mod transistor {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
