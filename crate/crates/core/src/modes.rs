//! Operating-mode taxonomy and exergy efficiency.
//!
//! A task is useful when its contribution to the entropy production is
//! negative: producing work (`P < 0`), extracting heat from the cold bath
//! (`J_c > 0`), or delivering heat to the hot bath (`J_h < 0`). The mode is
//! the set of useful tasks being performed. Signs of `(J_h, J_c, P)`:
//!
//! | mode               | J_h | J_c | P |
//! |--------------------|-----|-----|---|
//! | engine             |  +  |  −  | − |
//! | refrigerator       |  +  |  +  | + |
//! | heat pump          |  −  |  −  | + |
//! | engine–refrigerator|  +  |  +  | − |
//! | engine–pump        |  −  |  −  | − |
//! | refrigerator–pump  |  −  |  +  | + |
//! | wasteful           |  +  |  −  | + |
//!
//! The remaining octant `(−, +, −)` would make every entropy term negative
//! and cannot be produced by a physical point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::currents::{Temperatures, ThermoPoint, ZERO_BAND};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatingMode {
    Engine,
    Refrigerator,
    HeatPump,
    EngineRefrigerator,
    EnginePump,
    RefrigeratorPump,
    Wasteful,
    /// At least one of the three signs lies inside the zero band.
    Degenerate,
}

impl OperatingMode {
    pub const ALL: [OperatingMode; 8] = [
        OperatingMode::Engine,
        OperatingMode::Refrigerator,
        OperatingMode::HeatPump,
        OperatingMode::EngineRefrigerator,
        OperatingMode::EnginePump,
        OperatingMode::RefrigeratorPump,
        OperatingMode::Wasteful,
        OperatingMode::Degenerate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatingMode::Engine => "engine",
            OperatingMode::Refrigerator => "refrigerator",
            OperatingMode::HeatPump => "heat_pump",
            OperatingMode::EngineRefrigerator => "engine_refrigerator",
            OperatingMode::EnginePump => "engine_pump",
            OperatingMode::RefrigeratorPump => "refrigerator_pump",
            OperatingMode::Wasteful => "wasteful",
            OperatingMode::Degenerate => "degenerate",
        }
    }

    pub fn is_hybrid(self) -> bool {
        matches!(
            self,
            OperatingMode::EngineRefrigerator
                | OperatingMode::EnginePump
                | OperatingMode::RefrigeratorPump
        )
    }
}

impl fmt::Display for OperatingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        OperatingMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown operating mode `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Neg,
    Zero,
    Pos,
}

fn sign(x: f64) -> Sign {
    if x.abs() < ZERO_BAND {
        Sign::Zero
    } else if x > 0.0 {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

/// Labels an operating point by the signs of `J_h`, `J_c` and `P`.
///
/// When one Lorentzian coupling is switched off its current is exactly zero
/// and the point is labelled as a two-terminal machine, with `J_m` standing in
/// for the missing terminal.
///
/// ```
/// use qtm_core::{classify, OperatingMode, ThermoPoint};
/// let p = ThermoPoint { j_hot: 1.0, j_cold: -0.5, j_mid: -0.7, power: 0.2,
///     entropy_rate: 0.0, entropy_pos: 0.0, entropy_neg: 0.0 };
/// assert_eq!(classify(&p).unwrap(), OperatingMode::Wasteful);
/// ```
pub fn classify(point: &ThermoPoint) -> Result<OperatingMode> {
    use Sign::*;
    // A decoupled Lorentzian terminal carries exactly zero current; the
    // Ohmic bath then takes its place in the remaining two-terminal machine.
    let (j_hot, j_cold) = match (point.j_hot == 0.0, point.j_cold == 0.0) {
        (false, true) => (point.j_hot, point.j_mid),
        (true, false) => (point.j_mid, point.j_cold),
        _ => (point.j_hot, point.j_cold),
    };
    let (h, c, p) = (sign(j_hot), sign(j_cold), sign(point.power));
    let mode = match (h, c, p) {
        (Zero, _, _) | (_, Zero, _) | (_, _, Zero) => OperatingMode::Degenerate,
        (Pos, Neg, Neg) => OperatingMode::Engine,
        (Pos, Pos, Pos) => OperatingMode::Refrigerator,
        (Neg, Neg, Pos) => OperatingMode::HeatPump,
        (Pos, Pos, Neg) => OperatingMode::EngineRefrigerator,
        (Neg, Neg, Neg) => OperatingMode::EnginePump,
        (Neg, Pos, Pos) => OperatingMode::RefrigeratorPump,
        (Pos, Neg, Pos) => OperatingMode::Wasteful,
        (Neg, Pos, Neg) => {
            return Err(Error::Consistency(format!(
                "J_h = {:e} < 0, J_c = {:e} > 0 and P = {:e} < 0 cannot coexist with non-negative entropy production",
                point.j_hot, point.j_cold, point.power
            )))
        }
    };
    Ok(mode)
}

/// Tolerance for rounding excursions of the efficiency outside `[0, 1]`.
const PHI_SLACK: f64 = 1e-12;

fn step(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Exergy (second-law) efficiency: useful entropy reduction divided by the
/// entropy produced by the resources.
///
/// Evaluated from the step-function form over `P`, `J_c(1 − T_m/T_c)` and
/// `J_h(1 − T_m/T_h)`.
pub fn exergy_efficiency(point: &ThermoPoint, t: &Temperatures) -> Result<f64> {
    let (p, jc, jh) = (point.power, point.j_cold, point.j_hot);
    let cold = jc * (1.0 - t.mid / t.cold);
    let hot = jh * (1.0 - t.mid / t.hot);

    let useful = p * step(-p) + cold * step(jc) + hot * step(-jh);
    let resource = p * step(p) + cold * step(-jc) + hot * step(jh);

    if useful == 0.0 {
        return Ok(0.0);
    }
    if resource <= 0.0 {
        return Err(Error::Consistency(format!(
            "negative entropy contributions ({useful:e}) with no positive contribution"
        )));
    }
    let phi = -useful / resource;
    if !(-PHI_SLACK..=1.0 + PHI_SLACK).contains(&phi) {
        return Err(Error::Consistency(format!(
            "exergy efficiency {phi} outside [0, 1]"
        )));
    }
    Ok(phi.clamp(0.0, 1.0))
}

/// Mode label together with the efficiency of an operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub point: ThermoPoint,
    pub mode: OperatingMode,
    pub exergy: f64,
}

impl ModeReport {
    pub fn new(point: ThermoPoint, t: &Temperatures) -> Result<Self> {
        Ok(Self {
            point,
            mode: classify(&point)?,
            exergy: exergy_efficiency(&point, t)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(j_hot: f64, j_cold: f64, power: f64) -> ThermoPoint {
        ThermoPoint {
            j_hot,
            j_cold,
            j_mid: -power - j_hot - j_cold,
            power,
            entropy_rate: 0.0,
            entropy_pos: 0.0,
            entropy_neg: 0.0,
        }
    }

    const T: Temperatures = Temperatures {
        hot: 0.8,
        mid: 0.5,
        cold: 0.2,
    };

    #[test]
    fn octant_table() {
        let cases = [
            ((1.0, -1.0, -1.0), OperatingMode::Engine),
            ((1.0, 1.0, 1.0), OperatingMode::Refrigerator),
            ((-1.0, -1.0, 1.0), OperatingMode::HeatPump),
            ((1.0, 1.0, -1.0), OperatingMode::EngineRefrigerator),
            ((-1.0, -1.0, -1.0), OperatingMode::EnginePump),
            ((-1.0, 1.0, 1.0), OperatingMode::RefrigeratorPump),
            ((1.0, -1.0, 1.0), OperatingMode::Wasteful),
        ];
        for ((h, c, p), mode) in cases {
            assert_eq!(classify(&pt(h, c, p)).unwrap(), mode);
        }
    }

    #[test]
    fn wasteful_example() {
        assert_eq!(classify(&pt(1.0, -0.5, 0.2)).unwrap(), OperatingMode::Wasteful);
    }

    #[test]
    fn forbidden_octant_is_an_error() {
        assert!(matches!(
            classify(&pt(-0.1, 0.05, -0.01)),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn engine_refrigerator_label() {
        assert_eq!(
            classify(&pt(1.0, 0.2, -0.3)).unwrap(),
            OperatingMode::EngineRefrigerator
        );
        // A point with the same signs that also respects the second law at T.
        let p = pt(1.0, 0.05, -0.1);
        let s: f64 = crate::currents::entropy_terms(p.power, p.j_hot, p.j_cold, &T)
            .iter()
            .sum();
        assert!(s > 0.0);
        assert_eq!(classify(&p).unwrap(), OperatingMode::EngineRefrigerator);
    }

    #[test]
    fn zero_band_gives_degenerate() {
        assert_eq!(classify(&pt(1.0, 5e-15, 0.1)).unwrap(), OperatingMode::Degenerate);
        assert_eq!(classify(&pt(-1.0, 1.0, -1e-15)).unwrap(), OperatingMode::Degenerate);
    }

    #[test]
    fn decoupled_terminal_is_replaced_by_mid() {
        // Lorentzian hot + Ohmic cold: heat drawn from the Ohmic bath into the hot one.
        assert_eq!(classify(&pt(-1.0, 0.0, 0.4)).unwrap(), OperatingMode::RefrigeratorPump);
        // Work dumped into both baths.
        assert_eq!(classify(&pt(-0.2, 0.0, 0.4)).unwrap(), OperatingMode::HeatPump);
        assert_eq!(classify(&pt(1.0, 0.0, -0.3)).unwrap(), OperatingMode::Engine);
        // Ohmic hot + Lorentzian cold.
        assert_eq!(classify(&pt(0.0, 0.3, 0.2)).unwrap(), OperatingMode::RefrigeratorPump);
        assert_eq!(classify(&pt(0.0, 0.0, 0.0)).unwrap(), OperatingMode::Degenerate);
    }

    #[test]
    fn labels_round_trip() {
        for m in OperatingMode::ALL {
            assert_eq!(m.as_str().parse::<OperatingMode>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.as_str()));
        }
    }

    #[test]
    fn wasteful_has_zero_efficiency() {
        assert_eq!(exergy_efficiency(&pt(1.0, -0.5, 0.2), &T).unwrap(), 0.0);
    }

    #[test]
    fn no_useful_output_means_zero() {
        assert_eq!(exergy_efficiency(&pt(0.0, 0.0, 0.0), &T).unwrap(), 0.0);
    }

    #[test]
    fn useful_without_resource_is_an_error() {
        assert!(exergy_efficiency(&pt(-1.0, 1.0, -1.0), &T).is_err());
    }

    #[test]
    fn above_unity_is_an_error() {
        // Engine producing more than the Carnot-limited work.
        assert!(exergy_efficiency(&pt(1.0, -0.0, -0.9), &T).is_err());
    }
}
