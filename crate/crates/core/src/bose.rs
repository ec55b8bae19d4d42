//! Bose–Einstein occupation number.

use crate::error::{Error, Result};

/// Below this magnitude the occupation is evaluated from its Laurent series.
pub const SERIES_SWITCH: f64 = 1e-5;

/// Bose–Einstein occupation `1 / (e^x - 1)` for a dimensionless energy ratio `x`.
///
/// Negative arguments are evaluated through the reflection `n(-x) = -1 - n(x)`,
/// so the identity holds exactly in floating point. Near the pole the
/// three-term expansion `1/x - 1/2 + x/12` replaces the direct formula.
///
/// ```
/// use qtm_core::bose_occupation;
/// let n = bose_occupation(std::f64::consts::LN_2).unwrap();
/// assert!((n - 1.0).abs() < 1e-15);
/// assert!(bose_occupation(0.0).is_err());
/// ```
pub fn bose_occupation(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("Bose occupation of NaN".into()));
    }
    if x == 0.0 {
        return Err(Error::Domain(
            "Bose occupation diverges at zero energy ratio".into(),
        ));
    }
    if x < 0.0 {
        return Ok(-1.0 - positive_branch(-x));
    }
    Ok(positive_branch(x))
}

fn positive_branch(x: f64) -> f64 {
    if x < SERIES_SWITCH {
        1.0 / x - 0.5 + x / 12.0
    } else {
        1.0 / x.exp_m1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln2_gives_unit_occupation() {
        let n = bose_occupation(std::f64::consts::LN_2).unwrap();
        assert!((n - 1.0).abs() < 1e-15, "{n}");
    }

    #[test]
    fn small_argument_uses_expansion() {
        let n = bose_occupation(1e-6).unwrap();
        assert!(rel(n, 999_999.5) < 1e-9);
    }

    #[test]
    fn zero_is_a_domain_error() {
        assert!(matches!(bose_occupation(0.0), Err(Error::Domain(_))));
        assert!(matches!(bose_occupation(-0.0), Err(Error::Domain(_))));
        assert!(bose_occupation(f64::NAN).is_err());
    }

    #[test]
    fn continuous_across_series_switch() {
        let below = bose_occupation(SERIES_SWITCH * (1.0 - 1e-12)).unwrap();
        let above = bose_occupation(SERIES_SWITCH).unwrap();
        assert!(rel(below, above) < 1e-11);
        assert!(below > above);
    }

    #[test]
    fn large_argument_underflows_to_zero() {
        assert_eq!(bose_occupation(1000.0).unwrap(), 0.0);
        assert_eq!(bose_occupation(-1000.0).unwrap(), -1.0);
    }
}
