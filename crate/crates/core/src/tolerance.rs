use serde::Serialize;

use crate::error::{Error, Result};

/// Environment variable overriding the tolerance trio as
/// `"zero,ratio,oracle"`, e.g. `MACPOLAR_TOLERANCES=1e-9,1e-7,1e-6`.
pub const TOLERANCE_ENV: &str = "MACPOLAR_TOLERANCES";

/// Numerical thresholds shared by the checkers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Probabilities and Fourier coefficients at or below this are zero.
    pub zero: f64,
    /// Unimodularity and agreement of Fourier ratios.
    pub ratio: f64,
    /// Equality of information quantities compared by the oracle.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { zero: 1e-9, ratio: 1e-7, oracle: 1e-6 }
    }
}

impl Tolerances {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "{TOLERANCE_ENV} must hold three comma-separated numbers, got {s:?}"
            )));
        }
        let mut vals = [0.0; 3];
        for (slot, p) in vals.iter_mut().zip(&parts) {
            *slot = p
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{TOLERANCE_ENV}: {p:?}: {e}")))?;
            if !(*slot > 0.0 && slot.is_finite()) {
                return Err(Error::Parse(format!("{TOLERANCE_ENV}: {p:?} is not positive")));
            }
        }
        Ok(Self { zero: vals[0], ratio: vals[1], oracle: vals[2] })
    }

    /// Defaults, overridden by [`TOLERANCE_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOLERANCE_ENV) {
            Ok(s) if !s.trim().is_empty() => Self::parse(&s),
            _ => Ok(Self::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_trio() {
        let t = Tolerances::parse("1e-10, 1e-8,1e-5").unwrap();
        assert_eq!(t, Tolerances { zero: 1e-10, ratio: 1e-8, oracle: 1e-5 });
        assert!(Tolerances::parse("1e-9,1e-7").is_err());
        assert!(Tolerances::parse("1e-9,x,1e-6").is_err());
        assert!(Tolerances::parse("1e-9,0,1e-6").is_err());
    }
}
