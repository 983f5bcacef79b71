use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default speed of light in nondimensionalized Gaussian units.
pub const DEFAULT_C: f64 = 137.036;

/// Speed of light and reduced Planck constant in Gaussian units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSystem {
    pub c: f64,
    pub hbar: f64,
}

impl UnitSystem {
    pub fn new(c: f64, hbar: f64) -> Result<Self> {
        let u = Self { c, hbar };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {}", self.c)));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        Ok(())
    }

    /// Same system with a different speed of light.
    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { c: DEFAULT_C, hbar: 1.0 }
    }
}
