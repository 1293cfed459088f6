//! Laboratory units to the dimensionless kick period.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const RB87_MASS_KG: f64 = 1.443_16e-25;

/// Standing-wave geometry and atomic species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabUnits {
    pub wavelength_nm: f64,
    pub beam_angle_from_vertical_deg: f64,
    pub atom_mass_kg: f64,
}

impl Default for LabUnits {
    /// 780 nm beams at 53 degrees on rubidium-87.
    fn default() -> Self {
        Self { wavelength_nm: 780.0, beam_angle_from_vertical_deg: 53.0, atom_mass_kg: RB87_MASS_KG }
    }
}

impl LabUnits {
    fn validate(&self) -> Result<()> {
        if self.wavelength_nm > 0.0 && self.atom_mass_kg > 0.0 && self.beam_angle_from_vertical_deg.to_radians().sin() > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter("wavelength, mass and sin(angle) must be positive".into()))
        }
    }

    /// Grating vector `G = 2 (2pi / lambda) sin(angle)` in 1/m.
    pub fn grating_vector(&self) -> f64 {
        2.0 * (2.0 * PI / (self.wavelength_nm * 1e-9)) * self.beam_angle_from_vertical_deg.to_radians().sin()
    }

    /// Half-Talbot time `2 pi M / (hbar G^2)` in seconds.
    pub fn half_talbot(&self) -> Result<f64> {
        self.validate()?;
        let g = self.grating_vector();
        Ok(2.0 * PI * self.atom_mass_kg / (HBAR * g * g))
    }
}

/// `tau = 2 pi T / T_half` for a pulse period `T` in seconds.
pub fn lab_to_dimensionless(units: &LabUnits, period_s: f64) -> Result<f64> {
    if !(period_s > 0.0 && period_s.is_finite()) {
        return Err(Error::InvalidParameter(format!("pulse period {period_s} s must be positive")));
    }
    Ok(2.0 * PI * period_s / units.half_talbot()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_talbot_for_rubidium() {
        let t = LabUnits::default().half_talbot().unwrap();
        assert!((t * 1e6 - 51.5).abs() < 0.5, "{}", t * 1e6);
    }

    #[test]
    fn talbot_multiples() {
        let u = LabUnits::default();
        let th = u.half_talbot().unwrap();
        assert!((lab_to_dimensionless(&u, th).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((lab_to_dimensionless(&u, 2.0 * th).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!(lab_to_dimensionless(&u, 0.0).is_err());
        assert!(lab_to_dimensionless(&u, -1e-6).is_err());
    }
}
