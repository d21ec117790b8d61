//! Unit conventions.
//!
//! Everything inside the crate is dimensionless: ħ = 1 and the reference
//! (qubit) angular frequency Ω = 1. Frequencies, couplings and rates are
//! therefore stored in units of Ω and times in units of 1/Ω, so a time value
//! of `628.3` reads directly as Ωt = 628.3.
//!
//! [`FrequencyUnit`] converts between SI quantities and internal units.

use thiserror::Error;

/// Reduced Planck constant in J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("reference frequency must be positive and finite, got {0}")]
    InvalidReference(f64),
    #[error("qubit frequency must be positive and finite, got {0}")]
    InvalidQubitFrequency(f64),
}

/// The physical angular frequency (rad/s) that maps to 1.0 internally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyUnit {
    omega_ref: f64,
}

impl FrequencyUnit {
    pub fn new(omega_ref: f64) -> Result<Self, UnitError> {
        if omega_ref > 0.0 && omega_ref.is_finite() {
            Ok(Self { omega_ref })
        } else {
            Err(UnitError::InvalidReference(omega_ref))
        }
    }

    /// Reference angular frequency in rad/s.
    pub fn omega_ref(&self) -> f64 {
        self.omega_ref
    }

    pub fn frequency_to_internal(&self, omega: f64) -> f64 {
        omega / self.omega_ref
    }

    pub fn frequency_from_internal(&self, omega: f64) -> f64 {
        omega * self.omega_ref
    }

    pub fn time_to_internal(&self, seconds: f64) -> f64 {
        seconds * self.omega_ref
    }

    pub fn time_from_internal(&self, t: f64) -> f64 {
        t / self.omega_ref
    }

    /// Energy in joules to internal units (ħΩ = 1).
    pub fn energy_to_internal(&self, joules: f64) -> f64 {
        joules / (HBAR * self.omega_ref)
    }

    pub fn energy_from_internal(&self, energy: f64) -> f64 {
        energy * (HBAR * self.omega_ref)
    }
}

/// The central qubit. `omega` is its transition frequency in units of Ω,
/// which is 1 unless a run deliberately detunes the qubit from the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    omega: f64,
}

impl QubitSpec {
    pub fn new(omega: f64) -> Result<Self, UnitError> {
        if omega > 0.0 && omega.is_finite() {
            Ok(Self { omega })
        } else {
            Err(UnitError::InvalidQubitFrequency(omega))
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl Default for QubitSpec {
    fn default() -> Self {
        Self { omega: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_nonpositive_reference() {
        assert!(FrequencyUnit::new(0.0).is_err());
        assert!(FrequencyUnit::new(-1.0).is_err());
        assert!(FrequencyUnit::new(f64::NAN).is_err());
        assert!(QubitSpec::new(0.0).is_err());
        assert_eq!(QubitSpec::default().omega(), 1.0);
    }

    #[test]
    fn qubit_energy_is_one_internal_unit() {
        // 5 GHz qubit
        let omega = 2.0 * std::f64::consts::PI * 5e9;
        let unit = FrequencyUnit::new(omega).unwrap();
        let e = HBAR * omega;
        assert!((unit.energy_to_internal(e) - 1.0).abs() < 1e-15);
        assert!((unit.frequency_to_internal(omega) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn round_trips_reproduce_input(
            omega_ref in 1e3f64..1e12,
            x in -1e15f64..1e15,
        ) {
            let unit = FrequencyUnit::new(omega_ref).unwrap();
            let tol = 4.0 * f64::EPSILON * x.abs();
            prop_assert!((unit.frequency_from_internal(unit.frequency_to_internal(x)) - x).abs() <= tol);
            prop_assert!((unit.time_from_internal(unit.time_to_internal(x)) - x).abs() <= tol);
            let e = x * 1e-30;
            prop_assert!((unit.energy_from_internal(unit.energy_to_internal(e)) - e).abs() <= 4.0 * f64::EPSILON * e.abs());
        }
    }
}
