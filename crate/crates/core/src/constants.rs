//! Physical constants and the unit systems used by the model.

use serde::{Deserialize, Serialize};

/// Reduced Planck constant, J s (CODATA 2018, 1.054571817e-34).
pub const HBAR_SI: f64 = 1.05457182e-34;

/// Electron rest mass, kg (CODATA 2018, 9.1093837015e-31).
pub const ELECTRON_MASS_SI: f64 = 9.10938370e-31;

/// Elementary charge, C (CODATA 2018, exact 1.602176634e-19).
pub const ELEMENTARY_CHARGE_SI: f64 = 1.60217663e-19;

/// Inverse fine-structure constant (CODATA 2018, 137.035999084).
pub const INVERSE_FINE_STRUCTURE: f64 = 137.035999;

/// Cohesive potential stabilising the extended electron, eV. Reported only.
pub const COHESIVE_POTENTIAL_EV: f64 = -8.16;

pub const PICOMETRE: f64 = 1e-12;
pub const MILLI_ELECTRONVOLT: f64 = 1e-3;

/// The constants the electron model needs: ħ, ε0 and μ0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar: f64,
    pub eps0: f64,
    pub mu0: f64,
}

impl UnitSystem {
    /// Hartree atomic units: ħ = m_e = e = 4πε0 = 1, c = 1/α.
    pub fn atomic() -> Self {
        let four_pi = 4.0 * std::f64::consts::PI;
        let c = INVERSE_FINE_STRUCTURE;
        Self {
            hbar: 1.0,
            eps0: 1.0 / four_pi,
            mu0: four_pi / (c * c),
        }
    }

    pub fn si() -> Self {
        Self {
            hbar: HBAR_SI,
            eps0: 8.85418781e-12,
            mu0: 1.25663706e-6,
        }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::atomic()
    }
}
