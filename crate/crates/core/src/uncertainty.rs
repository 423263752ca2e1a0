//! Position-uncertainty budget for STM imaging of surface-state electrons.
//!
//! The chain runs band energy → momentum spread `Δp = √(2 m ΔE)` →
//! position spread `Δx = c ħ / Δp`, where `c` is the prefactor convention
//! (1/2 for `Δx Δp ≥ ħ/2`, 1 for `Δx Δp ≥ ħ`). The whole band energy is
//! assigned to the measured axis. The inverse chain gives the energy an
//! electron would need for `Δx` to fit inside the lateral resolution.

use serde::{Deserialize, Serialize};

use crate::constants::{ELECTRON_MASS_SI, ELEMENTARY_CHARGE_SI, HBAR_SI, MILLI_ELECTRONVOLT, PICOMETRE};
use crate::error::{Error, Result};

pub const DEFAULT_CONVENTION: f64 = 0.5;

fn positive(param: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(param, format!("must be positive and finite, got {x}")))
    }
}

/// `Δp = √(2 m ΔE)` in kg·m/s, `band_energy_ev` in eV.
pub fn momentum_uncertainty(band_energy_ev: f64, mass: f64) -> Result<f64> {
    positive("band_energy", band_energy_ev)?;
    positive("mass", mass)?;
    Ok((2.0 * mass * band_energy_ev * ELEMENTARY_CHARGE_SI).sqrt())
}

/// `Δx = c ħ / Δp`, in picometres.
pub fn position_uncertainty(dp: f64, convention_factor: f64) -> Result<f64> {
    positive("dp", dp)?;
    positive("convention", convention_factor)?;
    Ok(convention_factor * HBAR_SI / dp / PICOMETRE)
}

/// `Δz / z0`.
pub fn relative_feature_error(feature_height_pm: f64, height_error_pm: f64) -> Result<f64> {
    positive("feature_height", feature_height_pm)?;
    if !(height_error_pm.is_finite() && height_error_pm >= 0.0) {
        return Err(Error::domain("height_error", "must be finite and >= 0"));
    }
    Ok(height_error_pm / feature_height_pm)
}

/// Energy in eV at which `Δx` shrinks to `target_dx_pm`:
/// `Δp = c ħ / Δx`, `E = Δp² / 2m`.
pub fn compliance_energy(target_dx_pm: f64, mass: f64, convention_factor: f64) -> Result<f64> {
    positive("target_dx", target_dx_pm)?;
    positive("mass", mass)?;
    positive("convention", convention_factor)?;
    let dp = convention_factor * HBAR_SI / (target_dx_pm * PICOMETRE);
    Ok(dp * dp / (2.0 * mass) / ELEMENTARY_CHARGE_SI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetInputs {
    pub band_energy_mev: f64,
    pub mass: f64,
    pub lateral_resolution_pm: f64,
    pub feature_height_pm: f64,
    pub height_error_pm: f64,
    pub convention_factor: f64,
}

impl Default for BudgetInputs {
    /// Silver surface state: 80 meV band, 20 pm lateral resolution, a 30 pm
    /// feature measured to 0.1 pm.
    fn default() -> Self {
        Self {
            band_energy_mev: 80.0,
            mass: ELECTRON_MASS_SI,
            lateral_resolution_pm: 20.0,
            feature_height_pm: 30.0,
            height_error_pm: 0.1,
            convention_factor: DEFAULT_CONVENTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBudget {
    pub band_energy: f64,
    pub mass: f64,
    pub dp: f64,
    pub dx: f64,
    pub lateral_resolution: f64,
    pub feature_height: f64,
    pub height_error: f64,
    pub relative_error: f64,
    pub compliance_energy: f64,
    pub convention_factor: f64,
    /// `dx > lateral_resolution`: the imaged pattern is sharper than the bound allows.
    pub contradiction: bool,
}

/// Energies in eV, lengths in pm, mass in kg, momentum in kg·m/s.
pub fn budget_report(inputs: &BudgetInputs) -> Result<UncertaintyBudget> {
    positive("lateral_resolution", inputs.lateral_resolution_pm)?;
    let band_energy = inputs.band_energy_mev * MILLI_ELECTRONVOLT;
    let dp = momentum_uncertainty(band_energy, inputs.mass)?;
    let dx = position_uncertainty(dp, inputs.convention_factor)?;
    let relative_error = relative_feature_error(inputs.feature_height_pm, inputs.height_error_pm)?;
    let compliance = compliance_energy(
        inputs.lateral_resolution_pm,
        inputs.mass,
        inputs.convention_factor,
    )?;
    Ok(UncertaintyBudget {
        band_energy,
        mass: inputs.mass,
        dp,
        dx,
        lateral_resolution: inputs.lateral_resolution_pm,
        feature_height: inputs.feature_height_pm,
        height_error: inputs.height_error_pm,
        relative_error,
        compliance_energy: compliance,
        convention_factor: inputs.convention_factor,
        contradiction: dx > inputs.lateral_resolution_pm,
    })
}
