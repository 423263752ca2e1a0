//! Plane-wave model of an extended electron moving along `e3`.
//!
//! The electron carries an oscillating mass density `ρ` and transverse
//! intrinsic fields `E ∥ e1`, `H ∥ e2` that store the energy the density
//! gives up, so that the local energy density stays at `ρ0 u² / 2`. Their
//! geometric product is the spin bivector `I e3 = e12`. The wavefunction
//! is the even multivector `ψ = ρ^½ + I e3 S^½` with `ψ* ψ = ρ + S = ρ0`.
//!
//! Wavelength and frequency follow the de Broglie closure
//! `λ = 2πħ / (m u)`, `ν = m u² / (4πħ)`, so that `ω = m u² / 2ħ` and
//! `k = m u / ħ`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::UnitSystem;
use crate::error::{Error, Result};
use crate::ga3::Multivector3;

/// How far `phi` may sit from π/2 for the closed-form spin to apply.
pub const PHASE_TOLERANCE: f64 = 1e-12;

/// Relative tolerance on `ρ0 V = m` in [`PlaneWaveElectron::total_energy`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Sign of the spin relative to the direction of motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }
}

impl FromStr for Helicity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "+1" => Ok(Helicity::Plus),
            "-" | "minus" | "-1" => Ok(Helicity::Minus),
            other => Err(Error::domain(
                "helicity",
                format!("expected + or -, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for Helicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Helicity::Plus => "+",
            Helicity::Minus => "-",
        })
    }
}

/// Free-particle dispersion `ω(k) = ħ k² / 2m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub mass: f64,
    pub hbar: f64,
}

impl Dispersion {
    pub fn omega(&self, k: f64) -> f64 {
        self.hbar * k * k / (2.0 * self.mass)
    }

    /// `k = m u / ħ`.
    pub fn wavenumber(&self, u: f64) -> f64 {
        self.mass * u / self.hbar
    }

    /// `dω/dk = ħ k / m`, evaluated at the wavenumber of velocity `u`.
    /// Defined for `u = 0`, where it vanishes.
    pub fn group_velocity(&self, u: f64) -> f64 {
        self.hbar * self.wavenumber(u) / self.mass
    }
}

/// Inputs to [`PlaneWaveElectron::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectronParams {
    pub rho0: f64,
    pub u: f64,
    pub helicity: Helicity,
    /// Field phase; the closed forms for spin and wavefunction need π/2.
    pub phi: f64,
    pub mass: f64,
    /// Share of `ρ0 u² / 2` carried by `ε0 E0² / 2`; the rest is magnetic.
    pub electric_fraction: f64,
    pub units: UnitSystem,
}

impl Default for ElectronParams {
    fn default() -> Self {
        Self {
            rho0: 1.0,
            u: 1.0,
            helicity: Helicity::Plus,
            phi: FRAC_PI_2,
            mass: 1.0,
            electric_fraction: 0.5,
            units: UnitSystem::atomic(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneWaveElectron {
    params: ElectronParams,
    e0: f64,
    h0: f64,
    lambda: f64,
    nu: f64,
}

/// One sample of the multivector wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionSample {
    pub psi: Multivector3,
    pub z: f64,
    pub t: f64,
}

impl WavefunctionSample {
    /// Coefficient of `I e3 = e12`.
    pub fn pseudo(&self) -> f64 {
        self.psi.b12
    }

    /// `ψ*`: the pseudovector part changes sign.
    pub fn conj(&self) -> Self {
        Self {
            psi: self.psi.reverse(),
            ..*self
        }
    }

    /// `ψ* ψ` as a full multivector.
    pub fn born(&self) -> Multivector3 {
        self.conj().psi.gp(self.psi)
    }
}

pub fn conj(w: &WavefunctionSample) -> WavefunctionSample {
    w.conj()
}

/// One row of a profile dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub z: f64,
    pub t: f64,
    pub rho: f64,
    pub omega_kin: f64,
    pub omega_field: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub psi_scalar: f64,
    pub psi_pseudo: f64,
}

impl ProfileRow {
    pub const HEADER: [&'static str; 8] = [
        "z",
        "t",
        "rho",
        "omega_kin",
        "omega_field",
        "S",
        "psi_scalar",
        "psi_pseudo",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.z,
            self.t,
            self.rho,
            self.omega_kin,
            self.omega_field,
            self.s,
            self.psi_scalar,
            self.psi_pseudo,
        ]
    }
}

fn positive_finite(param: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(param, format!("must be positive and finite, got {x}")))
    }
}

impl PlaneWaveElectron {
    pub fn new(params: ElectronParams) -> Result<Self> {
        positive_finite("rho0", params.rho0)?;
        positive_finite("u", params.u)?;
        positive_finite("mass", params.mass)?;
        positive_finite("hbar", params.units.hbar)?;
        positive_finite("eps0", params.units.eps0)?;
        positive_finite("mu0", params.units.mu0)?;
        if !params.phi.is_finite() {
            return Err(Error::domain("phi", "must be finite"));
        }
        if !(0.0..=1.0).contains(&params.electric_fraction) {
            return Err(Error::domain(
                "electric_fraction",
                format!("must lie in [0, 1], got {}", params.electric_fraction),
            ));
        }
        let energy = params.rho0 * params.u * params.u;
        let e0 = (params.electric_fraction * energy / params.units.eps0).sqrt();
        let h0 = ((1.0 - params.electric_fraction) * energy / params.units.mu0).sqrt();
        let mu = params.mass * params.u;
        let lambda = TAU * params.units.hbar / mu;
        let nu = mu * params.u / (2.0 * TAU * params.units.hbar);
        Ok(Self {
            params,
            e0,
            h0,
            lambda,
            nu,
        })
    }

    pub fn params(&self) -> &ElectronParams {
        &self.params
    }
    pub fn rho0(&self) -> f64 {
        self.params.rho0
    }
    pub fn u(&self) -> f64 {
        self.params.u
    }
    pub fn mass(&self) -> f64 {
        self.params.mass
    }
    pub fn helicity(&self) -> Helicity {
        self.params.helicity
    }
    pub fn e0(&self) -> f64 {
        self.e0
    }
    pub fn h0(&self) -> f64 {
        self.h0
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    /// `S0 = ρ0`.
    pub fn s0(&self) -> f64 {
        self.params.rho0
    }

    /// `ε0 E0² / 2 + μ0 H0² / 2`.
    pub fn field_amplitude_energy(&self) -> f64 {
        let units = &self.params.units;
        0.5 * units.eps0 * self.e0 * self.e0 + 0.5 * units.mu0 * self.h0 * self.h0
    }

    pub fn dispersion(&self) -> Dispersion {
        Dispersion {
            mass: self.params.mass,
            hbar: self.params.units.hbar,
        }
    }

    /// `2π z / λ - 2π ν t`.
    pub fn phase(&self, z: f64, t: f64) -> f64 {
        TAU * z / self.lambda - TAU * self.nu * t
    }

    fn require_quadrature_phase(&self) -> Result<()> {
        if (self.params.phi - FRAC_PI_2).abs() > PHASE_TOLERANCE {
            return Err(Error::Unsupported(format!(
                "closed-form spin requires phi = pi/2, got {}",
                self.params.phi
            )));
        }
        Ok(())
    }

    /// `ρ = (ρ0/2) [1 + cos(4π z/λ - 4π ν t)]`.
    pub fn density(&self, z: f64, t: f64) -> f64 {
        let arg = 2.0 * TAU * z / self.lambda - 2.0 * TAU * self.nu * t;
        0.5 * self.params.rho0 * (1.0 + arg.cos())
    }

    /// `S = S0 sin²(2π z/λ - 2π ν t)`.
    pub fn spin_density(&self, z: f64, t: f64) -> f64 {
        let s = self.phase(z, t).sin();
        self.s0() * s * s
    }

    /// `ω_kin = (ρ0 u²/2) cos²(2π z/λ - 2π ν t)`.
    pub fn kinetic_energy_density(&self, z: f64, t: f64) -> f64 {
        let c = self.phase(z, t).cos();
        0.5 * self.params.rho0 * self.params.u * self.params.u * c * c
    }

    /// Transverse fields. Negative helicity reverses `H`, which reverses the spin.
    pub fn fields(&self, z: f64, t: f64) -> (Multivector3, Multivector3) {
        let c = (self.phase(z, t) + self.params.phi).cos();
        let e = Multivector3::vector(self.e0 * c, 0.0, 0.0);
        let h = Multivector3::vector(0.0, self.params.helicity.sign() * self.h0 * c, 0.0);
        (e, h)
    }

    /// Closed-form spin `I e3 E0 H0 sin²(…)`, equal to `E H` when `phi = π/2`.
    pub fn spin(&self, z: f64, t: f64) -> Result<Multivector3> {
        self.require_quadrature_phase()?;
        let s = self.phase(z, t).sin();
        let mag = self.params.helicity.sign() * self.e0 * self.h0 * s * s;
        Ok(Multivector3::I.gp(Multivector3::E3).scale(mag))
    }

    /// `ε0 E²/2 + μ0 H²/2` of the fields at `(z, t)`; with `phi = π/2` this is
    /// `(ε0 E0²/2 + μ0 H0²/2) sin²(…)`.
    pub fn field_energy_density(&self, z: f64, t: f64) -> f64 {
        let c = (self.phase(z, t) + self.params.phi).cos();
        self.field_amplitude_energy() * c * c
    }

    /// `W = ∫ ρ0 u²/2 dV = m u²/2` for an extension `volume` with `ρ0 V = m`.
    pub fn total_energy(&self, volume: f64) -> Result<f64> {
        positive_finite("volume", volume)?;
        let m = self.params.mass;
        if (self.params.rho0 * volume - m).abs() > NORMALIZATION_TOLERANCE * m {
            return Err(Error::domain(
                "volume",
                format!(
                    "rho0 * volume = {} does not match mass {m}",
                    self.params.rho0 * volume
                ),
            ));
        }
        Ok(0.5 * m * self.params.u * self.params.u)
    }

    /// `ψ = ρ^½ ± I e3 S^½`, sign from helicity.
    pub fn wavefunction(&self, z: f64, t: f64) -> Result<WavefunctionSample> {
        self.require_quadrature_phase()?;
        let rho = self.density(z, t).max(0.0);
        let s = self.spin_density(z, t);
        let mut psi = Multivector3::scalar(rho.sqrt());
        psi.b12 = self.params.helicity.sign() * s.sqrt();
        Ok(WavefunctionSample { psi, z, t })
    }

    /// Reduced complex form `ρ0^½ exp[i(2π z/λ - 2π ν t)]`.
    pub fn schrodinger_wave(&self, z: f64, t: f64) -> Complex64 {
        Complex64::from_polar(self.params.rho0.sqrt(), self.phase(z, t))
    }

    pub fn group_velocity(&self) -> f64 {
        self.dispersion().group_velocity(self.params.u)
    }

    /// One explicit step of `F = -∇φ = ρ0 du/dt` along `e3`. Wavelength,
    /// frequency and field amplitudes are rederived from the new velocity.
    pub fn ehrenfest_step(&self, grad_potential: [f64; 3], dt: f64) -> Result<Self> {
        positive_finite("dt", dt)?;
        if grad_potential[0] != 0.0 || grad_potential[1] != 0.0 {
            return Err(Error::domain(
                "grad_potential",
                "only a force along the direction of motion (e3) is modelled",
            ));
        }
        if !grad_potential[2].is_finite() {
            return Err(Error::domain("grad_potential", "must be finite"));
        }
        let u = self.params.u - grad_potential[2] / self.params.rho0 * dt;
        if !(u > 0.0) {
            return Err(Error::domain(
                "u",
                format!("step drives the velocity to {u}; the model needs u > 0"),
            ));
        }
        Self::new(ElectronParams { u, ..self.params })
    }

    /// Central differences `(dS/dt, dρ/dt)` at `(z, t)`.
    pub fn complementarity_check(&self, z: f64, t: f64, dt: f64) -> Result<(f64, f64)> {
        positive_finite("dt", dt)?;
        let ds = (self.spin_density(z, t + dt) - self.spin_density(z, t - dt)) / (2.0 * dt);
        let drho = (self.density(z, t + dt) - self.density(z, t - dt)) / (2.0 * dt);
        Ok((ds, drho))
    }

    pub fn profile_row(&self, z: f64, t: f64) -> Result<ProfileRow> {
        let w = self.wavefunction(z, t)?;
        Ok(ProfileRow {
            z,
            t,
            rho: self.density(z, t),
            omega_kin: self.kinetic_energy_density(z, t),
            omega_field: self.field_energy_density(z, t),
            s: self.spin_density(z, t),
            psi_scalar: w.psi.s,
            psi_pseudo: w.pseudo(),
        })
    }

    /// `points` evenly spaced samples on `[zmin, zmax]` at time `t`.
    pub fn profile(&self, zmin: f64, zmax: f64, points: usize, t: f64) -> Result<Vec<ProfileRow>> {
        if points == 0 {
            return Err(Error::domain("points", "profile needs at least one point"));
        }
        if !(zmin.is_finite() && zmax.is_finite()) || zmax < zmin {
            return Err(Error::domain("zmax", "window must satisfy zmin <= zmax"));
        }
        let step = if points > 1 {
            (zmax - zmin) / (points - 1) as f64
        } else {
            0.0
        };
        (0..points)
            .map(|k| self.profile_row(zmin + step * k as f64, t))
            .collect()
    }
}

/// Analytic `dρ/dt = 2πν ρ0 sin(4π z/λ - 4π ν t)`.
pub fn analytic_density_rate(e: &PlaneWaveElectron, z: f64, t: f64) -> f64 {
    let arg = 4.0 * PI * z / e.lambda() - 4.0 * PI * e.nu() * t;
    TAU * e.nu() * e.rho0() * arg.sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::UnitSystem;
    use proptest::prelude::*;

    fn electron(rho0: f64, u: f64, helicity: Helicity) -> PlaneWaveElectron {
        PlaneWaveElectron::new(ElectronParams {
            rho0,
            u,
            helicity,
            ..ElectronParams::default()
        })
        .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn density_landmarks() {
        let e = electron(2.5, 1.3, Helicity::Plus);
        let l = e.lambda();
        assert_eq!(e.density(0.0, 0.0), 2.5);
        assert!(e.density(l / 4.0, 0.0).abs() < 1e-15);
        // cos(π/2) = 0 at z = λ/8
        assert!((e.density(l / 8.0, 0.0) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn kinetic_landmarks() {
        let e = electron(2.0, 3.0, Helicity::Plus);
        assert_eq!(e.kinetic_energy_density(0.0, 0.0), 9.0);
        assert!(e.kinetic_energy_density(e.lambda() / 4.0, 0.0) < 1e-14);
    }

    #[test]
    fn fields_at_quadrature_and_peak() {
        let e = electron(1.0, 1.0, Helicity::Plus);
        let (ef, hf) = e.fields(0.0, 0.0);
        assert!(ef.max_abs() < 1e-15 * e.e0() && hf.max_abs() < 1e-15 * e.h0());

        let peak = PlaneWaveElectron::new(ElectronParams {
            phi: 0.0,
            ..*e.params()
        })
        .unwrap();
        let (ef, hf) = peak.fields(0.0, 0.0);
        assert_eq!(ef, Multivector3::vector(e.e0(), 0.0, 0.0));
        assert_eq!(hf, Multivector3::vector(0.0, e.h0(), 0.0));
    }

    #[test]
    fn spin_landmarks() {
        let e = electron(1.0, 1.0, Helicity::Plus);
        assert_eq!(e.spin(0.0, 0.0).unwrap(), Multivector3::ZERO);
        let s = e.spin(e.lambda() / 4.0, 0.0).unwrap();
        let expected = Multivector3::I.gp(Multivector3::E3).scale(e.e0() * e.h0());
        assert!((s - expected).max_abs() < 1e-12 * e.e0() * e.h0());
    }

    #[test]
    fn spin_needs_quadrature_phase() {
        let e = PlaneWaveElectron::new(ElectronParams {
            phi: 0.3,
            ..ElectronParams::default()
        })
        .unwrap();
        assert!(matches!(e.spin(0.0, 0.0), Err(Error::Unsupported(_))));
        assert!(e.wavefunction(0.0, 0.0).is_err());
    }

    #[test]
    fn field_energy_landmarks() {
        let e = electron(1.7, 0.8, Helicity::Minus);
        assert!(e.field_energy_density(0.0, 0.0) < 1e-15);
        let full = 0.5 * 1.7 * 0.64;
        assert!(rel(e.field_energy_density(e.lambda() / 4.0, 0.0), full) < 1e-12);
    }

    #[test]
    fn amplitude_constraint_with_split() {
        for f in [0.0, 0.25, 0.5, 1.0] {
            let e = PlaneWaveElectron::new(ElectronParams {
                rho0: 3.0,
                u: 0.7,
                electric_fraction: f,
                units: UnitSystem::si(),
                ..ElectronParams::default()
            })
            .unwrap();
            assert!(rel(e.field_amplitude_energy(), 0.5 * 3.0 * 0.49) < 1e-12);
        }
        let eq = electron(1.0, 2.0, Helicity::Plus);
        let units = UnitSystem::atomic();
        assert!(rel(units.eps0 * eq.e0().powi(2), units.mu0 * eq.h0().powi(2)) < 1e-12);
    }

    #[test]
    fn total_energy_and_normalization() {
        let e = PlaneWaveElectron::new(ElectronParams {
            rho0: 1.0,
            u: 2.0,
            mass: 3.0,
            ..ElectronParams::default()
        })
        .unwrap();
        assert_eq!(e.total_energy(3.0).unwrap(), 6.0);
        assert!(e.total_energy(2.0).is_err());
        assert!(e.total_energy(-1.0).is_err());
    }

    #[test]
    fn total_energy_matches_trapezoid_quadrature() {
        let e = PlaneWaveElectron::new(ElectronParams {
            rho0: 0.8,
            u: 1.9,
            mass: 2.4,
            ..ElectronParams::default()
        })
        .unwrap();
        let volume = e.mass() / e.rho0();
        let area = volume / e.lambda();
        let n = 4096;
        let h = e.lambda() / n as f64;
        let t = 0.37;
        let f = |z: f64| e.kinetic_energy_density(z, t) + e.field_energy_density(z, t);
        let mut sum = 0.5 * (f(0.0) + f(e.lambda()));
        for k in 1..n {
            sum += f(k as f64 * h);
        }
        let integral = sum * h * area;
        assert!(rel(integral, e.total_energy(volume).unwrap()) < 1e-9);
    }

    #[test]
    fn wavefunction_landmarks() {
        let e = electron(4.0, 1.0, Helicity::Plus);
        let w0 = e.wavefunction(0.0, 0.0).unwrap();
        assert_eq!(w0.psi, Multivector3::scalar(2.0));
        let wq = e.wavefunction(e.lambda() / 4.0, 0.0).unwrap();
        let expected = Multivector3::I.gp(Multivector3::E3).scale(2.0);
        assert!((wq.psi - expected).max_abs() < 1e-7);
        let neg = electron(4.0, 1.0, Helicity::Minus)
            .wavefunction(e.lambda() / 4.0, 0.0)
            .unwrap();
        assert!((neg.psi + expected).max_abs() < 1e-7);
    }

    #[test]
    fn conjugation_flips_pseudovector() {
        let w = WavefunctionSample {
            psi: Multivector3 {
                s: 0.6,
                b12: 0.8,
                ..Multivector3::ZERO
            },
            z: 1.0,
            t: 2.0,
        };
        let c = conj(&w);
        assert_eq!(c.psi.s, 0.6);
        assert_eq!(c.psi.b12, -0.8);
        assert_eq!(c.conj(), w);
        assert_eq!(w.born(), Multivector3::scalar(1.0));
    }

    #[test]
    fn schrodinger_wave_landmarks() {
        let e = electron(9.0, 1.0, Helicity::Plus);
        assert_eq!(e.schrodinger_wave(0.0, 0.0), Complex64::new(3.0, 0.0));
        let w = e.schrodinger_wave(e.lambda() / 8.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2 * 3.0;
        assert!((w.re - r).abs() < 1e-14 && (w.im - r).abs() < 1e-14);
    }

    #[test]
    fn group_velocity_examples() {
        let si = ElectronParams {
            u: 1e6,
            mass: crate::constants::ELECTRON_MASS_SI,
            units: UnitSystem::si(),
            ..ElectronParams::default()
        };
        let e = PlaneWaveElectron::new(si).unwrap();
        assert!(rel(e.group_velocity(), 1e6) < 1e-15);
        assert_eq!(e.dispersion().group_velocity(0.0), 0.0);
    }

    #[test]
    fn group_velocity_by_finite_difference() {
        let e = electron(1.0, 0.37, Helicity::Plus);
        let d = e.dispersion();
        let k = d.wavenumber(e.u());
        let h = 1e-6 * k;
        let fd = (d.omega(k + h) - d.omega(k - h)) / (2.0 * h);
        assert!(rel(fd, e.u()) < 1e-6);
    }

    #[test]
    fn dispersion_closure_matches_wave_parameters() {
        let e = electron(1.0, 1.7, Helicity::Plus);
        let d = e.dispersion();
        let k = d.wavenumber(e.u());
        assert!(rel(TAU / e.lambda(), k) < 1e-15);
        assert!(rel(TAU * e.nu(), d.omega(k)) < 1e-15);
    }

    #[test]
    fn ehrenfest_zero_force_is_identity() {
        let e = electron(1.3, 0.9, Helicity::Minus);
        assert_eq!(e.ehrenfest_step([0.0; 3], 0.1).unwrap(), e);
    }

    #[test]
    fn ehrenfest_constant_force_is_linear() {
        let rho0 = 1.3;
        let mut e = electron(rho0, 2.0, Helicity::Plus);
        let grad = 0.05;
        let dt = 1e-3;
        let n = 1000;
        for _ in 0..n {
            e = e.ehrenfest_step([0.0, 0.0, grad], dt).unwrap();
            assert!(rel(e.field_amplitude_energy(), 0.5 * rho0 * e.u() * e.u()) < 1e-12);
        }
        let expected = 2.0 - grad / rho0 * n as f64 * dt;
        assert!((e.u() - expected).abs() < 1e-9);
        let fresh = electron(rho0, e.u(), Helicity::Plus);
        assert!(rel(e.lambda(), fresh.lambda()) < 1e-15);
        assert!(rel(e.nu(), fresh.nu()) < 1e-15);
    }

    #[test]
    fn ehrenfest_rejects_stopping_and_transverse_forces() {
        let e = electron(1.0, 0.1, Helicity::Plus);
        assert!(e.ehrenfest_step([0.0, 0.0, 1.0], 1.0).is_err());
        assert!(e.ehrenfest_step([1.0, 0.0, 0.0], 1.0).is_err());
        assert!(e.ehrenfest_step([0.0, 0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn complementarity_at_density_peak() {
        let e = electron(1.0, 1.0, Helicity::Plus);
        let (ds, drho) = e.complementarity_check(0.0, 0.0, 1e-4 / e.nu()).unwrap();
        assert!(drho.abs() < 1e-12 * e.nu());
        assert!(ds.abs() < 1e-12 * e.nu());
    }

    #[test]
    fn constructor_rejects_degenerate_inputs() {
        for p in [
            ElectronParams { u: 0.0, ..Default::default() },
            ElectronParams { rho0: -1.0, ..Default::default() },
            ElectronParams { mass: 0.0, ..Default::default() },
            ElectronParams { electric_fraction: 1.5, ..Default::default() },
            ElectronParams { phi: f64::NAN, ..Default::default() },
        ] {
            assert!(PlaneWaveElectron::new(p).is_err());
        }
    }

    #[test]
    fn profile_grid() {
        let e = electron(1.0, 1.0, Helicity::Plus);
        assert!(e.profile(0.0, 1.0, 0, 0.0).is_err());
        assert!(e.profile(1.0, 0.0, 3, 0.0).is_err());
        let rows = e.profile(0.0, e.lambda(), 5, 0.0).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].z, 0.0);
        assert!((rows[4].z - e.lambda()).abs() < 1e-15);
        assert_eq!(e.profile(0.5, 0.5, 1, 0.0).unwrap().len(), 1);
    }

    #[test]
    fn helicity_parsing() {
        assert_eq!("+".parse::<Helicity>().unwrap(), Helicity::Plus);
        assert_eq!("minus".parse::<Helicity>().unwrap(), Helicity::Minus);
        assert!("up".parse::<Helicity>().is_err());
    }

    fn any_electron() -> impl Strategy<Value = PlaneWaveElectron> {
        (0.1..10.0f64, 0.05..5.0f64, any::<bool>(), 0.5..3.0f64).prop_map(|(rho0, u, plus, m)| {
            PlaneWaveElectron::new(ElectronParams {
                rho0,
                u,
                mass: m,
                helicity: if plus { Helicity::Plus } else { Helicity::Minus },
                ..ElectronParams::default()
            })
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn born_rule_is_constant(e in any_electron(), z in -50.0..50.0f64, t in -50.0..50.0f64) {
            let w = e.wavefunction(z, t).unwrap();
            let b = w.born();
            prop_assert!(rel(b.s, e.rho0()) < 1e-12);
            prop_assert!((b - Multivector3::scalar(b.s)).max_abs() < 1e-12);
            prop_assert_eq!(w.psi.grade(1).unwrap(), Multivector3::ZERO);
            prop_assert_eq!(w.psi.grade(3).unwrap(), Multivector3::ZERO);
        }

        #[test]
        fn energy_is_conserved_pointwise(e in any_electron(), z in -50.0..50.0f64, t in -50.0..50.0f64) {
            let total = e.kinetic_energy_density(z, t) + e.field_energy_density(z, t);
            prop_assert!(rel(total, 0.5 * e.rho0() * e.u() * e.u()) < 1e-12);
        }

        #[test]
        fn kinetic_is_density_times_half_u_squared(e in any_electron(), z in -50.0..50.0f64, t in -50.0..50.0f64) {
            let scale = 0.5 * e.rho0() * e.u() * e.u();
            let diff = e.kinetic_energy_density(z, t) - 0.5 * e.density(z, t) * e.u() * e.u();
            prop_assert!(diff.abs() <= 1e-12 * scale);
        }

        #[test]
        fn density_plus_spin_is_rho0(e in any_electron(), z in -50.0..50.0f64, t in -50.0..50.0f64) {
            prop_assert!(rel(e.density(z, t) + e.spin_density(z, t), e.rho0()) < 1e-12);
            let rho = e.density(z, t);
            prop_assert!((-1e-15..=e.rho0() * (1.0 + 1e-15)).contains(&rho));
        }

        #[test]
        fn spin_is_product_of_fields(e in any_electron(), z in -50.0..50.0f64, t in -50.0..50.0f64) {
            let (ef, hf) = e.fields(z, t);
            let scale = e.e0() * e.h0();
            prop_assert!((ef.gp(hf) - e.spin(z, t).unwrap()).max_abs() <= 1e-12 * scale);
            prop_assert_eq!(ef.dot(Multivector3::E3), 0.0);
            prop_assert_eq!(hf.dot(Multivector3::E3), 0.0);
        }

        #[test]
        fn periodicity(e in any_electron(), z in -5.0..5.0f64, t in -5.0..5.0f64) {
            let l = e.lambda();
            prop_assert!((e.density(z + l / 2.0, t) - e.density(z, t)).abs() < 1e-9 * e.rho0());
            let a = e.schrodinger_wave(z + l, t);
            let b = e.schrodinger_wave(z, t);
            prop_assert!((a - b).norm() < 1e-9 * e.rho0().sqrt());
            prop_assert!(rel(b.norm_sqr(), e.rho0()) < 1e-12);
        }

        #[test]
        fn complementarity_matches_analytic_rate(e in any_electron(), z in -5.0..5.0f64, t in -5.0..5.0f64) {
            let dt = 1e-4 / e.nu();
            let (ds, drho) = e.complementarity_check(z, t, dt).unwrap();
            let scale = e.rho0() * e.nu();
            prop_assert!((ds + drho).abs() < 1e-8 * scale);
            // central-difference truncation: (4π·1e-4)²/6 · 2π ≈ 1.7e-6
            prop_assert!((drho - analytic_density_rate(&e, z, t)).abs() < 1e-5 * scale);
        }
    }
}
