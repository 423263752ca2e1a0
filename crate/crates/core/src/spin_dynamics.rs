//! Spin-direction dynamics under a ramping magnetic field.
//!
//! The unit spin direction `e_s` evolves as
//!
//! ```text
//! de_s/dt = κ · e_s × (u × dB/dt)
//! ```
//!
//! which is orthogonal to `e_s`, so the exact flow keeps `|e_s| = 1`. The
//! integrator is classical fixed-step RK4 with a renormalisation after
//! every step. The final direction is classified against the field axis to
//! give the sign of a Stern-Gerlach deflection.
//!
//! With constant `u` and `dB/dt` the flow is a rigid precession about
//! `u × dB/dt`; it does not by itself settle parallel or antiparallel to
//! `B`. The classification reports where the spin is at the end of the
//! ramp, nothing more.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Largest step count [`integrate`] accepts.
pub const MAX_STEPS: f64 = 1e9;

/// Accepted deviation of `|e_s|` from one for input states.
pub const UNIT_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const X: Self = Self::new(1.0, 0.0, 0.0);
    pub const Y: Self = Self::new(0.0, 1.0, 0.0);
    pub const Z: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::domain("vector", "cannot normalise a zero or non-finite vector"));
        }
        Ok(self * (1.0 / n))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Spin `S = e_s · S_mag`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    pub e_s: Vec3,
    pub s_mag: f64,
}

impl SpinState {
    pub fn new(direction: Vec3, s_mag: f64) -> Result<Self> {
        if !(s_mag.is_finite() && s_mag >= 0.0) {
            return Err(Error::domain("s_mag", "spin magnitude must be finite and >= 0"));
        }
        Ok(Self {
            e_s: direction.normalized()?,
            s_mag,
        })
    }

    pub fn spin(&self) -> Vec3 {
        self.e_s * self.s_mag
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampShape {
    /// `B(t) = rate · t`, constant `dB/dt = rate`.
    Linear,
    /// `dB/dt = rate · (π/2) · sin(π t / duration)`; same total field change
    /// as the linear ramp, switched on and off smoothly.
    Cosine,
}

impl FromStr for RampShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(RampShape::Linear),
            "cosine" => Ok(RampShape::Cosine),
            other => Err(Error::domain(
                "ramp",
                format!("expected linear or cosine, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for RampShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RampShape::Linear => "linear",
            RampShape::Cosine => "cosine",
        })
    }
}

/// Field switched on along `b_dir` over `[0, duration]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRamp {
    pub b_dir: Vec3,
    /// Mean ramp rate, tesla per second.
    pub rate: f64,
    pub duration: f64,
    pub shape: RampShape,
}

impl FieldRamp {
    pub fn new(b_dir: Vec3, rate: f64, duration: f64, shape: RampShape) -> Result<Self> {
        if !rate.is_finite() {
            return Err(Error::domain("brate", "ramp rate must be finite"));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::domain("duration", "duration must be positive"));
        }
        Ok(Self {
            b_dir: b_dir.normalized().map_err(|_| Error::domain("bdir", "field direction must be non-zero"))?,
            rate,
            duration,
            shape,
        })
    }

    pub fn linear(b_dir: Vec3, rate: f64, duration: f64) -> Result<Self> {
        Self::new(b_dir, rate, duration, RampShape::Linear)
    }

    /// `dB/dt` at time `t`.
    pub fn rate_at(&self, t: f64) -> Vec3 {
        let magnitude = match self.shape {
            RampShape::Linear => self.rate,
            RampShape::Cosine => {
                self.rate * FRAC_PI_2 * (std::f64::consts::PI * t / self.duration).sin()
            }
        };
        self.b_dir * magnitude
    }
}

/// Coupling, electron velocity and step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LLParams {
    pub kappa: f64,
    pub u: Vec3,
    pub dt: f64,
}

impl LLParams {
    pub fn new(kappa: f64, u: Vec3, dt: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::domain("kappa", "must be finite"));
        }
        if !u.is_finite() {
            return Err(Error::domain("u", "must be finite"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain("dt", "step size must be positive"));
        }
        Ok(Self { kappa, u, dt })
    }
}

/// `κ · e_s × (u × dB/dt)`.
pub fn ll_rhs(state: &SpinState, params: &LLParams, db_dt: Vec3) -> Vec3 {
    rhs(state.e_s, params.kappa, params.u, db_dt)
}

fn rhs(e_s: Vec3, kappa: f64, u: Vec3, db_dt: Vec3) -> Vec3 {
    e_s.cross(u.cross(db_dt)) * kappa
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: SpinState,
}

fn rk4_step(e: Vec3, t: f64, h: f64, ramp: &FieldRamp, params: &LLParams) -> Vec3 {
    let f = |e: Vec3, t: f64| rhs(e, params.kappa, params.u, ramp.rate_at(t));
    let k1 = f(e, t);
    let k2 = f(e + k1 * (0.5 * h), t + 0.5 * h);
    let k3 = f(e + k2 * (0.5 * h), t + 0.5 * h);
    let k4 = f(e + k3 * h, t + h);
    let next = e + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    next * (1.0 / next.norm())
}

fn step_plan(ramp: &FieldRamp, params: &LLParams) -> Result<usize> {
    let ratio = ramp.duration / params.dt;
    if ratio < 1.0 - 1e-12 {
        return Err(Error::Config(format!(
            "duration {} shorter than one step of {}",
            ramp.duration, params.dt
        )));
    }
    // absorb float noise so duration = n * dt gives exactly n steps
    let steps = (ratio - 1e-9).ceil().max(1.0);
    if steps > MAX_STEPS {
        return Err(Error::Config(format!(
            "{steps} steps exceeds the limit of {MAX_STEPS}"
        )));
    }
    Ok(steps as usize)
}

fn check_initial(state0: &SpinState) -> Result<()> {
    if (state0.e_s.norm() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::domain("e_s", "initial spin direction must be a unit vector"));
    }
    Ok(())
}

/// Runs the ramp, calling `visit` after every step with `(step, t, e_s)`.
/// The last step is shortened so the run ends exactly at `ramp.duration`.
fn propagate(
    state0: &SpinState,
    ramp: &FieldRamp,
    params: &LLParams,
    mut visit: impl FnMut(usize, f64, Vec3),
) -> Result<Vec3> {
    check_initial(state0)?;
    let steps = step_plan(ramp, params)?;
    let mut e = state0.e_s;
    for k in 0..steps {
        let t = k as f64 * params.dt;
        let t_next = if k + 1 == steps {
            ramp.duration
        } else {
            (k + 1) as f64 * params.dt
        };
        e = rk4_step(e, t, t_next - t, ramp, params);
        visit(k + 1, t_next, e);
    }
    Ok(e)
}

/// Full trajectory, one point per step plus the initial state.
pub fn integrate(
    state0: &SpinState,
    ramp: &FieldRamp,
    params: &LLParams,
) -> Result<Vec<TrajectoryPoint>> {
    integrate_strided(state0, ramp, params, 1)
}

/// Trajectory keeping every `stride`-th step; the final state is always kept.
pub fn integrate_strided(
    state0: &SpinState,
    ramp: &FieldRamp,
    params: &LLParams,
    stride: usize,
) -> Result<Vec<TrajectoryPoint>> {
    if stride == 0 {
        return Err(Error::domain("stride", "must be at least 1"));
    }
    let steps = step_plan(ramp, params)?;
    let mut out = Vec::with_capacity(steps / stride + 2);
    out.push(TrajectoryPoint {
        t: 0.0,
        state: *state0,
    });
    let s_mag = state0.s_mag;
    propagate(state0, ramp, params, |k, t, e| {
        if k % stride == 0 || k == steps {
            out.push(TrajectoryPoint {
                t,
                state: SpinState { e_s: e, s_mag },
            });
        }
    })?;
    Ok(out)
}

/// Final state only, with the largest `||e_s| - 1|` seen along the way.
pub fn final_state(
    state0: &SpinState,
    ramp: &FieldRamp,
    params: &LLParams,
) -> Result<(SpinState, f64)> {
    let mut worst = 0.0_f64;
    let e = propagate(state0, ramp, params, |_, _, e| {
        worst = worst.max((e.norm() - 1.0).abs());
    })?;
    Ok((
        SpinState {
            e_s: e,
            s_mag: state0.s_mag,
        },
        worst,
    ))
}

/// Final states for an ensemble of initial conditions.
pub fn integrate_ensemble(
    states: &[SpinState],
    ramp: &FieldRamp,
    params: &LLParams,
    exec: Execution,
) -> Result<Vec<SpinState>> {
    exec.map_slice(states, |s| final_state(s, ramp, params).map(|(f, _)| f))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Deflection {
    Parallel,
    Antiparallel,
    Unresolved,
}

/// Sign of `e_s · B_dir` against `threshold`.
pub fn classify_deflection(final_state: &SpinState, b_dir: Vec3, threshold: f64) -> Result<Deflection> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::domain("threshold", "must lie in (0, 1)"));
    }
    let d = final_state.e_s.dot(b_dir);
    Ok(if d > threshold {
        Deflection::Parallel
    } else if d < -threshold {
        Deflection::Antiparallel
    } else {
        Deflection::Unresolved
    })
}
