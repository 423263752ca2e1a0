//! Local rotor-phase model of a two-photon EPR experiment.
//!
//! A polarizer rotation by `φ` acts on the photon fields through the rotor
//! `exp(±e12 φ)`; multiplying by the propagation axis `e3` turns the
//! bivector part into the pseudoscalar, so each rotation is a unit complex
//! phase: `R(A) = e^{iφ1}`, `R(B) = e^{-iφ2}`. Single detections depend on
//! an unknown initial phase `φ0`, uniform on `[0, 2π)`:
//!
//! ```text
//! p(A) = cos²(φ1 + φ0)        p(B) = cos²(φ2 + Δ + φ0)
//! ```
//!
//! and average to 1/2 for every setting. In the product `R(A) R(B)` the
//! initial phase cancels, giving `p(A,B) = cos²(φ1 - φ2)` and the
//! correlation `E = cos 2(φ1 - φ2)`.
//!
//! The model fixes single and joint probabilities but gives no per-trial
//! rule producing joint ± outcomes with both statistics at once; drawing A
//! and B independently over `φ0` yields `1/4 + cos 2(φ1 - φ2) / 8`, not
//! `cos²`. Coincidences here are therefore analytic, and only the single
//! rates are sampled.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ga3::{Multivector3, Rotor3};

/// Angular tolerance for recognising multiples of π/2 in [`conditional_outcome`].
pub const ANGLE_CLASS_TOLERANCE: f64 = 1e-9;

/// Trials per independently seeded substream in [`monte_carlo_singles`].
pub const MC_BATCH: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Side::A),
            "B" | "b" => Ok(Side::B),
            other => Err(Error::domain("side", format!("expected A or B, got `{other}`"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conditional {
    Plus,
    Minus,
    Undetermined,
}

impl From<Outcome> for Conditional {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Plus => Conditional::Plus,
            Outcome::Minus => Conditional::Minus,
        }
    }
}

/// Polarizer angles at A and B plus the source phase difference, radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AnalyzerPair {
    pub phi1: f64,
    pub phi2: f64,
    pub delta: f64,
}

impl AnalyzerPair {
    pub fn new(phi1: f64, phi2: f64) -> Self {
        Self {
            phi1,
            phi2,
            delta: 0.0,
        }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }

    pub fn from_degrees(phi1: f64, phi2: f64, delta: f64) -> Self {
        Self {
            phi1: phi1.to_radians(),
            phi2: phi2.to_radians(),
            delta: delta.to_radians(),
        }
    }

    /// `φ1 - (φ2 + Δ)`: the source phase folds into the B setting.
    pub fn difference(&self) -> f64 {
        self.phi1 - self.phi2 - self.delta
    }

    /// Angles reduced to `[0, 2π)` for reporting.
    pub fn reduced(&self) -> Self {
        Self {
            phi1: self.phi1.rem_euclid(TAU),
            phi2: self.phi2.rem_euclid(TAU),
            delta: self.delta.rem_euclid(TAU),
        }
    }
}

/// The four settings of a CHSH run, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub phi1: f64,
    pub phi1p: f64,
    pub phi2: f64,
    pub phi2p: f64,
}

impl ChshSettings {
    /// Order `(φ1, φ1', φ2, φ2')`.
    pub fn from_degrees(deg: [f64; 4]) -> Self {
        Self {
            phi1: deg[0].to_radians(),
            phi1p: deg[1].to_radians(),
            phi2: deg[2].to_radians(),
            phi2p: deg[3].to_radians(),
        }
    }

    /// `(0°, 45°, 22.5°, 67.5°)`.
    pub fn canonical() -> Self {
        Self::from_degrees([0.0, 45.0, 22.5, 67.5])
    }

    pub fn to_degrees(&self) -> [f64; 4] {
        [self.phi1, self.phi1p, self.phi2, self.phi2p].map(f64::to_degrees)
    }

    /// `[[E(φ1,φ2), E(φ1,φ2')], [E(φ1',φ2), E(φ1',φ2')]]`.
    pub fn expectation_matrix(&self) -> [[f64; 2]; 2] {
        let e = |a, b| expectation(&AnalyzerPair::new(a, b));
        [
            [e(self.phi1, self.phi2), e(self.phi1, self.phi2p)],
            [e(self.phi1p, self.phi2), e(self.phi1p, self.phi2p)],
        ]
    }
}

/// Coincidence counts set equal to coincidence probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceTable {
    pub cpp: f64,
    pub cmm: f64,
    pub cpm: f64,
    pub cmp: f64,
}

/// Uniform hidden initial phase on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenPhase(pub f64);

impl HiddenPhase {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        HiddenPhase(rng.random::<f64>() * TAU)
    }

    pub fn phasor(self) -> Complex64 {
        Complex64::from_polar(1.0, self.0)
    }
}

/// Substream `stream` of the seeded generator. Distinct streams are
/// independent, so work split by stream index is reproducible regardless
/// of which worker runs it.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `e^{+i angle}` for A, `e^{-i angle}` for B, built from the rotor
/// `exp(±e12 angle)` and read off after multiplying by `e3`.
pub fn rotor_phase(angle: f64, side: Side) -> Complex64 {
    let sense = match side {
        Side::A => 1.0,
        Side::B => -1.0,
    };
    // exp(-e12 θ/2) with θ = -2·sense·angle is cos(angle) + sense·e12·sin(angle)
    let r = Rotor3::new(Multivector3::E12, -2.0 * sense * angle)
        .expect("e12 is a unit bivector");
    let m = r.to_multivector();
    // (e12) e3 = I: the bivector coefficient becomes the imaginary part
    let lifted = m.gp(Multivector3::E3);
    Complex64::new(m.s, lifted.p)
}

/// `[Re(R · e^{±iφ0})]²`, i.e. `cos²(φ1 + φ0)` at A and `cos²(φ2 + Δ + φ0)` at B.
pub fn single_probability(angle: f64, side: Side, delta: f64, phi0: f64) -> f64 {
    let c = match side {
        Side::A => (angle + phi0).cos(),
        Side::B => (angle + delta + phi0).cos(),
    };
    c * c
}

/// `Some(true)` when `diff` is an even multiple of π/2, `Some(false)` when odd.
fn determinate_class(diff: f64) -> Option<bool> {
    let r = diff.rem_euclid(PI);
    if r < ANGLE_CLASS_TOLERANCE || PI - r < ANGLE_CLASS_TOLERANCE {
        Some(true)
    } else if (r - FRAC_PI_2).abs() < ANGLE_CLASS_TOLERANCE {
        Some(false)
    } else {
        None
    }
}

/// `cos²(φ1 - φ2 - Δ)`, exactly 1 or 0 at multiples of π/2.
pub fn coincidence_probability(s: &AnalyzerPair) -> f64 {
    match determinate_class(s.difference()) {
        Some(true) => 1.0,
        Some(false) => 0.0,
        None => {
            let c = s.difference().cos();
            c * c
        }
    }
}

/// Joint probability built from the rotor product with an explicit initial
/// phase, `[Re(R(A) e^{iφ0} · R(B) e^{-iφ0} · e^{-iΔ})]²`. The `φ0`
/// factors cancel, leaving [`coincidence_probability`].
pub fn coincidence_probability_with_phase(s: &AnalyzerPair, phi0: f64) -> f64 {
    let h = HiddenPhase(phi0).phasor();
    let product = rotor_phase(s.phi1, Side::A) * h
        * rotor_phase(s.phi2, Side::B)
        * h.conj()
        * Complex64::from_polar(1.0, -s.delta);
    product.re * product.re
}

pub fn coincidence_table(s: &AnalyzerPair) -> CoincidenceTable {
    let same = coincidence_probability(s);
    let opposite = 1.0 - same;
    CoincidenceTable {
        cpp: same,
        cmm: same,
        cpm: opposite,
        cmp: opposite,
    }
}

/// `E = 2 cos²(φ1 - φ2) - 1 = cos 2(φ1 - φ2)`.
pub fn expectation(s: &AnalyzerPair) -> f64 {
    (2.0 * s.difference()).cos()
}

/// `E(φ1,φ2) - E(φ1,φ2') + E(φ1',φ2) + E(φ1',φ2')`.
pub fn chsh_sum(c: &ChshSettings) -> f64 {
    let [[a, b], [d, e]] = c.expectation_matrix();
    a - b + d + e
}

/// Outcome at B implied by a known outcome at A. Determinate only when the
/// angle difference is a multiple of π/2: opposite at odd multiples, equal
/// at even multiples.
pub fn conditional_outcome(known_a: Outcome, s: &AnalyzerPair) -> Conditional {
    match determinate_class(s.difference()) {
        Some(true) => known_a.into(),
        Some(false) => known_a.flipped().into(),
        None => Conditional::Undetermined,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinglesResult {
    pub n: u64,
    pub hits: u64,
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / n)`.
    pub stderr: f64,
}

impl SinglesResult {
    fn from_counts(n: u64, hits: u64) -> Self {
        let rate = hits as f64 / n as f64;
        Self {
            n,
            hits,
            rate,
            stderr: (rate * (1.0 - rate) / n as f64).sqrt(),
        }
    }
}

/// Detection count for `n` photons at one analyzer, each with a fresh
/// uniform `φ0`, using the default execution strategy.
pub fn monte_carlo_singles(
    angle: f64,
    side: Side,
    delta: f64,
    n: u64,
    seed: u64,
) -> Result<SinglesResult> {
    monte_carlo_singles_with(angle, side, delta, n, seed, Execution::default())
}

/// As [`monte_carlo_singles`]. Trials are cut into fixed batches of
/// [`MC_BATCH`], batch `b` drawing from substream `b`; hit counts are
/// summed exactly, so the result depends only on `(seed, n)`.
pub fn monte_carlo_singles_with(
    angle: f64,
    side: Side,
    delta: f64,
    n: u64,
    seed: u64,
    exec: Execution,
) -> Result<SinglesResult> {
    if n == 0 {
        return Err(Error::domain("n", "need at least one trial"));
    }
    let batches = n.div_ceil(MC_BATCH);
    let hits = exec.sum_indexed(batches as usize, |b| {
        let b = b as u64;
        let len = MC_BATCH.min(n - b * MC_BATCH);
        let mut rng = substream(seed, b);
        let mut hits = 0;
        for _ in 0..len {
            let phi0 = HiddenPhase::sample(&mut rng).0;
            let p = single_probability(angle, side, delta, phi0);
            if rng.random::<f64>() < p {
                hits += 1;
            }
        }
        hits
    });
    Ok(SinglesResult::from_counts(n, hits))
}

/// `(Δφ in degrees, E)` for `Δφ = φ1 - φ2` on `[0°, 360°)` with step `step_deg`.
pub fn correlation_curve(step_deg: f64) -> Result<Vec<(f64, f64)>> {
    if !(step_deg.is_finite() && step_deg > 0.0 && step_deg <= 360.0) {
        return Err(Error::domain("curve_step_deg", "step must lie in (0, 360]"));
    }
    let n = (360.0 / step_deg - 1e-9).ceil() as usize;
    Ok((0..n)
        .map(|k| {
            let deg = k as f64 * step_deg;
            (deg, expectation(&AnalyzerPair::new(deg.to_radians(), 0.0)))
        })
        .collect())
}

/// Largest `|S|` over a grid of settings with spacing `180° / divisions`.
///
/// `S` depends only on angle differences and `E` has period π, so `φ1` is
/// pinned to zero and the other three settings range over `[0°, 180°)`.
pub fn chsh_grid_max(divisions: usize, exec: Execution) -> Result<(f64, ChshSettings)> {
    if divisions == 0 {
        return Err(Error::domain("divisions", "grid needs at least one division"));
    }
    let n = divisions;
    let step = PI / n as f64;
    // E at angle difference k·step, k taken mod n
    let table: Vec<f64> = (0..n).map(|k| (2.0 * k as f64 * step).cos()).collect();
    let e = |diff: isize| table[diff.rem_euclid(n as isize) as usize];
    let per_row = exec.map_indexed(n, |a1| {
        let a1 = a1 as isize;
        let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
        for b in 0..n as isize {
            for b2 in 0..n as isize {
                let s = e(-b) - e(-b2) + e(a1 - b) + e(a1 - b2);
                if s.abs() > best.0 {
                    best = (s.abs(), b as usize, b2 as usize);
                }
            }
        }
        best
    });
    let (a1, (value, b, b2)) = per_row
        .into_iter()
        .enumerate()
        .fold((0, (f64::NEG_INFINITY, 0, 0)), |acc, (i, row)| {
            if row.0 > acc.1 .0 {
                (i, row)
            } else {
                acc
            }
        });
    Ok((
        value,
        ChshSettings {
            phi1: 0.0,
            phi1p: a1 as f64 * step,
            phi2: b as f64 * step,
            phi2p: b2 as f64 * step,
        },
    ))
}
