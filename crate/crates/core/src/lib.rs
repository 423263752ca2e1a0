//! Numerical laboratory for the extended-electron model.
//!
//! * [`ga3`]: dense Cl(3,0) multivectors and rotors.
//! * [`electron`]: plane-wave electron with intrinsic fields, multivector
//!   wavefunction and local dynamics.
//! * [`spin_dynamics`]: modified Landau-Lifshitz spin precession and
//!   Stern-Gerlach deflection sign.
//! * [`epr`]: rotor-phase EPR model, coincidences, CHSH sums and Monte
//!   Carlo single-detector rates.
//! * [`uncertainty`]: STM position-uncertainty budget.
//! * [`cli`]: batch configuration and artifact writers behind the `eelab` binary.

pub mod cli;
pub mod constants;
pub mod electron;
pub mod epr;
pub mod error;
pub mod exec;
pub mod ga3;
pub mod spin_dynamics;
pub mod uncertainty;

pub use error::{Error, Result};
pub use exec::Execution;
pub use ga3::{Multivector3, Rotor3};
