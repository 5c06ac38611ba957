//! Low-level numerical building blocks: gamma-family special functions,
//! a deterministic seeded random generator with the samplers the data
//! generator needs, and a central-difference gradient oracle used by the
//! gradient tests.

mod gradcheck;
mod rng;
mod special;

pub use gradcheck::finite_diff_gradient;
pub use rng::Rng;
pub use special::{digamma, ln_gamma, trigamma};
