//! Truncated Taylor/Laurent expansions in one variable ([`Jet1`]) and
//! bivariate Wirtinger expansions in `z`, `z̄` ([`Jet2`]).
//!
//! Jets are immutable after construction; every operation returns a new jet
//! and truncates to the window of coefficients that is actually known, so a
//! chain of operations never claims more accuracy than it has.

mod jet1;
mod jet2;

pub use jet1::Jet1;
pub use jet2::Jet2;

use num_complex::Complex64;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Magnitude above which a finite jet value is treated as a pole and flipped
/// by `w ↦ 1/w` (see [`Jet1::pole_normalize`]).
pub const POLE_FLIP_THRESHOLD: f64 = 1e8;
