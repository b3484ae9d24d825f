//! Natural units: ħ = 1, so Planck's constant is 2π. Reported energies are
//! expressed in multiples of h.

use std::f64::consts::TAU;

/// Planck's constant in natural units.
pub const PLANCK: f64 = TAU;

/// Internal energy → multiples of h.
#[inline]
pub fn to_h(energy: f64) -> f64 {
    energy / PLANCK
}

/// Multiples of h → internal energy.
#[inline]
pub fn from_h(multiples: f64) -> f64 {
    multiples * PLANCK
}
