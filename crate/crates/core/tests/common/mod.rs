#![allow(dead_code)]

use num_complex::Complex64;
use rydberg_pshe::response::{AtomParams, DriveParams};
use rydberg_pshe::units::mhz;

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn atom() -> AtomParams {
    AtomParams::rubidium()
}

pub fn drive(delta2_mhz: f64) -> DriveParams {
    DriveParams::canonical(mhz(delta2_mhz))
}

/// Δ2/2π from −10 to 10 MHz in `n` steps.
pub fn scan(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| -10.0 + 20.0 * i as f64 / (n - 1) as f64)
}
