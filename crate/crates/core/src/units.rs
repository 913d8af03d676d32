//! Physical constants and unit conversions.
//!
//! Internally frequencies are angular and measured in rad/μs, so a frequency
//! of 1 MHz maps to 2π. Lengths are in μm and densities in μm⁻³.

use std::f64::consts::PI;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Converts a cyclic frequency in MHz to rad/μs.
pub fn mhz(f: f64) -> f64 {
    2.0 * PI * f
}

/// Converts rad/μs back to a cyclic frequency in MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Converts a density in mm⁻³ to μm⁻³.
pub fn per_mm3(n: f64) -> f64 {
    n * 1e-9
}

/// Converts a density in μm⁻³ to mm⁻³.
pub fn to_per_mm3(n: f64) -> f64 {
    n * 1e9
}

pub fn deg(x: f64) -> f64 {
    x.to_radians()
}

pub fn to_deg(x: f64) -> f64 {
    x.to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert_eq!(mhz(1.0), 2.0 * PI);
        assert!((to_mhz(mhz(3.7)) - 3.7).abs() < 1e-15);
        assert!((to_per_mm3(per_mm3(4e7)) - 4e7).abs() < 1e-6);
        assert!((per_mm3(4e7) - 0.04).abs() < 1e-18);
    }
}
