use crate::error::{Error, Result};
use crate::units::{mhz, per_mm3, EPSILON_0, HBAR, SPEED_OF_LIGHT};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which third-order pair closure to assemble.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Closure {
    /// Closure consistent with the full two-atom master equation.
    #[default]
    Exact,
    /// Matrix and right-hand side in their published form, kept for comparison.
    AsPrinted,
}

/// Numerical and modelling switches for the response calculation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelOptions {
    pub closure: Closure,
    /// Gauss–Legendre nodes for the nonlocal radial integral.
    pub quadrature_nodes: usize,
    /// Upper cut of the radial integral in units of the blockade radius.
    pub upper_limit: f64,
    /// Include the nonlocal third-order term.
    pub nonlocal: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            closure: Closure::Exact,
            quadrature_nodes: 64,
            upper_limit: 3.0,
            nonlocal: true,
        }
    }
}

/// Atomic constants of the ladder system.
///
/// Rates in rad/μs, `c6` in rad/μs·μm⁶, `density` in μm⁻³, `wavelength` in μm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// Population decay |2⟩→|1⟩.
    pub decay21: f64,
    /// Population decay |3⟩→|2⟩.
    pub decay32: f64,
    pub gamma21: f64,
    pub gamma32: f64,
    pub gamma31: f64,
    pub c6: f64,
    pub density: f64,
    pub wavelength: f64,
    pub model: ModelOptions,
}

impl AtomParams {
    /// Coherence rates follow from the population decays: γ21 = Γ21/2,
    /// γ31 = Γ32/2 and γ32 = (Γ21 + Γ32)/2, the last being half the total
    /// decay out of both levels it connects.
    pub fn from_decay_rates(
        decay21: f64,
        decay32: f64,
        c6: f64,
        density: f64,
        wavelength: f64,
    ) -> Result<Self> {
        let atom = Self {
            decay21,
            decay32,
            gamma21: decay21 / 2.0,
            gamma32: (decay21 + decay32) / 2.0,
            gamma31: decay32 / 2.0,
            c6,
            density,
            wavelength,
            model: ModelOptions::default(),
        };
        atom.validate()?;
        Ok(atom)
    }

    /// ⁸⁷Rb 5S–5P–60S ladder in a cold cloud of 4×10⁷ mm⁻³.
    pub fn rubidium() -> Self {
        Self::from_decay_rates(mhz(6.0), mhz(0.003), mhz(140e3), per_mm3(4e7), 0.78)
            .expect("built-in parameters are valid")
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn with_c6(mut self, c6: f64) -> Self {
        self.c6 = c6;
        self
    }

    pub fn with_model(mut self, model: ModelOptions) -> Self {
        self.model = model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.decay21,
            self.decay32,
            self.gamma21,
            self.gamma32,
            self.gamma31,
            self.c6,
            self.density,
            self.wavelength,
            self.model.upper_limit,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("atom parameters must be finite".into()));
        }
        if self.decay21 <= 0.0 {
            return Err(Error::Domain("Gamma21 must be positive".into()));
        }
        if self.decay32 < 0.0 || self.gamma21 < 0.0 || self.gamma32 < 0.0 || self.gamma31 < 0.0 {
            return Err(Error::Domain("decay rates must be non-negative".into()));
        }
        if self.density < 0.0 {
            return Err(Error::Domain("density must be non-negative".into()));
        }
        if self.wavelength <= 0.0 {
            return Err(Error::Domain("wavelength must be positive".into()));
        }
        if self.model.quadrature_nodes == 0 || self.model.upper_limit <= 1.0 {
            return Err(Error::Domain(
                "quadrature needs nodes > 0 and an upper limit above one blockade radius".into(),
            ));
        }
        Ok(())
    }

    /// |p21| in C·m.
    pub fn dipole_moment(&self) -> Result<f64> {
        derive_dipole_moment(self.decay21 * 1e6, self.wavelength * 1e-6)
    }

    /// K = Na|p21|²/(ε0ħ) in rad/μs, equal to 3NaΓ21λ³/(8π²).
    pub fn chi_prefactor(&self) -> Result<f64> {
        let p = self.dipole_moment()?;
        let na_si = self.density * 1e18;
        Ok(na_si * p * p / (EPSILON_0 * HBAR) * 1e-6)
    }
}

/// Spontaneous-emission dipole moment p = sqrt(3πε0ħc³Γ/ω³) with ω = 2πc/λ.
///
/// `decay` in rad/s, `wavelength` in m. A zero decay rate gives zero.
pub fn derive_dipole_moment(decay: f64, wavelength: f64) -> Result<f64> {
    if !(decay >= 0.0) || !decay.is_finite() {
        return Err(Error::Domain(format!("decay rate {decay} must be >= 0")));
    }
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return Err(Error::Domain(format!(
            "wavelength {wavelength} must be > 0"
        )));
    }
    let omega = 2.0 * PI * SPEED_OF_LIGHT / wavelength;
    Ok((3.0 * PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3) * decay / omega.powi(3)).sqrt())
}

/// Probe and coupling drive. Frequencies in rad/μs; Rabi frequencies real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub omega_p: f64,
    pub omega_c: f64,
    pub delta2: f64,
    pub delta_c: f64,
}

impl DriveParams {
    pub fn new(omega_p: f64, omega_c: f64, delta2: f64, delta_c: f64) -> Result<Self> {
        let d = Self {
            omega_p,
            omega_c,
            delta2,
            delta_c,
        };
        d.validate()?;
        Ok(d)
    }

    /// Ωp/2π = 0.75 MHz, Ωc/2π = 4 MHz, Δc/2π = −0.1 MHz at the given Δ2.
    pub fn canonical(delta2: f64) -> Self {
        Self {
            omega_p: mhz(0.75),
            omega_c: mhz(4.0),
            delta2,
            delta_c: mhz(-0.1),
        }
    }

    /// Two-photon detuning Δ3 = Δ2 + Δc.
    pub fn delta3(&self) -> f64 {
        self.delta2 + self.delta_c
    }

    pub fn with_delta2(mut self, delta2: f64) -> Self {
        self.delta2 = delta2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.omega_p, self.omega_c, self.delta2, self.delta_c]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::Domain("drive parameters must be finite".into()));
        }
        if self.omega_p < 0.0 || self.omega_c < 0.0 {
            return Err(Error::Domain(
                "Rabi frequencies must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// d_αβ = Δα − Δβ + iγαβ with Δ1 = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDenominators {
    pub d21: Complex64,
    pub d31: Complex64,
    pub d32: Complex64,
    pub d12: Complex64,
    pub d13: Complex64,
    pub d23: Complex64,
}

impl ComplexDenominators {
    pub fn new(drive: &DriveParams, atom: &AtomParams) -> Self {
        let (d2, d3) = (drive.delta2, drive.delta3());
        let c = Complex64::new;
        Self {
            d21: c(d2, atom.gamma21),
            d31: c(d3, atom.gamma31),
            d32: c(d3 - d2, atom.gamma32),
            d12: c(-d2, atom.gamma21),
            d13: c(-d3, atom.gamma31),
            d23: c(d2 - d3, atom.gamma32),
        }
    }
}
