//! Probe susceptibility of an interacting Rydberg gas under ladder EIT.

mod hierarchy;
mod params;

pub use hierarchy::{
    blockade_radius, FirstOrder, Hierarchy, PairSecondOrder, PairThirdOrder, SecondOrderOneBody,
};
pub use params::{
    derive_dipole_moment, AtomParams, Closure, ComplexDenominators, DriveParams, ModelOptions,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Linear, local third-order and nonlocal third-order susceptibility.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityBreakdown {
    pub chi1: Complex64,
    pub chi3_local: Complex64,
    pub chi3_nonlocal: Complex64,
    pub total: Complex64,
}

/// Third-order probe coherence split into its local and nonlocal parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThirdOrder {
    pub local: Complex64,
    pub nonlocal: Complex64,
}

/// Snapshot of every correlator at one drive point and pair separation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub separation: f64,
    pub rho21_1: Complex64,
    pub rho31_1: Complex64,
    pub rho11_2: Complex64,
    pub rho22_2: Complex64,
    pub rho33_2: Complex64,
    pub rho32_2: Complex64,
    pub twobody2: [Complex64; 8],
    pub twobody3: [Complex64; 8],
}

impl CorrelatorSet {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("correlators serialize")
    }
}

pub fn first_order_coherences(drive: &DriveParams, atom: &AtomParams) -> Result<FirstOrder> {
    Ok(Hierarchy::new(drive, atom)?.first)
}

pub fn second_order_onebody(drive: &DriveParams, atom: &AtomParams) -> Result<SecondOrderOneBody> {
    Ok(Hierarchy::new(drive, atom)?.second)
}

pub fn second_order_twobody(
    drive: &DriveParams,
    atom: &AtomParams,
    r: f64,
) -> Result<PairSecondOrder> {
    let h = Hierarchy::new(drive, atom)?;
    h.pair_second(h.potential(r)?)
}

pub fn third_order_twobody(
    drive: &DriveParams,
    atom: &AtomParams,
    r: f64,
) -> Result<PairThirdOrder> {
    let h = Hierarchy::new(drive, atom)?;
    h.pair_third(h.potential(r)?)
}

/// Nonlocal integral with the configured node count.
pub fn nonlocal_integral(drive: &DriveParams, atom: &AtomParams) -> Result<Complex64> {
    let h = Hierarchy::new(drive, atom)?;
    h.nonlocal_integral(atom.model.quadrature_nodes, atom.model.upper_limit)
}

/// Nonlocal integral guarded by node doubling.
pub fn nonlocal_integral_checked(
    drive: &DriveParams,
    atom: &AtomParams,
    tolerance: f64,
) -> Result<Complex64> {
    let h = Hierarchy::new(drive, atom)?;
    let n = atom.model.quadrature_nodes;
    let a = h.nonlocal_integral(n, atom.model.upper_limit)?;
    let b = h.nonlocal_integral(2 * n, atom.model.upper_limit)?;
    let change = if b.norm() > 0.0 {
        (a - b).norm() / b.norm()
    } else {
        (a - b).norm()
    };
    if change > tolerance {
        return Err(Error::Convergence {
            nodes: n,
            doubled: 2 * n,
            change,
        });
    }
    Ok(b)
}

/// Third-order coherence. The nonlocal part vanishes when Ωc = 0, when the
/// interaction is absent or when disabled in the model options.
pub fn third_order_coherence(drive: &DriveParams, atom: &AtomParams) -> Result<ThirdOrder> {
    third_order_from(&Hierarchy::new(drive, atom)?)
}

fn third_order_from(h: &Hierarchy) -> Result<ThirdOrder> {
    let local = h.local_third()?;
    let m = &h.atom.model;
    let nonlocal = if !m.nonlocal || h.drive.omega_c == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        h.nonlocal_factor()? * h.nonlocal_integral(m.quadrature_nodes, m.upper_limit)?
    };
    Ok(ThirdOrder { local, nonlocal })
}

/// χ = K(ρ21⁽¹⁾ + Ωp²ρ21⁽³⁾) split by origin.
pub fn susceptibility(drive: &DriveParams, atom: &AtomParams) -> Result<SusceptibilityBreakdown> {
    let h = Hierarchy::new(drive, atom)?;
    let k = atom.chi_prefactor()?;
    let third = third_order_from(&h)?;
    let op2 = drive.omega_p * drive.omega_p;
    let chi1 = k * h.first.rho21;
    let chi3_local = k * op2 * third.local;
    let chi3_nonlocal = k * op2 * third.nonlocal;
    let total = chi1 + chi3_local + chi3_nonlocal;
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::NonFinite("susceptibility"));
    }
    Ok(SusceptibilityBreakdown {
        chi1,
        chi3_local,
        chi3_nonlocal,
        total,
    })
}

/// All correlators at separation `r` (μm).
pub fn correlator_set(drive: &DriveParams, atom: &AtomParams, r: f64) -> Result<CorrelatorSet> {
    let h = Hierarchy::new(drive, atom)?;
    let v = h.potential(r)?;
    let p2 = h.pair_second(v)?;
    let p3 = h.pair_third(v)?;
    Ok(CorrelatorSet {
        separation: r,
        rho21_1: h.first.rho21,
        rho31_1: h.first.rho31,
        rho11_2: h.second.rho11,
        rho22_2: h.second.rho22,
        rho33_2: h.second.rho33,
        rho32_2: h.second.rho32,
        twobody2: p2.to_array(),
        twobody3: p3.x,
    })
}
