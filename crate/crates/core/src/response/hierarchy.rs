//! Steady-state perturbative correlator hierarchy in powers of Ωp.
//!
//! One-body coherences are expanded as ρ = ρ⁽⁰⁾ + Ωpρ⁽¹⁾ + Ωp²ρ⁽²⁾ + …, and
//! two-body correlators ρρ_{αβ,μν} = ⟨αμ|ρ|βν⟩ are truncated after third order.

use super::params::{AtomParams, Closure, ComplexDenominators, DriveParams};
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::quadrature::GaussLegendre;
use nalgebra::{Matrix4, SMatrix, SVector, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

const I: C = C::new(0.0, 1.0);
const ZERO: C = C::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstOrder {
    pub rho21: C,
    pub rho31: C,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderOneBody {
    pub rho11: C,
    pub rho22: C,
    pub rho33: C,
    pub rho32: C,
    pub rho23: C,
}

/// Second-order pair correlators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSecondOrder {
    pub rr13_31: C,
    pub rr12_31: C,
    pub rr12_21: C,
    pub rr13_21: C,
    pub rr31_31: C,
    pub rr21_31: C,
    pub rr21_21: C,
    pub rr31_21: C,
}

impl PairSecondOrder {
    pub fn to_array(&self) -> [C; 8] {
        [
            self.rr13_31,
            self.rr12_31,
            self.rr12_21,
            self.rr13_21,
            self.rr31_31,
            self.rr21_31,
            self.rr21_21,
            self.rr31_21,
        ]
    }
}

/// Third-order pair correlators in the order
/// (ρρ33,31, ρρ23,31, ρρ32,31, ρρ33,21, ρρ22,31, ρρ23,21, ρρ32,21, ρρ22,21).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairThirdOrder {
    pub x: [C; 8],
    /// ‖Qx − q‖/‖q‖ of the solve.
    pub residual: f64,
}

impl PairThirdOrder {
    pub fn rr33_31(&self) -> C {
        self.x[0]
    }
}

/// Lower orders of the hierarchy, solved once per drive point and reused for
/// every pair separation.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub drive: DriveParams,
    pub atom: AtomParams,
    pub den: ComplexDenominators,
    pub first: FirstOrder,
    pub second: SecondOrderOneBody,
    /// Separation-independent pair block (ρρ13,31, ρρ12,31, ρρ12,21, ρρ13,21).
    uncoupled: [C; 4],
    /// Largest relative residual among the separation-independent solves.
    pub residual: f64,
}

impl Hierarchy {
    pub fn new(drive: &DriveParams, atom: &AtomParams) -> Result<Self> {
        drive.validate()?;
        atom.validate()?;
        let den = ComplexDenominators::new(drive, atom);
        let first = first_order(drive, &den)?;
        let (second, res2) = second_order(drive, atom, &den, &first)?;
        let (uncoupled, res3) = pair_uncoupled(drive, &den, &first)?;
        Ok(Self {
            drive: *drive,
            atom: atom.clone(),
            den,
            first,
            second,
            uncoupled,
            residual: res2.max(res3),
        })
    }

    fn oc(&self) -> C {
        C::from(self.drive.omega_c)
    }

    /// V(r) = C6/r⁶ for r > 0.
    pub fn potential(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("pair separation {r} must be > 0")));
        }
        Ok(self.atom.c6 / r.powi(6))
    }

    /// Second-order pair correlators at interaction energy `v` (rad/μs).
    pub fn pair_second(&self, v: f64) -> Result<PairSecondOrder> {
        let d = &self.den;
        let oc = self.oc();
        let f = &self.first;
        let m = Matrix4::new(
            2.0 * d.d31 - v,
            2.0 * oc,
            ZERO,
            ZERO,
            oc,
            d.d21 + d.d31,
            oc,
            ZERO,
            ZERO,
            ZERO,
            2.0 * d.d21,
            2.0 * oc,
            oc,
            ZERO,
            oc,
            d.d21 + d.d31,
        );
        // The exact pair dynamics source this row with -ρ31; the published
        // form carries +ρ31.
        let feed = match self.atom.model.closure {
            Closure::Exact => -f.rho31,
            Closure::AsPrinted => f.rho31,
        };
        let rhs = Vector4::new(ZERO, feed, -2.0 * f.rho21, -f.rho31);
        let s = solve(&m, &rhs, || self.context("second-order pair system", v))?;
        let [a, b, c, e] = self.uncoupled;
        Ok(PairSecondOrder {
            rr13_31: a,
            rr12_31: b,
            rr12_21: c,
            rr13_21: e,
            rr31_31: s.x[0],
            rr21_31: s.x[1],
            rr21_21: s.x[2],
            rr31_21: s.x[3],
        })
    }

    /// Third-order pair correlators at interaction energy `v` (rad/μs).
    pub fn pair_third(&self, v: f64) -> Result<PairThirdOrder> {
        let p = self.pair_second(v)?;
        let d = &self.den;
        let oc = self.oc();
        let g21 = I * self.atom.decay21;
        let g32 = I * self.atom.decay32;
        let exact = self.atom.model.closure == Closure::Exact;
        // Population transfer |3⟩→|2⟩ feeds rows 5 and 8; row 7 couples to
        // ρρ22,21 with +Ωc.
        let feed = if exact { -g32 } else { ZERO };
        let q78 = if exact { oc } else { -oc };
        #[rustfmt::skip]
        let q = SMatrix::<C, 8, 8>::from_row_slice(&[
            d.d31 + g32 - v, oc, -oc, oc, ZERO, ZERO, ZERO, ZERO,
            oc, d.d23 + d.d31, ZERO, ZERO, -oc, oc, ZERO, ZERO,
            -oc, ZERO, d.d31 + d.d32 - v, ZERO, oc, ZERO, oc, ZERO,
            oc, ZERO, ZERO, d.d21 + g32, ZERO, oc, -oc, ZERO,
            feed, -oc, oc, ZERO, d.d31 + g21, ZERO, ZERO, oc,
            ZERO, oc, ZERO, oc, ZERO, d.d21 + d.d23, ZERO, -oc,
            ZERO, ZERO, oc, -oc, ZERO, ZERO, d.d21 + d.d32, q78,
            ZERO, ZERO, ZERO, feed, oc, -oc, oc, d.d21 + g21,
        ]);
        let s2 = &self.second;
        let (q2, q6) = if exact {
            (-p.rr13_31, -s2.rho23 - p.rr13_21)
        } else {
            (-p.rr12_31, -s2.rho23 + p.rr13_21)
        };
        let rhs = SVector::<C, 8>::from_column_slice(&[
            ZERO,
            q2,
            p.rr31_31,
            -s2.rho33,
            -p.rr12_31 + p.rr21_31,
            q6,
            -s2.rho32 + p.rr31_21,
            -s2.rho22 - p.rr12_21 + p.rr21_21,
        ]);
        if !rhs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("second_order_twobody"));
        }
        let s = solve(&q, &rhs, || self.context("third-order pair system", v))?;
        let mut x = [ZERO; 8];
        x.copy_from_slice(s.x.as_slice());
        Ok(PairThirdOrder {
            x,
            residual: s.residual,
        })
    }

    /// Local third-order coherence −[d31(ρ22−ρ11) − Ωcρ32]/(Ωc² − d21d31).
    pub fn local_third(&self) -> Result<C> {
        let d = &self.den;
        let s = &self.second;
        let oc = self.drive.omega_c;
        let denom = oc * oc - d.d21 * d.d31;
        self.check_denominator(denom)?;
        Ok(-(d.d31 * (s.rho22 - s.rho11) - oc * s.rho32) / denom)
    }

    /// Prefactor Ωc/(Ωc² − d21d31) multiplying the nonlocal integral.
    pub fn nonlocal_factor(&self) -> Result<C> {
        let d = &self.den;
        let oc = self.drive.omega_c;
        let denom = oc * oc - d.d21 * d.d31;
        self.check_denominator(denom)?;
        Ok(oc / denom)
    }

    /// Na·4π∫ s²V(s)ρρ33,31(s) ds over [Rb, upper·Rb] with an `nodes`-point
    /// Gauss–Legendre rule in u = 1/s³, where s²V ds = −(C6/3) du.
    pub fn nonlocal_integral(&self, nodes: usize, upper: f64) -> Result<C> {
        let a = &self.atom;
        if a.c6 == 0.0 || a.density == 0.0 {
            return Ok(ZERO);
        }
        let rb = blockade_radius(self.drive.omega_c, a.gamma21, a.c6)?;
        let u_hi = rb.powi(-3);
        let u_lo = (upper * rb).powi(-3);
        let rule = GaussLegendre::new(nodes);
        let mut acc = ZERO;
        for (u, w) in rule.on(u_lo, u_hi) {
            acc += w * self.pair_third(a.c6 * u * u)?.rr33_31();
        }
        Ok(acc * (a.density * 4.0 * PI * a.c6 / 3.0))
    }

    fn check_denominator(&self, denom: C) -> Result<()> {
        if denom.norm() == 0.0 || !denom.re.is_finite() || !denom.im.is_finite() {
            return Err(Error::Singular {
                context: format!(
                    "coherence denominator Ωc² − d21·d31 vanishes at Δ2 = {} rad/μs",
                    self.drive.delta2
                ),
            });
        }
        Ok(())
    }

    fn context(&self, what: &str, v: f64) -> String {
        let r = if v != 0.0 {
            (self.atom.c6 / v).abs().powf(1.0 / 6.0)
        } else {
            f64::INFINITY
        };
        format!(
            "{what} at V = {v:.6e} rad/μs (r = {r:.6} μm), Δ2 = {:.6} rad/μs, Δc = {:.6} rad/μs",
            self.drive.delta2, self.drive.delta_c
        )
    }
}

/// Rb = (|C6|·γ21/Ωc²)^(1/6) in μm.
pub fn blockade_radius(omega_c: f64, gamma21: f64, c6: f64) -> Result<f64> {
    if omega_c == 0.0 {
        return Err(Error::DivergentRadius);
    }
    if !(gamma21 > 0.0) || c6 == 0.0 || !c6.is_finite() || !omega_c.is_finite() {
        return Err(Error::Domain(
            "blockade radius needs gamma21 > 0 and finite non-zero C6".into(),
        ));
    }
    Ok((c6.abs() * gamma21 / (omega_c * omega_c)).powf(1.0 / 6.0))
}

/// ρ21⁽¹⁾ = −d31/(−Ωc² + d21d31) and ρ31⁽¹⁾ = −Ωcρ21⁽¹⁾/d31 = Ωc/(−Ωc² + d21d31).
///
/// The sign of ρ31 follows the −Ωc(|3⟩⟨2| + h.c.) coupling convention.
fn first_order(drive: &DriveParams, d: &ComplexDenominators) -> Result<FirstOrder> {
    let oc = drive.omega_c;
    let denom = -oc * oc + d.d21 * d.d31;
    if denom.norm() == 0.0 {
        return Err(Error::Singular {
            context: format!(
                "first-order denominator vanishes at Δ2 = {} rad/μs",
                drive.delta2
            ),
        });
    }
    Ok(FirstOrder {
        rho21: -d.d31 / denom,
        rho31: oc / denom,
    })
}

/// Order-Ωp² one-body populations and Rydberg coherence. Unknowns
/// (ρ22, ρ33, ρ32, ρ23) with ρ11 = −ρ22 − ρ33 replacing the redundant
/// |2⟩ population equation.
fn second_order(
    drive: &DriveParams,
    atom: &AtomParams,
    d: &ComplexDenominators,
    f: &FirstOrder,
) -> Result<(SecondOrderOneBody, f64)> {
    let oc = C::from(drive.omega_c);
    let g21 = C::from(atom.decay21);
    let g32 = C::from(atom.decay32);
    let m = Matrix4::new(
        g21,
        ZERO,
        ZERO,
        ZERO,
        ZERO,
        -g32,
        -I * oc,
        I * oc,
        oc,
        -oc,
        d.d32,
        ZERO,
        oc,
        -oc,
        ZERO,
        d.d32.conj(),
    );
    let rhs = Vector4::new(
        -I * (f.rho21 - f.rho21.conj()),
        ZERO,
        f.rho31,
        f.rho31.conj(),
    );
    let s = solve(&m, &rhs, || {
        format!(
            "second-order one-body system at Δ2 = {} rad/μs",
            drive.delta2
        )
    })?;
    let (rho22, rho33, rho32, rho23) = (s.x[0], s.x[1], s.x[2], s.x[3]);
    Ok((
        SecondOrderOneBody {
            rho11: -rho22 - rho33,
            rho22,
            rho33,
            rho32,
            rho23,
        },
        s.residual,
    ))
}

/// Separation-independent pair block.
fn pair_uncoupled(
    drive: &DriveParams,
    d: &ComplexDenominators,
    f: &FirstOrder,
) -> Result<([C; 4], f64)> {
    let oc = C::from(drive.omega_c);
    let m = Matrix4::new(
        d.d13 + d.d31,
        -oc,
        ZERO,
        oc,
        -oc,
        d.d12 + d.d31,
        oc,
        ZERO,
        ZERO,
        oc,
        d.d12 + d.d21,
        -oc,
        oc,
        ZERO,
        -oc,
        d.d13 + d.d21,
    );
    let rhs = Vector4::new(ZERO, f.rho31, -f.rho21.conj() + f.rho21, -f.rho31.conj());
    let s = solve(&m, &rhs, || {
        format!(
            "separation-independent pair system at Δ2 = {} rad/μs",
            drive.delta2
        )
    })?;
    Ok(([s.x[0], s.x[1], s.x[2], s.x[3]], s.residual))
}
