//! Brute-force references for the perturbative response.
//!
//! Everything here is built straight from the three-level master equation
//!
//! dρ/dt = −i[H, ρ] + D(ρ),
//! H = −Δ2|2⟩⟨2| − Δ3|3⟩⟨3| − Ωp(|2⟩⟨1| + h.c.) − Ωc(|3⟩⟨2| + h.c.),
//!
//! where D transfers population |2⟩→|1⟩ at Γ21 and |3⟩→|2⟩ at Γ32 and damps
//! each coherence ρ_αβ at γ_αβ. None of it shares code with the hierarchy.

use crate::error::{Error, Result};
use crate::linalg::solve_dyn;
use crate::quadrature::{trapezoid, GaussLegendre};
use crate::response::{blockade_radius, AtomParams, DriveParams, Hierarchy};
use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Single-atom density matrix (states indexed 0, 1, 2 for |1⟩, |2⟩, |3⟩).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix3(pub Matrix3<C>);

impl DensityMatrix3 {
    /// ρ_ab with 1-based labels.
    pub fn get(&self, a: usize, b: usize) -> C {
        self.0[(a - 1, b - 1)]
    }

    pub fn trace(&self) -> C {
        self.0.trace()
    }

    /// max |ρ − ρ†|.
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()) * C::from(0.5);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn hamiltonian(drive: &DriveParams, omega_p: f64) -> Matrix3<C> {
    let c = |x: f64| C::from(x);
    Matrix3::new(
        c(0.0),
        c(-omega_p),
        c(0.0),
        c(-omega_p),
        c(-drive.delta2),
        c(-drive.omega_c),
        c(0.0),
        c(-drive.omega_c),
        c(-drive.delta3()),
    )
}

fn coherence_rate(atom: &AtomParams, a: usize, b: usize) -> f64 {
    match (a.min(b), a.max(b)) {
        (0, 1) => atom.gamma21,
        (0, 2) => atom.gamma31,
        (1, 2) => atom.gamma32,
        _ => 0.0,
    }
}

/// Right-hand side of the master equation for an arbitrary operator `x`.
fn liouvillian(h: &Matrix3<C>, atom: &AtomParams, x: &Matrix3<C>) -> Matrix3<C> {
    let mut r = (h * x - x * h) * (-I);
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                r[(a, b)] -= coherence_rate(atom, a, b) * x[(a, b)];
            }
        }
    }
    r[(1, 1)] -= atom.decay21 * x[(1, 1)];
    r[(0, 0)] += atom.decay21 * x[(1, 1)];
    r[(2, 2)] -= atom.decay32 * x[(2, 2)];
    r[(1, 1)] += atom.decay32 * x[(2, 2)];
    r
}

/// The eight Gell-Mann matrices, normalised to Tr(λjλk) = 2δjk.
fn gell_mann() -> [Matrix3<C>; 8] {
    let mut out = [Matrix3::zeros(); 8];
    let mut k = 0;
    for a in 0..3 {
        for b in (a + 1)..3 {
            out[k][(a, b)] = C::from(1.0);
            out[k][(b, a)] = C::from(1.0);
            out[k + 1][(a, b)] = -I;
            out[k + 1][(b, a)] = I;
            k += 2;
        }
    }
    out[6][(0, 0)] = C::from(1.0);
    out[6][(1, 1)] = C::from(-1.0);
    let s = 1.0 / 3f64.sqrt();
    out[7][(0, 0)] = C::from(s);
    out[7][(1, 1)] = C::from(s);
    out[7][(2, 2)] = C::from(-2.0 * s);
    out
}

/// Nonperturbative steady state of the interaction-free three-level atom.
///
/// ρ = 1/3 + Σ xk λk/2 keeps Hermiticity and unit trace built in; projecting
/// the master equation onto each λj gives eight real equations.
pub fn full_local_bloch_steady_state(
    drive: &DriveParams,
    atom: &AtomParams,
) -> Result<DensityMatrix3> {
    drive.validate()?;
    atom.validate()?;
    let h = hamiltonian(drive, drive.omega_p);
    let basis = gell_mann();
    let third = Matrix3::<C>::identity() / C::from(3.0);
    let images: Vec<Matrix3<C>> = basis
        .iter()
        .map(|l| liouvillian(&h, atom, &(l * C::from(0.5))))
        .collect();
    let source = liouvillian(&h, atom, &third);
    let mut a = DMatrix::<f64>::zeros(8, 8);
    let mut b = DVector::<f64>::zeros(8);
    for j in 0..8 {
        for k in 0..8 {
            a[(j, k)] = (basis[j] * images[k]).trace().re;
        }
        b[j] = -(basis[j] * source).trace().re;
    }
    let x = a.lu().solve(&b).ok_or_else(|| Error::Singular {
        context: format!("Bloch steady state at Δ2 = {} rad/μs", drive.delta2),
    })?;
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("full_local_bloch_steady_state"));
    }
    let mut rho = third;
    for k in 0..8 {
        rho += basis[k] * C::from(0.5 * x[k]);
    }
    Ok(DensityMatrix3(rho))
}

/// Order-by-order steady state of two atoms coupled by V|33⟩⟨33|.
///
/// Pair operators are stored as ⟨a b|ρ|c d⟩ at index (3a + b)·9 + 3c + d.
#[derive(Clone, Debug)]
pub struct PairExpansion {
    pub orders: Vec<DVector<C>>,
}

fn pair_index(a: usize, b: usize, c: usize, d: usize) -> usize {
    (3 * a + b) * 9 + 3 * c + d
}

/// Single-atom Liouvillian as a 9×9 matrix on vec(ρ) with index 3a + b.
fn single_superoperator(drive: &DriveParams, atom: &AtomParams, omega_p: f64) -> DMatrix<C> {
    let h = hamiltonian(drive, omega_p);
    let mut m = DMatrix::<C>::zeros(9, 9);
    for c in 0..3 {
        for d in 0..3 {
            let mut e = Matrix3::<C>::zeros();
            e[(c, d)] = C::from(1.0);
            let r = liouvillian(&h, atom, &e);
            for a in 0..3 {
                for b in 0..3 {
                    m[(3 * a + b, 3 * c + d)] = r[(a, b)];
                }
            }
        }
    }
    m
}

fn pair_superoperator(single: &DMatrix<C>, v: f64) -> DMatrix<C> {
    let mut l = DMatrix::<C>::zeros(81, 81);
    let energy = |x: usize, y: usize| if x == 2 && y == 2 { v } else { 0.0 };
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let col = pair_index(a, b, c, d);
                    for a2 in 0..3 {
                        for c2 in 0..3 {
                            l[(pair_index(a2, b, c2, d), col)] += single[(3 * a2 + c2, 3 * a + c)];
                        }
                    }
                    for b2 in 0..3 {
                        for d2 in 0..3 {
                            l[(pair_index(a, b2, c, d2), col)] += single[(3 * b2 + d2, 3 * b + d)];
                        }
                    }
                    l[(col, col)] += -I * (energy(a, b) - energy(c, d));
                }
            }
        }
    }
    l
}

impl PairExpansion {
    /// Expands the pair steady state up to `order` in Ωp.
    pub fn new(drive: &DriveParams, atom: &AtomParams, v: f64, order: usize) -> Result<Self> {
        let s0 = single_superoperator(drive, atom, 0.0);
        let s1 = single_superoperator(drive, atom, 1.0) - &s0;
        let l0 = pair_superoperator(&s0, v);
        let l1 = pair_superoperator(&s1, 0.0);
        // Trace condition replaces the redundant ⟨11|·|11⟩ row.
        let mut a = l0;
        for col in 0..81 {
            a[(0, col)] = C::from(0.0);
        }
        for x in 0..3 {
            for y in 0..3 {
                a[(0, pair_index(x, y, x, y))] = C::from(1.0);
            }
        }
        let mut rhs = DVector::<C>::zeros(81);
        rhs[0] = C::from(1.0);
        let mut orders = vec![solve_dyn(&a, &rhs, "pair expansion order 0")?.0];
        for n in 1..=order {
            let mut rhs = -(&l1 * &orders[n - 1]);
            rhs[0] = C::from(0.0);
            orders.push(solve_dyn(&a, &rhs, "pair expansion")?.0);
        }
        Ok(Self { orders })
    }

    /// ρρ_{αβ,μν} = ⟨α μ|ρ⁽ⁿ⁾|β ν⟩ with 1-based labels.
    pub fn rr(&self, n: usize, alpha: usize, beta: usize, mu: usize, nu: usize) -> C {
        self.orders[n][pair_index(alpha - 1, mu - 1, beta - 1, nu - 1)]
    }

    /// One-body ρ_αβ⁽ⁿ⁾ of the first atom (partial trace over the second).
    pub fn one_body(&self, n: usize, alpha: usize, beta: usize) -> C {
        (1..=3).map(|m| self.rr(n, alpha, beta, m, m)).sum()
    }

    /// Third-order correlators in the hierarchy's ordering.
    pub fn third_order(&self) -> [C; 8] {
        [
            self.rr(3, 3, 3, 3, 1),
            self.rr(3, 2, 3, 3, 1),
            self.rr(3, 3, 2, 3, 1),
            self.rr(3, 3, 3, 2, 1),
            self.rr(3, 2, 2, 3, 1),
            self.rr(3, 2, 3, 2, 1),
            self.rr(3, 3, 2, 2, 1),
            self.rr(3, 2, 2, 2, 1),
        ]
    }

    /// Second-order pair correlators in the hierarchy's ordering.
    pub fn second_order(&self) -> [C; 8] {
        [
            self.rr(2, 1, 3, 3, 1),
            self.rr(2, 1, 2, 3, 1),
            self.rr(2, 1, 2, 2, 1),
            self.rr(2, 1, 3, 2, 1),
            self.rr(2, 3, 1, 3, 1),
            self.rr(2, 2, 1, 3, 1),
            self.rr(2, 2, 1, 2, 1),
            self.rr(2, 3, 1, 2, 1),
        ]
    }
}

/// Convergence data for the nonlocal radial integral.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub node_counts: Vec<usize>,
    pub values: Vec<C>,
    /// Relative change between consecutive node counts.
    pub successive: Vec<f64>,
    /// 10⁴-panel trapezoid in s.
    pub trapezoid: C,
    /// Relative difference of the finest Gauss rule from the trapezoid.
    pub trapezoid_difference: f64,
    /// Relative change of the integral when the cut moves from 3Rb to 5Rb.
    pub extension_change: f64,
    /// ∫s²V ds over [Rb, 5Rb] divided by the same over [Rb, 3Rb], by quadrature.
    pub kernel_ratio: f64,
    /// Closed form (1 − 5⁻³)/(1 − 3⁻³).
    pub kernel_ratio_exact: f64,
}

fn relative(a: C, b: C) -> f64 {
    if b.norm() > 0.0 {
        (a - b).norm() / b.norm()
    } else {
        (a - b).norm()
    }
}

/// Evaluates the nonlocal integral at every node count and against a dense
/// trapezoid reference.
pub fn quadrature_refine(
    drive: &DriveParams,
    atom: &AtomParams,
    node_counts: &[usize],
) -> Result<QuadratureReport> {
    if node_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "node counts must be strictly increasing".into(),
        ));
    }
    let kernel_ratio_exact = (1.0 - 5f64.powi(-3)) / (1.0 - 3f64.powi(-3));
    let zero = C::new(0.0, 0.0);
    if atom.c6 == 0.0 || atom.density == 0.0 {
        return Ok(QuadratureReport {
            node_counts: node_counts.to_vec(),
            values: vec![zero; node_counts.len()],
            successive: vec![0.0; node_counts.len().saturating_sub(1)],
            trapezoid: zero,
            trapezoid_difference: 0.0,
            extension_change: 0.0,
            kernel_ratio: 0.0,
            kernel_ratio_exact,
        });
    }
    let h = Hierarchy::new(drive, atom)?;
    let upper = atom.model.upper_limit;
    let values = node_counts
        .iter()
        .map(|&n| h.nonlocal_integral(n, upper))
        .collect::<Result<Vec<_>>>()?;
    let successive = values.windows(2).map(|w| relative(w[0], w[1])).collect();

    let rb = blockade_radius(drive.omega_c, atom.gamma21, atom.c6)?;
    let c6 = atom.c6;
    let mut failure = None;
    let trap: C = trapezoid(
        |s: f64| {
            let v = c6 / s.powi(6);
            match h.pair_third(v) {
                Ok(p) => p.rr33_31() * (s * s * v),
                Err(e) => {
                    failure.get_or_insert(e);
                    zero
                }
            }
        },
        rb,
        upper * rb,
        10_000,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let trap = trap * (atom.density * 4.0 * PI);
    let finest = *values.last().unwrap_or(&h.nonlocal_integral(64, upper)?);

    let finest_n = *node_counts.last().unwrap_or(&64);
    let extended = h.nonlocal_integral(finest_n, 5.0)?;
    let base = h.nonlocal_integral(finest_n, 3.0)?;
    let kernel = |hi: f64| -> f64 {
        GaussLegendre::new(finest_n)
            .on(rb, hi * rb)
            .map(|(s, w)| w * s * s * c6 / s.powi(6))
            .sum()
    };
    Ok(QuadratureReport {
        node_counts: node_counts.to_vec(),
        values,
        successive,
        trapezoid: trap,
        trapezoid_difference: relative(finest, trap),
        extension_change: relative(extended, base),
        kernel_ratio: kernel(5.0) / kernel(3.0),
        kernel_ratio_exact,
    })
}
