//! Transfer-matrix optics of planar multilayers.
//!
//! Each layer carries the characteristic matrix
//! M = [[cos δ, −i sin δ / p], [−i p sin δ, cos δ]] with δ = k0·n·d·cos θ and
//! impedance p = n/cos θ (p-polarisation) or n·cos θ (s-polarisation).

use crate::error::{Error, Result};
use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    P,
    S,
}

/// Homogeneous film of complex index `index` and thickness `thickness` (μm).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub index: C,
    pub thickness: f64,
}

impl Layer {
    pub fn new(index: C, thickness: f64) -> Result<Self> {
        let layer = Self { index, thickness };
        layer.validate()?;
        Ok(layer)
    }

    /// Dilute medium of susceptibility χ, n = sqrt(1 + χ) on the principal branch.
    pub fn from_susceptibility(chi: C, thickness: f64) -> Result<Self> {
        Self::new((C::from(1.0) + chi).sqrt(), thickness)
    }

    /// Absorbing or transparent. A layer with gain (Im n < 0) is still
    /// accepted because the perturbative susceptibility can change sign.
    pub fn is_passive(&self) -> bool {
        self.index.im >= 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness >= 0.0) || !self.thickness.is_finite() {
            return Err(Error::Domain(format!(
                "layer thickness {} must be finite and >= 0",
                self.thickness
            )));
        }
        if !self.index.re.is_finite() || !self.index.im.is_finite() || self.index.norm() == 0.0 {
            return Err(Error::Domain(format!("invalid layer index {}", self.index)));
        }
        Ok(())
    }
}

/// Semi-infinite entry medium, interior layers, semi-infinite exit medium.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    pub n_in: f64,
    pub layers: Vec<Layer>,
    pub n_out: f64,
}

impl LayerStack {
    pub fn new(n_in: f64, layers: Vec<Layer>, n_out: f64) -> Result<Self> {
        let s = Self {
            n_in,
            layers,
            n_out,
        };
        s.validate()?;
        Ok(s)
    }

    /// One film between identical cladding media.
    pub fn sandwich(n_clad: f64, film: Layer) -> Result<Self> {
        Self::new(n_clad, vec![film], n_clad)
    }

    pub fn validate(&self) -> Result<()> {
        for n in [self.n_in, self.n_out] {
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::Domain(format!("cladding index {n} must be > 0")));
            }
        }
        self.layers.iter().try_for_each(Layer::validate)
    }
}

/// Cladding–slab–cladding geometry whose slab index follows from χ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub n_in: f64,
    /// Slab thickness (μm).
    pub thickness: f64,
    pub n_out: f64,
}

impl Geometry {
    /// Glass windows (n = 1.49) around a 100 μm atomic layer.
    pub fn glass_cell() -> Self {
        Self {
            n_in: 1.49,
            thickness: 100.0,
            n_out: 1.49,
        }
    }

    pub fn stack(&self, chi: C) -> Result<LayerStack> {
        LayerStack::new(
            self.n_in,
            vec![Layer::from_susceptibility(chi, self.thickness)?],
            self.n_out,
        )
    }
}

/// Amplitude reflection and transmission for both polarisations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FresnelPair {
    pub rp: C,
    pub rs: C,
    pub tp: C,
    pub ts: C,
}

/// cos θj from Snell's law, on the branch with Im[nj cos θj] ≥ 0.
pub fn refraction_cosine(n_in: f64, theta_i: f64, n_j: C) -> C {
    let s = n_in * theta_i.sin() / n_j;
    let mut c = (C::from(1.0) - s * s).sqrt();
    if (n_j * c).im < 0.0 {
        c = -c;
    }
    c
}

/// Tangential-field impedance of a medium for the given polarisation.
pub fn impedance(n_j: C, cos_j: C, pol: Polarization) -> C {
    match pol {
        Polarization::P => n_j / cos_j,
        Polarization::S => n_j * cos_j,
    }
}

fn checked_impedance(n_j: C, cos_j: C, pol: Polarization) -> Result<C> {
    let p = impedance(n_j, cos_j, pol);
    if p.norm() == 0.0 || !p.re.is_finite() || !p.im.is_finite() {
        return Err(Error::Singular {
            context: format!("impedance of medium n = {n_j} vanishes or diverges (grazing)"),
        });
    }
    Ok(p)
}

/// Characteristic matrix of one layer.
pub fn layer_matrix(
    layer: &Layer,
    theta_i: f64,
    k0: f64,
    n_in: f64,
    pol: Polarization,
) -> Result<Matrix2<C>> {
    let n = layer.index;
    let cos = refraction_cosine(n_in, theta_i, n);
    let p = checked_impedance(n, cos, pol)?;
    let delta = k0 * n * layer.thickness * cos;
    let (c, s) = (delta.cos(), delta.sin());
    let mi = C::new(0.0, -1.0);
    Ok(Matrix2::new(c, mi * s / p, mi * p * s, c))
}

/// Ordered product of all layer matrices.
pub fn stack_matrix(
    stack: &LayerStack,
    theta_i: f64,
    k0: f64,
    pol: Polarization,
) -> Result<Matrix2<C>> {
    stack.layers.iter().try_fold(Matrix2::identity(), |m, l| {
        Ok(m * layer_matrix(l, theta_i, k0, stack.n_in, pol)?)
    })
}

/// Layer matrix multiplied by κ = e^{±iδ} (sign chosen so |κ| ≤ 1). Keeps
/// thick evanescent or strongly absorbing layers finite.
fn scaled_layer_matrix(
    layer: &Layer,
    theta_i: f64,
    k0: f64,
    n_in: f64,
    pol: Polarization,
) -> Result<(Matrix2<C>, C)> {
    let n = layer.index;
    let cos = refraction_cosine(n_in, theta_i, n);
    let p = checked_impedance(n, cos, pol)?;
    let delta = k0 * n * layer.thickness * cos;
    let i = C::new(0.0, 1.0);
    let (kappa, e2) = if delta.im >= 0.0 {
        ((i * delta).exp(), (2.0 * i * delta).exp())
    } else {
        ((-i * delta).exp(), (-2.0 * i * delta).exp())
    };
    let c = (e2 + 1.0) * 0.5;
    let s = if delta.im >= 0.0 {
        (e2 - 1.0) / (2.0 * i)
    } else {
        (1.0 - e2) / (2.0 * i)
    };
    Ok((Matrix2::new(c, -i * s / p, -i * p * s, c), kappa))
}

/// (r, t) of the stack for one polarisation.
pub fn stack_fresnel(
    stack: &LayerStack,
    theta_i: f64,
    k0: f64,
    pol: Polarization,
) -> Result<(C, C)> {
    if !(0.0..FRAC_PI_2).contains(&theta_i) {
        return Err(Error::Domain(format!(
            "incidence angle {theta_i} rad outside [0, π/2)"
        )));
    }
    let mut m = Matrix2::<C>::identity();
    let mut kappa = C::new(1.0, 0.0);
    for l in &stack.layers {
        let (ml, kl) = scaled_layer_matrix(l, theta_i, k0, stack.n_in, pol)?;
        m *= ml;
        kappa *= kl;
    }
    let n_in = C::from(stack.n_in);
    let p1 = checked_impedance(n_in, refraction_cosine(stack.n_in, theta_i, n_in), pol)?;
    let n_out = C::from(stack.n_out);
    let p3 = checked_impedance(n_out, refraction_cosine(stack.n_in, theta_i, n_out), pol)?;
    let front = (m[(0, 0)] + m[(0, 1)] * p3) * p1;
    let back = m[(1, 0)] + m[(1, 1)] * p3;
    let den = front + back;
    if den.norm() == 0.0 || !den.re.is_finite() || !den.im.is_finite() {
        return Err(Error::Singular {
            context: format!("Fresnel denominator vanishes at θ = {theta_i} rad"),
        });
    }
    // r is invariant under the scaling; t picks up the accumulated κ.
    Ok(((front - back) / den, 2.0 * p1 * kappa / den))
}

pub fn fresnel_pair(stack: &LayerStack, theta_i: f64, k0: f64) -> Result<FresnelPair> {
    let (rp, tp) = stack_fresnel(stack, theta_i, k0, Polarization::P)?;
    let (rs, ts) = stack_fresnel(stack, theta_i, k0, Polarization::S)?;
    Ok(FresnelPair { rp, rs, tp, ts })
}

/// Angle minimising |rp|: scan at 10⁻⁴ rad then golden-section refinement.
pub fn brewster_angle(stack: &LayerStack, k0: f64) -> Result<f64> {
    let f = |t: f64| -> Result<f64> { Ok(stack_fresnel(stack, t, k0, Polarization::P)?.0.norm()) };
    let step = 1e-4;
    let (lo, hi) = (step, FRAC_PI_2 - step);
    let n = ((hi - lo) / step) as usize;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..=n {
        let v = f(lo + step * i as f64)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    if best.0 == 0 || best.0 == n {
        return Err(Error::Search("no interior minimum of |rp|".into()));
    }
    let centre = lo + step * best.0 as f64;
    golden_section(f, centre - step, centre + step, 1e-9)
}

fn golden_section(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}
