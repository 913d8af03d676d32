//! Spin-resolved transverse shift of a reflected Gaussian probe.
//!
//! For an H-polarised input the zeroth-order reflection acts on the angular
//! spectrum as Ẽ^H = rp·Ẽ, Ẽ^V = −ky·a·Ẽ with a = (rp + rs)·cot θ / k0, so the
//! spin components are Ẽ^± = (rp ± i·ky·a)·Ẽ/√2. Here rp follows the convention
//! rp = −rs at normal incidence; [`OperatorCoefficients::from_fresnel`]
//! converts from the transfer-matrix convention.
//!
//! Only ky enters the operator, so the x dependence factors out and the
//! default path works on a 1-D ky grid.

use crate::error::{Error, Result};
use crate::optics::{fresnel_pair, FresnelPair, Geometry};
use crate::response::{susceptibility, AtomParams, DriveParams};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

type C = Complex64;

/// Incident beam and sampling grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    /// Waist (μm).
    pub w0: f64,
    /// Incidence angle (rad).
    pub theta_i: f64,
    /// Wavelength (μm).
    pub wavelength: f64,
    /// Number of ky samples, a power of two ≥ 256.
    pub grid_n: usize,
    /// Half-width of the ky window in units of 1/w0.
    pub grid_span: f64,
}

impl BeamSpec {
    pub fn new(w0: f64, theta_i: f64, wavelength: f64) -> Result<Self> {
        let b = Self {
            w0,
            theta_i,
            wavelength,
            grid_n: 2048,
            grid_span: 8.0,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn with_grid(mut self, grid_n: usize, grid_span: f64) -> Result<Self> {
        self.grid_n = grid_n;
        self.grid_span = grid_span;
        self.validate()?;
        Ok(self)
    }

    pub fn with_theta(mut self, theta_i: f64) -> Self {
        self.theta_i = theta_i;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidBeam(m));
        if !(self.w0 > 0.0) || !self.w0.is_finite() {
            return bad(format!("waist {} must be > 0", self.w0));
        }
        if !(self.wavelength > 0.0) || !self.wavelength.is_finite() {
            return bad(format!("wavelength {} must be > 0", self.wavelength));
        }
        if self.grid_n < 256 || !self.grid_n.is_power_of_two() {
            return bad(format!(
                "grid_n {} must be a power of two >= 256",
                self.grid_n
            ));
        }
        if !(self.grid_span >= 6.0) || !self.grid_span.is_finite() {
            return bad(format!("grid_span {} must be >= 6", self.grid_span));
        }
        let (lo, hi) = (5f64.to_radians(), 85f64.to_radians());
        if !(lo..=hi).contains(&self.theta_i) {
            return bad(format!(
                "incidence {:.4}° outside [5°, 85°]",
                self.theta_i.to_degrees()
            ));
        }
        Ok(())
    }

    pub fn k0(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// ky spacing.
    pub fn dk(&self) -> f64 {
        2.0 * self.grid_span / self.w0 / self.grid_n as f64
    }

    /// y spacing of the transformed field, π·w0/span.
    pub fn dy(&self) -> f64 {
        2.0 * PI / (self.grid_n as f64 * self.dk())
    }

    pub fn ky(&self) -> Vec<f64> {
        let k_max = self.grid_span / self.w0;
        let dk = self.dk();
        (0..self.grid_n).map(|j| -k_max + dk * j as f64).collect()
    }

    pub fn y(&self) -> Vec<f64> {
        let dy = self.dy();
        let half = self.grid_n as f64 * dy / 2.0;
        (0..self.grid_n).map(|m| -half + dy * m as f64).collect()
    }
}

/// Spectral samples on the ky grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub ky: Vec<f64>,
    pub amplitude: Vec<C>,
}

/// Reflected σ± angular spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSpectra {
    pub ky: Vec<f64>,
    pub plus: Vec<C>,
    pub minus: Vec<C>,
}

/// Reflected σ± fields in real space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinFields {
    pub y: Vec<f64>,
    pub e_plus: Vec<C>,
    pub e_minus: Vec<C>,
}

impl SpinFields {
    pub fn intensity_plus(&self) -> Vec<f64> {
        self.e_plus.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn intensity_minus(&self) -> Vec<f64> {
        self.e_minus.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Positions of the σ+ and σ− intensity maxima, refined by a parabola
    /// through the three samples around each maximum.
    pub fn peak_positions(&self) -> (f64, f64) {
        (
            peak(&self.y, &self.intensity_plus()),
            peak(&self.y, &self.intensity_minus()),
        )
    }
}

fn peak(y: &[f64], v: &[f64]) -> f64 {
    let (i, _) =
        v.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc },
        );
    if i == 0 || i + 1 == v.len() {
        return y[i];
    }
    let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
    let curv = a - 2.0 * b + c;
    let off = if curv != 0.0 {
        0.5 * (a - c) / curv
    } else {
        0.0
    };
    y[i] + off * (y[1] - y[0])
}

/// Spin-resolved centroid shifts (μm) and reflected powers relative to the
/// incident power.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftResult {
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub power_plus: f64,
    pub power_minus: f64,
}

/// Reflection coefficients in the convention of the spin-orbit operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorCoefficients {
    pub rp: C,
    pub rs: C,
}

impl OperatorCoefficients {
    /// The transfer-matrix rp equals +rs at normal incidence; the operator
    /// needs the opposite orientation of the p basis vector.
    pub fn from_fresnel(pair: &FresnelPair) -> Self {
        Self {
            rp: -pair.rp,
            rs: pair.rs,
        }
    }
}

/// Unit-power Gaussian spectrum √π·w0·(2/π)^¼/√w0 · exp(−ky²w0²/4).
pub fn incident_spectrum(beam: &BeamSpec) -> Spectrum {
    let norm = (2.0 / PI).powf(0.25) / beam.w0.sqrt() * PI.sqrt() * beam.w0;
    let ky = beam.ky();
    let amplitude = ky
        .iter()
        .map(|k| C::from(norm * (-k * k * beam.w0 * beam.w0 / 4.0).exp()))
        .collect();
    Spectrum { ky, amplitude }
}

/// Spin-orbit mixing amplitude a = (rp + rs)·cot θ / k0.
pub fn mixing_amplitude(c: &OperatorCoefficients, beam: &BeamSpec) -> C {
    (c.rp + c.rs) / beam.theta_i.tan() / beam.k0()
}

/// Ẽ^± = (rp ± i·ky·a)·Ẽ/√2.
pub fn reflected_spin_spectra(beam: &BeamSpec, c: &OperatorCoefficients) -> Result<SpinSpectra> {
    spin_spectra(beam, c, 1.0)
}

/// Same as [`reflected_spin_spectra`] with the cross term multiplied by `sign`.
pub fn spin_spectra(beam: &BeamSpec, c: &OperatorCoefficients, sign: f64) -> Result<SpinSpectra> {
    beam.validate()?;
    let a = mixing_amplitude(c, beam) * sign;
    let inc = incident_spectrum(beam);
    let mut plus = Vec::with_capacity(inc.ky.len());
    let mut minus = Vec::with_capacity(inc.ky.len());
    for (&k, &e) in inc.ky.iter().zip(&inc.amplitude) {
        let cross = C::new(0.0, k) * a;
        plus.push((c.rp + cross) * e * FRAC_1_SQRT_2);
        minus.push((c.rp - cross) * e * FRAC_1_SQRT_2);
    }
    Ok(SpinSpectra {
        ky: inc.ky,
        plus,
        minus,
    })
}

/// Reusable inverse transform for one beam grid.
#[derive(Clone)]
pub struct Propagator {
    beam: BeamSpec,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator")
            .field("beam", &self.beam)
            .finish()
    }
}

impl Propagator {
    pub fn new(beam: &BeamSpec) -> Result<Self> {
        beam.validate()?;
        let fft = FftPlanner::new().plan_fft_inverse(beam.grid_n);
        Ok(Self {
            beam: beam.clone(),
            fft,
        })
    }

    pub fn beam(&self) -> &BeamSpec {
        &self.beam
    }

    /// E(y_m) = (dk/2π)·Σ_j Ẽ(k_j)·e^{i k_j y_m}. With both grids centred the
    /// phase e^{i k_j y_m} reduces to (−1)^{j+m} times the DFT kernel.
    pub fn transform(&self, spectrum: &[C]) -> Vec<C> {
        let n = self.beam.grid_n;
        let scale = self.beam.dk() / (2.0 * PI);
        let mut buf: Vec<C> = spectrum
            .iter()
            .enumerate()
            .map(|(j, &z)| if j % 2 == 0 { z } else { -z })
            .collect();
        self.fft.process(&mut buf);
        // Residual global phase e^{iNπ/2} is 1 for N divisible by four.
        let global = C::from_polar(1.0, n as f64 * PI / 2.0);
        buf.iter()
            .enumerate()
            .map(|(m, &z)| {
                let s = if m % 2 == 0 { scale } else { -scale };
                z * s * global
            })
            .collect()
    }

    /// Real-space σ± fields with the aliasing guard and a Parseval check.
    pub fn fields(&self, spectra: &SpinSpectra) -> Result<SpinFields> {
        let e_plus = self.transform(&spectra.plus);
        let e_minus = self.transform(&spectra.minus);
        for (field, spectrum) in [(&e_plus, &spectra.plus), (&e_minus, &spectra.minus)] {
            guard_window(field)?;
            let spatial: f64 = field.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.beam.dy();
            let spectral: f64 =
                spectrum.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.beam.dk() / (2.0 * PI);
            if (spatial - spectral).abs() > 1e-9 * spectral.max(f64::MIN_POSITIVE) {
                return Err(Error::NonFinite("reflected_field (Parseval mismatch)"));
            }
        }
        Ok(SpinFields {
            y: self.beam.y(),
            e_plus,
            e_minus,
        })
    }

    /// Centroid shifts by transform of the spin spectra.
    pub fn shifts(&self, c: &OperatorCoefficients) -> Result<ShiftResult> {
        self.shifts_signed(c, 1.0)
    }

    pub fn shifts_signed(&self, c: &OperatorCoefficients, sign: f64) -> Result<ShiftResult> {
        let f = self.fields(&spin_spectra(&self.beam, c, sign)?)?;
        let dy = self.beam.dy();
        Ok(ShiftResult {
            delta_plus: centroid(&f.y, &f.e_plus)?,
            delta_minus: centroid(&f.y, &f.e_minus)?,
            power_plus: f.e_plus.iter().map(|z| z.norm_sqr()).sum::<f64>() * dy,
            power_minus: f.e_minus.iter().map(|z| z.norm_sqr()).sum::<f64>() * dy,
        })
    }
}

fn guard_window(field: &[C]) -> Result<()> {
    let n = field.len();
    let edge = (n / 40).max(1);
    let total: f64 = field.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(());
    }
    let outer: f64 = field[..edge]
        .iter()
        .chain(&field[n - edge..])
        .map(|z| z.norm_sqr())
        .sum();
    let fraction = outer / total;
    if fraction >= 1e-6 {
        return Err(Error::Window { fraction });
    }
    Ok(())
}

/// Inverse transform of both spin spectra on the beam's grid.
pub fn reflected_field(beam: &BeamSpec, spectra: &SpinSpectra) -> Result<SpinFields> {
    Propagator::new(beam)?.fields(spectra)
}

/// Σ y|E|² / Σ |E|² on the sample grid.
pub fn centroid(y: &[f64], field: &[C]) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (&yy, z) in y.iter().zip(field) {
        let p = z.norm_sqr();
        num += yy * p;
        den += p;
    }
    if !(den > 0.0) {
        return Err(Error::ZeroPower);
    }
    Ok(num / den)
}

/// Closed-form centroids of |rp·G ± a·G′|² with G = exp(−y²/w0²).
///
/// Using ∫G² = w0√(π/2), ∫G′² = √(π/2)/w0 and ∫yGG′ = −½∫G²:
/// δ± = ∓Re(rp*·a)·w0² / (|rp|²w0² + |a|²).
pub fn analytic_gaussian_shift(c: &OperatorCoefficients, beam: &BeamSpec) -> Result<(f64, f64)> {
    let a = mixing_amplitude(c, beam);
    let w2 = beam.w0 * beam.w0;
    let den = c.rp.norm_sqr() * w2 + a.norm_sqr();
    if !(den > 0.0) {
        return Err(Error::ZeroPower);
    }
    let d = -(c.rp.conj() * a).re * w2 / den;
    Ok((d, -d))
}

/// Full chain: susceptibility → slab index → Fresnel → spin fields → centroids.
pub fn pshe_shifts(
    geometry: &Geometry,
    beam: &BeamSpec,
    drive: &DriveParams,
    atom: &AtomParams,
) -> Result<ShiftResult> {
    let chi = susceptibility(drive, atom)?.total;
    let stack = geometry.stack(chi)?;
    let pair = fresnel_pair(&stack, beam.theta_i, beam.k0())?;
    Propagator::new(beam)?.shifts(&OperatorCoefficients::from_fresnel(&pair))
}

/// Transverse intensity maps |E±(x, y)|² from a two-dimensional transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityMap {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Row-major, indexed [ix * y.len() + iy].
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

/// Full (kx, ky) angular-spectrum evaluation on an n×n grid.
pub fn intensity_map(beam: &BeamSpec, c: &OperatorCoefficients, n: usize) -> Result<IntensityMap> {
    let grid = beam.clone().with_grid(n, beam.grid_span)?;
    let k = grid.ky();
    let w = grid.w0;
    let a = mixing_amplitude(c, &grid);
    // Unit-power 2-D Gaussian: spectrum π·w0²·sqrt(2/π)/w0·exp(−k²w0²/4).
    let norm = PI * w * (2.0 / PI).sqrt();
    let mut plan = FftPlanner::new();
    let fft = plan.plan_fft_inverse(n);
    let sign = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = (grid.dk() / (2.0 * PI)).powi(2);
    let mut maps = Vec::with_capacity(2);
    for s in [1.0, -1.0] {
        let mut data = vec![C::new(0.0, 0.0); n * n];
        for (ix, &kx) in k.iter().enumerate() {
            for (iy, &ky) in k.iter().enumerate() {
                let g = norm * (-(kx * kx + ky * ky) * w * w / 4.0).exp();
                let op = (c.rp + C::new(0.0, s * ky) * a) * FRAC_1_SQRT_2;
                data[ix * n + iy] = op * g * sign(ix) * sign(iy);
            }
        }
        for row in data.chunks_mut(n) {
            fft.process(row);
        }
        let mut col = vec![C::new(0.0, 0.0); n];
        for iy in 0..n {
            for ix in 0..n {
                col[ix] = data[ix * n + iy];
            }
            fft.process(&mut col);
            for ix in 0..n {
                data[ix * n + iy] = col[ix];
            }
        }
        maps.push(
            data.iter()
                .map(|z| (z * scale).norm_sqr())
                .collect::<Vec<f64>>(),
        );
    }
    let minus = maps.pop().unwrap();
    let plus = maps.pop().unwrap();
    let y = grid.y();
    Ok(IntensityMap {
        x: y.clone(),
        y,
        plus,
        minus,
    })
}
