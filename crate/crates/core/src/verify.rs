//! Invariant and oracle checks with a machine-readable report.

use crate::beam::{analytic_gaussian_shift, BeamSpec, OperatorCoefficients, Propagator};
use crate::error::Result;
use crate::optics::{
    fresnel_pair, impedance, refraction_cosine, stack_fresnel, stack_matrix, Geometry, Layer,
    LayerStack, Polarization,
};
use crate::oracle::{full_local_bloch_steady_state, quadrature_refine, PairExpansion};
use crate::response::{
    second_order_onebody, susceptibility, AtomParams, DriveParams, Hierarchy, ModelOptions,
};
use crate::units::{mhz, per_mm3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One line of the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub status: Status,
    pub measured: f64,
    pub threshold: f64,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.checks).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<4} {:<36} measured {:<12.4e} threshold {:<10.3e} ({:.0} ms)\n",
                match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                },
                c.check_name,
                c.measured,
                c.threshold,
                c.runtime_ms
            ));
        }
        let failed = self
            .checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .count();
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.checks.len(),
            failed
        ));
        out
    }
}

/// Outcome of a check: measured value and whether it passes.
type Outcome = Result<(f64, bool)>;

fn below(measured: f64, threshold: f64) -> Outcome {
    Ok((measured, measured < threshold))
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

fn canonical_scan(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| mhz(-10.0 + 20.0 * i as f64 / (n - 1) as f64))
}

const K0: f64 = 2.0 * std::f64::consts::PI / 0.78;

fn oracle_self_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let atom = AtomParams::from_decay_rates(
            mhz(rng.gen_range(0.5..10.0)),
            mhz(rng.gen_range(0.0..0.5)),
            0.0,
            per_mm3(4e7),
            0.78,
        )?;
        let drive = DriveParams::new(
            mhz(rng.gen_range(0.0..5.0)),
            mhz(rng.gen_range(0.0..10.0)),
            mhz(rng.gen_range(-20.0..20.0)),
            mhz(rng.gen_range(-2.0..2.0)),
        )?;
        let rho = full_local_bloch_steady_state(&drive, &atom)?;
        worst = worst
            .max(rho.hermiticity_error())
            .max((rho.trace() - 1.0).norm())
            .max(-rho.min_eigenvalue() * 1e-2);
    }
    below(worst, 1e-12)
}

fn perturbative_deviation(omega_p: f64) -> Result<f64> {
    let atom = AtomParams::rubidium();
    let mut worst = 0.0f64;
    for d2 in canonical_scan(81) {
        let mut drive = DriveParams::canonical(d2);
        drive.omega_p = omega_p;
        let h = Hierarchy::new(&drive, &atom)?;
        let pert = h.first.rho21 + omega_p * omega_p * h.local_third()?;
        let exact = full_local_bloch_steady_state(&drive, &atom)?.get(2, 1) / omega_p;
        worst = worst.max(rel(pert, exact));
    }
    Ok(worst)
}

fn perturbative_certification() -> Outcome {
    below(perturbative_deviation(mhz(0.1))?, 1e-2)
}

fn perturbative_monotonic() -> Outcome {
    let e = [0.1, 0.2, 0.4]
        .iter()
        .map(|&x| perturbative_deviation(mhz(x)))
        .collect::<Result<Vec<_>>>()?;
    Ok((e[2] / e[0], e[0] < e[1] && e[1] < e[2]))
}

fn pair_closure() -> Outcome {
    let atom = AtomParams::rubidium();
    let mut worst = 0.0f64;
    for d2 in [-2.0, 0.0, 1.3] {
        let drive = DriveParams::canonical(mhz(d2));
        let h = Hierarchy::new(&drive, &atom)?;
        for v in [0.0, 50.0, 1e4] {
            let e = PairExpansion::new(&drive, &atom, v, 3)?;
            let x = h.pair_third(v)?.x;
            for (g, w) in x.iter().zip(e.third_order()) {
                worst = worst.max((g - w).norm() / w.norm().max(1e-300));
            }
        }
    }
    below(worst, 1e-9)
}

fn trace_order_by_order() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let atom = AtomParams::from_decay_rates(
            mhz(rng.gen_range(1.0..10.0)),
            mhz(rng.gen_range(0.0..0.1)),
            mhz(140e3),
            per_mm3(4e7),
            0.78,
        )?;
        let drive = DriveParams::new(
            mhz(0.5),
            mhz(rng.gen_range(0.1..10.0)),
            mhz(rng.gen_range(-20.0..20.0)),
            mhz(rng.gen_range(-2.0..2.0)),
        )?;
        let s = second_order_onebody(&drive, &atom)?;
        worst = worst.max((s.rho11 + s.rho22 + s.rho33).norm());
    }
    below(worst, 1e-12)
}

fn linear_passivity() -> Outcome {
    let atom = AtomParams::rubidium().with_model(ModelOptions {
        nonlocal: false,
        ..ModelOptions::default()
    });
    let mut lowest = f64::INFINITY;
    for i in 0..=400 {
        let d2 = mhz(-20.0 + 40.0 * i as f64 / 400.0);
        lowest = lowest.min(susceptibility(&DriveParams::canonical(d2), &atom)?.chi1.im);
    }
    Ok((lowest, lowest >= -1e-12))
}

fn density_scaling() -> Outcome {
    let atom = AtomParams::rubidium();
    let drive = DriveParams::canonical(0.0);
    let a = susceptibility(&drive, &atom)?;
    let b = susceptibility(&drive, &atom.clone().with_density(2.0 * atom.density))?;
    let ratio = b.chi3_nonlocal / a.chi3_nonlocal;
    Ok((ratio.re, (ratio - 4.0).norm() < 4e-10))
}

fn quadrature_doubling() -> Outcome {
    let r = quadrature_refine(
        &DriveParams::canonical(0.0),
        &AtomParams::rubidium(),
        &[32, 64],
    )?;
    below(r.successive[0], 1e-8)
}

fn quadrature_trapezoid() -> Outcome {
    let atom = AtomParams::rubidium();
    let mut worst = 0.0f64;
    for d2 in canonical_scan(21) {
        let r = quadrature_refine(&DriveParams::canonical(d2), &atom, &[64])?;
        worst = worst.max(r.trapezoid_difference);
    }
    below(worst, 1e-6)
}

fn airy_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n1 = rng.gen_range(1.0..2.0);
        let n3 = rng.gen_range(1.0..2.0);
        let n2 = C::new(rng.gen_range(0.8..2.5), rng.gen_range(0.0..0.05));
        let d = rng.gen_range(0.0..20.0);
        let th = rng.gen_range(0.0..1.4);
        let stack = LayerStack::new(n1, vec![Layer::new(n2, d)?], n3)?;
        for pol in [Polarization::P, Polarization::S] {
            let (r, _) = stack_fresnel(&stack, th, K0, pol)?;
            let p = |n: C| impedance(n, refraction_cosine(n1, th, n), pol);
            let (p1, p2, p3) = (p(C::from(n1)), p(n2), p(C::from(n3)));
            let r12 = (p1 - p2) / (p1 + p2);
            let r23 = (p2 - p3) / (p2 + p3);
            let ph = (C::new(0.0, 2.0) * K0 * n2 * d * refraction_cosine(n1, th, n2)).exp();
            let airy = (r12 + r23 * ph) / (1.0 + r12 * r23 * ph);
            worst = worst.max((r - airy).norm());
        }
    }
    below(worst, 1e-12)
}

fn energy_and_unimodularity() -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut energy, mut det) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n_in = rng.gen_range(1.0..2.0);
        let n_out = rng.gen_range(1.0..2.0);
        let layers = (0..rng.gen_range(1..5))
            .map(|_| Layer::new(C::from(rng.gen_range(1.0..3.0)), rng.gen_range(0.0..5.0)))
            .collect::<Result<Vec<_>>>()?;
        let stack = LayerStack::new(n_in, layers, n_out)?;
        let th = rng.gen_range(0.0..1.5);
        for pol in [Polarization::P, Polarization::S] {
            let (r, t) = stack_fresnel(&stack, th, K0, pol)?;
            let p = |n: f64| impedance(C::from(n), refraction_cosine(n_in, th, C::from(n)), pol);
            let ratio = (p(n_out) / p(n_in)).re;
            energy = energy.max((r.norm_sqr() + ratio * t.norm_sqr() - 1.0).abs());
            // Relative to the size of the two products so that evanescent
            // layers with huge entries are judged at working precision.
            let m = stack_matrix(&stack, th, K0, pol)?;
            let scale = (m[(0, 0)] * m[(1, 1)]).norm() + (m[(0, 1)] * m[(1, 0)]).norm();
            det = det.max((m.determinant() - 1.0).norm() / scale.max(1.0));
        }
    }
    Ok((energy, det))
}

fn energy_conservation() -> Outcome {
    below(energy_and_unimodularity()?.0, 1e-10)
}

fn unimodularity() -> Outcome {
    below(energy_and_unimodularity()?.1, 1e-12)
}

/// Spin-orbit coefficients of the canonical cell at Δ2 and θ.
fn cell_coefficients(delta2_mhz: f64, theta_deg: f64) -> Result<(OperatorCoefficients, BeamSpec)> {
    let chi = susceptibility(
        &DriveParams::canonical(mhz(delta2_mhz)),
        &AtomParams::rubidium(),
    )?;
    let stack = Geometry::glass_cell().stack(chi.total)?;
    let beam = BeamSpec::new(50.0, theta_deg.to_radians(), 0.78)?;
    let pair = fresnel_pair(&stack, beam.theta_i, beam.k0())?;
    Ok((OperatorCoefficients::from_fresnel(&pair), beam))
}

fn angle_scan() -> impl Iterator<Item = f64> {
    (0..=70).map(|i| 33.5 + 0.01 * i as f64)
}

fn mirror_antisymmetry() -> Outcome {
    let mut worst = 0.0f64;
    for th in angle_scan() {
        let (c, b) = cell_coefficients(0.0, th)?;
        let r = Propagator::new(&b)?.shifts(&c)?;
        worst = worst.max((r.delta_plus + r.delta_minus).abs());
    }
    below(worst, 1e-9)
}

fn shift_bound() -> Outcome {
    let mut worst = 0.0f64;
    for d2 in [-3.0, 0.0, 3.0] {
        for th in angle_scan() {
            let (c, b) = cell_coefficients(d2, th)?;
            let r = Propagator::new(&b)?.shifts(&c)?;
            worst = worst.max(r.delta_plus.abs() / b.w0);
        }
    }
    Ok((worst, worst <= 0.525))
}

fn fft_vs_analytic() -> Outcome {
    let mut worst = 0.0f64;
    for d2 in [-3.0, 0.0, 3.0] {
        for th in [20.0, 25.0, 30.0, 33.0, 34.5, 40.0] {
            let (c, b) = cell_coefficients(d2, th)?;
            if c.rp.norm() <= 0.05 {
                continue;
            }
            let r = Propagator::new(&b)?.shifts(&c)?;
            let (a, _) = analytic_gaussian_shift(&c, &b)?;
            worst = worst.max((r.delta_plus - a).abs() / a.abs());
        }
    }
    below(worst, 0.02)
}

fn grid_independence() -> Outcome {
    let mut worst = 0.0f64;
    for th in [33.6, 33.85, 34.0] {
        let (c, b) = cell_coefficients(0.0, th)?;
        let coarse = Propagator::new(&b)?.shifts(&c)?;
        let fine = Propagator::new(&b.clone().with_grid(2 * b.grid_n, b.grid_span)?)?.shifts(&c)?;
        worst = worst.max((coarse.delta_plus - fine.delta_plus).abs() / fine.delta_plus.abs());
    }
    below(worst, 1e-3)
}

/// δ+ at Δ2/2π = −3 MHz, θ = 33.87°: positive when σ+ is displaced to +y.
fn orientation_shift(sign: f64) -> Result<f64> {
    let (c, b) = cell_coefficients(-3.0, 33.87)?;
    Ok(Propagator::new(&b)?.shifts_signed(&c, sign)?.delta_plus)
}

fn orientation() -> Outcome {
    let d = orientation_shift(1.0)?;
    Ok((d, d > 0.0))
}

/// Flipping the cross-term sign must keep the mirror antisymmetry but spoil
/// the orientation, showing the orientation check has teeth.
fn mutation_sensitivity() -> Outcome {
    let (c, b) = cell_coefficients(-3.0, 33.87)?;
    let flipped = Propagator::new(&b)?.shifts_signed(&c, -1.0)?;
    let antisymmetric = (flipped.delta_plus + flipped.delta_minus).abs() < 1e-9;
    Ok((
        flipped.delta_plus,
        antisymmetric && flipped.delta_plus < 0.0,
    ))
}

type Check = (&'static str, f64, fn() -> Outcome);

const CHECKS: &[Check] = &[
    ("oracle_self_consistency", 1e-12, oracle_self_consistency),
    (
        "perturbative_certification",
        1e-2,
        perturbative_certification,
    ),
    (
        "perturbative_deviation_monotonic",
        1.0,
        perturbative_monotonic,
    ),
    ("pair_closure_vs_two_atom_expansion", 1e-9, pair_closure),
    ("trace_order_by_order", 1e-12, trace_order_by_order),
    ("linear_passivity", -1e-12, linear_passivity),
    ("density_scaling_nonlocal", 4.0, density_scaling),
    ("quadrature_32_to_64_nodes", 1e-8, quadrature_doubling),
    ("quadrature_vs_trapezoid", 1e-6, quadrature_trapezoid),
    ("airy_equivalence", 1e-12, airy_equivalence),
    ("energy_conservation", 1e-10, energy_conservation),
    ("unimodularity", 1e-12, unimodularity),
    ("mirror_antisymmetry", 1e-9, mirror_antisymmetry),
    ("shift_bound_over_w0", 0.525, shift_bound),
    ("fft_vs_analytic_shift", 0.02, fft_vs_analytic),
    ("grid_independence", 1e-3, grid_independence),
    ("spin_orientation", 0.0, orientation),
    ("mutation_sensitivity", 0.0, mutation_sensitivity),
];

/// Names of all checks, in report order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check on its own thread. Errors count as failures with a NaN
/// measurement.
pub fn verify_suite() -> VerifyReport {
    let checks = std::thread::scope(|scope| {
        let handles: Vec<_> = CHECKS
            .iter()
            .map(|&(name, threshold, f)| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let (measured, ok) = f().unwrap_or((f64::NAN, false));
                    CheckReport {
                        check_name: name.to_string(),
                        status: if ok { Status::Pass } else { Status::Fail },
                        measured,
                        threshold,
                        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect()
    });
    VerifyReport { checks }
}
