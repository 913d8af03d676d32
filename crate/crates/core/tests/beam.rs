use num_complex::Complex64;
use proptest::prelude::*;
use rydberg_pshe::beam::*;
use rydberg_pshe::optics::{fresnel_pair, Geometry};
use rydberg_pshe::response::{AtomParams, DriveParams};
use rydberg_pshe::units::mhz;
use rydberg_pshe::Error;
use std::f64::consts::PI;

type C = Complex64;

fn beam(theta_deg: f64) -> BeamSpec {
    BeamSpec::new(50.0, theta_deg.to_radians(), 0.78).unwrap()
}

fn coeffs(rp: C, rs: C) -> OperatorCoefficients {
    OperatorCoefficients { rp, rs }
}

#[test]
fn incident_spectrum_shape_and_norm() {
    let b = beam(30.0);
    let s = incident_spectrum(&b);
    let mid = b.grid_n / 2;
    assert_eq!(s.ky[mid], 0.0);
    let peak = s.amplitude[mid].re;
    assert!(s.amplitude.iter().all(|z| z.re <= peak));
    let want = peak * (-1f64).exp();
    let k = 2.0 / b.w0;
    let got = peak * (-k * k * b.w0 * b.w0 / 4.0).exp();
    assert!((got - want).abs() < 1e-15 * peak);
    let power: f64 = s.amplitude.iter().map(|z| z.norm_sqr()).sum::<f64>() * b.dk() / (2.0 * PI);
    assert!((power - 1.0).abs() < 1e-10);
}

#[test]
fn spectra_symmetries() {
    let b = beam(33.0);
    let c = coeffs(C::new(0.02, 0.01), C::new(-0.3, 0.05));
    let s = reflected_spin_spectra(&b, &c).unwrap();
    let mid = b.grid_n / 2;
    assert_eq!(s.plus[mid], s.minus[mid]);
    // σ swap equals ky → −ky (the grid is symmetric about index N/2).
    for j in 1..b.grid_n {
        let m = b.grid_n - j;
        assert!((s.plus[j] - s.minus[m]).norm() < 1e-15 * s.plus[mid].norm().max(1.0));
    }
    let null = reflected_spin_spectra(&b, &coeffs(C::new(0.1, 0.2), C::new(-0.1, -0.2))).unwrap();
    assert_eq!(null.plus, null.minus);
}

#[test]
fn unshifted_and_displaced_gaussians() {
    let b = beam(30.0);
    let prop = Propagator::new(&b).unwrap();
    let inc = incident_spectrum(&b);
    let e = prop.transform(&inc.amplitude);
    assert!(centroid(&b.y(), &e).unwrap().abs() < 1e-9);

    let shifted: Vec<C> = inc
        .ky
        .iter()
        .zip(&inc.amplitude)
        .map(|(k, a)| a * C::from_polar(1.0, -k * 3.0))
        .collect();
    let e = prop.transform(&shifted);
    assert!((centroid(&b.y(), &e).unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn transform_reproduces_gaussian_profile() {
    let b = beam(30.0);
    let e = Propagator::new(&b)
        .unwrap()
        .transform(&incident_spectrum(&b).amplitude);
    let amp = (2.0 / PI).powf(0.25) / b.w0.sqrt();
    for (y, z) in b.y().iter().zip(&e) {
        let want = amp * (-(y * y) / (b.w0 * b.w0)).exp();
        // Truncating the spectrum at 8/w0 (edge amplitude e^-16) leaves ringing
        // of about 2e-8 of the peak.
        assert!((z - want).norm() < 1e-7 * amp, "y = {y}");
    }
}

#[test]
fn parseval_and_powers() {
    let b = beam(40.0);
    let c = coeffs(C::new(0.3, -0.1), C::new(-0.5, 0.2));
    let spectra = reflected_spin_spectra(&b, &c).unwrap();
    let f = reflected_field(&b, &spectra).unwrap();
    let spatial: f64 = f.intensity_plus().iter().sum::<f64>() * b.dy();
    let spectral: f64 =
        spectra.plus.iter().map(|z| z.norm_sqr()).sum::<f64>() * b.dk() / (2.0 * PI);
    assert!((spatial - spectral).abs() < 1e-10 * spectral);
}

#[test]
fn zero_power_centroid_is_an_error() {
    let y = [0.0, 1.0];
    assert_eq!(centroid(&y, &[C::new(0.0, 0.0); 2]), Err(Error::ZeroPower));
    let b = beam(30.0);
    assert_eq!(
        analytic_gaussian_shift(&coeffs(C::new(0.0, 0.0), C::new(0.0, 0.0)), &b),
        Err(Error::ZeroPower)
    );
}

#[test]
fn analytic_limits() {
    let b = beam(30.0);
    let (p, m) =
        analytic_gaussian_shift(&coeffs(C::new(0.3, 0.1), C::new(-0.3, -0.1)), &b).unwrap();
    assert_eq!((p, m), (0.0, 0.0));
    // Pure derivative mode: rp = 0 but rs ≠ 0.
    let (p, m) = analytic_gaussian_shift(&coeffs(C::new(0.0, 0.0), C::new(0.4, 0.0)), &b).unwrap();
    assert_eq!(p, 0.0);
    assert_eq!(m, 0.0);
}

#[test]
fn zero_mixing_null() {
    let b = beam(33.0);
    let r = Propagator::new(&b)
        .unwrap()
        .shifts(&coeffs(C::new(0.2, 0.1), C::new(-0.2, -0.1)))
        .unwrap();
    assert!(r.delta_plus.abs() < 1e-12 && r.delta_minus.abs() < 1e-12);
}

#[test]
fn window_guard_trips_on_narrow_window() {
    let b = beam(30.0).with_grid(256, 200.0).unwrap();
    let c = coeffs(C::new(0.3, 0.0), C::new(-0.2, 0.0));
    let s = reflected_spin_spectra(&b, &c).unwrap();
    assert!(matches!(reflected_field(&b, &s), Err(Error::Window { .. })));
}

#[test]
fn invalid_beams_rejected() {
    assert!(BeamSpec::new(0.0, 0.5, 0.78).is_err());
    assert!(BeamSpec::new(50.0, 0.0, 0.78).is_err());
    assert!(BeamSpec::new(50.0, 86f64.to_radians(), 0.78).is_err());
    assert!(beam(30.0).with_grid(1000, 8.0).is_err());
    assert!(beam(30.0).with_grid(128, 8.0).is_err());
    assert!(beam(30.0).with_grid(1024, 5.0).is_err());
}

#[test]
fn grid_doubling_is_stable() {
    let b = beam(33.9);
    let c = coeffs(C::new(0.004, 0.002), C::new(-0.17, 0.01));
    let r1 = Propagator::new(&b).unwrap().shifts(&c).unwrap();
    let b2 = b.clone().with_grid(4096, 8.0).unwrap();
    let r2 = Propagator::new(&b2).unwrap().shifts(&c).unwrap();
    assert!((r1.delta_plus - r2.delta_plus).abs() < 1e-3 * r2.delta_plus.abs());
}

#[test]
fn intensity_map_matches_one_dimensional_profile() {
    let b = beam(33.9).with_grid(256, 32.0).unwrap();
    let c = coeffs(C::new(0.01, 0.004), C::new(-0.17, 0.02));
    let map = intensity_map(&b, &c, 256).unwrap();
    let fields = reflected_field(&b, &reflected_spin_spectra(&b, &c).unwrap()).unwrap();
    // Slice at x = 0 equals the 1-D profile times the x Gaussian at x = 0.
    let ix = 128;
    assert_eq!(map.x[ix], 0.0);
    let gx = (2.0 / PI).sqrt() / b.w0;
    let row = &map.plus[ix * 256..(ix + 1) * 256];
    let prof = fields.intensity_plus();
    let top = prof.iter().cloned().fold(0.0, f64::max);
    for (a, p) in row.iter().zip(&prof) {
        assert!((a / gx - p).abs() < 1e-10 * top);
    }
    let total: f64 = map.plus.iter().sum::<f64>() * b.dy() * b.dy();
    let power1d: f64 = prof.iter().sum::<f64>() * b.dy();
    assert!((total - power1d).abs() < 1e-10 * power1d);
}

fn canonical_shift(delta2_mhz: f64, theta_deg: f64) -> ShiftResult {
    pshe_shifts(
        &Geometry::glass_cell(),
        &beam(theta_deg),
        &DriveParams::canonical(mhz(delta2_mhz)),
        &AtomParams::rubidium(),
    )
    .unwrap()
}

#[test]
fn sub_wavelength_far_from_brewster() {
    let r = canonical_shift(0.0, 20.0);
    assert!(r.delta_plus.abs() < 0.4, "{r:?}");
    assert!((r.delta_plus + r.delta_minus).abs() < 1e-9);
}

#[test]
fn fft_agrees_with_analytic_on_canonical_stack() {
    let atom = AtomParams::rubidium();
    let chi = rydberg_pshe::response::susceptibility(&DriveParams::canonical(0.0), &atom)
        .unwrap()
        .total;
    let stack = Geometry::glass_cell().stack(chi).unwrap();
    for th in [20.0, 25.0, 30.0, 33.0, 40.0, 50.0] {
        let b = beam(th);
        let c =
            OperatorCoefficients::from_fresnel(&fresnel_pair(&stack, b.theta_i, b.k0()).unwrap());
        if c.rp.norm() <= 0.05 {
            continue;
        }
        let fft = Propagator::new(&b).unwrap().shifts(&c).unwrap();
        let (ap, _) = analytic_gaussian_shift(&c, &b).unwrap();
        assert!((fft.delta_plus - ap).abs() <= 0.02 * ap.abs(), "θ = {th}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_matches_analytic_and_is_antisymmetric(
        rp_re in -1.0f64..1.0, rp_im in -1.0f64..1.0,
        rs_re in -1.0f64..1.0, rs_im in -1.0f64..1.0,
        theta in 10.0f64..80.0,
    ) {
        let c = coeffs(C::new(rp_re, rp_im), C::new(rs_re, rs_im));
        prop_assume!(c.rp.norm() > 0.05);
        let b = beam(theta);
        let r = Propagator::new(&b).unwrap().shifts(&c).unwrap();
        let (ap, am) = analytic_gaussian_shift(&c, &b).unwrap();
        prop_assert!((r.delta_plus + r.delta_minus).abs() < 1e-9);
        prop_assert!((r.delta_plus - ap).abs() <= 0.02 * ap.abs() + 1e-9);
        prop_assert!((r.delta_minus - am).abs() <= 0.02 * am.abs() + 1e-9);
        prop_assert!(r.delta_plus.abs() <= 0.525 * b.w0);
    }
}
