//! Parallel evaluation of the physics pipeline over a parameter grid.

use std::time::Instant;

use rayon::prelude::*;
use rydberg_pshe::beam::{intensity_map, OperatorCoefficients, Propagator};
use rydberg_pshe::optics::fresnel_pair;
use rydberg_pshe::response::susceptibility;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, SweepSpec};

/// Pipeline stage evaluated at each grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Chi,
    Fresnel,
    Shift,
}

impl Stage {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Stage::Chi => &[
                "re_chi1",
                "im_chi1",
                "re_chi3_local",
                "im_chi3_local",
                "re_chi3_nonlocal",
                "im_chi3_nonlocal",
            ],
            Stage::Fresnel => &[
                "re_rp",
                "im_rp",
                "re_rs",
                "im_rs",
                "abs_rp",
                "abs_rs",
                "abs_rs_over_abs_rp",
            ],
            Stage::Shift => &[
                "delta_plus_um",
                "delta_minus_um",
                "power_plus",
                "power_minus",
            ],
        }
    }

    fn units(self) -> &'static str {
        match self {
            Stage::Chi => "chi terms dimensionless; chi3 terms include the probe field factor",
            Stage::Fresnel => {
                "amplitude coefficients of the layered cell, transfer-matrix sign convention"
            }
            Stage::Shift => "centroid shifts in um; powers relative to the incident beam",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    /// Seconds; reported on stderr and never written to output files.
    #[serde(skip)]
    pub wall_time: f64,
}

impl Metadata {
    fn new(cfg: &RunConfig, command: &str) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_sha256: config_hash(cfg, command),
            wall_time: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub values: Vec<f64>,
    pub error: Option<String>,
}

/// Tabulated output; axis columns first, rows x-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metadata: Metadata,
    pub units: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl SweepResult {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// SHA-256 of the canonical configuration and command name, in hex. The
/// output path is left out so the destination does not change the bytes.
pub fn config_hash(cfg: &RunConfig, command: &str) -> String {
    let mut cfg = cfg.clone();
    cfg.output.path = None;
    let mut h = Sha256::new();
    h.update(cfg.to_canonical().as_bytes());
    h.update(b"\ncommand = ");
    h.update(command.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Physics columns at one configuration.
pub fn evaluate(cfg: &RunConfig, stage: Stage) -> rydberg_pshe::Result<Vec<f64>> {
    let atom = cfg.atom_params()?;
    let drive = cfg.drive_params()?;
    let chi = susceptibility(&drive, &atom)?;
    if stage == Stage::Chi {
        return Ok(vec![
            chi.chi1.re,
            chi.chi1.im,
            chi.chi3_local.re,
            chi.chi3_local.im,
            chi.chi3_nonlocal.re,
            chi.chi3_nonlocal.im,
        ]);
    }
    let beam = cfg.beam_spec()?;
    let stack = cfg.geometry().stack(chi.total)?;
    let pair = fresnel_pair(&stack, beam.theta_i, beam.k0())?;
    if stage == Stage::Fresnel {
        let (ap, as_) = (pair.rp.norm(), pair.rs.norm());
        return Ok(vec![
            pair.rp.re,
            pair.rp.im,
            pair.rs.re,
            pair.rs.im,
            ap,
            as_,
            as_ / ap,
        ]);
    }
    let s = Propagator::new(&beam)?.shifts(&OperatorCoefficients::from_fresnel(&pair))?;
    Ok(vec![
        s.delta_plus,
        s.delta_minus,
        s.power_plus,
        s.power_minus,
    ])
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// Evaluates `stage` over every point of `sweep`. A failing point yields a
/// row of NaN physics values with its error message; the sweep continues.
/// `threads = 0` uses one worker per core.
pub fn run_sweep(
    cfg: &RunConfig,
    sweep: &SweepSpec,
    stage: Stage,
    command: &str,
    threads: usize,
) -> SweepResult {
    let start = Instant::now();
    let mut effective = cfg.clone();
    effective.sweep = Some(sweep.clone());
    let axes = sweep.axes();
    let grids: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
    let inner = grids.get(1).map_or(1, Vec::len);
    let points: Vec<Vec<f64>> = (0..sweep.rows())
        .map(|i| {
            let mut p = vec![grids[0][i / inner]];
            if let Some(g) = grids.get(1) {
                p.push(g[i % inner]);
            }
            p
        })
        .collect();
    let rows = with_pool(threads, || {
        points
            .par_iter()
            .map(|p| {
                let mut c = cfg.clone();
                for (axis, &v) in axes.iter().zip(p) {
                    c.set(axis.variable, v);
                }
                let mut values = p.clone();
                match evaluate(&c, stage) {
                    Ok(v) => {
                        values.extend(v);
                        Row {
                            values,
                            error: None,
                        }
                    }
                    Err(e) => {
                        values.extend(std::iter::repeat_n(f64::NAN, stage.columns().len()));
                        Row {
                            values,
                            error: Some(e.to_string()),
                        }
                    }
                }
            })
            .collect()
    });
    let mut units: Vec<String> = axes
        .iter()
        .map(|a| format!("{}: swept {}", a.variable.column(), a.variable.name()))
        .collect();
    units.push(stage.units().to_string());
    let mut metadata = Metadata::new(&effective, command);
    metadata.wall_time = start.elapsed().as_secs_f64();
    SweepResult {
        metadata,
        units,
        columns: axes
            .iter()
            .map(|a| a.variable.column().to_string())
            .chain(stage.columns().iter().map(|s| s.to_string()))
            .collect(),
        rows,
    }
}

/// Transverse intensity maps of the incident and both reflected spin
/// components on an `size`×`size` grid, each normalised to its own peak and
/// cropped to |x|, |y| ≤ `half_width` μm.
pub fn profile(
    cfg: &RunConfig,
    size: usize,
    span: f64,
    half_width: f64,
    command: &str,
) -> rydberg_pshe::Result<SweepResult> {
    let start = Instant::now();
    let atom = cfg.atom_params()?;
    let drive = cfg.drive_params()?;
    let chi = susceptibility(&drive, &atom)?.total;
    let beam = cfg.beam_spec()?.with_grid(size, span)?;
    let stack = cfg.geometry().stack(chi)?;
    let pair = fresnel_pair(&stack, beam.theta_i, beam.k0())?;
    let map = intensity_map(&beam, &OperatorCoefficients::from_fresnel(&pair), size)?;
    let peak = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let (pp, pm) = (peak(&map.plus), peak(&map.minus));
    let norm = |v: f64, p: f64| if p > 0.0 { v / p } else { 0.0 };
    let w2 = beam.w0 * beam.w0;
    let n = map.y.len();
    let mut rows = Vec::new();
    for (ix, &x) in map.x.iter().enumerate() {
        if x.abs() > half_width {
            continue;
        }
        for (iy, &y) in map.y.iter().enumerate() {
            if y.abs() > half_width {
                continue;
            }
            let k = ix * n + iy;
            rows.push(Row {
                values: vec![
                    x,
                    y,
                    (-2.0 * (x * x + y * y) / w2).exp(),
                    norm(map.plus[k], pp),
                    norm(map.minus[k], pm),
                ],
                error: None,
            });
        }
    }
    let mut metadata = Metadata::new(
        cfg,
        &format!("{command} size={size} span={span:?} half_width={half_width:?}"),
    );
    metadata.wall_time = start.elapsed().as_secs_f64();
    Ok(SweepResult {
        metadata,
        units: vec![
            "x_um, y_um: transverse coordinates in um".into(),
            "intensities normalised to the peak of each map".into(),
        ],
        columns: [
            "x_um",
            "y_um",
            "intensity_incident",
            "intensity_plus",
            "intensity_minus",
        ]
        .map(String::from)
        .to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Axis, SweepVariable};

    #[test]
    fn two_dimensional_layout_is_x_major() {
        let sweep = SweepSpec {
            x: Axis::new(SweepVariable::ThetaI, 30.0, 31.0, 2),
            y: Some(Axis::new(SweepVariable::Delta2, -1.0, 1.0, 3)),
        };
        let r = run_sweep(&RunConfig::default(), &sweep, Stage::Fresnel, "t", 1);
        let axes: Vec<(f64, f64)> = r.rows.iter().map(|r| (r.values[0], r.values[1])).collect();
        assert_eq!(
            axes,
            vec![
                (30.0, -1.0),
                (30.0, 0.0),
                (30.0, 1.0),
                (31.0, -1.0),
                (31.0, 0.0),
                (31.0, 1.0)
            ]
        );
    }

    #[test]
    fn failing_point_is_isolated() {
        // 90° incidence is outside the beam model's range.
        let sweep = SweepSpec::one(Axis::new(SweepVariable::ThetaI, 80.0, 95.0, 3));
        let r = run_sweep(&RunConfig::default(), &sweep, Stage::Shift, "t", 2);
        assert_eq!(r.failed_rows(), 2);
        assert!(r.rows[0].error.is_none());
        assert!(r.rows[2].values[1].is_nan());
    }

    #[test]
    fn thread_count_does_not_change_rows() {
        let sweep = SweepSpec::one(Axis::new(SweepVariable::Delta2, -3.0, 3.0, 7));
        let a = run_sweep(&RunConfig::default(), &sweep, Stage::Chi, "t", 1);
        let b = run_sweep(&RunConfig::default(), &sweep, Stage::Chi, "t", 4);
        assert_eq!(a.rows, b.rows);
    }
}
