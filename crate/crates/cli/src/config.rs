//! Sectioned TOML run configuration with MHz-facing frequency keys.
//!
//! Frequencies are written as `key = <MHz>` or `key_rad_us = <rad/μs>`; the
//! factor between the two is exactly 2π. Giving both spellings of one key is
//! an error. Lengths are in μm, angles in degrees, densities in mm⁻³.

use std::fmt::{self, Write as _};

use rydberg_pshe::beam::BeamSpec;
use rydberg_pshe::optics::Geometry;
use rydberg_pshe::response::{AtomParams, Closure, DriveParams, ModelOptions};
use rydberg_pshe::units::{mhz, per_mm3};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

/// Configuration failure with the 1-based line it refers to, when known.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    Delta2,
    #[serde(rename = "theta_i")]
    ThetaI,
    Na,
    #[serde(rename = "Omega_c")]
    OmegaC,
    #[serde(rename = "Omega_p")]
    OmegaP,
    #[serde(rename = "d2")]
    D2,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 6] = [
        SweepVariable::Delta2,
        SweepVariable::ThetaI,
        SweepVariable::Na,
        SweepVariable::OmegaC,
        SweepVariable::OmegaP,
        SweepVariable::D2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Delta2 => "Delta2",
            SweepVariable::ThetaI => "theta_i",
            SweepVariable::Na => "Na",
            SweepVariable::OmegaC => "Omega_c",
            SweepVariable::OmegaP => "Omega_p",
            SweepVariable::D2 => "d2",
        }
    }

    /// Output column name carrying the unit.
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::Delta2 => "delta2_MHz",
            SweepVariable::ThetaI => "theta_i_deg",
            SweepVariable::Na => "Na_per_mm3",
            SweepVariable::OmegaC => "omega_c_MHz",
            SweepVariable::OmegaP => "omega_p_MHz",
            SweepVariable::D2 => "d2_um",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// One swept axis, in the variable's input unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(variable: SweepVariable, min: f64, max: f64, steps: usize) -> Self {
        Self {
            variable,
            min,
            max,
            steps,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(format!("{} range must be finite", self.variable.name()));
        }
        if self.steps < 2 {
            return Err(format!(
                "{} steps must be >= 2, got {}",
                self.variable.name(),
                self.steps
            ));
        }
        Ok(())
    }
}

/// Outer axis `x` and optional inner axis `y`; rows are x-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub x: Axis,
    pub y: Option<Axis>,
}

impl SweepSpec {
    pub fn one(x: Axis) -> Self {
        Self { x, y: None }
    }

    pub fn axes(&self) -> Vec<Axis> {
        std::iter::once(self.x).chain(self.y).collect()
    }

    pub fn axes_mut(&mut self) -> impl Iterator<Item = &mut Axis> {
        std::iter::once(&mut self.x).chain(self.y.as_mut())
    }

    pub fn rows(&self) -> usize {
        self.x.steps * self.y.map_or(1, |a| a.steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSection {
    /// Γ21/2π (MHz).
    pub decay21: f64,
    /// Γ32/2π (MHz).
    pub decay32: f64,
    /// C6/2π (MHz·μm⁶).
    pub c6: f64,
    /// mm⁻³.
    pub density: f64,
    /// μm.
    pub wavelength: f64,
    pub closure: Closure,
    pub quadrature_nodes: usize,
    pub nonlocal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSection {
    /// All in MHz (/2π).
    pub omega_p: f64,
    pub omega_c: f64,
    pub delta2: f64,
    pub delta_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySection {
    pub n1: f64,
    /// μm.
    pub d2: f64,
    pub n3: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSection {
    /// μm.
    pub w0: f64,
    /// Degrees.
    pub theta_i: f64,
    pub grid_n: usize,
    pub grid_span: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: Format,
    pub precision: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub atom: AtomSection,
    pub drive: DriveSection,
    pub geometry: GeometrySection,
    pub beam: BeamSection,
    pub sweep: Option<SweepSpec>,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            atom: AtomSection {
                decay21: 6.0,
                decay32: 0.003,
                c6: 140e3,
                density: 4e7,
                wavelength: 0.78,
                closure: Closure::Exact,
                quadrature_nodes: 64,
                nonlocal: true,
            },
            drive: DriveSection {
                omega_p: 0.75,
                omega_c: 4.0,
                delta2: 0.0,
                delta_c: -0.1,
            },
            geometry: GeometrySection {
                n1: 1.49,
                d2: 100.0,
                n3: 1.49,
            },
            beam: BeamSection {
                w0: 50.0,
                theta_i: 33.87,
                grid_n: 2048,
                grid_span: 8.0,
            },
            sweep: None,
            output: OutputSection {
                path: None,
                format: Format::Csv,
                precision: 12,
            },
        }
    }
}

type Parsed<T> = std::result::Result<T, ConfigError>;

/// Line lookup for keys and sections of the source text.
struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn section_line(&self, section: &str) -> Option<usize> {
        self.text
            .lines()
            .position(|l| {
                l.trim()
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .map(str::trim)
                    == Some(section)
            })
            .map(|i| i + 1)
    }

    fn key_line(&self, section: &str, key: &str) -> Option<usize> {
        let mut current = "";
        for (i, line) in self.text.lines().enumerate() {
            let t = line.trim();
            if let Some(s) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = s.trim();
                continue;
            }
            if current == section {
                if let Some((k, _)) = t.split_once('=') {
                    if k.trim().trim_matches('"') == key {
                        return Some(i + 1);
                    }
                }
            }
        }
        None
    }

    fn err(&self, section: &str, key: &str, message: String) -> ConfigError {
        ConfigError {
            line: self
                .key_line(section, key)
                .or_else(|| self.section_line(section)),
            message,
        }
    }
}

/// Typed reader over one section that tracks which keys were consumed.
struct SectionReader<'a> {
    src: &'a Source<'a>,
    name: &'static str,
    table: Table,
}

impl<'a> SectionReader<'a> {
    fn new(src: &'a Source<'a>, root: &mut Table, name: &'static str) -> Parsed<Self> {
        let table = match root.remove(name) {
            None => Table::new(),
            Some(Value::Table(t)) => t,
            Some(_) => {
                return Err(ConfigError {
                    line: src.key_line("", name),
                    message: format!("`{name}` must be a section"),
                })
            }
        };
        Ok(Self { src, name, table })
    }

    fn err(&self, key: &str, message: String) -> ConfigError {
        self.src.err(self.name, key, message)
    }

    fn number(&mut self, key: &str) -> Parsed<Option<f64>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(f)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(v) => Err(self.err(
                key,
                format!("`{key}` must be a number, got {}", v.type_str()),
            )),
        }
    }

    /// Frequency in MHz from `key` or `key_rad_us`.
    fn frequency(&mut self, key: &str) -> Parsed<Option<f64>> {
        let alt = format!("{key}_rad_us");
        let plain = self.number(key)?;
        let rad = self.number(&alt)?;
        match (plain, rad) {
            (Some(_), Some(_)) => Err(self.err(
                &alt,
                format!("inconsistent units: both `{key}` (MHz) and `{alt}` (rad/μs) given"),
            )),
            (Some(m), None) => Ok(Some(m)),
            (None, Some(r)) => Ok(Some(r / mhz(1.0))),
            (None, None) => Ok(None),
        }
    }

    fn count(&mut self, key: &str) -> Parsed<Option<usize>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as usize)),
            Some(v) => Err(self.err(
                key,
                format!("`{key}` must be a non-negative integer, got {v}"),
            )),
        }
    }

    fn string(&mut self, key: &str) -> Parsed<Option<String>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(self.err(
                key,
                format!("`{key}` must be a string, got {}", v.type_str()),
            )),
        }
    }

    fn boolean(&mut self, key: &str) -> Parsed<Option<bool>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(b)),
            Some(v) => Err(self.err(
                key,
                format!("`{key}` must be true or false, got {}", v.type_str()),
            )),
        }
    }

    fn check(&self, key: &str, ok: bool, what: &str, value: f64) -> Parsed<()> {
        if ok && value.is_finite() {
            Ok(())
        } else {
            Err(self.err(key, format!("`{key}` = {value} out of range: {what}")))
        }
    }

    fn finish(self) -> Parsed<()> {
        if let Some(k) = self.table.keys().next() {
            return Err(self.err(k, format!("unknown key `{k}` in [{}]", self.name)));
        }
        Ok(())
    }
}

fn toml_line(text: &str, err: &toml::de::Error) -> Option<usize> {
    err.span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
}

fn parse_axis(r: &mut SectionReader, prefix: &str) -> Parsed<Option<Axis>> {
    let Some(name) = r.string(prefix)? else {
        for k in ["min", "max", "steps"] {
            let key = format!("{prefix}_{k}");
            if r.table.contains_key(&key) {
                return Err(r.err(&key, format!("`{key}` given without `{prefix}`")));
            }
        }
        return Ok(None);
    };
    let variable = SweepVariable::parse(&name).ok_or_else(|| {
        r.err(
            prefix,
            format!(
                "unknown sweep variable `{name}`; expected one of {}",
                SweepVariable::ALL.map(|v| v.name()).join(", ")
            ),
        )
    })?;
    let need = |r: &mut SectionReader, k: &str| -> Parsed<f64> {
        let key = format!("{prefix}_{k}");
        r.number(&key)?
            .ok_or_else(|| r.err(prefix, format!("missing `{key}`")))
    };
    let min = need(r, "min")?;
    let max = need(r, "max")?;
    let steps_key = format!("{prefix}_steps");
    let steps = r
        .count(&steps_key)?
        .ok_or_else(|| r.err(prefix, format!("missing `{steps_key}`")))?;
    let axis = Axis::new(variable, min, max, steps);
    axis.validate().map_err(|m| r.err(&steps_key, m))?;
    Ok(Some(axis))
}

/// Parses configuration text, filling omitted keys with the canonical values.
pub fn parse_config(text: &str) -> Parsed<RunConfig> {
    let src = Source { text };
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError {
        line: toml_line(text, &e),
        message: e.message().to_string(),
    })?;
    let mut cfg = RunConfig::default();

    let mut r = SectionReader::new(&src, &mut root, "atom")?;
    let a = &mut cfg.atom;
    if let Some(v) = r.frequency("decay21")? {
        r.check("decay21", v > 0.0, "must be > 0", v)?;
        a.decay21 = v;
    }
    if let Some(v) = r.frequency("decay32")? {
        r.check("decay32", v >= 0.0, "must be >= 0", v)?;
        a.decay32 = v;
    }
    if let Some(v) = r.frequency("c6")? {
        r.check("c6", v >= 0.0, "must be >= 0", v)?;
        a.c6 = v;
    }
    if let Some(v) = r.number("density")? {
        r.check("density", v >= 0.0, "must be >= 0", v)?;
        a.density = v;
    }
    if let Some(v) = r.number("wavelength")? {
        r.check("wavelength", v > 0.0, "must be > 0", v)?;
        a.wavelength = v;
    }
    if let Some(s) = r.string("closure")? {
        a.closure = match s.as_str() {
            "exact" => Closure::Exact,
            "as-printed" => Closure::AsPrinted,
            _ => {
                return Err(r.err(
                    "closure",
                    format!("closure `{s}` must be `exact` or `as-printed`"),
                ))
            }
        };
    }
    if let Some(v) = r.count("quadrature_nodes")? {
        r.check(
            "quadrature_nodes",
            (2..=1024).contains(&v),
            "must be in [2, 1024]",
            v as f64,
        )?;
        a.quadrature_nodes = v;
    }
    if let Some(v) = r.boolean("nonlocal")? {
        a.nonlocal = v;
    }
    r.finish()?;

    let mut r = SectionReader::new(&src, &mut root, "drive")?;
    let d = &mut cfg.drive;
    if let Some(v) = r.frequency("omega_p")? {
        r.check("omega_p", v > 0.0, "must be > 0", v)?;
        d.omega_p = v;
    }
    if let Some(v) = r.frequency("omega_c")? {
        r.check("omega_c", v >= 0.0, "must be >= 0", v)?;
        d.omega_c = v;
    }
    if let Some(v) = r.frequency("delta2")? {
        r.check("delta2", true, "must be finite", v)?;
        d.delta2 = v;
    }
    if let Some(v) = r.frequency("delta_c")? {
        r.check("delta_c", true, "must be finite", v)?;
        d.delta_c = v;
    }
    r.finish()?;

    let mut r = SectionReader::new(&src, &mut root, "geometry")?;
    let g = &mut cfg.geometry;
    for (key, slot) in [("n1", &mut g.n1), ("n3", &mut g.n3)] {
        if let Some(v) = r.number(key)? {
            r.check(key, v >= 1.0, "must be >= 1", v)?;
            *slot = v;
        }
    }
    if let Some(v) = r.number("d2")? {
        r.check("d2", v >= 0.0, "must be >= 0", v)?;
        g.d2 = v;
    }
    r.finish()?;

    let mut r = SectionReader::new(&src, &mut root, "beam")?;
    let b = &mut cfg.beam;
    if let Some(v) = r.number("w0")? {
        r.check("w0", v > 0.0, "must be > 0", v)?;
        b.w0 = v;
    }
    if let Some(v) = r.number("theta_i")? {
        r.check(
            "theta_i",
            (5.0..=85.0).contains(&v),
            "must be in [5, 85] degrees",
            v,
        )?;
        b.theta_i = v;
    }
    if let Some(v) = r.count("grid_n")? {
        r.check(
            "grid_n",
            v >= 256 && v.is_power_of_two(),
            "must be a power of two >= 256",
            v as f64,
        )?;
        b.grid_n = v;
    }
    if let Some(v) = r.number("grid_span")? {
        r.check("grid_span", v >= 6.0, "must be >= 6", v)?;
        b.grid_span = v;
    }
    r.finish()?;

    if root.contains_key("sweep") {
        let mut r = SectionReader::new(&src, &mut root, "sweep")?;
        let x = parse_axis(&mut r, "x")?.ok_or_else(|| r.err("x", "[sweep] needs `x`".into()))?;
        let y = parse_axis(&mut r, "y")?;
        if y.is_some_and(|y| y.variable == x.variable) {
            return Err(r.err("y", "`x` and `y` must sweep different variables".into()));
        }
        r.finish()?;
        cfg.sweep = Some(SweepSpec { x, y });
    }

    let mut r = SectionReader::new(&src, &mut root, "output")?;
    let o = &mut cfg.output;
    if let Some(p) = r.string("path")? {
        o.path = Some(p);
    }
    if let Some(f) = r.string("format")? {
        o.format = Format::parse(&f)
            .ok_or_else(|| r.err("format", format!("format `{f}` must be csv or json")))?;
    }
    if let Some(v) = r.count("precision")? {
        r.check(
            "precision",
            (1..=17).contains(&v),
            "must be in [1, 17]",
            v as f64,
        )?;
        o.precision = v;
    }
    r.finish()?;

    if let Some(k) = root.keys().next() {
        return Err(ConfigError {
            line: src.section_line(k).or_else(|| src.key_line("", k)),
            message: format!("unknown section or key `{k}`"),
        });
    }
    Ok(cfg)
}

fn num(v: f64) -> String {
    // Debug keeps a decimal point or exponent so the value re-reads as a float.
    format!("{v:?}")
}

impl RunConfig {
    /// Canonical text: every key, MHz spellings, fixed order.
    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        let a = &self.atom;
        let closure = match a.closure {
            Closure::Exact => "exact",
            Closure::AsPrinted => "as-printed",
        };
        let _ = writeln!(s, "[atom]");
        let _ = writeln!(s, "decay21 = {}", num(a.decay21));
        let _ = writeln!(s, "decay32 = {}", num(a.decay32));
        let _ = writeln!(s, "c6 = {}", num(a.c6));
        let _ = writeln!(s, "density = {}", num(a.density));
        let _ = writeln!(s, "wavelength = {}", num(a.wavelength));
        let _ = writeln!(s, "closure = \"{closure}\"");
        let _ = writeln!(s, "quadrature_nodes = {}", a.quadrature_nodes);
        let _ = writeln!(s, "nonlocal = {}", a.nonlocal);
        let d = &self.drive;
        let _ = writeln!(s, "\n[drive]");
        let _ = writeln!(s, "omega_p = {}", num(d.omega_p));
        let _ = writeln!(s, "omega_c = {}", num(d.omega_c));
        let _ = writeln!(s, "delta2 = {}", num(d.delta2));
        let _ = writeln!(s, "delta_c = {}", num(d.delta_c));
        let g = &self.geometry;
        let _ = writeln!(s, "\n[geometry]");
        let _ = writeln!(s, "n1 = {}", num(g.n1));
        let _ = writeln!(s, "d2 = {}", num(g.d2));
        let _ = writeln!(s, "n3 = {}", num(g.n3));
        let b = &self.beam;
        let _ = writeln!(s, "\n[beam]");
        let _ = writeln!(s, "w0 = {}", num(b.w0));
        let _ = writeln!(s, "theta_i = {}", num(b.theta_i));
        let _ = writeln!(s, "grid_n = {}", b.grid_n);
        let _ = writeln!(s, "grid_span = {}", num(b.grid_span));
        if let Some(sw) = &self.sweep {
            let _ = writeln!(s, "\n[sweep]");
            for (p, axis) in [("x", Some(sw.x)), ("y", sw.y)] {
                if let Some(ax) = axis {
                    let _ = writeln!(s, "{p} = \"{}\"", ax.variable.name());
                    let _ = writeln!(s, "{p}_min = {}", num(ax.min));
                    let _ = writeln!(s, "{p}_max = {}", num(ax.max));
                    let _ = writeln!(s, "{p}_steps = {}", ax.steps);
                }
            }
        }
        let o = &self.output;
        let _ = writeln!(s, "\n[output]");
        if let Some(p) = &o.path {
            let _ = writeln!(s, "path = {}", Value::String(p.clone()));
        }
        let _ = writeln!(s, "format = \"{}\"", o.format.name());
        let _ = writeln!(s, "precision = {}", o.precision);
        s
    }

    pub fn atom_params(&self) -> rydberg_pshe::Result<AtomParams> {
        let a = &self.atom;
        Ok(AtomParams::from_decay_rates(
            mhz(a.decay21),
            mhz(a.decay32),
            mhz(a.c6),
            per_mm3(a.density),
            a.wavelength,
        )?
        .with_model(ModelOptions {
            closure: a.closure,
            quadrature_nodes: a.quadrature_nodes,
            nonlocal: a.nonlocal,
            ..ModelOptions::default()
        }))
    }

    pub fn drive_params(&self) -> rydberg_pshe::Result<DriveParams> {
        let d = &self.drive;
        DriveParams::new(
            mhz(d.omega_p),
            mhz(d.omega_c),
            mhz(d.delta2),
            mhz(d.delta_c),
        )
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            n_in: self.geometry.n1,
            thickness: self.geometry.d2,
            n_out: self.geometry.n3,
        }
    }

    pub fn beam_spec(&self) -> rydberg_pshe::Result<BeamSpec> {
        let b = &self.beam;
        BeamSpec::new(b.w0, b.theta_i.to_radians(), self.atom.wavelength)?
            .with_grid(b.grid_n, b.grid_span)
    }

    /// Sets one sweep variable to `value` (input units).
    pub fn set(&mut self, variable: SweepVariable, value: f64) {
        match variable {
            SweepVariable::Delta2 => self.drive.delta2 = value,
            SweepVariable::ThetaI => self.beam.theta_i = value,
            SweepVariable::Na => self.atom.density = value,
            SweepVariable::OmegaC => self.drive.omega_c = value,
            SweepVariable::OmegaP => self.drive.omega_p = value,
            SweepVariable::D2 => self.geometry.d2 = value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
    }

    #[test]
    fn negative_density_reports_line() {
        let e = parse_config("[atom]\n\ndensity = -1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("out of range"), "{e}");
    }

    #[test]
    fn unknown_key_reports_line() {
        let e = parse_config("[drive]\nomega_p = 1\nomega_q = 2\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("unknown key"), "{e}");
    }

    #[test]
    fn unknown_section_rejected() {
        let e = parse_config("[drive]\n[laser]\npower = 1\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn both_unit_spellings_rejected() {
        let e = parse_config("[drive]\nomega_c = 4\nomega_c_rad_us = 25.1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("inconsistent units"), "{e}");
    }

    #[test]
    fn rad_us_keys_convert() {
        let c = parse_config(&format!("[drive]\nomega_c_rad_us = {:?}\n", mhz(4.0))).unwrap();
        assert!((c.drive.omega_c - 4.0).abs() < 1e-15);
    }

    #[test]
    fn syntax_error_reports_line() {
        let e = parse_config("[atom]\ndensity = 4e7\nwavelength = = 1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn sweep_axis_validation() {
        let e = parse_config("[sweep]\nx = \"Delta2\"\nx_min = -1\nx_max = 1\nx_steps = 1\n")
            .unwrap_err();
        assert_eq!(e.line, Some(5));
        let e = parse_config("[sweep]\nx = \"Delta3\"\nx_min = -1\nx_max = 1\nx_steps = 3\n")
            .unwrap_err();
        assert_eq!(e.line, Some(2));
        let e =
            parse_config("[sweep]\nx = \"Na\"\nx_min = 1\nx_max = inf\nx_steps = 3\n").unwrap_err();
        assert!(e.message.contains("finite"), "{e}");
    }

    #[test]
    fn canonical_round_trip() {
        let text = "[atom]\ndensity = 8e7\nclosure = \"as-printed\"\n[beam]\ntheta_i = 34\n\
                    [sweep]\nx = \"theta_i\"\nx_min = 33.5\nx_max = 34.2\nx_steps = 5\n\
                    y = \"Delta2\"\ny_min = -6\ny_max = 6\ny_steps = 3\n[output]\npath = \"a b.csv\"\n";
        let a = parse_config(text).unwrap();
        let canon = a.to_canonical();
        let b = parse_config(&canon).unwrap();
        assert_eq!(a, b);
        assert_eq!(canon, b.to_canonical());
    }

    #[test]
    fn axis_endpoints_exact() {
        let v = Axis::new(SweepVariable::ThetaI, 33.5, 34.2, 8).values();
        assert_eq!(v[0], 33.5);
        assert_eq!(v[7], 34.2);
    }
}
