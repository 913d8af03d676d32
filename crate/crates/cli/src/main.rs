use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use rydberg_pshe::verify::verify_suite;
use rydberg_pshe_cli::config::{parse_config, Axis, Format, RunConfig, SweepSpec, SweepVariable};
use rydberg_pshe_cli::emit::emit;
use rydberg_pshe_cli::sweep::{profile, run_sweep, Stage, SweepResult};

const USAGE: u8 = 1;
const CONFIG: u8 = 2;
const NUMERICAL: u8 = 3;
const IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "pshe",
    version,
    about = "Spin Hall shifts of a probe beam reflected from a Rydberg-EIT layer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Sectioned TOML configuration; omitted keys take the canonical values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Probe detuning sweep, MHz.
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta2_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta2_max: Option<f64>,
    #[arg(long, global = true)]
    delta2_steps: Option<usize>,
    /// Incidence sweep, degrees.
    #[arg(long, global = true)]
    theta_min: Option<f64>,
    #[arg(long, global = true)]
    theta_max: Option<f64>,
    #[arg(long, global = true)]
    theta_steps: Option<usize>,
    /// Fixed probe detuning, MHz.
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta2: Option<f64>,
    /// Fixed incidence angle, degrees.
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Atomic density, mm⁻³.
    #[arg(long, global = true, allow_hyphen_values = true)]
    density: Option<f64>,
    /// Coupling Rabi frequency Ωc/2π, MHz.
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_c: Option<f64>,
    /// Probe Rabi frequency Ωp/2π, MHz.
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_p: Option<f64>,
    /// Atomic layer thickness, μm.
    #[arg(long, global = true, allow_hyphen_values = true)]
    d2: Option<f64>,
    /// Beam waist, μm.
    #[arg(long, global = true, allow_hyphen_values = true)]
    w0: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq)]
enum Command {
    /// Susceptibility components versus probe detuning.
    Chi,
    /// Reflection coefficients versus incidence angle.
    Fresnel,
    /// Spin-resolved shifts versus incidence angle.
    ShiftAngle,
    /// Spin-resolved shifts versus probe detuning.
    ShiftDetuning,
    /// Shifts on an incidence × detuning grid.
    Map,
    /// Transverse intensity maps of the reflected spin components.
    Profile {
        /// Transform size per dimension (power of two).
        #[arg(long, default_value_t = 256)]
        size: usize,
        /// Spectral half-width in units of 1/w0.
        #[arg(long, default_value_t = 32.0)]
        span: f64,
        /// Half-width of the emitted window, μm.
        #[arg(long, default_value_t = 150.0)]
        half_width: f64,
    },
    /// Oracle and property checks.
    Verify,
    /// Prints the effective configuration.
    Defaults,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Chi => "chi",
            Command::Fresnel => "fresnel",
            Command::ShiftAngle => "shift-angle",
            Command::ShiftDetuning => "shift-detuning",
            Command::Map => "map",
            Command::Profile { .. } => "profile",
            Command::Verify => "verify",
            Command::Defaults => "defaults",
        }
    }

    fn sweep(self) -> Option<(Stage, SweepSpec)> {
        use SweepVariable::{Delta2, ThetaI};
        let one = |v, a, b, n| SweepSpec::one(Axis::new(v, a, b, n));
        Some(match self {
            Command::Chi => (Stage::Chi, one(Delta2, -10.0, 10.0, 201)),
            Command::Fresnel => (Stage::Fresnel, one(ThetaI, 20.0, 50.0, 301)),
            Command::ShiftAngle => (Stage::Shift, one(ThetaI, 33.5, 34.2, 500)),
            Command::ShiftDetuning => (Stage::Shift, one(Delta2, -6.0, 6.0, 241)),
            Command::Map => (
                Stage::Shift,
                SweepSpec {
                    x: Axis::new(ThetaI, 33.6, 34.1, 101),
                    y: Some(Axis::new(Delta2, -6.0, 6.0, 121)),
                },
            ),
            _ => return None,
        })
    }
}

struct Failure(u8, String);

type Run<T> = Result<T, Failure>;

fn load(cli: &Cli) -> Run<RunConfig> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Failure(IO, format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text).map_err(|e| {
        let file = cli
            .config
            .as_ref()
            .map_or("<defaults>".into(), |p| p.display().to_string());
        Failure(CONFIG, format!("{file}: {e}"))
    })?;
    let scalars = [
        (cli.delta2, SweepVariable::Delta2),
        (cli.theta, SweepVariable::ThetaI),
        (cli.density, SweepVariable::Na),
        (cli.omega_c, SweepVariable::OmegaC),
        (cli.omega_p, SweepVariable::OmegaP),
        (cli.d2, SweepVariable::D2),
    ];
    for (v, var) in scalars {
        if let Some(v) = v {
            cfg.set(var, v);
        }
    }
    if let Some(w) = cli.w0 {
        cfg.beam.w0 = w;
    }
    if let Some(f) = &cli.format {
        cfg.output.format = Format::parse(f)
            .ok_or_else(|| Failure(USAGE, format!("--format must be csv or json, got `{f}`")))?;
    }
    if let Some(p) = &cli.out {
        cfg.output.path = Some(p.display().to_string());
    }
    // Overrides go through the same validation as file input.
    parse_config(&cfg.to_canonical())
        .map_err(|e| Failure(CONFIG, format!("invalid override: {}", e.message)))
}

fn adjust(axis: &mut Axis, min: Option<f64>, max: Option<f64>, steps: Option<usize>) {
    if let Some(v) = min {
        axis.min = v;
    }
    if let Some(v) = max {
        axis.max = v;
    }
    if let Some(v) = steps {
        axis.steps = v;
    }
}

fn resolve_sweep(cli: &Cli, cfg: &RunConfig, default: SweepSpec) -> Run<SweepSpec> {
    let mut sweep = cfg.sweep.clone().unwrap_or(default);
    let groups = [
        (
            SweepVariable::Delta2,
            "--delta2-*",
            cli.delta2_min,
            cli.delta2_max,
            cli.delta2_steps,
        ),
        (
            SweepVariable::ThetaI,
            "--theta-*",
            cli.theta_min,
            cli.theta_max,
            cli.theta_steps,
        ),
    ];
    for (var, flag, min, max, steps) in groups {
        if min.is_none() && max.is_none() && steps.is_none() {
            continue;
        }
        let axis = sweep
            .axes_mut()
            .find(|a| a.variable == var)
            .ok_or_else(|| {
                Failure(
                    USAGE,
                    format!("{flag} given but no {} axis is swept", var.name()),
                )
            })?;
        adjust(axis, min, max, steps);
    }
    let mut checked = cfg.clone();
    checked.sweep = Some(sweep);
    let checked = parse_config(&checked.to_canonical())
        .map_err(|e| Failure(CONFIG, format!("invalid sweep: {}", e.message)))?;
    Ok(checked.sweep.expect("sweep present"))
}

fn write(result: &SweepResult, cfg: &RunConfig) -> Run<()> {
    let path = cfg.output.path.as_ref().map(PathBuf::from);
    emit(
        result,
        cfg.output.format,
        cfg.output.precision,
        path.as_deref(),
    )
    .map_err(|e| {
        let target = path.map_or("stdout".into(), |p| p.display().to_string());
        Failure(IO, format!("cannot write {target}: {e}"))
    })?;
    eprintln!(
        "pshe {}: {} rows, {} failed, wall time {:.3} s",
        result.metadata.command,
        result.rows.len(),
        result.failed_rows(),
        result.metadata.wall_time
    );
    Ok(())
}

fn run(cli: &Cli) -> Run<()> {
    let cfg = load(cli)?;
    match cli.command {
        Command::Defaults => {
            print!("{}", cfg.to_canonical());
            Ok(())
        }
        Command::Verify => {
            let report = verify_suite();
            let text = match cfg.output.format {
                Format::Csv => report.summary(),
                Format::Json => report.to_json() + "\n",
            };
            match &cfg.output.path {
                Some(p) => std::fs::write(p, &text)
                    .map_err(|e| Failure(IO, format!("cannot write {p}: {e}")))?,
                None => print!("{text}"),
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure(NUMERICAL, "verification failed".into()))
            }
        }
        Command::Profile {
            size,
            span,
            half_width,
        } => {
            let result = profile(&cfg, size, span, half_width, "profile")
                .map_err(|e| Failure(NUMERICAL, format!("profile failed: {e}")))?;
            write(&result, &cfg)
        }
        cmd => {
            let (stage, default) = cmd.sweep().expect("sweep command");
            let sweep = resolve_sweep(cli, &cfg, default)?;
            let result = run_sweep(&cfg, &sweep, stage, cmd.name(), cli.threads);
            write(&result, &cfg)?;
            if result.failed_rows() == result.rows.len() {
                return Err(Failure(NUMERICAL, "every sweep point failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("pshe: {message}");
            ExitCode::from(code)
        }
    }
}
