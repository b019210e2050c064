use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spincav_cli::acceptance::{run_all, Evidence};
use spincav_cli::config::{load_config, Config};
use spincav_cli::emit::{emit, write_rows, Format};
use spincav_cli::sweep::{run_sweep, Engine, SweepVariable};
use spincav_cli::CliError;
use spincav_core::analytic::{g2_cavity_analytic, g2_cavity_r_analytic, g2_output_full, steady_amplitudes};
use spincav_core::dynamics::{solve_model_with, SteadyStateOptions};
use spincav_core::observables::{g2_output, transmission};
use spincav_core::{Direction, FockDims, PhysicalParams};

#[derive(Parser)]
#[command(name = "spincav", version, about = "Spinning-cavity photon blockade simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the drive detuning (in units of κ).
    Spectrum(SweepArgs),
    /// Sweep the rotation frequency (kHz), Δ locked to the left resonance.
    Rotation(SweepArgs),
    /// Solve one point and print every contribution.
    Point(PointArgs),
    /// Run the acceptance checks on the reference device.
    Check {
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file with [device] and [sweep] tables.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    /// Photon cutoff for both modes.
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    points: Option<usize>,
    /// Sweep range: κ for spectrum, kHz for rotation.
    #[arg(long, num_args = 2, value_names = ["START", "STOP"], allow_negative_numbers = true)]
    range: Option<Vec<f64>>,
    /// Restrict to one direction.
    #[arg(long)]
    direction: Option<Direction>,
    /// Fixed detuning for rotation sweeps.
    #[arg(long, allow_negative_numbers = true)]
    detuning_kappa: Option<f64>,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Add a wall_time_ms column.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    detuning_kappa: f64,
    #[arg(long, default_value_t = Direction::Cw)]
    direction: Direction,
    /// Rotation frequency of both cavities, overriding the config.
    #[arg(long)]
    rotation_khz: Option<f64>,
    #[arg(long, default_value_t = 4)]
    cutoff: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn config(path: &Option<PathBuf>) -> Result<Config, CliError> {
    path.as_deref().map(load_config).unwrap_or_else(|| Ok(Config::default()))
}

fn sweep(args: SweepArgs, variable: SweepVariable) -> Result<(), CliError> {
    let Config { physical, mut sweep } = config(&args.config)?;
    if let Some(e) = args.engine {
        sweep.engine = Some(e);
    }
    if let Some(n) = args.cutoff {
        sweep.cutoff = Some(n);
        sweep.cutoff_l = None;
        sweep.cutoff_r = None;
    }
    if let Some(p) = args.points {
        sweep.points = Some(p);
    }
    if let Some(r) = args.range {
        let r = [r[0], r[1]];
        match variable {
            SweepVariable::Detuning => sweep.detuning_range_kappa = Some(r),
            SweepVariable::RotationFreq => sweep.rotation_range_khz = Some(r),
        }
    }
    if let Some(d) = args.direction {
        sweep.directions = Some(vec![d.as_str().into()]);
    }
    if let Some(d) = args.detuning_kappa {
        sweep.detuning_kappa = Some(d);
    }
    let mut spec = sweep.to_spec(variable)?;
    spec.timing = args.timing;
    let rows = run_sweep(&spec, &physical, args.workers)?;
    match args.out {
        Some(path) => emit(&rows, args.format, spec.timing, &path),
        None => write_rows(&rows, args.format, spec.timing, std::io::stdout().lock())
            .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e }),
    }
}

fn point(args: PointArgs) -> Result<(), CliError> {
    let Config { mut physical, .. } = config(&args.config)?;
    if let Some(khz) = args.rotation_khz {
        physical = PhysicalParams { rotation_freq_l: khz * 1e3, rotation_freq_r: khz * 1e3, ..physical };
    }
    let m = spincav_core::params::derive_model(&physical, 0.0, args.direction)?
        .normalized()
        .with_detuning(args.detuning_kappa);
    let dims = FockDims::square(args.cutoff)?;
    let s = solve_model_with(&m, dims, &SteadyStateOptions::default())?;
    let t = transmission(&s.rho, &m)?;
    let c = g2_output(&s.rho, &m)?;

    let mut out = std::io::stdout().lock();
    let mut line = |text: String| writeln!(out, "{text}").map_err(|e| CliError::Io { path: "<stdout>".into(), source: e });
    line(format!("direction      {}", args.direction))?;
    line(format!("detuning       {:+.6} κ", m.detuning))?;
    line(format!("fizeau L, R    {:+.6} κ, {:+.6} κ", m.fizeau_l, m.fizeau_r))?;
    line(format!("kerr           {:.6} κ", m.kerr))?;
    line(format!("drive          {:.6e} κ", m.drive_l))?;
    line(format!("cutoff         ({}, {})", dims.n_max_l(), dims.n_max_r()))?;
    line(format!("solver         {:?}, residual {:.3e}", s.method, s.residual))?;
    line(format!("T left         {:.10}", t.t_left))?;
    line(format!("T right        {:.10}", t.t_right))?;
    line(format!("T interference {:+.10}", t.t_interference))?;
    line(format!("T total        {:.10}", t.t_total))?;
    line(format!("g2 output      {:.6e}", c.g2_output))?;
    line(format!("  numerator terms (flux² = {:.6e})", c.output_flux * c.output_flux))?;
    for (label, value) in c.terms.labelled() {
        line(format!("  {label:<24} {value:+.6e}"))?;
    }
    line(format!("g2 cavity L    {:.6e}", c.g2_cavity_l))?;
    line(format!("g2 cavity R    {:.6e}", c.g2_cavity_r))?;
    match steady_amplitudes(&m) {
        Ok(a) => {
            let fmt = |r: Result<f64, spincav_core::Error>| match r {
                Ok(v) => format!("{v:.6e}"),
                Err(e) => e.code().to_string(),
            };
            line(format!("analytic g2 output     {}", fmt(g2_output_full(&a, m.kappa_l, m.kappa_r))))?;
            line(format!("analytic g2 cavity L   {}", fmt(g2_cavity_analytic(&a))))?;
            line(format!("analytic g2 cavity R   {}", fmt(g2_cavity_r_analytic(&a))))?;
        }
        Err(e) => line(format!("analytic       {}", e.code()))?,
    }
    Ok(())
}

fn check(workers: usize) -> Result<bool, CliError> {
    let evidence = Evidence::collect(workers)?;
    let outcomes = run_all(&evidence);
    for o in &outcomes {
        println!("{o}");
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    Ok(passed == outcomes.len())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(a) => sweep(a, SweepVariable::Detuning).map(|_| true),
        Command::Rotation(a) => sweep(a, SweepVariable::RotationFreq).map(|_| true),
        Command::Point(a) => point(a).map(|_| true),
        Command::Check { workers } => check(workers),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
