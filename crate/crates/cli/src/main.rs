//! `fbpulse` - design, evaluate, reverse and export feedback pulses.
//!
//! Exit codes: 0 on success (design: converged), 2 on design
//! non-convergence, 1 on usage or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, anyhow};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fbpulse_core::{
    DesignMode, DesignTask, Magnetization, PulseParameters, PulseRecord, SelectionStrategy,
    amplitude_robustness_sweep, design_pulse, eval_grid, metrics, plot, presets, read_pulse_json,
    reverse_with_pi, sweep_parallel, write_profile_csv, write_pulse_csv, write_pulse_json,
    write_shape_file,
};

#[derive(Parser)]
#[command(
    name = "fbpulse",
    version,
    about = "Feedback pulse designer: greedy Bloch-sphere phase selection for broadband \
             inversion, broadband excitation and band-selective excitation pulses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a pulse and write it as pulse JSON (optionally a shape file)
    Design(DesignArgs),
    /// Sweep a pulse file over an offset grid; write profile CSV / SVG
    Evaluate(EvaluateArgs),
    /// Time-reverse a pulse file with pi-incremented phases
    Reverse(ReverseArgs),
    /// Convert a pulse file to a shape file or per-step CSV
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Inversion,
    Excitation,
    Band,
}

impl From<ModeArg> for DesignMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Inversion => DesignMode::Inversion,
            ModeArg::Excitation => DesignMode::Excitation,
            ModeArg::Band => DesignMode::BandSelective,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    WorstOffset,
    LinearSweep,
}

impl From<StrategyArg> for SelectionStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::WorstOffset => SelectionStrategy::WorstOffset,
            StrategyArg::LinearSweep => SelectionStrategy::LinearSweep,
        }
    }
}

#[derive(Args)]
struct DesignArgs {
    /// Bundled parameter set: paper-inversion, paper-excitation or paper-band
    #[arg(long)]
    preset: Option<String>,
    /// Design mode (required without --preset)
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// RF amplitude in kHz
    #[arg(long)]
    amplitude_khz: Option<f64>,
    /// Flip angle per step in degrees
    #[arg(long)]
    flip_deg: Option<f64>,
    /// Design band half-width B in kHz
    #[arg(long)]
    band_khz: Option<f64>,
    /// Pass band half-width C in kHz (band mode)
    #[arg(long)]
    pass_khz: Option<f64>,
    /// Number of design offsets (even)
    #[arg(long)]
    offsets: Option<usize>,
    /// Termination tolerance on z
    #[arg(long)]
    epsilon: Option<f64>,
    /// Hard cap on design steps
    #[arg(long)]
    max_steps: Option<usize>,
    /// Offset polling strategy
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Output pulse JSON path
    #[arg(short, long, default_value = "pulse.json")]
    output: PathBuf,
    /// Also write a shape file here
    #[arg(long)]
    shape: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Input pulse JSON
    #[arg(long)]
    pulse: PathBuf,
    /// Evaluation grid points
    #[arg(long, default_value_t = 401)]
    points: usize,
    /// Evaluation band half-width in kHz (default: the pulse's design band)
    #[arg(long)]
    band_khz: Option<f64>,
    /// Initial state: north pole or +y
    #[arg(long, default_value = "north")]
    from: String,
    /// RF amplitude scale factor (dwell unchanged)
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Output profile CSV path
    #[arg(short, long, default_value = "profile.csv")]
    output: PathBuf,
    /// Also write a profile SVG here
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ReverseArgs {
    /// Input pulse JSON
    #[arg(long)]
    pulse: PathBuf,
    /// Output pulse JSON path
    #[arg(short, long, default_value = "reversed.json")]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Shape,
    Csv,
}

#[derive(Args)]
struct ExportArgs {
    /// Input pulse JSON
    #[arg(long)]
    pulse: PathBuf,
    #[arg(long, value_enum, default_value_t = ExportFormat::Shape)]
    format: ExportFormat,
    /// Output path
    #[arg(short, long, default_value = "pulse.shape")]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Design(args) => cmd_design(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Reverse(args) => cmd_reverse(args),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Write via a sibling temp file and rename, so readers never see a partial
/// file.
fn write_atomic(path: &Path, content: &str) -> anyhow::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", path.display()))?;
    Ok(())
}

fn build_task(args: &DesignArgs) -> anyhow::Result<DesignTask> {
    let preset = match &args.preset {
        Some(name) => Some(presets::by_name(name).ok_or_else(|| {
            anyhow!("unknown preset {name:?} (paper-inversion, paper-excitation, paper-band)")
        })?),
        None => None,
    };
    let mode: DesignMode = match (args.mode, &preset) {
        (Some(m), _) => m.into(),
        (None, Some(p)) => p.mode,
        (None, None) => return Err(anyhow!("--mode is required without --preset")),
    };
    let amplitude_hz = match (args.amplitude_khz, &preset) {
        (Some(k), _) => k * 1e3,
        (None, Some(p)) => p.params.amplitude_hz(),
        (None, None) => return Err(anyhow!("--amplitude-khz is required without --preset")),
    };
    let flip_deg = match (args.flip_deg, &preset) {
        (Some(f), _) => f,
        (None, Some(p)) => p.params.flip_per_step_deg(),
        (None, None) => return Err(anyhow!("--flip-deg is required without --preset")),
    };
    let band_hz = match (args.band_khz, &preset) {
        (Some(k), _) => k * 1e3,
        (None, Some(p)) => p.band_hz,
        (None, None) => return Err(anyhow!("--band-khz is required without --preset")),
    };
    let pass_hz = match (args.pass_khz, &preset) {
        (Some(k), _) => Some(k * 1e3),
        (None, Some(p)) => p.pass_hz,
        (None, None) => None,
    };
    if mode == DesignMode::BandSelective && pass_hz.is_none() {
        return Err(anyhow!("--pass-khz is required for band mode"));
    }
    let params = PulseParameters::new(amplitude_hz, flip_deg)?;
    let mut task = DesignTask::new(mode, params, band_hz);
    task.pass_hz = if mode == DesignMode::BandSelective {
        pass_hz
    } else {
        None
    };
    if let Some(n) = args.offsets {
        task.n_offsets = n;
    }
    if let Some(e) = args.epsilon {
        task.epsilon = e;
    }
    if let Some(m) = args.max_steps {
        task.max_steps = m;
    }
    if let Some(s) = args.strategy {
        task.strategy = s.into();
    }
    task.validate()?;
    Ok(task)
}

/// Normalized flag echo; a run is reproducible from this string alone.
fn echo_flags(task: &DesignTask) -> String {
    let mode = match task.mode {
        DesignMode::Inversion => "inversion",
        DesignMode::Excitation => "excitation",
        DesignMode::BandSelective => "band",
    };
    let strategy = match task.strategy {
        SelectionStrategy::WorstOffset => "worst-offset",
        SelectionStrategy::LinearSweep => "linear-sweep",
    };
    let mut s = format!(
        "design --mode {mode} --amplitude-khz {} --flip-deg {} --band-khz {}",
        task.params.amplitude_hz() / 1e3,
        task.params.flip_per_step_deg(),
        task.band_hz / 1e3,
    );
    if let Some(c) = task.pass_hz {
        s.push_str(&format!(" --pass-khz {}", c / 1e3));
    }
    s.push_str(&format!(
        " --offsets {} --epsilon {} --max-steps {} --strategy {strategy}",
        task.n_offsets, task.epsilon, task.max_steps
    ));
    s
}

fn cmd_design(args: DesignArgs) -> anyhow::Result<u8> {
    let task = build_task(&args)?;
    let mut report = design_pulse(&task)?;
    report
        .sequence
        .metadata
        .insert("cli".to_string(), echo_flags(&task));
    let record = PulseRecord::from_report(&report);
    write_atomic(&args.output, &write_pulse_json(&record))?;
    if let Some(shape_path) = &args.shape {
        write_atomic(shape_path, &write_shape_file(&report.sequence)?)?;
    }
    println!(
        "designed {} pulse: steps={} duration={:.3} ms converged={} worst_final_z={:+.4} -> {}",
        task.mode.as_str(),
        report.steps,
        report.duration_s * 1e3,
        report.converged,
        report.worst_final_z(),
        args.output.display(),
    );
    Ok(if report.converged { 0 } else { 2 })
}

fn cmd_evaluate(args: EvaluateArgs) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&args.pulse)
        .with_context(|| format!("reading {}", args.pulse.display()))?;
    let record = read_pulse_json(&text)?;
    let band_hz = match (args.band_khz, record.band_hz) {
        (Some(k), _) => k * 1e3,
        (None, Some(b)) => b,
        (None, None) => {
            return Err(anyhow!(
                "the pulse file carries no design band; pass --band-khz"
            ));
        }
    };
    let m0 = match args.from.as_str() {
        "north" => Magnetization::NORTH,
        "y" => Magnetization::PLUS_Y,
        other => return Err(anyhow!("--from must be 'north' or 'y', got {other:?}")),
    };
    let grid = eval_grid(band_hz, args.points)?;
    let profile = if args.scale == 1.0 {
        sweep_parallel(&record.sequence, &grid, m0)?
    } else {
        amplitude_robustness_sweep(&record.sequence, &grid, m0, &[args.scale])?
            .pop()
            .expect("one profile per scale")
    };
    let m = metrics(&profile, band_hz, record.pass_hz)?;
    write_atomic(&args.output, &write_profile_csv(&profile, Some(&m)))?;
    if let Some(svg_path) = &args.svg {
        let title = format!("fbpulse {} profile", record.mode.as_str());
        write_atomic(svg_path, &plot::profile_svg(&profile, &title))?;
    }
    println!(
        "evaluated {} points over +-{} kHz from {} (scale {}): worst_inversion={:+.4} \
         min_transverse={:.4} phase_spread={:.2} deg{}{} -> {}",
        profile.len(),
        band_hz / 1e3,
        args.from,
        args.scale,
        m.worst_inversion,
        m.min_transverse,
        m.phase_spread_deg,
        m.stopband_leakage
            .map(|v| format!(" stopband_leakage={v:.4}"))
            .unwrap_or_default(),
        m.passband_ripple
            .map(|v| format!(" passband_ripple={v:.4}"))
            .unwrap_or_default(),
        args.output.display(),
    );
    Ok(0)
}

fn cmd_reverse(args: ReverseArgs) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&args.pulse)
        .with_context(|| format!("reading {}", args.pulse.display()))?;
    let record = read_pulse_json(&text)?;
    let reversed = record.with_sequence(reverse_with_pi(&record.sequence));
    write_atomic(&args.output, &write_pulse_json(&reversed))?;
    println!(
        "reversed {} phases (pi-incremented) -> {}",
        reversed.sequence.len(),
        args.output.display()
    );
    Ok(0)
}

fn cmd_export(args: ExportArgs) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&args.pulse)
        .with_context(|| format!("reading {}", args.pulse.display()))?;
    let record = read_pulse_json(&text)?;
    let (content, what) = match args.format {
        ExportFormat::Shape => (write_shape_file(&record.sequence)?, "shape file"),
        ExportFormat::Csv => (write_pulse_csv(&record.sequence), "per-step CSV"),
    };
    write_atomic(&args.output, &content)?;
    println!(
        "exported {} steps as {what} -> {}",
        record.sequence.len(),
        args.output.display()
    );
    Ok(0)
}
