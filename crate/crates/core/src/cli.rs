//! Command line front end. [`run`] returns the process exit status:
//! 0 success, 2 usage, 3 validation, 4 numeric failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::channel::{FrequencySweep, Synthesizer};
use crate::error::{Error, Result};
use crate::geometry::{Pose, Vec3};
use crate::io::{self, LoadedScenario};
use crate::metrics::{eirp_to_tx_power, eirp_total_dbm, MetricsReport};
use crate::pso::{optimize, SwarmConfig};
use crate::ris::{angle_grid, beam_pattern, far_field_steering, peak_angle, RisConfig, RisPanel, DEFAULT_PITCH_M};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ris-mimo", version, about = "RIS-assisted MIMO link simulation")]
struct Cli {
    /// Scenario file (TOML); the bundled Zone-A scenario when omitted.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Overrides the scenario's scatter and swarm seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Horizontal-cut beam patterns of a steered surface tile.
    Pattern(PatternArgs),
    /// Synthesize the scenario sweep and report its metrics.
    Simulate(SimulateArgs),
    /// Run the swarm beam search and compare against the reference channel.
    Optimize(OptimizeArgs),
    /// Link budget and, given a sweep file, its channel metrics.
    Metrics(MetricsArgs),
    /// Import a measured sweep, de-embed it and write it in canonical form.
    Ingest(IngestArgs),
}

#[derive(Debug, Args)]
struct PatternArgs {
    #[arg(long, alias = "incidence", default_value_t = 120.0)]
    incidence_deg: f64,
    /// Steering targets, comma separated.
    #[arg(long, alias = "steer", value_delimiter = ',', default_values_t = [45.0, 60.0, 75.0, 90.0, 105.0, 120.0, 135.0])]
    steer_deg: Vec<f64>,
    #[arg(long, default_value_t = 3.5e9)]
    freq_hz: f64,
    #[arg(long, default_value_t = 0.1)]
    step_deg: f64,
    #[arg(long, default_value_t = 16)]
    rows: usize,
    #[arg(long, default_value_t = 16)]
    cols: usize,
    #[arg(long, default_value_t = 1.0)]
    element_exponent: f64,
}

#[derive(Debug, Args, Clone)]
struct PowerArgs {
    /// Conducted transmit power; derived from the EIRP limit when omitted.
    #[arg(long)]
    tx_power_dbm: Option<f64>,
    /// Noise power spectral density in dBm/Hz.
    #[arg(long)]
    noise_psd: Option<f64>,
    #[arg(long)]
    noise_figure_db: Option<f64>,
    #[arg(long, default_value_t = 44.0)]
    eirp_per_5mhz: f64,
    #[arg(long, default_value_t = 20.4)]
    antenna_gain_dbi: f64,
    /// Defaults to the scenario band width.
    #[arg(long)]
    bandwidth_mhz: Option<f64>,
    /// Transmit powers of the capacity curve, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0])]
    curve_dbm: Vec<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Surface configuration text; only the reference channel is simulated
    /// when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    power: PowerArgs,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    swarm_size: Option<usize>,
    /// Frequency points per fitness evaluation.
    #[arg(long)]
    fitness_points: Option<usize>,
    #[command(flatten)]
    power: PowerArgs,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    sweep: Option<PathBuf>,
    #[command(flatten)]
    power: PowerArgs,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    raw: PathBuf,
    /// Reference trace (`freq_hz,re,im`) divided out of every path.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value = "sweep_calibrated.csv")]
    output: String,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Failures print `error_code=<CODE>` as the first stderr
/// line followed by human-readable diagnostics.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprintln!("error_code=E_USAGE");
            eprint!("{e}");
            return EXIT_USAGE;
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            print!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error_code={}", e.code());
            match &e {
                Error::Schema(problems) => {
                    eprintln!("error: scenario failed validation");
                    for p in problems {
                        eprintln!("  {p}");
                    }
                }
                other => eprintln!("error: {other}"),
            }
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<String> {
    fs::create_dir_all(&cli.out_dir).map_err(|e| Error::io(&cli.out_dir, e))?;
    match &cli.command {
        Command::Pattern(a) => pattern(cli, a),
        Command::Simulate(a) => simulate(cli, a),
        Command::Optimize(a) => run_optimize(cli, a),
        Command::Metrics(a) => metrics(cli, a),
        Command::Ingest(a) => ingest(cli, a),
    }
}

fn load(cli: &Cli) -> Result<LoadedScenario> {
    let mut loaded = match &cli.scenario {
        Some(p) => io::load_scenario_file(p)?,
        None => io::parse_scenario(io::ZONE_A_SCENARIO, Path::new("zone_a.toml"))?,
    };
    if let Some(seed) = cli.seed {
        loaded.scenario.scatter.seed = seed;
        loaded.swarm.seed = seed;
    }
    Ok(loaded)
}

fn write(cli: &Cli, name: &str, contents: &str) -> Result<()> {
    io::write_atomic(&cli.out_dir.join(name), contents.as_bytes())
}

fn pattern(cli: &Cli, a: &PatternArgs) -> Result<String> {
    let mut panel = RisPanel::new(a.rows, a.cols, DEFAULT_PITCH_M, Pose::at(Vec3::zeros()))?;
    panel.element_exponent = a.element_exponent;
    panel.validate()?;
    if !(a.step_deg > 0.0) {
        return Err(Error::InvalidArgument("--step-deg must be > 0".into()));
    }
    let grid = angle_grid(0.0, 180.0, a.step_deg);
    let mut csv = String::from("steer_deg,angle_deg,gain_db\n");
    let mut peaks = String::from("steer_deg,peak_deg\n");
    let mut summary = String::new();
    for &steer in &a.steer_deg {
        let config = far_field_steering(&panel, a.incidence_deg, steer, a.freq_hz);
        let pat = beam_pattern(&panel, &config, a.incidence_deg, &grid, a.freq_hz)?;
        for (ang, g) in grid.iter().zip(&pat) {
            let _ = writeln!(csv, "{steer},{ang},{g:.6}");
        }
        let peak = peak_angle(&grid, &pat).ok_or_else(|| Error::Numeric("empty pattern".into()))?;
        let _ = writeln!(peaks, "{steer},{peak}");
        let _ = writeln!(summary, "steer_deg = {steer} peak_deg = {peak}");
    }
    write(cli, "pattern.csv", &csv)?;
    write(cli, "pattern_peaks.csv", &peaks)?;
    Ok(summary)
}

struct LinkBudget {
    tx_power_dbm: f64,
    eirp_total_dbm: f64,
    noise_power_w: f64,
    bandwidth_hz: f64,
}

fn link_budget(p: &PowerArgs, loaded: &LoadedScenario) -> Result<LinkBudget> {
    let bandwidth_hz = p.bandwidth_mhz.map_or(loaded.scenario.band.bandwidth(), |b| b * 1e6);
    let eirp = eirp_total_dbm(p.eirp_per_5mhz, bandwidth_hz)?;
    let tx_power_dbm = match p.tx_power_dbm {
        Some(t) => t,
        None => eirp_to_tx_power(p.eirp_per_5mhz, bandwidth_hz, p.antenna_gain_dbi)?,
    };
    let mut noise = loaded.scenario.noise;
    if let Some(psd) = p.noise_psd {
        noise.psd_dbm_per_hz = psd;
    }
    if let Some(nf) = p.noise_figure_db {
        noise.noise_figure_db = nf;
    }
    let values = [tx_power_dbm, eirp, noise.psd_dbm_per_hz, noise.noise_figure_db];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("link budget values must be finite".into()));
    }
    Ok(LinkBudget {
        tx_power_dbm,
        eirp_total_dbm: eirp,
        noise_power_w: noise.power_w(bandwidth_hz),
        bandwidth_hz,
    })
}

fn budget_text(b: &LinkBudget) -> String {
    format!(
        "eirp_total_dbm = {:.4}\ntx_power_dbm = {:.4}\nbandwidth_hz = {}\nnoise_power_w = {:e}\n",
        b.eirp_total_dbm, b.tx_power_dbm, b.bandwidth_hz, b.noise_power_w
    )
}

/// Writes sweep, report and CSVs with a common suffix.
fn report(cli: &Cli, label: &str, sweep: &FrequencySweep, b: &LinkBudget, p: &PowerArgs) -> Result<MetricsReport> {
    let r = MetricsReport::compute(label, sweep, b.tx_power_dbm, b.noise_power_w, b.bandwidth_hz, &p.curve_dbm)?;
    io::export_sweep(sweep, &cli.out_dir.join(format!("sweep_{label}.csv")))?;
    write(cli, &format!("metrics_{label}.txt"), &r.to_text())?;
    write(cli, &format!("gain_{label}.csv"), &r.gain_csv())?;
    write(cli, &format!("capacity_{label}.csv"), &r.capacity_csv())?;
    Ok(r)
}

fn summary_line(r: &MetricsReport) -> String {
    format!(
        "{}: band_gain_db = {:.4} mean_effective_rank = {:.4} capacity_bps = {:.6e}\n",
        r.label,
        10.0 * r.band_gain.log10(),
        r.mean_effective_rank,
        r.capacity_at_tx_power_bps
    )
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<String> {
    let loaded = load(cli)?;
    let budget = link_budget(&a.power, &loaded)?;
    let synth = Synthesizer::new(&loaded.scenario)?;
    let mut out = budget_text(&budget);
    let reference = synth.sweep(None)?;
    out += &summary_line(&report(cli, "reference", &reference, &budget, &a.power)?);
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config = RisConfig::from_text(&text)?;
        let sweep = synth.sweep(Some(&config))?;
        out += &summary_line(&report(cli, "ris", &sweep, &budget, &a.power)?);
    }
    Ok(out)
}

fn run_optimize(cli: &Cli, a: &OptimizeArgs) -> Result<String> {
    let loaded = load(cli)?;
    let budget = link_budget(&a.power, &loaded)?;
    let scn = &loaded.scenario;
    let cfg = SwarmConfig {
        iterations: a.iterations.unwrap_or(loaded.swarm.iterations),
        swarm_size: a.swarm_size.unwrap_or(loaded.swarm.swarm_size),
        fitness_points: a.fitness_points.or(loaded.swarm.fitness_points),
        ..loaded.swarm.clone()
    };
    let result = optimize(scn, &cfg)?;
    write(cli, "optimize_result.txt", &result.to_text())?;
    write(cli, "optimize_trace.csv", &result.trace_csv())?;
    write(cli, "ris_config.txt", &result.best_config.to_text())?;

    let synth = Synthesizer::new(scn)?;
    let reference = report(cli, "reference", &synth.sweep(None)?, &budget, &a.power)?;
    let optimized = report(cli, "optimized", &synth.sweep(Some(&result.best_config))?, &budget, &a.power)?;
    let c = result.best_params.rx_coord;
    let mut out = budget_text(&budget);
    let _ = writeln!(
        out,
        "best_r_m = {:.4} best_theta_deg = {:.4} best_phi_deg = {:.4} flip = {}",
        c.r,
        c.theta.to_degrees(),
        c.phi.to_degrees(),
        result.best_params.flip
    );
    let _ = writeln!(out, "evaluations = {}", result.evaluations);
    out += &summary_line(&reference);
    out += &summary_line(&optimized);
    let _ = writeln!(
        out,
        "gain_improvement_db = {:.4}",
        10.0 * (optimized.band_gain / reference.band_gain).log10()
    );
    let _ = writeln!(
        out,
        "effective_rank_change = {:.4}",
        optimized.mean_effective_rank - reference.mean_effective_rank
    );
    write(cli, "optimize_summary.txt", &out)?;
    Ok(out)
}

fn metrics(cli: &Cli, a: &MetricsArgs) -> Result<String> {
    let loaded = load(cli)?;
    let budget = link_budget(&a.power, &loaded)?;
    let mut out = budget_text(&budget);
    match &a.sweep {
        Some(path) => {
            let sweep = io::read_sweep(path)?;
            let r = MetricsReport::compute(
                "measured",
                &sweep,
                budget.tx_power_dbm,
                budget.noise_power_w,
                budget.bandwidth_hz,
                &a.power.curve_dbm,
            )?;
            write(cli, "metrics.txt", &(out.clone() + &r.to_text()))?;
            write(cli, "gain.csv", &r.gain_csv())?;
            write(cli, "capacity.csv", &r.capacity_csv())?;
            out += &summary_line(&r);
        }
        None => write(cli, "metrics.txt", &out)?,
    }
    Ok(out)
}

fn ingest(cli: &Cli, a: &IngestArgs) -> Result<String> {
    let sweep = io::ingest_sweep(&a.raw, a.reference.as_deref())?;
    let dest = cli.out_dir.join(&a.output);
    io::export_sweep(&sweep, &dest)?;
    let (nr, nt) = sweep.dims().unwrap_or((0, 0));
    Ok(format!(
        "frequencies = {}\nrx = {nr}\ntx = {nt}\ndeembedded = {}\noutput = {}\n",
        sweep.len(),
        a.reference.is_some(),
        a.output
    ))
}
