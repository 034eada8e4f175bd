//! `landair` command-line front end. [`run`] parses arguments, dispatches to
//! the analysis crate and maps failures onto exit codes: 0 success, 1 domain
//! error (no-fly, no path, too few robots), 2 usage or input parse error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
pub mod output;
pub mod overrides;

pub use output::{emit_plot_data, fmt_num};
pub use overrides::Override;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
        }
    }
}

const FILE_FORMATS: &str = "\
FILE FORMATS

Robot spec (JSON, --spec):
  name                  string
  note                  optional string
  weights               {frame, battery, deform_module, avionics, payload}  kg
  fixed_mass            optional kg; defaults to the weight total minus battery
  rotor_count           integer
  nominal_voltage       V
  gravity               m/s^2, default 9.81
  battery               {energy_density Wh/kg, intercept Wh, nominal_voltage V}
  power_budget          {avionics, perception, deform}  W
  powertrain            {motor_name, kv, propeller_diameter inch,
                         table (thrust CSV, relative to the spec file),
                         current_degree, efficiency_degree}
  dimensions            {unfolded: [w, d], folded: [w, d]}  m
  performance           {max_flying_speed, max_driving_speed m/s,
                         drive_power, fly_power W, switch_time s,
                         flight_time min, max_step_height m, max_slope deg}
  arms                  {mass kg, length m, front_tilt_deg, rear_tilt_deg,
                         fold_deg, yaw_deg: [fl, fr, rl, rr]}
  rotor                 {thrust_coefficient N/(rad/s)^2,
                         drag_coefficient N*m/(rad/s)^2, max_rpm}

Thrust table (CSV, one motor+propeller, per rotor; '#' lines are comments):
  thrust_n,current_a,efficiency_g_per_w

Battery table (CSV):
  mass_kg,capacity_wh

Map (text; text after # and blank lines ignored):
  width height resolution_m n_air_layers altitude_1 ... altitude_n
  then `height` rows of `width` 0/1 tokens: ground occupancy (row r is y = r)
  then `height` rows of ground elevation in m
  then, per air layer from the lowest, `height` rows of 0/1 occupancy

States (--start, --goal):
  x,y,ground   x,y,airK (K >= 1)   or   x,y,K

Fleet (JSON array):
  [{name, t_f min, p kg, v_f m/s, m_d km, h_o mm, v_d m/s,
    s_land m^2, s_air m^2, t_s s, g kg}, ...]

Weights (JSON, every field optional, default 1):
  {t_f, p, v_f, m_d, h_o, v_d, s, g}

OUTPUTS
  endurance         CSV battery_mass_kg,duration_min,feasible
  simulate-arm      CSV t_s,arm_id,torque_nmm  (sorted by time, then arm)
  plan              CSV x,y,layer,mode,t_s,e_j  (cumulative time and energy)
  evaluate          CSV name,f_e,g_e,d_e,t_s_norm
  fit, optimize-battery, --report   JSON

OVERRIDES
  --set key=value patches the JSON input before use. Keys are dotted paths
  (weights.battery=6, arms.yaw_deg.0=40); values are JSON, bare words are
  strings. For `evaluate` keys address the weight set, for `plan` the cost
  model (drive_power, fly_power, drive_speed, fly_speed, switch_time,
  switch_power, max_step_height, max_slope, allow_flight).

EXIT CODES
  0 success, 1 domain error (no-fly, no path, fewer than 2 robots),
  2 usage or input parse error
";

#[derive(Debug, Parser)]
#[command(
    name = "landair",
    version,
    about = "Design and planning toolkit for hybrid land-air robots",
    after_long_help = FILE_FORMATS
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit thrust-current / thrust-efficiency curves and a battery capacity line.
    Fit(FitArgs),
    /// Hover duration against battery mass.
    Endurance(EnduranceArgs),
    /// Battery mass giving the longest hover.
    OptimizeBattery(OptimizeArgs),
    /// Servo hinge torque on each folding arm for a motion profile.
    SimulateArm(SimulateArgs),
    /// Energy-optimal drive/fly path on a grid map.
    Plan(PlanArgs),
    /// Flight, ground and duration indexes for a fleet of robots.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Data file; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Thrust table CSV.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Battery table CSV.
    #[arg(long)]
    pub battery: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub current_degree: usize,
    #[arg(long, default_value_t = 2)]
    pub efficiency_degree: usize,
    /// Pack voltage attached to the fitted battery model.
    #[arg(long, default_value_t = 48.0)]
    pub voltage: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Robot spec JSON.
    #[arg(long)]
    pub spec: PathBuf,
    /// Override a spec field, e.g. `--set fixed_mass=18`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<Override>,
}

#[derive(Debug, Args)]
pub struct EnduranceArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Battery mass range `lo,hi` in kg.
    #[arg(long, default_value = "0.5,14", value_parser = parse_range)]
    pub range: (f64, f64),
    /// Sweep step, kg.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Summary JSON (boundary, peak, design point).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value = "0.5,14", value_parser = parse_range)]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 0.1)]
    pub coarse_step: f64,
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// hover, accel_x_15deg, accel_y_15deg, sinusoid or speed_sweep.
    #[arg(long)]
    pub profile: String,
    /// s
    #[arg(long, default_value_t = 12.0)]
    pub duration: f64,
    /// s
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub start: String,
    #[arg(long)]
    pub goal: String,
    /// Take power and speed figures from a robot spec instead of the defaults.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Obstacle inflation radius, m.
    #[arg(long)]
    pub inflate: Option<f64>,
    #[arg(long)]
    pub drive_only: bool,
    /// Keep the raw grid path.
    #[arg(long)]
    pub no_smooth: bool,
    /// Override a cost-model field, e.g. `--set switch_time=8`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<Override>,
    /// Summary JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub fleet: PathBuf,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Add footprint and energy-saving figures for this robot to the report.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Override a weight, e.g. `--set t_f=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<Override>,
    /// Full JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(lo)?, num(hi)?))
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("landair: {e}");
            e.exit_code()
        }
    }
}
