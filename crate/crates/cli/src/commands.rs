use std::fs;
use std::path::Path;

use serde::Serialize;

use landair_core::dynamics::{simulate_profile, DynamicsError, Profile};
use landair_core::endurance::{
    duration_at, duration_curve, no_fly_boundary, optimize_battery_mass, BatteryOptimum,
    EnduranceError,
};
use landair_core::evaluation::{
    energy_saving, evaluate_fleet, footprint_reduction, EvaluationError, FleetRecord, FleetReport,
    WeightSet, REPORTED_FOOTPRINT_REDUCTION_PERCENT,
};
use landair_core::planner::{plan, smooth, CostModel, GridWorld, HybridState, PlannerError};
use landair_core::powertrain::{
    fit_linear, fit_poly, read_battery_table, read_thrust_table, CurveKind, LinearFit,
    PowertrainError, ThrustCurve,
};
use landair_core::spec::{LoadedSpec, SpecError};

use crate::output::{emit_json, emit_plot_data, fmt_num};
use crate::overrides::apply;
use crate::{
    CliError, Command, EnduranceArgs, EvaluateArgs, FitArgs, OptimizeArgs, PlanArgs, SimulateArgs,
    SpecArgs,
};

pub fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Fit(a) => fit(a),
        Command::Endurance(a) => endurance(a),
        Command::OptimizeBattery(a) => optimize(a),
        Command::SimulateArm(a) => simulate(a),
        Command::Plan(a) => plan_cmd(a),
        Command::Evaluate(a) => evaluate(a),
    }
}

impl From<PowertrainError> for CliError {
    fn from(e: PowertrainError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<EnduranceError> for CliError {
    fn from(e: EnduranceError) -> Self {
        match e {
            EnduranceError::NoFly { .. }
            | EnduranceError::FixedMassInfeasible { .. }
            | EnduranceError::InfeasibleRange { .. } => CliError::Domain(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::ArmNotDeployed(_) => CliError::Domain(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<PlannerError> for CliError {
    fn from(e: PlannerError) -> Self {
        match e {
            PlannerError::NoPath { .. }
            | PlannerError::StartBlocked(_)
            | PlannerError::GoalBlocked(_)
            | PlannerError::FlightDisabled(_) => CliError::Domain(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<EvaluationError> for CliError {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::TooFewRecords(_) => CliError::Domain(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Endurance(inner) => inner.into(),
            SpecError::Dynamics(inner) => inner.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<fs::File, CliError> {
    fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_spec(args: &SpecArgs) -> Result<LoadedSpec, CliError> {
    let mut loaded = LoadedSpec::load(&args.spec)?;
    loaded.spec = apply(&loaded.spec, &args.overrides)?;
    loaded.spec.validate()?;
    Ok(loaded)
}

#[derive(Serialize)]
struct FitReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    current_curve: Option<ThrustCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    efficiency_curve: Option<ThrustCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    battery: Option<BatteryFit>,
}

#[derive(Serialize)]
struct BatteryFit {
    fit: LinearFit,
    nominal_voltage: f64,
}

fn fit(a: &FitArgs) -> Result<(), CliError> {
    if a.table.is_none() && a.battery.is_none() {
        return Err(CliError::Usage("fit needs --table and/or --battery".into()));
    }
    let mut report = FitReport {
        current_curve: None,
        efficiency_curve: None,
        battery: None,
    };
    if let Some(path) = &a.table {
        let rows = read_thrust_table(open(path)?)?;
        let current: Vec<_> = rows.iter().map(|r| (r.thrust_n, r.current_a)).collect();
        let eff: Vec<_> = rows
            .iter()
            .map(|r| (r.thrust_n, r.efficiency_g_per_w))
            .collect();
        report.current_curve = Some(fit_poly(&current, a.current_degree, CurveKind::Current)?);
        report.efficiency_curve = Some(fit_poly(&eff, a.efficiency_degree, CurveKind::Efficiency)?);
    }
    if let Some(path) = &a.battery {
        let rows = read_battery_table(open(path)?)?;
        let points: Vec<_> = rows.iter().map(|r| (r.mass_kg, r.capacity_wh)).collect();
        report.battery = Some(BatteryFit {
            fit: fit_linear(&points)?,
            nominal_voltage: a.voltage,
        });
    }
    emit_json(&report, a.output.out.as_deref())
}

#[derive(Serialize)]
struct EnduranceReport {
    robot: String,
    fixed_mass_kg: f64,
    no_fly_boundary_kg: f64,
    peak: Option<BatteryOptimum>,
    design_battery_kg: f64,
    design_duration_min: Option<f64>,
    published_flight_time_min: f64,
}

fn endurance(a: &EnduranceArgs) -> Result<(), CliError> {
    let loaded = load_spec(&a.spec)?;
    let config = loaded.endurance_config()?;
    let curve = duration_curve(&config, a.range, a.step)?;
    let rows: Vec<Vec<String>> = curve
        .iter()
        .map(|p| {
            vec![
                fmt_num(p.battery_mass),
                p.duration_min.map(fmt_num).unwrap_or_default(),
                p.feasible().to_string(),
            ]
        })
        .collect();
    emit_plot_data(
        &["battery_mass_kg", "duration_min", "feasible"],
        &rows,
        a.output.out.as_deref(),
    )?;
    if let Some(path) = &a.report {
        let peak = curve
            .iter()
            .filter_map(|p| p.duration_min.map(|d| (p.battery_mass, d)))
            .fold(None, |best: Option<(f64, f64)>, (m, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((m, d)),
            })
            .map(|(battery_mass, duration_min)| BatteryOptimum {
                battery_mass,
                duration_min,
            });
        let design = loaded.spec.weights.battery;
        let report = EnduranceReport {
            robot: loaded.spec.name.clone(),
            fixed_mass_kg: config.fixed_mass,
            no_fly_boundary_kg: no_fly_boundary(&config)?,
            peak,
            design_battery_kg: design,
            design_duration_min: duration_at(&config, design).ok(),
            published_flight_time_min: loaded.spec.performance.flight_time,
        };
        emit_json(&report, Some(path))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct OptimizeReport {
    battery_mass_kg: f64,
    duration_min: f64,
    no_fly_boundary_kg: f64,
    range_kg: (f64, f64),
    refine_tol_kg: f64,
}

fn optimize(a: &OptimizeArgs) -> Result<(), CliError> {
    let loaded = load_spec(&a.spec)?;
    let config = loaded.endurance_config()?;
    let best = optimize_battery_mass(&config, a.range, a.coarse_step, a.tol)?;
    let report = OptimizeReport {
        battery_mass_kg: best.battery_mass,
        duration_min: best.duration_min,
        no_fly_boundary_kg: no_fly_boundary(&config)?,
        range_kg: a.range,
        refine_tol_kg: a.tol,
    };
    emit_json(&report, a.output.out.as_deref())
}

fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let profile: Profile = a.profile.parse()?;
    let loaded = load_spec(&a.spec)?;
    let sim = loaded.spec.arm_sim_spec()?;
    let samples = simulate_profile(profile, &sim, a.duration, a.dt)?;
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| vec![fmt_num(s.t_s), s.arm_id.to_string(), fmt_num(s.torque_nmm)])
        .collect();
    emit_plot_data(
        &["t_s", "arm_id", "torque_nmm"],
        &rows,
        a.output.out.as_deref(),
    )
}

#[derive(Serialize)]
struct PlanReport {
    start: String,
    goal: String,
    total_energy_j: f64,
    total_time_s: f64,
    switch_count: usize,
    grid_energy_j: f64,
    smoothed: bool,
    waypoints: usize,
    cost_model: CostModel,
}

fn plan_cmd(a: &PlanArgs) -> Result<(), CliError> {
    let mut world = GridWorld::parse(&read_text(&a.map)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.map.display())))?;
    if let Some(r) = a.inflate {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(CliError::Usage(format!("--inflate must be >= 0, got {r}")));
        }
        world = world.inflate(r);
    }
    let start: HybridState = a.start.parse()?;
    let goal: HybridState = a.goal.parse()?;
    let base = match &a.spec {
        Some(path) => LoadedSpec::load(path)?.spec.cost_model(),
        None => CostModel::default(),
    };
    let mut cost: CostModel = apply(&base, &a.overrides)?;
    if a.drive_only {
        cost.allow_flight = false;
    }
    cost.validate()?;

    let raw = plan(&world, start, goal, &cost)?;
    let path = if a.no_smooth {
        raw.clone()
    } else {
        smooth(&raw, &world, &cost)
    };
    let rows: Vec<Vec<String>> = path
        .states
        .iter()
        .zip(path.cumulative())
        .map(|(s, (t, e))| {
            vec![
                s.x.to_string(),
                s.y.to_string(),
                s.layer.to_string(),
                s.mode().as_str().to_owned(),
                fmt_num(t),
                fmt_num(e),
            ]
        })
        .collect();
    emit_plot_data(
        &["x", "y", "layer", "mode", "t_s", "e_j"],
        &rows,
        a.output.out.as_deref(),
    )?;
    if let Some(report_path) = &a.report {
        let report = PlanReport {
            start: start.to_string(),
            goal: goal.to_string(),
            total_energy_j: path.total_energy,
            total_time_s: path.total_time,
            switch_count: path.switch_count,
            grid_energy_j: raw.total_energy,
            smoothed: !a.no_smooth,
            waypoints: path.states.len(),
            cost_model: cost,
        };
        emit_json(&report, Some(report_path))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Footprint {
    unfolded_m: (f64, f64),
    folded_m: (f64, f64),
    reduction_percent: f64,
    reported_percent: f64,
    discrepancy_percent: f64,
    note: &'static str,
}

#[derive(Serialize)]
struct RobotFigures {
    robot: String,
    footprint: Footprint,
    drive_vs_fly_energy_saving_percent: f64,
}

#[derive(Serialize)]
struct EvaluateReport {
    #[serde(flatten)]
    fleet: FleetReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    robot: Option<RobotFigures>,
}

fn evaluate(a: &EvaluateArgs) -> Result<(), CliError> {
    let fleet: Vec<FleetRecord> = serde_json::from_str(&read_text(&a.fleet)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.fleet.display())))?;
    let base: WeightSet = match &a.weights {
        Some(path) => serde_json::from_str(&read_text(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => WeightSet::default(),
    };
    let weights: WeightSet = apply(&base, &a.overrides)?;
    let report = evaluate_fleet(&fleet, &weights)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                fmt_num(r.f_e),
                fmt_num(r.g_e),
                fmt_num(r.d_e),
                fmt_num(r.t_s_norm),
            ]
        })
        .collect();
    emit_plot_data(
        &["name", "f_e", "g_e", "d_e", "t_s_norm"],
        &rows,
        a.output.out.as_deref(),
    )?;

    let robot = match &a.spec {
        Some(path) => {
            let spec = LoadedSpec::load(path)?.spec;
            let d = spec.dimensions;
            let reduction = footprint_reduction(d.unfolded, d.folded)?;
            let saving = energy_saving(spec.performance.drive_power, spec.performance.fly_power)?;
            eprintln!(
                "footprint reduction {reduction:.2}% from bounding rectangles (published figure {REPORTED_FOOTPRINT_REDUCTION_PERCENT}%)"
            );
            Some(RobotFigures {
                robot: spec.name,
                footprint: Footprint {
                    unfolded_m: d.unfolded,
                    folded_m: d.folded,
                    reduction_percent: reduction,
                    reported_percent: REPORTED_FOOTPRINT_REDUCTION_PERCENT,
                    discrepancy_percent: REPORTED_FOOTPRINT_REDUCTION_PERCENT - reduction,
                    note: "rectangular width x depth areas; the published figure uses an unspecified projection",
                },
                drive_vs_fly_energy_saving_percent: saving,
            })
        }
        None => None,
    };
    if let Some(path) = &a.report {
        emit_json(
            &EvaluateReport {
                fleet: report,
                robot,
            },
            Some(path),
        )?;
    }
    Ok(())
}
