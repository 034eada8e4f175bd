//! Robot specification file: the JSON document that ties a concrete robot's
//! mass breakdown, powertrain table, arm geometry and performance figures to
//! the analysis modules.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    rpm_to_rad_per_s, ArmGeometry, ArmId, ArmSimSpec, DynamicsError, RotorCoefficients,
};
use crate::endurance::{
    EnduranceConfig, EnduranceError, PowerBudget, WeightBreakdown, STANDARD_GRAVITY,
};
use crate::planner::CostModel;
use crate::powertrain::{
    read_thrust_table, BatteryModel, PowerTrainModel, PowertrainError, ThrustSample,
};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("robot spec JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Powertrain(#[from] PowertrainError),
    #[error(transparent)]
    Endurance(#[from] EnduranceError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("invalid robot spec: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SpecError>;

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

fn default_degree() -> usize {
    2
}

/// Where the motor test table lives and how to fit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowertrainSource {
    pub motor_name: String,
    pub kv: f64,
    /// inch
    pub propeller_diameter: f64,
    /// CSV path, relative to the spec file.
    pub table: String,
    #[serde(default = "default_degree")]
    pub current_degree: usize,
    #[serde(default = "default_degree")]
    pub efficiency_degree: usize,
}

/// Width and depth pairs, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensions {
    pub unfolded: (f64, f64),
    pub folded: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Performance {
    /// m/s
    pub max_flying_speed: f64,
    /// m/s
    pub max_driving_speed: f64,
    /// W
    pub drive_power: f64,
    /// W
    pub fly_power: f64,
    /// s
    pub switch_time: f64,
    /// min, as published
    pub flight_time: f64,
    /// m
    #[serde(default = "default_step")]
    pub max_step_height: f64,
    /// degrees
    #[serde(default = "default_slope")]
    pub max_slope: f64,
}

fn default_step() -> f64 {
    0.1
}

fn default_slope() -> f64 {
    30.0
}

/// Arm layout in degrees, converted to radians when building [`ArmSimSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmLayout {
    /// kg per arm
    pub mass: f64,
    /// m
    pub length: f64,
    pub front_tilt_deg: f64,
    pub rear_tilt_deg: f64,
    pub fold_deg: f64,
    /// Deployed azimuths for fl, fr, rl, rr.
    pub yaw_deg: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorSpec {
    /// N/(rad/s)²
    pub thrust_coefficient: f64,
    /// N·m/(rad/s)²
    pub drag_coefficient: f64,
    pub max_rpm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub weights: WeightBreakdown,
    /// Everything except the battery used for endurance sizing, kg. Defaults
    /// to the weight breakdown minus the battery.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_mass: Option<f64>,
    pub rotor_count: u32,
    pub nominal_voltage: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    pub battery: BatteryModel,
    pub power_budget: PowerBudget,
    pub powertrain: PowertrainSource,
    pub dimensions: Dimensions,
    pub performance: Performance,
    pub arms: ArmLayout,
    pub rotor: RotorSpec,
}

impl RobotSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        self.power_budget.validate()?;
        self.battery.validate()?;
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let dims = [
            self.dimensions.unfolded.0,
            self.dimensions.unfolded.1,
            self.dimensions.folded.0,
            self.dimensions.folded.1,
        ];
        if !dims.into_iter().all(positive) {
            return Err(SpecError::Invalid("dimensions must be positive".into()));
        }
        if let Some(m) = self.fixed_mass {
            if !positive(m) {
                return Err(SpecError::Invalid("fixed_mass must be positive".into()));
            }
        }
        if !(positive(self.nominal_voltage) && positive(self.gravity) && self.rotor_count >= 1) {
            return Err(SpecError::Invalid(
                "nominal_voltage, gravity and rotor_count must be positive".into(),
            ));
        }
        if !positive(self.rotor.max_rpm) {
            return Err(SpecError::Invalid("rotor.max_rpm must be positive".into()));
        }
        Ok(())
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.total()
    }

    pub fn fixed_mass(&self) -> f64 {
        self.fixed_mass
            .unwrap_or(self.weights.total() - self.weights.battery)
    }

    pub fn powertrain_model(&self, table: &[ThrustSample]) -> Result<PowerTrainModel> {
        let p = &self.powertrain;
        Ok(PowerTrainModel::from_table(
            p.motor_name.clone(),
            p.kv,
            p.propeller_diameter,
            table,
            p.current_degree,
            p.efficiency_degree,
        )?)
    }

    pub fn endurance_config(&self, table: &[ThrustSample]) -> Result<EnduranceConfig> {
        let config = EnduranceConfig {
            rotor_count: self.rotor_count,
            nominal_voltage: self.nominal_voltage,
            battery_model: self.battery,
            powertrain: self.powertrain_model(table)?,
            fixed_mass: self.fixed_mass(),
            power_budget: self.power_budget,
            gravity: self.gravity,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn arm_sim_spec(&self) -> Result<ArmSimSpec> {
        let a = &self.arms;
        let arms = ArmId::ALL.map(|id| {
            let i = id as usize;
            ArmGeometry {
                arm_id: id,
                mass: a.mass,
                length: a.length,
                tilt: if id.is_front() {
                    a.front_tilt_deg.to_radians()
                } else {
                    a.rear_tilt_deg.to_radians()
                },
                fold_angle: a.fold_deg.to_radians(),
                yaw: a.yaw_deg[i].to_radians(),
            }
        });
        let spec = ArmSimSpec {
            arms,
            rotor: RotorCoefficients {
                thrust_coefficient: self.rotor.thrust_coefficient,
                drag_coefficient: self.rotor.drag_coefficient,
            },
            max_rotor_speed: rpm_to_rad_per_s(self.rotor.max_rpm),
            total_mass: self.weights.total(),
            gravity: self.gravity,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn cost_model(&self) -> CostModel {
        let p = &self.performance;
        CostModel {
            drive_power: p.drive_power,
            fly_power: p.fly_power,
            drive_speed: p.max_driving_speed,
            fly_speed: p.max_flying_speed,
            switch_time: p.switch_time,
            switch_power: p.drive_power,
            max_step_height: p.max_step_height,
            max_slope: p.max_slope,
            allow_flight: true,
        }
    }
}

/// A spec together with the file it came from, so relative table paths
/// resolve against the spec's directory.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub spec: RobotSpec,
    pub path: PathBuf,
}

impl LoadedSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let text = fs::read_to_string(&path).map_err(|source| SpecError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(Self {
            spec: RobotSpec::from_json(&text)?,
            path,
        })
    }

    pub fn table_path(&self) -> PathBuf {
        let table = Path::new(&self.spec.powertrain.table);
        match self.path.parent() {
            Some(dir) if table.is_relative() => dir.join(table),
            _ => table.to_path_buf(),
        }
    }

    pub fn thrust_table(&self) -> Result<Vec<ThrustSample>> {
        let path = self.table_path();
        let file = fs::File::open(&path).map_err(|source| SpecError::Io { path, source })?;
        Ok(read_thrust_table(file)?)
    }

    pub fn endurance_config(&self) -> Result<EnduranceConfig> {
        self.spec.endurance_config(&self.thrust_table()?)
    }
}
