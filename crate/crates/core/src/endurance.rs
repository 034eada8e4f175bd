//! Hover endurance: flight duration from pack energy and hover current,
//! duration-vs-pack-mass sweeps, pack mass optimisation and the no-fly
//! boundary where the rotors can no longer lift the airframe.

use serde::{Deserialize, Serialize};

use crate::powertrain::{BatteryModel, PowerTrainModel, PowertrainError};

pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EnduranceError {
    #[error("total power draw must be positive, got {0} W")]
    NonPositivePower(f64),
    #[error("pack energy must be non-negative, got {0} Wh")]
    NegativeEnergy(f64),
    #[error(
        "no-fly: battery {battery_mass} kg needs {per_rotor_thrust} N per rotor, \
         powertrain tops out at {max_thrust} N (no-fly boundary {boundary} kg)"
    )]
    NoFly {
        battery_mass: f64,
        per_rotor_thrust: f64,
        max_thrust: f64,
        boundary: f64,
    },
    #[error("airframe alone ({fixed_mass} kg) exceeds the rotors' lift capacity")]
    FixedMassInfeasible { fixed_mass: f64 },
    #[error("no feasible battery mass in [{lo}, {hi}] kg (no-fly boundary {boundary} kg)")]
    InfeasibleRange { lo: f64, hi: f64, boundary: f64 },
    #[error("invalid mass range: {0}")]
    InvalidRange(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Powertrain(#[from] PowertrainError),
}

pub type Result<T> = std::result::Result<T, EnduranceError>;

/// Mass breakdown in kg. Sums to the hover thrust requirement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightBreakdown {
    pub frame: f64,
    pub battery: f64,
    pub deform_module: f64,
    pub avionics: f64,
    pub payload: f64,
}

impl WeightBreakdown {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.frame,
            self.battery,
            self.deform_module,
            self.avionics,
            self.payload,
        ];
        if fields.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(EnduranceError::Invalid(
                "weight components must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        total_weight(self)
    }
}

pub fn total_weight(w: &WeightBreakdown) -> f64 {
    w.frame + w.battery + w.deform_module + w.avionics + w.payload
}

/// Non-propulsive electrical load in W.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    pub avionics: f64,
    pub perception: f64,
    pub deform: f64,
}

impl PowerBudget {
    pub fn total(&self) -> f64 {
        self.avionics + self.perception + self.deform
    }

    pub fn validate(&self) -> Result<()> {
        if [self.avionics, self.perception, self.deform]
            .iter()
            .any(|v| !(*v >= 0.0 && v.is_finite()))
        {
            return Err(EnduranceError::Invalid(
                "power budget entries must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnduranceConfig {
    pub rotor_count: u32,
    /// Motor supply voltage, V.
    pub nominal_voltage: f64,
    pub battery_model: BatteryModel,
    pub powertrain: PowerTrainModel,
    /// Everything except the battery, kg.
    pub fixed_mass: f64,
    pub power_budget: PowerBudget,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

impl EnduranceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rotor_count < 1 {
            return Err(EnduranceError::Invalid("rotor_count must be >= 1".into()));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.nominal_voltage) {
            return Err(EnduranceError::Invalid(
                "nominal_voltage must be > 0".into(),
            ));
        }
        if !positive(self.fixed_mass) {
            return Err(EnduranceError::Invalid("fixed_mass must be > 0".into()));
        }
        if !positive(self.gravity) {
            return Err(EnduranceError::Invalid("gravity must be > 0".into()));
        }
        self.power_budget.validate()?;
        self.battery_model.validate()?;
        self.powertrain.validate()?;
        Ok(())
    }

    /// Thrust each rotor must produce to hover with `battery_mass` on board.
    pub fn per_rotor_thrust(&self, battery_mass: f64) -> f64 {
        (self.fixed_mass + battery_mass) * self.gravity / self.rotor_count as f64
    }
}

/// Hover time in minutes for `energy` Wh drawn by `rotors` motors at
/// `voltage` V and `current` A each, plus `aux_power` W of other loads.
pub fn flight_duration(
    energy: f64,
    rotors: u32,
    voltage: f64,
    current: f64,
    aux_power: f64,
) -> Result<f64> {
    if !(energy >= 0.0) {
        return Err(EnduranceError::NegativeEnergy(energy));
    }
    let draw = rotors as f64 * voltage * current + aux_power;
    if !(draw > 0.0 && draw.is_finite()) {
        return Err(EnduranceError::NonPositivePower(draw));
    }
    Ok(energy / draw * 60.0)
}

/// Per-motor current needed to hover with `battery_mass` kg of battery.
pub fn hover_current(config: &EnduranceConfig, battery_mass: f64) -> Result<f64> {
    if !(battery_mass >= 0.0 && battery_mass.is_finite()) {
        return Err(EnduranceError::Invalid(format!(
            "battery mass must be >= 0, got {battery_mass}"
        )));
    }
    let thrust = config.per_rotor_thrust(battery_mass);
    let max_thrust = config.powertrain.max_thrust();
    if thrust > max_thrust {
        return Err(EnduranceError::NoFly {
            battery_mass,
            per_rotor_thrust: thrust,
            max_thrust,
            boundary: no_fly_boundary(config).unwrap_or(f64::NAN),
        });
    }
    Ok(config.powertrain.current_curve.eval(thrust)?)
}

/// Hover duration in minutes with a `battery_mass` kg pack.
pub fn duration_at(config: &EnduranceConfig, battery_mass: f64) -> Result<f64> {
    let current = hover_current(config, battery_mass)?;
    flight_duration(
        config.battery_model.capacity(battery_mass),
        config.rotor_count,
        config.nominal_voltage,
        current,
        config.power_budget.total(),
    )
}

/// Largest battery mass the rotors can still lift.
pub fn no_fly_boundary(config: &EnduranceConfig) -> Result<f64> {
    let max_thrust = config.powertrain.max_thrust();
    if config.per_rotor_thrust(0.0) > max_thrust {
        return Err(EnduranceError::FixedMassInfeasible {
            fixed_mass: config.fixed_mass,
        });
    }
    let lift = config.rotor_count as f64 * max_thrust / config.gravity;
    let mut mass = (lift - config.fixed_mass).max(0.0);
    // Rounding in the closed form can land a hair past the limit.
    while mass > 0.0 && config.per_rotor_thrust(mass) > max_thrust {
        mass = mass.next_down();
    }
    Ok(mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DurationPoint {
    pub battery_mass: f64,
    /// `None` inside the no-fly zone.
    pub duration_min: Option<f64>,
}

impl DurationPoint {
    pub fn feasible(&self) -> bool {
        self.duration_min.is_some()
    }
}

const MAX_SWEEP_POINTS: usize = 10_000_000;

fn sweep_masses(range: (f64, f64), step: f64) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
        return Err(EnduranceError::InvalidRange(format!(
            "need 0 <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(EnduranceError::InvalidRange(format!(
            "step must be > 0, got {step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor();
    if count >= MAX_SWEEP_POINTS as f64 {
        return Err(EnduranceError::InvalidRange(format!(
            "{count} sweep points exceeds the limit of {MAX_SWEEP_POINTS}"
        )));
    }
    Ok((0..=count as usize).map(|i| lo + i as f64 * step).collect())
}

/// Duration over a grid of battery masses. Points past the no-fly boundary
/// are kept and flagged.
pub fn duration_curve(
    config: &EnduranceConfig,
    mass_range: (f64, f64),
    step: f64,
) -> Result<Vec<DurationPoint>> {
    sweep_masses(mass_range, step)?
        .into_iter()
        .map(|battery_mass| match duration_at(config, battery_mass) {
            Ok(d) => Ok(DurationPoint {
                battery_mass,
                duration_min: Some(d),
            }),
            Err(EnduranceError::NoFly { .. }) => Ok(DurationPoint {
                battery_mass,
                duration_min: None,
            }),
            Err(e) => Err(e),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryOptimum {
    pub battery_mass: f64,
    pub duration_min: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Coarse grid scan over the feasible part of `mass_range`, then a golden
/// section search inside the bracket around the best grid point until the
/// bracket is narrower than `refine_tol`.
pub fn optimize_battery_mass(
    config: &EnduranceConfig,
    mass_range: (f64, f64),
    coarse_step: f64,
    refine_tol: f64,
) -> Result<BatteryOptimum> {
    let (lo, hi) = mass_range;
    sweep_masses(mass_range, coarse_step)?;
    if !(refine_tol > 0.0 && refine_tol.is_finite()) {
        return Err(EnduranceError::InvalidRange(format!(
            "refine_tol must be > 0, got {refine_tol}"
        )));
    }
    let boundary = match no_fly_boundary(config) {
        Ok(b) => b,
        Err(EnduranceError::FixedMassInfeasible { .. }) => {
            return Err(EnduranceError::InfeasibleRange {
                lo,
                hi,
                boundary: f64::NAN,
            })
        }
        Err(e) => return Err(e),
    };
    let infeasible = EnduranceError::InfeasibleRange { lo, hi, boundary };
    if lo > boundary {
        return Err(infeasible);
    }
    let upper = hi.min(boundary);

    let score = |m: f64| duration_at(config, m).unwrap_or(f64::NEG_INFINITY);

    let mut grid = sweep_masses((lo, upper), coarse_step)?;
    if grid.last().is_some_and(|&last| last < upper) {
        grid.push(upper);
    }
    let scores: Vec<f64> = grid.iter().map(|&m| score(m)).collect();
    let (best, best_score) =
        scores
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &s)| {
                    if s > acc.1 {
                        (i, s)
                    } else {
                        acc
                    }
                },
            );
    if best_score == f64::NEG_INFINITY {
        return Err(infeasible);
    }

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];
    let mut candidates = vec![(grid[best], best_score), (a, score(a)), (b, score(b))];
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (score(x1), score(x2));
    while b - a >= refine_tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = score(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = score(x1);
        }
    }
    let mid = 0.5 * (a + b);
    candidates.push((mid, score(mid)));

    let (battery_mass, duration_min) =
        candidates
            .into_iter()
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, c| {
                if c.1 > acc.1 {
                    c
                } else {
                    acc
                }
            });
    Ok(BatteryOptimum {
        battery_mass,
        duration_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powertrain::{CurveKind, ThrustCurve};

    fn config_with_current(coefficients: Vec<f64>, range: (f64, f64)) -> EnduranceConfig {
        let current = ThrustCurve::new(CurveKind::Current, coefficients, range).unwrap();
        let efficiency = ThrustCurve::new(CurveKind::Efficiency, vec![5.0], range).unwrap();
        EnduranceConfig {
            rotor_count: 4,
            nominal_voltage: 48.0,
            battery_model: BatteryModel::new(250.0, 0.0, 48.0).unwrap(),
            powertrain: PowerTrainModel::new("test", 170.0, current, efficiency, 26.0).unwrap(),
            fixed_mass: 17.0,
            power_budget: PowerBudget {
                avionics: 100.0,
                perception: 50.0,
                deform: 0.0,
            },
            gravity: 9.81,
        }
    }

    #[test]
    fn weight_sums() {
        let w = WeightBreakdown {
            frame: 7.07,
            battery: 5.74,
            deform_module: 7.61,
            avionics: 0.0,
            payload: 4.20,
        };
        assert!((total_weight(&w) - 24.62).abs() < 1e-12);
        assert_eq!(total_weight(&WeightBreakdown::default()), 0.0);
        let ones = WeightBreakdown {
            frame: 1.0,
            battery: 1.0,
            deform_module: 1.0,
            avionics: 1.0,
            payload: 1.0,
        };
        assert_eq!(ones.total(), 5.0);
        assert!(WeightBreakdown {
            frame: -1.0,
            ..ones
        }
        .validate()
        .is_err());
    }

    #[test]
    fn duration_arithmetic() {
        assert!((flight_duration(400.0, 4, 48.0, 0.0, 400.0).unwrap() - 60.0).abs() < 1e-12);
        let t = flight_duration(1440.0, 4, 48.0, 18.0, 543.0).unwrap();
        assert!((t - 1440.0 / 3999.0 * 60.0).abs() < 1e-12);
        assert!((t - 21.61).abs() < 0.005);
        assert!(matches!(
            flight_duration(100.0, 4, 48.0, 0.0, 0.0),
            Err(EnduranceError::NonPositivePower(_))
        ));
        assert!(matches!(
            flight_duration(-1.0, 4, 48.0, 1.0, 0.0),
            Err(EnduranceError::NegativeEnergy(_))
        ));
    }

    #[test]
    fn hover_thrust_for_reference_robot() {
        let cfg = config_with_current(vec![0.0, 0.3], (0.0, 100.0));
        assert!((cfg.per_rotor_thrust(5.74) - 55.76985).abs() < 1e-9);
        let i = hover_current(&cfg, 5.74).unwrap();
        assert!((i - 0.3 * 55.76985).abs() < 1e-9);
    }

    #[test]
    fn zero_mass_hits_curve_origin() {
        let mut cfg = config_with_current(vec![1.25, 0.3], (0.0, 100.0));
        cfg.fixed_mass = 0.0;
        assert_eq!(hover_current(&cfg, 0.0).unwrap(), 1.25);
    }

    #[test]
    fn boundary_closed_form() {
        let cfg = config_with_current(vec![0.0, 0.3], (0.0, 100.0));
        let m = no_fly_boundary(&cfg).unwrap();
        assert!((m - (400.0 / 9.81 - 17.0)).abs() < 1e-9);
        assert!((m - 23.775).abs() < 1e-3);
        assert!(hover_current(&cfg, m).is_ok());
        assert!(matches!(
            hover_current(&cfg, m + 1e-6),
            Err(EnduranceError::NoFly { .. })
        ));
    }

    #[test]
    fn boundary_zero_when_exactly_loaded() {
        let mut cfg = config_with_current(vec![0.0, 0.3], (0.0, 25.0));
        cfg.fixed_mass = 10.0;
        cfg.gravity = 10.0;
        assert_eq!(no_fly_boundary(&cfg).unwrap(), 0.0);
        cfg.fixed_mass = 10.5;
        assert!(matches!(
            no_fly_boundary(&cfg),
            Err(EnduranceError::FixedMassInfeasible { .. })
        ));
    }

    #[test]
    fn curve_flags_no_fly_tail() {
        let cfg = config_with_current(vec![0.0, 0.3], (0.0, 100.0));
        let boundary = no_fly_boundary(&cfg).unwrap();
        let pts = duration_curve(&cfg, (20.0, 30.0), 0.5).unwrap();
        assert_eq!(pts.len(), 21);
        for p in &pts {
            assert_eq!(p.feasible(), p.battery_mass <= boundary, "{p:?}");
        }
        assert_eq!(duration_curve(&cfg, (1.0, 1.0), 0.3).unwrap().len(), 1);
        assert!(duration_curve(&cfg, (2.0, 1.0), 0.3).is_err());
        assert!(duration_curve(&cfg, (1.0, 2.0), 0.0).is_err());
    }

    #[test]
    fn linear_current_optimum_is_boundary() {
        let cfg = config_with_current(vec![0.5, 0.3], (0.0, 100.0));
        let boundary = no_fly_boundary(&cfg).unwrap();
        let opt = optimize_battery_mass(&cfg, (0.5, 40.0), 0.25, 0.01).unwrap();
        assert_eq!(opt.battery_mass, boundary);
    }

    #[test]
    fn fully_infeasible_range() {
        let cfg = config_with_current(vec![0.5, 0.3], (0.0, 100.0));
        let err = optimize_battery_mass(&cfg, (30.0, 40.0), 0.25, 0.01).unwrap_err();
        assert!(matches!(err, EnduranceError::InfeasibleRange { .. }));
        assert!(err.to_string().contains("no-fly boundary"));
    }
}
