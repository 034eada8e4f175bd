//! Min-max normalised capability indexes for comparing land-air robots.

use serde::{Deserialize, Serialize};

/// Published projected-area reduction of the reference robot, percent.
pub const REPORTED_FOOTPRINT_REDUCTION_PERCENT: f64 = 79.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EvaluationError {
    #[error("value {x} is outside [{min}, {max}]")]
    OutOfRange { x: f64, min: f64, max: f64 },
    #[error("need at least 2 robots to normalise, got {0}")]
    TooFewRecords(usize),
    #[error("robot `{name}`: metric {metric} must be finite and >= 0, got {value}")]
    InvalidMetric {
        name: String,
        metric: &'static str,
        value: f64,
    },
    #[error("weight {0} must be finite and >= 0")]
    InvalidWeight(&'static str),
    #[error("flying power must be positive, got {0} W")]
    NonPositivePower(f64),
    #[error("dimensions must be positive")]
    InvalidDimensions,
}

pub type Result<T> = std::result::Result<T, EvaluationError>;

/// One robot's headline figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetRecord {
    pub name: String,
    /// hover duration, min
    pub t_f: f64,
    /// payload, kg
    pub p: f64,
    /// max flying speed, m/s
    pub v_f: f64,
    /// driving mileage, km
    pub m_d: f64,
    /// surmountable obstacle height, mm
    pub h_o: f64,
    /// max driving speed, m/s
    pub v_d: f64,
    /// projected area in flight configuration, m²
    pub s_land: f64,
    /// projected area in driving configuration, m²
    pub s_air: f64,
    /// mode switch time, s
    pub t_s: f64,
    /// weight, kg
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    FlightDuration,
    Payload,
    FlightSpeed,
    DriveMileage,
    ObstacleHeight,
    DriveSpeed,
    LandArea,
    AirArea,
    SwitchTime,
    Weight,
}

impl Metric {
    pub const ALL: [Metric; 10] = [
        Metric::FlightDuration,
        Metric::Payload,
        Metric::FlightSpeed,
        Metric::DriveMileage,
        Metric::ObstacleHeight,
        Metric::DriveSpeed,
        Metric::LandArea,
        Metric::AirArea,
        Metric::SwitchTime,
        Metric::Weight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::FlightDuration => "t_f",
            Metric::Payload => "p",
            Metric::FlightSpeed => "v_f",
            Metric::DriveMileage => "m_d",
            Metric::ObstacleHeight => "h_o",
            Metric::DriveSpeed => "v_d",
            Metric::LandArea => "s_land",
            Metric::AirArea => "s_air",
            Metric::SwitchTime => "t_s",
            Metric::Weight => "g",
        }
    }

    pub fn of(self, r: &FleetRecord) -> f64 {
        match self {
            Metric::FlightDuration => r.t_f,
            Metric::Payload => r.p,
            Metric::FlightSpeed => r.v_f,
            Metric::DriveMileage => r.m_d,
            Metric::ObstacleHeight => r.h_o,
            Metric::DriveSpeed => r.v_d,
            Metric::LandArea => r.s_land,
            Metric::AirArea => r.s_air,
            Metric::SwitchTime => r.t_s,
            Metric::Weight => r.g,
        }
    }
}

/// Per-metric weights plus the area (`s`) and weight (`g`) penalties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeightSet {
    pub t_f: f64,
    pub p: f64,
    pub v_f: f64,
    pub m_d: f64,
    pub h_o: f64,
    pub v_d: f64,
    pub s: f64,
    pub g: f64,
}

impl Default for WeightSet {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl WeightSet {
    pub fn uniform(w: f64) -> Self {
        Self {
            t_f: w,
            p: w,
            v_f: w,
            m_d: w,
            h_o: w,
            v_d: w,
            s: w,
            g: w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("t_f", self.t_f),
            ("p", self.p),
            ("v_f", self.v_f),
            ("m_d", self.m_d),
            ("h_o", self.h_o),
            ("v_d", self.v_d),
            ("s", self.s),
            ("g", self.g),
        ];
        for (name, w) in fields {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(EvaluationError::InvalidWeight(name));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            t_f: self.t_f * k,
            p: self.p * k,
            v_f: self.v_f * k,
            m_d: self.m_d * k,
            h_o: self.h_o * k,
            v_d: self.v_d * k,
            s: self.s * k,
            g: self.g * k,
        }
    }
}

/// `(x - min) / (max - min)`; a constant column maps to 0.5.
pub fn normalize(x: f64, min: f64, max: f64) -> Result<f64> {
    if !(x >= min && x <= max) {
        return Err(EvaluationError::OutOfRange { x, min, max });
    }
    if max == min {
        return Ok(0.5);
    }
    Ok(((x - min) / (max - min)).clamp(0.0, 1.0))
}

fn validate_fleet(fleet: &[FleetRecord]) -> Result<()> {
    if fleet.len() < 2 {
        return Err(EvaluationError::TooFewRecords(fleet.len()));
    }
    for r in fleet {
        for m in Metric::ALL {
            let value = m.of(r);
            if !(value >= 0.0 && value.is_finite()) {
                return Err(EvaluationError::InvalidMetric {
                    name: r.name.clone(),
                    metric: m.name(),
                    value,
                });
            }
        }
    }
    Ok(())
}

/// Normalised column for one metric across the fleet.
pub fn normalized_column(fleet: &[FleetRecord], metric: Metric) -> Result<Vec<f64>> {
    let values: Vec<f64> = fleet.iter().map(|r| metric.of(r)).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.into_iter().map(|x| normalize(x, min, max)).collect()
}

fn composite(
    fleet: &[FleetRecord],
    weights: &WeightSet,
    gains: &[(Metric, f64)],
    penalty: (Metric, f64),
) -> Result<Vec<f64>> {
    validate_fleet(fleet)?;
    weights.validate()?;
    let mut scores = vec![0.0; fleet.len()];
    for &(metric, w) in gains {
        for (s, n) in scores.iter_mut().zip(normalized_column(fleet, metric)?) {
            *s += w * n;
        }
    }
    let (metric, w) = penalty;
    for (s, n) in scores.iter_mut().zip(normalized_column(fleet, metric)?) {
        *s -= w * n;
    }
    Ok(scores)
}

/// Flight capability F_e: duration, payload and speed, less flight-mode area.
pub fn flight_index(fleet: &[FleetRecord], weights: &WeightSet) -> Result<Vec<f64>> {
    composite(
        fleet,
        weights,
        &[
            (Metric::FlightDuration, weights.t_f),
            (Metric::Payload, weights.p),
            (Metric::FlightSpeed, weights.v_f),
        ],
        (Metric::LandArea, weights.s),
    )
}

/// Ground capability G_e: mileage, obstacle height and speed, less
/// drive-mode area.
pub fn ground_index(fleet: &[FleetRecord], weights: &WeightSet) -> Result<Vec<f64>> {
    composite(
        fleet,
        weights,
        &[
            (Metric::DriveMileage, weights.m_d),
            (Metric::ObstacleHeight, weights.h_o),
            (Metric::DriveSpeed, weights.v_d),
        ],
        (Metric::AirArea, weights.s),
    )
}

/// Combined duration D_e: mileage and hover time, less weight.
pub fn duration_index(fleet: &[FleetRecord], weights: &WeightSet) -> Result<Vec<f64>> {
    composite(
        fleet,
        weights,
        &[
            (Metric::DriveMileage, weights.m_d),
            (Metric::FlightDuration, weights.t_f),
        ],
        (Metric::Weight, weights.g),
    )
}

/// Percentage drop in rectangular footprint from `unfolded` to `folded`
/// (width, depth in m).
pub fn footprint_reduction(unfolded: (f64, f64), folded: (f64, f64)) -> Result<f64> {
    let dims = [unfolded.0, unfolded.1, folded.0, folded.1];
    if dims.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(EvaluationError::InvalidDimensions);
    }
    Ok(100.0 * (1.0 - (folded.0 * folded.1) / (unfolded.0 * unfolded.1)))
}

/// Percentage by which driving draws less power than flying.
pub fn energy_saving(drive_power: f64, fly_power: f64) -> Result<f64> {
    if !(fly_power > 0.0 && fly_power.is_finite()) {
        return Err(EvaluationError::NonPositivePower(fly_power));
    }
    Ok(100.0 * (fly_power - drive_power) / fly_power)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FleetRow {
    pub name: String,
    pub f_e: f64,
    pub g_e: f64,
    pub d_e: f64,
    pub t_s: f64,
    pub t_s_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rankings {
    /// Row indices, best first. Ties keep input order.
    pub f_e: Vec<usize>,
    pub g_e: Vec<usize>,
    pub d_e: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FleetReport {
    pub weights: WeightSet,
    /// Same order as the input fleet.
    pub rows: Vec<FleetRow>,
    pub rankings: Rankings,
}

fn rank_desc(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

pub fn evaluate_fleet(fleet: &[FleetRecord], weights: &WeightSet) -> Result<FleetReport> {
    let f = flight_index(fleet, weights)?;
    let g = ground_index(fleet, weights)?;
    let d = duration_index(fleet, weights)?;
    let ts = normalized_column(fleet, Metric::SwitchTime)?;
    let rows = fleet
        .iter()
        .enumerate()
        .map(|(i, r)| FleetRow {
            name: r.name.clone(),
            f_e: f[i],
            g_e: g[i],
            d_e: d[i],
            t_s: r.t_s,
            t_s_norm: ts[i],
        })
        .collect();
    Ok(FleetReport {
        weights: *weights,
        rankings: Rankings {
            f_e: rank_desc(&f),
            g_e: rank_desc(&g),
            d_e: rank_desc(&d),
        },
        rows,
    })
}
