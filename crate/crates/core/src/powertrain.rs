//! Battery and motor/propeller models fitted from tabulated test data.
//!
//! Battery capacity is modelled as a straight line over pack mass. Motor
//! current and propulsion efficiency are least-squares polynomials over
//! per-rotor thrust, valid only inside the thrust range they were fitted on.

use std::io::Read;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PowertrainError {
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("all sample masses are identical, slope is undetermined")]
    SingularMasses,
    #[error("polynomial degree {0} is outside 1..=3")]
    DegreeOutOfRange(usize),
    #[error("rank-deficient fit: {distinct} distinct thrust values for degree {degree}")]
    RankDeficient { distinct: usize, degree: usize },
    #[error("thrust {thrust} N is outside the tabulated range [{min}, {max}] N")]
    OutOfRange { thrust: f64, min: f64, max: f64 },
    #[error("non-finite sample value")]
    NonFinite,
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("no candidate powertrains supplied")]
    NoCandidates,
    #[error("table error: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, PowertrainError>;

/// Least-squares line through (mass kg, capacity Wh) samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

pub fn fit_linear(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(PowertrainError::InsufficientPoints {
            needed: 2,
            got: points.len(),
        });
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(PowertrainError::NonFinite);
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 || points.iter().all(|p| p.0 == points[0].0) {
        return Err(PowertrainError::SingularMasses);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    Ok(LinearFit {
        slope,
        intercept,
        residual_rms: (sse / n).sqrt(),
    })
}

/// Pack capacity as a linear function of pack mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryModel {
    /// Wh per kg (slope of the capacity line).
    pub energy_density: f64,
    /// Wh at zero mass.
    #[serde(default)]
    pub intercept: f64,
    /// Pack voltage, V.
    pub nominal_voltage: f64,
}

impl BatteryModel {
    pub fn new(energy_density: f64, intercept: f64, nominal_voltage: f64) -> Result<Self> {
        let model = Self {
            energy_density,
            intercept,
            nominal_voltage,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_fit(fit: &LinearFit, nominal_voltage: f64) -> Result<Self> {
        Self::new(fit.slope, fit.intercept, nominal_voltage)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.energy_density > 0.0 && self.energy_density.is_finite()) {
            return Err(PowertrainError::Invalid(
                "battery energy density must be positive".into(),
            ));
        }
        if !self.intercept.is_finite() {
            return Err(PowertrainError::NonFinite);
        }
        if !(self.nominal_voltage > 0.0 && self.nominal_voltage.is_finite()) {
            return Err(PowertrainError::Invalid(
                "battery voltage must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Capacity in Wh for a pack of `mass` kg, floored at zero.
    pub fn capacity(&self, mass: f64) -> f64 {
        (self.energy_density * mass + self.intercept).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// Motor current, A.
    Current,
    /// Propulsion efficiency, g/W.
    Efficiency,
}

/// Polynomial in per-rotor thrust (N), coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThrustCurve {
    pub kind: CurveKind,
    pub coefficients: Vec<f64>,
    pub valid_range: (f64, f64),
    pub residual_rms: f64,
    /// Whether the curve is non-decreasing over `valid_range`.
    pub monotone: bool,
}

impl ThrustCurve {
    pub fn new(kind: CurveKind, coefficients: Vec<f64>, valid_range: (f64, f64)) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(PowertrainError::Invalid(
                "curve needs finite coefficients".into(),
            ));
        }
        let (lo, hi) = valid_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(PowertrainError::Invalid(format!(
                "invalid thrust range [{lo}, {hi}]"
            )));
        }
        let monotone = is_non_decreasing(&coefficients, valid_range);
        Ok(Self {
            kind,
            coefficients,
            valid_range,
            residual_rms: 0.0,
            monotone,
        })
    }

    pub fn max_thrust(&self) -> f64 {
        self.valid_range.1
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Evaluates the curve. Thrust outside `valid_range` is rejected rather
    /// than extrapolated.
    pub fn eval(&self, thrust: f64) -> Result<f64> {
        let (min, max) = self.valid_range;
        if !(thrust >= min && thrust <= max) {
            return Err(PowertrainError::OutOfRange { thrust, min, max });
        }
        Ok(horner(&self.coefficients, thrust))
    }

    pub fn derivative_at(&self, thrust: f64) -> f64 {
        horner(&derivative(&self.coefficients), thrust)
    }
}

pub fn eval_curve(curve: &ThrustCurve, thrust: f64) -> Result<f64> {
    curve.eval(thrust)
}

fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn derivative(coefficients: &[f64]) -> Vec<f64> {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect()
}

// The derivative of a degree <= 3 polynomial is at most quadratic, so its
// minimum over the range sits at an endpoint or at the parabola's vertex.
fn is_non_decreasing(coefficients: &[f64], (lo, hi): (f64, f64)) -> bool {
    let d = derivative(coefficients);
    if d.is_empty() {
        return true;
    }
    let scale = d.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
    let tol = -1e-12 * scale * (1.0 + hi.abs()).powi(d.len() as i32);
    let mut probes = vec![lo, hi];
    if d.len() == 3 && d[2] != 0.0 {
        let vertex = -d[1] / (2.0 * d[2]);
        if vertex > lo && vertex < hi {
            probes.push(vertex);
        }
    } else if d.len() > 3 {
        // Higher degrees are not produced by `fit_poly`; fall back to sampling.
        probes.extend((1..256).map(|i| lo + (hi - lo) * i as f64 / 256.0));
    }
    probes.into_iter().all(|x| horner(&d, x) >= tol)
}

/// Least-squares polynomial of `degree` (1..=3) over (thrust N, y) samples.
pub fn fit_poly(points: &[(f64, f64)], degree: usize, kind: CurveKind) -> Result<ThrustCurve> {
    if !(1..=3).contains(&degree) {
        return Err(PowertrainError::DegreeOutOfRange(degree));
    }
    if points.len() < degree + 1 {
        return Err(PowertrainError::InsufficientPoints {
            needed: degree + 1,
            got: points.len(),
        });
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(PowertrainError::NonFinite);
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < degree + 1 {
        return Err(PowertrainError::RankDeficient {
            distinct: xs.len(),
            degree,
        });
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);

    // Solve in x/scale to keep the Vandermonde columns comparable in size.
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let n = points.len();
    let a = DMatrix::from_fn(n, degree + 1, |r, c| (points[r].0 / scale).powi(c as i32));
    let b = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let svd = a.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    if svd.rank(max_sv * 1e-12) < degree + 1 {
        return Err(PowertrainError::RankDeficient {
            distinct: xs.len(),
            degree,
        });
    }
    let scaled = svd
        .solve(&b, max_sv * 1e-12)
        .map_err(|e| PowertrainError::Invalid(e.to_string()))?;
    let coefficients: Vec<f64> = scaled
        .iter()
        .enumerate()
        .map(|(i, c)| c / scale.powi(i as i32))
        .collect();

    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - horner(&coefficients, p.0)).powi(2))
        .sum();
    let mut curve = ThrustCurve::new(kind, coefficients, (lo, hi))?;
    curve.residual_rms = (sse / n as f64).sqrt();
    Ok(curve)
}

/// One motor + propeller + ESC combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTrainModel {
    pub motor_name: String,
    /// rpm/V
    pub kv: f64,
    pub current_curve: ThrustCurve,
    pub efficiency_curve: ThrustCurve,
    /// inch
    pub propeller_diameter: f64,
}

impl PowerTrainModel {
    pub fn new(
        motor_name: impl Into<String>,
        kv: f64,
        current_curve: ThrustCurve,
        efficiency_curve: ThrustCurve,
        propeller_diameter: f64,
    ) -> Result<Self> {
        let model = Self {
            motor_name: motor_name.into(),
            kv,
            current_curve,
            efficiency_curve,
            propeller_diameter,
        };
        model.validate()?;
        Ok(model)
    }

    /// Fits both curves from a thrust table.
    pub fn from_table(
        motor_name: impl Into<String>,
        kv: f64,
        propeller_diameter: f64,
        table: &[ThrustSample],
        current_degree: usize,
        efficiency_degree: usize,
    ) -> Result<Self> {
        let current: Vec<_> = table.iter().map(|s| (s.thrust_n, s.current_a)).collect();
        let efficiency: Vec<_> = table
            .iter()
            .map(|s| (s.thrust_n, s.efficiency_g_per_w))
            .collect();
        Self::new(
            motor_name,
            kv,
            fit_poly(&current, current_degree, CurveKind::Current)?,
            fit_poly(&efficiency, efficiency_degree, CurveKind::Efficiency)?,
            propeller_diameter,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kv > 0.0 && self.kv.is_finite()) {
            return Err(PowertrainError::Invalid("kv must be positive".into()));
        }
        if self.current_curve.kind != CurveKind::Current
            || self.efficiency_curve.kind != CurveKind::Efficiency
        {
            return Err(PowertrainError::Invalid("curve kinds are swapped".into()));
        }
        if self.current_curve.valid_range != self.efficiency_curve.valid_range {
            return Err(PowertrainError::Invalid(
                "current and efficiency curves must share a thrust range".into(),
            ));
        }
        Ok(())
    }

    pub fn max_thrust(&self) -> f64 {
        self.current_curve.max_thrust()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedPowertrain {
    /// Position in the candidate list.
    pub index: usize,
    pub motor_name: String,
    /// g/W at the required hover thrust.
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    InsufficientThrust {
        max_thrust: f64,
        required: f64,
    },
    HoverOutsideTable {
        hover_thrust: f64,
        min: f64,
        max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedPowertrain {
    pub index: usize,
    pub motor_name: String,
    #[serde(flatten)]
    pub rejection: Rejection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowertrainSelection {
    /// Best efficiency first; ties keep input order.
    pub feasible: Vec<RankedPowertrain>,
    pub infeasible: Vec<RejectedPowertrain>,
}

/// Keeps candidates that can deliver `margin` times the hover thrust and ranks
/// them by propulsion efficiency at hover.
pub fn select_powertrain(
    candidates: &[PowerTrainModel],
    required_hover_thrust: f64,
    margin: f64,
) -> Result<PowertrainSelection> {
    if candidates.is_empty() {
        return Err(PowertrainError::NoCandidates);
    }
    if !(margin >= 1.0 && margin.is_finite()) {
        return Err(PowertrainError::Invalid(format!(
            "thrust margin must be >= 1, got {margin}"
        )));
    }
    if !(required_hover_thrust >= 0.0 && required_hover_thrust.is_finite()) {
        return Err(PowertrainError::Invalid(format!(
            "hover thrust must be non-negative, got {required_hover_thrust}"
        )));
    }
    let required = margin * required_hover_thrust;
    let mut feasible = Vec::new();
    let mut infeasible = Vec::new();
    for (index, candidate) in candidates.iter().enumerate() {
        let motor_name = candidate.motor_name.clone();
        let max_thrust = candidate.max_thrust();
        if max_thrust < required {
            infeasible.push(RejectedPowertrain {
                index,
                motor_name,
                rejection: Rejection::InsufficientThrust {
                    max_thrust,
                    required,
                },
            });
            continue;
        }
        match candidate.efficiency_curve.eval(required_hover_thrust) {
            Ok(efficiency) => feasible.push(RankedPowertrain {
                index,
                motor_name,
                efficiency,
            }),
            Err(_) => {
                let (min, max) = candidate.efficiency_curve.valid_range;
                infeasible.push(RejectedPowertrain {
                    index,
                    motor_name,
                    rejection: Rejection::HoverOutsideTable {
                        hover_thrust: required_hover_thrust,
                        min,
                        max,
                    },
                })
            }
        }
    }
    feasible.sort_by(|a, b| b.efficiency.total_cmp(&a.efficiency));
    Ok(PowertrainSelection {
        feasible,
        infeasible,
    })
}

/// One row of a motor test table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThrustSample {
    pub thrust_n: f64,
    pub current_a: f64,
    pub efficiency_g_per_w: f64,
}

/// One row of a battery table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatterySample {
    pub mass_kg: f64,
    pub capacity_wh: f64,
}

pub const THRUST_TABLE_HEADER: [&str; 3] = ["thrust_n", "current_a", "efficiency_g_per_w"];
pub const BATTERY_TABLE_HEADER: [&str; 2] = ["mass_kg", "capacity_wh"];

fn read_table<T, R>(reader: R, header: &[&str]) -> Result<Vec<T>>
where
    T: for<'de> Deserialize<'de>,
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let found = rdr
        .headers()
        .map_err(|e| PowertrainError::Table(e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(PowertrainError::Table(format!(
            "expected header `{}`, found `{}`",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in rdr.deserialize() {
        let row: T = record.map_err(|e| PowertrainError::Table(e.to_string()))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Reads a `thrust_n,current_a,efficiency_g_per_w` table. Lines starting
/// with `#` are ignored.
pub fn read_thrust_table<R: Read>(reader: R) -> Result<Vec<ThrustSample>> {
    let rows: Vec<ThrustSample> = read_table(reader, &THRUST_TABLE_HEADER)?;
    if rows.iter().any(|r| {
        !(r.thrust_n.is_finite() && r.current_a.is_finite() && r.efficiency_g_per_w.is_finite())
    }) {
        return Err(PowertrainError::NonFinite);
    }
    Ok(rows)
}

/// Reads a `mass_kg,capacity_wh` table.
pub fn read_battery_table<R: Read>(reader: R) -> Result<Vec<BatterySample>> {
    let rows: Vec<BatterySample> = read_table(reader, &BATTERY_TABLE_HEADER)?;
    if rows
        .iter()
        .any(|r| !(r.mass_kg.is_finite() && r.capacity_wh.is_finite()))
    {
        return Err(PowertrainError::NonFinite);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // Normal equations for a 2-parameter line, solved by Cramer's rule.
    fn normal_equation_line(points: &[(f64, f64)]) -> (f64, f64) {
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        let det = n * sxx - sx * sx;
        ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
    }

    #[test]
    fn line_through_origin() {
        let fit = fit_linear(&[(1.0, 200.0), (2.0, 400.0)]).unwrap();
        assert!(close(fit.slope, 200.0, 1e-12));
        assert!(close(fit.intercept, 0.0, 1e-12));
        assert!(close(fit.residual_rms, 0.0, 1e-12));
    }

    #[test]
    fn offset_line_matches_normal_equations() {
        let pts = [(1.0, 210.0), (2.0, 400.0), (3.0, 590.0)];
        let (slope, intercept) = normal_equation_line(&pts);
        assert!(close(slope, 190.0, 1e-9));
        assert!(close(intercept, 20.0, 1e-9));
        let fit = fit_linear(&pts).unwrap();
        assert!(close(fit.slope, slope, 1e-9));
        assert!(close(fit.intercept, intercept, 1e-9));
    }

    #[test]
    fn single_pack_is_rejected() {
        // 48 V x 30 Ah pack from the reference robot
        assert_eq!(
            fit_linear(&[(5.74, 1440.0)]),
            Err(PowertrainError::InsufficientPoints { needed: 2, got: 1 })
        );
        assert_eq!(
            fit_linear(&[(2.0, 1.0), (2.0, 3.0)]),
            Err(PowertrainError::SingularMasses)
        );
    }

    #[test]
    fn battery_capacity_floor() {
        let b = BatteryModel::new(100.0, -50.0, 48.0).unwrap();
        assert_eq!(b.capacity(0.0), 0.0);
        assert_eq!(b.capacity(1.0), 50.0);
        assert!(BatteryModel::new(0.0, 0.0, 48.0).is_err());
    }

    #[test]
    fn exact_line_fit() {
        let c = fit_poly(
            &[(0.0, 0.0), (10.0, 1.0), (20.0, 2.0)],
            1,
            CurveKind::Current,
        )
        .unwrap();
        assert!(close(c.coefficients[0], 0.0, 1e-12));
        assert!(close(c.coefficients[1], 0.1, 1e-12));
        assert!(c.monotone);
        assert_eq!(c.valid_range, (0.0, 20.0));
    }

    #[test]
    fn exact_quadratic_fit() {
        // Vandermonde by hand: c0 = 0, 10 c1 + 100 c2 = 2, 20 c1 + 400 c2 = 8
        // => 200 c2 = 4, c2 = 0.02, c1 = 0
        let c = fit_poly(
            &[(0.0, 0.0), (10.0, 2.0), (20.0, 8.0)],
            2,
            CurveKind::Current,
        )
        .unwrap();
        assert!(close(c.coefficients[0], 0.0, 1e-12));
        assert!(close(c.coefficients[1], 0.0, 1e-12));
        assert!(close(c.coefficients[2], 0.02, 1e-14));
    }

    #[test]
    fn fit_poly_preconditions() {
        assert_eq!(
            fit_poly(&[(0.0, 0.0), (10.0, 1.0)], 2, CurveKind::Current),
            Err(PowertrainError::InsufficientPoints { needed: 3, got: 2 })
        );
        assert_eq!(
            fit_poly(&[(0.0, 0.0), (1.0, 1.0)], 0, CurveKind::Current),
            Err(PowertrainError::DegreeOutOfRange(0))
        );
        assert_eq!(
            fit_poly(&[(0.0, 0.0); 5], 4, CurveKind::Current),
            Err(PowertrainError::DegreeOutOfRange(4))
        );
        assert!(matches!(
            fit_poly(&[(1.0, 0.0), (1.0, 1.0), (2.0, 3.0)], 2, CurveKind::Current),
            Err(PowertrainError::RankDeficient { distinct: 2, .. })
        ));
    }

    #[test]
    fn eval_boundaries() {
        let c = ThrustCurve::new(CurveKind::Current, vec![0.0, 0.1], (0.0, 100.0)).unwrap();
        assert!(close(c.eval(60.4).unwrap(), 6.04, 1e-12));
        assert_eq!(c.eval(0.0).unwrap(), 0.0);
        assert!(c.eval(100.0).unwrap().is_finite());
        assert!(matches!(
            c.eval(100.5),
            Err(PowertrainError::OutOfRange { .. })
        ));
        assert!(c.eval(f64::NAN).is_err());
    }

    #[test]
    fn decreasing_fit_is_flagged_not_rejected() {
        let c = fit_poly(
            &[(0.0, 5.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 5.0)],
            2,
            CurveKind::Current,
        )
        .unwrap();
        assert!(!c.monotone);
    }

    fn candidate(name: &str, max_thrust: f64, efficiency: f64) -> PowerTrainModel {
        PowerTrainModel::new(
            name,
            170.0,
            ThrustCurve::new(CurveKind::Current, vec![0.0, 0.3], (0.0, max_thrust)).unwrap(),
            ThrustCurve::new(CurveKind::Efficiency, vec![efficiency], (0.0, max_thrust)).unwrap(),
            26.0,
        )
        .unwrap()
    }

    #[test]
    fn underpowered_candidate_is_infeasible() {
        let sel = select_powertrain(&[candidate("small", 40.0, 5.0)], 50.0, 1.0).unwrap();
        assert!(sel.feasible.is_empty());
        assert_eq!(sel.infeasible.len(), 1);
        assert!(matches!(
            sel.infeasible[0].rejection,
            Rejection::InsufficientThrust { .. }
        ));
    }

    #[test]
    fn higher_efficiency_ranks_first() {
        let sel = select_powertrain(
            &[candidate("b", 100.0, 2.5), candidate("a", 100.0, 3.0)],
            50.0,
            1.2,
        )
        .unwrap();
        let names: Vec<_> = sel.feasible.iter().map(|r| r.motor_name.as_str()).collect();
        assert_eq!(names, ["a", "b"]);
    }

    #[test]
    fn empty_candidates_error() {
        assert_eq!(
            select_powertrain(&[], 10.0, 1.0),
            Err(PowertrainError::NoCandidates)
        );
        assert!(select_powertrain(&[candidate("a", 1.0, 1.0)], 1.0, 0.5).is_err());
    }

    #[test]
    fn thrust_table_header_enforced() {
        let good = "thrust_n,current_a,efficiency_g_per_w\n# synthetic\n10,1.5,6.8\n20,3.5,5.8\n";
        let rows = read_thrust_table(good.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].current_a, 3.5);
        let bad = "thrust,current_a,efficiency_g_per_w\n10,1.5,6.8\n";
        assert!(matches!(
            read_thrust_table(bad.as_bytes()),
            Err(PowertrainError::Table(_))
        ));
        let short = "thrust_n,current_a,efficiency_g_per_w\n10,1.5\n";
        assert!(read_thrust_table(short.as_bytes()).is_err());
        let battery = "mass_kg,capacity_wh\n1,250\n2,500\n";
        assert_eq!(read_battery_table(battery.as_bytes()).unwrap().len(), 2);
        assert!(read_battery_table("mass_kg,capacity_wh\n1,NaN\n".as_bytes()).is_err());
    }
}
