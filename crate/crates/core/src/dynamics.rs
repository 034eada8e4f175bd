//! Rigid-body torque stack for the quad-rotor body and the folding arms,
//! plus open-loop kinematic scenarios that produce servo torque traces.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

pub const FRONT_ARM_TILT_DEG: f64 = 20.0;
pub const DEPLOYED_FOLD_DEG: f64 = 135.0;
/// Servo design limit, N·mm.
pub const SERVO_TORQUE_LIMIT_NMM: f64 = 7800.0;

const FOLD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DynamicsError {
    #[error(
        "arm {0} is not deployed; the hinge torque model only covers the flight configuration"
    )]
    ArmNotDeployed(ArmId),
    #[error("unknown profile `{0}` (expected hover, accel_x_15deg, accel_y_15deg, sinusoid, speed_sweep)")]
    UnknownProfile(String),
    #[error("invalid time grid: dt {dt} s, duration {duration} s")]
    InvalidTimeGrid { dt: f64, duration: f64 },
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyState {
    /// rad/s, body frame
    pub angular_velocity: Vector3<f64>,
    /// rad/s²
    pub angular_acceleration: Vector3<f64>,
    /// roll, pitch, yaw rates, rad/s
    pub attitude_rates: Vector3<f64>,
}

/// Diagonal inertias (kg·m²) and aerodynamic damping (N·m·s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertiaSet {
    pub body: Vector3<f64>,
    pub rotor: Vector3<f64>,
    pub damping: Vector3<f64>,
}

impl InertiaSet {
    pub fn validate(&self) -> Result<()> {
        if self
            .body
            .iter()
            .chain(self.rotor.iter())
            .any(|v| !(*v > 0.0))
        {
            return Err(DynamicsError::Invalid(
                "inertia diagonals must be > 0".into(),
            ));
        }
        if self.damping.iter().any(|v| !(*v >= 0.0)) {
            return Err(DynamicsError::Invalid("damping must be >= 0".into()));
        }
        Ok(())
    }

    pub fn body_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&self.body)
    }

    pub fn rotor_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&self.rotor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmId {
    Fl,
    Fr,
    Rl,
    Rr,
}

impl ArmId {
    pub const ALL: [ArmId; 4] = [ArmId::Fl, ArmId::Fr, ArmId::Rl, ArmId::Rr];

    pub fn is_front(self) -> bool {
        matches!(self, ArmId::Fl | ArmId::Fr)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ArmId::Fl => "fl",
            ArmId::Fr => "fr",
            ArmId::Rl => "rl",
            ArmId::Rr => "rr",
        }
    }
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmGeometry {
    pub arm_id: ArmId,
    /// kg
    pub mass: f64,
    /// hinge to rotor axis, m
    pub length: f64,
    /// downward tilt, rad
    pub tilt: f64,
    /// 0 folded, 3π/4 deployed
    pub fold_angle: f64,
    /// deployed azimuth about body z, rad
    pub yaw: f64,
}

impl ArmGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.length > 0.0) {
            return Err(DynamicsError::Invalid(format!(
                "arm {} needs positive mass and length",
                self.arm_id
            )));
        }
        if !(self.tilt >= 0.0 && self.tilt < PI / 2.0) {
            return Err(DynamicsError::Invalid(format!(
                "arm {} tilt must be in [0, π/2)",
                self.arm_id
            )));
        }
        if !(self.fold_angle >= 0.0 && self.fold_angle <= 0.75 * PI + FOLD_TOLERANCE) {
            return Err(DynamicsError::Invalid(format!(
                "arm {} fold angle must be in [0, 3π/4]",
                self.arm_id
            )));
        }
        Ok(())
    }

    pub fn is_deployed(&self) -> bool {
        (self.fold_angle - DEPLOYED_FOLD_DEG.to_radians()).abs() <= FOLD_TOLERANCE
    }

    pub fn inertia(&self) -> f64 {
        arm_inertia(self.mass, self.length, self.tilt, self.arm_id.is_front())
    }
}

/// Rotor thrust and drag-torque coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorCoefficients {
    /// N/(rad/s)²
    pub thrust_coefficient: f64,
    /// N·m/(rad/s)²
    pub drag_coefficient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorCommand {
    /// rad/s, rotor i spins with sign (−1)^(i+1)
    pub speeds: [f64; 4],
    #[serde(flatten)]
    pub coefficients: RotorCoefficients,
}

fn spin_sign(i: usize) -> f64 {
    // rotors are numbered from 1: +, −, +, −
    if i.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sum over rotors of ω_b × (J_r · [0, 0, ±Ω_i]).
pub fn gyroscopic_torque(
    angular_velocity: &Vector3<f64>,
    rotor_inertia: &Matrix3<f64>,
    speeds: &[f64; 4],
) -> Vector3<f64> {
    speeds
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            angular_velocity.cross(&(rotor_inertia * Vector3::new(0.0, 0.0, spin_sign(i) * w)))
        })
        .sum()
}

pub fn friction_torque(damping: &Vector3<f64>, attitude_rates: &Vector3<f64>) -> Vector3<f64> {
    damping.component_mul(attitude_rates)
}

/// Newton-Euler rotational balance: J ω̇ + ω × J ω + M_g + M_d.
pub fn body_torque(
    body_inertia: &Matrix3<f64>,
    angular_acceleration: &Vector3<f64>,
    angular_velocity: &Vector3<f64>,
    gyroscopic: &Vector3<f64>,
    friction: &Vector3<f64>,
) -> Vector3<f64> {
    body_inertia * angular_acceleration
        + angular_velocity.cross(&(body_inertia * angular_velocity))
        + gyroscopic
        + friction
}

/// Full torque stack for a body state and rotor speeds.
pub fn body_torque_for_state(
    inertia: &InertiaSet,
    state: &BodyState,
    speeds: &[f64; 4],
) -> Vector3<f64> {
    let m_g = gyroscopic_torque(&state.angular_velocity, &inertia.rotor_matrix(), speeds);
    let m_d = friction_torque(&inertia.damping, &state.attitude_rates);
    body_torque(
        &inertia.body_matrix(),
        &state.angular_acceleration,
        &state.angular_velocity,
        &m_g,
        &m_d,
    )
}

/// Slender-rod inertia about the servo axis; tilted front arms are reduced
/// by cos γ.
pub fn arm_inertia(mass: f64, length: f64, tilt: f64, is_front: bool) -> f64 {
    let rod = mass / 12.0 * length * length;
    if is_front {
        rod * tilt.cos()
    } else {
        rod
    }
}

pub fn rot_z(theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// R_z(θ) J R_z(θ)ᵀ
pub fn rotate_inertia(inertia: &Matrix3<f64>, theta: f64) -> Matrix3<f64> {
    let r = rot_z(theta);
    r * inertia * r.transpose()
}

/// Per-arm force m_i · a expressed in each arm's frame.
pub fn arm_forces(masses: &[f64; 4], accel: &Vector3<f64>, yaws: &[f64; 4]) -> [Vector3<f64>; 4] {
    std::array::from_fn(|i| rot_z(yaws[i]).transpose() * (masses[i] * accel))
}

/// Load on the arm's fold servo in N·mm for rotor speed `speed` (rad/s) and
/// body acceleration `accel` (m/s², body frame, z up).
///
/// The dual-axis hinge carries a bending moment about the horizontal axis and
/// a moment about the fold axis; the reported value is the sum of both
/// magnitudes:
///
/// * bending: `m (g + a_z) L/2 cos γ`
/// * fold axis, static: `m (g + a_z) L/2 sin γ`
/// * fold axis, thrust: `k_T Ω² L sin γ`
/// * fold axis, rotor drag: `k_Q Ω² cos γ`
/// * inertial: `J_arm |a_t| / (L/2)`, `a_t` the acceleration across the arm
pub fn servo_torque(
    arm: &ArmGeometry,
    rotor: &RotorCoefficients,
    speed: f64,
    accel: &Vector3<f64>,
    gravity: f64,
) -> Result<f64> {
    if !arm.is_deployed() {
        return Err(DynamicsError::ArmNotDeployed(arm.arm_id));
    }
    let half = 0.5 * arm.length;
    let (sin_t, cos_t) = arm.tilt.sin_cos();
    let weight = arm.mass * (gravity + accel.z);
    let bending = (weight * half * cos_t).abs();
    let omega_sq = speed * speed;
    let fold = (weight * half * sin_t).abs()
        + rotor.thrust_coefficient * omega_sq * arm.length * sin_t
        + rotor.drag_coefficient * omega_sq * cos_t;
    let across = (rot_z(arm.yaw).transpose() * accel).y;
    let inertial = arm.inertia() * across.abs() / half;
    Ok((bending + fold + inertial) * 1000.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Hover,
    AccelX15deg,
    AccelY15deg,
    Sinusoid,
    SpeedSweep,
}

impl Profile {
    pub const ALL: [Profile; 5] = [
        Profile::Hover,
        Profile::AccelX15deg,
        Profile::AccelY15deg,
        Profile::Sinusoid,
        Profile::SpeedSweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Hover => "hover",
            Profile::AccelX15deg => "accel_x_15deg",
            Profile::AccelY15deg => "accel_y_15deg",
            Profile::Sinusoid => "sinusoid",
            Profile::SpeedSweep => "speed_sweep",
        }
    }
}

impl FromStr for Profile {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self> {
        Profile::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| DynamicsError::UnknownProfile(s.to_owned()))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Peak tilt of the lateral acceleration profiles.
pub const PROFILE_TILT_DEG: f64 = 15.0;
/// Lateral amplitude (m) and period (s) of the sinusoidal tracking profile.
pub const SINUSOID_AMPLITUDE: f64 = 2.0;
pub const SINUSOID_PERIOD: f64 = 6.0;
const SINUSOID_FORWARD_SPEED: f64 = 2.0;

/// Everything the arm scenarios need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSimSpec {
    pub arms: [ArmGeometry; 4],
    pub rotor: RotorCoefficients,
    /// Top of the speed sweep, rad/s.
    pub max_rotor_speed: f64,
    /// Robot take-off mass, kg.
    pub total_mass: f64,
    pub gravity: f64,
}

impl ArmSimSpec {
    pub fn validate(&self) -> Result<()> {
        for arm in &self.arms {
            arm.validate()?;
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.rotor.thrust_coefficient) && positive(self.rotor.drag_coefficient)) {
            return Err(DynamicsError::Invalid(
                "rotor coefficients must be > 0".into(),
            ));
        }
        if !(positive(self.max_rotor_speed) && positive(self.total_mass) && positive(self.gravity))
        {
            return Err(DynamicsError::Invalid(
                "max_rotor_speed, total_mass and gravity must be > 0".into(),
            ));
        }
        Ok(())
    }

    /// Rotor speed giving a total thrust of `mass · |a + g ẑ|`.
    fn speed_for(&self, accel: &Vector3<f64>) -> f64 {
        let force = self.total_mass * (accel + Vector3::new(0.0, 0.0, self.gravity)).norm();
        (force / (self.arms.len() as f64 * self.rotor.thrust_coefficient)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorqueSample {
    pub t_s: f64,
    pub arm_id: ArmId,
    pub torque_nmm: f64,
}

/// Sample times covering `[0, duration]`, last sample exactly at `duration`.
pub fn time_grid(duration: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && duration.is_finite() && dt < duration) {
        return Err(DynamicsError::InvalidTimeGrid { dt, duration });
    }
    let steps = (duration / dt - 1e-9).ceil();
    if steps > 1e7 {
        return Err(DynamicsError::InvalidTimeGrid { dt, duration });
    }
    let steps = steps as usize;
    Ok((0..=steps)
        .map(|i| if i == steps { duration } else { i as f64 * dt })
        .collect())
}

fn position(profile: Profile, t: f64, duration: f64, gravity: f64) -> Vector3<f64> {
    match profile {
        Profile::Hover | Profile::SpeedSweep => Vector3::zeros(),
        Profile::AccelX15deg | Profile::AccelY15deg => {
            // a(t) = A sin²(πt/D), integrated twice from rest
            let peak = gravity * PROFILE_TILT_DEG.to_radians().tan();
            let k = 2.0 * PI / duration;
            let s = 0.5 * peak * (0.5 * t * t + ((k * t).cos() - 1.0) / (k * k));
            if profile == Profile::AccelX15deg {
                Vector3::new(s, 0.0, 0.0)
            } else {
                Vector3::new(0.0, s, 0.0)
            }
        }
        Profile::Sinusoid => Vector3::new(
            SINUSOID_FORWARD_SPEED * t,
            SINUSOID_AMPLITUDE * (2.0 * PI * t / SINUSOID_PERIOD).sin(),
            0.0,
        ),
    }
}

// Second derivative by finite differences on a possibly uneven grid;
// one-sided stencils at the ends.
fn differentiate_twice(times: &[f64], p: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let n = p.len();
    let mut out = vec![Vector3::zeros(); n];
    if n < 3 {
        return out;
    }
    let second = |i: usize| {
        let (h0, h1) = (times[i] - times[i - 1], times[i + 1] - times[i]);
        2.0 * (h0 * p[i + 1] - (h0 + h1) * p[i] + h1 * p[i - 1]) / (h0 * h1 * (h0 + h1))
    };
    for (i, slot) in out.iter_mut().enumerate().take(n - 1).skip(1) {
        *slot = second(i);
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
    out
}

/// Servo torque traces for all four arms, sorted by time then arm.
pub fn simulate_profile(
    profile: Profile,
    spec: &ArmSimSpec,
    duration: f64,
    dt: f64,
) -> Result<Vec<TorqueSample>> {
    spec.validate()?;
    let times = time_grid(duration, dt)?;
    let positions: Vec<_> = times
        .iter()
        .map(|&t| position(profile, t, duration, spec.gravity))
        .collect();
    let accels = differentiate_twice(&times, &positions);
    let last = times.len() - 1;

    let mut samples = Vec::with_capacity(times.len() * 4);
    for (i, (&t, accel)) in times.iter().zip(&accels).enumerate() {
        let speed = match profile {
            Profile::SpeedSweep => {
                if i == last {
                    spec.max_rotor_speed
                } else {
                    spec.max_rotor_speed * t / duration
                }
            }
            _ => spec.speed_for(accel),
        };
        for arm in &spec.arms {
            samples.push(TorqueSample {
                t_s: t,
                arm_id: arm.arm_id,
                torque_nmm: servo_torque(arm, &spec.rotor, speed, accel, spec.gravity)?,
            });
        }
    }
    samples.sort_by(|a, b| a.t_s.total_cmp(&b.t_s).then(a.arm_id.cmp(&b.arm_id)));
    Ok(samples)
}

pub fn rpm_to_rad_per_s(rpm: f64) -> f64 {
    rpm * 2.0 * PI / 60.0
}
