use std::path::PathBuf;
use std::time::Instant;

use landair_core::endurance::{
    duration_at, duration_curve, flight_duration, no_fly_boundary, optimize_battery_mass,
    EnduranceConfig, EnduranceError, PowerBudget,
};
use landair_core::powertrain::{BatteryModel, PowerTrainModel, ThrustSample};
use landair_core::spec::LoadedSpec;
use proptest::prelude::*;

const G: f64 = 9.81;

fn table(current: impl Fn(f64) -> f64) -> Vec<ThrustSample> {
    (0..=36)
        .map(|i| {
            let thrust_n = 4.0 + i as f64;
            let current_a = current(thrust_n);
            ThrustSample {
                thrust_n,
                current_a,
                efficiency_g_per_w: thrust_n / G * 1000.0 / (22.2 * current_a),
            }
        })
        .collect()
}

/// Small quad whose hover current grows as T^1.5, fitted with a cubic.
fn superlinear() -> EnduranceConfig {
    config(
        PowerTrainModel::from_table(
            "superlinear",
            900.0,
            12.0,
            &table(|t| 0.25 * t.powf(1.5)),
            3,
            1,
        )
        .unwrap(),
    )
}

fn linear() -> EnduranceConfig {
    config(
        PowerTrainModel::from_table("linear", 900.0, 12.0, &table(|t| 0.5 + 0.3 * t), 1, 1)
            .unwrap(),
    )
}

fn config(powertrain: PowerTrainModel) -> EnduranceConfig {
    EnduranceConfig {
        rotor_count: 4,
        nominal_voltage: 22.2,
        battery_model: BatteryModel::new(150.0, 0.0, 22.2).unwrap(),
        powertrain,
        fixed_mass: 2.0,
        power_budget: PowerBudget {
            avionics: 30.0,
            perception: 20.0,
            deform: 0.0,
        },
        gravity: G,
    }
}

/// Hover time written out directly from the fitted coefficients.
fn oracle_duration(c: &EnduranceConfig, m: f64) -> Option<f64> {
    let thrust = (c.fixed_mass + m) * G / 4.0;
    let curve = &c.powertrain.current_curve;
    if thrust > curve.valid_range.1 || thrust < curve.valid_range.0 {
        return None;
    }
    let current: f64 = curve
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, a)| a * thrust.powi(k as i32))
        .sum();
    let watts = 4.0 * 22.2 * current + 50.0;
    Some(150.0 * m / watts * 60.0)
}

fn brute_force(c: &EnduranceConfig, lo: f64, hi: f64) -> (f64, f64) {
    let n = ((hi - lo) / 0.001).round() as usize;
    (0..=n)
        .map(|i| lo + i as f64 * 0.001)
        .filter_map(|m| oracle_duration(c, m).map(|d| (m, d)))
        .fold((f64::NAN, f64::NEG_INFINITY), |best, p| {
            if p.1 > best.1 {
                p
            } else {
                best
            }
        })
}

fn fixture_config() -> EnduranceConfig {
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/reference_robot.json");
    LoadedSpec::load(path).unwrap().endurance_config().unwrap()
}

#[test]
fn optimizer_matches_grid_scan_on_superlinear_current() {
    let c = superlinear();
    let started = Instant::now();
    let best = optimize_battery_mass(&c, (0.5, 14.0), 0.1, 0.01).unwrap();
    assert!(started.elapsed().as_secs_f64() < 1.0);
    let (m_star, d_star) = brute_force(&c, 0.5, 14.0);
    assert!(
        m_star > 1.0 && m_star < 13.0,
        "optimum should be interior, got {m_star}"
    );
    assert!(
        (best.battery_mass - m_star).abs() <= 0.01,
        "{} vs {m_star}",
        best.battery_mass
    );
    assert!(best.duration_min >= d_star - 1e-6);
}

#[test]
fn linear_current_optimum_is_the_boundary() {
    let c = linear();
    let boundary = no_fly_boundary(&c).unwrap();
    assert!((boundary - (4.0 * 40.0 / G - 2.0)).abs() < 1e-12);
    let best = optimize_battery_mass(&c, (0.5, 20.0), 0.1, 0.01).unwrap();
    assert_eq!(best.battery_mass, boundary);
    assert_eq!(best.duration_min, duration_at(&c, boundary).unwrap());
}

#[test]
fn range_beyond_boundary_is_infeasible() {
    let c = linear();
    match optimize_battery_mass(&c, (15.0, 20.0), 0.1, 0.01) {
        Err(e @ EnduranceError::InfeasibleRange { .. }) => {
            assert!(e.to_string().contains("no-fly boundary"))
        }
        other => panic!("expected infeasible range, got {other:?}"),
    }
}

#[test]
fn published_design_point() {
    let minutes = flight_duration(1440.0, 4, 48.0, 18.0, 543.0).unwrap();
    assert!((minutes - 1440.0 / 3999.0 * 60.0).abs() < 1e-12);
    assert!((minutes - 21.61).abs() < 0.05);

    let c = fixture_config();
    assert!((duration_at(&c, 5.74).unwrap() - 21.6).abs() < 0.05);
}

#[test]
fn fixture_curve_is_unimodal_with_flagged_no_fly_tail() {
    let c = fixture_config();
    let boundary = no_fly_boundary(&c).unwrap();
    let curve = duration_curve(&c, (0.05, 16.0), 0.01).unwrap();
    for p in &curve {
        assert_eq!(
            p.feasible(),
            p.battery_mass <= boundary,
            "mass {}",
            p.battery_mass
        );
    }
    let feasible: Vec<(f64, f64)> = curve
        .iter()
        .filter_map(|p| p.duration_min.map(|d| (p.battery_mass, d)))
        .collect();
    let peak = feasible
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    assert!(feasible[..=peak].windows(2).all(|w| w[1].1 > w[0].1));
    assert!(feasible[peak..].windows(2).all(|w| w[1].1 < w[0].1));
    assert!((feasible[peak].0 - 5.7).abs() <= 1.0);
}

proptest! {
    #[test]
    fn optimum_dominates_every_feasible_mass(m in 0.5f64..14.0) {
        let c = superlinear();
        let best = optimize_battery_mass(&c, (0.5, 14.0), 0.1, 0.01).unwrap();
        if let Ok(d) = duration_at(&c, m) {
            prop_assert!(d <= best.duration_min + 1e-9);
        }
    }

    #[test]
    fn duration_agrees_with_direct_formula(m in 0.0f64..13.0) {
        let c = superlinear();
        let oracle = oracle_duration(&c, m).unwrap();
        prop_assert!((duration_at(&c, m).unwrap() - oracle).abs() <= 1e-9 * oracle.max(1.0));
    }

    #[test]
    fn duration_is_lipschitz_in_battery_mass(m in 0.0f64..13.0, dm in 0.0f64..0.01) {
        // d = k·m / W(m) with W increasing, so |d'| <= k/W(0) + k·m_max·W'_max/W(0)².
        let c = superlinear();
        let k = 150.0 * 60.0;
        let w0 = 4.0 * 22.2 * c.powertrain.current_curve.eval(c.per_rotor_thrust(0.0)).unwrap() + 50.0;
        let (lo, hi) = c.powertrain.current_curve.valid_range;
        let slope_max = (0..=1000)
            .map(|i| c.powertrain.current_curve.derivative_at(lo + (hi - lo) * i as f64 / 1000.0))
            .fold(0.0, f64::max);
        let w_prime = 4.0 * 22.2 * slope_max * G / 4.0;
        let lipschitz = k / w0 + k * 13.01 * w_prime / (w0 * w0);
        let (a, b) = (duration_at(&c, m).unwrap(), duration_at(&c, m + dm).unwrap());
        prop_assert!((a - b).abs() <= lipschitz * dm * 1.01 + 1e-12);
    }

    #[test]
    fn heavier_fixed_mass_never_hovers_longer(m in 0.5f64..10.0, extra in 0.0f64..2.0) {
        let c = superlinear();
        let mut heavy = c.clone();
        heavy.fixed_mass += extra;
        if let (Ok(light), Ok(heavy)) = (duration_at(&c, m), duration_at(&heavy, m)) {
            prop_assert!(heavy <= light + 1e-12);
        }
    }
}
