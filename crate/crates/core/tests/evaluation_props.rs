use std::path::PathBuf;

use landair_core::evaluation::{
    duration_index, evaluate_fleet, flight_index, ground_index, normalize, normalized_column,
    FleetRecord, Metric, WeightSet,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_record(rng: &mut impl Rng, i: usize) -> FleetRecord {
    FleetRecord {
        name: format!("r{i}"),
        t_f: rng.gen_range(1.0..40.0),
        p: rng.gen_range(0.0..10.0),
        v_f: rng.gen_range(1.0..20.0),
        m_d: rng.gen_range(0.5..50.0),
        h_o: rng.gen_range(0.0..300.0),
        v_d: rng.gen_range(0.5..15.0),
        s_land: rng.gen_range(0.1..3.0),
        s_air: rng.gen_range(0.1..3.0),
        t_s: rng.gen_range(0.0..20.0),
        g: rng.gen_range(0.5..40.0),
    }
}

fn random_fleet(rng: &mut impl Rng) -> Vec<FleetRecord> {
    let n = rng.gen_range(2..8);
    (0..n).map(|i| random_record(rng, i)).collect()
}

fn random_weights(rng: &mut impl Rng) -> WeightSet {
    let mut w = || rng.gen_range(0.0..3.0);
    WeightSet {
        t_f: w(),
        p: w(),
        v_f: w(),
        m_d: w(),
        h_o: w(),
        v_d: w(),
        s: w(),
        g: w(),
    }
}

fn set(r: &mut FleetRecord, m: Metric, v: f64) {
    match m {
        Metric::FlightDuration => r.t_f = v,
        Metric::Payload => r.p = v,
        Metric::FlightSpeed => r.v_f = v,
        Metric::DriveMileage => r.m_d = v,
        Metric::ObstacleHeight => r.h_o = v,
        Metric::DriveSpeed => r.v_d = v,
        Metric::LandArea => r.s_land = v,
        Metric::AirArea => r.s_air = v,
        Metric::SwitchTime => r.t_s = v,
        Metric::Weight => r.g = v,
    }
}

/// Independent recomputation: explicit min/max loops per metric.
fn oracle_scores(fleet: &[FleetRecord], w: &WeightSet) -> Vec<[f64; 3]> {
    let n = |m: Metric, r: &FleetRecord| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for q in fleet {
            lo = lo.min(m.of(q));
            hi = hi.max(m.of(q));
        }
        if hi == lo {
            0.5
        } else {
            (m.of(r) - lo) / (hi - lo)
        }
    };
    fleet
        .iter()
        .map(|r| {
            [
                w.t_f * n(Metric::FlightDuration, r)
                    + w.p * n(Metric::Payload, r)
                    + w.v_f * n(Metric::FlightSpeed, r)
                    - w.s * n(Metric::LandArea, r),
                w.m_d * n(Metric::DriveMileage, r)
                    + w.h_o * n(Metric::ObstacleHeight, r)
                    + w.v_d * n(Metric::DriveSpeed, r)
                    - w.s * n(Metric::AirArea, r),
                w.m_d * n(Metric::DriveMileage, r) + w.t_f * n(Metric::FlightDuration, r)
                    - w.g * n(Metric::Weight, r),
            ]
        })
        .collect()
}

fn all_indexes(fleet: &[FleetRecord], w: &WeightSet) -> [Vec<f64>; 3] {
    [
        flight_index(fleet, w).unwrap(),
        ground_index(fleet, w).unwrap(),
        duration_index(fleet, w).unwrap(),
    ]
}

#[test]
fn affine_rescaling_leaves_indexes_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let fleet = random_fleet(&mut rng);
        let w = random_weights(&mut rng);
        let before = all_indexes(&fleet, &w);
        let mut scaled = fleet.clone();
        for m in Metric::ALL {
            let (a, b) = (rng.gen_range(0.01..100.0), rng.gen_range(0.0..50.0));
            for r in scaled.iter_mut() {
                let v = a * m.of(r) + b;
                set(r, m, v);
            }
        }
        let after = all_indexes(&scaled, &w);
        for (x, y) in before.iter().flatten().zip(after.iter().flatten()) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }
}

#[test]
fn indexes_stay_within_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let fleet = random_fleet(&mut rng);
        let w = random_weights(&mut rng);
        let [f, g, d] = all_indexes(&fleet, &w);
        let within = |v: f64, pen: f64, gain: f64| v >= -pen - 1e-12 && v <= gain + 1e-12;
        assert!(f.iter().all(|&v| within(v, w.s, w.t_f + w.p + w.v_f)));
        assert!(g.iter().all(|&v| within(v, w.s, w.m_d + w.h_o + w.v_d)));
        assert!(d.iter().all(|&v| within(v, w.g, w.m_d + w.t_f)));
    }
}

#[test]
fn matches_independent_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let fleet = random_fleet(&mut rng);
        let w = random_weights(&mut rng);
        let [f, g, d] = all_indexes(&fleet, &w);
        for (i, want) in oracle_scores(&fleet, &w).iter().enumerate() {
            assert!((f[i] - want[0]).abs() < 1e-12);
            assert!((g[i] - want[1]).abs() < 1e-12);
            assert!((d[i] - want[2]).abs() < 1e-12);
        }
    }
}

#[test]
fn four_robot_fixture_rankings() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/fleet_4.json");
    let fleet: Vec<FleetRecord> =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let w = WeightSet::default();
    let report = evaluate_fleet(&fleet, &w).unwrap();
    let scores = oracle_scores(&fleet, &w);
    for (k, ranking) in [
        &report.rankings.f_e,
        &report.rankings.g_e,
        &report.rankings.d_e,
    ]
    .into_iter()
    .enumerate()
    {
        // exhaustive: the ranking must be the permutation whose scores are non-increasing
        let mut want: Vec<usize> = (0..fleet.len()).collect();
        want.sort_by(|&a, &b| scores[b][k].total_cmp(&scores[a][k]).then(a.cmp(&b)));
        assert_eq!(ranking, &want);
    }
}

#[test]
fn permuting_the_fleet_permutes_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let fleet = random_fleet(&mut rng);
        let w = random_weights(&mut rng);
        let mut order: Vec<usize> = (0..fleet.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let shuffled: Vec<FleetRecord> = order.iter().map(|&i| fleet[i].clone()).collect();
        let a = evaluate_fleet(&fleet, &w).unwrap();
        let b = evaluate_fleet(&shuffled, &w).unwrap();
        for (pos, &orig) in order.iter().enumerate() {
            assert_eq!(b.rows[pos], a.rows[orig]);
        }
    }
}

proptest! {
    #[test]
    fn normalize_lands_in_unit_interval(lo in -1e6f64..1e6, span in 0.0f64..1e6, t in 0.0f64..=1.0) {
        let hi = lo + span;
        let x = (lo + t * span).clamp(lo, hi);
        let n = normalize(x, lo, hi).unwrap();
        prop_assert!((0.0..=1.0).contains(&n));
    }

    #[test]
    fn new_maximum_never_raises_other_scores(seed in any::<u64>(), m in 0usize..10, bump in 0.0f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fleet = random_fleet(&mut rng);
        let metric = Metric::ALL[m];
        let before = normalized_column(&fleet, metric).unwrap();
        let top = fleet.iter().map(|r| metric.of(r)).fold(f64::NEG_INFINITY, f64::max);
        let mut newcomer = random_record(&mut rng, 99);
        set(&mut newcomer, metric, top + bump);
        let mut grown = fleet.clone();
        grown.push(newcomer);
        let after = normalized_column(&grown, metric).unwrap();
        for (b, a) in before.iter().zip(&after) {
            prop_assert!(*a <= *b + 1e-12);
        }
    }
}
