use proptest::prelude::*;

use wilc::config::ExperimentConfig;
use wilc::experiment::build_setup;
use wilc::ilc::run_learning;
use wilc::plant::{self, FrictionParams, PlantParams, PlantState};

proptest! {
    #[test]
    fn flow_is_continuous_at_the_critical_ratio(x_v in 1e-6..1e-3f64, p_up in 1.2e5..8e5f64, p_cr in 0.3..0.6f64) {
        let p = PlantParams { critical_ratio: p_cr, ..PlantParams::default() };
        let at = plant::valve_mass_flow(x_v, p_up, p_cr * p_up, &p).unwrap();
        let above = plant::valve_mass_flow(x_v, p_up, p_cr * p_up * (1.0 + 1e-15), &p).unwrap();
        prop_assert!((above - at).abs() <= 1e-12 * at);
    }

    #[test]
    fn flow_is_monotone_in_opening(a in 0.0..1e-3f64, b in 0.0..1e-3f64, p_up in 2e5..6e5f64, frac in 0.0..1.0f64) {
        let p = PlantParams::default();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let pd = frac * p_up;
        prop_assert!(plant::valve_mass_flow(hi, p_up, pd, &p).unwrap() >= plant::valve_mass_flow(lo, p_up, pd, &p).unwrap());
    }

    #[test]
    fn choked_flow_is_monotone_in_upstream_pressure(x_v in 0.0..1e-3f64, p_down in 1e5..2e5f64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let p = PlantParams::default();
        // both upstream pressures high enough to choke
        let p_min = p_down / p.critical_ratio;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (p_lo, p_hi) = (p_min * (1.0 + lo), p_min * (1.0 + hi));
        prop_assert!(plant::valve_mass_flow(x_v, p_hi, p_down, &p).unwrap() >= plant::valve_mass_flow(x_v, p_lo, p_down, &p).unwrap());
    }

    #[test]
    fn no_flow_without_a_pressure_drop(x_v in 0.0..1e-3f64, p in 1e5..6e5f64, excess in 0.0..1e5f64) {
        let params = PlantParams::default();
        prop_assert_eq!(plant::valve_mass_flow(x_v, p, p + excess, &params).unwrap(), 0.0);
    }
}

#[test]
fn balanced_rest_state_is_an_equilibrium() {
    let p = PlantParams::default();
    let s = PlantState::rest(0.2, &p);
    let d = plant::derivatives(&s, 0.0, &p).unwrap();
    assert_eq!([d.x_p, d.v_p, d.p_a, d.p_b, d.x_v], [0.0; 5]);
}

#[test]
fn steady_spool_tracks_the_command() {
    let p = PlantParams::default();
    let s = PlantState {
        x_v: p.spool_gain * 0.4,
        ..PlantState::rest(0.2, &p)
    };
    assert_eq!(plant::derivatives(&s, 0.4, &p).unwrap().x_v, 0.0);
}

#[test]
fn motion_expands_a_and_compresses_b() {
    let p = PlantParams::default();
    let s = PlantState {
        v_p: 0.1,
        ..PlantState::rest(0.2, &p)
    };
    let d = plant::derivatives(&s, 0.0, &p).unwrap();
    assert!(d.p_a < 0.0 && d.p_b > 0.0);
}

#[test]
fn end_stops_are_plastic() {
    let p = PlantParams {
        friction: FrictionParams::frictionless(),
        ..PlantParams::default()
    };
    let mut s = PlantState::rest(0.49, &p);
    for _ in 0..2000 {
        s = plant::step(&s, 1.0, 1e-3, &p).unwrap();
        assert!((0.0..=p.stroke).contains(&s.x_p));
    }
    assert_eq!(s.x_p, p.stroke);
    assert_eq!(s.v_p, 0.0);
}

#[test]
fn pressures_stay_in_range_over_a_learning_run() {
    let mut cfg = ExperimentConfig::default();
    cfg.disturbance.nonrepeatable_std = 5.0;
    let p = cfg.plant;
    let curve = run_learning(&build_setup(&cfg, None).unwrap()).unwrap();
    for r in &curve.records {
        for probe in &r.probes {
            for pressure in [probe.p_a, probe.p_b] {
                assert!(
                    pressure >= p.pressure_floor() && pressure <= 1.05 * p.supply_pressure,
                    "{pressure}"
                );
            }
        }
    }
}

#[test]
fn substeps_refine_the_same_trajectory() {
    let mut p = PlantParams {
        friction: FrictionParams::frictionless(),
        ..PlantParams::default()
    };
    let run = |p: &PlantParams, dt: f64| {
        let mut s = PlantState::rest(0.25, p);
        for _ in 0..(0.5 / dt).round() as usize {
            s = plant::step(&s, 0.05, dt, p).unwrap();
        }
        s.x_p
    };
    let coarse = run(&p, 2e-3);
    p.substeps = 4;
    let fine = run(&p, 2e-3);
    let mut q = p;
    q.substeps = 1;
    let direct = run(&q, 5e-4);
    assert!((fine - direct).abs() < 1e-12, "{fine} vs {direct}");
    assert!((coarse - fine).abs() > 0.0);
}

#[test]
fn non_positive_volume_is_a_domain_error() {
    let p = PlantParams {
        dead_volume_a: 0.0,
        ..PlantParams::default()
    };
    let s = PlantState {
        x_p: 0.0,
        ..PlantState::rest(0.0, &PlantParams::default())
    };
    assert!(plant::derivatives(&s, 0.0, &p).is_err());
}
