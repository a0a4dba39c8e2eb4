use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rcthermo::maser::{solve, truncation_gate, MaserParams, MaserPoint, Model, SweepAxis};
use rcthermo::MaserParams64;

fn eta(pt: &MaserPoint<f64>) -> f64 {
    pt.efficiency.eta().expect("engine regime")
}

fn assert_laws(p: &MaserParams64, pt: &MaserPoint<f64>) {
    let obs = &pt.observables;
    assert!(obs.first_law_relative < 1e-9, "{:?}: first law {:e}", pt.model, obs.first_law_relative);
    if pt.model != Model::RcNonSecular {
        assert!(obs.entropy_production >= -1e-12);
        for s in obs.spohn.iter() {
            assert!(s.expect("secular Spohn term") >= -1e-10);
        }
    }
    if let Some(e) = pt.efficiency.eta() {
        assert!(e <= p.efficiency_bound());
    }
}

fn random_bare(rng: &mut ChaCha8Rng) -> MaserParams64 {
    let mut p = MaserParams::fig5(1.0);
    p.delta10 = rng.random_range(0.1..1.0);
    p.delta20 = p.delta10 + rng.random_range(0.05..1.5);
    p.beta_hot = rng.random_range(0.01..1.0);
    p.beta_cold = rng.random_range(2.0..40.0);
    p.beta_work = rng.random_range(1e-4..1e-2);
    p.gamma_hot = rng.random_range(1e-4..1e-2);
    p.gamma_work = p.gamma_hot * rng.random_range(1.0..50.0);
    p.omega0 = rng.random_range(0.05..0.5);
    p.gamma = p.omega0 * rng.random_range(0.01..1.0);
    p.d0 = p.omega0 * p.omega0 * rng.random_range(1e-3..1.0);
    p
}

#[test]
fn bare_efficiency_is_the_level_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(2016);
    let mut engines = 0;
    while engines < 20 {
        let p = random_bare(&mut rng);
        let pt = solve(&p, Model::Bare).unwrap();
        assert_laws(&p, &pt);
        if pt.power < 0.0 {
            engines += 1;
            assert!((eta(&pt) / p.otto_efficiency() - 1.0).abs() < 1e-10, "{p:?}");
        }
    }
}

#[test]
fn common_temperature_carries_no_heat() {
    let mut p = MaserParams::fig5(1.6);
    p.beta_hot = 1.0 / p.omega0;
    p.beta_cold = p.beta_hot;
    p.beta_work = p.beta_hot;
    for model in [Model::Bare, Model::RcSecular] {
        let pt = solve(&p, model).unwrap();
        for c in &pt.observables.currents {
            assert!(c.heat.abs() < 1e-12 * p.gamma_work * p.delta20, "{model:?} {}: {:e}", c.label, c.heat);
        }
    }
}

#[test]
fn rc_efficiency_beats_the_level_ratio_off_resonance() {
    // Closer to resonance the coherences feed the currents at the few-percent level.
    for (x, tol) in [(1.3, 0.1), (1.6, 0.03), (2.0, 0.01), (2.5, 0.01)] {
        let p = MaserParams::fig5(x);
        let otto = p.otto_efficiency();
        let sec = solve(&p, Model::RcSecular).unwrap();
        let non = solve(&p, Model::RcNonSecular).unwrap();
        assert_laws(&p, &sec);
        assert_laws(&p, &non);
        let gain = eta(&non) / otto - 1.0;
        assert!((0.05..=0.30).contains(&gain), "Δ21/ω0 = {x}: gain {gain}");
        assert!((eta(&sec) / eta(&non) - 1.0).abs() < 0.02);
        for (a, b) in [(sec.power, non.power), (sec.hot, non.hot), (sec.cold, non.cold)] {
            assert!((a / b - 1.0).abs() < tol, "Δ21/ω0 = {x}: {a:e} vs {b:e}");
        }
        assert!(truncation_gate(&p, Model::RcSecular, &sec).is_ok());
    }
}

#[test]
fn secular_power_blows_up_on_resonance() {
    let p = MaserParams::fig5(1.0);
    let sec = solve(&p, Model::RcSecular).unwrap();
    let non = solve(&p, Model::RcNonSecular).unwrap();
    assert!(sec.power / non.power > 10.0);
    assert!((eta(&sec) / eta(&non) - 1.0).abs() < 0.02);
}

#[test]
fn slow_hot_and_work_baths_recover_the_bare_engine() {
    // The Markov limit for the cold bath needs every other rate far below γ.
    for (axis, value) in [(SweepAxis::D0, 1e-3), (SweepAxis::Gamma, 5.0)] {
        let mut p = axis.apply(&MaserParams::fig6(), value);
        p.gamma_hot *= 1e-4;
        p.gamma_work *= 1e-4;
        let bare = solve(&p, Model::Bare).unwrap();
        let rc = solve(&p, Model::RcNonSecular).unwrap();
        let tol = 2e-3;
        assert!((eta(&rc) / p.otto_efficiency() - 1.0).abs() < tol);
        for (a, b) in [(rc.power, bare.power), (rc.hot, bare.hot), (rc.cold, bare.cold)] {
            assert!((a / b - 1.0).abs() < tol, "{axis:?}={value}: {a:e} vs {b:e}");
        }
    }
}

#[test]
fn efficiency_falls_with_coupling_while_power_peaks() {
    let base = MaserParams::fig6();
    let grid = [0.01, 0.1, 0.5, 0.9, 1.1, 1.3, 1.5];
    let points: Vec<_> = grid
        .iter()
        .map(|&d| {
            let p = SweepAxis::D0.apply(&base, d);
            let pt = solve(&p, Model::RcNonSecular).unwrap();
            assert_laws(&p, &pt);
            pt
        })
        .collect();
    let etas: Vec<f64> = points.iter().map(eta).collect();
    assert!(etas.windows(2).all(|w| w[1] < w[0]), "{etas:?}");
    let power: Vec<f64> = points.iter().map(|pt| -pt.power).collect();
    let (imax, _) = power
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &w)| if w > acc.1 { (i, w) } else { acc });
    assert!(imax > 0 && imax < grid.len() - 1, "{power:?}");
}

#[test]
fn config_rejects_unknown_keys() {
    let text = r#"{"omega0":1,"d0":1,"gamma":1,"cutoff":10,"delta10":1,"delta20":2,"beta_hot":1,
        "beta_cold":2,"beta_work":0.1,"gamma_hot":1,"gamma_work":1,"nc":4,"bogus":1}"#;
    assert!(serde_json::from_str::<MaserParams64>(text).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rc_engine_respects_the_bound(x in 0.6f64..3.0, d0 in 0.005f64..0.5) {
        let mut p = SweepAxis::D0.apply(&MaserParams::fig5(x), d0);
        p.nc = 8;
        let pt = solve(&p, Model::RcSecular).unwrap();
        prop_assert!(pt.observables.entropy_production >= -1e-12);
        prop_assert!(pt.observables.first_law_relative < 1e-9);
        if let Some(e) = pt.efficiency.eta() {
            prop_assert!(e <= p.efficiency_bound());
        }
    }
}
