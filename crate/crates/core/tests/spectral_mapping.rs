use proptest::prelude::*;
use rcthermo::spectral::{cauchy_boundary, map_sd, moments, rc_parameters, GridSpec, SdTable};
use rcthermo::SpectralDensity64 as Sd;

fn lorentz(omega0: f64, gamma: f64, d0: f64, cutoff: f64) -> Sd {
    Sd::LorentzianHardCutoff {
        d0,
        gamma,
        omega0,
        cutoff,
    }
}

fn fig5_bath() -> Sd {
    let w0 = 0.17;
    lorentz(w0, 0.0176 * w0, 0.0104 * w0 * w0, 588.0 * w0)
}

// Composite Simpson on a geometric grid; independent of the adaptive rule.
fn simpson_log(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (la, lb) = (a.ln(), b.ln());
    let h = (lb - la) / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let t = la + h * i as f64;
        let x = t.exp();
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        s += w * f(x) * x;
    }
    s * h / 3.0
}

#[test]
fn lorentzian_moments_match_independent_quadrature() {
    let sd = fig5_bath();
    let m = moments(&sd).unwrap();
    let end = 588.0 * 0.17;
    let c = 2.0 / std::f64::consts::PI;
    let n = 400_000;
    let inv = c * simpson_log(|w| sd.eval(w) / w, 1e-12, end * (1.0 - 1e-15), n);
    let first = c * simpson_log(|w| w * sd.eval(w), 1e-12, end * (1.0 - 1e-15), n);
    assert!((m.delta_omega0_sq / inv - 1.0).abs() < 1e-6);
    assert!((m.lambda0_sq / first - 1.0).abs() < 1e-6);
}

#[test]
fn lorentzian_moments_approach_infinite_cutoff_values() {
    // With ωR → ∞: λ0 = d0 and δΩ0 = d0/ω0.
    let (w0, g, d0) = (1.0, 0.02, 0.3);
    let m = moments(&lorentz(w0, g, d0, 1e5)).unwrap();
    assert!((m.lambda0_sq / (d0 * d0) - 1.0).abs() < 1e-5);
    assert!((m.delta_omega0_sq / (d0 * d0 / (w0 * w0)) - 1.0).abs() < 1e-5);
}

#[test]
fn lorentzian_cauchy_transform_matches_resolvent() {
    // For ωR → ∞ the boundary value is d0² / (ω0² − ω² − iγω).
    let (w0, g, d0) = (1.0, 0.05, 0.4);
    let sd = lorentz(w0, g, d0, 1e4);
    for w in [0.01, 0.5, 0.97, 1.0, 1.03, 3.0, 20.0] {
        let cb = cauchy_boundary(&sd, w).unwrap();
        let den = (w0 * w0 - w * w).powi(2) + g * g * w * w;
        let re = d0 * d0 * (w0 * w0 - w * w) / den;
        let scale = d0 * d0 / den.sqrt();
        assert!((cb.re - re).abs() < 1e-6 * scale, "w={w}: {} vs {re}", cb.re);
    }
}

#[test]
fn mapped_lorentzian_is_ohmic() {
    let sd = fig5_bath();
    let gamma = 0.0176 * 0.17;
    let mapped = map_sd(&sd, &GridSpec::default()).unwrap();
    for k in [0.01, 0.3, 0.9, 1.0, 1.1, 5.0, 50.0] {
        let w = k * 0.17;
        let ratio = mapped.eval(w) / (gamma * w);
        assert!((ratio - 1.0).abs() < 2e-3, "omega/omega0={k}: ratio {ratio}");
    }
}

#[test]
fn fig5_renormalization_identity() {
    let rc = rc_parameters(&fig5_bath(), &GridSpec::default()).unwrap();
    let w0 = 0.17;
    assert!((rc.params.rc_frequency() / w0 - 1.0).abs() < 1e-3);
    assert!(rc.params.renormalization_mismatch() < 1e-3);
}

#[test]
fn tabulated_input_round_trips_through_csv() {
    let sd = fig5_bath();
    let mapped = map_sd(&sd, &GridSpec::default().with_points(300)).unwrap();
    let Sd::Tabulated(t) = &mapped else {
        panic!("mapping returns a table")
    };
    let back = SdTable::from_csv(&t.to_csv()).unwrap();
    assert_eq!(t, &back);
}

fn families() -> Vec<Sd> {
    vec![
        lorentz(1.0, 0.05, 0.3, 50.0),
        lorentz(1.0, 1.5, 0.5, 8.0),
        Sd::OhmicHardCutoff {
            slope: 0.2,
            cutoff: 3.0,
        },
        Sd::OhmicExpCutoff {
            coupling: 0.1,
            cutoff: 2.0,
        },
    ]
}

#[test]
fn renormalization_identity_holds_across_families() {
    for sd in families() {
        let rc = rc_parameters(&sd, &GridSpec::default()).unwrap();
        let mismatch = rc.params.renormalization_mismatch();
        assert!(mismatch < 1e-4, "{}: {mismatch:e}", sd.family_name());
        // The residual bath can itself be mapped; the identity holds again.
        let second = rc_parameters(&rc.residual, &GridSpec::default()).unwrap();
        assert!(second.params.renormalization_mismatch() < 1e-4, "{}", sd.family_name());
    }
}

#[test]
fn cauchy_transform_at_zero_is_the_inverse_moment() {
    for sd in families() {
        let m = moments(&sd).unwrap();
        let w0 = cauchy_boundary(&sd, 1e-7).unwrap();
        assert!((w0.re / m.delta_omega0_sq - 1.0).abs() < 1e-10, "{}", sd.family_name());
    }
}

#[test]
fn mapped_density_starts_with_the_predicted_slope() {
    // As ω → 0, W → δΩ0², so J1 ≈ λ0² J'(0) ω / δΩ0⁴.
    for sd in families() {
        let m = moments(&sd).unwrap();
        let mapped = map_sd(&sd, &GridSpec::default()).unwrap();
        let expected = m.lambda0_sq * sd.zero_slope().unwrap() / (m.delta_omega0_sq * m.delta_omega0_sq);
        let got = mapped.zero_slope().unwrap();
        assert!((got / expected - 1.0).abs() < 1e-4, "{}: {got} vs {expected}", sd.family_name());
    }
}

#[test]
fn tabulated_density_reproduces_parametric_moments() {
    let sd = lorentz(1.0, 0.3, 0.4, 10.0);
    let n = 20_000;
    let omega: Vec<f64> = (1..=n).map(|i| 10.0 * i as f64 / n as f64).collect();
    let vals: Vec<f64> = omega.iter().map(|&w| sd.eval(w)).collect();
    let table = Sd::Tabulated(SdTable::new(omega, vals).unwrap());
    let (a, b) = (moments(&sd).unwrap(), moments(&table).unwrap());
    assert!((b.delta_omega0_sq / a.delta_omega0_sq - 1.0).abs() < 1e-4);
    assert!((b.lambda0_sq / a.lambda0_sq - 1.0).abs() < 1e-4);
    assert!((b.omega1_sq / a.omega1_sq - 1.0).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moments_scale_linearly(factor in 0.01f64..100.0, slope in 0.01f64..3.0, cutoff in 0.5f64..20.0) {
        let sd = Sd::OhmicHardCutoff { slope, cutoff };
        let a = moments(&sd).unwrap();
        let b = moments(&sd.scaled(factor)).unwrap();
        prop_assert!((b.delta_omega0_sq / a.delta_omega0_sq / factor - 1.0).abs() < 1e-10);
        prop_assert!((b.lambda0_sq / a.lambda0_sq / factor - 1.0).abs() < 1e-10);
        prop_assert!((b.omega1_sq / a.omega1_sq - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mapped_density_is_positive(w0 in 0.5f64..2.0, g in 0.01f64..0.5, d0 in 0.05f64..1.0) {
        let sd = lorentz(w0, g, d0, 60.0 * w0);
        let mapped = map_sd(&sd, &GridSpec::default().with_points(200)).unwrap();
        let Sd::Tabulated(t) = mapped else { unreachable!() };
        prop_assert!(t.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn moments_are_positive_for_tables(vals in proptest::collection::vec(0.001f64..5.0, 4..30)) {
        let omega: Vec<f64> = (1..=vals.len()).map(|i| i as f64 * 0.1).collect();
        let sd = Sd::Tabulated(SdTable::new(omega, vals).unwrap());
        let m = moments(&sd).unwrap();
        prop_assert!(m.delta_omega0_sq > 0.0 && m.lambda0_sq > 0.0 && m.omega1_sq > 0.0);
    }
}
