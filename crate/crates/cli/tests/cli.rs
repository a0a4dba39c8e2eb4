use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn rcthermo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcthermo")).args(args).output().unwrap()
}

fn run_to(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    rcthermo(&args)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

const SMALL_MASER: &str = r#"
[maser]
omega0 = 0.17
d0 = 0.00030056
gamma = 0.0029920000000000003
cutoff = 99.96000000000001
delta10 = 0.4301
delta20 = 0.6001
beta_hot = 1.0
beta_cold = 99.99999999999999
beta_work = 0.009999999999999998
gamma_hot = 0.001
gamma_work = 0.02
nc = 4
"#;

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn staircase_fixture_is_byte_identical_across_runs_and_pool_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("fig8.toml");
    let outputs: Vec<Vec<u8>> = [["--jobs", "1"], ["--jobs", "3"], ["--jobs", "1"]]
        .iter()
        .enumerate()
        .map(|(i, extra)| {
            let out = dir.path().join(format!("run{i}.csv"));
            let o = run_to("set", &cfg, &out, extra);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read(&out).unwrap()
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn staircase_steps_sit_at_twice_the_transition_energies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig8.csv");
    assert_eq!(run_to("sweep", &fixture("fig8.toml"), &out, &[]).status.code(), Some(0));
    let (header, rows) = read_csv(&out);
    assert_eq!(header[0], "v_over_omega1");
    let v: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let i: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let jumps: Vec<f64> = i.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let largest = jumps.iter().cloned().fold(0.0, f64::max);
    let h = v[1] - v[0];
    // ε̄ = ε̃ − λ0²/(2Ω1²) = −2.5 at the fixture's parameters.
    for k in 0..=4 {
        let expected = 2.0 * (-2.5 + k as f64).abs();
        let at = jumps
            .iter()
            .enumerate()
            .filter(|(_, &j)| j > 1e-2 * largest)
            .any(|(n, _)| (v[n] + h / 2.0 - expected).abs() <= h);
        assert!(at, "no step near V = {expected}");
    }
}

#[test]
fn maser_csv_has_the_figure_columns_and_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{SMALL_MASER}\n[sweep]\naxis = \"delta21\"\nvalues = [1.6, 2.0]\n"),
    );
    let out = dir.path().join("m.csv");
    let o = run_to("maser", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    for col in ["delta21_over_omega0", "eta_bare", "eta_rc_secular", "eta_rc_nonsecular", "w_rc_nonsecular", "error"] {
        assert!(header.iter().any(|h| h == col), "missing {col}");
    }
    assert_eq!(rows.len(), 2);
    let eta_bare: f64 = rows[0][header.iter().position(|h| h == "eta_bare").unwrap()].parse().unwrap();
    assert!((eta_bare - 0.4301 / (0.4301 + 1.6 * 0.17)).abs() < 1e-12);
    assert!(rows.iter().all(|r| r.last().unwrap().is_empty()));
}

#[test]
fn mode_and_truncation_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_MASER);
    let out = dir.path().join("m.json");
    let o = run_to("maser", &cfg, &out, &["--mode", "secular", "--nc", "6", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let cols: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert!(cols.contains(&"eta_rc_secular"));
    assert!(!cols.contains(&"eta_bare") && !cols.contains(&"eta_rc_nonsecular"));

    let a = rcthermo::maser::solve(
        &rcthermo::maser::MaserParams {
            nc: 6,
            ..toml::from_str::<Wrapper>(SMALL_MASER).unwrap().maser
        },
        rcthermo::maser::Model::RcSecular,
    )
    .unwrap();
    let eta = doc["rows"][0][cols.iter().position(|&c| c == "eta_rc_secular").unwrap()].as_f64().unwrap();
    assert_eq!(eta, a.efficiency.eta().unwrap());
}

#[derive(serde::Deserialize)]
struct Wrapper {
    maser: rcthermo::MaserParams64,
}

#[test]
fn map_sd_writes_both_densities_and_the_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map");
    let o = run_to("map-sd", &fixture("lorentzian.toml"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h0, j0) = read_csv(&out.join("j0.csv"));
    let (h1, j1) = read_csv(&out.join("j1.csv"));
    assert_eq!(h0, ["omega", "J"]);
    assert_eq!(h1, ["omega", "J"]);
    assert_eq!(j0.len(), j1.len());
    let params: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("rc_parameters.json")).unwrap()).unwrap();
    assert!(params["renormalization_mismatch"].as_f64().unwrap() < 1e-4);
    assert!((params["rc_frequency"].as_f64().unwrap() / 0.17 - 1.0).abs() < 1e-3);

    // The exported table maps again when read back as input.
    let cfg = write_config(dir.path(), "[map_sd]\ncsv = \"map/j1.csv\"\n");
    let again = run_to("map-sd", &cfg, &dir.path().join("map2"), &[]);
    assert_eq!(again.status.code(), Some(0), "{}", String::from_utf8_lossy(&again.stderr));
}

#[test]
fn eqcheck_reports_the_mean_force_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eq.json");
    let o = run_to("eqcheck", &fixture("eqcheck.toml"), &out, &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let cols: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let get = |name: &str| doc["rows"][0][cols.iter().position(|&c| c == name).unwrap()].as_f64().unwrap();
    assert!(get("reduced_vs_steady") < 1e-8);
    assert!(get("reduced_vs_canonical") > 0.0);
}

#[test]
fn unknown_keys_are_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL_MASER}bogus = 1\n"));
    let o = run_to("maser", &cfg, &dir.path().join("x.csv"), &[]);
    assert_eq!(o.status.code(), Some(64));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn invalid_parameters_and_arguments_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL_MASER.replace("gamma_hot = 0.001", "gamma_hot = -0.001"));
    assert_eq!(run_to("maser", &cfg, &dir.path().join("x.csv"), &[]).status.code(), Some(64));
    let cfg = write_config(dir.path(), SMALL_MASER);
    assert_eq!(
        run_to("maser", &cfg, &dir.path().join("x.csv"), &["--format", "xml"]).status.code(),
        Some(64)
    );
    assert_eq!(run_to("set", &cfg, &dir.path().join("x.csv"), &[]).status.code(), Some(64));
    assert_eq!(rcthermo(&["--help"]).status.code(), Some(0));
}

#[test]
fn unreadable_config_and_unwritable_output_are_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    assert_eq!(run_to("maser", &missing, &dir.path().join("x.csv"), &[]).status.code(), Some(74));
    let cfg = write_config(dir.path(), SMALL_MASER);
    let bad_out = dir.path().join("no/such/dir/x.csv");
    assert_eq!(run_to("maser", &cfg, &bad_out, &[]).status.code(), Some(74));
}

#[test]
fn failed_points_are_annotated_and_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "{SMALL_MASER}\n[sweep]\naxis = \"delta21\"\nvalues = [1.6, 2.0]\nmodels = [\"rc_secular\"]\ngate = true\n\n[tolerances]\ntruncation = 1e-30\n"
    );
    let cfg = write_config(dir.path(), &body);
    let out = dir.path().join("g.csv");
    let o = run_to("sweep", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let (header, rows) = read_csv(&out);
    assert_eq!(rows.len(), 2);
    let err = header.iter().position(|h| h == "error").unwrap();
    assert!(rows.iter().all(|r| r[err].contains("truncation")));
    let eta = header.iter().position(|h| h == "eta_rc_secular").unwrap();
    assert!(rows.iter().all(|r| r[eta].parse::<f64>().is_ok()));
}
