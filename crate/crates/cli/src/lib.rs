//! Config-driven front end for the reaction-coordinate models.
//!
//! Every subcommand reads a TOML file, evaluates its grid on a bounded rayon
//! pool and writes rows in grid order, so output bytes do not depend on the
//! number of workers.

pub mod config;
pub mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use rcthermo::equilibrium::maser_equilibrium;
use rcthermo::maser::{self, MaserParams, Model};
use rcthermo::set_vibrations::{self, SetParams};
use rcthermo::spectral::{rc_parameters, SdTable, SpectralDensity};
use rcthermo::thermo::Efficiency;

use config::{Axis, Format, RunConfig, SweepConfig};
use table::{Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_POINT_FAILED: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    MapSd,
    Maser,
    Set,
    Eqcheck,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Bare,
    Secular,
    Nonsecular,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    #[arg(long)]
    pub config: PathBuf,
    /// Output file (a directory for `map-sd`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for the sweep.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Override the oscillator truncation.
    #[arg(long)]
    pub nc: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

/// Number of grid points that failed; the rows are still written.
pub type Failures = usize;

pub fn run(cmd: Command, opts: &Options) -> Result<Failures, CliError> {
    let mut cfg = config::load(&opts.config)?;
    if let Some(nc) = opts.nc {
        if let Some(m) = cfg.maser.as_mut() {
            m.nc = nc;
        }
        if let Some(s) = cfg.set.as_mut() {
            s.nc = nc;
        }
    }
    let format = opts.format.or(cfg.format).unwrap_or(Format::Csv);
    let out = opts.out.clone().or(cfg.out.clone());
    let jobs = opts.jobs.or(cfg.jobs);
    if jobs == Some(0) {
        return Err(CliError::Config("jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let base = opts.config.parent().unwrap_or(Path::new("."));

    match cmd {
        Command::MapSd => map_sd_command(&cfg, base, out.as_deref()),
        Command::Eqcheck => {
            let table = eqcheck(&cfg)?;
            emit(&table, format, out.as_deref())?;
            Ok(0)
        }
        Command::Maser | Command::Set | Command::Sweep => {
            let maser_run = match cmd {
                Command::Maser => true,
                Command::Set => false,
                _ => match (&cfg.maser, &cfg.set) {
                    (Some(_), None) => true,
                    (None, Some(_)) => false,
                    _ => return Err(CliError::Config("`sweep` needs exactly one of [maser] or [set]".into())),
                },
            };
            if cmd == Command::Sweep && cfg.sweep.is_none() {
                return Err(CliError::Config("`sweep` needs a [sweep] section".into()));
            }
            let table = pool.install(|| {
                if maser_run {
                    maser_table(&cfg, opts.mode)
                } else {
                    set_table(&cfg, opts.mode)
                }
            })?;
            emit(&table, format, out.as_deref())?;
            let err = table.column("error").expect("sweep tables carry an error column");
            Ok(table.rows.iter().filter(|r| r[err] != Cell::Empty).count())
        }
    }
}

fn emit(table: &Table, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(format, &mut w)?;
            w.flush().map_err(|e| CliError::Io(e.to_string()))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(format, &mut lock)
        }
    }
}

fn invalid(e: rcthermo::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn maser_models(sweep: Option<&SweepConfig>, mode: Option<ModeArg>) -> Vec<Model> {
    match mode {
        Some(ModeArg::Bare) => vec![Model::Bare],
        Some(ModeArg::Secular) => vec![Model::RcSecular],
        Some(ModeArg::Nonsecular) => vec![Model::RcNonSecular],
        None => sweep
            .and_then(|s| s.models.clone())
            .unwrap_or_else(|| vec![Model::Bare, Model::RcSecular, Model::RcNonSecular]),
    }
}

/// One row per grid value. Flows are in units of `Γh ω0`.
fn maser_table(cfg: &RunConfig, mode: Option<ModeArg>) -> Result<Table, CliError> {
    let p = cfg
        .maser
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [maser] section".into()))?;
    p.validate().map_err(invalid)?;
    let sweep = cfg.sweep.as_ref();
    let axis = sweep.map_or(Axis::Delta21, |s| s.axis);
    let axis = axis
        .maser_axis()
        .ok_or_else(|| CliError::Config("the maser sweeps over delta21, gamma or d0".into()))?;
    let grid = match sweep {
        Some(s) => s.grid()?,
        None => vec![p.delta21() / p.omega0],
    };
    let models = maser_models(sweep, mode);
    if models.is_empty() {
        return Err(CliError::Config("sweep.models is empty".into()));
    }
    let gate = sweep.is_some_and(|s| s.gate);
    let tol = cfg.tolerances.truncation;
    let points: Vec<MaserParams<f64>> = grid.iter().map(|&v| axis.apply(p, v)).collect();
    for q in &points {
        q.validate().map_err(invalid)?;
    }

    let mut columns = vec![axis.name().to_string(), "eta_otto".into(), "eta_bound".into()];
    for m in &models {
        for c in ["eta", "w", "qh", "qc", "sdot", "first_law"] {
            columns.push(format!("{c}_{}", m.name()));
        }
        if gate {
            columns.push(format!("gate_{}", m.name()));
        }
    }
    columns.push("error".into());

    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .zip(grid.par_iter())
        .map(|(q, &v)| {
            let unit = q.gamma_hot * q.omega0;
            let mut row = vec![Cell::Num(v), q.otto_efficiency().into(), q.efficiency_bound().into()];
            let mut errors = Vec::new();
            let mut solved = Vec::new();
            for &m in &models {
                let width = if gate { 7 } else { 6 };
                match maser::solve(q, m) {
                    Ok(pt) => {
                        row.push(pt.efficiency.eta().into());
                        row.push((pt.power / unit).into());
                        row.push((pt.hot / unit).into());
                        row.push((pt.cold / unit).into());
                        row.push(pt.observables.entropy_production.into());
                        row.push(pt.observables.first_law_relative.into());
                        if gate {
                            match maser::truncation_deviation(q, m, &pt) {
                                Ok(d) => {
                                    row.push(d.into());
                                    if !(d <= tol) {
                                        errors.push(format!(
                                            "{}: truncation moved currents by {d:e} under Nc -> Nc + {}",
                                            m.name(),
                                            maser::TRUNCATION_STEP
                                        ));
                                    }
                                }
                                Err(e) => {
                                    row.push(Cell::Empty);
                                    errors.push(format!("{} gate: {e}", m.name()));
                                }
                            }
                        }
                        solved.push((m, pt));
                    }
                    Err(e) => {
                        row.extend(std::iter::repeat_n(Cell::Empty, width));
                        errors.push(format!("{}: {e}", m.name()));
                    }
                }
            }
            warn_secular_breakdown(axis.name(), v, &solved);
            row.push(if errors.is_empty() {
                Cell::Empty
            } else {
                Cell::Text(errors.join("; "))
            });
            row
        })
        .collect();
    Ok(Table { columns, rows })
}

/// Near degeneracies the secular builder misses the coherences; both results
/// are kept and the disagreement is reported.
fn warn_secular_breakdown(axis: &str, v: f64, solved: &[(Model, maser::MaserPoint<f64>)]) {
    let find = |m| solved.iter().find(|(k, _)| *k == m).map(|(_, p)| p);
    if let (Some(s), Some(n)) = (find(Model::RcSecular), find(Model::RcNonSecular)) {
        let ratio = s.power / n.power;
        if !(ratio > 0.9 && ratio < 1.1) {
            eprintln!("warning: {axis} = {v:e}: secular power is {ratio:e} times the non-secular power");
        }
    }
}

/// Columns follow the figure normalizations: `V/Ω1`, `I_M/Γ`, `I_E/(ΓΩ1)`, `P/(ΓΩ1)`.
fn set_table(cfg: &RunConfig, mode: Option<ModeArg>) -> Result<Table, CliError> {
    let p = cfg
        .set
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [set] section".into()))?;
    p.validate().map_err(invalid)?;
    if matches!(mode, Some(ModeArg::Bare | ModeArg::Nonsecular)) {
        return Err(CliError::Config("the transistor is solved with the secular rate equation only".into()));
    }
    let grid = match cfg.sweep.as_ref() {
        Some(s) if s.axis != Axis::Bias => {
            return Err(CliError::Config("the transistor sweeps over bias".into()));
        }
        Some(s) => s.grid()?,
        None => vec![p.bias() / p.omega1],
    };
    let columns = [
        "v_over_omega1",
        "i_m_over_gamma",
        "i_e_over_gamma_omega1",
        "p_over_gamma_omega1",
        "eta",
        "eta_over_carnot",
        "sdot",
        "first_law",
        "error",
    ]
    .map(String::from)
    .to_vec();
    let gamma = p.gamma_left;
    let rows = grid
        .par_iter()
        .map(|&v| {
            let q: SetParams<f64> = p.with_bias(v * p.omega1);
            let mut row = vec![Cell::Num(v)];
            match set_vibrations::solve(&q) {
                Ok(pt) => {
                    let (eta, rel) = match pt.efficiency {
                        Efficiency::Engine { eta, carnot } => (Some(eta), Some(eta / carnot)),
                        Efficiency::NotAnEngine => (None, None),
                    };
                    row.push((pt.matter / gamma).into());
                    row.push((pt.phonon_energy / (gamma * q.omega1)).into());
                    row.push((pt.power / (gamma * q.omega1)).into());
                    row.push(eta.into());
                    row.push(rel.into());
                    row.push(pt.observables.entropy_production.into());
                    row.push(pt.observables.first_law_relative.into());
                    row.push(Cell::Empty);
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(Cell::Empty, 7));
                    row.push(Cell::Text(e.to_string()));
                }
            }
            row
        })
        .collect();
    Ok(Table { columns, rows })
}

fn eqcheck(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg
        .maser
        .as_ref()
        .ok_or_else(|| CliError::Config("eqcheck needs a [maser] section".into()))?;
    p.validate().map_err(invalid)?;
    let b = cfg.eqcheck.as_ref().map_or(1.0, |e| e.beta_omega0);
    if !(b > 0.0 && b.is_finite()) {
        return Err(CliError::Config("eqcheck.beta_omega0 must be positive".into()));
    }
    let c = maser_equilibrium(p, b / p.omega0).map_err(invalid)?;
    let mut columns: Vec<String> = ["beta_omega0", "reduced_vs_canonical", "reduced_vs_steady", "canonical_vs_steady"]
        .map(String::from)
        .to_vec();
    let mut row: Vec<Cell> = vec![
        b.into(),
        c.reduced_vs_canonical.into(),
        c.reduced_vs_steady.into(),
        c.canonical_vs_steady.into(),
    ];
    let steady = c.steady.as_ref().expect("maser check supplies a steady state");
    for (name, rho) in [("reduced", &c.reduced), ("canonical", &c.canonical), ("steady", steady)] {
        for k in 0..rho.nrows() {
            columns.push(format!("{name}_p{k}"));
            row.push(rho[(k, k)].re.into());
        }
    }
    Ok(Table {
        columns,
        rows: vec![row],
    })
}

fn map_sd_command(cfg: &RunConfig, base: &Path, out: Option<&Path>) -> Result<Failures, CliError> {
    let m = cfg
        .map_sd
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [map_sd] section".into()))?;
    let sd = match (&m.sd, &m.csv) {
        (Some(sd), None) => sd.clone(),
        (None, Some(path)) => {
            let path = base.join(path);
            let text =
                std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            SpectralDensity::Tabulated(SdTable::from_csv(&text).map_err(invalid)?)
        }
        _ => return Err(CliError::Config("map_sd needs exactly one of `sd` or `csv`".into())),
    };
    sd.validate().map_err(invalid)?;
    let grid = m.grid.unwrap_or_default();
    let dir = out.ok_or_else(|| CliError::Config("map-sd writes a directory; pass --out".into()))?;
    let rc = rc_parameters(&sd, &grid).map_err(invalid)?;
    let SpectralDensity::Tabulated(j1) = &rc.residual else {
        unreachable!("mapping returns a table")
    };
    let j0 = SdTable::new(j1.omega().to_vec(), j1.omega().iter().map(|&w| sd.eval(w)).collect()).map_err(invalid)?;

    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    };
    write("j0.csv", j0.to_csv())?;
    write("j1.csv", j1.to_csv())?;
    let doc = serde_json::json!({
        "family": sd.family_name(),
        "delta_omega0_sq": rc.params.delta_omega0_sq,
        "lambda0_sq": rc.params.lambda0_sq,
        "omega1_sq": rc.params.omega1_sq,
        "delta_omega1_sq": rc.params.delta_omega1_sq,
        "rc_frequency": rc.params.rc_frequency(),
        "renormalization_mismatch": rc.params.renormalization_mismatch(),
        "grid_points": j1.len(),
    });
    write(
        "rc_parameters.json",
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))? + "\n",
    )?;
    Ok(0)
}
