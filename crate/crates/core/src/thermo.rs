//! Steady-state currents, entropy production and efficiencies.
//!
//! Sign convention: every current is positive when it flows *into* the
//! supersystem. Heat from reservoir ν is `Q = I_E − μ I_M`; a negative power
//! means work is extracted.

use serde::Serialize;

use crate::dword::DWord;
use crate::error::{Error, Result};
use crate::generators::{Block, GeneratorBundle, SteadyState};
use crate::quantum_ops::{eig_hermitian, HermitianBasis};
use crate::scalar::{cplx, Real};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReservoirCurrents<T> {
    pub label: String,
    pub beta: T,
    pub mu: T,
    /// Energy current `I_E`.
    pub energy: T,
    /// Matter current `I_M`.
    pub matter: T,
    /// Heat current `I_E − μ I_M`.
    pub heat: T,
}

/// Per-reservoir currents at the given state.
pub fn currents<T: Real>(bundle: &GeneratorBundle<T>, state: &SteadyState<T>) -> Vec<ReservoirCurrents<T>> {
    let n = bundle.dim();
    let e0 = bundle.energies()[0];
    let energy: Vec<T> = bundle.energies().iter().map(|&e| e - e0).collect();
    let number = bundle.number_diag();
    let number_coords = bundle
        .number
        .as_ref()
        .map(|op| HermitianBasis::new(n).coords(op));
    bundle
        .blocks
        .iter()
        .map(|b| {
            let (ie, im) = match &b.block {
                Block::Rates(w) => {
                    // Pairwise net flows in double-word arithmetic: near
                    // equilibrium they are many orders below the gross flows.
                    let p = |k: usize| DWord::new(state.coords[k], state.coords_lo[k]);
                    let (mut ie, mut im) = (DWord::zero(), DWord::zero());
                    for l in 0..n {
                        for k in l + 1..n {
                            let net = p(l).mul(w[(k, l)]).sub(p(k).mul(w[(l, k)]));
                            ie = ie.add(net.mul(energy[k] - energy[l]));
                            im = im.add(net.mul(number[k] - number[l]));
                        }
                    }
                    (ie.value(), im.value())
                }
                Block::Superop(m) => {
                    let x = |k: usize| DWord::new(state.coords[k], state.coords_lo[k]);
                    let row = |a: usize| {
                        (0..m.ncols()).fold(DWord::zero(), |r, k| r.add(x(k).mul(m[(a, k)])))
                    };
                    let ie = (0..n).fold(DWord::zero(), |s, a| s.add(row(a).mul(energy[a])));
                    let im = match &number_coords {
                        Some(nc) => (0..m.nrows())
                            .filter(|&a| nc[a] != T::zero())
                            .fold(DWord::zero(), |s, a| s.add(row(a).mul(nc[a]))),
                        None => DWord::zero(),
                    };
                    (ie.value(), im.value())
                }
            };
            ReservoirCurrents {
                label: b.label.clone(),
                beta: b.beta,
                mu: b.mu,
                energy: ie,
                matter: im,
                heat: ie - b.mu * im,
            }
        })
        .collect()
}

/// `−Σ_ν β_ν Q_ν` at steady state.
pub fn entropy_production<T: Real>(currents: &[ReservoirCurrents<T>]) -> T {
    currents
        .iter()
        .fold(T::zero(), |s, c| s - c.beta * c.heat)
}

/// `|Σ_ν I_E^ν|`, which equals `|Ẇ + Σ_ν Q_ν|` with chemical work `Ẇ = Σ_ν μ_ν I_M^ν`.
pub fn first_law_residual<T: Real>(currents: &[ReservoirCurrents<T>]) -> T {
    currents
        .iter()
        .fold(T::zero(), |s, c| s + c.energy)
        .abs()
}

/// Logarithm floor; eigenvalues below it count as exact zeros.
pub const LOG_FLOOR: f64 = 1e-30;

/// Spohn term `−tr{L_ν(ρ) [ln ρ − ln ρ_eq^ν]}` for one reservoir block.
///
/// Rate blocks use the pairwise form
/// `½ Σ_{k≠l} (W_kl p_l − W_lk p_k) ln(W_kl p_l / W_lk p_k)`, which equals the
/// trace form under local detailed balance and is non-negative term by term.
/// The rate ratio is evaluated as `e^{−β(ΔE − μ ΔN)}`.
/// Superoperator blocks use eigendecomposition-based logarithms and return
/// `None` when ρ has eigenvalues at or below the floor.
pub fn spohn<T: Real>(
    bundle: &GeneratorBundle<T>,
    state: &SteadyState<T>,
    index: usize,
) -> Result<Option<T>> {
    let b = &bundle.blocks[index];
    let n = bundle.dim();
    let floor = T::lit(LOG_FLOOR).max(T::tiny());
    match &b.block {
        Block::Rates(w) => {
            let p = &state.coords;
            let e = bundle.energies();
            let number = bundle.number_diag();
            let mut sum = T::zero();
            for l in 0..n {
                for k in l + 1..n {
                    let fwd = w[(k, l)] * p[l];
                    let bwd = w[(l, k)] * p[k];
                    let tiny_flow = (w[(k, l)].abs() + w[(l, k)].abs()) * floor;
                    if fwd <= tiny_flow && bwd <= tiny_flow {
                        continue;
                    }
                    if !(p[l] > T::zero() && p[k] > T::zero()) {
                        return Err(Error::SingularState {
                            eigenvalue: p[l].min(p[k]).as_f64(),
                        });
                    }
                    // ln(W_kl p_l / W_lk p_k) with the rate ratio taken from
                    // local detailed balance, so underflowed rates stay finite.
                    let de = e[k] - e[l] - b.mu * (number[k] - number[l]);
                    let affinity = -b.beta * de + (p[l] / p[k]).ln();
                    sum += (fwd - bwd) * affinity;
                }
            }
            Ok(Some(sum))
        }
        Block::Superop(m) => {
            let es = eig_hermitian(&state.rho_eigen)?;
            if es.energies[0] <= floor {
                return Ok(None);
            }
            let log_rho = es.function(|x| x.ln());
            let number = bundle.number_diag();
            let e0 = bundle.energies()[0];
            let mut log_ratio = log_rho;
            for k in 0..n {
                let log_eq = -b.beta * (bundle.energies()[k] - e0 - b.mu * number[k]);
                log_ratio[(k, k)] -= cplx(log_eq);
            }
            let basis = HermitianBasis::new(n);
            let y = m * &state.coords;
            Ok(Some(-basis.coords(&log_ratio).dot(&y)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Efficiency<T> {
    Engine { eta: T, carnot: T },
    NotAnEngine,
}

impl<T: Real> Efficiency<T> {
    pub fn eta(&self) -> Option<T> {
        match *self {
            Efficiency::Engine { eta, .. } => Some(eta),
            Efficiency::NotAnEngine => None,
        }
    }
}

/// `η = −Ẇ/Q_h` when power is extracted (`Ẇ < 0`) and heat enters from the hot bath.
pub fn maser_efficiency<T: Real>(power: T, hot_heat: T, beta_hot: T, beta_cold: T) -> Efficiency<T> {
    if power < T::zero() && hot_heat > T::zero() {
        Efficiency::Engine {
            eta: -power / hot_heat,
            carnot: T::one() - beta_hot / beta_cold,
        }
    } else {
        Efficiency::NotAnEngine
    }
}

/// Upper bound `(β_c − β_h)/(β_c − β_w)` on the maser efficiency at finite `β_w`.
pub fn maser_bound<T: Real>(beta_hot: T, beta_cold: T, beta_work: T) -> T {
    (beta_cold - beta_hot) / (beta_cold - beta_work)
}

/// `η = P/I_E` with electrical power `P = −(μ_L − μ_R) I_M` and `I_E` the
/// energy drawn from the hot reservoir; defined only while `P > 0`.
pub fn thermoelectric_efficiency<T: Real>(
    power: T,
    hot_energy: T,
    beta_hot: T,
    beta_cold: T,
) -> Efficiency<T> {
    if power > T::zero() && hot_energy > T::zero() {
        Efficiency::Engine {
            eta: power / hot_energy,
            carnot: T::one() - beta_hot / beta_cold,
        }
    } else {
        Efficiency::NotAnEngine
    }
}

/// Law-closure diagnostics for one steady state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables<T> {
    pub currents: Vec<ReservoirCurrents<T>>,
    pub entropy_production: T,
    pub first_law_residual: T,
    /// `first_law_residual / max(max_ν |Q_ν|, ε·turnover)`, where the
    /// turnover bounds the one-way energy flow of any block.
    pub first_law_relative: T,
    pub spohn: Vec<Option<T>>,
    pub min_eigenvalue: T,
    pub solver_residual: T,
}

impl<T: Real> Observables<T> {
    pub fn current(&self, label: &str) -> Option<&ReservoirCurrents<T>> {
        self.currents.iter().find(|c| c.label == label)
    }

    pub fn heat(&self, label: &str) -> T {
        self.current(label).map(|c| c.heat).unwrap_or_else(T::zero)
    }
}

/// `max_ν max|E − E0| · ‖L_ν‖_∞ · ‖x‖_∞`.
fn energy_turnover<T: Real>(bundle: &GeneratorBundle<T>, state: &SteadyState<T>) -> T {
    let e0 = bundle.energies()[0];
    let emax = bundle.energies().iter().fold(T::zero(), |m, &e| m.max((e - e0).abs()));
    let xmax = state.coords.amax();
    bundle
        .blocks
        .iter()
        .map(|b| {
            let m = match &b.block {
                Block::Rates(w) => w,
                Block::Superop(m) => m,
            };
            let row = m
                .row_iter()
                .map(|r| r.iter().fold(T::zero(), |s, v| s + v.abs()))
                .fold(T::zero(), |a, c| a.max(c));
            emax * row * xmax
        })
        .fold(T::zero(), |a, c| a.max(c))
}

pub fn observables<T: Real>(bundle: &GeneratorBundle<T>, state: &SteadyState<T>) -> Result<Observables<T>> {
    let currents = currents(bundle, state);
    let first_law_residual = first_law_residual(&currents);
    let qmax = currents
        .iter()
        .fold(T::zero(), |m, c| m.max(c.heat.abs()).max(c.energy.abs()))
        .max(T::eps() * energy_turnover(bundle, state));
    let first_law_relative = if qmax > T::zero() {
        first_law_residual / qmax
    } else {
        T::zero()
    };
    let spohn = (0..bundle.blocks.len())
        .map(|i| spohn(bundle, state, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Observables {
        entropy_production: entropy_production(&currents),
        currents,
        first_law_residual,
        first_law_relative,
        spohn,
        min_eigenvalue: state.min_eigenvalue,
        solver_residual: state.residual,
    })
}
