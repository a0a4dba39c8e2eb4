//! Three-level maser heat engine, with and without a reaction coordinate on
//! the cold bath.
//!
//! Levels `|0⟩, |1⟩, |2⟩` with energies `0, Δ10, Δ20`. The hot bath drives
//! `0 ↔ 2`, the cold bath `1 ↔ 2` and the work reservoir `0 ↔ 1`, each through
//! `(|i⟩⟨j| + |j⟩⟨i|)/√2`. In the RC model the cold bath is replaced by an
//! oscillator of frequency `Ω = sqrt(λ0²/δΩ0²)` coupled to the residual bath
//! through `X = (a + a†)/√(2Ω)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{self, build_secular, steady_state, GeneratorBundle, Mode, ReservoirSpec, SteadyState};
use crate::quantum_ops::{
    identity, ket_bra, oscillator_ops, Factor, HilbertSpace, OperatorMatrix,
};
use crate::scalar::{cplx, Real};
use crate::spectral::{map_sd, moments, GridSpec, SpectralDensity};
use crate::thermo::{maser_bound, maser_efficiency, observables, Efficiency, Observables};

pub const HOT: &str = "hot";
pub const COLD: &str = "cold";
pub const WORK: &str = "work";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaserParams<T> {
    /// Peak frequency of the cold-bath Lorentzian (also the energy unit of the figures).
    pub omega0: T,
    pub d0: T,
    pub gamma: T,
    /// Hard cutoff shared by the hot and cold densities.
    pub cutoff: T,
    pub delta10: T,
    pub delta20: T,
    pub beta_hot: T,
    pub beta_cold: T,
    pub beta_work: T,
    pub gamma_hot: T,
    pub gamma_work: T,
    /// Oscillator truncation of the RC.
    pub nc: usize,
}

impl MaserParams<f64> {
    /// Cold-bath and temperature parameters of the efficiency-versus-splitting
    /// study, at `Δ21 = delta21_over_omega0 · ω0`.
    pub fn fig5(delta21_over_omega0: f64) -> Self {
        let w0 = 0.17;
        let gamma_hot = 0.001;
        Self {
            omega0: w0,
            d0: 0.0104 * w0 * w0,
            gamma: 0.0176 * w0,
            cutoff: 588.0 * w0,
            delta10: 2.53 * w0,
            delta20: (2.53 + delta21_over_omega0) * w0,
            beta_hot: 0.17 / w0,
            beta_cold: 17.0 / w0,
            beta_work: 0.0017 / w0,
            gamma_hot,
            gamma_work: 20.0 * gamma_hot,
            nc: 12,
        }
    }

    /// Parameters of the `γ` and `d0` sweeps (`Δ20 = 4.12 ω0`).
    pub fn fig6() -> Self {
        Self::fig5(4.12 - 2.53)
    }
}

impl<T: Real> MaserParams<T> {
    pub fn delta21(&self) -> T {
        self.delta20 - self.delta10
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega0", self.omega0),
            ("d0", self.d0),
            ("gamma", self.gamma),
            ("cutoff", self.cutoff),
            ("beta_hot", self.beta_hot),
            ("beta_cold", self.beta_cold),
            ("beta_work", self.beta_work),
            ("gamma_hot", self.gamma_hot),
            ("gamma_work", self.gamma_work),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v:e}")));
            }
        }
        if !(T::zero() < self.delta10 && self.delta10 < self.delta20) {
            return Err(Error::InvalidParameter(
                "level energies must satisfy 0 < delta10 < delta20".into(),
            ));
        }
        if self.delta20 >= self.cutoff {
            return Err(Error::InvalidParameter("delta20 must lie below the cutoff".into()));
        }
        if self.nc < 2 {
            return Err(Error::InvalidParameter("nc must be at least 2".into()));
        }
        Ok(())
    }

    /// Carnot-type bound `(β_c − β_h)/(β_c − β_w)` on the efficiency.
    pub fn efficiency_bound(&self) -> T {
        maser_bound(self.beta_hot, self.beta_cold, self.beta_work)
    }

    pub fn otto_efficiency(&self) -> T {
        self.delta10 / self.delta20
    }

    pub fn hot_sd(&self) -> SpectralDensity<T> {
        SpectralDensity::OhmicHardCutoff {
            slope: self.gamma_hot / self.delta20,
            cutoff: self.cutoff,
        }
    }

    pub fn cold_sd(&self) -> SpectralDensity<T> {
        SpectralDensity::LorentzianHardCutoff {
            d0: self.d0,
            gamma: self.gamma,
            omega0: self.omega0,
            cutoff: self.cutoff,
        }
    }

    pub fn work_sd(&self) -> SpectralDensity<T> {
        SpectralDensity::FlatWork {
            rate: self.gamma_work,
            beta: self.beta_work,
            splitting: self.delta10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Bare three-level system with secular rates.
    Bare,
    RcSecular,
    #[serde(rename = "rc_nonsecular")]
    RcNonSecular,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Bare => "bare",
            Model::RcSecular => "rc_secular",
            Model::RcNonSecular => "rc_nonsecular",
        }
    }
}

/// `(|i⟩⟨j| + |j⟩⟨i|)/√2` on the three levels.
pub fn level_coupling<T: Real>(i: usize, j: usize) -> OperatorMatrix<T> {
    (ket_bra::<T>(3, i, j) + ket_bra(3, j, i)) * cplx(T::lit(0.5).sqrt())
}

pub fn bare_hamiltonian<T: Real>(p: &MaserParams<T>) -> OperatorMatrix<T> {
    ket_bra::<T>(3, 1, 1) * cplx(p.delta10) + ket_bra(3, 2, 2) * cplx(p.delta20)
}

/// Hot, cold and work reservoirs on the bare three-level system.
pub fn bare_reservoirs<T: Real>(p: &MaserParams<T>) -> Vec<ReservoirSpec<T>> {
    vec![
        ReservoirSpec::bose(HOT, p.beta_hot, p.hot_sd(), level_coupling(0, 2)),
        ReservoirSpec::bose(COLD, p.beta_cold, p.cold_sd(), level_coupling(1, 2)),
        ReservoirSpec::bose(WORK, p.beta_work, p.work_sd(), level_coupling(0, 1)),
    ]
}

pub fn build_bare_model<T: Real>(p: &MaserParams<T>) -> Result<GeneratorBundle<T>> {
    p.validate()?;
    build_secular(&bare_hamiltonian(p), &bare_reservoirs(p))
}

/// Reaction-coordinate description of the cold bath.
#[derive(Debug, Clone, PartialEq)]
pub struct ColdRc<T> {
    pub lambda0_sq: T,
    pub delta_omega0_sq: T,
    /// `sqrt(λ0²/δΩ0²)`.
    pub frequency: T,
    pub residual: SpectralDensity<T>,
}

/// Maps the cold Lorentzian onto an RC. The residual density is the ohmic
/// `γω` form when the cutoff is far (`ωR/ω0 > 50`) and the peak underdamped
/// (`4ω0² > γ²`); otherwise it is the numerically mapped table.
pub fn cold_rc<T: Real>(p: &MaserParams<T>) -> Result<ColdRc<T>> {
    let sd = p.cold_sd();
    let m = moments(&sd)?;
    let residual = match sd.lorentzian_residual_approx() {
        Some(approx) if p.cutoff / p.omega0 > T::lit(50.0) => approx,
        _ => map_sd(&sd, &GridSpec::default())?,
    };
    Ok(ColdRc {
        lambda0_sq: m.lambda0_sq,
        delta_omega0_sq: m.delta_omega0_sq,
        frequency: (m.lambda0_sq / m.delta_omega0_sq).sqrt(),
        residual,
    })
}

/// Supersystem on `3 ⊗ Nc`: hot and work unchanged, cold replaced by the RC.
#[derive(Debug, Clone)]
pub struct RcModel<T: Real> {
    pub space: HilbertSpace,
    pub hamiltonian: OperatorMatrix<T>,
    pub reservoirs: Vec<ReservoirSpec<T>>,
    pub rc: ColdRc<T>,
}

pub fn rc_model<T: Real>(p: &MaserParams<T>) -> Result<RcModel<T>> {
    p.validate()?;
    let rc = cold_rc(p)?;
    rc_model_with(p, rc)
}

pub fn rc_model_with<T: Real>(p: &MaserParams<T>, rc: ColdRc<T>) -> Result<RcModel<T>> {
    let space = HilbertSpace::new(vec![Factor::Discrete(3), Factor::Oscillator(p.nc)])?;
    let osc = oscillator_ops(p.nc, rc.frequency)?;
    let shift = rc.delta_omega0_sq / T::lit(4.0);
    let levels = ket_bra::<T>(3, 1, 1) * cplx(p.delta10 + shift) + ket_bra(3, 2, 2) * cplx(p.delta20 + shift);
    let half = identity::<T>(p.nc) * cplx(T::lit(0.5));
    let h_osc = (&osc.number + half) * cplx(rc.frequency);
    let flip = ket_bra::<T>(3, 1, 2) + ket_bra(3, 2, 1);
    let g = rc.lambda0_sq.sqrt() / T::lit(2.0).sqrt();
    let hamiltonian = space.embed(&levels, 0)? + space.embed(&h_osc, 1)?
        - flip.kronecker(&osc.x) * cplx(g);
    let reservoirs = vec![
        ReservoirSpec::bose(HOT, p.beta_hot, p.hot_sd(), space.embed(&level_coupling(0, 2), 0)?),
        ReservoirSpec::bose(COLD, p.beta_cold, rc.residual.clone(), space.embed(&osc.x, 1)?),
        ReservoirSpec::bose(WORK, p.beta_work, p.work_sd(), space.embed(&level_coupling(0, 1), 0)?),
    ];
    Ok(RcModel {
        space,
        hamiltonian,
        reservoirs,
        rc,
    })
}

pub fn build_model<T: Real>(p: &MaserParams<T>, model: Model) -> Result<GeneratorBundle<T>> {
    match model {
        Model::Bare => build_bare_model(p),
        Model::RcSecular | Model::RcNonSecular => {
            let m = rc_model(p)?;
            let mode = if model == Model::RcSecular {
                Mode::Secular
            } else {
                Mode::NonSecular
            };
            generators::build(mode, &m.hamiltonian, &m.reservoirs)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaserPoint<T> {
    pub model: Model,
    /// `Ẇ ≡ Q_w`; negative when the engine delivers power.
    pub power: T,
    pub hot: T,
    pub cold: T,
    pub efficiency: Efficiency<T>,
    pub observables: Observables<T>,
}

pub fn evaluate<T: Real>(
    bundle: &GeneratorBundle<T>,
    state: &SteadyState<T>,
    p: &MaserParams<T>,
    model: Model,
) -> Result<MaserPoint<T>> {
    let obs = observables(bundle, state)?;
    let power = obs.heat(WORK);
    let hot = obs.heat(HOT);
    Ok(MaserPoint {
        model,
        power,
        hot,
        cold: obs.heat(COLD),
        efficiency: maser_efficiency(power, hot, p.beta_hot, p.beta_cold),
        observables: obs,
    })
}

pub fn solve<T: Real>(p: &MaserParams<T>, model: Model) -> Result<MaserPoint<T>> {
    let bundle = build_model(p, model)?;
    let state = steady_state(&bundle)?;
    evaluate(&bundle, &state, p, model)
}

/// Relative tolerance of the truncation gate.
pub const TRUNCATION_TOL: f64 = 5e-3;
pub const TRUNCATION_STEP: usize = 4;

/// Largest change of any heat current under `Nc → Nc + 4`, relative to the
/// largest current at `Nc`.
pub fn truncation_deviation<T: Real>(p: &MaserParams<T>, model: Model, at_nc: &MaserPoint<T>) -> Result<T> {
    if model == Model::Bare {
        return Ok(T::zero());
    }
    let mut bigger = p.clone();
    bigger.nc += TRUNCATION_STEP;
    let q = solve(&bigger, model)?;
    let scale = at_nc.hot.abs().max(at_nc.cold.abs()).max(at_nc.power.abs());
    let dev = [
        (at_nc.hot - q.hot).abs(),
        (at_nc.cold - q.cold).abs(),
        (at_nc.power - q.power).abs(),
    ]
    .into_iter()
    .fold(T::zero(), |m, d| m.max(d));
    Ok(dev / scale.max(T::tiny()))
}

/// Fails when [`truncation_deviation`] exceeds `tol`.
pub fn truncation_gate_with<T: Real>(p: &MaserParams<T>, model: Model, at_nc: &MaserPoint<T>, tol: T) -> Result<T> {
    let dev = truncation_deviation(p, model, at_nc)?;
    if !(dev <= tol) {
        return Err(Error::TruncationTooSmall {
            nc: p.nc,
            step: TRUNCATION_STEP,
            deviation: dev.as_f64(),
        });
    }
    Ok(dev)
}

/// Re-solves at `Nc + 4` and fails if any heat current moves by more than
/// 0.5% of the largest one.
pub fn truncation_gate<T: Real>(p: &MaserParams<T>, model: Model, at_nc: &MaserPoint<T>) -> Result<T> {
    truncation_gate_with(p, model, at_nc, T::lit(TRUNCATION_TOL))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// `Δ21/ω0`, keeping `Δ10` fixed.
    Delta21,
    /// `γ/ω0`.
    Gamma,
    /// `d0/ω0²`.
    D0,
}

impl SweepAxis {
    pub fn apply<T: Real>(self, p: &MaserParams<T>, value: T) -> MaserParams<T> {
        let mut q = p.clone();
        match self {
            SweepAxis::Delta21 => q.delta20 = q.delta10 + value * p.omega0,
            SweepAxis::Gamma => q.gamma = value * p.omega0,
            SweepAxis::D0 => q.d0 = value * p.omega0 * p.omega0,
        }
        q
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Delta21 => "delta21_over_omega0",
            SweepAxis::Gamma => "gamma_over_omega0",
            SweepAxis::D0 => "d0_over_omega0_sq",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_ops::max_abs;

    #[test]
    fn bare_efficiency_is_otto() {
        let p = MaserParams::fig5(1.6);
        let pt = solve(&p, Model::Bare).unwrap();
        let eta = pt.efficiency.eta().expect("engine regime");
        assert!((eta / p.otto_efficiency() - 1.0).abs() < 1e-10, "{eta} vs {} ({pt:?})", p.otto_efficiency());
    }

    #[test]
    fn rc_hamiltonian_is_hermitian_and_decouples() {
        let mut p = MaserParams::fig5(1.6);
        p.nc = 4;
        let m = rc_model(&p).unwrap();
        assert!(max_abs(&(&m.hamiltonian - m.hamiltonian.adjoint())) < 1e-15);
        let rc = ColdRc {
            lambda0_sq: 0.0,
            ..m.rc.clone()
        };
        let d = rc_model_with(&p, rc).unwrap();
        let es = crate::quantum_ops::eig_hermitian(&d.hamiltonian).unwrap();
        let w = m.rc.frequency;
        let shift = m.rc.delta_omega0_sq / 4.0;
        let mut expect: Vec<f64> = Vec::new();
        for (lvl, e) in [(0, 0.0), (1, p.delta10 + shift), (2, p.delta20 + shift)] {
            let _ = lvl;
            for k in 0..4 {
                expect.push(e + w * (k as f64 + 0.5));
            }
        }
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in es.energies.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
