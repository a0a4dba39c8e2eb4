//! Single-electron transistor whose dot occupation couples to a vibrational
//! reaction coordinate.
//!
//! The supersystem `ε̃ d†d + Ω(a†a + ½) − λ d†d (a + a†)` with
//! `λ = λ0/√(2Ω)` is diagonal in the polaron frame, with energies
//! `E_nm = ε̄ n + Ω(m + ½)` and `ε̄ = ε̃ − λ²/Ω`. States are ordered
//! `|n, m⟩ ↦ n·Nc + m`. In that frame the dot annihilator becomes
//! `d D(α)` with `α = λ/Ω`, so electronic jumps carry Franck–Condon weights.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{build_secular, steady_state, GeneratorBundle, LeadSpectrum, ReservoirSpec, SteadyState};
use crate::quantum_ops::OperatorMatrix;
use crate::scalar::{cplx, Real};
use crate::spectral::SpectralDensity;
use crate::thermo::{observables, thermoelectric_efficiency, Efficiency, Observables};

pub const LEFT: &str = "left";
pub const RIGHT: &str = "right";
pub const PHONON: &str = "phonon";

/// Signed displaced-oscillator amplitudes `⟨m′|D(α)|m⟩` for `m, m′ < nc`,
/// with `D(α) = exp[α(a† − a)]` and real `α`.
pub fn displacement_amplitudes<T: Real>(alpha: T, nc: usize) -> DMatrix<T> {
    let x = alpha * alpha;
    let gauss = (-x / T::lit(2.0)).exp();
    DMatrix::from_fn(nc, nc, |mp, m| {
        let (lo, hi) = if mp >= m { (m, mp) } else { (mp, m) };
        let k = hi - lo;
        // sqrt(lo!/hi!) α^k, built incrementally to avoid overflow
        let mut pref = T::one();
        for j in lo + 1..=hi {
            pref *= alpha / T::from_count(j).sqrt();
        }
        let sign = if mp < m && k % 2 == 1 { -T::one() } else { T::one() };
        sign * gauss * pref * laguerre(lo, k, x)
    })
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)` by upward recurrence.
fn laguerre<T: Real>(n: usize, k: usize, x: T) -> T {
    let kk = T::from_count(k);
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() + kk - x;
    for j in 1..n {
        let jj = T::from_count(j);
        let next = ((T::lit(2.0) * jj + T::one() + kk - x) * cur - (jj + kk) * prev) / (jj + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Franck–Condon table `|⟨m′|D(α)|m⟩|²`.
pub fn franck_condon<T: Real>(alpha: T, nc: usize) -> DMatrix<T> {
    displacement_amplitudes(alpha, nc).map(|a| a * a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetParams<T> {
    /// Dot energy `ε̃`, including the static phonon shift.
    pub eps_tilde: T,
    /// RC frequency `Ω1`.
    pub omega1: T,
    /// Dot–RC coupling `λ0`.
    pub lambda0: T,
    pub gamma_left: T,
    pub gamma_right: T,
    pub width_left: T,
    pub width_right: T,
    pub center_left: T,
    pub center_right: T,
    pub beta_left: T,
    pub beta_right: T,
    pub mu_left: T,
    pub mu_right: T,
    /// Residual phonon density `J_ph ω e^{−ω/ωR}`.
    pub j_ph: T,
    pub cutoff: T,
    pub beta_ph: T,
    pub nc: usize,
}

impl SetParams<f64> {
    /// Staircase setup in units of `Ω1 = 1`. The electronic temperature is
    /// not given for this setup; `β_el Ω1 = 20` resolves the steps and
    /// `β_ph Ω1 = 1` populates the excited RC levels that open the inner steps.
    pub fn fig8() -> Self {
        let gamma = 1e-3;
        Self {
            eps_tilde: 0.0,
            omega1: 1.0,
            lambda0: 5f64.sqrt(),
            gamma_left: gamma,
            gamma_right: gamma,
            width_left: 10.0,
            width_right: 10.0,
            center_left: 0.0,
            center_right: 0.0,
            beta_left: 20.0,
            beta_right: 20.0,
            mu_left: 0.0,
            mu_right: 0.0,
            j_ph: 100.0 * gamma,
            cutoff: 10.0,
            beta_ph: 1.0,
            nc: 10,
        }
    }

    /// Thermoelectric setup with lead width `width` (in units of `Ω1 = 1`).
    pub fn fig9(width: f64) -> Self {
        let j_ph = 2e-3;
        Self {
            eps_tilde: 0.0,
            omega1: 1.0,
            lambda0: 1.0,
            gamma_left: j_ph / 2.0,
            gamma_right: j_ph / 2.0,
            width_left: width,
            width_right: width,
            center_left: 5.0,
            center_right: -5.0,
            beta_left: 100.0,
            beta_right: 100.0,
            mu_left: 0.0,
            mu_right: 0.0,
            j_ph,
            cutoff: 10.0,
            beta_ph: 0.01,
            nc: 10,
        }
    }
}

impl<T: Real> SetParams<T> {
    /// `λ = λ0/√(2Ω1)`.
    pub fn lambda(&self) -> T {
        self.lambda0 / (T::lit(2.0) * self.omega1).sqrt()
    }

    /// Displacement `α = λ/Ω1`; `α² = λ0²/(2Ω1³)`.
    pub fn alpha(&self) -> T {
        self.lambda() / self.omega1
    }

    /// Polaron-shifted level `ε̄ = ε̃ − λ²/Ω1`.
    pub fn eps_bar(&self) -> T {
        let l = self.lambda();
        self.eps_tilde - l * l / self.omega1
    }

    pub fn energy(&self, n: usize, m: usize) -> T {
        self.eps_bar() * T::from_count(n) + self.omega1 * (T::from_count(m) + T::lit(0.5))
    }

    /// Symmetric bias split `μ_L = V/2 = −μ_R`.
    pub fn with_bias(&self, v: T) -> Self {
        let mut q = self.clone();
        q.mu_left = v / T::lit(2.0);
        q.mu_right = -v / T::lit(2.0);
        q
    }

    pub fn bias(&self) -> T {
        self.mu_left - self.mu_right
    }

    pub fn left_lead(&self) -> LeadSpectrum<T> {
        LeadSpectrum {
            gamma: self.gamma_left,
            width: self.width_left,
            center: self.center_left,
        }
    }

    pub fn right_lead(&self) -> LeadSpectrum<T> {
        LeadSpectrum {
            gamma: self.gamma_right,
            width: self.width_right,
            center: self.center_right,
        }
    }

    pub fn phonon_sd(&self) -> SpectralDensity<T> {
        SpectralDensity::OhmicExpCutoff {
            coupling: self.j_ph,
            cutoff: self.cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega1", self.omega1),
            ("gamma_left", self.gamma_left),
            ("gamma_right", self.gamma_right),
            ("width_left", self.width_left),
            ("width_right", self.width_right),
            ("beta_left", self.beta_left),
            ("beta_right", self.beta_right),
            ("j_ph", self.j_ph),
            ("cutoff", self.cutoff),
            ("beta_ph", self.beta_ph),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite")));
            }
        }
        let finite = [
            ("eps_tilde", self.eps_tilde),
            ("lambda0", self.lambda0),
            ("center_left", self.center_left),
            ("center_right", self.center_right),
            ("mu_left", self.mu_left),
            ("mu_right", self.mu_right),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if self.nc < 2 {
            return Err(Error::InvalidParameter("nc must be at least 2".into()));
        }
        Ok(())
    }
}

/// Diagonal polaron-frame Hamiltonian.
pub fn polaron_hamiltonian<T: Real>(p: &SetParams<T>) -> OperatorMatrix<T> {
    let nc = p.nc;
    OperatorMatrix::from_fn(2 * nc, 2 * nc, |i, j| {
        if i == j {
            cplx(p.energy(i / nc, i % nc))
        } else {
            cplx(T::zero())
        }
    })
}

/// Dot annihilator in the polaron frame, `⟨0,m′|d D(α)|1,m⟩ = ⟨m′|D(α)|m⟩`,
/// built from the given displacement amplitudes.
pub fn dressed_annihilation<T: Real>(amplitudes: &DMatrix<T>) -> OperatorMatrix<T> {
    let nc = amplitudes.nrows();
    let mut d = OperatorMatrix::zeros(2 * nc, 2 * nc);
    for mp in 0..nc {
        for m in 0..nc {
            d[(mp, nc + m)] = cplx(amplitudes[(mp, m)]);
        }
    }
    d
}

/// Phonon coupling operator. The residual bath acts on `X1 = (a + a†)/√(2Ω1)`
/// with rate `J(ω)[1 + n(ω)] |⟨k|X1|l⟩|²`; the secular builder's position
/// convention carries a factor 2, so `X1/√2` is passed.
pub fn phonon_coupling<T: Real>(p: &SetParams<T>) -> OperatorMatrix<T> {
    let nc = p.nc;
    let scale = T::one() / (T::lit(2.0) * p.omega1.sqrt());
    let mut s = OperatorMatrix::zeros(2 * nc, 2 * nc);
    for n in 0..2 {
        for m in 0..nc - 1 {
            let v = cplx(T::from_count(m + 1).sqrt() * scale);
            s[(n * nc + m + 1, n * nc + m)] = v;
            s[(n * nc + m, n * nc + m + 1)] = v;
        }
    }
    s
}

fn reservoirs<T: Real>(p: &SetParams<T>, amplitudes: &DMatrix<T>) -> Vec<ReservoirSpec<T>> {
    let d = dressed_annihilation(amplitudes);
    vec![
        ReservoirSpec::fermi(LEFT, p.beta_left, p.mu_left, p.left_lead(), d.clone()),
        ReservoirSpec::fermi(RIGHT, p.beta_right, p.mu_right, p.right_lead(), d),
        ReservoirSpec::bose(PHONON, p.beta_ph, p.phonon_sd(), phonon_coupling(p)),
    ]
}

/// Secular rate generator `W = W_L + W_R + W_ph`.
pub fn build_set_generator<T: Real>(p: &SetParams<T>) -> Result<GeneratorBundle<T>> {
    p.validate()?;
    let amps = displacement_amplitudes(p.alpha(), p.nc);
    build_with(p, &amps)
}

fn build_with<T: Real>(p: &SetParams<T>, amps: &DMatrix<T>) -> Result<GeneratorBundle<T>> {
    let mut bundle = build_secular(&polaron_hamiltonian(p), &reservoirs(p, amps))?;
    // The truncated dressed d†d is not a projector; count electrons with n directly.
    let nc = p.nc;
    let occupation = OperatorMatrix::from_fn(2 * nc, 2 * nc, |i, j| {
        cplx(if i == j && i >= nc { T::one() } else { T::zero() })
    });
    bundle.number = Some(bundle.eigen.to_eigenbasis(&occupation));
    Ok(bundle)
}

/// The same generator with the Franck–Condon table forced to the identity:
/// electronic jumps never change the oscillator state.
pub fn build_naive_generator<T: Real>(p: &SetParams<T>) -> Result<GeneratorBundle<T>> {
    p.validate()?;
    build_with(p, &DMatrix::identity(p.nc, p.nc))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetPoint<T> {
    pub bias: T,
    /// Matter current entering from the left lead.
    pub matter: T,
    /// Energy current entering from the phonon bath.
    pub phonon_energy: T,
    /// `P = −(μ_L − μ_R) I_M`.
    pub power: T,
    pub efficiency: Efficiency<T>,
    /// `β_el (μ_L − μ_R) I_M + (β_el − β_ph) I_E`; equals the entropy
    /// production when both leads share `β_el = β_L`.
    pub entropy_decomposition: T,
    pub observables: Observables<T>,
}

pub fn evaluate<T: Real>(
    p: &SetParams<T>,
    bundle: &GeneratorBundle<T>,
    state: &SteadyState<T>,
) -> Result<SetPoint<T>> {
    let obs = observables(bundle, state)?;
    let cur = |label| obs.current(label).expect("SET reservoir present");
    let matter = cur(LEFT).matter;
    let phonon_energy = cur(PHONON).energy;
    let v = p.bias();
    let power = -v * matter;
    Ok(SetPoint {
        bias: v,
        matter,
        phonon_energy,
        power,
        efficiency: thermoelectric_efficiency(power, phonon_energy, p.beta_ph, p.beta_left),
        entropy_decomposition: p.beta_left * v * matter + (p.beta_left - p.beta_ph) * phonon_energy,
        observables: obs,
    })
}

pub fn solve<T: Real>(p: &SetParams<T>) -> Result<SetPoint<T>> {
    let bundle = build_set_generator(p)?;
    let state = steady_state(&bundle)?;
    evaluate(p, &bundle, &state)
}

/// Solves at every bias `V` with `μ_L = V/2 = −μ_R`; failed points are kept inline.
pub fn iv_sweep<T: Real>(p: &SetParams<T>, biases: &[T]) -> Vec<Result<SetPoint<T>>> {
    biases.iter().map(|&v| solve(&p.with_bias(v))).collect()
}
