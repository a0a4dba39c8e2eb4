//! Reduced equilibrium of a system strongly coupled to a reaction coordinate.
//!
//! At a single temperature the supersystem relaxes to `e^{−βH'}/Z`; the
//! system then sits in `tr_RC e^{−βH'}/Z`, which differs from the canonical
//! `e^{−βH_S}/Z_S` at finite coupling.

use crate::error::Result;
use crate::generators::{build_secular, steady_state};
use crate::maser::{bare_hamiltonian, rc_model, MaserParams};
use crate::quantum_ops::{eig_hermitian, gibbs_state, HilbertSpace, OperatorMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct ReducedStateComparison<T: Real> {
    /// `tr_RC e^{−βH'}` normalized.
    pub reduced: OperatorMatrix<T>,
    /// `e^{−βH_S}/Z_S`.
    pub canonical: OperatorMatrix<T>,
    /// Partial trace of a solver steady state, when one was supplied.
    pub steady: Option<OperatorMatrix<T>>,
    pub reduced_vs_canonical: T,
    pub reduced_vs_steady: Option<T>,
    pub canonical_vs_steady: Option<T>,
}

/// `½ ‖a − b‖_1` for Hermitian `a`, `b`.
pub fn trace_distance<T: Real>(a: &OperatorMatrix<T>, b: &OperatorMatrix<T>) -> Result<T> {
    let es = eig_hermitian(&(a - b))?;
    Ok(es.energies.iter().fold(T::zero(), |s, e| s + e.abs()) / T::lit(2.0))
}

/// `tr_{others} e^{−βH'} / Z`, keeping factor `keep` of `space`.
pub fn reduced_gibbs<T: Real>(
    h: &OperatorMatrix<T>,
    beta: T,
    space: &HilbertSpace,
    keep: usize,
) -> Result<OperatorMatrix<T>> {
    space.partial_trace(&gibbs_state(h, beta)?, keep)
}

pub fn compare<T: Real>(
    h_super: &OperatorMatrix<T>,
    h_system: &OperatorMatrix<T>,
    beta: T,
    space: &HilbertSpace,
    keep: usize,
    steady_super: Option<&OperatorMatrix<T>>,
) -> Result<ReducedStateComparison<T>> {
    let reduced = reduced_gibbs(h_super, beta, space, keep)?;
    let canonical = gibbs_state(h_system, beta)?;
    let steady = steady_super
        .map(|rho| space.partial_trace(rho, keep))
        .transpose()?;
    let reduced_vs_canonical = trace_distance(&reduced, &canonical)?;
    let (reduced_vs_steady, canonical_vs_steady) = match &steady {
        Some(s) => (
            Some(trace_distance(&reduced, s)?),
            Some(trace_distance(&canonical, s)?),
        ),
        None => (None, None),
    };
    Ok(ReducedStateComparison {
        reduced,
        canonical,
        steady,
        reduced_vs_canonical,
        reduced_vs_steady,
        canonical_vs_steady,
    })
}

/// Equilibrium check on the RC maser with every reservoir at inverse
/// temperature `beta`. The cold bath alone leaves level 0 disconnected, so
/// all three reservoirs are kept; at a common temperature each of them
/// annihilates the same Gibbs state.
pub fn maser_equilibrium<T: Real>(p: &MaserParams<T>, beta: T) -> Result<ReducedStateComparison<T>> {
    let mut q = p.clone();
    q.beta_hot = beta;
    q.beta_cold = beta;
    q.beta_work = beta;
    let m = rc_model(&q)?;
    let bundle = build_secular(&m.hamiltonian, &m.reservoirs)?;
    let state = steady_state(&bundle)?;
    let rho = state.rho(&bundle);
    compare(&m.hamiltonian, &bare_hamiltonian(&q), beta, &m.space, 0, Some(&rho))
}
