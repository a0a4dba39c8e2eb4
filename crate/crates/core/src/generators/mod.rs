//! Markovian generators for a supersystem coupled to several reservoirs.
//!
//! Everything is assembled in the eigenbasis of the supersystem Hamiltonian.
//! Secular blocks are Pauli rate matrices; non-secular blocks are real
//! superoperators in the [`HermitianBasis`] representation.

mod kernels;
mod steady;

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::quantum_ops::{eig_hermitian, hermitian, EigenSystem, HermitianBasis, OperatorMatrix};
use crate::scalar::{cplx, Cplx, Real};
use crate::spectral::SpectralDensity;

pub use kernels::{
    bose_coth_kernel, bose_rate_kernel, fermi, fermi_rate_kernels, FermiRates, LeadSpectrum,
};
pub use steady::{steady_state, SteadyState};

/// How a reservoir attaches to the supersystem.
#[derive(Debug, Clone)]
pub enum Coupling<T: Real> {
    /// Bosonic bath coupled through a Hermitian operator `s`.
    Position {
        sd: SpectralDensity<T>,
        op: OperatorMatrix<T>,
    },
    /// Fermionic lead exchanging electrons through the annihilator `d`.
    Tunneling {
        lead: LeadSpectrum<T>,
        annihilation: OperatorMatrix<T>,
    },
}

#[derive(Debug, Clone)]
pub struct ReservoirSpec<T: Real> {
    pub label: String,
    pub beta: T,
    /// Chemical potential; zero for bosonic baths.
    pub mu: T,
    pub coupling: Coupling<T>,
}

impl<T: Real> ReservoirSpec<T> {
    pub fn bose(label: &str, beta: T, sd: SpectralDensity<T>, op: OperatorMatrix<T>) -> Self {
        Self {
            label: label.to_string(),
            beta,
            mu: T::zero(),
            coupling: Coupling::Position { sd, op },
        }
    }

    pub fn fermi(label: &str, beta: T, mu: T, lead: LeadSpectrum<T>, annihilation: OperatorMatrix<T>) -> Self {
        Self {
            label: label.to_string(),
            beta,
            mu,
            coupling: Coupling::Tunneling { lead, annihilation },
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if !(self.beta > T::zero() && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "reservoir {}: inverse temperature must be positive and finite",
                self.label
            )));
        }
        let op = match &self.coupling {
            Coupling::Position { sd, op } => {
                sd.validate()?;
                op
            }
            Coupling::Tunneling { annihilation, .. } => annihilation,
        };
        if op.nrows() != dim || op.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.nrows(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Secular,
    NonSecular,
}

#[derive(Debug, Clone)]
pub enum Block<T: Real> {
    /// `W[k][l]` is the rate `l → k`; columns sum to zero.
    Rates(DMatrix<T>),
    /// Real superoperator on Hermitian-basis coordinates.
    Superop(DMatrix<T>),
}

#[derive(Debug, Clone)]
pub struct ReservoirBlock<T: Real> {
    pub label: String,
    pub beta: T,
    pub mu: T,
    pub block: Block<T>,
}

#[derive(Debug, Clone)]
pub struct GeneratorBundle<T: Real> {
    pub mode: Mode,
    pub hamiltonian: OperatorMatrix<T>,
    pub eigen: EigenSystem<T>,
    /// Particle-number operator in the eigenbasis, when a lead is attached.
    pub number: Option<OperatorMatrix<T>>,
    pub blocks: Vec<ReservoirBlock<T>>,
}

impl<T: Real> GeneratorBundle<T> {
    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    pub fn energies(&self) -> &[T] {
        &self.eigen.energies
    }

    /// Diagonal of the number operator in the eigenbasis (zeros without leads).
    pub fn number_diag(&self) -> Vec<T> {
        match &self.number {
            Some(n) => (0..self.dim()).map(|k| n[(k, k)].re).collect(),
            None => vec![T::zero(); self.dim()],
        }
    }

    pub fn block(&self, label: &str) -> Option<&ReservoirBlock<T>> {
        self.blocks.iter().find(|b| b.label == label)
    }

    /// Sum of all rate blocks (secular mode).
    pub fn total_rates(&self) -> Option<DMatrix<T>> {
        let n = self.dim();
        let mut w = DMatrix::zeros(n, n);
        for b in &self.blocks {
            match &b.block {
                Block::Rates(r) => w += r,
                Block::Superop(_) => return None,
            }
        }
        Some(w)
    }

    /// Full real Liouvillian including the coherent part (non-secular mode).
    pub fn total_superop(&self) -> Option<DMatrix<T>> {
        let mut m = coherent_superop(&self.eigen.energies);
        for b in &self.blocks {
            match &b.block {
                Block::Superop(s) => m += s,
                Block::Rates(_) => return None,
            }
        }
        Some(m)
    }
}

fn number_operator<T: Real>(
    eigen: &EigenSystem<T>,
    reservoirs: &[ReservoirSpec<T>],
) -> Option<OperatorMatrix<T>> {
    reservoirs.iter().find_map(|r| match &r.coupling {
        Coupling::Tunneling { annihilation, .. } => {
            Some(eigen.to_eigenbasis(&(annihilation.adjoint() * annihilation)))
        }
        Coupling::Position { .. } => None,
    })
}

/// Secular Born–Markov generator as per-reservoir Pauli rate matrices.
///
/// Bosonic rates are `2 J(ω)[1 + n(ω)] |⟨k|s|l⟩|²` with `ω = E_l − E_k`,
/// the population limit of the non-secular generator built below.
/// Tunneling rates combine [`fermi_rate_kernels`] with `|⟨k|d†|l⟩|²`
/// (electron in) and `|⟨k|d|l⟩|²` (electron out).
pub fn build_secular<T: Real>(
    h: &OperatorMatrix<T>,
    reservoirs: &[ReservoirSpec<T>],
) -> Result<GeneratorBundle<T>> {
    let hamiltonian = hermitian(h)?;
    let eigen = eig_hermitian(&hamiltonian)?;
    if let Some(k) = eigen.first_degeneracy() {
        return Err(Error::DegenerateSpectrum {
            gap: (eigen.energies[k + 1] - eigen.energies[k]).as_f64(),
            index: k,
            next: k + 1,
        });
    }
    let n = eigen.dim();
    let e = &eigen.energies;
    let mut blocks = Vec::with_capacity(reservoirs.len());
    for r in reservoirs {
        r.validate(n)?;
        let mut w = DMatrix::<T>::zeros(n, n);
        match &r.coupling {
            Coupling::Position { sd, op } => {
                let s = eigen.to_eigenbasis(&hermitian(op)?);
                for l in 0..n {
                    for k in 0..n {
                        let m2 = s[(k, l)].norm_sqr();
                        if k == l || m2 == T::zero() {
                            continue;
                        }
                        w[(k, l)] = T::lit(2.0) * bose_rate_kernel(sd, r.beta, e[l] - e[k])? * m2;
                    }
                }
            }
            Coupling::Tunneling { lead, annihilation } => {
                let d = eigen.to_eigenbasis(annihilation);
                for l in 0..n {
                    for k in 0..n {
                        if k == l {
                            continue;
                        }
                        let kern = fermi_rate_kernels(lead, r.beta, r.mu, e[l] - e[k]);
                        // ⟨k|d†|l⟩ = conj(⟨l|d|k⟩)
                        let inj = d[(l, k)].norm_sqr();
                        let ext = d[(k, l)].norm_sqr();
                        w[(k, l)] = kern.in_rate * inj + kern.out_rate * ext;
                    }
                }
            }
        }
        for l in 0..n {
            let mut col = T::zero();
            for k in 0..n {
                if k != l {
                    col += w[(k, l)];
                }
            }
            w[(l, l)] = -col;
        }
        blocks.push(ReservoirBlock {
            label: r.label.clone(),
            beta: r.beta,
            mu: r.mu,
            block: Block::Rates(w),
        });
    }
    let number = number_operator(&eigen, reservoirs);
    Ok(GeneratorBundle {
        mode: Mode::Secular,
        hamiltonian,
        eigen,
        number,
        blocks,
    })
}

/// Non-secular Born–Markov generator without Lamb shift:
/// `D(ρ) = −[s, [χ, ρ]] + [s, {Θ, ρ}]` with
/// `χ_kl = ½ J(ω_kl) coth(βω_kl/2) s_kl`, `Θ_kl = ½ J(ω_kl) s_kl`, `ω_kl = E_k − E_l`.
pub fn build_nonsecular<T: Real>(
    h: &OperatorMatrix<T>,
    reservoirs: &[ReservoirSpec<T>],
) -> Result<GeneratorBundle<T>> {
    let hamiltonian = hermitian(h)?;
    let eigen = eig_hermitian(&hamiltonian)?;
    let n = eigen.dim();
    let e = &eigen.energies;
    let basis = HermitianBasis::new(n);
    let mut blocks = Vec::with_capacity(reservoirs.len());
    for r in reservoirs {
        r.validate(n)?;
        let (sd, op) = match &r.coupling {
            Coupling::Position { sd, op } => (sd, op),
            Coupling::Tunneling { .. } => {
                return Err(Error::UnsupportedCoupling(format!(
                    "reservoir {} is a fermionic lead; the non-secular builder handles position couplings only",
                    r.label
                )))
            }
        };
        let s = eigen.to_eigenbasis(&hermitian(op)?);
        let s_scale = s.iter().fold(T::zero(), |m, z| m.max(z.modulus()));
        let negligible = s_scale * T::eps() * T::lit(64.0);
        let half = T::lit(0.5);
        let mut chi = DMatrix::<Cplx<T>>::zeros(n, n);
        let mut theta = DMatrix::<Cplx<T>>::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                if s[(k, l)].modulus() <= negligible {
                    continue;
                }
                let w = e[k] - e[l];
                let jc = if k == l {
                    bose_coth_kernel(sd, r.beta, T::zero())?
                } else {
                    bose_coth_kernel(sd, r.beta, w)?
                };
                let j = if k == l { T::zero() } else { sd.eval(w) };
                chi[(k, l)] = s[(k, l)] * cplx(half * jc);
                theta[(k, l)] = s[(k, l)] * cplx(half * j);
            }
        }
        let a = -(&s * &chi) + &s * &theta;
        let b = -(&chi * &s) - &theta * &s;
        let c = &chi + &theta;
        let ee = &chi - &theta;
        // D(X) = A X + X B + S X C + E X S, evaluated on unit matrices c|i⟩⟨j|.
        let sup = basis.real_superop_units(|i, j, z, out: &mut OperatorMatrix<T>| {
            for r in 0..n {
                out[(r, j)] += a[(r, i)] * z;
                out[(i, r)] += z * b[(j, r)];
            }
            for r in 0..n {
                let sz = s[(r, i)] * z;
                let ez = ee[(r, i)] * z;
                for q in 0..n {
                    out[(r, q)] += sz * c[(j, q)] + ez * s[(j, q)];
                }
            }
        });
        blocks.push(ReservoirBlock {
            label: r.label.clone(),
            beta: r.beta,
            mu: r.mu,
            block: Block::Superop(sup),
        });
    }
    let number = number_operator(&eigen, reservoirs);
    Ok(GeneratorBundle {
        mode: Mode::NonSecular,
        hamiltonian,
        eigen,
        number,
        blocks,
    })
}

/// `−i[H, ·]` for diagonal `H = diag(E)` in the real Hermitian basis.
pub fn coherent_superop<T: Real>(energies: &[T]) -> DMatrix<T> {
    let n = energies.len();
    HermitianBasis::new(n).real_superop_units(|i, j, z, out: &mut OperatorMatrix<T>| {
        out[(i, j)] += z * Cplx::new(T::zero(), -(energies[i] - energies[j]));
    })
}

pub fn build<T: Real>(
    mode: Mode,
    h: &OperatorMatrix<T>,
    reservoirs: &[ReservoirSpec<T>],
) -> Result<GeneratorBundle<T>> {
    match mode {
        Mode::Secular => build_secular(h, reservoirs),
        Mode::NonSecular => build_nonsecular(h, reservoirs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_ops::{ket_bra, max_abs};
    use nalgebra::DVector;

    fn three_level() -> (OperatorMatrix<f64>, Vec<ReservoirSpec<f64>>) {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![cplx(0.0), cplx(0.9), cplx(2.1)]));
        let sym = |i, j| (ket_bra::<f64>(3, i, j) + ket_bra(3, j, i)) * cplx(0.5f64.sqrt());
        let sd = |s| SpectralDensity::OhmicHardCutoff {
            slope: s,
            cutoff: 50.0,
        };
        let res = vec![
            ReservoirSpec::bose("h", 0.4, sd(0.01), sym(0, 2)),
            ReservoirSpec::bose("c", 3.0, sd(0.02), sym(1, 2)),
            ReservoirSpec::bose("w", 0.05, sd(0.03), sym(0, 1)),
        ];
        (h, res)
    }

    #[test]
    fn secular_rates_are_stochastic_and_balanced() {
        let (h, res) = three_level();
        let g = build_secular(&h, &res).unwrap();
        for b in &g.blocks {
            let Block::Rates(w) = &b.block else { panic!() };
            for l in 0..3 {
                let col: f64 = (0..3).map(|k| w[(k, l)]).sum();
                assert!(col.abs() < 1e-15);
                for k in 0..3 {
                    if k != l {
                        assert!(w[(k, l)] >= 0.0);
                    }
                }
            }
            let e = g.energies();
            let gibbs = DVector::from_iterator(3, e.iter().map(|&x| (-b.beta * x).exp()));
            let flow = w * &gibbs;
            assert!(flow.amax() < 1e-12 * w.amax());
        }
    }

    #[test]
    fn nonsecular_preserves_trace_and_hermiticity() {
        let (h, res) = three_level();
        let g = build_nonsecular(&h, &res).unwrap();
        let m = g.total_superop().unwrap();
        // Trace functional = sum of diagonal coordinates; must annihilate every column.
        for b in 0..9 {
            let t: f64 = (0..3).map(|a| m[(a, b)]).sum();
            assert!(t.abs() < 1e-15);
        }
    }

    #[test]
    fn nonsecular_populations_reduce_to_secular_rates() {
        let (h, res) = three_level();
        let sec = build_secular(&h, &res).unwrap();
        let non = build_nonsecular(&h, &res).unwrap();
        for (bs, bn) in sec.blocks.iter().zip(&non.blocks) {
            let (Block::Rates(w), Block::Superop(m)) = (&bs.block, &bn.block) else { panic!() };
            for k in 0..3 {
                for l in 0..3 {
                    assert!((w[(k, l)] - m[(k, l)]).abs() < 1e-14, "{} {k}{l}", bs.label);
                }
            }
        }
    }

    #[test]
    fn degenerate_spectrum_is_refused() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![cplx(0.0), cplx(1.0), cplx(1.0)]));
        let (_, res) = three_level();
        assert!(matches!(
            build_secular(&h, &res),
            Err(Error::DegenerateSpectrum { index: 1, .. })
        ));
    }

    #[test]
    fn tunneling_is_unsupported_for_nonsecular() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![cplx(0.0), cplx(1.0)]));
        let lead = LeadSpectrum {
            gamma: 1.0,
            width: 1.0,
            center: 0.0,
        };
        let r = ReservoirSpec::fermi("L", 1.0, 0.0, lead, ket_bra(2, 0, 1));
        assert!(matches!(
            build_nonsecular(&h, &[r]),
            Err(Error::UnsupportedCoupling(_))
        ));
    }

    #[test]
    fn scaling_covariance() {
        let (h, res) = three_level();
        let g = build_nonsecular(&h, &res).unwrap();
        let mut scaled = res.clone();
        if let Coupling::Position { sd, .. } = &mut scaled[1].coupling {
            *sd = sd.scaled(4.0);
        }
        let g2 = build_nonsecular(&h, &scaled).unwrap();
        let (Block::Superop(a), Block::Superop(b)) = (&g.blocks[1].block, &g2.blocks[1].block) else {
            panic!()
        };
        assert!((b - a * 4.0).amax() < 1e-15);
        assert!(max_abs(&g.hamiltonian) > 0.0);
    }
}
