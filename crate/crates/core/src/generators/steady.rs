use nalgebra::{DMatrix, DVector, Dyn, LU};

use super::{coherent_superop, Block, GeneratorBundle, Mode};
use crate::dword::DWord;
use crate::error::{Error, Result};
use crate::quantum_ops::{eig_hermitian, HermitianBasis, OperatorMatrix};
use crate::scalar::{cplx, Real};

#[derive(Debug, Clone)]
pub struct SteadyState<T: Real> {
    /// Density matrix in the eigenbasis of the supersystem Hamiltonian.
    pub rho_eigen: OperatorMatrix<T>,
    /// Real Hermitian-basis coordinates of `rho_eigen`; the first `n` entries
    /// are the populations.
    pub coords: DVector<T>,
    /// Low-order parts of `coords` from a double-word refinement (secular
    /// mode only; zeros otherwise). Net flows near equilibrium need them.
    pub coords_lo: DVector<T>,
    /// `‖L ρ‖_∞ / (‖L‖_∞ ‖ρ‖_∞)`.
    pub residual: T,
    /// Smallest eigenvalue of ρ; negative values flag a non-positive solution.
    pub min_eigenvalue: T,
}

impl<T: Real> SteadyState<T> {
    pub fn populations(&self) -> Vec<T> {
        (0..self.rho_eigen.nrows())
            .map(|k| self.rho_eigen[(k, k)].re)
            .collect()
    }

    /// Density matrix in the original basis.
    pub fn rho(&self, bundle: &GeneratorBundle<T>) -> OperatorMatrix<T> {
        bundle.eigen.from_eigenbasis(&self.rho_eigen)
    }
}

fn residual_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::eps() * T::lit(1e3))
}

pub fn steady_state<T: Real>(bundle: &GeneratorBundle<T>) -> Result<SteadyState<T>> {
    match bundle.mode {
        Mode::Secular => {
            let w = bundle.total_rates().expect("secular bundle holds rate blocks");
            let p = match gth(&w) {
                Some(p) => p,
                None => kernel_vector(&w)?,
            };
            let residual = relative_residual(&w, &p);
            if !(residual <= residual_tol()) {
                return Err(Error::NoConvergence {
                    residual: residual.as_f64(),
                });
            }
            let blocks: Vec<&DMatrix<T>> = bundle
                .blocks
                .iter()
                .filter_map(|b| match &b.block {
                    Block::Rates(r) => Some(r),
                    _ => None,
                })
                .collect();
            let (p, lo) = refine_populations(&w, &blocks, &p);
            let n = p.len();
            let rho_eigen = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    cplx(p[i])
                } else {
                    cplx(T::zero())
                }
            });
            let mut coords = DVector::zeros(n * n);
            coords.rows_mut(0, n).copy_from(&p);
            let mut coords_lo = DVector::zeros(n * n);
            coords_lo.rows_mut(0, n).copy_from(&lo);
            let min_eigenvalue = p.iter().fold(T::one(), |m, &x| m.min(x));
            Ok(SteadyState {
                rho_eigen,
                coords,
                coords_lo,
                residual,
                min_eigenvalue,
            })
        }
        Mode::NonSecular => {
            let m = bundle.total_superop().expect("non-secular bundle holds superoperators");
            let n = bundle.dim();
            let (x, lu) = bordered_solve(&m, n)?;
            let coherent = coherent_superop(&bundle.eigen.energies);
            let mut parts = vec![&coherent];
            parts.extend(bundle.blocks.iter().filter_map(|b| match &b.block {
                Block::Superop(s) => Some(s),
                _ => None,
            }));
            let (x, coords_lo) = refine_coords(&lu, &parts, n, &x);
            let residual = relative_residual(&m, &x);
            if !(residual <= residual_tol()) {
                return Err(Error::NoConvergence {
                    residual: residual.as_f64(),
                });
            }
            let rho_eigen = HermitianBasis::new(n).matrix(&x);
            let min_eigenvalue = eig_hermitian(&rho_eigen)?.energies[0];
            Ok(SteadyState {
                rho_eigen,
                coords: x,
                coords_lo,
                residual,
                min_eigenvalue,
            })
        }
    }
}

fn relative_residual<T: Real>(m: &DMatrix<T>, x: &DVector<T>) -> T {
    let r = m * x;
    let scale = row_norm(m) * x.amax();
    if scale > T::zero() {
        r.amax() / scale
    } else {
        T::zero()
    }
}

fn row_norm<T: Real>(m: &DMatrix<T>) -> T {
    m.row_iter()
        .map(|r| r.iter().fold(T::zero(), |s, v| s + v.abs()))
        .fold(T::zero(), |a, b| a.max(b))
}

/// Grassmann–Taksar–Heyman elimination; subtraction-free, so small
/// populations keep full relative accuracy. Returns `None` when some state
/// cannot reach the states below it (reducible chain).
fn gth<T: Real>(w: &DMatrix<T>) -> Option<DVector<T>> {
    let n = w.nrows();
    // r[(i, j)] = rate i → j
    let mut r = w.transpose();
    for i in 0..n {
        r[(i, i)] = T::zero();
    }
    let mut s = vec![T::zero(); n];
    for k in (1..n).rev() {
        let total: T = (0..k).fold(T::zero(), |acc, j| acc + r[(k, j)]);
        if !(total > T::zero()) {
            return None;
        }
        s[k] = total;
        for i in 0..k {
            let rik = r[(i, k)];
            if rik == T::zero() {
                continue;
            }
            let f = rik / total;
            for j in 0..k {
                if j != i {
                    let rkj = r[(k, j)];
                    r[(i, j)] += f * rkj;
                }
            }
        }
    }
    let mut p = DVector::zeros(n);
    p[0] = T::one();
    for k in 1..n {
        let inflow: T = (0..k).fold(T::zero(), |acc, i| acc + p[i] * r[(i, k)]);
        p[k] = inflow / s[k];
    }
    let norm = p.sum();
    Some(p / norm)
}

/// Mixed-precision iterative refinement of `W p = 0`, `Σ p = 1`. The iterate
/// is kept as `hi + lo` and residuals are evaluated in double-word
/// arithmetic, so ill-conditioned rate matrices (fast and very slow channels
/// side by side) still yield populations accurate to about twice working
/// precision. Refinement stops as soon as corrections stop shrinking.
/// Mixed-precision refinement. The residual is built from per-block pairwise
/// flows rather than the summed matrix, whose diagonal can round away a slow
/// reservoir entirely.
fn refine_populations<T: Real>(
    w: &DMatrix<T>,
    blocks: &[&DMatrix<T>],
    p0: &DVector<T>,
) -> (DVector<T>, DVector<T>) {
    let n = p0.len();
    let mut x: Vec<DWord<T>> = p0.iter().map(|&v| DWord::new(v, T::zero())).collect();
    let mut a = w.clone();
    for c in 0..n {
        a[(0, c)] = T::one();
    }
    let lu = a.lu();
    let mut last: Option<T> = None;
    for _ in 0..8 {
        let mut b = DVector::zeros(n);
        let total = x.iter().fold(DWord::new(-T::one(), T::zero()), |t, &v| t.add(v));
        b[0] = -total.value();
        for k in 1..n {
            let mut r = DWord::zero();
            for b in blocks {
                for l in (0..n).filter(|&l| l != k) {
                    r = r.add(x[l].mul(b[(k, l)])).sub(x[k].mul(b[(l, k)]));
                }
            }
            b[k] = -r.value();
        }
        let Some(d) = lu.solve(&b) else {
            break;
        };
        let size = d.amax();
        if !(size.is_finite() && last.is_none_or(|l| size < l)) {
            break;
        }
        for k in 0..n {
            x[k] = x[k].add(DWord::new(d[k], T::zero()));
        }
        last = Some(size);
        if size <= T::eps() * T::eps() {
            break;
        }
    }
    (
        DVector::from_iterator(n, x.iter().map(|v| v.hi)),
        DVector::from_iterator(n, x.iter().map(|v| v.lo)),
    )
}

/// Mixed-precision refinement of the bordered non-secular solve. Residuals
/// are summed matrix by matrix in double-word arithmetic, so the currents of
/// each block close against the same state.
fn refine_coords<T: Real>(
    lu: &LU<T, Dyn, Dyn>,
    parts: &[&DMatrix<T>],
    n: usize,
    x0: &DVector<T>,
) -> (DVector<T>, DVector<T>) {
    let d = x0.len();
    let mut x: Vec<DWord<T>> = x0.iter().map(|&v| DWord::new(v, T::zero())).collect();
    let rows: Vec<Vec<(usize, T)>> = (0..d)
        .map(|k| {
            parts
                .iter()
                .flat_map(|p| (0..d).map(move |l| (l, p[(k, l)])))
                .filter(|&(_, v)| v != T::zero())
                .collect()
        })
        .collect();
    let mut last: Option<T> = None;
    for _ in 0..8 {
        let mut b = DVector::zeros(d);
        let total = x[..n].iter().fold(DWord::new(-T::one(), T::zero()), |t, &v| t.add(v));
        b[0] = -total.value();
        for k in 1..d {
            let r = rows[k].iter().fold(DWord::zero(), |r, &(l, v)| r.add(x[l].mul(v)));
            b[k] = -r.value();
        }
        let Some(dx) = lu.solve(&b) else {
            break;
        };
        let size = dx.amax();
        if !(size.is_finite() && last.is_none_or(|l| size < l)) {
            break;
        }
        for k in 0..d {
            x[k] = x[k].add(DWord::new(dx[k], T::zero()));
        }
        last = Some(size);
        if size <= T::eps() * T::eps() {
            break;
        }
    }
    (
        DVector::from_iterator(d, x.iter().map(|v| v.hi)),
        DVector::from_iterator(d, x.iter().map(|v| v.lo)),
    )
}

/// Null vector via SVD with an explicit one-dimensional-kernel check.
fn kernel_vector<T: Real>(w: &DMatrix<T>) -> Result<DVector<T>> {
    let n = w.nrows();
    let svd = w.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    let tol = smax * T::eps() * T::from_count(n) * T::lit(100.0);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .expect("finite singular values")
    });
    let nullity = idx
        .iter()
        .filter(|&&i| svd.singular_values[i] <= tol)
        .count();
    if nullity > 1 {
        return Err(Error::DegenerateKernel);
    }
    let v = v_t.row(idx[0]).transpose();
    let sum = v.sum();
    if sum == T::zero() {
        return Err(Error::DegenerateKernel);
    }
    let mut p = v / sum;
    for x in p.iter_mut() {
        if *x < T::zero() && x.abs() <= tol {
            *x = T::zero();
        }
    }
    let norm = p.sum();
    Ok(p / norm)
}

/// Solves `M x = 0`, `tr ρ = 1` by replacing the first population row of the
/// real Liouvillian with the trace functional (that row is redundant because
/// the generator is trace preserving).
fn bordered_solve<T: Real>(m: &DMatrix<T>, n: usize) -> Result<(DVector<T>, LU<T, Dyn, Dyn>)> {
    let d = m.nrows();
    let mut a = m.clone();
    for c in 0..d {
        a[(0, c)] = if c < n { T::one() } else { T::zero() };
    }
    let mut b = DVector::zeros(d);
    b[0] = T::one();
    let lu = a.clone().lu();
    let u = lu.u();
    let (mut umin, mut umax) = (T::max_value().expect("bounded"), T::zero());
    for i in 0..d {
        let v = u[(i, i)].abs();
        umin = umin.min(v);
        umax = umax.max(v);
    }
    if !(umin > umax * T::eps() * T::from_count(d) * T::lit(10.0)) {
        return Err(Error::DegenerateKernel);
    }
    let mut x = lu.solve(&b).ok_or(Error::DegenerateKernel)?;
    // One step of iterative refinement.
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let tr: T = x.rows(0, n).sum();
    Ok((x / tr, lu))
}
