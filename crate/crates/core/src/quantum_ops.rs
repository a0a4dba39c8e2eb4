//! Dense operator algebra on small composite Hilbert spaces.
//!
//! Superoperators act on column-stacked vectors: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
//! For Hermiticity-preserving maps we also use a real representation in the
//! orthonormal Hermitian basis `{E_ii, (E_ij + E_ji)/√2, i(E_ij − E_ji)/√2}`,
//! which halves memory and keeps steady-state solves in real arithmetic.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{cplx, Cplx, Real};

pub type OperatorMatrix<T> = DMatrix<Cplx<T>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Discrete(usize),
    Oscillator(usize),
}

impl Factor {
    pub fn dim(self) -> usize {
        match self {
            Factor::Discrete(n) | Factor::Oscillator(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
}

impl HilbertSpace {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("empty Hilbert space".into()));
        }
        for f in &factors {
            match *f {
                Factor::Discrete(0) => {
                    return Err(Error::InvalidParameter("discrete factor of dimension 0".into()))
                }
                Factor::Oscillator(n) if n < 2 => {
                    return Err(Error::InvalidParameter(format!(
                        "oscillator truncation must be at least 2, got {n}"
                    )))
                }
                _ => {}
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).product()
    }

    /// Places `op` on factor `index`, identity elsewhere, in the listed order.
    pub fn embed<T: Real>(&self, op: &OperatorMatrix<T>, index: usize) -> Result<OperatorMatrix<T>> {
        let f = self
            .factors
            .get(index)
            .ok_or_else(|| Error::InvalidParameter(format!("no factor {index}")))?;
        if op.nrows() != f.dim() || op.ncols() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                found: op.nrows(),
            });
        }
        let left: usize = self.factors[..index].iter().map(|f| f.dim()).product();
        let right: usize = self.factors[index + 1..].iter().map(|f| f.dim()).product();
        let out = identity::<T>(left).kronecker(op);
        Ok(out.kronecker(&identity::<T>(right)))
    }

    /// Traces out every factor except `keep`.
    pub fn partial_trace<T: Real>(
        &self,
        rho: &OperatorMatrix<T>,
        keep: usize,
    ) -> Result<OperatorMatrix<T>> {
        if rho.nrows() != self.dim() || rho.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.nrows(),
            });
        }
        let d = self.factors[keep].dim();
        let left: usize = self.factors[..keep].iter().map(|f| f.dim()).product();
        let right: usize = self.factors[keep + 1..].iter().map(|f| f.dim()).product();
        let idx = |l: usize, i: usize, r: usize| (l * d + i) * right + r;
        Ok(DMatrix::from_fn(d, d, |i, j| {
            let mut s = Cplx::new(T::zero(), T::zero());
            for l in 0..left {
                for r in 0..right {
                    s += rho[(idx(l, i, r), idx(l, j, r))];
                }
            }
            s
        }))
    }
}

pub fn identity<T: Real>(n: usize) -> OperatorMatrix<T> {
    DMatrix::identity(n, n)
}

/// `|i⟩⟨j|` on an `n`-dimensional space.
pub fn ket_bra<T: Real>(n: usize, i: usize, j: usize) -> OperatorMatrix<T> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = cplx(T::one());
    m
}

pub fn from_real<T: Real>(m: &DMatrix<T>) -> OperatorMatrix<T> {
    m.map(cplx)
}

pub fn max_abs<T: Real>(m: &OperatorMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// Truncated oscillator `{a, a†, X, P}` with `X = (a + a†)/√(2Ω)` and
/// `P = i√(Ω/2)(a† − a)`.
#[derive(Debug, Clone)]
pub struct OscillatorOps<T: Real> {
    pub a: OperatorMatrix<T>,
    pub a_dag: OperatorMatrix<T>,
    pub x: OperatorMatrix<T>,
    pub p: OperatorMatrix<T>,
    pub number: OperatorMatrix<T>,
}

pub fn oscillator_ops<T: Real>(nc: usize, omega: T) -> Result<OscillatorOps<T>> {
    if nc < 2 {
        return Err(Error::InvalidParameter(format!(
            "oscillator truncation must be at least 2, got {nc}"
        )));
    }
    if !(omega > T::zero()) {
        return Err(Error::InvalidParameter("oscillator frequency must be positive".into()));
    }
    let mut a = DMatrix::zeros(nc, nc);
    for m in 1..nc {
        a[(m - 1, m)] = cplx(T::from_count(m).sqrt());
    }
    let a_dag = a.adjoint();
    let x = (&a + &a_dag) * cplx((T::lit(2.0) * omega).sqrt().recip());
    let p = (&a_dag - &a) * Cplx::new(T::zero(), (omega / T::lit(2.0)).sqrt());
    let number = DMatrix::from_fn(nc, nc, |i, j| {
        if i == j {
            cplx(T::from_count(i))
        } else {
            cplx(T::zero())
        }
    });
    Ok(OscillatorOps {
        a,
        a_dag,
        x,
        p,
        number,
    })
}

/// Checks `‖A − A†‖_max ≤ 1e-12 max(1, ‖A‖_max)` and returns the exactly
/// symmetrized operator.
pub fn hermitian<T: Real>(op: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    if op.nrows() != op.ncols() {
        return Err(Error::DimensionMismatch {
            expected: op.nrows(),
            found: op.ncols(),
        });
    }
    let dev = max_abs(&(op - op.adjoint()));
    let tol = T::lit(1e-12).max(T::eps() * T::lit(64.0)) * max_abs(op).max(T::one());
    if dev > tol {
        return Err(Error::NotHermitian {
            deviation: dev.as_f64(),
        });
    }
    Ok((op + op.adjoint()) * cplx(T::lit(0.5)))
}

#[derive(Debug, Clone)]
pub struct EigenSystem<T: Real> {
    /// Ascending eigenvalues.
    pub energies: Vec<T>,
    /// Columns are the eigenvectors, in the order of `energies`.
    pub vectors: OperatorMatrix<T>,
    /// `degenerate[k]` flags the gap between levels `k` and `k + 1`.
    pub degenerate: Vec<bool>,
}

impl<T: Real> EigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn first_degeneracy(&self) -> Option<usize> {
        self.degenerate.iter().position(|&d| d)
    }

    /// `V† A V`.
    pub fn to_eigenbasis(&self, op: &OperatorMatrix<T>) -> OperatorMatrix<T> {
        self.vectors.adjoint() * op * &self.vectors
    }

    /// `V A V†`.
    pub fn from_eigenbasis(&self, op: &OperatorMatrix<T>) -> OperatorMatrix<T> {
        &self.vectors * op * self.vectors.adjoint()
    }

    /// Applies `f` to the eigenvalues and returns `V f(E) V†`.
    pub fn function(&self, f: impl Fn(T) -> T) -> OperatorMatrix<T> {
        let n = self.dim();
        let diag = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                cplx(f(self.energies[i]))
            } else {
                cplx(T::zero())
            }
        });
        self.from_eigenbasis(&diag)
    }
}

/// Relative gap below which two eigenvalues are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

pub fn eig_hermitian<T: Real>(h: &OperatorMatrix<T>) -> Result<EigenSystem<T>> {
    let h = hermitian(h)?;
    let n = h.nrows();
    let norm = max_abs(&h);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let energies: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        // Fix the phase so the largest component is real and positive;
        // makes outputs reproducible across platforms.
        let col = eig.eigenvectors.column(i);
        let (kmax, _) = col
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bk, bv), (k, z)| {
                if z.modulus() > bv + T::eps() {
                    (k, z.modulus())
                } else {
                    (bk, bv)
                }
            });
        let phase = col[kmax] / cplx(col[kmax].modulus());
        vectors.set_column(c, &(col / phase));
    }
    let tol = T::lit(DEGENERACY_TOL) * norm.max(T::tiny());
    let degenerate = energies.windows(2).map(|w| w[1] - w[0] < tol).collect();
    Ok(EigenSystem {
        energies,
        vectors,
        degenerate,
    })
}

/// Thermal state `e^{−βH}/Z`.
pub fn gibbs_state<T: Real>(h: &OperatorMatrix<T>, beta: T) -> Result<OperatorMatrix<T>> {
    let es = eig_hermitian(h)?;
    let e0 = es.energies[0];
    let z: T = es
        .energies
        .iter()
        .fold(T::zero(), |s, &e| s + (-(beta * (e - e0))).exp());
    Ok(es.function(|e| (-(beta * (e - e0))).exp() / z))
}

/// Column-stacking vectorization.
pub fn vectorize<T: Real>(m: &OperatorMatrix<T>) -> DVector<Cplx<T>> {
    DVector::from_column_slice(m.as_slice())
}

pub fn devectorize<T: Real>(v: &DVector<Cplx<T>>) -> Result<OperatorMatrix<T>> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: v.len(),
        });
    }
    Ok(DMatrix::from_column_slice(n, n, v.as_slice()))
}

/// Matrix of `X ↦ A X B` on column-stacked vectors.
pub fn sandwich_superop<T: Real>(a: &OperatorMatrix<T>, b: &OperatorMatrix<T>) -> DMatrix<Cplx<T>> {
    b.transpose().kronecker(a)
}

/// Matrix of `X ↦ −i[H, X]`.
pub fn commutator_superop<T: Real>(h: &OperatorMatrix<T>) -> DMatrix<Cplx<T>> {
    let id = identity::<T>(h.nrows());
    let minus_i = Cplx::new(T::zero(), -T::one());
    (sandwich_superop(h, &id) - sandwich_superop(&id, h)) * minus_i
}

/// Orthonormal Hermitian basis of `n × n` matrices.
#[derive(Debug, Clone, Copy)]
pub struct HermitianBasis {
    n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Elem {
    Diag(usize),
    Sym(usize, usize),
    Anti(usize, usize),
}

impl HermitianBasis {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn elem(&self, a: usize) -> Elem {
        let n = self.n;
        if a < n {
            return Elem::Diag(a);
        }
        let k = (a - n) / 2;
        // k enumerates pairs i < j row by row.
        let (mut i, mut rem) = (0, k);
        while rem >= n - 1 - i {
            rem -= n - 1 - i;
            i += 1;
        }
        let j = i + 1 + rem;
        if (a - n) % 2 == 0 {
            Elem::Sym(i, j)
        } else {
            Elem::Anti(i, j)
        }
    }

    /// Index of the first off-diagonal pair `(i, j)`, `i < j`, symmetric part.
    fn pair_index(&self, i: usize, j: usize) -> usize {
        let n = self.n;
        let before: usize = (0..i).map(|r| n - 1 - r).sum();
        n + 2 * (before + (j - i - 1))
    }

    pub fn is_diagonal(&self, a: usize) -> bool {
        a < self.n
    }

    /// Coordinates of a Hermitian matrix.
    pub fn coords<T: Real>(&self, x: &OperatorMatrix<T>) -> DVector<T> {
        let n = self.n;
        let s2 = T::lit(2.0).sqrt();
        let mut v = DVector::zeros(n * n);
        for i in 0..n {
            v[i] = x[(i, i)].re;
            for j in i + 1..n {
                let p = self.pair_index(i, j);
                v[p] = s2 * x[(i, j)].re;
                v[p + 1] = s2 * x[(i, j)].im;
            }
        }
        v
    }

    pub fn matrix<T: Real>(&self, v: &DVector<T>) -> OperatorMatrix<T> {
        let n = self.n;
        let r = T::lit(0.5).sqrt();
        let mut x = DMatrix::zeros(n, n);
        for i in 0..n {
            x[(i, i)] = cplx(v[i]);
            for j in i + 1..n {
                let p = self.pair_index(i, j);
                let z = Cplx::new(v[p] * r, v[p + 1] * r);
                x[(i, j)] = z;
                x[(j, i)] = z.conj();
            }
        }
        x
    }

    fn basis_element<T: Real>(&self, a: usize) -> OperatorMatrix<T> {
        let n = self.n;
        let r = T::lit(0.5).sqrt();
        let mut g = DMatrix::zeros(n, n);
        match self.elem(a) {
            Elem::Diag(i) => g[(i, i)] = cplx(T::one()),
            Elem::Sym(i, j) => {
                g[(i, j)] = cplx(r);
                g[(j, i)] = cplx(r);
            }
            Elem::Anti(i, j) => {
                g[(i, j)] = Cplx::new(T::zero(), r);
                g[(j, i)] = Cplx::new(T::zero(), -r);
            }
        }
        g
    }

    /// Real matrix `M_ab = tr(G_a L(G_b))` of a Hermiticity-preserving map.
    pub fn real_superop<T: Real>(&self, map: impl Fn(&OperatorMatrix<T>) -> OperatorMatrix<T>) -> DMatrix<T> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for b in 0..d {
            let out = map(&self.basis_element(b));
            m.set_column(b, &self.coords(&out));
        }
        m
    }

    /// Real superoperator from a linear map given on matrix units: `f(i, j, z, out)`
    /// must add the image of `z |i⟩⟨j|` to `out`. Costs O(n²) per basis element
    /// when `f` exploits the sparsity of the unit.
    pub fn real_superop_units<T: Real>(
        &self,
        f: impl Fn(usize, usize, Cplx<T>, &mut OperatorMatrix<T>),
    ) -> DMatrix<T> {
        let n = self.n;
        let d = self.dim();
        let r = T::lit(0.5).sqrt();
        let mut m = DMatrix::zeros(d, d);
        let mut out = DMatrix::zeros(n, n);
        for b in 0..d {
            out.fill(Cplx::new(T::zero(), T::zero()));
            match self.elem(b) {
                Elem::Diag(i) => f(i, i, cplx(T::one()), &mut out),
                Elem::Sym(i, j) => {
                    f(i, j, cplx(r), &mut out);
                    f(j, i, cplx(r), &mut out);
                }
                Elem::Anti(i, j) => {
                    f(i, j, Cplx::new(T::zero(), r), &mut out);
                    f(j, i, Cplx::new(T::zero(), -r), &mut out);
                }
            }
            m.set_column(b, &self.coords(&out));
        }
        m
    }

    /// Real representation of a complex column-stacked superoperator matrix.
    pub fn real_from_complex<T: Real>(&self, sup: &DMatrix<Cplx<T>>) -> DMatrix<T> {
        self.real_superop(|g| {
            let v = sup * vectorize(g);
            DMatrix::from_column_slice(self.n, self.n, v.as_slice())
        })
    }
}
