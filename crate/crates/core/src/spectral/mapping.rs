use serde::{Deserialize, Serialize};

use super::{SdTable, SpectralDensity};
use crate::error::{Error, Result};
use crate::quad::Quadrature;
use crate::scalar::Real;

/// Second-order moments of a spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments<T> {
    /// `(2/π) ∫ J(ω)/ω dω`
    pub delta_omega0_sq: T,
    /// `(2/π) ∫ ω J(ω) dω`
    pub lambda0_sq: T,
    /// `(2/(π λ0²)) ∫ ω³ J(ω) dω`
    pub omega1_sq: T,
}

/// Reaction-coordinate parameters of a bath, including the shift of the
/// residual bath that remains after the mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcParameters<T> {
    pub delta_omega0_sq: T,
    pub lambda0_sq: T,
    pub omega1_sq: T,
    pub delta_omega1_sq: T,
}

impl<T: Real> RcParameters<T> {
    pub fn lambda0(&self) -> T {
        self.lambda0_sq.sqrt()
    }

    /// Physical reaction-coordinate frequency `sqrt(λ0²/δΩ0²)`.
    pub fn rc_frequency(&self) -> T {
        (self.lambda0_sq / self.delta_omega0_sq).sqrt()
    }

    /// Relative mismatch of `λ0²/δΩ0² = Ω1² − δΩ1²`.
    pub fn renormalization_mismatch(&self) -> T {
        let lhs = self.lambda0_sq / self.delta_omega0_sq;
        (lhs - (self.omega1_sq - self.delta_omega1_sq)).abs() / lhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactionCoordinate<T> {
    pub params: RcParameters<T>,
    /// Residual spectral density coupling the RC to the rest of the bath.
    pub residual: SpectralDensity<T>,
}

/// Boundary value `W(ω + i0⁺)` of the Cauchy transform of `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyBoundaryValue<T> {
    /// `(2/π) PV ∫ ω' J(ω') / (ω'² − ω²) dω'`
    pub re: T,
    /// `J(ω)`
    pub im: T,
}

/// Frequency grid for tabulating a mapped density.
///
/// A geometric run from `min_ratio·end` to `end` is merged with a uniform
/// cluster of half-width `cluster_halfwidth·γ` around a Lorentzian peak.
/// For a hard cutoff, `edge_fraction` of the geometric points are instead
/// spaced geometrically in the distance to the cutoff, where the mapped
/// density falls off logarithmically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub points: usize,
    pub log_fraction: f64,
    pub min_ratio: f64,
    pub cluster_halfwidth: f64,
    pub edge_fraction: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 4000,
            log_fraction: 0.6,
            min_ratio: 1e-8,
            cluster_halfwidth: 40.0,
            edge_fraction: 0.25,
        }
    }
}

impl GridSpec {
    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn nodes<T: Real>(&self, sd: &SpectralDensity<T>) -> Result<Vec<T>> {
        if self.points < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 8 points, got {}",
                self.points
            )));
        }
        let end = match sd.integration_end() {
            Some(e) => e * (T::one() - T::lit(1e-6)),
            None => {
                return Err(Error::InvalidSpectralDensity(format!(
                    "{} has no finite support to tabulate",
                    sd.family_name()
                )))
            }
        };
        let cluster = match *sd {
            SpectralDensity::LorentzianHardCutoff { gamma, omega0, .. } => {
                let hw = gamma * T::lit(self.cluster_halfwidth);
                let lo = (omega0 - hw).max(end * T::lit(1e-6));
                let hi = (omega0 + hw).min(end * T::lit(0.999));
                (hi > lo).then_some((lo, hi))
            }
            _ => None,
        };
        let n_log = match cluster {
            Some(_) => ((self.points as f64) * self.log_fraction).round() as usize,
            None => self.points,
        };
        let n_lin = self.points - n_log;
        let n_edge = match sd.support_end() {
            Some(_) => ((n_log as f64) * self.edge_fraction).round() as usize,
            None => 0,
        };
        let n_log = n_log - n_edge;

        let mut nodes = Vec::with_capacity(self.points + 16);
        let start = end * T::lit(self.min_ratio);
        let ratio = (end / start).ln();
        for i in 0..n_log {
            let s = T::from_count(i) / T::from_count(n_log - 1);
            nodes.push(start * (ratio * s).exp());
        }
        if n_edge >= 2 {
            let near = end * T::lit(1e-9);
            let far = end * T::lit(0.5);
            let span = (far / near).ln();
            for i in 0..n_edge {
                let s = T::from_count(i) / T::from_count(n_edge - 1);
                nodes.push(end - near * (span * s).exp());
            }
        }
        if let Some((lo, hi)) = cluster {
            for i in 0..n_lin {
                let s = T::from_count(i) / T::from_count(n_lin.max(2) - 1);
                nodes.push(lo + (hi - lo) * s);
            }
        }
        nodes.extend(sd.features().into_iter().filter(|&x| x > start && x < end));
        *nodes.last_mut().expect("non-empty") = end;
        nodes.push(end);
        nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
        let tol = T::eps() * T::lit(16.0);
        nodes.dedup_by(|b, a| (*b - *a).abs() <= tol * a.abs());
        Ok(nodes)
    }
}

const TWO_OVER_PI: f64 = std::f64::consts::FRAC_2_PI;

fn checked<T: Real>(what: &'static str, q: &Quadrature<T>, est: crate::quad::Estimate<T>) -> Result<T> {
    if est.converged && est.value.is_finite() {
        Ok(est.value)
    } else {
        Err(Error::QuadratureFail {
            what,
            estimate: est.error.as_f64(),
            tolerance: q.abs_tol.max(q.rel_tol * est.value.abs()).as_f64(),
        })
    }
}

/// Computes `δΩ0²`, `λ0²` and `Ω1²`.
pub fn moments<T: Real>(sd: &SpectralDensity<T>) -> Result<Moments<T>> {
    sd.validate()?;
    let (m_inv, m1, m3) = match sd {
        SpectralDensity::Tabulated(t) => table_moments(t),
        SpectralDensity::FlatWork { .. } => {
            return Err(Error::InvalidSpectralDensity(
                "flat work density has no finite moments".into(),
            ))
        }
        _ => {
            let end = sd.integration_end().expect("finite support");
            let breaks = sd.features();
            let q = Quadrature::<T>::default();
            let m_inv = checked(
                "moment of J/omega",
                &q,
                q.integrate(|w| sd.eval(w) / w, T::zero(), end, &breaks),
            )?;
            let m1 = checked(
                "moment of omega J",
                &q,
                q.integrate(|w| w * sd.eval(w), T::zero(), end, &breaks),
            )?;
            let m3 = checked(
                "moment of omega^3 J",
                &q,
                q.integrate(|w| w * w * w * sd.eval(w), T::zero(), end, &breaks),
            )?;
            (m_inv, m1, m3)
        }
    };
    let c = T::lit(TWO_OVER_PI);
    let positive = |name, v: T| {
        if v > T::zero() && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonPositiveMoment {
                name,
                value: v.as_f64(),
            })
        }
    };
    let delta_omega0_sq = positive("delta_omega0_sq", c * m_inv)?;
    let lambda0_sq = positive("lambda0_sq", c * m1)?;
    let omega1_sq = positive("omega1_sq", c * m3 / lambda0_sq)?;
    Ok(Moments {
        delta_omega0_sq,
        lambda0_sq,
        omega1_sq,
    })
}

// Segments are linear, so ∫J/ω has a closed form and the polynomial moments
// are exact under 3-point Gauss–Legendre.
fn table_moments<T: Real>(t: &SdTable<T>) -> (T, T, T) {
    let gl_x = [-(0.6f64.sqrt()), 0.0, 0.6f64.sqrt()];
    let gl_w = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let (mut m_inv, mut m1, mut m3) = (T::zero(), T::zero(), T::zero());
    for (x0, x1, a, b) in t.segments() {
        let h = x1 - x0;
        m_inv += b * h;
        if a != T::zero() {
            m_inv += a * (h / x0).ln_1p();
        }
        let half = h * T::lit(0.5);
        let mid = x0 + half;
        for (&x, &w) in gl_x.iter().zip(&gl_w) {
            let xi = mid + half * T::lit(x);
            let j = a + b * xi;
            let wt = T::lit(w) * half;
            m1 += wt * xi * j;
            m3 += wt * xi * xi * xi * j;
        }
    }
    (m_inv, m1, m3)
}

/// Evaluates `W(ω + i0⁺)` for `ω` inside the open support of `J`.
pub fn cauchy_boundary<T: Real>(
    sd: &SpectralDensity<T>,
    omega: T,
) -> Result<CauchyBoundaryValue<T>> {
    let end = match sd.integration_end() {
        Some(e) => e,
        None => {
            return Err(Error::InvalidSpectralDensity(format!(
                "{} has no finite support",
                sd.family_name()
            )))
        }
    };
    let im = sd.eval(omega);
    if !(omega > T::zero() && omega < end && im > T::zero()) {
        return Err(Error::OutsideSupport {
            omega: omega.as_f64(),
        });
    }
    let pv = match sd {
        SpectralDensity::Tabulated(t) => table_principal_value(t, omega),
        _ => principal_value(sd, omega, end, im)?,
    };
    Ok(CauchyBoundaryValue {
        re: T::lit(TWO_OVER_PI) * pv,
        im,
    })
}

/// `PV ∫_0^end x J(x)/(x² − ω²) dx` by symmetric excision around the pole.
fn principal_value<T: Real>(sd: &SpectralDensity<T>, omega: T, end: T, j_omega: T) -> Result<T> {
    let q = Quadrature::<T>::default();
    let q = q.with_abs_tol(q.rel_tol * j_omega * T::lit(1e-2));
    let g = |x: T| x * sd.eval(x) / (x + omega);
    let eps = omega.min(end - omega);

    let features = sd.features();
    let mut breaks = features.clone();
    let mut x = omega * T::lit(10.0);
    while x < end {
        breaks.push(x);
        x *= T::lit(10.0);
    }
    let lower = checked(
        "principal value",
        &q,
        q.integrate(|x| g(x) / (x - omega), T::zero(), omega - eps, &breaks),
    )?;
    let upper = checked(
        "principal value",
        &q,
        q.integrate(|x| g(x) / (x - omega), omega + eps, end, &breaks),
    )?;
    let fold_breaks: Vec<T> = features.iter().map(|&f| (f - omega).abs()).collect();
    let fold = checked(
        "principal value",
        &q,
        q.integrate(
            |t| (g(omega + t) - g(omega - t)) / t,
            T::zero(),
            eps,
            &fold_breaks,
        ),
    )?;
    Ok(lower + upper + fold)
}

/// Exact principal value for a piecewise-linear table. On a segment with
/// `J = a + b x` the integrand is `b + A/(x − ω) + B/(x + ω)`.
fn table_principal_value<T: Real>(t: &SdTable<T>, omega: T) -> T {
    let half = T::lit(0.5);
    let mut sum = T::zero();
    for (x0, x1, a, b) in t.segments() {
        let big_a = (a + b * omega) * half;
        let big_b = (a - b * omega) * half;
        sum += b * (x1 - x0);
        sum += big_b * ((x1 + omega) / (x0 + omega)).ln();
        // Logarithmic singularities at a node cancel between neighbouring
        // segments because J is continuous there.
        let d0 = (x0 - omega).abs();
        let d1 = (x1 - omega).abs();
        if d0 == T::zero() {
            sum += big_a * d1.ln();
        } else if d1 == T::zero() {
            sum -= big_a * d0.ln();
        } else {
            sum += big_a * (d1 / d0).ln();
        }
    }
    sum
}

/// Tabulates the residual density `J1 = λ0² J / |W(ω + i0⁺)|²` on the grid.
pub fn map_sd<T: Real>(sd: &SpectralDensity<T>, grid: &GridSpec) -> Result<SpectralDensity<T>> {
    let m = moments(sd)?;
    let nodes = grid.nodes(sd)?;
    let mut values = Vec::with_capacity(nodes.len());
    for &w in &nodes {
        let cb = cauchy_boundary(sd, w)?;
        let denom = cb.re * cb.re + cb.im * cb.im;
        if !(denom > T::tiny()) {
            return Err(Error::DivisionNearZero { omega: w.as_f64() });
        }
        values.push(m.lambda0_sq * cb.im / denom);
    }
    Ok(SpectralDensity::Tabulated(SdTable::new(nodes, values)?))
}

/// Moments of `J`, the mapped residual density, and its shift `δΩ1²`.
pub fn rc_parameters<T: Real>(
    sd: &SpectralDensity<T>,
    grid: &GridSpec,
) -> Result<ReactionCoordinate<T>> {
    let m = moments(sd)?;
    let residual = map_sd(sd, grid)?;
    let m1 = moments(&residual)?;
    Ok(ReactionCoordinate {
        params: RcParameters {
            delta_omega0_sq: m.delta_omega0_sq,
            lambda0_sq: m.lambda0_sq,
            omega1_sq: m.omega1_sq,
            delta_omega1_sq: m1.delta_omega0_sq,
        },
        residual,
    })
}
