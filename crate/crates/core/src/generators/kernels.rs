use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::SpectralDensity;

/// Emission-side Bose kernel `J(ω)[1 + n(ω)]`.
///
/// For `ω < 0` this is `J(|ω|) n(|ω|)` by the antisymmetric extension. At
/// `ω = 0` the limit `J'(0)/β` is taken from the density's slope.
pub fn bose_rate_kernel<T: Real>(sd: &SpectralDensity<T>, beta: T, omega: T) -> Result<T> {
    if omega == T::zero() {
        return zero_limit(sd, beta);
    }
    let x = beta * omega.abs();
    let j = sd.eval(omega.abs());
    if omega > T::zero() {
        // 1 + n(ω) = 1/(1 − e^{−βω})
        Ok(-j / (-x).exp_m1())
    } else {
        Ok(j / x.exp_m1())
    }
}

/// Symmetrized kernel `J(ω) coth(βω/2)`; even in `ω`, with limit `2J'(0)/β`.
pub fn bose_coth_kernel<T: Real>(sd: &SpectralDensity<T>, beta: T, omega: T) -> Result<T> {
    if omega == T::zero() {
        return Ok(zero_limit(sd, beta)? * T::lit(2.0));
    }
    let w = omega.abs();
    let x = beta * w;
    // coth(x/2) = 1 + 2/(e^x − 1)
    Ok(sd.eval(w) * (T::one() + T::lit(2.0) / x.exp_m1()))
}

fn zero_limit<T: Real>(sd: &SpectralDensity<T>, beta: T) -> Result<T> {
    match sd.zero_slope() {
        Some(s) => Ok(s / beta),
        None => Err(Error::UndefinedZeroFrequencyLimit(sd.family_name())),
    }
}

/// Lorentzian lead spectrum `Γ δ² / ((ω − ε)² + δ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadSpectrum<T> {
    pub gamma: T,
    pub width: T,
    pub center: T,
}

impl<T: Real> LeadSpectrum<T> {
    pub fn eval(&self, omega: T) -> T {
        let d = omega - self.center;
        self.gamma * self.width * self.width / (d * d + self.width * self.width)
    }
}

/// `1/(e^{β(ω−μ)} + 1)`, evaluated without overflow.
pub fn fermi<T: Real>(beta: T, mu: T, omega: T) -> T {
    let x = beta * (omega - mu);
    if x > T::zero() {
        let e = (-x).exp();
        e / (T::one() + e)
    } else {
        T::one() / (T::one() + x.exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiRates<T> {
    /// `Γ(−ω) f(−ω)`: an electron of energy `−ω` enters from the lead.
    pub in_rate: T,
    /// `Γ(ω) [1 − f(ω)]`: an electron of energy `ω` leaves into the lead.
    pub out_rate: T,
}

/// Tunneling kernels at transition frequency `ω = E_initial − E_final`.
pub fn fermi_rate_kernels<T: Real>(
    lead: &LeadSpectrum<T>,
    beta: T,
    mu: T,
    omega: T,
) -> FermiRates<T> {
    FermiRates {
        in_rate: lead.eval(-omega) * fermi(beta, mu, -omega),
        // 1 − f(ω) written as a Fermi function of the mirrored argument.
        out_rate: lead.eval(omega) * fermi(-beta, mu, omega),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ohmic(slope: f64) -> SpectralDensity<f64> {
        SpectralDensity::OhmicHardCutoff {
            slope,
            cutoff: 100.0,
        }
    }

    #[test]
    fn zero_temperature_is_pure_emission() {
        let sd = ohmic(0.2);
        let k = bose_rate_kernel(&sd, 1e6, 0.5).unwrap();
        assert!((k - sd.eval(0.5)).abs() < 1e-15);
        assert!(bose_rate_kernel(&sd, 1e6, -0.5).unwrap() < 1e-300);
    }

    #[test]
    fn detailed_balance() {
        let sd = ohmic(0.2);
        for (beta, w) in [(0.3, 1.7), (5.0, 0.2), (40.0, 1.1)] {
            let r = bose_rate_kernel(&sd, beta, w).unwrap() / bose_rate_kernel(&sd, beta, -w).unwrap();
            let expect = f64::exp(beta * w);
            assert!((r / expect - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_frequency_limits_match_small_omega() {
        let (g, beta) = (0.3, 2.0);
        let sd = ohmic(g);
        let w = 1e-7;
        let coth_small = bose_coth_kernel(&sd, beta, w).unwrap();
        assert!((bose_coth_kernel(&sd, beta, 0.0).unwrap() - 2.0 * g / beta).abs() < 1e-15);
        assert!((coth_small / (2.0 * g / beta) - 1.0).abs() < 1e-6);
        let rate_small = bose_rate_kernel(&sd, beta, w).unwrap();
        assert!((rate_small / bose_rate_kernel(&sd, beta, 0.0).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_work_zero_limit_is_undefined() {
        let sd = SpectralDensity::FlatWork {
            rate: 1.0,
            beta: 0.01,
            splitting: 1.0,
        };
        assert!(matches!(
            bose_coth_kernel(&sd, 0.01, 0.0),
            Err(Error::UndefinedZeroFrequencyLimit(_))
        ));
    }

    #[test]
    fn lead_peak_and_fermi_limits() {
        let lead = LeadSpectrum {
            gamma: 0.7,
            width: 0.1,
            center: 0.4,
        };
        assert!((lead.eval(0.4) - 0.7f64).abs() < 1e-15);
        let r = fermi_rate_kernels(&lead, 1.0, 1e3, 0.2);
        assert!(r.out_rate < 1e-300);
        assert!(r.in_rate > 0.0);
    }

    #[test]
    fn fermi_kms_ratio() {
        let lead = LeadSpectrum {
            gamma: 1.0,
            width: 2.0,
            center: 0.0,
        };
        let (beta, mu) = (3.0, 0.25);
        for w in [-0.8, 0.1, 0.6] {
            let a = fermi_rate_kernels(&lead, beta, mu, -w).in_rate;
            let b = fermi_rate_kernels(&lead, beta, mu, w).out_rate;
            let expect = f64::exp(-beta * (w - mu));
            assert!((a / b / expect - 1.0).abs() < 1e-12);
        }
    }
}
