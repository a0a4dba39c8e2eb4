//! Bath spectral densities and the reaction-coordinate mapping.
//!
//! Every evaluator applies the antisymmetric extension `J(-ω) = -J(ω)`.
//! Units are natural (ħ = k_B = 1); frequencies and energies share a unit.

mod mapping;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use mapping::{
    cauchy_boundary, map_sd, moments, rc_parameters, CauchyBoundaryValue, GridSpec, Moments,
    RcParameters, ReactionCoordinate,
};
pub use table::SdTable;

/// A parametric or tabulated spectral density `J(ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpectralDensity<T> {
    /// `d0² γ ω / ((ω² − ω0²)² + γ² ω²) Θ(ωR − ω)`
    LorentzianHardCutoff { d0: T, gamma: T, omega0: T, cutoff: T },
    /// `slope · ω Θ(ωR − ω)`
    OhmicHardCutoff { slope: T, cutoff: T },
    /// `coupling · ω e^{−ω/ωR}`
    OhmicExpCutoff { coupling: T, cutoff: T },
    /// Constant `β_w Δ10 Γ_w` for ω > 0; models a work reservoir at small `β_w`.
    FlatWork { rate: T, beta: T, splitting: T },
    /// Piecewise-linear interpolation through `(0, 0)` and the table nodes,
    /// zero beyond the last node.
    Tabulated(SdTable<T>),
}

impl<T: Real> SpectralDensity<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpectralDensity(format!(
                    "{name} must be positive and finite, got {v:e}"
                )))
            }
        };
        match *self {
            Self::LorentzianHardCutoff {
                d0,
                gamma,
                omega0,
                cutoff,
            } => {
                pos("d0", d0)?;
                pos("gamma", gamma)?;
                pos("omega0", omega0)?;
                pos("cutoff", cutoff)
            }
            Self::OhmicHardCutoff { slope, cutoff } => {
                pos("slope", slope)?;
                pos("cutoff", cutoff)
            }
            Self::OhmicExpCutoff { coupling, cutoff } => {
                pos("coupling", coupling)?;
                pos("cutoff", cutoff)
            }
            Self::FlatWork {
                rate,
                beta,
                splitting,
            } => {
                pos("rate", rate)?;
                pos("beta", beta)?;
                pos("splitting", splitting)
            }
            Self::Tabulated(ref t) => t.validate(),
        }
    }

    /// Evaluates `J(ω)` with the antisymmetric extension to `ω < 0`.
    pub fn eval(&self, omega: T) -> T {
        if omega < T::zero() {
            -self.eval_nonneg(-omega)
        } else {
            self.eval_nonneg(omega)
        }
    }

    fn eval_nonneg(&self, w: T) -> T {
        match *self {
            Self::LorentzianHardCutoff {
                d0,
                gamma,
                omega0,
                cutoff,
            } => {
                if w >= cutoff {
                    return T::zero();
                }
                let detune = w * w - omega0 * omega0;
                d0 * d0 * gamma * w / (detune * detune + gamma * gamma * w * w)
            }
            Self::OhmicHardCutoff { slope, cutoff } => {
                if w >= cutoff {
                    T::zero()
                } else {
                    slope * w
                }
            }
            Self::OhmicExpCutoff { coupling, cutoff } => coupling * w * (-w / cutoff).exp(),
            Self::FlatWork {
                rate,
                beta,
                splitting,
            } => {
                if w == T::zero() {
                    T::zero()
                } else {
                    beta * splitting * rate
                }
            }
            Self::Tabulated(ref t) => t.interp(w),
        }
    }

    /// `J'(0⁺)`, when the density vanishes linearly at the origin.
    pub fn zero_slope(&self) -> Option<T> {
        match *self {
            Self::LorentzianHardCutoff {
                d0, gamma, omega0, ..
            } => Some(d0 * d0 * gamma / omega0.powi(4)),
            Self::OhmicHardCutoff { slope, .. } => Some(slope),
            Self::OhmicExpCutoff { coupling, .. } => Some(coupling),
            Self::FlatWork { .. } => None,
            Self::Tabulated(ref t) => Some(t.initial_slope()),
        }
    }

    /// End of a compact support, if the family has one.
    pub fn support_end(&self) -> Option<T> {
        match *self {
            Self::LorentzianHardCutoff { cutoff, .. } | Self::OhmicHardCutoff { cutoff, .. } => {
                Some(cutoff)
            }
            Self::Tabulated(ref t) => Some(t.last_node()),
            Self::OhmicExpCutoff { .. } | Self::FlatWork { .. } => None,
        }
    }

    /// Upper integration limit for moments and Cauchy transforms.
    pub(crate) fn integration_end(&self) -> Option<T> {
        match *self {
            // e^{-90} times any polynomial factor we integrate is below 1e-30.
            Self::OhmicExpCutoff { cutoff, .. } => Some(cutoff * T::lit(90.0)),
            Self::FlatWork { .. } => None,
            _ => self.support_end(),
        }
    }

    /// Interior points where the density has structure narrower than its support.
    pub(crate) fn features(&self) -> Vec<T> {
        match *self {
            Self::LorentzianHardCutoff { gamma, omega0, .. } => {
                let mut v = vec![omega0];
                for k in [0.5, 2.0, 8.0, 32.0, 128.0] {
                    let d = gamma * T::lit(k);
                    v.push(omega0 + d);
                    if omega0 > d {
                        v.push(omega0 - d);
                    }
                }
                v.push(omega0 * T::lit(0.5));
                v.push(omega0 * T::lit(2.0));
                v.push(omega0 * T::lit(10.0));
                v
            }
            Self::OhmicExpCutoff { cutoff, .. } => {
                [1.0, 4.0, 16.0, 40.0].iter().map(|&k| cutoff * T::lit(k)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Returns the density multiplied by `factor` (the coupling scaled by `sqrt(factor)`).
    pub fn scaled(&self, factor: T) -> Self {
        match self.clone() {
            Self::LorentzianHardCutoff {
                d0,
                gamma,
                omega0,
                cutoff,
            } => Self::LorentzianHardCutoff {
                d0: d0 * factor.sqrt(),
                gamma,
                omega0,
                cutoff,
            },
            Self::OhmicHardCutoff { slope, cutoff } => Self::OhmicHardCutoff {
                slope: slope * factor,
                cutoff,
            },
            Self::OhmicExpCutoff { coupling, cutoff } => Self::OhmicExpCutoff {
                coupling: coupling * factor,
                cutoff,
            },
            Self::FlatWork {
                rate,
                beta,
                splitting,
            } => Self::FlatWork {
                rate: rate * factor,
                beta,
                splitting,
            },
            Self::Tabulated(t) => Self::Tabulated(t.scaled(factor)),
        }
    }

    /// Residue-theorem form of the mapped Lorentzian, `γ ω Θ(ωR − ω)`.
    ///
    /// Exact only for `ωR → ∞` and `4ω0² > γ²`; kept as a reference for the
    /// numerical mapping, not as a replacement for it.
    pub fn lorentzian_residual_approx(&self) -> Option<Self> {
        match *self {
            Self::LorentzianHardCutoff {
                gamma,
                omega0,
                cutoff,
                ..
            } if T::lit(4.0) * omega0 * omega0 > gamma * gamma => Some(Self::OhmicHardCutoff {
                slope: gamma,
                cutoff,
            }),
            _ => None,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::LorentzianHardCutoff { .. } => "lorentzian_hard_cutoff",
            Self::OhmicHardCutoff { .. } => "ohmic_hard_cutoff",
            Self::OhmicExpCutoff { .. } => "ohmic_exp_cutoff",
            Self::FlatWork { .. } => "flat_work",
            Self::Tabulated(_) => "tabulated",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentz() -> SpectralDensity<f64> {
        SpectralDensity::LorentzianHardCutoff {
            d0: 0.3,
            gamma: 0.05,
            omega0: 1.0,
            cutoff: 50.0,
        }
    }

    #[test]
    fn antisymmetric_extension() {
        let sd = lorentz();
        for w in [0.1, 0.9, 1.0, 3.0] {
            assert_eq!(sd.eval(-w), -sd.eval(w));
        }
    }

    #[test]
    fn hard_cutoff_is_exact() {
        let sd = lorentz();
        assert!(sd.eval(49.999) > 0.0);
        assert_eq!(sd.eval(50.0), 0.0);
        assert_eq!(sd.eval(60.0), 0.0);
    }

    #[test]
    fn zero_slope_matches_difference_quotient() {
        for sd in [
            lorentz(),
            SpectralDensity::OhmicExpCutoff {
                coupling: 0.7,
                cutoff: 3.0,
            },
        ] {
            let h = 1e-7;
            let fd = sd.eval(h) / h;
            let s = sd.zero_slope().unwrap();
            assert!((fd - s).abs() < 1e-5 * s);
        }
    }

    #[test]
    fn flat_work_has_no_slope_and_is_constant() {
        let sd = SpectralDensity::FlatWork {
            rate: 0.02,
            beta: 0.01,
            splitting: 0.43,
        };
        assert_eq!(sd.zero_slope(), None);
        assert_eq!(sd.eval(0.2), sd.eval(5.0));
        assert_eq!(sd.eval(-0.2), -sd.eval(0.2));
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let bad = SpectralDensity::OhmicHardCutoff {
            slope: -1.0,
            cutoff: 1.0,
        };
        assert!(bad.validate().is_err());
        assert!(lorentz().validate().is_ok());
    }

    #[test]
    fn scaling_multiplies_values() {
        let sd = lorentz();
        let s = sd.scaled(3.0);
        assert!((s.eval(0.7) - 3.0 * sd.eval(0.7)).abs() < 1e-14);
    }
}
