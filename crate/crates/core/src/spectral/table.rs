use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sampled spectral density on a strictly increasing positive grid.
///
/// Between nodes the density is linear; below the first node it is the
/// straight line through the origin, beyond the last node it vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdTable<T> {
    omega: Vec<T>,
    value: Vec<T>,
}

impl<T: Real> SdTable<T> {
    pub fn new(omega: Vec<T>, value: Vec<T>) -> Result<Self> {
        let t = Self { omega, value };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega.len() != self.value.len() {
            return Err(Error::InvalidSpectralDensity(format!(
                "table has {} frequencies but {} values",
                self.omega.len(),
                self.value.len()
            )));
        }
        if self.omega.len() < 2 {
            return Err(Error::InvalidSpectralDensity(
                "table needs at least two nodes".into(),
            ));
        }
        if !(self.omega[0] > T::zero()) {
            return Err(Error::InvalidSpectralDensity(
                "table frequencies must be positive".into(),
            ));
        }
        if self.omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpectralDensity(
                "table frequencies must be strictly increasing".into(),
            ));
        }
        if self
            .value
            .iter()
            .chain(self.omega.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidSpectralDensity(
                "table contains non-finite entries".into(),
            ));
        }
        if self.value.iter().any(|&v| v < T::zero()) {
            return Err(Error::InvalidSpectralDensity(
                "table values must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    pub fn values(&self) -> &[T] {
        &self.value
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn last_node(&self) -> T {
        *self.omega.last().expect("validated table")
    }

    pub fn initial_slope(&self) -> T {
        self.value[0] / self.omega[0]
    }

    /// Interpolated value for `w >= 0`.
    pub fn interp(&self, w: T) -> T {
        if w <= T::zero() || w > self.last_node() {
            return T::zero();
        }
        if w <= self.omega[0] {
            return self.value[0] * w / self.omega[0];
        }
        let i = self.omega.partition_point(|&x| x < w);
        // omega[i-1] < w <= omega[i]
        let (x0, x1) = (self.omega[i - 1], self.omega[i]);
        let (y0, y1) = (self.value[i - 1], self.value[i]);
        y0 + (y1 - y0) * (w - x0) / (x1 - x0)
    }

    /// Linear segments `(x0, x1, a, b)` with `J = a + b x` on `[x0, x1]`,
    /// including the segment from the origin.
    pub(crate) fn segments(&self) -> impl Iterator<Item = (T, T, T, T)> + '_ {
        let first = std::iter::once((T::zero(), self.omega[0], T::zero(), self.initial_slope()));
        let rest = self.omega.windows(2).zip(self.value.windows(2)).map(|(x, y)| {
            let b = (y[1] - y[0]) / (x[1] - x[0]);
            (x[0], x[1], y[0] - b * x[0], b)
        });
        first.chain(rest)
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            omega: self.omega.clone(),
            value: self.value.iter().map(|&v| v * factor).collect(),
        }
    }

    /// Two-column CSV with header `omega,J`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,J\n");
        for (w, j) in self.omega.iter().zip(&self.value) {
            let _ = writeln!(out, "{w:e},{j:e}");
        }
        out
    }

    /// Parses two-column CSV; a non-numeric first line is treated as a header
    /// and `#` lines are comments.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut omega = Vec::new();
        let mut value = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::InvalidSpectralDensity(format!(
                        "line {}: expected two columns",
                        lineno + 1
                    )))
                }
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(w), Ok(j)) => {
                    omega.push(T::lit(w));
                    value.push(T::lit(j));
                }
                _ if omega.is_empty() && lineno == 0 => continue,
                _ => {
                    return Err(Error::InvalidSpectralDensity(format!(
                        "line {}: cannot parse numbers",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(omega, value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SdTable<f64> {
        SdTable::new(vec![1.0, 2.0, 4.0], vec![2.0, 3.0, 1.0]).unwrap()
    }

    #[test]
    fn interpolation_includes_origin_and_cutoff() {
        let t = table();
        assert_eq!(t.interp(0.5), 1.0);
        assert_eq!(t.interp(1.5), 2.5);
        assert_eq!(t.interp(3.0), 2.0);
        assert_eq!(t.interp(4.0), 1.0);
        assert_eq!(t.interp(4.5), 0.0);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = SdTable::new(vec![0.1, 0.3, 1.0 / 3.0], vec![1e-7, 0.25, 2.0 / 7.0]).unwrap();
        let back = SdTable::<f64>::from_csv(&t.to_csv()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn rejects_unsorted_or_negative() {
        assert!(SdTable::new(vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(SdTable::new(vec![1.0, 2.0], vec![1.0, -1.0]).is_err());
        assert!(SdTable::<f64>::from_csv("omega,J\n1,2\nx,3\n").is_err());
    }

    #[test]
    fn segments_cover_support() {
        let t = table();
        let segs: Vec<_> = t.segments().collect();
        assert_eq!(segs.len(), 3);
        for (x0, x1, a, b) in segs {
            assert!((a + b * x0 - t.interp(x0.max(1e-300))).abs() < 1e-12);
            assert!((a + b * x1 - t.interp(x1)).abs() < 1e-12);
        }
    }
}
