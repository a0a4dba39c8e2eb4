//! Double-word arithmetic (value = hi + lo) built from error-free transforms.
//!
//! Used where steady-state net flows are tiny differences of large gross
//! flows: near-equilibrium reservoirs cancel six or more digits.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DWord<T> {
    pub hi: T,
    pub lo: T,
}

#[inline]
pub fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
pub fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl<T: Real> DWord<T> {
    pub fn zero() -> Self {
        Self {
            hi: T::zero(),
            lo: T::zero(),
        }
    }

    pub fn new(hi: T, lo: T) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    pub fn value(self) -> T {
        self.hi + self.lo
    }

    pub fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        Self::new(s, e + self.lo + o.lo)
    }

    pub fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    /// `self · b` for a plain scalar `b`.
    pub fn mul(self, b: T) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::new(p, e + self.lo * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_digits() {
        let a = DWord::new(1.0f64, 1e-20);
        let b = DWord::new(1.0f64, 0.0);
        assert_eq!(a.sub(b).value(), 1e-20);
        let p = DWord::new(0.1f64, 0.0).mul(3.0);
        let (hi, lo) = two_prod(0.1f64, 3.0);
        assert_eq!((p.hi, p.lo), (hi, lo));
    }
}
