//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        // f32 cannot reach 1e-11; scale the target with the type's epsilon.
        let rel = T::lit(1e-11).max(T::eps() * T::lit(100.0));
        Self {
            rel_tol: rel,
            abs_tol: T::zero(),
            max_intervals: 4000,
        }
    }
}

impl<T: Real> Quadrature<T> {
    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    /// Integrates `f` over `[a, b]`; `breaks` are interior points where the
    /// integrand has structure (peaks, kinks). Points outside `(a, b)` are ignored.
    pub fn integrate<F>(&self, f: F, a: T, b: T, breaks: &[T]) -> Estimate<T>
    where
        F: Fn(T) -> T,
    {
        if !(b > a) {
            return Estimate {
                value: T::zero(),
                error: T::zero(),
                converged: true,
            };
        }
        let mut nodes: Vec<T> = Vec::with_capacity(breaks.len() + 2);
        nodes.push(a);
        nodes.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        nodes.push(b);
        nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite break points"));
        nodes.dedup();

        let mut panels: Vec<Panel<T>> = nodes
            .windows(2)
            .map(|w| kronrod(&f, w[0], w[1]))
            .collect();

        loop {
            let (total, err) = panels
                .iter()
                .fold((T::zero(), T::zero()), |(v, e), p| (v + p.value, e + p.error));
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= tol {
                return Estimate {
                    value: total,
                    error: err,
                    converged: true,
                };
            }
            if panels.len() >= self.max_intervals {
                return Estimate {
                    value: total,
                    error: err,
                    converged: false,
                };
            }
            let worst = panels
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).expect("finite error"))
                .map(|(i, _)| i)
                .expect("at least one panel");
            let p = panels.swap_remove(worst);
            let mid = (p.a + p.b) * T::lit(0.5);
            if !(mid > p.a && mid < p.b) {
                // Interval cannot be split further in this precision.
                return Estimate {
                    value: total,
                    error: err,
                    converged: false,
                };
            }
            panels.push(kronrod(&f, p.a, mid));
            panels.push(kronrod(&f, mid, p.b));
        }
    }
}

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Panel<T> {
    let half = (b - a) * T::lit(0.5);
    let center = (a + b) * T::lit(0.5);
    let fc = f(center);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * T::lit(x);
        let pair = f(center - dx) + f(center + dx);
        kron += pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss += pair * T::lit(WG[j / 2]);
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    // Roundoff floor: the panel estimate cannot be better than a few ulps.
    let floor = value.abs() * T::eps() * T::lit(50.0);
    Panel {
        a,
        b,
        value,
        error: error.max(floor),
    }
}
