//! Interpolants used to cache expensive one-dimensional functions.

use crate::quad::QuadValue;

/// Cubic Hermite interpolation on a uniform grid with exact nodal derivatives.
///
/// Evaluation outside the tabulated range returns `None`.
#[derive(Debug, Clone)]
pub struct HermiteTable<V> {
    start: f64,
    step: f64,
    values: Vec<V>,
    derivatives: Vec<V>,
}

impl<V: QuadValue> HermiteTable<V> {
    /// `values[i]` and `derivatives[i]` sample the function at `start + i * step`.
    pub fn new(start: f64, step: f64, values: Vec<V>, derivatives: Vec<V>) -> Self {
        assert!(step > 0.0);
        assert!(values.len() >= 2 && values.len() == derivatives.len());
        Self {
            start,
            step,
            values,
            derivatives,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let u = (x - self.start) / self.step;
        if u.is_nan() || u < 0.0 {
            return None;
        }
        let last = self.values.len() - 1;
        let i = u as usize;
        if i >= last {
            return if u <= last as f64 { Some((last - 1, 1.0)) } else { None };
        }
        Some((i, u - i as f64))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> Option<V> {
        let (i, t) = self.locate(x)?;
        let s = 1.0 - t;
        let h00 = (1.0 + 2.0 * t) * s * s;
        let h10 = t * s * s;
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = -t * t * s;
        Some(
            self.values[i] * h00
                + self.values[i + 1] * h01
                + (self.derivatives[i] * h10 + self.derivatives[i + 1] * h11) * self.step,
        )
    }

    /// Value and first derivative.
    #[inline]
    pub fn eval_with_derivative(&self, x: f64) -> Option<(V, V)> {
        let (i, t) = self.locate(x)?;
        let s = 1.0 - t;
        let h00 = (1.0 + 2.0 * t) * s * s;
        let h10 = t * s * s;
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = -t * t * s;
        let d00 = 6.0 * t * (t - 1.0);
        let d10 = (3.0 * t - 1.0) * (t - 1.0);
        let d11 = t * (3.0 * t - 2.0);
        let value = self.values[i] * h00
            + self.values[i + 1] * h01
            + (self.derivatives[i] * h10 + self.derivatives[i + 1] * h11) * self.step;
        let slope = (self.values[i] - self.values[i + 1]) * (d00 / self.step)
            + self.derivatives[i] * d10
            + self.derivatives[i + 1] * d11;
        Some((value, slope))
    }
}

/// End condition of a [`CubicSpline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplineEnd {
    /// Prescribed first derivative.
    Clamped(f64),
    /// Zero second derivative.
    Natural,
}

/// Interpolating cubic spline on strictly increasing knots.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, start: SplineEnd, end: SplineEnd) -> Self {
        let n = knots.len();
        assert!(n >= 2 && values.len() == n);
        debug_assert!(knots.windows(2).all(|w| w[1] > w[0]));
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (values[i + 1] - values[i]) / h[i]).collect();

        // Tridiagonal system for the second derivatives.
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        match start {
            SplineEnd::Natural => diag[0] = 1.0,
            SplineEnd::Clamped(d) => {
                diag[0] = 2.0 * h[0];
                sup[0] = h[0];
                rhs[0] = 6.0 * (slope[0] - d);
            }
        }
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
        }
        match end {
            SplineEnd::Natural => diag[n - 1] = 1.0,
            SplineEnd::Clamped(d) => {
                sub[n - 1] = h[n - 2];
                diag[n - 1] = 2.0 * h[n - 2];
                rhs[n - 1] = 6.0 * (d - slope[n - 2]);
            }
        }
        for i in 1..n {
            let m = sub[i] / diag[i - 1];
            diag[i] -= m * sup[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        let mut second = vec![0.0; n];
        second[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            second[i] = (rhs[i] - sup[i] * second[i + 1]) / diag[i];
        }
        Self {
            knots,
            values,
            second,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Evaluates the spline; arguments outside the knot range are clamped.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.knots.len();
        let x = x.clamp(self.knots[0], self.knots[n - 1]);
        let i = match self.knots.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - x) / h;
        let b = 1.0 - a;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn hermite_reproduces_cubics_exactly() {
        let f = |x: f64| 0.3 * x * x * x - x * x + 2.0;
        let df = |x: f64| 0.9 * x * x - 2.0 * x;
        let xs: Vec<f64> = (0..11).map(|i| -1.0 + 0.25 * i as f64).collect();
        let t = HermiteTable::new(-1.0, 0.25, xs.iter().map(|&x| f(x)).collect(), xs.iter().map(|&x| df(x)).collect());
        for x in [-1.0, -0.9, 0.13, 1.0, 1.5] {
            let (v, d) = t.eval_with_derivative(x).unwrap();
            assert!((v - f(x)).abs() < 1e-13);
            assert!((d - df(x)).abs() < 1e-12);
        }
        assert!(t.eval(1.5000001).is_none());
        assert!(t.eval(-1.0000001).is_none());
    }

    #[test]
    fn hermite_complex_accuracy() {
        let h = 0.01;
        let n = 629;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let vals: Vec<Complex64> = xs.iter().map(|&x| Complex64::from_polar(1.0, x)).collect();
        let ders: Vec<Complex64> = xs.iter().map(|&x| Complex64::i() * Complex64::from_polar(1.0, x)).collect();
        let t = HermiteTable::new(0.0, h, vals, ders);
        let x = 3.1;
        assert!((t.eval(x).unwrap() - Complex64::from_polar(1.0, x)).norm() < 1e-10);
    }

    #[test]
    fn spline_clamped_matches_smooth_function() {
        let knots: Vec<f64> = (0..41).map(|i| i as f64 * 0.1).collect();
        let vals: Vec<f64> = knots.iter().map(|x| (-x * x).exp()).collect();
        let s = CubicSpline::new(knots, vals, SplineEnd::Clamped(0.0), SplineEnd::Natural);
        for x in [0.0, 0.05, 0.77, 2.31] {
            assert!((s.eval(x) - (-x * x).exp()).abs() < 2e-5, "x = {x}");
        }
    }

    #[test]
    fn spline_interpolates_knots() {
        let knots = vec![0.0, 0.3, 1.0, 1.1, 4.0];
        let vals = vec![1.0, -2.0, 0.5, 0.25, 3.0];
        let s = CubicSpline::new(knots.clone(), vals.clone(), SplineEnd::Natural, SplineEnd::Natural);
        for (k, v) in knots.iter().zip(&vals) {
            assert!((s.eval(*k) - v).abs() < 1e-12);
        }
    }
}
