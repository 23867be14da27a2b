//! One-dimensional quadrature: Gauss–Legendre rules and a globally adaptive
//! 21-point Gauss–Kronrod integrator that works for any vector-like value
//! (real, complex, or small tuples of those).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Values that can be accumulated by a quadrature rule.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    /// Size used for error control.
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<V: QuadValue, F: FnMut(f64) -> V>(&self, a: f64, b: f64, mut f: F) -> V {
        self.mapped(a, b)
            .fold(V::zero(), |acc, (x, w)| acc + f(x) * w)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

// Kronrod abscissae of the 21-point rule; odd indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
pub(crate) const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
pub(crate) const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_640_282,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

#[allow(clippy::excessive_precision)]
pub(crate) const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Kronrod estimate on [a, b] and the |Kronrod − Gauss| difference.
pub fn gauss_kronrod21<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK21[10];
    let mut gauss = V::zero();
    for j in 0..10 {
        let dx = h * XGK21[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod = kronrod + pair * WGK21[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG10[j / 2];
        }
    }
    let kronrod = kronrod * h;
    let gauss = gauss * h;
    (kronrod, (kronrod - gauss).magnitude())
}

/// Stopping rule for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self {
            abs,
            rel: 0.0,
            max_panels: 2000,
        }
    }

    pub fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_panels: 2000,
        }
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    fn target<V: QuadValue>(&self, value: &V) -> f64 {
        self.abs.max(self.rel * value.magnitude())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<V> {
    pub value: V,
    pub error: f64,
    pub tolerance: f64,
    pub panels: usize,
    pub converged: bool,
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive Gauss–Kronrod integration over the partition given by
/// `breakpoints` (sorted, at least two entries). The panel with the largest
/// error estimate is bisected until the summed error meets the tolerance.
pub fn integrate_adaptive<V, F>(mut f: F, breakpoints: &[f64], tol: Tolerance) -> Integral<V>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    debug_assert!(breakpoints.len() >= 2);
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    for pair in breakpoints.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b > a {
            let (value, error) = gauss_kronrod21(&mut f, a, b);
            heap.push(Panel { a, b, value, error });
        }
    }
    let sum = |heap: &BinaryHeap<Panel<V>>| {
        heap.iter().fold((V::zero(), 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = sum(&heap);
    loop {
        let target = tol.target(&value);
        if error <= target || heap.len() >= tol.max_panels {
            let (v, e) = sum(&heap);
            let target = tol.target(&v);
            return Integral {
                value: v,
                error: e,
                tolerance: target,
                panels: heap.len(),
                converged: e <= target,
            };
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in floating point.
            let (v, e) = sum(&heap);
            let (v, e) = (v + worst.value, e + worst.error);
            return Integral {
                value: v,
                error: e,
                tolerance: tol.target(&v),
                panels: heap.len() + 1,
                converged: e <= tol.target(&v),
            };
        }
        let (lv, le) = gauss_kronrod21(&mut f, worst.a, mid);
        let (rv, re) = gauss_kronrod21(&mut f, mid, worst.b);
        value = value - worst.value + lv + rv;
        error = error - worst.error + le + re;
        heap.push(Panel { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Panel { a: mid, b: worst.b, value: rv, error: re });
        // Running sums drift; refresh them every so often.
        if heap.len() % 64 == 0 {
            (value, error) = sum(&heap);
        }
    }
    Integral {
        value: V::zero(),
        error: 0.0,
        tolerance: 0.0,
        panels: 0,
        converged: true,
    }
}

/// Sorted, de-duplicated breakpoints restricted to [lo, hi] (both included).
pub fn clean_breakpoints(mut points: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    points.retain(|p| p.is_finite() && *p > lo && *p < hi);
    points.push(lo);
    points.push(hi);
    points.sort_by(f64::total_cmp);
    let span = (hi - lo).abs().max(f64::MIN_POSITIVE);
    points.dedup_by(|b, a| (*b - *a).abs() <= 1e-14 * span);
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 10, 21, 48] {
            let rule = GaussLegendre::new(n);
            let weight_sum: f64 = rule.weights().iter().sum();
            assert!((weight_sum - 2.0).abs() < 1e-13, "n = {n}");
            let degree = 2 * n - 1;
            let exact = if degree % 2 == 0 { 2.0 / (degree as f64 + 1.0) } else { 0.0 };
            let got: f64 = rule.integrate(-1.0, 1.0, |x| x.powi(degree as i32));
            assert!((got - exact).abs() < 1e-12, "n = {n}");
            let even = (degree - 1) as i32;
            let got: f64 = rule.integrate(0.0, 1.0, |x| x.powi(even));
            assert!((got - 1.0 / (even as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn kronrod_rule_matches_known_integral() {
        let (v, e): (f64, f64) = gauss_kronrod21(&mut |x: f64| x.exp(), 0.0, 1.0);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-15);
        assert!(e < 1e-12);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate_adaptive(|x: f64| 1.0 / x.sqrt(), &[0.0, 1.0], Tolerance::absolute(1e-10));
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn adaptive_complex_oscillatory() {
        let k = 40.0;
        let r = integrate_adaptive(
            |x: f64| Complex64::from_polar(1.0, k * x),
            &[0.0, 1.0],
            Tolerance::absolute(1e-13),
        );
        let exact = (Complex64::from_polar(1.0, k) - 1.0) / Complex64::new(0.0, k);
        assert!(r.converged);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let r = integrate_adaptive(
            |x: f64| (1.0 / x).sin(),
            &[1e-8, 1.0],
            Tolerance::absolute(1e-14).with_max_panels(8),
        );
        assert!(!r.converged);
        assert!(r.error > r.tolerance);
    }

    #[test]
    fn breakpoints_are_sorted_and_clipped() {
        let b = clean_breakpoints(vec![3.0, -1.0, 0.5, 0.5, 2.0, f64::NAN], 0.0, 2.0);
        assert_eq!(b, vec![0.0, 0.5, 2.0]);
    }
}
