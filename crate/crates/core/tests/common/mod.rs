//! Reference computations for the integration and acceptance tests. Nothing
//! here calls the library's numerics: quadrature rules, profiles, transforms
//! and the momentum integral are all written out from their definitions.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::ops::{Add, Mul};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use clickbound::params::DimensionlessConfig;
use clickbound::wightman::{W2Sample, WightmanCurve};

/// Gauss–Legendre rule on [−1, 1], nodes from Newton iteration on P_n.
pub struct Rule {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let mut x = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, z);
                let dz = p / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, z);
            x.push(z);
            w.push(2.0 / ((1.0 - z * z) * dp * dp));
        }
        Self { x, w }
    }

    /// Nodes and weights over `panels` equal panels of [a, b].
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.x.len());
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.x.iter().zip(&self.w) {
                out.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
        out
    }

    /// Composite rule over consecutive breakpoints, each gap split into
    /// panels no wider than `max_width`.
    pub fn over(&self, breaks: &[f64], max_width: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                let panels = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
                out.extend(self.composite(w[0], w[1], panels));
            }
        }
        out
    }
}

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let p = (-1.0 / s).exp();
        let q = (-1.0 / (1.0 - s)).exp();
        p / (p + q)
    }
}

/// One axis of the detector bump: plateau of unit width centred at `center`,
/// collars of width `d / 2` on either side.
#[derive(Clone, Copy)]
pub struct Profile {
    pub center: f64,
    pub d: f64,
}

impl Profile {
    pub fn transverse(d: f64) -> Self {
        Self { center: 0.0, d }
    }

    pub fn longitudinal(d: f64) -> Self {
        Self {
            center: -0.5 * (1.0 + d),
            d,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        smooth_step(1.0 + 1.0 / self.d - (2.0 / self.d) * (x - self.center).abs())
    }

    pub fn breaks(&self) -> [f64; 4] {
        let h = 0.5 * (1.0 + self.d);
        [self.center - h, self.center - 0.5, self.center + 0.5, self.center + h]
    }

    /// Quadrature nodes over the support with the profile folded into the weights.
    pub fn nodes(&self, width: f64) -> Vec<(f64, f64)> {
        Rule::new(10)
            .over(&self.breaks(), width)
            .into_iter()
            .map(|(x, w)| (x, w * self.eval(x)))
            .collect()
    }
}

/// ∫ χ(x) m(x) e^{ikx} dx on the given weighted nodes.
fn fourier(nodes: &[(f64, f64)], modulation: impl Fn(f64) -> f64, k: f64) -> Complex64 {
    nodes
        .iter()
        .map(|&(x, w)| Complex64::from_polar(w * modulation(x), k * x))
        .sum()
}

/// Samples on k = start + i·h with four-point Lagrange interpolation.
/// Arguments beyond the last sample give zero, negative ones use `mirror`.
pub struct Table<T> {
    start: f64,
    h: f64,
    end: f64,
    vals: Vec<T>,
    mirror: fn(T) -> T,
}

impl<T: Copy + Send + Add<Output = T> + Mul<f64, Output = T>> Table<T> {
    pub fn build(end: f64, h: f64, mirror: fn(T) -> T, f: impl Fn(f64) -> T + Sync) -> Self
    where
        T: Sync,
    {
        let start = -2.0 * h;
        let n = ((end - start) / h).ceil() as usize + 3;
        let vals = (0..n).into_par_iter().map(|i| f(start + i as f64 * h)).collect();
        Self {
            start,
            h,
            end,
            vals,
            mirror,
        }
    }

    pub fn eval(&self, k: f64) -> T {
        if k < 0.0 {
            return (self.mirror)(self.eval(-k));
        }
        if k > self.end {
            return self.vals[0] * 0.0;
        }
        let u = (k - self.start) / self.h;
        let i = (u.floor() as usize).max(1);
        let t = u - i as f64;
        let (a, b, c, d) = (t + 1.0, t, t - 1.0, t - 2.0);
        self.vals[i - 1] * (-b * c * d / 6.0)
            + self.vals[i] * (a * c * d / 2.0)
            + self.vals[i + 1] * (-a * b * d / 2.0)
            + self.vals[i + 2] * (a * b * c / 6.0)
    }
}

fn same(x: f64) -> f64 {
    x
}

fn conj(z: Complex64) -> Complex64 {
    z.conj()
}

/// Direct evaluation of the three axis transforms.
pub struct DirectTransforms {
    trans: Vec<(f64, f64)>,
    long: Vec<(f64, f64)>,
    dphi: f64,
    phase: f64,
}

impl DirectTransforms {
    pub fn new(dl: f64, dbig_l: f64, dphi: f64, phase: f64) -> Self {
        Self {
            trans: Profile::transverse(dbig_l).nodes(0.01),
            long: Profile::longitudinal(dl).nodes(0.01),
            dphi,
            phase,
        }
    }

    pub fn a(&self, k: f64) -> f64 {
        fourier(&self.trans, |_| 1.0, k).re
    }

    pub fn c(&self, k: f64) -> Complex64 {
        fourier(&self.long, |x| (self.phase + self.dphi * x).cos(), k)
    }

    pub fn s(&self, k: f64) -> Complex64 {
        fourier(&self.long, |x| (self.phase + self.dphi * x).sin(), k)
    }
}

/// Numerical controls of [`Reference`].
#[derive(Clone, Copy, Debug)]
pub struct ReferenceGrid {
    /// Largest transform argument kept.
    pub k_max: f64,
    /// Radial truncation.
    pub r_max: f64,
    /// Radial panel width and nodes per panel.
    pub r_width: f64,
    pub r_nodes: usize,
    /// Panel width and nodes per panel in the boosted momentum κ.
    pub kappa_width: f64,
    pub kappa_nodes: usize,
}

impl Default for ReferenceGrid {
    fn default() -> Self {
        Self {
            k_max: 200.0,
            r_max: 120.0,
            r_width: 0.5,
            r_nodes: 8,
            kappa_width: 1.0,
            kappa_nodes: 8,
        }
    }
}

/// Fixed tensor-product evaluation of W₂(η) in spherical coordinates
/// (r, s = 1 + cos θ, φ), with the azimuth tabulated once per transverse
/// radius.
pub struct Reference {
    n: f64,
    omega0: f64,
    aspect: f64,
    grid: ReferenceGrid,
    c: Table<Complex64>,
    s: Table<Complex64>,
    t: Table<f64>,
    r_nodes: Vec<(f64, f64)>,
}

impl Reference {
    pub fn new(cfg: &DimensionlessConfig, grid: ReferenceGrid) -> Self {
        let direct = DirectTransforms::new(cfg.dl_tilde, cfg.dbig_l_tilde, cfg.delta_phi, cfg.arg_alpha0);
        let h = 0.01;
        let a = Table::build(grid.k_max, h, same, |k| direct.a(k));
        let c = Table::build(grid.k_max, h, conj, |k| direct.c(k));
        let s = Table::build(grid.k_max, h, conj, |k| direct.s(k));
        let rule = Rule::new(8);
        let t = Table::build(grid.r_max / cfg.aspect, h, same, |rho| {
            let panels = 4 + rho.ceil() as usize;
            4.0 * rule
                .composite(0.0, 0.5 * PI, panels)
                .iter()
                .map(|&(phi, w)| {
                    let (x, y) = (a.eval(rho * phi.cos()), a.eval(rho * phi.sin()));
                    w * x * x * y * y
                })
                .sum::<f64>()
        });
        let r_nodes = Rule::new(grid.r_nodes).over(&[0.0, grid.r_max], grid.r_width);
        Self {
            n: cfg.n,
            omega0: cfg.omega0_tilde,
            aspect: cfg.aspect,
            grid,
            c,
            s,
            t,
            r_nodes,
        }
    }

    /// Number of (r, κ) nodes used at rapidity η.
    pub fn node_count(&self, eta: f64) -> usize {
        let rule_len = self.grid.kappa_nodes;
        self.r_nodes
            .iter()
            .map(|&(r, _)| {
                let (lo, hi) = self.kappa_range(r, eta);
                ((hi - lo) / self.grid.kappa_width).ceil().max(1.0) as usize * rule_len
            })
            .sum()
    }

    fn kappa_range(&self, r: f64, eta: f64) -> (f64, f64) {
        let em = (-eta).exp();
        let lo = (-r * em).max(-self.grid.k_max);
        let hi = (r * (2.0 * eta.cosh() - em)).min(self.grid.k_max);
        (lo, hi)
    }

    /// W₂ at rapidity η. For each radius the polar variable is traded for
    /// κ, which is linear in s with slope r·cosh η, so the boosted factor is
    /// resolved at every η; outside |κ| ≤ k_max the boosted factor is zero.
    pub fn w2(&self, eta: f64) -> Complex64 {
        let (sh, ch) = (eta.sinh(), eta.cosh());
        let em = (-eta).exp();
        let rule = Rule::new(self.grid.kappa_nodes);
        let w0 = self.omega0;
        let i = Complex64::i();
        let total: Complex64 = self
            .r_nodes
            .par_iter()
            .map(|&(r, wr)| {
                let (lo, hi) = self.kappa_range(r, eta);
                if hi <= lo {
                    return Complex64::new(0.0, 0.0);
                }
                let panels = ((hi - lo) / self.grid.kappa_width).ceil().max(1.0) as usize;
                let mut acc = Complex64::new(0.0, 0.0);
                for (kappa, wk) in rule.composite(lo, hi, panels) {
                    let s = (kappa / r + em) / ch;
                    let k1 = r * (s - 1.0);
                    let rho = r * (s * (2.0 - s)).max(0.0).sqrt() / self.aspect;
                    let boosted = r * (sh * s + em);
                    let x = self.s.eval(k1) * w0 + i * r * self.c.eval(k1);
                    let y = self.s.eval(-kappa) * w0 - i * boosted * self.c.eval(-kappa);
                    acc += x * y * (wk * self.t.eval(rho));
                }
                acc * (wr / ch)
            })
            .sum();
        total * (self.n / ((2.0 * PI).powi(6) * self.omega0 * self.aspect * self.aspect))
    }

    /// E at variance ζ from W₂ sampled on Gauss nodes up to `eta_cut`,
    /// taking W₂ = 0 beyond it.
    pub fn error_of_zeta(&self, zeta: f64, eta_cut: f64) -> f64 {
        let w0 = self.w2(0.0).re;
        let gauss = |eta: f64, z: f64| (-eta * eta / (2.0 * z)).exp() / (2.0 * PI * z).sqrt();
        let weight = |eta: f64| 2.0 * gauss(eta, zeta) - gauss(eta, 2.0 * zeta);
        let rule = Rule::new(8);
        let near = rule.over(&[0.0, eta_cut], 0.5);
        let far = rule.over(&[eta_cut, 8.0 * (4.0 * zeta).sqrt().max(eta_cut)], 0.5);
        let gap = 1.0 - (-w0).exp();
        let mut deficit: f64 = near
            .iter()
            .map(|&(eta, w)| {
                let d = self.w2(eta) - w0;
                w * weight(eta) * (1.0 - d.exp().re)
            })
            .sum();
        deficit += far.iter().map(|&(eta, w)| w * weight(eta) * gap).sum::<f64>();
        (2.0 * deficit).max(0.0).sqrt()
    }
}

/// Reads a curve written by `--curve-dir`.
pub fn read_curve(cfg: DimensionlessConfig, path: &Path) -> WightmanCurve {
    let mut rd = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let samples = rd
        .records()
        .map(|r| {
            let r = r.expect("curve record");
            let f = |i: usize| r[i].parse::<f64>().expect("number");
            W2Sample {
                eta: f(0),
                re: f(1),
                im: f(2),
                error: f(3),
            }
        })
        .collect();
    WightmanCurve::from_samples(cfg, samples, 0.0).expect("valid curve")
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
