//! The boosted two-point function W₂(η) of the smeared coherent-state mode.
//!
//! With k̃¹ = r cos θ and a·k̃⊥ = r sin θ (cos φ, sin φ) the measure d³k̃/ω̃
//! becomes r sin θ dr dθ dφ / a², so the only singularity of the integrand is
//! gone. The azimuth enters only through
//!
//! ```text
//! T(ρ) = ∫₀^{2π} A(ρ cos φ)² A(ρ sin φ)² dφ,
//! ```
//!
//! which depends on the transverse collar alone and is tabulated once. The
//! remaining (r, θ) integral is done by nested globally adaptive
//! Gauss–Kronrod quadrature.
//!
//! The polar angle is split into a forward half (θ ≤ π/2) and a backward half,
//! each parametrized by its angle β from the k̃¹ axis, and the boost kinematics
//! are written through c± = r ± k̃¹ = 2r cos²(β/2), 2r sin²(β/2). This keeps
//! κ = (e^η c₊ − e^{−η} c₋)/2 accurate in the thin cone around the null
//! direction where it is small.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::{CsPair, SpectralTransforms};
use crate::error::{require_positive, Error, Result};
use crate::interp::{CubicSpline, HermiteTable, SplineEnd};
use crate::params::DimensionlessConfig;
use crate::quad::{clean_breakpoints, integrate_adaptive, Integral, Tolerance};

/// Largest |η| accepted; e^η must stay finite.
pub const MAX_RAPIDITY: f64 = 700.0;

/// |W₂(η)| / w2_zero below which the curve counts as decayed.
pub const DECAY_LEVEL: f64 = 1e-3;

/// sqrt(|k̃¹|² + a²|k̃⊥|²).
pub fn omega_tilde(k: [f64; 3], a: f64) -> f64 {
    (k[0] * k[0] + a * a * (k[1] * k[1] + k[2] * k[2])).sqrt()
}

/// Quadrature controls for the momentum integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KGridSpec {
    /// Radial truncation. `None` uses the radius beyond which the tabulated
    /// transforms vanish identically.
    pub r_max: Option<f64>,
    /// Minimum number of initial panels in r, θ and φ.
    pub radial_panels: usize,
    pub polar_panels: usize,
    pub azimuthal_panels: usize,
    /// Target error relative to w2_zero.
    pub rel_tol: f64,
    /// Panel budget of each adaptive integration.
    pub max_panels: usize,
    /// Integrate the azimuth over one quadrant and multiply by four.
    pub quadrant_symmetry: bool,
    /// Spacing of the T(ρ) table.
    pub transverse_step: f64,
}

impl Default for KGridSpec {
    fn default() -> Self {
        Self {
            r_max: None,
            radial_panels: 8,
            polar_panels: 8,
            azimuthal_panels: 8,
            rel_tol: 1e-10,
            max_panels: 4000,
            quadrant_symmetry: true,
            transverse_step: 0.01,
        }
    }
}

impl KGridSpec {
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.r_max {
            require_positive("r_max", r)?;
        }
        for (field, n) in [
            ("radial_panels", self.radial_panels),
            ("polar_panels", self.polar_panels),
            ("azimuthal_panels", self.azimuthal_panels),
        ] {
            if n < 8 {
                return Err(Error::validation(field, format!("must be >= 8, got {n}")));
            }
        }
        require_positive("rel_tol", self.rel_tol)?;
        if self.rel_tol > 1e-3 {
            return Err(Error::validation("rel_tol", "must be <= 1e-3"));
        }
        if self.max_panels < 16 {
            return Err(Error::validation("max_panels", "must be >= 16"));
        }
        require_positive("transverse_step", self.transverse_step)?;
        if self.transverse_step > 0.05 {
            return Err(Error::validation("transverse_step", "must be <= 0.05"));
        }
        Ok(())
    }

    /// Twice the panels, half the table step and a sixteenth of the tolerance.
    pub fn refined(&self) -> Self {
        Self {
            r_max: self.r_max,
            radial_panels: 2 * self.radial_panels,
            polar_panels: 2 * self.polar_panels,
            azimuthal_panels: 2 * self.azimuthal_panels,
            rel_tol: self.rel_tol / 16.0,
            max_panels: 2 * self.max_panels,
            quadrant_symmetry: self.quadrant_symmetry,
            transverse_step: 0.5 * self.transverse_step,
        }
    }
}

/// The azimuthal integral T(ρ), zero beyond `rho_max`.
#[derive(Debug, Clone)]
pub struct TransverseTable {
    table: HermiteTable<f64>,
    rho_max: f64,
}

impl TransverseTable {
    pub fn build(transforms: &SpectralTransforms, grid: &KGridSpec) -> Result<Self> {
        // Beyond √2·K_cut one of the two arguments always exceeds K_cut.
        let support = std::f64::consts::SQRT_2 * transforms.a_cutoff().k_cut;
        let step = grid.transverse_step;
        let count = (support / step).ceil() as usize + 2;
        let a0 = transforms.a(0.0);
        let scale = 2.0 * PI * a0.powi(4);
        let tol = Tolerance::absolute(1e-3 * grid.rel_tol * scale).with_max_panels(grid.max_panels);
        let (span, factor) = if grid.quadrant_symmetry {
            (0.5 * PI, 4.0)
        } else {
            (2.0 * PI, 1.0)
        };
        let panels = grid.azimuthal_panels * if grid.quadrant_symmetry { 1 } else { 4 };
        let row = |i: usize| -> Result<(f64, f64)> {
            let rho = i as f64 * step;
            // Finer initial panels once the product oscillates.
            let n = panels.max((rho * span / PI).ceil() as usize);
            let breaks: Vec<f64> = (0..=n).map(|j| span * j as f64 / n as f64).collect();
            let res: Integral<Complex64> = integrate_adaptive(
                |phi| {
                    let (s, c) = phi.sin_cos();
                    let (ac, dc) = transforms.a_with_derivative(rho * c);
                    let (as_, ds) = transforms.a_with_derivative(rho * s);
                    let value = ac * ac * as_ * as_;
                    let slope = 2.0 * ac * as_ * (dc * c * as_ + ac * ds * s);
                    Complex64::new(value, slope)
                },
                &breaks,
                tol,
            );
            if !res.converged {
                return Err(Error::Accuracy {
                    context: format!("azimuthal integral at rho = {rho}"),
                    estimate: factor * res.value.re,
                    error: factor * res.error,
                    tolerance: factor * res.tolerance,
                });
            }
            Ok((factor * res.value.re, factor * res.value.im))
        };
        // T is non-negative; the table ends after the first block that lies
        // entirely below the quadrature tolerance.
        const BLOCK: usize = 512;
        let mut values = Vec::with_capacity(count);
        let mut derivs = Vec::with_capacity(count);
        let mut start = 0;
        while start < count {
            let end = (start + BLOCK).min(count);
            let rows: Vec<Result<(f64, f64)>> = (start..end).into_par_iter().map(row).collect();
            let mut negligible = true;
            for r in rows {
                let (v, d) = r?;
                negligible &= v.abs() <= tol.abs;
                values.push(v);
                derivs.push(d);
            }
            start = end;
            if negligible && start < count {
                values.push(0.0);
                derivs.push(0.0);
                break;
            }
        }
        let rho_max = (values.len() - 1) as f64 * step;
        Ok(Self {
            table: HermiteTable::new(0.0, step, values, derivs),
            rho_max,
        })
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    #[inline]
    pub fn eval(&self, rho: f64) -> f64 {
        if rho > self.rho_max {
            return 0.0;
        }
        self.table.eval(rho).unwrap_or(0.0)
    }
}

/// One direct evaluation of W₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct W2Sample {
    pub eta: f64,
    pub re: f64,
    pub im: f64,
    /// Estimated absolute quadrature error.
    pub error: f64,
}

impl W2Sample {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Evaluates W₂(η) for one configuration. Immutable and shareable.
#[derive(Debug, Clone)]
pub struct WightmanEvaluator {
    config: DimensionlessConfig,
    grid: KGridSpec,
    transforms: SpectralTransforms,
    transverse: TransverseTable,
    prefactor: f64,
    r_max: f64,
    w0: Option<W2Sample>,
}

#[derive(Clone, Copy)]
enum Half {
    Forward,
    Backward,
}

impl WightmanEvaluator {
    pub fn new(config: DimensionlessConfig, grid: KGridSpec, transforms: SpectralTransforms) -> Result<Self> {
        config.validate()?;
        grid.validate()?;
        let transverse = TransverseTable::build(&transforms, &grid)?;
        let a = config.aspect;
        let support = (transforms.cs_cutoff().k_cut.powi(2) + (a * transverse.rho_max()).powi(2)).sqrt();
        let r_max = grid.r_max.map_or(support, |r| r.min(support));
        let prefactor = config.n / ((2.0 * PI).powi(6) * config.omega0_tilde * a * a);
        let mut ev = Self {
            config,
            grid,
            transforms,
            transverse,
            prefactor,
            r_max,
            w0: None,
        };
        ev.w0 = Some(ev.evaluate_zero()?);
        Ok(ev)
    }

    pub fn config(&self) -> &DimensionlessConfig {
        &self.config
    }

    pub fn grid(&self) -> &KGridSpec {
        &self.grid
    }

    pub fn transforms(&self) -> &SpectralTransforms {
        &self.transforms
    }

    pub fn transverse(&self) -> &TransverseTable {
        &self.transverse
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// W₂(0) as computed at construction.
    pub fn zero_sample(&self) -> W2Sample {
        self.w0.expect("set in constructor")
    }

    /// Re W₂(0), after checking that the imaginary part vanishes.
    pub fn w2_zero(&self) -> Result<f64> {
        let s = self.zero_sample();
        if s.im.abs() > 1e-8 * s.re.abs() {
            return Err(Error::Consistency(format!("Im W2(0) = {:e} for Re W2(0) = {:e}", s.im, s.re)));
        }
        if s.re < 0.0 {
            return Err(Error::Consistency(format!("W2(0) = {:e} is negative", s.re)));
        }
        Ok(s.re)
    }

    fn evaluate_zero(&self) -> Result<W2Sample> {
        // The integrand is non-negative at η = 0, so a relative pass is
        // reliable; it sets the absolute scale of the final pass.
        let rough = self.integrate(0.0, Tolerance::relative(1e-6), Tolerance::relative(1e-7).with_max_panels(64), false)?;
        let scale = rough.re.abs().max(f64::MIN_POSITIVE);
        self.evaluate_with_scale(0.0, scale)
    }

    /// W₂(η) by direct quadrature.
    pub fn w2_of_eta(&self, eta: f64) -> Result<W2Sample> {
        if eta.is_nan() || eta.abs() > MAX_RAPIDITY {
            return Err(Error::validation("eta", format!("|eta| must be <= {MAX_RAPIDITY}, got {eta}")));
        }
        if eta == 0.0 {
            if let Some(s) = self.w0 {
                return Ok(s);
            }
        }
        self.evaluate_with_scale(eta, self.zero_sample().re.abs())
    }

    fn evaluate_with_scale(&self, eta: f64, scale: f64) -> Result<W2Sample> {
        let eps = self.grid.rel_tol * scale / self.prefactor;
        let r_eff = self.r_max.min(self.config.delta_phi + 50.0);
        let outer = Tolerance::absolute(0.5 * eps).with_max_panels(self.grid.max_panels);
        let inner = Tolerance::absolute(0.5 * eps / r_eff).with_max_panels(self.grid.max_panels);
        self.integrate(eta, outer, inner, true)
    }

    /// With `strict` unset, inner integrals that miss their tolerance are
    /// accepted as they are.
    fn integrate(&self, eta: f64, outer: Tolerance, inner: Tolerance, strict: bool) -> Result<W2Sample> {
        let mut inner_error: f64 = 0.0;
        let mut inner_failure: Option<(f64, Integral<Complex64>)> = None;
        let breaks = self.radial_breakpoints(eta);
        let res = integrate_adaptive(
            |r| {
                let mut total = Complex64::new(0.0, 0.0);
                for half in [Half::Forward, Half::Backward] {
                    if let Some(i) = self.polar_integral(r, eta, half, inner) {
                        inner_error = inner_error.max(i.error);
                        if strict && !i.converged && inner_failure.is_none() {
                            inner_failure = Some((r, i));
                        }
                        total += i.value;
                    }
                }
                total
            },
            &breaks,
            outer,
        );
        let p = self.prefactor;
        let error = p * (res.error + self.r_max * inner_error);
        if let Some((r, i)) = inner_failure {
            return Err(Error::Accuracy {
                context: format!("polar integral at eta = {eta}, r = {r}"),
                estimate: p * i.value.norm(),
                error: p * i.error,
                tolerance: p * i.tolerance,
            });
        }
        if !res.converged {
            return Err(Error::Accuracy {
                context: format!("radial integral at eta = {eta}"),
                estimate: p * res.value.norm(),
                error: p * res.error,
                tolerance: p * res.tolerance,
            });
        }
        Ok(W2Sample {
            eta,
            re: p * res.value.re,
            im: p * res.value.im,
            error,
        })
    }

    fn radial_breakpoints(&self, eta: f64) -> Vec<f64> {
        let dphi = self.config.delta_phi;
        let core = self.r_max.min(dphi + 40.0);
        let n = self.grid.radial_panels;
        let mut pts: Vec<f64> = (1..n).map(|i| core * i as f64 / n as f64).collect();
        let mut r = (0.1 * (-eta.abs()).exp()).max(1e-6);
        while r < 1.0 {
            pts.push(r);
            r *= 4.0;
        }
        for d in [-3.0, 0.0, 3.0, 10.0] {
            pts.push(dphi + d);
        }
        let mut r = 2.0 * core;
        while r < self.r_max {
            pts.push(r);
            r *= 2.0;
        }
        clean_breakpoints(pts, 0.0, self.r_max)
    }

    /// ∫ over one half of the polar range at fixed r; `None` if the integrand
    /// vanishes identically there.
    fn polar_integral(&self, r: f64, eta: f64, half: Half, tol: Tolerance) -> Option<Integral<Complex64>> {
        if r <= 0.0 {
            return None;
        }
        let a = self.config.aspect;
        let kcs = self.transforms.cs_cutoff().k_cut;
        // |k̃¹| = r cos β must stay below the longitudinal cutoff, ρ = r sin β / a
        // below the transverse one.
        let lo = if kcs < r { (kcs / r).acos() } else { 0.0 };
        let hi = if a * self.transverse.rho_max() < r {
            (a * self.transverse.rho_max() / r).asin()
        } else {
            0.5 * PI
        };
        if hi <= lo {
            return None;
        }
        let breaks = self.polar_breakpoints(r, eta, half, lo, hi);
        let (ep, em) = (eta.exp(), (-eta).exp());
        Some(integrate_adaptive(|beta| self.integrand(r, beta, ep, em, half), &breaks, tol))
    }

    fn polar_breakpoints(&self, r: f64, eta: f64, half: Half, lo: f64, hi: f64) -> Vec<f64> {
        let a = self.config.aspect;
        let dphi = self.config.delta_phi;
        let n = self.grid.polar_panels;
        let mut pts: Vec<f64> = (1..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let mut rho = 1.0;
        while rho < self.transverse.rho_max() {
            let s = a * rho / r;
            if s < 1.0 {
                pts.push(s.asin());
            }
            rho *= 2.0;
        }
        for k in [1.0, dphi - 3.0, dphi, dphi + 3.0, dphi + 10.0, dphi + 30.0] {
            if k > 0.0 && k < r {
                pts.push((k / r).acos());
            }
        }
        // Where the boosted momentum κ crosses selected levels; for large |η|
        // this resolves the thin cone around the null direction.
        let (ep, em) = (eta.exp(), (-eta).exp());
        for level in [0.0, 1.0, dphi, dphi + 3.0, dphi + 10.0, dphi + 30.0, 100.0] {
            for sign in [-1.0, 1.0] {
                let q = sign * level / r;
                let s = match half {
                    Half::Forward => (ep - q) / (ep + em),
                    Half::Backward => (q + em) / (ep + em),
                };
                if s > 0.0 && s < 1.0 {
                    pts.push(2.0 * s.sqrt().asin());
                }
            }
        }
        clean_breakpoints(pts, lo, hi)
    }

    #[inline]
    fn integrand(&self, r: f64, beta: f64, ep: f64, em: f64, half: Half) -> Complex64 {
        let a = self.config.aspect;
        let w0 = self.config.omega0_tilde;
        let (sb, cb) = beta.sin_cos();
        let t = self.transverse.eval(r * sb / a);
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let h = 0.5 * beta;
        let (sh, ch) = h.sin_cos();
        let (k1, cp, cm) = match half {
            Half::Forward => (r * cb, 2.0 * r * ch * ch, 2.0 * r * sh * sh),
            Half::Backward => (-r * cb, 2.0 * r * sh * sh, 2.0 * r * ch * ch),
        };
        let kappa = 0.5 * (ep * cp - em * cm);
        let omega_b = 0.5 * (ep * cp + em * cm);
        let CsPair { c: c1, s: s1 } = self.transforms.cs(k1);
        let CsPair { c: c2, s: s2 } = self.transforms.cs(-kappa);
        let i = Complex64::i();
        let x = s1 * w0 + i * c1 * r;
        let y = s2 * w0 - i * c2 * omega_b;
        x * y * (r * sb * t)
    }
}

/// Sampling controls of a [`WightmanCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub eta_max: f64,
    /// Uniform initial spacing on [0, min(eta_max, uniform_until)].
    pub initial_step: f64,
    pub uniform_until: f64,
    /// Spacing ratio of the initial grid beyond `uniform_until`.
    pub growth: f64,
    /// Accepted interpolation residual at midpoints, relative to w2_zero.
    pub interp_tol: f64,
    pub max_samples: usize,
}

impl Default for CurveSpec {
    fn default() -> Self {
        Self {
            eta_max: 8.0 * (4.0f64 * 1e3).sqrt(),
            initial_step: 0.25,
            uniform_until: 8.0,
            growth: 1.25,
            interp_tol: 1e-7,
            max_samples: 4000,
        }
    }
}

impl CurveSpec {
    pub fn with_eta_max(eta_max: f64) -> Self {
        Self {
            eta_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("eta_max", self.eta_max)?;
        if self.eta_max > MAX_RAPIDITY {
            return Err(Error::validation("eta_max", format!("must be <= {MAX_RAPIDITY}")));
        }
        require_positive("initial_step", self.initial_step)?;
        require_positive("uniform_until", self.uniform_until)?;
        require_positive("interp_tol", self.interp_tol)?;
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return Err(Error::validation("growth", "must be > 1"));
        }
        if self.max_samples < 4 {
            return Err(Error::validation("max_samples", "must be >= 4"));
        }
        Ok(())
    }

    fn initial_grid(&self) -> Vec<f64> {
        let mut pts = vec![0.0];
        let uniform_end = self.uniform_until.min(self.eta_max);
        let n = (uniform_end / self.initial_step).ceil().max(1.0) as usize;
        pts.extend((1..=n).map(|i| uniform_end * i as f64 / n as f64));
        let mut h = uniform_end / n as f64;
        let mut x = uniform_end;
        while x < self.eta_max {
            h *= self.growth;
            x = (x + h).min(self.eta_max);
            pts.push(x);
        }
        pts
    }
}

/// W₂(η) on [0, η_max], cached as cubic splines of the real and imaginary parts.
#[derive(Debug, Clone)]
pub struct WightmanCurve {
    config: DimensionlessConfig,
    samples: Vec<W2Sample>,
    w2_zero: f64,
    eta_max: f64,
    eta_decay: Option<f64>,
    interp_residual: f64,
    re: CubicSpline,
    im: CubicSpline,
}

impl WightmanCurve {
    /// Splines through the given samples (sorted by η, starting at 0).
    pub fn from_samples(config: DimensionlessConfig, samples: Vec<W2Sample>, interp_residual: f64) -> Result<Self> {
        if samples.len() < 2 || samples[0].eta != 0.0 {
            return Err(Error::validation("samples", "need at least two samples starting at eta = 0"));
        }
        if !samples.windows(2).all(|w| w[1].eta > w[0].eta) {
            return Err(Error::validation("samples", "eta must be strictly increasing"));
        }
        let w2_zero = samples[0].re;
        if w2_zero < 0.0 || samples[0].im.abs() > 1e-8 * w2_zero {
            return Err(Error::Consistency(format!(
                "W2(0) = {} + {}i is not a non-negative real number",
                samples[0].re, samples[0].im
            )));
        }
        let knots: Vec<f64> = samples.iter().map(|s| s.eta).collect();
        let re = CubicSpline::new(
            knots.clone(),
            samples.iter().map(|s| s.re).collect(),
            SplineEnd::Clamped(0.0),
            SplineEnd::Natural,
        );
        let mut ims: Vec<f64> = samples.iter().map(|s| s.im).collect();
        ims[0] = 0.0;
        let im = CubicSpline::new(knots, ims, SplineEnd::Natural, SplineEnd::Natural);
        let eta_max = samples.last().map(|s| s.eta).unwrap_or(0.0);
        let mut eta_decay = None;
        for s in samples.iter().rev() {
            if s.value().norm() >= DECAY_LEVEL * w2_zero {
                break;
            }
            eta_decay = Some(s.eta);
        }
        Ok(Self {
            config,
            samples,
            w2_zero,
            eta_max,
            eta_decay,
            interp_residual,
            re,
            im,
        })
    }

    pub fn config(&self) -> &DimensionlessConfig {
        &self.config
    }

    pub fn samples(&self) -> &[W2Sample] {
        &self.samples
    }

    pub fn w2_zero(&self) -> f64 {
        self.w2_zero
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    /// Smallest sampled η beyond which every sample has decayed below
    /// `DECAY_LEVEL · w2_zero`.
    pub fn eta_decay(&self) -> Option<f64> {
        self.eta_decay
    }

    /// Fails unless the curve has decayed before its end.
    pub fn check_decay(&self) -> Result<f64> {
        match self.eta_decay {
            Some(e) if e < self.eta_max => Ok(e),
            _ => Err(Error::Range {
                required: f64::INFINITY,
                available: self.eta_max,
            }),
        }
    }

    /// Largest residual seen between the interpolant and direct evaluations.
    pub fn interp_residual(&self) -> f64 {
        self.interp_residual
    }

    /// Largest per-sample quadrature error.
    pub fn max_sample_error(&self) -> f64 {
        self.samples.iter().map(|s| s.error).fold(0.0, f64::max)
    }

    /// Combined error estimate of interpolated values.
    pub fn error_estimate(&self) -> f64 {
        self.max_sample_error() + self.interp_residual
    }

    /// Interpolated W₂(η), extended to η < 0 by conjugation. Arguments beyond
    /// η_max are clamped to the end of the curve.
    pub fn value(&self, eta: f64) -> Complex64 {
        let v = Complex64::new(self.re.eval(eta.abs()), self.im.eval(eta.abs()));
        if eta < 0.0 {
            v.conj()
        } else {
            v
        }
    }

    /// Writes `eta,re,im,error` rows.
    pub fn write_debug_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["eta", "re", "im", "error"]).map_err(io)?;
        for s in &self.samples {
            w.write_record([
                format!("{:.16e}", s.eta),
                format!("{:.16e}", s.re),
                format!("{:.16e}", s.im),
                format!("{:.16e}", s.error),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Samples W₂ on [0, η_max], bisecting every interval whose midpoint is not
/// reproduced by the spline to within `interp_tol · w2_zero`.
pub fn build_curve(evaluator: &WightmanEvaluator, spec: &CurveSpec) -> Result<WightmanCurve> {
    spec.validate()?;
    let w2_zero = evaluator.w2_zero()?;
    let tol = spec.interp_tol * w2_zero;
    let eval_all = |etas: &[f64]| -> Result<Vec<W2Sample>> {
        etas.par_iter().map(|&e| evaluator.w2_of_eta(e)).collect()
    };
    let mut samples = eval_all(&spec.initial_grid())?;
    let cfg = *evaluator.config();
    let mut curve = WightmanCurve::from_samples(cfg, samples.clone(), 0.0)?;
    // Intervals still to be checked, as indices into `samples` of their left end.
    let mut pending: Vec<(f64, f64)> = samples.windows(2).map(|w| (w[0].eta, w[1].eta)).collect();
    let mut residual: f64 = 0.0;
    while !pending.is_empty() {
        let mids: Vec<f64> = pending.iter().map(|&(a, b)| 0.5 * (a + b)).collect();
        let new = eval_all(&mids)?;
        let mut next = Vec::new();
        for ((&(a, b), &m), s) in pending.iter().zip(&mids).zip(&new) {
            let d = (curve.value(m) - s.value()).norm();
            residual = residual.max(d.min(tol));
            if d > tol {
                next.push((a, m));
                next.push((m, b));
            }
        }
        samples.extend(new);
        samples.sort_by(|x, y| x.eta.total_cmp(&y.eta));
        if samples.len() > spec.max_samples {
            return Err(Error::Accuracy {
                context: format!("rapidity curve needs more than {} samples", spec.max_samples),
                estimate: w2_zero,
                error: tol,
                tolerance: tol,
            });
        }
        curve = WightmanCurve::from_samples(cfg, samples.clone(), residual)?;
        pending = next;
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::TransformSpec;

    #[test]
    fn omega_examples() {
        assert_eq!(omega_tilde([1.0, 0.0, 0.0], 1.0), 1.0);
        assert_eq!(omega_tilde([0.0, 1.0, 0.0], 2.0), 2.0);
        assert_eq!(omega_tilde([3.0, 4.0, 0.0], 1.0), 5.0);
    }

    #[test]
    fn grid_validation() {
        assert!(KGridSpec::default().validate().is_ok());
        let bad = KGridSpec {
            polar_panels: 4,
            ..KGridSpec::default()
        };
        assert!(bad.validate().is_err());
        let bad = KGridSpec {
            r_max: Some(0.0),
            ..KGridSpec::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn initial_grid_covers_range() {
        let g = CurveSpec::with_eta_max(20.0).initial_grid();
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 20.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn transverse_table_at_origin() {
        let tr = SpectralTransforms::build(1.0, 1.0, 1.0, 0.0, &TransformSpec::default()).unwrap();
        let t = TransverseTable::build(&tr, &KGridSpec::default()).unwrap();
        assert!((t.eval(0.0) - 2.0 * PI * 1.5f64.powi(4)).abs() < 1e-9);
        assert_eq!(t.eval(t.rho_max() + 1.0), 0.0);
    }
}
