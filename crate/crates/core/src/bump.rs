//! Smooth bump profiles of the enlarged detector region and their
//! oscillatory Fourier-type transforms.
//!
//! In dimensionless coordinates the spatial bump factorizes into one
//! longitudinal profile on (−1−δ, 0) and two identical transverse profiles on
//! (−(1+δ)/2, (1+δ)/2). The momentum integrand of the two-point function only
//! sees these profiles through three transforms:
//!
//! * `A(k) = ∫ χ⊥(x) e^{ikx} dx` (real, even),
//! * `C(k) = ∫ χ∥(x) cos(φ + Δφ x) e^{ikx} dx`,
//! * `S(k) = ∫ χ∥(x) sin(φ + Δφ x) e^{ikx} dx`.
//!
//! Direct evaluation uses panels split at the plateau edges, graded through
//! the transition zones and sized to the oscillation frequency. Because the
//! transforms are needed millions of times per rapidity sample they are also
//! tabulated once with exact derivatives and interpolated by cubic Hermite
//! polynomials.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::interp::HermiteTable;
use crate::params::DimensionlessConfig;
use crate::quad::{QuadValue, WG10, WGK21, XGK21};

/// exp(−1/s) for s > 0, zero otherwise.
pub fn phi_kernel(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth transition from 0 (s ≤ 0) to 1 (s ≥ 1).
pub fn theta(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = phi_kernel(s);
    let b = phi_kernel(1.0 - s);
    a / (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisKind {
    /// Along the beam, support (−1−δ, 0).
    Longitudinal,
    /// Across the beam, even, support (−(1+δ)/2, (1+δ)/2).
    Transverse,
}

/// One factor of the product bump, with collar width `smoothing` (δ̃).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisBump {
    kind: AxisKind,
    smoothing: f64,
}

impl AxisBump {
    pub fn new(kind: AxisKind, smoothing: f64) -> Result<Self> {
        require_positive("smoothing", smoothing)?;
        Ok(Self { kind, smoothing })
    }

    pub fn longitudinal(smoothing: f64) -> Result<Self> {
        Self::new(AxisKind::Longitudinal, smoothing)
    }

    pub fn transverse(smoothing: f64) -> Result<Self> {
        Self::new(AxisKind::Transverse, smoothing)
    }

    pub fn kind(&self) -> AxisKind {
        self.kind
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    /// Midpoint of the profile.
    pub fn center(&self) -> f64 {
        match self.kind {
            AxisKind::Longitudinal => -0.5 * (1.0 + self.smoothing),
            AxisKind::Transverse => 0.0,
        }
    }

    /// Open support interval.
    pub fn support(&self) -> (f64, f64) {
        let h = 0.5 * (1.0 + self.smoothing);
        (self.center() - h, self.center() + h)
    }

    /// Closed interval on which the profile equals one.
    pub fn plateau(&self) -> (f64, f64) {
        (self.center() - 0.5, self.center() + 0.5)
    }

    pub fn profile(&self, x: f64) -> f64 {
        let d = self.smoothing;
        theta(1.0 + 1.0 / d - (2.0 / d) * (x - self.center()).abs())
    }
}

/// The profile value at `x`.
pub fn chi_axis(x: f64, bump: &AxisBump) -> f64 {
    bump.profile(x)
}

/// Sub-panels per transition zone; the profile has an essential singularity
/// at the support edge, so the zone is graded rather than left to one rule.
const TRANSITION_SUBPANELS: usize = 8;

/// Absolute tolerance of the direct transform quadrature.
pub const DIRECT_TOLERANCE: f64 = 1e-10;

/// Quadrature nodes over the support of a profile, resolving oscillations up
/// to `k_osc`, with Kronrod weights and the embedded Gauss weights.
#[derive(Debug, Clone)]
struct NodeSet {
    x: Vec<f64>,
    wk: Vec<f64>,
    wg: Vec<f64>,
}

impl NodeSet {
    fn new(bump: &AxisBump, k_osc: f64, refine: usize) -> Self {
        let (s0, s1) = bump.support();
        let (p0, p1) = bump.plateau();
        let zone = 0.5 * bump.smoothing;
        let grade = TRANSITION_SUBPANELS * refine;
        let mut edges: Vec<f64> = (0..grade).map(|i| s0 + zone * i as f64 / grade as f64).collect();
        edges.push(p0);
        edges.extend((0..grade).map(|i| p1 + zone * i as f64 / grade as f64));
        edges.push(s1);
        let mut x = Vec::new();
        let mut wk = Vec::new();
        let mut wg = Vec::new();
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let width = b - a;
            let count = ((k_osc.abs() * width / (2.0 * PI)).ceil() as usize).max(1) * refine;
            for m in 0..count {
                let lo = a + width * m as f64 / count as f64;
                let hi = a + width * (m + 1) as f64 / count as f64;
                let c = 0.5 * (lo + hi);
                let h = 0.5 * (hi - lo);
                for j in 0..11 {
                    let gauss = if j % 2 == 1 { WG10[j / 2] } else { 0.0 };
                    if j == 10 {
                        x.push(c);
                        wk.push(h * WGK21[j]);
                        wg.push(0.0);
                    } else {
                        for sign in [-1.0, 1.0] {
                            x.push(c + sign * h * XGK21[j]);
                            wk.push(h * WGK21[j]);
                            wg.push(h * gauss);
                        }
                    }
                }
            }
        }
        Self { x, wk, wg }
    }
}

fn transverse_direct(k: f64, bump: &AxisBump, refine: usize) -> (f64, f64) {
    let nodes = NodeSet::new(bump, k, refine);
    let (mut kr, mut ga) = (0.0, 0.0);
    for ((&x, &wk), &wg) in nodes.x.iter().zip(&nodes.wk).zip(&nodes.wg) {
        let f = bump.profile(x) * (k * x).cos();
        kr += wk * f;
        ga += wg * f;
    }
    (kr, (kr - ga).abs())
}

fn longitudinal_direct(
    k: f64,
    bump: &AxisBump,
    delta_phi: f64,
    phase: f64,
    refine: usize,
) -> (CsPair, f64) {
    let nodes = NodeSet::new(bump, k.abs() + delta_phi.abs(), refine);
    let mut kr = CsPair::zero();
    let mut ga = CsPair::zero();
    for ((&x, &wk), &wg) in nodes.x.iter().zip(&nodes.wk).zip(&nodes.wg) {
        let chi = bump.profile(x);
        let (s, c) = (phase + delta_phi * x).sin_cos();
        let e = Complex64::from_polar(chi, k * x);
        let v = CsPair { c: e * c, s: e * s };
        kr = kr + v * wk;
        ga = ga + v * wg;
    }
    let err = (kr.c - ga.c).norm().max((kr.s - ga.s).norm());
    (kr, err)
}

/// Transverse transform `A(k)` with collar `dbig_l_tilde`, by direct quadrature.
pub fn transform_a(k: f64, dbig_l_tilde: f64) -> Result<f64> {
    require_finite("k", k)?;
    let bump = AxisBump::transverse(dbig_l_tilde)?;
    let mut best = (0.0, f64::INFINITY);
    for refine in [1, 2, 4] {
        let (v, e) = transverse_direct(k, &bump, refine);
        if e <= DIRECT_TOLERANCE {
            return Ok(v);
        }
        best = (v, e);
    }
    Err(Error::Accuracy {
        context: format!("transverse transform at k = {k}"),
        estimate: best.0,
        error: best.1,
        tolerance: DIRECT_TOLERANCE,
    })
}

/// Longitudinal transforms `(C(k), S(k))` by direct quadrature.
pub fn transform_cs(k: f64, dl_tilde: f64, delta_phi: f64, phase: f64) -> Result<(Complex64, Complex64)> {
    require_finite("k", k)?;
    require_finite("delta_phi", delta_phi)?;
    require_finite("phase", phase)?;
    let bump = AxisBump::longitudinal(dl_tilde)?;
    let mut best = (CsPair::zero(), f64::INFINITY);
    for refine in [1, 2, 4] {
        let (v, e) = longitudinal_direct(k, &bump, delta_phi, phase, refine);
        if e <= DIRECT_TOLERANCE {
            return Ok((v.c, v.s));
        }
        best = (v, e);
    }
    Err(Error::Accuracy {
        context: format!("longitudinal transform at k = {k}"),
        estimate: best.0.c.norm(),
        error: best.1,
        tolerance: DIRECT_TOLERANCE,
    })
}

/// The pair `(C(k), S(k))`, also used as a quadrature value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsPair {
    pub c: Complex64,
    pub s: Complex64,
}

impl CsPair {
    pub fn conj(self) -> Self {
        Self {
            c: self.c.conj(),
            s: self.s.conj(),
        }
    }
}

impl Add for CsPair {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            c: self.c + o.c,
            s: self.s + o.s,
        }
    }
}

impl Sub for CsPair {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            c: self.c - o.c,
            s: self.s - o.s,
        }
    }
}

impl Mul<f64> for CsPair {
    type Output = Self;
    fn mul(self, w: f64) -> Self {
        Self {
            c: self.c * w,
            s: self.s * w,
        }
    }
}

impl QuadValue for CsPair {
    fn zero() -> Self {
        Self {
            c: Complex64::new(0.0, 0.0),
            s: Complex64::new(0.0, 0.0),
        }
    }
    fn magnitude(&self) -> f64 {
        self.c.norm().max(self.s.norm())
    }
}

/// Numerical controls for the transform tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    /// Spacing of the Hermite tables in k.
    pub table_step: f64,
    /// Tables stop once |transform| stays below this fraction of its peak.
    pub tail_threshold: f64,
    /// Hard upper limit on the table range.
    pub max_cutoff: f64,
}

impl Default for TransformSpec {
    fn default() -> Self {
        Self {
            table_step: 0.01,
            tail_threshold: 1e-10,
            max_cutoff: 4096.0,
        }
    }
}

impl TransformSpec {
    pub fn validate(&self) -> Result<()> {
        require_positive("table_step", self.table_step)?;
        require_positive("tail_threshold", self.tail_threshold)?;
        require_positive("max_cutoff", self.max_cutoff)?;
        if self.table_step > 0.05 {
            return Err(Error::validation("table_step", "must be <= 0.05 to resolve the transforms"));
        }
        Ok(())
    }
}

/// Where a transform has decayed below the tail threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    /// Transform is treated as zero for |k| above this.
    pub k_cut: f64,
    /// Largest |value| / peak seen beyond `k_cut` during the scan.
    pub tail_bound: f64,
    pub peak: f64,
}

/// Scans `magnitude(k)` on a fine grid to find where it stays below
/// `threshold * peak`.
fn find_cutoff(mut magnitude: impl FnMut(f64) -> f64, threshold: f64, max_cutoff: f64) -> Cutoff {
    const STEP: f64 = 0.5;
    const LOOKAHEAD: f64 = 64.0;
    let mut peak: f64 = 0.0;
    let mut samples = Vec::new();
    let mut k = 0.0;
    // First pass finds the peak region; keep going until well past the last exceedance.
    let mut last_above = 0.0;
    while k <= max_cutoff + LOOKAHEAD {
        let m = magnitude(k);
        samples.push((k, m));
        if m > peak {
            peak = m;
        }
        if m > threshold * peak {
            last_above = k;
        }
        if k > last_above + LOOKAHEAD && k > 32.0 {
            break;
        }
        k += STEP;
    }
    let k_cut = (last_above + STEP).min(max_cutoff);
    let tail = samples
        .iter()
        .filter(|(k, _)| *k > k_cut)
        .map(|(_, m)| *m)
        .fold(0.0, f64::max);
    Cutoff {
        k_cut,
        tail_bound: if peak > 0.0 { tail / peak } else { 0.0 },
        peak,
    }
}

/// Lazily sized node sets for scanning over wide k ranges.
struct BandedNodes {
    bump: AxisBump,
    extra: f64,
    bands: Vec<(f64, NodeSet)>,
}

impl BandedNodes {
    fn new(bump: AxisBump, extra: f64) -> Self {
        Self {
            bump,
            extra,
            bands: Vec::new(),
        }
    }

    fn for_k(&mut self, k: f64) -> &NodeSet {
        let need = k.abs() + self.extra;
        let idx = match self.bands.iter().position(|(kmax, _)| *kmax >= need) {
            Some(i) => i,
            None => {
                let mut kmax = 64.0;
                while kmax < need {
                    kmax *= 2.0;
                }
                self.bands.push((kmax, NodeSet::new(&self.bump, kmax, 1)));
                self.bands.len() - 1
            }
        };
        &self.bands[idx].1
    }
}

/// Evaluates `Σ_j coeff_j · e^{ikx_j}` and its k-derivative on the grid
/// `k_m = m·step`, `m = 0..count`, for several real coefficient vectors at once.
fn tabulate_sums<const M: usize>(x: &[f64], coeffs: [&[f64]; M], step: f64, count: usize) -> Vec<[(Complex64, Complex64); M]> {
    const CHUNK: usize = 128;
    let chunks: Vec<usize> = (0..count).step_by(CHUNK).collect();
    chunks
        .par_iter()
        .flat_map_iter(|&m0| {
            let m1 = (m0 + CHUNK).min(count);
            let k0 = m0 as f64 * step;
            let mut phase: Vec<Complex64> = x.iter().map(|&xj| Complex64::from_polar(1.0, k0 * xj)).collect();
            let rot: Vec<Complex64> = x.iter().map(|&xj| Complex64::from_polar(1.0, step * xj)).collect();
            let mut out = Vec::with_capacity(m1 - m0);
            for _ in m0..m1 {
                let mut acc = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); M];
                for j in 0..x.len() {
                    let e = phase[j];
                    let xe = e * x[j];
                    for (slot, coeff) in acc.iter_mut().zip(coeffs.iter()) {
                        let c = coeff[j];
                        slot.0 += e * c;
                        slot.1 += xe * c;
                    }
                    phase[j] = e * rot[j];
                }
                // d/dk e^{ikx} = i x e^{ikx}
                for slot in acc.iter_mut() {
                    slot.1 *= Complex64::i();
                }
                out.push(acc);
            }
            out
        })
        .collect()
}

/// Tabulated transforms for one configuration. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SpectralTransforms {
    longitudinal: AxisBump,
    transverse: AxisBump,
    delta_phi: f64,
    phase: f64,
    spec: TransformSpec,
    a_table: HermiteTable<f64>,
    a_cutoff: Cutoff,
    cs_table: HermiteTable<CsPair>,
    cs_cutoff: Cutoff,
}

impl SpectralTransforms {
    pub fn for_config(cfg: &DimensionlessConfig, spec: &TransformSpec) -> Result<Self> {
        Self::build(cfg.dl_tilde, cfg.dbig_l_tilde, cfg.delta_phi, cfg.arg_alpha0, spec)
    }

    pub fn build(dl_tilde: f64, dbig_l_tilde: f64, delta_phi: f64, phase: f64, spec: &TransformSpec) -> Result<Self> {
        spec.validate()?;
        require_finite("delta_phi", delta_phi)?;
        require_finite("phase", phase)?;
        let longitudinal = AxisBump::longitudinal(dl_tilde)?;
        let transverse = AxisBump::transverse(dbig_l_tilde)?;

        // Transverse table.
        let mut bands = BandedNodes::new(transverse, 0.0);
        let a_cutoff = find_cutoff(
            |k| {
                let n = bands.for_k(k);
                n.x.iter().zip(&n.wk).map(|(&x, &w)| w * transverse.profile(x) * (k * x).cos()).sum::<f64>().abs()
            },
            spec.tail_threshold,
            spec.max_cutoff,
        );
        let a_table = {
            let count = (a_cutoff.k_cut / spec.table_step).ceil() as usize + 2;
            let kmax = (count - 1) as f64 * spec.table_step;
            let nodes = NodeSet::new(&transverse, kmax, 1);
            let coeff: Vec<f64> = nodes.x.iter().zip(&nodes.wk).map(|(&x, &w)| w * transverse.profile(x)).collect();
            let sums = tabulate_sums(&nodes.x, [&coeff], spec.table_step, count);
            Self::check_table_accuracy(&format!("transverse table at k = {kmax}"), transverse_direct(kmax, &transverse, 1).1)?;
            let values = sums.iter().map(|s| s[0].0.re).collect();
            let derivs = sums.iter().map(|s| s[0].1.re).collect();
            HermiteTable::new(0.0, spec.table_step, values, derivs)
        };

        // Longitudinal tables; C(−k) = conj C(k) so only k ≥ 0 is stored.
        let mut bands = BandedNodes::new(longitudinal, delta_phi.abs());
        let cs_cutoff = find_cutoff(
            |k| {
                let n = bands.for_k(k);
                let mut m: f64 = 0.0;
                for sign in [-1.0, 1.0] {
                    let mut v = CsPair::zero();
                    for (&x, &w) in n.x.iter().zip(&n.wk) {
                        let chi = longitudinal.profile(x);
                        let (s, c) = (phase + delta_phi * x).sin_cos();
                        let e = Complex64::from_polar(w * chi, sign * k * x);
                        v = v + CsPair { c: e * c, s: e * s };
                    }
                    m = m.max(v.magnitude());
                }
                m
            },
            spec.tail_threshold,
            spec.max_cutoff,
        );
        let cs_table = {
            let count = (cs_cutoff.k_cut / spec.table_step).ceil() as usize + 2;
            let kmax = (count - 1) as f64 * spec.table_step;
            let nodes = NodeSet::new(&longitudinal, kmax + delta_phi.abs(), 1);
            let (cc, ss): (Vec<f64>, Vec<f64>) = nodes
                .x
                .iter()
                .zip(&nodes.wk)
                .map(|(&x, &w)| {
                    let chi = w * longitudinal.profile(x);
                    let (s, c) = (phase + delta_phi * x).sin_cos();
                    (chi * c, chi * s)
                })
                .unzip();
            let sums = tabulate_sums(&nodes.x, [&cc, &ss], spec.table_step, count);
            for k in [kmax, -kmax] {
                let err = longitudinal_direct(k, &longitudinal, delta_phi, phase, 1).1;
                Self::check_table_accuracy(&format!("longitudinal table at k = {k}"), err)?;
            }
            let values = sums.iter().map(|s| CsPair { c: s[0].0, s: s[1].0 }).collect();
            let derivs = sums.iter().map(|s| CsPair { c: s[0].1, s: s[1].1 }).collect();
            HermiteTable::new(0.0, spec.table_step, values, derivs)
        };

        Ok(Self {
            longitudinal,
            transverse,
            delta_phi,
            phase,
            spec: *spec,
            a_table,
            a_cutoff,
            cs_table,
            cs_cutoff,
        })
    }

    fn check_table_accuracy(context: &str, err: f64) -> Result<()> {
        if err > DIRECT_TOLERANCE {
            return Err(Error::Accuracy {
                context: context.to_string(),
                estimate: f64::NAN,
                error: err,
                tolerance: DIRECT_TOLERANCE,
            });
        }
        Ok(())
    }

    pub fn spec(&self) -> &TransformSpec {
        &self.spec
    }

    pub fn longitudinal(&self) -> &AxisBump {
        &self.longitudinal
    }

    pub fn transverse(&self) -> &AxisBump {
        &self.transverse
    }

    pub fn delta_phi(&self) -> f64 {
        self.delta_phi
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn a_cutoff(&self) -> Cutoff {
        self.a_cutoff
    }

    pub fn cs_cutoff(&self) -> Cutoff {
        self.cs_cutoff
    }

    /// Largest momentum at which any transform is non-zero.
    pub fn k_cut(&self) -> f64 {
        self.a_cutoff.k_cut.max(self.cs_cutoff.k_cut)
    }

    /// Interpolated `A(k)`; zero beyond the cutoff.
    #[inline]
    pub fn a(&self, k: f64) -> f64 {
        let k = k.abs();
        if k > self.a_cutoff.k_cut {
            return 0.0;
        }
        self.a_table.eval(k).unwrap_or(0.0)
    }

    #[inline]
    pub fn a_with_derivative(&self, k: f64) -> (f64, f64) {
        let ka = k.abs();
        if ka > self.a_cutoff.k_cut {
            return (0.0, 0.0);
        }
        match self.a_table.eval_with_derivative(ka) {
            Some((v, d)) => (v, if k < 0.0 { -d } else { d }),
            None => (0.0, 0.0),
        }
    }

    /// Interpolated `(C(k), S(k))`; zero beyond the cutoff.
    #[inline]
    pub fn cs(&self, k: f64) -> CsPair {
        let ka = k.abs();
        if ka > self.cs_cutoff.k_cut {
            return CsPair::zero();
        }
        match self.cs_table.eval(ka) {
            Some(v) if k < 0.0 => v.conj(),
            Some(v) => v,
            None => CsPair::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_transition_values() {
        assert!((phi_kernel(1.0) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(phi_kernel(-1.0), 0.0);
        assert_eq!(phi_kernel(0.0), 0.0);
        assert!((theta(0.5) - 0.5).abs() < 1e-16);
        assert_eq!(theta(0.0), 0.0);
        assert_eq!(theta(1.0), 1.0);
        assert!((theta(0.3) + theta(0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transition_is_complementary_and_monotone() {
        let mut prev = 0.0;
        for i in 0..=1000 {
            let s = -0.5 + 2.0 * i as f64 / 1000.0;
            let t = theta(s);
            assert!((t + theta(1.0 - s) - 1.0).abs() < 1e-12);
            assert!(t >= prev);
            prev = t;
        }
    }

    #[test]
    fn profile_examples() {
        let l = AxisBump::longitudinal(1.0).unwrap();
        let t = AxisBump::transverse(1.0).unwrap();
        assert_eq!(chi_axis(-1.0, &l), 1.0);
        assert!((chi_axis(-0.25, &l) - 0.5).abs() < 1e-15);
        assert_eq!(chi_axis(1.0, &t), 0.0);
        assert_eq!(chi_axis(-1.0, &t), 0.0);
        assert_eq!(l.support(), (-2.0, 0.0));
        assert_eq!(l.plateau(), (-1.5, -0.5));
        assert_eq!(t.support(), (-1.0, 1.0));
        assert_eq!(t.plateau(), (-0.5, 0.5));
    }

    #[test]
    fn profile_support_and_plateau_hold_for_other_collars() {
        for d in [0.1, 0.4, 1.0, 2.5] {
            for bump in [AxisBump::longitudinal(d).unwrap(), AxisBump::transverse(d).unwrap()] {
                let (s0, s1) = bump.support();
                let (p0, p1) = bump.plateau();
                for i in 0..=400 {
                    let x = s0 - 0.5 + (s1 - s0 + 1.0) * i as f64 / 400.0;
                    let v = bump.profile(x);
                    assert!((0.0..=1.0).contains(&v));
                    if x <= s0 || x >= s1 {
                        assert_eq!(v, 0.0, "d={d} x={x}");
                    }
                    if x >= p0 && x <= p1 {
                        assert_eq!(v, 1.0, "d={d} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn direct_transform_areas() {
        assert!((transform_a(0.0, 1.0).unwrap() - 1.5).abs() < 1e-12);
        let (c, s) = transform_cs(0.0, 1.0, 0.0, 0.0).unwrap();
        assert!((c - Complex64::new(1.5, 0.0)).norm() < 1e-12);
        assert!(s.norm() < 1e-15);
        // Area is 1 + δ/2 for any collar.
        assert!((transform_a(0.0, 0.4).unwrap() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn sine_part_vanishes_without_phase() {
        for k in [-7.0, 0.0, 0.3, 25.0] {
            let (_, s) = transform_cs(k, 1.0, 0.0, 0.0).unwrap();
            assert!(s.norm() < 1e-15);
        }
    }

    #[test]
    fn conjugate_symmetry_of_direct_transforms() {
        let a = transform_a(3.7, 1.0).unwrap();
        assert!((a - transform_a(-3.7, 1.0).unwrap()).abs() < 1e-14);
        let (c1, s1) = transform_cs(2.1, 1.0, 10.0, PI / 2.0).unwrap();
        let (c2, s2) = transform_cs(-2.1, 1.0, 10.0, PI / 2.0).unwrap();
        assert!((c1 - c2.conj()).norm() < 1e-13);
        assert!((s1 - s2.conj()).norm() < 1e-13);
    }

    #[test]
    fn tables_match_direct_evaluation() {
        let tr = SpectralTransforms::build(1.0, 1.0, 10.0, 0.3, &TransformSpec::default()).unwrap();
        for k in [0.0, 0.004, 1.234, -5.55, 10.0, -10.0, 33.3, 101.7] {
            let a = transform_a(k, 1.0).unwrap();
            assert!((tr.a(k) - a).abs() < 1e-9, "A at {k}");
            let (c, s) = transform_cs(k, 1.0, 10.0, 0.3).unwrap();
            let v = tr.cs(k);
            assert!((v.c - c).norm() < 1e-9, "C at {k}");
            assert!((v.s - s).norm() < 1e-9, "S at {k}");
        }
        assert_eq!(tr.a(tr.a_cutoff().k_cut + 1.0), 0.0);
        assert!(tr.a_cutoff().tail_bound <= 1e-10);
    }

    #[test]
    fn table_derivative_matches_finite_difference() {
        let tr = SpectralTransforms::build(1.0, 1.0, 1.0, 0.0, &TransformSpec::default()).unwrap();
        for k in [-3.3, 0.7, 12.0] {
            let (_, d) = tr.a_with_derivative(k);
            let h = 1e-4;
            let fd = (transform_a(k + h, 1.0).unwrap() - transform_a(k - h, 1.0).unwrap()) / (2.0 * h);
            assert!((d - fd).abs() < 1e-6, "k = {k}: {d} vs {fd}");
        }
    }
}
