//! The click-probability bound min_ζ [E_ζ + exp(π²/2ζ)·√P_dark]² and
//! parameter sweeps over configurations and dark-count probabilities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::{SpectralTransforms, TransformSpec};
use crate::errfun::{deficit, error_of_zeta, norm_factor, required_eta_max};
use crate::error::{require_positive, Error, Result};
use crate::params::DimensionlessConfig;
use crate::wightman::{build_curve, CurveSpec, KGridSpec, WightmanCurve, WightmanEvaluator};

/// Bound on ∫ℝ |2G_ζ − G_{2ζ}| used to propagate curve errors.
const WEIGHT_L1: f64 = 3.0;

fn check_pdark(pdark: f64) -> Result<()> {
    if pdark.is_finite() && (0.0..=1.0).contains(&pdark) {
        Ok(())
    } else {
        Err(Error::validation("pdark", format!("must lie in [0, 1], got {pdark}")))
    }
}

/// [E_ζ + exp(π²/2ζ)·√P_dark]².
pub fn envelope(zeta: f64, pdark: f64, curve: &WightmanCurve) -> Result<f64> {
    check_pdark(pdark)?;
    let e = error_of_zeta(zeta, curve)?;
    let n = norm_factor(zeta)?;
    Ok((e + n * pdark.sqrt()).powi(2))
}

/// Log-grid scan over ζ followed by golden-section refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaSearch {
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub grid_points: usize,
    /// Relative width of the final bracket in ζ.
    pub rel_tol: f64,
}

impl Default for ZetaSearch {
    fn default() -> Self {
        Self {
            zeta_min: 1e-2,
            zeta_max: 1e3,
            grid_points: 60,
            rel_tol: 1e-3,
        }
    }
}

impl ZetaSearch {
    pub fn validate(&self) -> Result<()> {
        require_positive("zeta_min", self.zeta_min)?;
        require_positive("zeta_max", self.zeta_max)?;
        if self.zeta_min >= self.zeta_max {
            return Err(Error::validation("zeta_min", "must be below zeta_max"));
        }
        if self.grid_points < 3 {
            return Err(Error::validation("grid_points", "must be >= 3"));
        }
        require_positive("rel_tol", self.rel_tol)?;
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = (self.zeta_min.ln(), self.zeta_max.ln());
        let n = self.grid_points - 1;
        (0..=n).map(|i| (lo + (hi - lo) * i as f64 / n as f64).exp()).collect()
    }

    /// Rapidity range a curve needs to serve every ζ of the search.
    pub fn eta_max(&self) -> f64 {
        required_eta_max(self.zeta_max)
    }
}

/// How the minimum was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Best envelope value on the coarse grid.
    pub grid_min: f64,
    pub grid_failures: usize,
    /// Envelope evaluations including refinement.
    pub evaluations: usize,
    /// Width of the final bracket relative to ζ_opt.
    pub bracket: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub pdark: f64,
    pub pmax: f64,
    pub zeta_opt: Option<f64>,
    pub e_opt: f64,
    pub informative: bool,
    pub diagnostics: Option<Diagnostics>,
}

/// P_click^max for one dark-count probability.
pub fn minimize_bound(pdark: f64, curve: &WightmanCurve, search: &ZetaSearch) -> Result<BoundResult> {
    check_pdark(pdark)?;
    search.validate()?;
    if pdark == 0.0 {
        return Ok(BoundResult {
            pdark,
            pmax: 0.0,
            zeta_opt: None,
            e_opt: 0.0,
            informative: true,
            diagnostics: None,
        });
    }
    let sqrt_p = pdark.sqrt();
    let eval = |zeta: f64| -> Result<(f64, f64)> {
        let e = error_of_zeta(zeta, curve)?;
        let n = norm_factor(zeta)?;
        Ok(((e + n * sqrt_p).powi(2), e))
    };

    let grid = search.grid();
    let values: Vec<Result<(f64, f64)>> = grid.iter().map(|&z| eval(z)).collect();
    let mut best: Option<(usize, f64, f64)> = None;
    let mut failures = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match v {
            Ok((b, e)) => {
                if best.is_none_or(|(_, bb, _)| *b < bb) {
                    best = Some((i, *b, *e));
                }
            }
            Err(err) => failures.push(err),
        }
    }
    let Some((i, grid_min, grid_e)) = best else {
        let mut kinds: Vec<&str> = failures.iter().map(|e| e.kind()).collect();
        kinds.dedup();
        return Err(Error::Minimization(format!(
            "all {} grid points failed ({}); first: {}",
            grid.len(),
            kinds.join(", "),
            failures[0]
        )));
    };

    // Golden section in ln ζ on the neighbouring grid cells.
    let mut lo = grid[i.saturating_sub(1)].ln();
    let mut hi = grid[(i + 1).min(grid.len() - 1)].ln();
    let mut evaluations = grid.len();
    let (mut zeta_opt, mut pmax, mut e_opt) = (grid[i], grid_min, grid_e);
    let mut consider = |z: f64, r: &Result<(f64, f64)>| {
        if let Ok((b, e)) = r {
            if *b < pmax {
                (zeta_opt, pmax, e_opt) = (z, *b, *e);
            }
        }
    };
    let score = |r: &Result<(f64, f64)>| r.as_ref().map_or(f64::INFINITY, |(b, _)| *b);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let stop = search.rel_tol.ln_1p();
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = eval(x1.exp());
    let mut f2 = eval(x2.exp());
    evaluations += 2;
    consider(x1.exp(), &f1);
    consider(x2.exp(), &f2);
    while hi - lo > stop {
        if score(&f1) <= score(&f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = eval(x1.exp());
            consider(x1.exp(), &f1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = eval(x2.exp());
            consider(x2.exp(), &f2);
        }
        evaluations += 1;
    }
    Ok(BoundResult {
        pdark,
        pmax,
        zeta_opt: Some(zeta_opt),
        e_opt,
        informative: pmax < 1.0,
        diagnostics: Some(Diagnostics {
            grid_min,
            grid_failures: failures.len(),
            evaluations,
            bracket: (hi - lo).exp_m1(),
        }),
    })
}

/// Estimated absolute error of `result.pmax` caused by errors in the curve.
pub fn pmax_error(result: &BoundResult, curve: &WightmanCurve) -> f64 {
    let Some(zeta) = result.zeta_opt else {
        return 0.0;
    };
    let quad = deficit(zeta, curve).map(|(_, e)| e).unwrap_or(f64::INFINITY);
    let dd = WEIGHT_L1 * 2.0 * curve.error_estimate() + quad;
    let de = if result.e_opt > 0.0 {
        (dd / (2.0 * result.e_opt)).min(dd.sqrt())
    } else {
        dd.sqrt()
    };
    2.0 * result.pmax.sqrt() * de
}

/// Log-spaced dark-count probabilities 10^e for e from `min_exp` to `max_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdarkGrid {
    pub min_exp: f64,
    pub max_exp: f64,
    pub points: usize,
}

impl Default for PdarkGrid {
    fn default() -> Self {
        Self::per_decade(-12, -1, 1)
    }
}

impl PdarkGrid {
    /// `points_per_decade` points per decade, both ends included.
    pub fn per_decade(min_exp: i32, max_exp: i32, points_per_decade: usize) -> Self {
        let decades = (max_exp - min_exp).max(0) as usize;
        Self {
            min_exp: min_exp as f64,
            max_exp: max_exp as f64,
            points: decades * points_per_decade.max(1) + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_exp.is_finite() && self.max_exp.is_finite()) {
            return Err(Error::validation("pdark_min_exp", "exponents must be finite"));
        }
        if self.max_exp > 0.0 {
            return Err(Error::validation("pdark_max_exp", "must be <= 0 so that pdark <= 1"));
        }
        if self.min_exp > self.max_exp {
            return Err(Error::validation("pdark_min_exp", "must not exceed pdark_max_exp"));
        }
        if self.points == 0 {
            return Err(Error::validation("pdark_points", "must be >= 1"));
        }
        if self.points == 1 && self.min_exp != self.max_exp {
            return Err(Error::validation("pdark_points", "a single point needs equal exponents"));
        }
        Ok(())
    }

    pub fn exponents(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min_exp];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let e = self.min_exp + (self.max_exp - self.min_exp) * i as f64 / n;
                // Snap to the nearest multiple of 1e-9 so grid exponents are exact.
                (e * 1e9).round() / 1e9
            })
            .collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.exponents().into_iter().map(|e| 10f64.powf(e)).collect()
    }
}

/// Every numerical control of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Numerics {
    pub transforms: TransformSpec,
    pub grid: KGridSpec,
    /// Curve sampling; `eta_max` is replaced by the value the ζ search needs.
    pub curve: CurveSpec,
    pub search: ZetaSearch,
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        self.transforms.validate()?;
        self.grid.validate()?;
        self.search.validate()?;
        self.curve_spec().validate()
    }

    pub fn curve_spec(&self) -> CurveSpec {
        CurveSpec {
            eta_max: self.search.eta_max(),
            ..self.curve
        }
    }
}

/// Transforms, evaluator and curve for one configuration.
pub fn prepare_curve(config: &DimensionlessConfig, numerics: &Numerics) -> Result<WightmanCurve> {
    numerics.validate()?;
    let transforms = SpectralTransforms::for_config(config, &numerics.transforms)?;
    let evaluator = WightmanEvaluator::new(*config, numerics.grid, transforms)?;
    let curve = build_curve(&evaluator, &numerics.curve_spec())?;
    curve.check_decay()?;
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub configs: Vec<DimensionlessConfig>,
    pub pdark: PdarkGrid,
    pub numerics: Numerics,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.configs.is_empty() {
            return Err(Error::validation("configs", "at least one configuration is required"));
        }
        for c in &self.configs {
            c.validate()?;
        }
        self.pdark.validate()?;
        self.numerics.validate()
    }
}

/// Curve-level numbers shared by all rows of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub w2_zero: f64,
    pub eta_max: f64,
    pub eta_decay: Option<f64>,
    pub samples: usize,
}

/// One (configuration, P_dark) point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub config_id: usize,
    pub config: DimensionlessConfig,
    pub pdark_exp: f64,
    pub pdark: f64,
    pub curve: Option<CurveSummary>,
    pub outcome: std::result::Result<BoundResult, Error>,
    /// Estimated absolute error of pmax.
    pub error_estimate: Option<f64>,
}

impl SweepRow {
    pub fn status(&self) -> &'static str {
        match &self.outcome {
            Ok(_) => "ok",
            Err(e) => e.kind(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Ordered by (config_id, pdark).
    pub rows: Vec<SweepRow>,
    /// One entry per configuration; `None` where the curve failed.
    pub curves: Vec<Option<WightmanCurve>>,
}

impl SweepOutcome {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// Rows of one configuration, in pdark order.
    pub fn for_config(&self, config_id: usize) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.config_id == config_id)
    }
}

/// Builds one curve per configuration and minimizes the bound at every grid
/// point. Failures are recorded per row and do not stop the sweep.
pub fn sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let curves: Vec<Result<WightmanCurve>> =
        spec.configs.par_iter().map(|c| prepare_curve(c, &spec.numerics)).collect();
    let exps = spec.pdark.exponents();
    let values = spec.pdark.values();
    let jobs: Vec<(usize, usize)> = (0..spec.configs.len())
        .flat_map(|c| (0..values.len()).map(move |p| (c, p)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(c, p)| {
            let pdark = values[p];
            let (summary, outcome, error_estimate) = match &curves[c] {
                Ok(curve) => {
                    let summary = CurveSummary {
                        w2_zero: curve.w2_zero(),
                        eta_max: curve.eta_max(),
                        eta_decay: curve.eta_decay(),
                        samples: curve.samples().len(),
                    };
                    let outcome = minimize_bound(pdark, curve, &spec.numerics.search);
                    let err = outcome.as_ref().ok().map(|r| pmax_error(r, curve));
                    (Some(summary), outcome, err)
                }
                Err(e) => (None, Err(e.clone()), None),
            };
            SweepRow {
                config_id: c,
                config: spec.configs[c],
                pdark_exp: exps[p],
                pdark,
                curve: summary,
                outcome,
                error_estimate,
            }
        })
        .collect();
    let curves = curves.into_iter().map(|c| c.ok()).collect();
    Ok(SweepOutcome { rows, curves })
}

/// The five configurations (N, Δφ, a, phase) of the reference figure.
pub fn figure_configs() -> Vec<DimensionlessConfig> {
    [
        (10.0, 10.0, 1.0, 0.0),
        (100.0, 10.0, 1.0, 0.0),
        (10.0, 1.0, 1.0, 0.0),
        (10.0, 10.0, 0.01, 0.0),
        (10.0, 1.0, 1.0, std::f64::consts::FRAC_PI_2),
    ]
    .into_iter()
    .map(|(n, d, a, p)| DimensionlessConfig::new(n, d, a, p).expect("valid reference configuration"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wightman::W2Sample;

    /// A synthetic curve W(η) = w0·exp(−η²)·e^{iη}, decaying fast.
    fn synthetic(w0: f64) -> WightmanCurve {
        let cfg = DimensionlessConfig::new(10.0, 10.0, 1.0, 0.0).unwrap();
        let eta_max = ZetaSearch::default().eta_max();
        let mut etas: Vec<f64> = (0..=800).map(|i| i as f64 * 0.01).collect();
        let mut x = 8.0;
        while x < eta_max {
            x = (x * 1.1).min(eta_max);
            etas.push(x);
        }
        let samples = etas
            .into_iter()
            .map(|e| {
                let v = num_complex::Complex64::from_polar(w0 * (-e * e).exp(), if e == 0.0 { 0.0 } else { e });
                W2Sample {
                    eta: e,
                    re: v.re,
                    im: v.im,
                    error: 0.0,
                }
            })
            .collect();
        WightmanCurve::from_samples(cfg, samples, 0.0).unwrap()
    }

    #[test]
    fn zero_dark_count_short_circuits() {
        let c = synthetic(0.2);
        let r = minimize_bound(0.0, &c, &ZetaSearch::default()).unwrap();
        assert_eq!(r.pmax, 0.0);
        assert!(r.informative);
        assert!(r.zeta_opt.is_none());
    }

    #[test]
    fn unit_dark_count_is_uninformative() {
        let c = synthetic(0.2);
        let r = minimize_bound(1.0, &c, &ZetaSearch::default()).unwrap();
        assert!(r.pmax >= 1.0);
        assert!(!r.informative);
    }

    #[test]
    fn envelope_properties() {
        let c = synthetic(0.2);
        let e = error_of_zeta(1.0, &c).unwrap();
        assert!((envelope(1.0, 0.0, &c).unwrap() - e * e).abs() < 1e-15);
        let mut prev = 0.0;
        for p in [0.0, 1e-9, 1e-6, 1e-3, 0.5, 1.0] {
            let v = envelope(1.0, p, &c).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(envelope(1.0, 1.5, &c).is_err());
        assert!(envelope(1.0, -0.1, &c).is_err());
    }

    #[test]
    fn minimum_is_monotone_and_refined() {
        let c = synthetic(0.2);
        let s = ZetaSearch {
            grid_points: 200,
            ..ZetaSearch::default()
        };
        let mut prev = 0.0;
        for p in PdarkGrid::default().values() {
            let r = minimize_bound(p, &c, &s).unwrap();
            let d = r.diagnostics.clone().unwrap();
            assert!(r.pmax <= d.grid_min && d.grid_min <= r.pmax * (1.0 + 1e-2), "{p}: {r:?}");
            assert!(r.pmax >= prev);
            let z = r.zeta_opt.unwrap();
            let direct = envelope(z, p, &c).unwrap();
            assert!((direct - r.pmax).abs() <= 1e-14 * direct);
            prev = r.pmax;
        }
    }

    #[test]
    fn all_failures_give_minimization_error() {
        let c = synthetic(0.2);
        let s = ZetaSearch {
            zeta_min: 1e-4,
            zeta_max: 1e-3,
            ..ZetaSearch::default()
        };
        assert!(matches!(minimize_bound(1e-6, &c, &s), Err(Error::Minimization(_))));
    }

    #[test]
    fn pdark_grid_values() {
        let g = PdarkGrid::default();
        assert_eq!(g.points, 12);
        let v = g.values();
        assert_eq!(v[0], 1e-12);
        assert_eq!(v[11], 1e-1);
        assert_eq!(PdarkGrid::per_decade(-12, -1, 12).points, 133);
        assert!(PdarkGrid { min_exp: -3.0, max_exp: 1.0, points: 5 }.validate().is_err());
    }
}
