//! Invariant checks at reduced resolution, run by `clickbound selftest`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bound::{minimize_bound, PdarkGrid, ZetaSearch};
use crate::bump::{theta, transform_a, transform_cs, SpectralTransforms, TransformSpec};
use crate::errfun::{error_of_zeta, gauss_complex, EtaWeight};
use crate::error::Result;
use crate::params::{to_dimensionless, DimensionlessConfig, PhysicalSetup};
use crate::wightman::{build_curve, CurveSpec, KGridSpec, WightmanCurve, WightmanEvaluator};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn timed(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let t = Instant::now();
    let mut c = check(name, f());
    c.detail = format!("{}; {:.2?}", c.detail, t.elapsed());
    c
}

fn reduced_grid() -> KGridSpec {
    KGridSpec {
        rel_tol: 1e-8,
        ..KGridSpec::default()
    }
}

fn reduced_search() -> ZetaSearch {
    ZetaSearch {
        zeta_min: 1e-2,
        zeta_max: 4.0,
        grid_points: 30,
        rel_tol: 1e-3,
    }
}

fn evaluator(cfg: DimensionlessConfig) -> Result<WightmanEvaluator> {
    let tr = SpectralTransforms::for_config(&cfg, &TransformSpec::default())?;
    WightmanEvaluator::new(cfg, reduced_grid(), tr)
}

fn curve(ev: &WightmanEvaluator) -> Result<WightmanCurve> {
    let spec = CurveSpec {
        eta_max: reduced_search().eta_max(),
        interp_tol: 1e-6,
        ..CurveSpec::default()
    };
    build_curve(ev, &spec)
}

/// Runs every check; `seed` fixes the random momentum grid.
pub fn run_all(seed: u64) -> Vec<Check> {
    let mut out = vec![
        timed("transition function complement", || {
            let worst = (0..100)
                .map(|i| {
                    let s = -0.2 + 1.4 * i as f64 / 99.0;
                    (theta(s) + theta(1.0 - s) - 1.0).abs()
                })
                .fold(0.0, f64::max);
            Ok((worst <= 1e-12, format!("max deviation {worst:.1e}")))
        }),
        timed("eta weight normalization", || {
            let mut worst: f64 = 0.0;
            for zeta in [0.1, 1.0, 10.0] {
                let w = EtaWeight::new(zeta)?;
                let (v, _) = w.integrate_even(|e| w.eval(e), &[])?;
                worst = worst.max((v - 1.0).abs());
            }
            Ok((worst <= 1e-8, format!("max deviation {worst:.1e}")))
        }),
        timed("shifted gaussian modulus", || {
            let mut worst: f64 = 0.0;
            for zeta in [0.5, 1.0, 5.0] {
                let w = EtaWeight::new(zeta)?;
                let (v, _) = w.integrate_even(|e| gauss_complex(Complex64::new(e, -PI), zeta).norm(), &[])?;
                let exact = (PI * PI / (2.0 * zeta)).exp();
                worst = worst.max((v / exact - 1.0).abs());
            }
            Ok((worst <= 1e-6, format!("max relative deviation {worst:.1e}")))
        }),
        timed("transform areas", || {
            let a = transform_a(0.0, 1.0)?;
            let (c, _) = transform_cs(0.0, 1.0, 0.0, 0.0)?;
            let worst = (a - 1.5).abs().max((c - 1.5).norm());
            Ok((worst <= 1e-8, format!("A(0) = {a}, C(0) = {}", c.re)))
        }),
        timed("transform symmetries", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let k = rng.gen_range(-60.0..60.0);
                worst = worst.max((transform_a(k, 1.0)? - transform_a(-k, 1.0)?).abs());
                let (c1, s1) = transform_cs(k, 1.0, 10.0, PI / 2.0)?;
                let (c2, s2) = transform_cs(-k, 1.0, 10.0, PI / 2.0)?;
                worst = worst.max((c1 - c2.conj()).norm()).max((s1 - s2.conj()).norm());
            }
            Ok((worst <= 1e-10, format!("max asymmetry {worst:.1e} over 50 momenta")))
        }),
        timed("dimensionless reduction", || {
            let c = to_dimensionless(&PhysicalSetup {
                l: 1.0,
                big_l: 1.0,
                tau: 1.0,
                k0: 5.0,
                alpha0_sq: 10.0,
                arg_alpha0: 0.0,
                v_coh: 8.0,
                delta_l: 2.0,
                delta_big_l: 2.0,
            })?;
            let ok = (c.n - 10.0).abs() < 1e-12 && c.delta_phi == 10.0 && c.aspect == 1.0;
            Ok((ok, format!("N = {}, dphi = {}, a = {}", c.n, c.delta_phi, c.aspect)))
        }),
    ];
    out.extend(wightman_checks());
    out
}

fn wightman_checks() -> Vec<Check> {
    let cfg = DimensionlessConfig::new(10.0, 10.0, 1.0, 0.0).expect("valid");
    let ev = match evaluator(cfg) {
        Ok(e) => e,
        Err(e) => return vec![check("two-point function", Err(e))],
    };
    let w0 = ev.zero_sample();
    let mut out = vec![
        timed("W2(0) real and positive", || {
            Ok((w0.re > 0.0 && w0.im.abs() <= 1e-8 * w0.re, format!("W2(0) = {:.10e} {:+.1e}i", w0.re, w0.im)))
        }),
        timed("hermiticity", || {
            let mut worst: f64 = 0.0;
            for eta in [0.25, 0.5, 1.0, 2.0] {
                let p = ev.w2_of_eta(eta)?.value();
                let m = ev.w2_of_eta(-eta)?.value();
                worst = worst.max((m - p.conj()).norm() / w0.re);
            }
            Ok((worst <= 1e-6, format!("max |W(-eta) - conj W(eta)| / W(0) = {worst:.1e}")))
        }),
        timed("linearity in N", || {
            let ev2 = evaluator(cfg.with_n(20.0)?)?;
            let r = ev2.zero_sample().re / w0.re;
            Ok(((r - 2.0).abs() <= 1e-12, format!("ratio {r}")))
        }),
    ];
    let curve = match curve(&ev) {
        Ok(c) => c,
        Err(e) => {
            out.push(check("rapidity curve", Err(e)));
            return out;
        }
    };
    out.push(timed("Cauchy-Schwarz on curve samples", || {
        let worst = curve.samples().iter().map(|s| s.value().norm() / curve.w2_zero()).fold(0.0, f64::max);
        Ok((worst <= 1.0 + 1e-6, format!("max |W| / W(0) = {worst:.8}, {} samples", curve.samples().len())))
    }));
    out.push(timed("approximation error decreases with zeta", || {
        let es: Vec<f64> = [1.0, 0.1, 0.01, 0.001]
            .iter()
            .map(|&z| error_of_zeta(z, &curve))
            .collect::<Result<_>>()?;
        let ok = es.windows(2).all(|w| w[1] < w[0]);
        let shown: Vec<String> = es.iter().map(|e| format!("{e:.3e}")).collect();
        Ok((ok, format!("E = [{}]", shown.join(", "))))
    }));
    out.push(timed("bound limits", || {
        let s = reduced_search();
        let zero = minimize_bound(0.0, &curve, &s)?;
        let one = minimize_bound(1.0, &curve, &s)?;
        let ok = zero.pmax == 0.0 && one.pmax >= 1.0 && !one.informative;
        Ok((ok, format!("pmax(0) = {}, pmax(1) = {:.4}", zero.pmax, one.pmax)))
    }));
    out.push(timed("bound monotone in dark counts", || {
        let s = reduced_search();
        let values: Vec<f64> = PdarkGrid::default()
            .values()
            .into_iter()
            .map(|p| minimize_bound(p, &curve, &s).map(|r| r.pmax))
            .collect::<Result<_>>()?;
        let ok = values.windows(2).all(|w| w[1] >= w[0]);
        Ok((ok, format!("pmax from {:.4e} to {:.4e}", values[0], values[values.len() - 1])))
    }));
    out
}
