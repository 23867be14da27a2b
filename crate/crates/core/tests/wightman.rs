mod common;

use std::f64::consts::FRAC_PI_2;

use clickbound::bump::{SpectralTransforms, TransformSpec};
use clickbound::params::DimensionlessConfig;
use clickbound::wightman::{build_curve, CurveSpec, KGridSpec, WightmanEvaluator};
use common::{rel, Reference, ReferenceGrid};

fn evaluator(n: f64, dphi: f64, a: f64, phase: f64) -> WightmanEvaluator {
    let cfg = DimensionlessConfig::new(n, dphi, a, phase).unwrap();
    let tr = SpectralTransforms::for_config(&cfg, &TransformSpec::default()).unwrap();
    WightmanEvaluator::new(cfg, KGridSpec::default(), tr).unwrap()
}

#[test]
fn zero_rapidity_value_matches_reference() {
    let ev = evaluator(10.0, 1.0, 1.0, 0.0);
    let reference = Reference::new(ev.config(), ReferenceGrid::default()).w2(0.0);
    let w0 = ev.w2_zero().unwrap();
    assert!(rel(w0, reference.re) < 1e-3, "{w0} vs {reference}");
    assert!(ev.zero_sample().im.abs() <= 1e-8 * w0);
}

#[test]
fn boosted_values_match_reference() {
    let ev = evaluator(10.0, 10.0, 1.0, 0.0);
    let reference = Reference::new(ev.config(), ReferenceGrid::default());
    let w0 = ev.w2_zero().unwrap();
    for eta in [0.3, 1.0, 2.5] {
        let v = ev.w2_of_eta(eta).unwrap().value();
        let r = reference.w2(eta);
        assert!((v - r).norm() < 1e-5 * w0, "eta {eta}: {v} vs {r}");
    }
}

#[test]
fn hermitian_under_rapidity_reversal() {
    let ev = evaluator(10.0, 10.0, 1.0, 0.0);
    let w0 = ev.w2_zero().unwrap();
    for eta in [0.05, 0.5, 1.5, 4.0] {
        let p = ev.w2_of_eta(eta).unwrap().value();
        let m = ev.w2_of_eta(-eta).unwrap().value();
        assert!((m - p.conj()).norm() <= 1e-8 * w0, "eta {eta}: {p} vs {m}");
    }
}

#[test]
fn linear_in_photon_number() {
    let a = evaluator(10.0, 10.0, 1.0, 0.0).w2_zero().unwrap();
    let b = evaluator(20.0, 10.0, 1.0, 0.0).w2_zero().unwrap();
    assert!((b / a - 2.0).abs() < 1e-12, "{a} {b}");
}

#[test]
fn positive_norm_at_quarter_phase() {
    let w0 = evaluator(10.0, 1.0, 1.0, FRAC_PI_2).w2_zero().unwrap();
    assert!(w0 > 0.0);
}

#[test]
fn finer_grid_agrees() {
    let ev = evaluator(10.0, 10.0, 1.0, 0.0);
    let fine = WightmanEvaluator::new(*ev.config(), ev.grid().refined(), ev.transforms().clone()).unwrap();
    let (a, b) = (ev.w2_zero().unwrap(), fine.w2_zero().unwrap());
    assert!(rel(a, b) < 1e-3, "{a} vs {b}");
}

#[test]
fn curve_interpolates_held_out_points() {
    let ev = evaluator(10.0, 10.0, 1.0, 0.0);
    let spec = CurveSpec {
        interp_tol: 1e-6,
        ..CurveSpec::with_eta_max(6.0)
    };
    let curve = build_curve(&ev, &spec).unwrap();
    let w0 = curve.w2_zero();
    for s in curve.samples() {
        assert!(s.value().norm() <= w0 * (1.0 + 1e-6), "eta {}", s.eta);
    }
    let knots: Vec<f64> = curve.samples().iter().map(|s| s.eta).collect();
    for w in knots.windows(2).step_by(7) {
        let eta = w[0] + (w[1] - w[0]) / 3.0;
        let direct = ev.w2_of_eta(eta).unwrap().value();
        assert!((curve.value(eta) - direct).norm() <= 1e-4 * w0, "eta {eta}");
        assert!((curve.value(-eta) - direct.conj()).norm() <= 1e-4 * w0);
    }
}
