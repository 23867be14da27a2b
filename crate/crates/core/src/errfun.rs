//! The approximation error E_ζ of the boosted-and-smeared state and the
//! operator-norm factor exp(π²/2ζ).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require_finite, require_positive, Error, Result};
use crate::quad::{clean_breakpoints, integrate_adaptive, Tolerance};
use crate::wightman::WightmanCurve;

/// Width of the η window in units of the standard deviation √(2ζ) of G_{2ζ}.
pub const N_SIGMA: f64 = 8.0;

/// Largest tolerated negative value of 1 − I before it counts as a failure.
pub const CLAMP_TOLERANCE: f64 = 1e-6;

/// G_ζ(η) = (2πζ)^(−1/2) exp(−η²/2ζ).
pub fn gauss(eta: f64, zeta: f64) -> f64 {
    (-eta * eta / (2.0 * zeta)).exp() / (2.0 * PI * zeta).sqrt()
}

/// G_ζ continued to complex arguments.
pub fn gauss_complex(eta: Complex64, zeta: f64) -> Complex64 {
    (-eta * eta / (2.0 * zeta)).exp() / (2.0 * PI * zeta).sqrt()
}

/// 2G_ζ(η) − G_{2ζ}(η).
pub fn gauss_weight(eta: f64, zeta: f64) -> f64 {
    2.0 * gauss(eta, zeta) - gauss(eta, 2.0 * zeta)
}

/// The η weight of the error functional for one variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaWeight {
    zeta: f64,
}

impl EtaWeight {
    pub fn new(zeta: f64) -> Result<Self> {
        require_positive("zeta", zeta)?;
        Ok(Self { zeta })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn eval(&self, eta: f64) -> f64 {
        gauss_weight(eta, self.zeta)
    }

    /// Half-width of the window outside which the weight is neglected.
    pub fn support(&self) -> f64 {
        required_eta_max(self.zeta)
    }

    /// `∫ℝ f`, for even `f` negligible outside the window, as 2∫₀^L f.
    /// The returned error is the quadrature estimate.
    pub fn integrate_even<F: FnMut(f64) -> f64>(&self, f: F, extra_breaks: &[f64]) -> Result<(f64, f64)> {
        let l = self.support();
        let sigma = self.zeta.sqrt();
        let mut pts: Vec<f64> = (1..4 * N_SIGMA as usize).map(|i| 0.5 * sigma * i as f64).collect();
        pts.extend_from_slice(extra_breaks);
        let breaks = clean_breakpoints(pts, 0.0, l);
        let tol = Tolerance {
            abs: 1e-16,
            rel: 1e-11,
            max_panels: 20_000,
        };
        let res = integrate_adaptive(f, &breaks, tol);
        if !res.converged {
            return Err(Error::Accuracy {
                context: format!("eta integral at zeta = {}", self.zeta),
                estimate: 2.0 * res.value,
                error: 2.0 * res.error,
                tolerance: 2.0 * res.tolerance,
            });
        }
        Ok((2.0 * res.value, 2.0 * res.error))
    }
}

/// Rapidity range n_σ·√(4ζ) needed to evaluate E at variance ζ.
pub fn required_eta_max(zeta: f64) -> f64 {
    N_SIGMA * (4.0 * zeta).sqrt()
}

/// exp(π²/2ζ); an overflow error once this is no longer finite.
pub fn norm_factor(zeta: f64) -> Result<f64> {
    require_positive("zeta", zeta)?;
    let v = (PI * PI / (2.0 * zeta)).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { zeta })
    }
}

/// 1 − Re e^{x + iy}, without cancellation for small x and y.
fn one_minus_re_exp(d: Complex64) -> f64 {
    let half = (0.5 * d.im).sin();
    -d.re.exp_m1() * d.im.cos() + 2.0 * half * half
}

/// `1 − I(ζ)` and its quadrature error, where
/// `I(ζ) = ∫ℝ (2G_ζ − G_{2ζ})(η) Re exp(W₂(η) − W₂(0)) dη`.
///
/// The weight integrates to one, so the deficit is computed directly as
/// `∫ℝ (2G_ζ − G_{2ζ})(η) [1 − Re exp(W₂(η) − W₂(0))] dη`.
pub fn deficit(zeta: f64, curve: &WightmanCurve) -> Result<(f64, f64)> {
    let w = EtaWeight::new(zeta)?;
    let l = w.support();
    if curve.eta_max() < l * (1.0 - 1e-12) {
        return Err(Error::Range {
            required: l,
            available: curve.eta_max(),
        });
    }
    let w0 = Complex64::new(curve.w2_zero(), 0.0);
    let knots: Vec<f64> = curve.samples().iter().map(|s| s.eta).take_while(|&e| e < l).collect();
    w.integrate_even(|eta| w.eval(eta) * one_minus_re_exp(curve.value(eta) - w0), &knots)
}

/// E_ζ = sqrt(1 − I(ζ)), clamped at zero when 1 − I is negative by less than
/// [`CLAMP_TOLERANCE`].
pub fn error_of_zeta(zeta: f64, curve: &WightmanCurve) -> Result<f64> {
    let (d, _) = deficit(zeta, curve)?;
    require_finite("1 - I", d)?;
    if d < -CLAMP_TOLERANCE {
        return Err(Error::Consistency(format!("I({zeta}) = {} exceeds 1", 1.0 - d)));
    }
    let e = d.max(0.0).sqrt();
    if e > 1.0 + CLAMP_TOLERANCE {
        return Err(Error::Consistency(format!("E({zeta}) = {e} exceeds 1")));
    }
    Ok(e.min(1.0))
}
