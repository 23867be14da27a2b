//! Physical detector and beam parameters, and their reduction to the
//! dimensionless configuration used by every numerical stage.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};

/// Detector geometry, operation time and single-mode beam, in natural units (c = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    /// Detector thickness.
    pub l: f64,
    /// Side of the square face.
    pub big_l: f64,
    /// Operation time.
    pub tau: f64,
    /// Mode wavenumber along the detector normal.
    pub k0: f64,
    /// Total photon number |alpha_0|^2.
    pub alpha0_sq: f64,
    /// Phase of the coherent amplitude, radians.
    pub arg_alpha0: f64,
    /// Coherence volume of the wave packet.
    pub v_coh: f64,
    /// Longitudinal collar width of the bump.
    pub delta_l: f64,
    /// Transverse collar width of the bump.
    pub delta_big_l: f64,
}

impl PhysicalSetup {
    pub fn validate(&self) -> Result<()> {
        require_positive("l", self.l)?;
        require_positive("L", self.big_l)?;
        require_positive("tau", self.tau)?;
        require_positive("k0", self.k0)?;
        require_positive("V_coh", self.v_coh)?;
        require_positive("delta_l", self.delta_l)?;
        require_positive("delta_L", self.delta_big_l)?;
        require_finite("alpha0_sq", self.alpha0_sq)?;
        if self.alpha0_sq < 0.0 {
            return Err(Error::validation("alpha0_sq", "must be >= 0"));
        }
        require_finite("arg_alpha0", self.arg_alpha0)?;
        Ok(())
    }
}

/// Smallest collar width (in units of the enlarged detector) accepted.
/// Narrower collars approach the sharp-edged window whose two-point
/// function diverges logarithmically.
pub const MIN_COLLAR: f64 = 0.1;

/// Everything the bound depends on, in dimensionless form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessConfig {
    /// Effective number of photons seen by the detector.
    pub n: f64,
    /// Optical phase accumulated across the enlarged thickness.
    pub delta_phi: f64,
    /// Mode frequency in units of the enlarged thickness (equals `delta_phi`).
    pub omega0_tilde: f64,
    /// Aspect ratio (l + tau) / (L + tau).
    pub aspect: f64,
    /// Phase of the coherent amplitude.
    pub arg_alpha0: f64,
    /// Longitudinal collar width relative to l + tau.
    pub dl_tilde: f64,
    /// Transverse collar width relative to L + tau.
    pub dbig_l_tilde: f64,
}

impl DimensionlessConfig {
    /// Configuration with unit collars, the default used throughout.
    pub fn new(n: f64, delta_phi: f64, aspect: f64, arg_alpha0: f64) -> Result<Self> {
        Self::with_collars(n, delta_phi, aspect, arg_alpha0, 1.0, 1.0)
    }

    pub fn with_collars(
        n: f64,
        delta_phi: f64,
        aspect: f64,
        arg_alpha0: f64,
        dl_tilde: f64,
        dbig_l_tilde: f64,
    ) -> Result<Self> {
        let cfg = Self {
            n,
            delta_phi,
            omega0_tilde: delta_phi,
            aspect,
            arg_alpha0,
            dl_tilde,
            dbig_l_tilde,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("N", self.n)?;
        require_positive("delta_phi", self.delta_phi)?;
        require_positive("omega0_tilde", self.omega0_tilde)?;
        require_positive("aspect", self.aspect)?;
        require_finite("arg_alpha0", self.arg_alpha0)?;
        require_positive("dl_tilde", self.dl_tilde)?;
        require_positive("dL_tilde", self.dbig_l_tilde)?;
        if self.omega0_tilde != self.delta_phi {
            return Err(Error::validation(
                "omega0_tilde",
                "must equal delta_phi for a massless normally incident mode",
            ));
        }
        for (field, v) in [("dl_tilde", self.dl_tilde), ("dL_tilde", self.dbig_l_tilde)] {
            if v < MIN_COLLAR {
                return Err(Error::validation(
                    field,
                    format!("collar {v} below {MIN_COLLAR}; the two-point function is not resolvable"),
                ));
            }
        }
        Ok(())
    }

    /// Copy with a different photon number.
    pub fn with_n(&self, n: f64) -> Result<Self> {
        let mut c = *self;
        c.n = n;
        c.validate()?;
        Ok(c)
    }
}

/// Reduces a physical setup to its dimensionless configuration.
pub fn to_dimensionless(setup: &PhysicalSetup) -> Result<DimensionlessConfig> {
    setup.validate()?;
    let thick = setup.l + setup.tau;
    let side = setup.big_l + setup.tau;
    let delta_phi = setup.k0 * thick;
    let cfg = DimensionlessConfig {
        n: setup.alpha0_sq * thick * side * side / setup.v_coh,
        delta_phi,
        omega0_tilde: delta_phi,
        aspect: thick / side,
        arg_alpha0: setup.arg_alpha0,
        dl_tilde: setup.delta_l / thick,
        dbig_l_tilde: setup.delta_big_l / side,
    };
    // N may vanish for an empty beam; everything else was checked above.
    if cfg.n == 0.0 {
        return Err(Error::validation("alpha0_sq", "beam carries no photons (N = 0)"));
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Click probability of the (non-local) ideal detector, 1 − exp(−|alpha_0|^2).
pub fn ideal_click_probability(alpha0_sq: f64) -> Result<f64> {
    require_finite("alpha0_sq", alpha0_sq)?;
    if alpha0_sq < 0.0 {
        return Err(Error::validation("alpha0_sq", "must be >= 0"));
    }
    Ok(-(-alpha0_sq).exp_m1())
}

/// Coherence volume [(8 pi)^(3/2) dk1 dk2 dk3]^(-1) of a Gaussian packet with
/// momentum spreads `dk1`, `dk2`, `dk3`.
pub fn coherence_volume(dk1: f64, dk2: f64, dk3: f64) -> Result<f64> {
    require_positive("dk1", dk1)?;
    require_positive("dk2", dk2)?;
    require_positive("dk3", dk3)?;
    Ok(1.0 / ((8.0 * PI).powf(1.5) * dk1 * dk2 * dk3))
}
