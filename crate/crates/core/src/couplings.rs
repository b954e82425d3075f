//! Coherent dipole-dipole coupling `V` and collective decay rate `gamma`
//! of two emitters, in units of the reference rate.
//!
//! With `z = 2 pi n r12 / lambda0`, `a = mu1.mu2 - (mu1.r)(mu2.r)` and
//! `b = mu1.mu2 - 3 (mu1.r)(mu2.r)`:
//!
//! ```text
//! V     = (3/4) sqrt(G1 G2) [ -a cos z / z + b (cos z / z^3 + sin z / z^2) ]
//! gamma = (3/2) sqrt(G1 G2) [  a sin z / z + b (cos z / z^2 - sin z / z^3) ]
//! ```

use std::f64::consts::PI;

use serde::Deserialize;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

const UNIT_TOL: f64 = 1e-12;
/// Below this `z` the collective rate is evaluated from its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;
/// Upper end (exclusive) of `r12 / lambda0` for [`small_separation_limit`].
pub const SMALL_SEPARATION_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterGeometry {
    pub mu1_hat: Vec3,
    pub mu2_hat: Vec3,
    pub r12_hat: Vec3,
    pub r12_over_lambda0: f64,
    #[serde(default = "default_index")]
    pub n: f64,
    #[serde(rename = "Gamma1", default = "default_rate")]
    pub gamma1: f64,
    #[serde(rename = "Gamma2", default = "default_rate")]
    pub gamma2: f64,
}

fn default_index() -> f64 {
    1.0
}

fn default_rate() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSet {
    pub v: f64,
    pub gamma: f64,
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl EmitterGeometry {
    /// Identical emitters with parallel dipoles perpendicular to the separation.
    pub fn parallel_perpendicular(r12_over_lambda0: f64) -> Self {
        EmitterGeometry {
            mu1_hat: [1.0, 0.0, 0.0],
            mu2_hat: [1.0, 0.0, 0.0],
            r12_hat: [0.0, 0.0, 1.0],
            r12_over_lambda0,
            n: 1.0,
            gamma1: 1.0,
            gamma2: 1.0,
        }
    }

    pub fn with_separation(mut self, r12_over_lambda0: f64) -> Self {
        self.r12_over_lambda0 = r12_over_lambda0;
        self
    }

    // negated comparisons reject NaN along with out-of-range values
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mu1_hat", &self.mu1_hat),
            ("mu2_hat", &self.mu2_hat),
            ("r12_hat", &self.r12_hat),
        ] {
            let norm = dot(v, v).sqrt();
            if !((norm - 1.0).abs() <= UNIT_TOL) {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be a unit vector (norm {norm})"
                )));
            }
        }
        if !(self.r12_over_lambda0 >= 0.0) || !self.r12_over_lambda0.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "r12_over_lambda0 must be positive (got {})",
                self.r12_over_lambda0
            )));
        }
        if !(self.n >= 1.0) || !self.n.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "refractive index must be >= 1 (got {})",
                self.n
            )));
        }
        if !(self.gamma1 > 0.0 && self.gamma2 > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "spontaneous rates must be positive (got {}, {})",
                self.gamma1, self.gamma2
            )));
        }
        Ok(())
    }

    /// Reduced separation `z = n k0 r12`.
    pub fn z(&self) -> f64 {
        2.0 * PI * self.n * self.r12_over_lambda0
    }

    fn rate_scale(&self) -> f64 {
        (self.gamma1 * self.gamma2).sqrt()
    }

    /// Orientation factors `(a, b)` multiplying the far- and near-field terms.
    fn orientation(&self) -> (f64, f64) {
        let parallel = dot(&self.mu1_hat, &self.mu2_hat);
        let projected = dot(&self.mu1_hat, &self.r12_hat) * dot(&self.mu2_hat, &self.r12_hat);
        (parallel - projected, parallel - 3.0 * projected)
    }
}

pub fn coupling_strength(g: &EmitterGeometry) -> Result<f64> {
    g.validate()?;
    let z = g.z();
    if z == 0.0 {
        return Err(Error::SingularSeparation { z });
    }
    let (a, b) = g.orientation();
    let (s, c) = z.sin_cos();
    let bracket = -a * c / z + b * (c / z.powi(3) + s / z.powi(2));
    Ok(0.75 * g.rate_scale() * bracket)
}

pub fn collective_decay(g: &EmitterGeometry) -> Result<f64> {
    g.validate()?;
    let z = g.z();
    let (a, b) = g.orientation();
    let bracket = if z < SERIES_THRESHOLD {
        // sin z / z and cos z / z^2 - sin z / z^3 to O(z^4)
        let z2 = z * z;
        let sinc = 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
        let near = -1.0 / 3.0 + z2 / 30.0 - z2 * z2 / 840.0;
        a * sinc + b * near
    } else {
        let (s, c) = z.sin_cos();
        a * s / z + b * (c / (z * z) - s / z.powi(3))
    };
    Ok(1.5 * g.rate_scale() * bracket)
}

pub fn couplings(g: &EmitterGeometry) -> Result<CouplingSet> {
    Ok(CouplingSet {
        v: coupling_strength(g)?,
        gamma: collective_decay(g)?,
    })
}

/// Leading short-distance behaviour: the `1/z^3` near-field coupling and
/// `gamma = sqrt(G1 G2) mu1.mu2`.
pub fn small_separation_limit(g: &EmitterGeometry) -> Result<CouplingSet> {
    g.validate()?;
    if g.r12_over_lambda0 >= SMALL_SEPARATION_LIMIT {
        return Err(Error::OutsideApplicability {
            r12_over_lambda0: g.r12_over_lambda0,
            limit: SMALL_SEPARATION_LIMIT,
        });
    }
    let z = g.z();
    if z == 0.0 {
        return Err(Error::SingularSeparation { z });
    }
    let (_, b) = g.orientation();
    Ok(CouplingSet {
        v: 0.75 * g.rate_scale() * b / z.powi(3),
        gamma: g.rate_scale() * dot(&g.mu1_hat, &g.mu2_hat),
    })
}
