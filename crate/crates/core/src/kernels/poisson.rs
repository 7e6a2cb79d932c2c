use alloc::format;

use libm::{pow, sqrt};

use super::{ExpPowerLaw, OriginRule, PowerLaw, RadialKernelTable};
use crate::error::{domain, Result};
use crate::grid::GridSpec;
use crate::quadrature::GaussLegendre;
use crate::specfun::{bessel_k, check_order, gamma_fn, sphere_area, theta_profile};

/// Height at which the normalisation is calibrated.
pub const CALIBRATION_HEIGHT: f64 = 1.0;

/// Poisson kernel of the massive extension problem,
/// P(x, y) = c·y^{2s} m^ν R^{−ν} K_ν(mR) with R = |(x, y)| and ν = (N+2s)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonKernel {
    pub dim: usize,
    pub m: f64,
    pub s: f64,
    pub normalization: f64,
}

impl PoissonKernel {
    /// Fixes the constant so that ∫ P(x, 1) dx = θ_s(m).
    pub fn calibrated(dim: usize, m: f64, s: f64) -> Result<Self> {
        check_order("poisson_kernel", s)?;
        if !(m > 0.0) {
            return Err(domain("poisson_kernel", format!("mass m = {m}")));
        }
        let raw = Self {
            dim,
            m,
            s,
            normalization: 1.0,
        };
        let mass = raw.mass(CALIBRATION_HEIGHT)?;
        Ok(Self {
            normalization: theta_profile(s, m * CALIBRATION_HEIGHT)? / mass,
            ..raw
        })
    }

    /// Closed-form value of the calibrated constant, 2^{1−ν}/(π^{N/2}Γ(s)).
    pub fn closed_form_normalization(dim: usize, s: f64) -> Result<f64> {
        let n = dim as f64;
        let nu = (n + 2.0 * s) / 2.0;
        Ok(pow(2.0, 1.0 - nu) / (pow(core::f64::consts::PI, n / 2.0) * gamma_fn(s)?))
    }

    fn order(&self) -> f64 {
        (self.dim as f64 + 2.0 * self.s) / 2.0
    }

    pub fn value(&self, r: f64, y: f64) -> Result<f64> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(domain("poisson_kernel", format!("height y = {y}")));
        }
        if !(r >= 0.0) {
            return Err(domain("poisson_kernel", format!("radius r = {r}")));
        }
        let nu = self.order();
        let big_r = sqrt(r * r + y * y);
        Ok(self.normalization * pow(y, 2.0 * self.s) * pow(self.m, nu) * pow(big_r, -nu)
            * bessel_k(nu, self.m * big_r)?)
    }

    /// ∫_{R^N} P(x, y) dx by radial Gauss–Legendre panels.
    pub fn mass(&self, y: f64) -> Result<f64> {
        let gl = GaussLegendre::new(24);
        let mut breaks = alloc::vec![0.0];
        let mut r = 0.0;
        let mut w = y.min(1.0 / self.m) / 4.0;
        let cutoff = 45.0 / self.m + y;
        while r < cutoff {
            r += w;
            breaks.push(r);
            w = (w * 1.25).min(0.5 / self.m);
        }
        let d = self.dim as f64;
        let mut err = None;
        let radial = gl.integrate_panels(&breaks, |r| match self.value(r, y) {
            Ok(v) => v * pow(r, d - 1.0),
            Err(e) => {
                err = Some(e);
                0.0
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(sphere_area(self.dim) * radial)
    }

    /// Table at fixed height y on the shift radii of `spec`.
    pub fn table(&self, spec: &GridSpec, y: f64) -> Result<RadialKernelTable> {
        let nu = self.order();
        let at_origin = self.value(0.0, y)?;
        let far = self.normalization
            * pow(y, 2.0 * self.s)
            * pow(self.m, nu)
            * sqrt(core::f64::consts::PI / (2.0 * self.m));
        RadialKernelTable::for_grid(
            spec,
            |r| self.value(r, y),
            PowerLaw {
                exponent: 0.0,
                coefficient: at_origin,
            },
            ExpPowerLaw {
                rate: self.m,
                exponent: -nu - 0.5,
                coefficient: far,
            },
            OriginRule::Value(at_origin),
        )
    }
}

/// Calibrated Poisson kernel value. Calibration costs one radial
/// quadrature; hold a [`PoissonKernel`] for repeated use.
pub fn poisson_kernel(r: f64, y: f64, m: f64, s: f64, dim: usize) -> Result<f64> {
    PoissonKernel::calibrated(dim, m, s)?.value(r, y)
}
