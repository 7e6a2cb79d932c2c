use alloc::format;

use core::f64::consts::PI;
use libm::{floor, pow, sqrt};

use super::{ExpPowerLaw, OriginRule, PowerLaw, RadialKernelTable};
use crate::error::{domain, Error, Result};
use crate::grid::GridSpec;
use crate::specfun::{bessel_k, gamma_fn};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn prefactor(alpha: f64, dim: usize) -> Result<f64> {
    let n = dim as f64;
    Ok(1.0 / (pow(2.0, (n + alpha - 2.0) / 2.0) * pow(PI, n / 2.0) * gamma_fn(alpha / 2.0)?))
}

/// Kernel of (1 − Δ)^{−α/2} in R^dim.
pub fn bessel_potential_kernel(alpha: f64, r: f64, dim: usize) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain("bessel_potential_kernel", format!("alpha = {alpha}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain("bessel_potential_kernel", format!("r = {r}")));
    }
    let n = dim as f64;
    Ok(prefactor(alpha, dim)? * bessel_k((n - alpha) / 2.0, r)? * pow(r, (alpha - n) / 2.0))
}

/// Leading behaviour at the origin for 0 < α < N.
pub fn small_r_law(alpha: f64, dim: usize) -> Result<PowerLaw> {
    let n = dim as f64;
    if !(alpha < n) {
        return Err(Error::Config(format!("power-law origin needs alpha < N, got {alpha}")));
    }
    Ok(PowerLaw {
        exponent: alpha - n,
        coefficient: gamma_fn((n - alpha) / 2.0)?
            / (pow(2.0, alpha) * pow(PI, n / 2.0) * gamma_fn(alpha / 2.0)?),
    })
}

pub fn large_r_law(alpha: f64, dim: usize) -> Result<ExpPowerLaw> {
    let n = dim as f64;
    Ok(ExpPowerLaw {
        rate: 1.0,
        exponent: (alpha - n - 1.0) / 2.0,
        coefficient: prefactor(alpha, dim)? * sqrt(PI / 2.0),
    })
}

/// Origin treatment for a point-sampled grid sum.
pub fn origin_rule(alpha: f64, dim: usize) -> Result<OriginRule> {
    let n = dim as f64;
    let pref = prefactor(alpha, dim)?;
    if alpha > n {
        let nu = (alpha - n) / 2.0;
        return Ok(OriginRule::Value(pref * gamma_fn(nu)? * pow(2.0, nu - 1.0)));
    }
    if alpha == n {
        if dim != 1 {
            return Err(Error::Config("alpha = N origin rule is implemented for N = 1".into()));
        }
        // K_0(r) = −ln r + ln 2 − γ_E + o(1)
        return Ok(OriginRule::LogCorrected {
            coefficient: pref,
            regular: pref * (core::f64::consts::LN_2 - EULER_GAMMA),
        });
    }
    let nu = (n - alpha) / 2.0;
    if nu >= 1.0 || nu == floor(nu) {
        return Err(Error::Config(format!(
            "no origin correction for alpha = {alpha} in dimension {dim}"
        )));
    }
    // r^{−ν}K_ν(r) = ½Γ(ν)2^ν r^{−2ν} + ½Γ(−ν)2^{−ν} + O(r^{2−2ν}),
    // Γ(−ν) = −Γ(1−ν)/ν
    let gamma_neg = -gamma_fn(1.0 - nu)? / nu;
    Ok(OriginRule::SingularCorrected {
        regular: pref * gamma_neg * pow(2.0, -nu - 1.0),
    })
}

/// Table on the shift radii of `spec` with the origin weight chosen so that
/// grid sums integrate the singularity.
pub fn bessel_potential_table(alpha: f64, spec: &GridSpec) -> Result<RadialKernelTable> {
    let dim = spec.dim();
    let small = if alpha < dim as f64 {
        small_r_law(alpha, dim)?
    } else {
        PowerLaw {
            exponent: 0.0,
            coefficient: bessel_potential_kernel(alpha, spec.spacing() * 1e-3, dim)?,
        }
    };
    RadialKernelTable::for_grid(
        spec,
        |r| bessel_potential_kernel(alpha, r, dim),
        small,
        large_r_law(alpha, dim)?,
        origin_rule(alpha, dim)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn asymptotic_laws() {
        for &(alpha, dim) in &[(0.6, 1), (0.5, 1), (1.2, 2), (1.0, 3)] {
            let law = small_r_law(alpha, dim).unwrap();
            let r = 1e-6;
            let v = bessel_potential_kernel(alpha, r, dim).unwrap();
            assert!((v / law.eval(r) - 1.0).abs() < 0.05, "alpha={alpha} dim={dim}");
            let big = large_r_law(alpha, dim).unwrap();
            let r = 30.0;
            let v = bessel_potential_kernel(alpha, r, dim).unwrap();
            assert!((v / big.eval(r) - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn finite_origin_above_dimension() {
        let v0 = match origin_rule(1.5, 1).unwrap() {
            OriginRule::Value(v) => v,
            other => panic!("unexpected rule {other:?}"),
        };
        assert_relative_eq!(bessel_potential_kernel(1.5, 1e-9, 1).unwrap(), v0, max_relative = 1e-3);
        let expect = gamma_fn(0.25).unwrap() / (2.0 * PI.sqrt() * gamma_fn(0.75).unwrap());
        assert_relative_eq!(v0, expect, max_relative = 1e-13);
    }

    #[test]
    fn unit_mass_with_corrected_origin() {
        for &alpha in &[0.6, 1.0, 1.7] {
            let g = GridSpec::new(1, 16.0, 1024).unwrap();
            let w = bessel_potential_table(alpha, &g).unwrap().grid_weights(&g).unwrap();
            let tol = if alpha > 1.0 { 1e-3 } else { 1e-5 };
            assert!((w.values().iter().sum::<f64>() - 1.0).abs() < tol, "alpha={alpha}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_potential_kernel(0.5, 0.0, 1).is_err());
        assert!(bessel_potential_kernel(0.0, 1.0, 1).is_err());
        assert!(bessel_potential_kernel(-1.0, 1.0, 1).is_err());
    }
}
