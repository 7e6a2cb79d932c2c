//! Hurwitz and lattice zeta values used by the singular quadrature
//! corrections.

use alloc::format;

use libm::{fabs, pow};

use crate::error::{domain, Error, Result};

// B_{2j} / (2j)!
const BERNOULLI_OVER_FACTORIAL: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3_617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
    77_683.0 / 14_101_100_039_391_805_440_000.0,
    -236_364_091.0 / 1_693_824_136_731_743_669_452_800_000.0,
];

const SHIFT: usize = 16;

/// Hurwitz zeta ζ(σ, a) = Σ_{k≥0} (k + a)^{−σ} for real σ ≠ 1 and a > 0,
/// including the analytic continuation to σ < 1.
pub fn hurwitz_zeta(sigma: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) || !sigma.is_finite() || fabs(sigma - 1.0) < 1e-14 {
        return Err(domain("hurwitz_zeta", format!("sigma = {sigma}, a = {a}")));
    }
    let mut sum = 0.0;
    for k in 0..SHIFT {
        sum += pow(k as f64 + a, -sigma);
    }
    let x = SHIFT as f64 + a;
    sum += pow(x, 1.0 - sigma) / (sigma - 1.0) + 0.5 * pow(x, -sigma);
    // Euler–Maclaurin tail with rising factorials σ(σ+1)…(σ+2j−2)
    let mut rising = sigma;
    let mut xp = pow(x, -sigma - 1.0);
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = b * rising * xp;
        sum += term;
        if fabs(term) < 1e-18 * fabs(sum) {
            break;
        }
        let k = 2.0 * j as f64 + 1.0;
        rising *= (sigma + k) * (sigma + k + 1.0);
        xp /= x * x;
    }
    Ok(sum)
}

/// Riemann zeta.
pub fn riemann_zeta(sigma: f64) -> Result<f64> {
    hurwitz_zeta(sigma, 1.0)
}

/// Dirichlet beta β(σ) = Σ_{k≥0} (−1)^k (2k+1)^{−σ}.
pub fn dirichlet_beta(sigma: f64) -> Result<f64> {
    if !sigma.is_finite() {
        return Err(domain("dirichlet_beta", format!("sigma = {sigma}")));
    }
    if fabs(sigma - 1.0) < 1e-14 {
        return Ok(core::f64::consts::FRAC_PI_4);
    }
    Ok(pow(4.0, -sigma) * (hurwitz_zeta(sigma, 0.25)? - hurwitz_zeta(sigma, 0.75)?))
}

/// Lattice sum Σ_{j ∈ Z^dim \ 0} |j|^{−σ}, analytically continued.
/// Closed forms exist for dim 1 and 2 only.
pub fn lattice_zeta(dim: usize, sigma: f64) -> Result<f64> {
    match dim {
        1 => Ok(2.0 * riemann_zeta(sigma)?),
        2 => Ok(4.0 * riemann_zeta(sigma / 2.0)? * dirichlet_beta(sigma / 2.0)?),
        _ => Err(Error::Config(format!(
            "lattice zeta correction is only available in dimensions 1 and 2, got {dim}"
        ))),
    }
}
