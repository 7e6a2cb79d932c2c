//! Scalar special functions: Γ, the Macdonald function K_ν and the
//! extension profile θ_s, plus the operator constants derived from them.

use alloc::format;
use core::f64::consts::PI;

use libm::{cosh, exp, fabs, floor, log, pow, sin, sqrt};

use crate::error::{domain, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument for which Γ is finite in double precision.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x - 1
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", format!("x = {x}")));
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        let r = ln_gamma(1.0 - x)?;
        return Ok(log(PI / sin(PI * x)) - r);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * log(2.0 * PI) + (z + 0.5) * log(t) - t + log(lanczos_sum(z)))
}

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("gamma_fn", format!("x = {x}")));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow {
            op: "gamma_fn",
            detail: format!("x = {x}"),
        });
    }
    if x < 0.5 {
        return Ok(PI / (sin(PI * x) * gamma_fn(1.0 - x)?));
    }
    if x == floor(x) && x <= 21.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let a = sqrt(2.0 * PI) * lanczos_sum(z);
    if x < 140.0 {
        Ok(a * pow(t, z + 0.5) * exp(-t))
    } else {
        // split the power so that t^(z+1/2) does not overflow before e^{-t}
        let half = pow(t, 0.5 * (z + 0.5));
        Ok(a * half * (half * exp(-t)))
    }
}

/// Radius beyond which K_ν switches from quadrature to the asymptotic series.
pub const BESSEL_SWITCH_RADIUS: f64 = 25.0;

const BESSEL_STEP: f64 = 0.1;

/// Macdonald function K_ν(r). Negative orders are accepted through
/// K_{-ν} = K_ν.
pub fn bessel_k(nu: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain("bessel_k", format!("r = {r}")));
    }
    if !nu.is_finite() {
        return Err(domain("bessel_k", format!("nu = {nu}")));
    }
    let nu = fabs(nu);
    let value = if let Some(n) = half_integer_index(nu) {
        bessel_k_half(n, r)
    } else if r > BESSEL_SWITCH_RADIUS {
        bessel_k_asymptotic(nu, r)
    } else {
        bessel_k_quadrature(nu, r)?
    };
    if !value.is_finite() {
        return Err(Error::Overflow {
            op: "bessel_k",
            detail: format!("nu = {nu}, r = {r}"),
        });
    }
    Ok(value)
}

fn half_integer_index(nu: f64) -> Option<u32> {
    let twice = 2.0 * nu;
    let odd = floor(twice + 0.5);
    if fabs(twice - odd) < 1e-14 && (odd as i64) % 2 == 1 && odd < 60.0 {
        Some(((odd as i64 - 1) / 2) as u32)
    } else {
        None
    }
}

/// K_{n+1/2}(r) from the terminating series.
fn bessel_k_half(n: u32, r: f64) -> f64 {
    let n = n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while k <= n {
        term *= (n + k) * (n - k + 1.0) / (k * 2.0 * r);
        sum += term;
        k += 1.0;
    }
    sqrt(PI / (2.0 * r)) * exp(-r) * sum
}

fn bessel_k_asymptotic(nu: f64, r: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * r);
        if fabs(next) >= fabs(term) || fabs(next) < 1e-17 * fabs(sum) || k > 60.0 {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    sqrt(PI / (2.0 * r)) * exp(-r) * sum
}

/// Trapezoid rule on ∫₀^∞ e^{−r cosh t} cosh(νt) dt. The integrand is entire
/// and decays doubly exponentially, so the fixed step converges geometrically.
fn bessel_k_quadrature(nu: f64, r: f64) -> Result<f64> {
    // The dominant exponent νt − r cosh t peaks at t* = asinh(ν/r).
    let t_star = libm::asinh(nu / r);
    let peak = nu * t_star - r * cosh(t_star);
    if peak > 700.0 {
        return Err(Error::Overflow {
            op: "bessel_k",
            detail: format!("nu = {nu}, r = {r}"),
        });
    }
    let shift = peak.max(-r);
    let mut sum = 0.5 * exp(-r - shift);
    let mut i = 1.0;
    loop {
        let t = i * BESSEL_STEP;
        let c = r * cosh(t);
        let term = 0.5 * (exp(nu * t - c - shift) + exp(-nu * t - c - shift));
        sum += term;
        if t > t_star && term < 1e-18 * sum {
            break;
        }
        i += 1.0;
    }
    Ok(BESSEL_STEP * sum * exp(shift))
}

/// Profile θ_s(r) = (2/Γ(s)) (r/2)^s K_s(r), with θ_s(0) = 1.
pub fn theta_profile(s: f64, r: f64) -> Result<f64> {
    check_order("theta_profile", s)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain("theta_profile", format!("r = {r}")));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let v = 2.0 / gamma_fn(s)? * pow(0.5 * r, s) * bessel_k(s, r)?;
    Ok(v.min(1.0))
}

/// θ_s'(r) = −(2^{1−s}/Γ(s)) r^s K_{1−s}(r).
pub fn theta_derivative(s: f64, r: f64) -> Result<f64> {
    check_order("theta_derivative", s)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain("theta_derivative", format!("r = {r}")));
    }
    Ok(-pow(2.0, 1.0 - s) / gamma_fn(s)? * pow(r, s) * bessel_k(1.0 - s, r)?)
}

pub(crate) fn check_order(op: &'static str, s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(domain(op, format!("order s = {s} outside (0, 1)")))
    }
}

/// σ_s = 2^{1−2s} Γ(1−s)/Γ(s).
pub fn trace_constant(s: f64) -> Result<f64> {
    check_order("trace_constant", s)?;
    Ok(pow(2.0, 1.0 - 2.0 * s) * gamma_fn(1.0 - s)? / gamma_fn(s)?)
}

/// Normalising constant of the jump kernel.
pub fn singular_constant(dim: usize, s: f64) -> Result<f64> {
    check_order("singular_constant", s)?;
    let n = dim as f64;
    Ok(pow(2.0, -(n + 2.0 * s) / 2.0 + 1.0) * pow(PI, -n / 2.0) * pow(2.0, 2.0 * s) * s
        * (1.0 - s)
        / gamma_fn(2.0 - s)?)
}

/// Constants attached to one operator instance (dimension, order, mass).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConstants {
    pub dim: usize,
    pub s: f64,
    pub m: f64,
    pub sigma_s: f64,
    pub c_ns: f64,
    pub two_star_s: f64,
}

impl OperatorConstants {
    pub fn new(dim: usize, s: f64, m: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Config(format!("order s = {s} must lie in (0, 1)")));
        }
        if dim == 0 || (dim as f64) <= 2.0 * s {
            return Err(Error::Config(format!("dimension {dim} must exceed 2s = {}", 2.0 * s)));
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::Config(format!("mass m = {m} must be positive")));
        }
        let n = dim as f64;
        Ok(Self {
            dim,
            s,
            m,
            sigma_s: trace_constant(s)?,
            c_ns: singular_constant(dim, s)?,
            two_star_s: 2.0 * n / (n - 2.0 * s),
        })
    }

    /// Bessel order (N + 2s)/2 of the jump kernel.
    pub fn kernel_order(&self) -> f64 {
        (self.dim as f64 + 2.0 * self.s) / 2.0
    }

    /// Symbol (|k|² + m²)^s at a given |k|².
    pub fn symbol(&self, k2: f64) -> f64 {
        pow(k2 + self.m * self.m, self.s)
    }
}

/// Surface area of the unit sphere in R^dim.
pub fn sphere_area(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * pow(PI, n / 2.0) / gamma_fn(n / 2.0).unwrap_or(f64::NAN)
}
