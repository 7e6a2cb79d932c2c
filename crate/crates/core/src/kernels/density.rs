use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::PI;
use libm::{exp, pow, sqrt};
use num_complex::Complex64;

use crate::error::{domain, numerical, Result};
use crate::grid::{inverse_transform, GridField, GridSpec, RadialSymbolCache, SpectrumField};
use crate::specfun::{bessel_k, check_order, gamma_fn};

/// Characteristic-function value at the Nyquist corner above which the
/// density counts as unresolved.
pub const RESOLUTION_TOLERANCE: f64 = 1e-8;

/// Reorders a field stored by shift (index 0 ↔ offset 0) into physical
/// order on [−L, L)^dim.
pub fn shift_to_physical(shifted: &GridField) -> GridField {
    let spec = *shifted.spec();
    let half = spec.points() / 2;
    let n = spec.points();
    let mut out = alloc::vec![0.0; spec.len()];
    for (i, v) in shifted.values().iter().enumerate() {
        let mut idx = spec.multi_index(i);
        for a in idx.iter_mut().take(spec.dim()) {
            *a = (*a + half) % n;
        }
        out[spec.flat_index(&idx)] = *v;
    }
    GridField::new(spec, out).expect("permutation of finite samples")
}

/// Radial function of |x| sampled at shift positions, arranged physically.
pub(crate) fn density_from_symbol(spec: &GridSpec, symbol: impl FnMut(f64) -> f64) -> GridField {
    let cache = RadialSymbolCache::new(spec, symbol);
    let coeffs: Vec<Complex64> = (0..spec.len())
        .map(|i| Complex64::new(cache.value(i), 0.0))
        .collect();
    let c = SpectrumField::new(*spec, coeffs).expect("length matches");
    let shifted = inverse_transform(&c).scaled(1.0 / spec.cell_volume());
    shift_to_physical(&shifted)
}

/// p_{s,m}(·, t): inverse transform of e^{−t[(|k|²+m²)^s − m^{2s}]}.
pub fn relativistic_density(spec: &GridSpec, t: f64, m: f64, s: f64) -> Result<GridField> {
    check_order("relativistic_density", s)?;
    if !(t > 0.0) || !(m > 0.0) {
        return Err(domain("relativistic_density", format!("t = {t}, m = {m}")));
    }
    let m2s = pow(m, 2.0 * s);
    let char_fn = |k2: f64| exp(-t * (pow(k2 + m * m, s) - m2s));
    let kmax = PI / spec.spacing();
    let corner = char_fn(kmax * kmax);
    if corner > RESOLUTION_TOLERANCE {
        return Err(numerical(
            "relativistic_density",
            format!(
                "density unresolved at spacing {}: characteristic function is {corner:e} at the Nyquist frequency",
                spec.spacing()
            ),
        ));
    }
    Ok(density_from_symbol(spec, char_fn))
}

/// Closed form at s = 1/2:
/// 2(m/2π)^{(N+1)/2} t e^{mt} (|x|²+t²)^{−(N+1)/4} K_{(N+1)/2}(m√(|x|²+t²)).
pub fn relativistic_density_half(r: f64, t: f64, m: f64, dim: usize) -> Result<f64> {
    if !(t > 0.0) || !(m > 0.0) || !(r >= 0.0) {
        return Err(domain("relativistic_density_half", format!("r = {r}, t = {t}, m = {m}")));
    }
    let n = dim as f64;
    let rho = sqrt(r * r + t * t);
    let nu = (n + 1.0) / 2.0;
    // e^{mt}K_ν(mρ) computed as a ratio to avoid overflow at large t
    let k = bessel_k(nu, m * rho)?;
    Ok(2.0 * pow(m / (2.0 * PI), nu) * t * exp(m * t) * pow(rho, -nu) * k)
}

/// Lévy measure density of the relativistic process.
pub fn levy_measure(r: f64, m: f64, s: f64, dim: usize) -> Result<f64> {
    check_order("levy_measure", s)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain("levy_measure", format!("r = {r}")));
    }
    if !(m > 0.0) {
        return Err(domain("levy_measure", format!("m = {m}")));
    }
    let n = dim as f64;
    let nu = (n + 2.0 * s) / 2.0;
    let c = 2.0 * s * pow(2.0, (2.0 * s - n) / 2.0) / (pow(PI, n / 2.0) * gamma_fn(1.0 - s)?);
    Ok(c * pow(m / r, nu) * bessel_k(nu, m * r)?)
}

/// Heat kernel (4πτ)^{−N/2} e^{−r²/4τ}.
pub fn heat_kernel(r: f64, tau: f64, dim: usize) -> f64 {
    pow(4.0 * PI * tau, -(dim as f64) / 2.0) * exp(-r * r / (4.0 * tau))
}

/// Gaussian-plus-jump envelope g_{m^{2s}t}(mr/√2) + t·ν¹(mr/√2) that bounds
/// the density up to a constant.
pub fn density_envelope(r: f64, t: f64, m: f64, s: f64, dim: usize) -> Result<f64> {
    let z = m * r / core::f64::consts::SQRT_2;
    Ok(heat_kernel(z, pow(m, 2.0 * s) * t, dim) + t * levy_measure(z, 1.0, s, dim)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_mass() {
        let g = GridSpec::new(1, 30.0, 4096).unwrap();
        let p = relativistic_density(&g, 1.0, 1.0, 0.3).unwrap();
        assert!((p.integral() - 1.0).abs() < 1e-6);
        assert!(p.min() > -1e-8);
    }

    #[test]
    fn unresolved_density_is_an_error() {
        let g = GridSpec::new(1, 30.0, 64).unwrap();
        assert!(relativistic_density(&g, 0.01, 1.0, 0.3).is_err());
    }

    #[test]
    fn half_order_closed_form() {
        let g = GridSpec::new(1, 30.0, 1024).unwrap();
        let p = relativistic_density(&g, 1.0, 1.0, 0.5).unwrap();
        let exact = GridField::from_fn(g, |x| relativistic_density_half(x[0].abs(), 1.0, 1.0, 1).unwrap()).unwrap();
        let err = p.sub(&exact).max_abs() / exact.max_abs();
        assert!(err < 1e-4, "err = {err}");
        assert_relative_eq!(exact.integral(), 1.0, max_relative = 1e-6);
    }

    #[test]
    fn mass_scaling() {
        // p_{s,m}(x,t) = m^N p_{s,1}(mx, m^{2s}t); sample x on the m = 2 grid
        let (s, t, m) = (0.4, 0.8, 2.0);
        let g2 = GridSpec::new(1, 15.0, 2048).unwrap();
        let g1 = GridSpec::new(1, 30.0, 2048).unwrap();
        let p2 = relativistic_density(&g2, t, m, s).unwrap();
        let p1 = relativistic_density(&g1, pow(m, 2.0 * s) * t, 1.0, s).unwrap();
        let scaled = p1.scaled(m);
        let diff: f64 = p2.values().iter().zip(scaled.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-10 * p2.max(), "diff = {diff}");
    }

    #[test]
    fn levy_measure_limits() {
        let (s, m, dim) = (0.3, 1.0, 1);
        let mut prev = f64::INFINITY;
        let mut r = 0.1;
        while r <= 20.0 {
            let v = levy_measure(r, m, s, dim).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
            r += 0.1;
        }
        let tail = |r: f64| levy_measure(r, m, s, dim).unwrap() * (m * r).exp() * r.powf((1.0 + 2.0 * s + 1.0) / 2.0);
        assert!((tail(80.0) / tail(60.0) - 1.0).abs() < 5e-3);
        let n = dim as f64;
        let limit = 2.0 * s * 2f64.powf(2.0 * s - 1.0) * gamma_fn((n + 2.0 * s) / 2.0).unwrap()
            / (PI.powf(n / 2.0) * gamma_fn(1.0 - s).unwrap());
        let v = levy_measure(1.0, 1e-3, s, dim).unwrap();
        assert_relative_eq!(v, limit, max_relative = 1e-3);
        assert!(levy_measure(0.0, 1.0, s, dim).is_err());
    }
}
