//! (−Δ + m²)^s as a Fourier multiplier and as a singular integral over grid
//! shifts, plus the associated H^s norm.

use alloc::format;
use alloc::vec::Vec;

use libm::{pow, sqrt};

use crate::error::{domain, Error, Result};
use crate::grid::{apply_radial_multiplier, convolve_with_weights, norm_slots, transform, GridField, GridSpec};
use crate::kernels::{ExpPowerLaw, OriginRule, PowerLaw, RadialKernelTable};
use crate::specfun::{bessel_k, gamma_fn, singular_constant};
use crate::zeta::lattice_zeta;

fn check_params(op: &'static str, m: f64, s: f64, allow_one: bool) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(domain(op, format!("mass m = {m}")));
    }
    let ok = if allow_one { s > 0.0 && s <= 1.0 } else { s > 0.0 && s < 1.0 };
    if !ok {
        return Err(domain(op, format!("order s = {s}")));
    }
    Ok(())
}

/// F^{−1}((|k|² + m²)^s F u). Accepts s = 1 as a sanity case.
pub fn apply_fourier(u: &GridField, m: f64, s: f64) -> Result<GridField> {
    check_params("apply_fourier", m, s, true)?;
    let m2 = m * m;
    apply_radial_multiplier(u, |k2| pow(k2 + m2, s))
}

/// Applies the inverse (|k|² + m² + shift)^{−s}… style preconditioner: any
/// radial symbol evaluated at (|k|² + m²)^s.
pub fn apply_symbol_function(u: &GridField, m: f64, s: f64, f: impl Fn(f64) -> f64) -> Result<GridField> {
    check_params("apply_symbol_function", m, s, true)?;
    let m2 = m * m;
    apply_radial_multiplier(u, |k2| f(pow(k2 + m2, s)))
}

/// Discrete H^s norm (h^N n^{−N} Σ_k (|k|²+m²)^s |û_k|²)^{1/2}.
pub fn hs_norm(u: &GridField, m: f64, s: f64) -> Result<f64> {
    check_params("hs_norm", m, s, true)?;
    let spec = u.spec();
    let c = transform(u);
    let m2 = m * m;
    let sum: f64 = c
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, z)| pow(spec.k_squared(i) + m2, s) * z.norm_sqr())
        .sum();
    Ok(sqrt(spec.cell_volume() * sum / spec.len() as f64))
}

/// Jump kernel J(r) = C(N,s) m^ν r^{−ν} K_ν(mr), ν = (N+2s)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpKernel {
    pub dim: usize,
    pub m: f64,
    pub s: f64,
    pub constant: f64,
}

impl JumpKernel {
    pub fn new(dim: usize, m: f64, s: f64) -> Result<Self> {
        check_params("jump_kernel", m, s, false)?;
        Ok(Self {
            dim,
            m,
            s,
            constant: singular_constant(dim, s)?,
        })
    }

    pub fn order(&self) -> f64 {
        (self.dim as f64 + 2.0 * self.s) / 2.0
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        let nu = self.order();
        Ok(self.constant * pow(self.m, nu) * pow(r, -nu) * bessel_k(nu, self.m * r)?)
    }

    /// Massless limit C Γ(ν) 2^{ν−1} r^{−2ν}.
    pub fn small_r_law(&self) -> Result<PowerLaw> {
        let nu = self.order();
        Ok(PowerLaw {
            exponent: -2.0 * nu,
            coefficient: self.constant * gamma_fn(nu)? * pow(2.0, nu - 1.0),
        })
    }

    pub fn large_r_law(&self) -> ExpPowerLaw {
        let nu = self.order();
        ExpPowerLaw {
            rate: self.m,
            exponent: -nu - 0.5,
            coefficient: self.constant * pow(self.m, nu - 0.5) * sqrt(core::f64::consts::PI / 2.0),
        }
    }

    pub fn table(&self, spec: &GridSpec) -> Result<RadialKernelTable> {
        RadialKernelTable::for_grid(
            spec,
            |r| self.value(r),
            self.small_r_law()?,
            self.large_r_law(),
            OriginRule::Weight(0.0),
        )
    }
}

/// What to do with the principal-value core |y| < inner_cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreTreatment {
    /// Drop it; the error is O(inner_cut^{2−2s}).
    Drop,
    /// Drop only the origin and add the lattice-zeta correction of the
    /// midpoint rule for the r^{2−N−2s} leading term (dimensions 1 and 2).
    LatticeZeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    /// Direct loops for small problems, FFT convolution otherwise.
    Auto,
    Direct,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularQuadratureConfig {
    pub inner_cut: f64,
    pub outer_cut: f64,
    pub core: CoreTreatment,
    pub summation: Summation,
}

impl SingularQuadratureConfig {
    /// inner_cut = h/2 and outer_cut = L.
    pub fn for_grid(spec: &GridSpec) -> Self {
        Self {
            inner_cut: 0.5 * spec.spacing(),
            outer_cut: spec.half_width(),
            core: CoreTreatment::Drop,
            summation: Summation::Auto,
        }
    }

    pub fn with_core(mut self, core: CoreTreatment) -> Self {
        self.core = core;
        self
    }

    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        let h = spec.spacing();
        if !(self.inner_cut >= 0.5 * h * (1.0 - 1e-12)) {
            return Err(Error::Config(format!(
                "inner_cut {} is below half the grid spacing {}",
                self.inner_cut,
                0.5 * h
            )));
        }
        if self.outer_cut > spec.half_width() * (1.0 + 1e-12) {
            return Err(Error::Truncation {
                op: "apply_singular_integral",
                radius: self.outer_cut,
                half_width: spec.half_width(),
            });
        }
        if !(self.outer_cut > self.inner_cut) {
            return Err(Error::Config("outer_cut must exceed inner_cut".into()));
        }
        if self.core == CoreTreatment::LatticeZeta && self.inner_cut >= h {
            return Err(Error::Config(
                "the lattice-zeta core correction needs inner_cut < h so only the origin is dropped".into(),
            ));
        }
        Ok(())
    }
}

/// Shift weights h^N J(|y|) for inner_cut ≤ |y| ≤ outer_cut, laid out by
/// shift index, and their sum.
pub fn jump_weights(spec: &GridSpec, m: f64, s: f64, cfg: &SingularQuadratureConfig) -> Result<(GridField, f64)> {
    cfg.validate(spec)?;
    let kernel = JumpKernel::new(spec.dim(), m, s)?;
    let (slot, norms) = norm_slots(spec);
    let h = spec.spacing();
    let vol = spec.cell_volume();
    let per_norm = norms
        .iter()
        .map(|&q| {
            let r = h * sqrt(q as f64);
            if q == 0 || r < cfg.inner_cut || r > cfg.outer_cut {
                Ok(0.0)
            } else {
                Ok(vol * kernel.value(r)?)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let w: Vec<f64> = slot.iter().map(|&k| per_norm[k as usize]).collect();
    let total = w.iter().sum();
    Ok((GridField::new(*spec, w)?, total))
}

/// m^{2s}u + Σ_y h^N J(|y|)(u(x) − u(x − y)) over the configured shift set,
/// i.e. the symmetrised second-difference midpoint rule.
pub fn apply_singular_integral(
    u: &GridField,
    m: f64,
    s: f64,
    cfg: &SingularQuadratureConfig,
) -> Result<GridField> {
    let spec = *u.spec();
    let (w, total) = jump_weights(&spec, m, s, cfg)?;
    let direct = match cfg.summation {
        Summation::Direct => true,
        Summation::Spectral => false,
        Summation::Auto => spec.len() <= 4096,
    };
    let conv = if direct { direct_convolution(u, &w) } else { convolve_with_weights(u, &w)? };
    let m2s = pow(m, 2.0 * s);
    let mut out: Vec<f64> = u
        .values()
        .iter()
        .zip(conv.values())
        .map(|(v, c)| (m2s + total) * v - c)
        .collect();
    if cfg.core == CoreTreatment::LatticeZeta {
        let n = spec.dim() as f64;
        let nu = (n + 2.0 * s) / 2.0;
        let c = singular_constant(spec.dim(), s)?;
        let a = 0.5 * c * gamma_fn(nu)? * pow(2.0, nu - 1.0);
        let z = lattice_zeta(spec.dim(), n + 2.0 * s - 2.0)?;
        let lap = apply_radial_multiplier(u, |k2| -k2)?;
        let coef = z * pow(spec.spacing(), 2.0 - 2.0 * s) * a / n;
        for (o, l) in out.iter_mut().zip(lap.values()) {
            *o += coef * l;
        }
    }
    GridField::new(spec, out)
}

/// Σ_j w_j u(x_i − y_j) by explicit periodic loops.
fn direct_convolution(u: &GridField, w: &GridField) -> GridField {
    let spec = *u.spec();
    let n = spec.points();
    let dim = spec.dim();
    let shifts: Vec<(usize, f64)> = w
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(j, v)| (j, *v))
        .collect();
    let mut out = alloc::vec![0.0; spec.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let xi = spec.multi_index(i);
        let mut acc = 0.0;
        for &(j, wj) in &shifts {
            let yj = spec.multi_index(j);
            let mut idx = [0usize; crate::grid::MAX_DIM];
            for a in 0..dim {
                idx[a] = (xi[a] + n - yj[a]) % n;
            }
            acc += wj * u.values()[spec.flat_index(&idx)];
        }
        *o = acc;
    }
    GridField::new(spec, out).expect("finite inputs give finite sums")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gaussian(spec: GridSpec) -> GridField {
        GridField::from_fn(spec, |x| (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp()).unwrap()
    }

    fn random_smooth(spec: GridSpec, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0)))
            .collect();
        GridField::from_fn(spec, |x| {
            c.iter().map(|(x0, w, a)| a * (-(x[0] - x0).powi(2) / (w * w)).exp()).sum()
        })
        .unwrap()
    }

    #[test]
    fn constants_and_modes() {
        let g = GridSpec::new(1, 10.0, 128).unwrap();
        let (m, s) = (1.5, 0.3);
        let c = GridField::constant(g, 2.0);
        let f = apply_fourier(&c, m, s).unwrap();
        assert!(f.values().iter().all(|v| (v - 2.0 * m.powf(2.0 * s)).abs() < 1e-12));
        let cfg = SingularQuadratureConfig::for_grid(&g);
        let si = apply_singular_integral(&c, m, s, &cfg).unwrap();
        assert!(si.values().iter().all(|v| (v - 2.0 * m.powf(2.0 * s)).abs() < 1e-11));

        let k0 = g.wavenumber(4);
        let w = GridField::from_fn(g, |x| (k0 * x[0]).cos()).unwrap();
        let aw = apply_fourier(&w, m, s).unwrap();
        assert!(aw.relative_l2_error(&w.scaled((k0 * k0 + m * m).powf(s))) < 1e-13);
        let norm = hs_norm(&w, m, s).unwrap();
        assert_relative_eq!(norm, (k0 * k0 + m * m).powf(s / 2.0) * w.norm_l2(), max_relative = 1e-12);
        assert_eq!(hs_norm(&GridField::zeros(g), m, s).unwrap(), 0.0);
    }

    #[test]
    fn order_one_is_the_helmholtz_operator() {
        let g = GridSpec::new(1, 10.0, 256).unwrap();
        let u = gaussian(g);
        let a = apply_fourier(&u, 2.0, 1.0).unwrap();
        // −u'' + 4u for e^{−x²/2} is (1 − x² + 4)e^{−x²/2}
        let exact = GridField::from_fn(g, |x| (5.0 - x[0] * x[0]) * (-0.5 * x[0] * x[0]).exp()).unwrap();
        assert!(a.sub(&exact).max_abs() < 1e-10);
    }

    #[test]
    fn one_dimensional_equivalence_with_dropped_core() {
        let g = GridSpec::new(1, 20.0, 1024).unwrap();
        let u = gaussian(g);
        let f = apply_fourier(&u, 1.0, 0.3).unwrap();
        let si = apply_singular_integral(&u, 1.0, 0.3, &SingularQuadratureConfig::for_grid(&g)).unwrap();
        assert!(si.relative_l2_error(&f) <= 1e-3);
    }

    #[test]
    fn direct_and_spectral_summation_agree() {
        let g = GridSpec::new(2, 4.0, 16).unwrap();
        let u = GridField::from_fn(g, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp()).unwrap();
        let mut cfg = SingularQuadratureConfig::for_grid(&g);
        cfg.summation = Summation::Direct;
        let a = apply_singular_integral(&u, 1.0, 0.4, &cfg).unwrap();
        cfg.summation = Summation::Spectral;
        let b = apply_singular_integral(&u, 1.0, 0.4, &cfg).unwrap();
        assert!(a.relative_l2_error(&b) < 1e-13);
    }

    #[test]
    fn massless_limit_of_the_kernel() {
        for &(dim, s) in &[(1usize, 0.3), (2, 0.5)] {
            let j = JumpKernel::new(dim, 1e-3, s).unwrap();
            let nu = j.order();
            let limit = j.constant * 2f64.powf(nu - 1.0) * gamma_fn(nu).unwrap();
            assert_relative_eq!(j.value(1.0).unwrap(), limit, max_relative = 1e-3);
        }
    }

    #[test]
    fn kernel_positive_decreasing_with_bounded_rescalings() {
        let j = JumpKernel::new(1, 1.0, 0.3).unwrap();
        let nu = j.order();
        let mut prev = f64::INFINITY;
        let mut r = 1e-3;
        while r < 40.0 {
            let v = j.value(r).unwrap();
            assert!(v > 0.0 && v < prev);
            assert!(r.powf(2.0 * nu) * v <= j.small_r_law().unwrap().coefficient * 1.0001);
            if r > 1.0 {
                assert!((r.exp() * r.powf(nu + 0.5) * v) < 2.0 * j.large_r_law().coefficient);
            }
            prev = v;
            r *= 1.3;
        }
    }

    #[test]
    fn self_adjoint_and_positive() {
        let g = GridSpec::new(1, 8.0, 256).unwrap();
        let cfg = SingularQuadratureConfig::for_grid(&g);
        let (m, s) = (0.8, 0.4);
        for seed in 0..4 {
            let u = random_smooth(g, seed);
            let v = random_smooth(g, seed + 100);
            for apply in [
                &(|w: &GridField| apply_fourier(w, m, s).unwrap()) as &dyn Fn(&GridField) -> GridField,
                &|w: &GridField| apply_singular_integral(w, m, s, &cfg).unwrap(),
            ] {
                let (au, av) = (apply(&u), apply(&v));
                assert!((au.dot(&v) - u.dot(&av)).abs() < 1e-10 * au.norm_l2() * v.norm_l2());
                assert!(au.dot(&u) >= m.powf(2.0 * s) * u.dot(&u) - 1e-12);
            }
            let hs = hs_norm(&u, m, s).unwrap();
            assert!(hs * hs >= m.powf(2.0 * s) * u.dot(&u) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn config_errors() {
        let g = GridSpec::new(1, 5.0, 64).unwrap();
        let u = gaussian(g);
        let mut cfg = SingularQuadratureConfig::for_grid(&g);
        cfg.outer_cut = 6.0;
        assert!(matches!(apply_singular_integral(&u, 1.0, 0.3, &cfg), Err(Error::Truncation { .. })));
        cfg.outer_cut = 5.0;
        cfg.inner_cut = 0.1 * g.spacing();
        assert!(matches!(apply_singular_integral(&u, 1.0, 0.3, &cfg), Err(Error::Config(_))));
        assert!(apply_fourier(&u, 0.0, 0.3).is_err());
        assert!(apply_fourier(&u, 1.0, 1.2).is_err());
        assert!(apply_singular_integral(&u, 1.0, 1.0, &SingularQuadratureConfig::for_grid(&g)).is_err());
    }
}
