//! Periodic boxes, sampled fields and their discrete Fourier transforms.
//!
//! Conventions shared by every module:
//! * the box is [−L, L)^dim with n points per axis, x_i = −L + i·h, h = 2L/n;
//! * samples are stored lexicographically with the last axis fastest;
//! * `transform` computes c_j = Σ_i u_i e^{−2πi i·j/n} with no scaling, and
//!   `inverse_transform` applies the conjugate sum divided by n^dim, so
//!   Σ|u_i|² = n^{−dim} Σ|c_j|²;
//! * coefficient j (in FFT storage order) carries wavevector k = (π/L)·j̃
//!   where j̃ is j folded into {−n/2, …, n/2−1}.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, sin, sqrt};
use num_complex::Complex64;

use crate::error::{numerical, Error, Result};
use crate::fft::Radix2;
use crate::kernels::RadialKernelTable;

pub const MAX_DIM: usize = 3;

/// Geometry of a periodic box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Config(format!("grid dimension {dim} must be 1, 2 or 3")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Config(format!("box half-width {half_width} must be positive")));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::Config(format!(
                "points per axis {points} must be a power of two and at least 16"
            )));
        }
        Ok(Self {
            dim,
            half_width,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.spacing(), self.dim as f64)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Physical coordinates of a sample.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.coordinate(idx[a]);
        }
        x
    }

    /// Index folded into {−n/2, …, n/2−1}.
    pub fn signed(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        PI / self.half_width * self.signed(i) as f64
    }

    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut k = [0.0; MAX_DIM];
        for a in 0..self.dim {
            k[a] = self.wavenumber(idx[a]);
        }
        k
    }

    /// Σ j̃_a² of the folded multi-index; identifies |k| and minimal-image |y|.
    pub fn folded_norm2(&self, flat: usize) -> u64 {
        let idx = self.multi_index(flat);
        (0..self.dim)
            .map(|a| {
                let j = self.signed(idx[a]);
                (j * j) as u64
            })
            .sum()
    }

    pub fn k_squared(&self, flat: usize) -> f64 {
        let w = PI / self.half_width;
        w * w * self.folded_norm2(flat) as f64
    }

    /// Minimal-image offset vector of the shift stored at `flat`.
    pub fn offset(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let h = self.spacing();
        let mut y = [0.0; MAX_DIM];
        for a in 0..self.dim {
            y[a] = h * self.signed(idx[a]) as f64;
        }
        y
    }

    pub fn offset_radius(&self, flat: usize) -> f64 {
        self.spacing() * sqrt(self.folded_norm2(flat) as f64)
    }

    /// Flat index of the grid point x = 0.
    pub fn origin_index(&self) -> usize {
        let idx = [self.points / 2; MAX_DIM];
        self.flat_index(&idx)
    }

    pub(crate) fn check_same(&self, other: &GridSpec, op: &'static str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Shape(format!("{op}: grids differ ({self:?} vs {other:?})")))
        }
    }
}

/// Real samples on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Shape(format!(
                "expected {} samples, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Shape(format!("sample {i} is not finite")));
        }
        Ok(Self { spec, values })
    }

    pub(crate) fn from_raw(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::from_raw(spec, alloc::vec![0.0; spec.len()])
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        Self::from_raw(spec, alloc::vec![c; spec.len()])
    }

    /// Samples `f` at every grid point; `f` sees a slice of length dim.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let values = (0..spec.len())
            .map(|i| f(&spec.point(i)[..spec.dim()]))
            .collect();
        Self::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> GridField {
        Self::from_raw(self.spec, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Discrete inner product h^dim Σ u_i v_i.
    pub fn dot(&self, other: &GridField) -> f64 {
        debug_assert_eq!(self.spec, other.spec);
        self.spec.cell_volume() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm_l2(&self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn integral(&self) -> f64 {
        self.spec.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Position of the largest sample, lexicographically first on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn scaled(&self, a: f64) -> GridField {
        self.map(|v| a * v)
    }

    /// self += a·other
    pub fn add_scaled(&mut self, a: f64, other: &GridField) {
        debug_assert_eq!(self.spec, other.spec);
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }

    pub fn sub(&self, other: &GridField) -> GridField {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }

    /// Relative discrete L² distance |self − reference| / |reference|.
    pub fn relative_l2_error(&self, reference: &GridField) -> f64 {
        let d = self.sub(reference).norm_l2();
        let r = reference.norm_l2();
        if r > 0.0 {
            d / r
        } else {
            d
        }
    }
}

/// Complex coefficients in FFT storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    spec: GridSpec,
    coefficients: Vec<Complex64>,
}

impl SpectrumField {
    pub fn new(spec: GridSpec, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != spec.len() {
            return Err(Error::Shape(format!(
                "expected {} coefficients, got {}",
                spec.len(),
                coefficients.len()
            )));
        }
        Ok(Self { spec, coefficients })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    /// Multiplies every coefficient by `f(flat index)`.
    pub fn scale_by(&mut self, mut f: impl FnMut(usize) -> f64) {
        for (i, c) in self.coefficients.iter_mut().enumerate() {
            *c *= f(i);
        }
    }
}

fn transform_in_place(spec: &GridSpec, buf: &mut [Complex64], inverse: bool) {
    let n = spec.points();
    let plan = Radix2::new(n);
    let len = spec.len();
    let mut line = alloc::vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..spec.dim() {
        let stride = n.pow((spec.dim() - 1 - axis) as u32);
        for outer in 0..len / (n * stride) {
            for inner in 0..stride {
                let base = outer * n * stride + inner;
                for (j, c) in line.iter_mut().enumerate() {
                    *c = buf[base + j * stride];
                }
                plan.run(&mut line, inverse);
                for (j, c) in line.iter().enumerate() {
                    buf[base + j * stride] = *c;
                }
            }
        }
    }
}

pub fn transform(u: &GridField) -> SpectrumField {
    let mut buf: Vec<Complex64> = u.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_in_place(&u.spec, &mut buf, false);
    SpectrumField {
        spec: u.spec,
        coefficients: buf,
    }
}

/// Inverse transform, keeping the real part.
pub fn inverse_transform(c: &SpectrumField) -> GridField {
    let mut buf = c.coefficients.clone();
    transform_in_place(&c.spec, &mut buf, true);
    let scale = 1.0 / c.spec.len() as f64;
    GridField::from_raw(c.spec, buf.iter().map(|z| z.re * scale).collect())
}

/// F^{−1}(symbol(k)·F u). The symbol receives the wavevector as a slice.
pub fn apply_multiplier(u: &GridField, mut symbol: impl FnMut(&[f64]) -> f64) -> Result<GridField> {
    let spec = u.spec;
    let mut c = transform(u);
    for (i, z) in c.coefficients.iter_mut().enumerate() {
        let k = spec.frequency(i);
        let v = symbol(&k[..spec.dim()]);
        if !v.is_finite() {
            return Err(numerical(
                "apply_multiplier",
                format!("symbol is {v} at frequency {:?}", &k[..spec.dim()]),
            ));
        }
        *z *= v;
    }
    Ok(inverse_transform(&c))
}

/// Multiplier depending on |k|² only; values are cached per distinct |k|.
pub fn apply_radial_multiplier(u: &GridField, symbol: impl FnMut(f64) -> f64) -> Result<GridField> {
    let spec = u.spec;
    let table = RadialSymbolCache::new(&spec, symbol);
    if let Some(bad) = table.first_non_finite() {
        return Err(numerical(
            "apply_multiplier",
            format!("symbol is not finite at |k|^2 = {bad}"),
        ));
    }
    let mut c = transform(u);
    for (i, z) in c.coefficients.iter_mut().enumerate() {
        *z *= table.value(i);
    }
    Ok(inverse_transform(&c))
}

/// Values of a radial function of |k|² at every distinct grid norm.
pub(crate) struct RadialSymbolCache {
    slot: Vec<u32>,
    values: Vec<f64>,
    norms: Vec<u64>,
}

impl RadialSymbolCache {
    pub(crate) fn new(spec: &GridSpec, symbol: impl FnMut(f64) -> f64) -> Self {
        Self::with_scale(spec, (PI / spec.half_width()) * (PI / spec.half_width()), symbol)
    }

    /// Keyed by the folded norm; `scale` converts the integer norm to the
    /// argument passed to `f`.
    pub(crate) fn with_scale(spec: &GridSpec, scale: f64, mut f: impl FnMut(f64) -> f64) -> Self {
        let (slot, norms) = norm_slots(spec);
        let values = norms.iter().map(|&q| f(scale * q as f64)).collect();
        Self { slot, values, norms }
    }

    pub(crate) fn value(&self, flat: usize) -> f64 {
        self.values[self.slot[flat] as usize]
    }

    fn first_non_finite(&self) -> Option<f64> {
        self.values
            .iter()
            .zip(&self.norms)
            .find(|(v, _)| !v.is_finite())
            .map(|(_, q)| *q as f64)
    }
}

/// Slot index of every flat index and the sorted list of distinct folded norms.
pub(crate) fn norm_slots(spec: &GridSpec) -> (Vec<u32>, Vec<u64>) {
    let len = spec.len();
    let raw: Vec<u64> = (0..len).map(|i| spec.folded_norm2(i)).collect();
    let mut norms = raw.clone();
    norms.sort_unstable();
    norms.dedup();
    let slot = raw
        .iter()
        .map(|q| norms.binary_search(q).unwrap_or(0) as u32)
        .collect();
    (slot, norms)
}

/// Kernel value at radius L above this fraction of the peak marks a
/// convolution as truncated.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Result of a radial convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Convolution {
    pub field: GridField,
    /// kernel value at radius L over its peak sampled value
    pub tail_ratio: f64,
    pub truncated: bool,
}

/// Periodic convolution with a radial kernel, evaluated as spectral
/// multiplication with the transform of the sampled kernel weights.
pub fn convolve_radial(u: &GridField, kernel: &RadialKernelTable) -> Result<Convolution> {
    let w = kernel.grid_weights(&u.spec)?;
    let field = convolve_with_weights(u, &w)?;
    let tail_ratio = kernel.tail_ratio(&u.spec);
    Ok(Convolution {
        field,
        tail_ratio,
        truncated: tail_ratio > TAIL_TOLERANCE,
    })
}

/// (w ⊛ u)(x_i) = Σ_j w_j u(x_i − y_j) with w laid out by shift.
pub fn convolve_with_weights(u: &GridField, weights: &GridField) -> Result<GridField> {
    u.spec.check_same(&weights.spec, "convolve")?;
    let wh = transform(weights);
    let mut c = transform(u);
    for (z, w) in c.coefficients.iter_mut().zip(&wh.coefficients) {
        *z *= w;
    }
    Ok(inverse_transform(&c))
}

/// Shifts a field by a continuous offset, returning u(x − a), by
/// multiplying its coefficients with e^{−ik·a}. Nyquist modes get the real
/// part of the phase so the output stays real.
pub fn translate(u: &GridField, offset: &[f64]) -> GridField {
    let spec = u.spec;
    let mut c = transform(u);
    let n = spec.points();
    for (i, z) in c.coefficients.iter_mut().enumerate() {
        let idx = spec.multi_index(i);
        let mut phase = 0.0;
        let mut nyquist = false;
        for a in 0..spec.dim() {
            phase -= spec.wavenumber(idx[a]) * offset[a];
            nyquist |= idx[a] == n / 2;
        }
        let w = if nyquist {
            Complex64::new(cos(phase), 0.0)
        } else {
            Complex64::new(cos(phase), sin(phase))
        };
        *z *= w;
    }
    inverse_transform(&c)
}

/// Copies a field into a larger box with the same spacing, centred so that
/// the grid point x = 0 maps to x = 0; the rest is zero-filled.
pub fn embed_centered(u: &GridField, target: GridSpec) -> Result<GridField> {
    let src = u.spec;
    if src.dim() != target.dim()
        || target.points() < src.points()
        || (src.spacing() - target.spacing()).abs() > 1e-12 * src.spacing()
    {
        return Err(Error::Shape(String::from(
            "embedding needs equal spacing, equal dimension and a box at least as large",
        )));
    }
    let shift = (target.points() - src.points()) / 2;
    let mut out = GridField::zeros(target);
    for i in 0..src.len() {
        let mut idx = src.multi_index(i);
        for a in idx.iter_mut().take(src.dim()) {
            *a += shift;
        }
        out.values[target.flat_index(&idx)] = u.values[i];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(spec: GridSpec, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridField::new(spec, (0..spec.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(1, 1.0, 8).is_err());
        assert!(GridSpec::new(1, 1.0, 48).is_err());
        assert!(GridSpec::new(4, 1.0, 16).is_err());
        assert!(GridSpec::new(2, 0.0, 16).is_err());
        let g = GridSpec::new(2, 4.0, 16).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.point(g.origin_index())[..2], [0.0, 0.0]);
        assert_eq!(g.flat_index(&g.multi_index(77)), 77);
        assert!(GridField::new(g, alloc::vec![0.0; 10]).is_err());
        let mut v = alloc::vec![0.0; 256];
        v[3] = f64::NAN;
        assert!(GridField::new(g, v).is_err());
    }

    #[test]
    fn zero_and_single_mode() {
        let g = GridSpec::new(1, 5.0, 64).unwrap();
        let z = transform(&GridField::zeros(g));
        assert!(z.coefficients().iter().all(|c| c.norm() == 0.0));
        let k0 = g.wavenumber(3);
        let u = GridField::from_fn(g, |x| (k0 * x[0]).cos()).unwrap();
        let c = transform(&u);
        let big: Vec<usize> = (0..g.len()).filter(|&i| c.coefficients()[i].norm() > 1e-9).collect();
        assert_eq!(big, alloc::vec![3, 61]);
    }

    #[test]
    fn round_trip_and_parseval() {
        for (dim, n) in [(1, 256), (2, 32), (3, 16)] {
            let g = GridSpec::new(dim, 3.0, n).unwrap();
            let u = random_field(g, dim as u64);
            let c = transform(&u);
            let back = inverse_transform(&c);
            assert!(back.relative_l2_error(&u) < 1e-12);
            let lhs: f64 = u.values().iter().map(|v| v * v).sum();
            let rhs: f64 = c.coefficients().iter().map(|z| z.norm_sqr()).sum::<f64>() / g.len() as f64;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn multiplier_identity_laplacian_and_algebra() {
        let g = GridSpec::new(2, 4.0, 32).unwrap();
        let u = random_field(g, 3);
        let id = apply_multiplier(&u, |_| 1.0).unwrap();
        assert!(id.relative_l2_error(&u) < 1e-13);

        let (k0, k1) = (g.wavenumber(2), g.wavenumber(5));
        let w = GridField::from_fn(g, |x| (k0 * x[0] + k1 * x[1]).cos()).unwrap();
        let lw = apply_multiplier(&w, |k| k[0] * k[0] + k[1] * k[1]).unwrap();
        assert!(lw.relative_l2_error(&w.scaled(k0 * k0 + k1 * k1)) < 1e-12);

        let f = |k2: f64| (k2 + 1.0).powf(0.3);
        let h = |k2: f64| 1.0 / (1.0 + k2);
        let ab = apply_radial_multiplier(&u, |k2| f(k2) * h(k2)).unwrap();
        let a_b = apply_radial_multiplier(&apply_radial_multiplier(&u, h).unwrap(), f).unwrap();
        assert!(ab.relative_l2_error(&a_b) < 1e-12);

        let err = apply_multiplier(&u, |k| if k[0] == 0.0 && k[1] == 0.0 { f64::INFINITY } else { 1.0 });
        assert!(matches!(err, Err(Error::Numerical { .. })));
    }

    #[test]
    fn translation_by_whole_cells_is_a_roll() {
        let g = GridSpec::new(1, 2.0, 32).unwrap();
        let u = random_field(g, 5);
        let t = translate(&u, &[3.0 * g.spacing()]);
        for i in 0..32 {
            assert!((t.values()[(i + 3) % 32] - u.values()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_keeps_origin() {
        let small = GridSpec::new(1, 2.0, 16).unwrap();
        let big = GridSpec::new(1, 4.0, 32).unwrap();
        let u = GridField::from_fn(small, |x| (-x[0] * x[0]).exp()).unwrap();
        let e = embed_centered(&u, big).unwrap();
        assert_eq!(e.values()[big.origin_index()], 1.0);
        assert_relative_eq!(e.integral(), u.integral(), max_relative = 1e-15);
    }

    fn gaussian_kernel(spec: &GridSpec, var: f64) -> RadialKernelTable {
        use crate::kernels::{ExpPowerLaw, OriginRule, PowerLaw};
        let d = spec.dim() as f64;
        let norm = (2.0 * PI * var).powf(-d / 2.0);
        RadialKernelTable::for_grid(
            spec,
            |r| Ok(norm * (-r * r / (2.0 * var)).exp()),
            PowerLaw { exponent: 0.0, coefficient: norm },
            ExpPowerLaw { rate: 0.0, exponent: 0.0, coefficient: 0.0 },
            OriginRule::Value(norm),
        )
        .unwrap()
    }

    #[test]
    fn delta_and_mass_preservation() {
        let g = GridSpec::new(2, 6.0, 32).unwrap();
        let u = random_field(g, 9);
        let d = convolve_radial(&u, &RadialKernelTable::discrete_delta(&g)).unwrap();
        assert!(d.field.relative_l2_error(&u) < 1e-14);
        assert!(!d.truncated);

        let k = gaussian_kernel(&g, 0.5);
        let c = convolve_radial(&GridField::constant(g, 2.5), &k).unwrap();
        assert!(c.field.values().iter().all(|v| (v - 2.5).abs() < 1e-10));
    }

    #[test]
    fn gaussian_convolution_adds_variances() {
        let g = GridSpec::new(1, 20.0, 512).unwrap();
        let (a, b) = (0.7, 1.3);
        let k = gaussian_kernel(&g, a);
        let u = GridField::from_fn(g, |x| (2.0 * PI * b).powf(-0.5) * (-x[0] * x[0] / (2.0 * b)).exp()).unwrap();
        let out = convolve_radial(&u, &k).unwrap().field;
        let expect = GridField::from_fn(g, |x| (2.0 * PI * (a + b)).powf(-0.5) * (-x[0] * x[0] / (2.0 * (a + b))).exp()).unwrap();
        assert!(out.sub(&expect).max_abs() < 1e-8);
    }

    #[test]
    fn convolution_linear_and_translation_covariant() {
        let g = GridSpec::new(1, 6.0, 64).unwrap();
        let k = gaussian_kernel(&g, 0.3);
        let u = random_field(g, 1);
        let v = random_field(g, 2);
        let mut uv = u.clone();
        uv.add_scaled(-3.0, &v);
        let lhs = convolve_radial(&uv, &k).unwrap().field;
        let mut rhs = convolve_radial(&u, &k).unwrap().field;
        rhs.add_scaled(-3.0, &convolve_radial(&v, &k).unwrap().field);
        assert!(lhs.relative_l2_error(&rhs) < 1e-13);

        let shift = [5.0 * g.spacing()];
        let a = convolve_radial(&translate(&u, &shift), &k).unwrap().field;
        let b = translate(&convolve_radial(&u, &k).unwrap().field, &shift);
        assert!(a.relative_l2_error(&b) < 1e-12);
    }

    #[test]
    fn truncation_flag() {
        let g = GridSpec::new(1, 2.0, 64).unwrap();
        let k = gaussian_kernel(&g, 4.0);
        let c = convolve_radial(&GridField::constant(g, 1.0), &k).unwrap();
        assert!(c.truncated && c.tail_ratio > 0.5);
    }

    proptest! {
        #[test]
        fn parseval_random(seed in 0u64..1000) {
            let g = GridSpec::new(1, 1.5, 64).unwrap();
            let u = random_field(g, seed);
            let c = transform(&u);
            let lhs: f64 = u.values().iter().map(|v| v * v).sum();
            let rhs: f64 = c.coefficients().iter().map(|z| z.norm_sqr()).sum::<f64>() / 64.0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }
    }
}
