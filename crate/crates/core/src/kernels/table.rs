use alloc::format;
use alloc::vec::Vec;

use libm::{exp, log, pow};

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::grid::{norm_slots, GridField, GridSpec};
use crate::zeta::lattice_zeta;

/// c·r^exponent
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub exponent: f64,
    pub coefficient: f64,
}

impl PowerLaw {
    pub fn eval(&self, r: f64) -> f64 {
        self.coefficient * pow(r, self.exponent)
    }
}

/// c·r^exponent·e^{−rate·r}
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpPowerLaw {
    pub rate: f64,
    pub exponent: f64,
    pub coefficient: f64,
}

impl ExpPowerLaw {
    pub fn eval(&self, r: f64) -> f64 {
        self.coefficient * pow(r, self.exponent) * exp(-self.rate * r)
    }
}

/// How the r = 0 sample is weighted when the table is laid on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OriginRule {
    /// Finite value at r = 0, weighted like any other sample.
    Value(f64),
    /// Absolute weight, cell volume already included.
    Weight(f64),
    /// Kernel ≈ small_r_law + regular near 0 with a weak power singularity.
    /// The origin weight carries the lattice-zeta correction so that the
    /// point-sampled sum integrates the singular term correctly.
    SingularCorrected { regular: f64 },
    /// Kernel ≈ −coefficient·ln r + regular near 0, one dimension only.
    LogCorrected { coefficient: f64, regular: f64 },
}

/// Radial kernel sampled on increasing radii, with asymptotic laws beyond
/// both ends of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialKernelTable {
    dim: usize,
    radii: Vec<f64>,
    values: Vec<f64>,
    small_r_law: PowerLaw,
    large_r_law: ExpPowerLaw,
    origin: OriginRule,
}

impl RadialKernelTable {
    pub fn new(
        dim: usize,
        radii: Vec<f64>,
        values: Vec<f64>,
        small_r_law: PowerLaw,
        large_r_law: ExpPowerLaw,
        origin: OriginRule,
    ) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return Err(Error::Shape(format!(
                "kernel table has {} radii and {} values",
                radii.len(),
                values.len()
            )));
        }
        if radii[0] <= 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Shape("kernel radii must be positive and increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("kernel values must be finite".into()));
        }
        Ok(Self {
            dim,
            radii,
            values,
            small_r_law,
            large_r_law,
            origin,
        })
    }

    /// Tabulates `f` at every distinct nonzero shift radius of `spec`,
    /// so grid lookups are exact.
    pub fn for_grid(
        spec: &GridSpec,
        mut f: impl FnMut(f64) -> Result<f64>,
        small_r_law: PowerLaw,
        large_r_law: ExpPowerLaw,
        origin: OriginRule,
    ) -> Result<Self> {
        let (_, norms) = norm_slots(spec);
        let h = spec.spacing();
        let radii: Vec<f64> = norms.iter().skip(1).map(|&q| h * libm::sqrt(q as f64)).collect();
        let values = radii.iter().map(|&r| f(r)).collect::<Result<Vec<f64>>>()?;
        Self::new(spec.dim(), radii, values, small_r_law, large_r_law, origin)
    }

    pub fn discrete_delta(spec: &GridSpec) -> Self {
        let h = spec.spacing();
        Self {
            dim: spec.dim(),
            radii: alloc::vec![h],
            values: alloc::vec![0.0],
            small_r_law: PowerLaw {
                exponent: 0.0,
                coefficient: 0.0,
            },
            large_r_law: ExpPowerLaw {
                rate: 0.0,
                exponent: 0.0,
                coefficient: 0.0,
            },
            origin: OriginRule::Weight(1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn small_r_law(&self) -> PowerLaw {
        self.small_r_law
    }

    pub fn large_r_law(&self) -> ExpPowerLaw {
        self.large_r_law
    }

    pub fn origin(&self) -> OriginRule {
        self.origin
    }

    /// Kernel value at r > 0: exact on tabulated radii, log-linear in
    /// between, asymptotic laws outside the table.
    pub fn value_at(&self, r: f64) -> f64 {
        let n = self.radii.len();
        let (first, last) = (self.radii[0], self.radii[n - 1]);
        if r < first * (1.0 - 1e-12) {
            return self.small_r_law.eval(r);
        }
        if r > last * (1.0 + 1e-12) {
            return self.large_r_law.eval(r);
        }
        let i = self.radii.partition_point(|&x| x < r * (1.0 - 1e-12));
        if i < n && (self.radii[i] - r).abs() <= 1e-12 * r {
            return self.values[i];
        }
        let (r0, r1, v0, v1) = (self.radii[i - 1], self.radii[i], self.values[i - 1], self.values[i]);
        let t = (r - r0) / (r1 - r0);
        if v0 > 0.0 && v1 > 0.0 {
            exp(log(v0) + t * (log(v1) - log(v0)))
        } else {
            v0 + t * (v1 - v0)
        }
    }

    /// Quadrature weight of the zero shift on a grid of spacing h.
    pub fn origin_weight(&self, spec: &GridSpec) -> Result<f64> {
        let h = spec.spacing();
        let vol = spec.cell_volume();
        let n = spec.dim() as f64;
        Ok(match self.origin {
            OriginRule::Value(v) => vol * v,
            OriginRule::Weight(w) => w,
            OriginRule::SingularCorrected { regular } => {
                let e = self.small_r_law.exponent;
                let c = self.small_r_law.coefficient;
                vol * regular - lattice_zeta(spec.dim(), -e)? * c * pow(h, n + e)
            }
            OriginRule::LogCorrected {
                coefficient,
                regular,
            } => {
                if spec.dim() != 1 {
                    return Err(Error::Config("logarithmic origin correction is one-dimensional".into()));
                }
                // Σ'_j h ln|hj| exceeds the integral by h ln(2π) − h ln h;
                // the sign flips because the kernel carries −ln r.
                coefficient * h * log(2.0 * core::f64::consts::PI / h) + h * regular
            }
        })
    }

    /// Quadrature weights laid out as shifts: entry i holds the weight of
    /// the minimal-image offset of flat index i.
    pub fn grid_weights(&self, spec: &GridSpec) -> Result<GridField> {
        if spec.dim() != self.dim {
            return Err(Error::Shape(format!(
                "kernel is {}-dimensional, grid is {}-dimensional",
                self.dim,
                spec.dim()
            )));
        }
        let (slot, norms) = norm_slots(spec);
        let h = spec.spacing();
        let vol = spec.cell_volume();
        let per_norm: Vec<f64> = norms
            .iter()
            .map(|&q| if q == 0 { 0.0 } else { vol * self.value_at(h * libm::sqrt(q as f64)) })
            .collect();
        let mut w: Vec<f64> = slot.iter().map(|&k| per_norm[k as usize]).collect();
        w[0] = self.origin_weight(spec)?;
        GridField::new(*spec, w)
    }

    /// Kernel value at radius L relative to the largest sampled value.
    pub fn tail_ratio(&self, spec: &GridSpec) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        self.value_at(spec.half_width()).abs() / peak
    }

    /// Fits c·r^e·e^{−rate r} to the tabulated values with r ≥ r_lo.
    pub fn fit_large_r_law(&self, r_lo: f64) -> Option<ExpPowerLaw> {
        let mut rows = Vec::new();
        let mut ys = Vec::new();
        for (r, v) in self.radii.iter().zip(&self.values) {
            if *r >= r_lo && *v > 0.0 {
                rows.push(alloc::vec![1.0, -*r, log(*r)]);
                ys.push(log(*v));
            }
        }
        if rows.len() < 3 {
            return None;
        }
        let c = least_squares(&rows, &ys)?;
        Some(ExpPowerLaw {
            rate: c[1],
            exponent: c[2],
            coefficient: exp(c[0]),
        })
    }

    /// Fits c·r^e to the tabulated values with r ≤ r_hi.
    pub fn fit_small_r_law(&self, r_hi: f64) -> Option<PowerLaw> {
        let xs: Vec<f64> = self.radii.iter().filter(|&&r| r <= r_hi).map(|r| log(*r)).collect();
        let ys: Vec<f64> = self
            .radii
            .iter()
            .zip(&self.values)
            .filter(|(r, _)| **r <= r_hi)
            .map(|(_, v)| log(*v))
            .collect();
        let f = crate::fit::fit_line(&xs, &ys)?;
        Some(PowerLaw {
            exponent: f.slope,
            coefficient: exp(f.intercept),
        })
    }

    /// Relative mismatch of the two asymptotic laws at the table ends.
    pub fn boundary_mismatch(&self) -> (f64, f64) {
        let n = self.radii.len();
        let lo = (self.small_r_law.eval(self.radii[0]) / self.values[0] - 1.0).abs();
        let hi = (self.large_r_law.eval(self.radii[n - 1]) / self.values[n - 1] - 1.0).abs();
        (lo, hi)
    }
}
