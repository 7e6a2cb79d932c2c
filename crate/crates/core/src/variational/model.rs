use alloc::format;
use alloc::vec::Vec;

use libm::{exp, fabs, pow, sqrt};

use crate::error::{Error, Result};

/// f(t) = (t⁺)^p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinearity {
    pub exponent: f64,
}

impl Nonlinearity {
    /// Checks 1 < p < 2*_s − 1 with 2*_s = 2N/(N − 2s).
    pub fn pure_power(exponent: f64, dim: usize, s: f64) -> Result<Self> {
        let n = dim as f64;
        if !(n > 2.0 * s) {
            return Err(Error::Config(format!("critical exponent needs N > 2s, got N = {dim}, s = {s}")));
        }
        let critical = 2.0 * n / (n - 2.0 * s);
        if !(exponent > 1.0) {
            return Err(Error::Config(format!("p <= 1 (p = {exponent})")));
        }
        if !(exponent < critical - 1.0) {
            return Err(Error::Config(format!(
                "p >= 2*_s - 1 (p = {exponent}, 2*_s - 1 = {})",
                critical - 1.0
            )));
        }
        Ok(Self { exponent })
    }

    pub fn f(&self, t: f64) -> f64 {
        if t > 0.0 {
            pow(t, self.exponent)
        } else {
            0.0
        }
    }

    /// F(t) = ∫₀^t f.
    pub fn primitive(&self, t: f64) -> f64 {
        if t > 0.0 {
            pow(t, self.exponent + 1.0) / (self.exponent + 1.0)
        } else {
            0.0
        }
    }

    /// Ambrosetti–Rabinowitz constant p + 1.
    pub fn theta_ar(&self) -> f64 {
        self.exponent + 1.0
    }
}

/// Region where the nonlinearity is left unpenalised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// Axis-aligned cube (−r, r)^N.
    Cube { half_width: f64 },
    Ball { radius: f64 },
    Everywhere,
}

impl Region {
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Region::Cube { half_width } => x.iter().all(|v| fabs(*v) < half_width),
            Region::Ball { radius } => x.iter().map(|v| v * v).sum::<f64>() < radius * radius,
            Region::Everywhere => true,
        }
    }

    /// Largest |x_i| reached inside the region, infinite for `Everywhere`.
    pub fn extent(&self) -> f64 {
        match *self {
            Region::Cube { half_width } => half_width,
            Region::Ball { radius } => radius,
            Region::Everywhere => f64::INFINITY,
        }
    }

    pub fn diameter(&self, dim: usize) -> f64 {
        match *self {
            Region::Cube { half_width } => 2.0 * half_width * sqrt(dim as f64),
            Region::Ball { radius } => 2.0 * radius,
            Region::Everywhere => f64::INFINITY,
        }
    }

    /// Boundary samples used to check the well condition.
    fn boundary_samples(&self, dim: usize) -> Vec<[f64; 3]> {
        let r = self.extent();
        let mut out = Vec::new();
        let count = 64;
        match dim {
            1 => {
                out.push([-r, 0.0, 0.0]);
                out.push([r, 0.0, 0.0]);
            }
            _ => {
                for i in 0..count {
                    let a = 2.0 * core::f64::consts::PI * i as f64 / count as f64;
                    let (c, s) = (libm::cos(a), libm::sin(a));
                    let p = match *self {
                        Region::Cube { .. } => {
                            let scale = r / fabs(c).max(fabs(s));
                            [scale * c, scale * s, 0.0]
                        }
                        _ => [r * c, r * s, 0.0],
                    };
                    out.push(p);
                }
            }
        }
        out
    }
}

/// Shape of the external potential V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialShape {
    /// V(x) = −depth·e^{−|x|²/width²}; the well set is {0}.
    GaussianWell { depth: f64, width: f64 },
    /// V = −depth on |x| ≤ radius, then −depth·e^{−(|x|−radius)²/width²};
    /// the well set is the closed ball of that radius.
    Plateau { depth: f64, radius: f64, width: f64 },
    /// V ≡ value.
    Constant { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub dim: usize,
    pub shape: PotentialShape,
    pub region: Region,
}

impl PotentialSpec {
    /// Validates 0 < V₁ < m^{2s} and, for bounded regions, that the infimum
    /// over the region is below the boundary minimum.
    pub fn new(dim: usize, shape: PotentialShape, region: Region, m: f64, s: f64) -> Result<Self> {
        let spec = Self { dim, shape, region };
        let v1 = spec.global_bound();
        let m2s = pow(m, 2.0 * s);
        if !(v1 > 0.0) {
            return Err(Error::Config(format!("V1 <= 0 (V1 = {v1})")));
        }
        if !(v1 < m2s) {
            return Err(Error::Config(format!("V1 >= m^{{2s}} (V1 = {v1}, m^{{2s}} = {m2s})")));
        }
        if region != Region::Everywhere {
            let boundary_min = region
                .boundary_samples(dim)
                .iter()
                .map(|p| spec.value(&p[..dim]))
                .fold(f64::INFINITY, f64::min);
            if !(-spec.well_depth() < boundary_min) {
                return Err(Error::Config(format!(
                    "inf over Lambda of V >= min over its boundary (-V0 = {}, boundary min = {boundary_min})",
                    -spec.well_depth()
                )));
            }
        }
        Ok(spec)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self.shape {
            PotentialShape::GaussianWell { depth, width } => -depth * exp(-r2 / (width * width)),
            PotentialShape::Plateau { depth, radius, width } => {
                let d = (sqrt(r2) - radius).max(0.0);
                -depth * exp(-d * d / (width * width))
            }
            PotentialShape::Constant { value } => value,
        }
    }

    /// V₀ with −V₀ = inf over the region.
    pub fn well_depth(&self) -> f64 {
        match self.shape {
            PotentialShape::GaussianWell { depth, .. } | PotentialShape::Plateau { depth, .. } => depth,
            PotentialShape::Constant { value } => -value,
        }
    }

    /// V₁ with −V₁ = inf V.
    pub fn global_bound(&self) -> f64 {
        self.well_depth()
    }

    /// Distance from a point to the well set M.
    pub fn distance_to_well(&self, x: &[f64]) -> f64 {
        let r = sqrt(x.iter().map(|v| v * v).sum::<f64>());
        match self.shape {
            PotentialShape::GaussianWell { .. } => r,
            PotentialShape::Plateau { radius, .. } => (r - radius).max(0.0),
            PotentialShape::Constant { .. } => 0.0,
        }
    }

    /// Value at a minimiser, V(0).
    pub fn minimum(&self) -> f64 {
        -self.well_depth()
    }
}

/// Penalisation strength κ and the switch height a with f(a)/a = V₁/κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenalizationParams {
    pub kappa: f64,
    pub a: f64,
    pub theta_ar: f64,
    /// V₁/κ, slope of the linear cap.
    pub cap_slope: f64,
}

impl PenalizationParams {
    fn lower_bound(pot: &PotentialSpec, nl: &Nonlinearity, m: f64, s: f64, multiplicity: bool) -> f64 {
        let m2s = pow(m, 2.0 * s);
        let v1 = pot.global_bound();
        let th = nl.theta_ar();
        let mut bound = (v1 / (m2s - v1)).max(th / (th - 2.0));
        if multiplicity {
            let v0 = pot.well_depth();
            bound = bound.max(2.0 * v0 / (m2s - v0));
        }
        bound
    }

    pub fn new(kappa: f64, pot: &PotentialSpec, nl: &Nonlinearity, m: f64, s: f64, multiplicity: bool) -> Result<Self> {
        let bound = Self::lower_bound(pot, nl, m, s, multiplicity);
        if !(kappa > bound) {
            return Err(Error::Config(format!(
                "kappa <= max{{V1/(m^{{2s}}-V1), theta/(theta-2){}}} (kappa = {kappa}, bound = {bound})",
                if multiplicity { ", 2V0/(m^{2s}-V0)" } else { "" }
            )));
        }
        let cap_slope = pot.global_bound() / kappa;
        Ok(Self {
            kappa,
            a: pow(cap_slope, 1.0 / (nl.exponent - 1.0)),
            theta_ar: nl.theta_ar(),
            cap_slope,
        })
    }

    /// κ = 2 × the strict lower bound.
    pub fn with_default_kappa(pot: &PotentialSpec, nl: &Nonlinearity, m: f64, s: f64, multiplicity: bool) -> Result<Self> {
        Self::new(2.0 * Self::lower_bound(pot, nl, m, s, multiplicity), pot, nl, m, s, multiplicity)
    }
}

/// g(x, t) with x already scaled (the caller passes εx).
pub fn penalized_g(x: &[f64], t: f64, pot: &PotentialSpec, pen: &PenalizationParams, nl: &Nonlinearity) -> f64 {
    if pot.region.contains(x) {
        nl.f(t)
    } else {
        capped_f(t, pen, nl)
    }
}

/// Primitive of [`penalized_g`] in t.
pub fn penalized_big_g(x: &[f64], t: f64, pot: &PotentialSpec, pen: &PenalizationParams, nl: &Nonlinearity) -> f64 {
    if pot.region.contains(x) {
        nl.primitive(t)
    } else {
        capped_primitive(t, pen, nl)
    }
}

pub(crate) fn capped_f(t: f64, pen: &PenalizationParams, nl: &Nonlinearity) -> f64 {
    if t < pen.a {
        nl.f(t)
    } else {
        pen.cap_slope * t
    }
}

pub(crate) fn capped_primitive(t: f64, pen: &PenalizationParams, nl: &Nonlinearity) -> f64 {
    if t < pen.a {
        nl.primitive(t)
    } else {
        nl.primitive(pen.a) + 0.5 * pen.cap_slope * (t * t - pen.a * pen.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn benchmark() -> (PotentialSpec, PenalizationParams, Nonlinearity) {
        let nl = Nonlinearity::pure_power(3.0, 1, 0.3).unwrap();
        let pot = PotentialSpec::new(
            1,
            PotentialShape::GaussianWell { depth: 0.5, width: 1.0 },
            Region::Cube { half_width: 2.0 },
            1.0,
            0.3,
        )
        .unwrap();
        let pen = PenalizationParams::with_default_kappa(&pot, &nl, 1.0, 0.3, false).unwrap();
        (pot, pen, nl)
    }

    #[test]
    fn benchmark_parameters() {
        let (_, pen, nl) = benchmark();
        assert_relative_eq!(pen.kappa, 4.0);
        assert_relative_eq!(pen.a, 0.125f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(nl.f(pen.a) / pen.a, 0.5 / pen.kappa, max_relative = 1e-14);
        assert_eq!(nl.f(-1.0), 0.0);
    }

    #[test]
    fn validation_names_the_inequality() {
        let e = Nonlinearity::pure_power(4.0, 1, 0.3).unwrap_err();
        assert!(format!("{e}").contains("2*_s - 1"));
        let e = PotentialSpec::new(1, PotentialShape::GaussianWell { depth: 1.2, width: 1.0 }, Region::Everywhere, 1.0, 0.3)
            .unwrap_err();
        assert!(format!("{e}").contains("V1 >= m^{2s}"));
        let e = PotentialSpec::new(
            1,
            PotentialShape::Plateau { depth: 0.5, radius: 3.0, width: 1.0 },
            Region::Cube { half_width: 2.0 },
            1.0,
            0.3,
        )
        .unwrap_err();
        assert!(format!("{e}").contains("boundary"));
        let (pot, _, nl) = benchmark();
        let e = PenalizationParams::new(1.5, &pot, &nl, 1.0, 0.3, false).unwrap_err();
        assert!(format!("{e}").contains("kappa <="));
    }

    #[test]
    fn penalization_branches() {
        let (pot, pen, nl) = benchmark();
        let inside = [0.5];
        let outside = [2.5];
        for &t in &[0.1, 0.3, 1.0, 3.0] {
            assert_eq!(penalized_g(&inside, t, &pot, &pen, &nl), nl.f(t));
        }
        assert_relative_eq!(penalized_g(&outside, pen.a, &pot, &pen, &nl), pen.cap_slope * pen.a, max_relative = 1e-14);
        assert_relative_eq!(
            capped_primitive(pen.a * (1.0 - 1e-12), &pen, &nl),
            capped_primitive(pen.a, &pen, &nl),
            max_relative = 1e-9
        );
    }

    proptest! {
        #[test]
        fn outside_bounds(t in 0.0f64..10.0) {
            let (pot, pen, nl) = benchmark();
            let x = [3.0];
            let g = penalized_g(&x, t, &pot, &pen, &nl);
            let big = penalized_big_g(&x, t, &pot, &pen, &nl);
            prop_assert!(0.0 <= 2.0 * big + 1e-15);
            prop_assert!(2.0 * big <= t * g + 1e-12);
            prop_assert!(t * g <= pen.cap_slope * t * t + 1e-12);
        }

        #[test]
        fn ar_and_monotone_ratio(t in 0.01f64..10.0, dt in 0.001f64..1.0) {
            let (_, _, nl) = benchmark();
            prop_assert!(nl.theta_ar() * nl.primitive(t) <= t * nl.f(t) * (1.0 + 1e-12));
            prop_assert!(nl.f(t) / t < nl.f(t + dt) / (t + dt));
        }
    }
}
