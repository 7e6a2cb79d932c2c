use alloc::format;

use libm::pow;

use super::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::grid::GridField;

/// Doublings tried in each direction when bracketing the Nehari scaling.
pub const BRACKET_LIMIT: usize = 200;
pub const BISECTION_STEPS: usize = 60;

/// A field on the Nehari manifold together with the scaling that put it
/// there.
#[derive(Debug, Clone)]
pub struct NehariPoint {
    pub u: GridField,
    pub scaling: f64,
    pub energy: f64,
    /// H^{−s} norm of the Euler–Lagrange gradient at `u`.
    pub residual: f64,
}

/// ⟨J'(tu), u⟩/t, strictly decreasing in t when f(t)/t increases.
fn ray_slope(model: &EnergyModel, u: &GridField, quadratic: f64, t: f64) -> f64 {
    let nonlinear: f64 = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| model.g_at(i, t * x) * x)
        .sum();
    quadratic - model.spec().cell_volume() * nonlinear / t
}

/// Unique t > 0 with ⟨J'(tu), u⟩ = 0.
pub fn nehari_scaling(model: &EnergyModel, u: &GridField) -> Result<f64> {
    model.spec().check_same(u.spec(), "nehari_project")?;
    let quadratic = model.quadratic(u);
    if !(quadratic > 0.0) {
        return Err(Error::Projection(format!("quadratic form is not positive ({quadratic:e})")));
    }
    if model.is_unpenalized() {
        let p = model.nonlinearity().exponent;
        let pos: f64 = model.spec().cell_volume()
            * u.values().iter().filter(|&&x| x > 0.0).map(|&x| pow(x, p + 1.0)).sum::<f64>();
        if !(pos > 0.0) {
            return Err(Error::Projection("positive part of the field is zero".into()));
        }
        return Ok(pow(quadratic / pos, 1.0 / (p - 1.0)));
    }
    let slope = |t: f64| ray_slope(model, u, quadratic, t);
    let mut lo = 1.0;
    let mut tries = 0;
    while slope(lo) <= 0.0 {
        lo *= 0.5;
        tries += 1;
        if tries > BRACKET_LIMIT {
            return Err(Error::Projection("no positive slope along the ray".into()));
        }
    }
    let mut hi = lo;
    tries = 0;
    while slope(hi) >= 0.0 {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > BRACKET_LIMIT {
            return Err(Error::Projection(
                "energy keeps increasing along the ray; the positive part misses the well region".into(),
            ));
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn nehari_project(model: &EnergyModel, u: &GridField) -> Result<NehariPoint> {
    let t = nehari_scaling(model, u)?;
    let v = u.scaled(t);
    let energy = model.energy(&v)?;
    let residual = model.dual_norm(&model.gradient(&v)?);
    Ok(NehariPoint {
        u: v,
        scaling: t,
        energy,
        residual,
    })
}

/// h_u(t) = energy of tu.
pub fn ray_energy(model: &EnergyModel, u: &GridField, t: f64) -> Result<f64> {
    model.energy(&u.scaled(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::variational::model::{Nonlinearity, PenalizationParams, PotentialShape, PotentialSpec, Region};
    use approx::assert_relative_eq;

    fn models() -> [EnergyModel; 2] {
        let g = GridSpec::new(1, 10.0, 256).unwrap();
        let (m, s) = (1.0, 0.3);
        let nl = Nonlinearity::pure_power(3.0, 1, s).unwrap();
        let pot = PotentialSpec::new(
            1,
            PotentialShape::GaussianWell { depth: 0.5, width: 1.0 },
            Region::Cube { half_width: 2.0 },
            m,
            s,
        )
        .unwrap();
        let pen = PenalizationParams::with_default_kappa(&pot, &nl, m, s, false).unwrap();
        [
            EnergyModel::autonomous(g, -0.5, nl, m, s).unwrap(),
            EnergyModel::penalized(g, 0.5, &pot, &pen, nl, m, s).unwrap(),
        ]
    }

    #[test]
    fn projection_is_idempotent_and_peaks_on_the_ray() {
        for model in models() {
            let u = GridField::from_fn(*model.spec(), |x| 0.3 * (-(x[0] - 0.5).powi(2)).exp()).unwrap();
            let p = nehari_project(&model, &u).unwrap();
            assert!(p.energy > 0.0);
            let again = nehari_project(&model, &p.u).unwrap();
            assert!((again.scaling - 1.0).abs() < 1e-10);
            let t = p.scaling;
            let h: Vec<f64> = (1..=20).map(|i| ray_energy(&model, &u, t * i as f64 / 10.0).unwrap()).collect();
            assert!(h[..10].windows(2).all(|w| w[1] > w[0]));
            assert!(h[9..].windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn autonomous_closed_form() {
        let model = &models()[0];
        let u = GridField::from_fn(*model.spec(), |x| (-x[0] * x[0]).exp() - 0.2).unwrap();
        let t = nehari_scaling(model, &u).unwrap();
        let h = model.spec().cell_volume();
        let pos: f64 = h * u.values().iter().map(|&x| x.max(0.0).powi(4)).sum::<f64>();
        assert_relative_eq!(t, (model.quadratic(&u) / pos).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn projection_failures() {
        let [auto, pen] = models();
        let neg = GridField::constant(*auto.spec(), -1.0);
        assert!(matches!(nehari_project(&auto, &neg), Err(Error::Projection(_))));
        // support entirely outside Λ/ε = (−4, 4): the cap is linear and below the quadratic form
        let far = GridField::from_fn(*pen.spec(), |x| if x[0].abs() > 5.0 { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(nehari_project(&pen, &far), Err(Error::Projection(_))));
    }
}
