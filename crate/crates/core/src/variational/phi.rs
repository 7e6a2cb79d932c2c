use alloc::format;
use alloc::vec::Vec;

use libm::sqrt;

use super::energy::EnergyModel;
use super::nehari::{nehari_project, NehariPoint};
use crate::error::{domain, Error, Result};
use crate::grid::{translate, GridField};

/// C¹ cubic ramp: 1 on [0, δ/2], 0 beyond δ, 1 − 3τ² + 2τ³ in between.
pub fn cutoff(r: f64, delta: f64) -> f64 {
    let half = 0.5 * delta;
    if r <= half {
        1.0
    } else if r >= delta {
        0.0
    } else {
        let tau = (r - half) / half;
        1.0 - 3.0 * tau * tau + 2.0 * tau * tau * tau
    }
}

/// Nehari projection of η(|εx − z|)·w(x − z/ε), with w a ground state on
/// the same grid as `model`. The shift by z/ε is spectral, so it needs no
/// grid alignment.
pub fn make_phi(model: &EnergyModel, ground: &GridField, z: &[f64], eps: f64, delta: f64) -> Result<NehariPoint> {
    let spec = *model.spec();
    spec.check_same(ground.spec(), "make_phi")?;
    let dim = spec.dim();
    if z.len() != dim {
        return Err(Error::Shape(format!("well point has {} coordinates, grid has {dim}", z.len())));
    }
    if !(eps > 0.0) || !(delta > 0.0) {
        return Err(domain("make_phi", format!("eps = {eps}, delta = {delta}")));
    }
    let offset: Vec<f64> = z.iter().map(|c| c / eps).collect();
    let moved = translate(ground, &offset);
    let vals = moved
        .values()
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let p = spec.point(i);
            let r2: f64 = (0..dim).map(|a| (eps * p[a] - z[a]) * (eps * p[a] - z[a])).sum();
            cutoff(sqrt(r2), delta) * w
        })
        .collect();
    nehari_project(model, &GridField::new(spec, vals)?)
}

/// ∫Υ(εx)u² / ∫u², with Υ the radial clamp to the ball of radius ρ.
pub fn barycenter(u: &GridField, eps: f64, rho: f64) -> Result<Vec<f64>> {
    if !(rho > 0.0) || !(eps > 0.0) {
        return Err(domain("barycenter", format!("eps = {eps}, rho = {rho}")));
    }
    let spec = u.spec();
    let dim = spec.dim();
    let mut num = alloc::vec![0.0; dim];
    let mut den = 0.0;
    for (i, &v) in u.values().iter().enumerate() {
        let p = spec.point(i);
        let w = v * v;
        if w == 0.0 {
            continue;
        }
        let r = sqrt((0..dim).map(|a| eps * eps * p[a] * p[a]).sum::<f64>());
        let scale = if r < rho { eps } else { eps * rho / r };
        for a in 0..dim {
            num[a] += w * scale * p[a];
        }
        den += w;
    }
    if !(den > 0.0) {
        return Err(domain("barycenter", "field is identically zero"));
    }
    Ok(num.iter().map(|n| n / den).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn ramp_shape() {
        assert_eq!(cutoff(0.2, 1.0), 1.0);
        assert_eq!(cutoff(1.2, 1.0), 0.0);
        assert!((cutoff(0.75, 1.0) - 0.5).abs() < 1e-15);
        let d = 1e-7;
        // C¹ at both joins
        assert!((cutoff(0.5 + d, 1.0) - 1.0).abs() < 1e-12);
        assert!((cutoff(1.0 - d, 1.0)).abs() < 1e-12);
        let mut prev = 1.0;
        for i in 0..200 {
            let c = cutoff(i as f64 / 100.0, 1.0);
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn barycenter_symmetry_and_clamp() {
        let g = GridSpec::new(1, 10.0, 256).unwrap();
        let even = GridField::from_fn(g, |x| (-x[0] * x[0]).exp()).unwrap();
        assert!(barycenter(&even, 0.5, 1.0).unwrap()[0].abs() < 1e-14);
        let offset = GridField::from_fn(g, |x| (-(x[0] - 6.0).powi(2)).exp()).unwrap();
        // εx ≈ 3 lies beyond ρ = 1, so the clamp returns about 1
        assert!((barycenter(&offset, 0.5, 1.0).unwrap()[0] - 1.0).abs() < 1e-6);
        assert!(barycenter(&GridField::zeros(g), 0.5, 1.0).is_err());
    }
}
