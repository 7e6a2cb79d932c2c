use alloc::format;
use alloc::vec::Vec;

use libm::{exp, log, round, sqrt};

use crate::error::{domain, Result};
use crate::fit::fit_line;
use crate::grid::GridField;

/// Exponential and power-law fits of a radially averaged profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// C in C e^{−c r}.
    pub amplitude: f64,
    pub rate: f64,
    pub r_squared: f64,
    /// Exponent of the competing C' r^{−q} model.
    pub power_exponent: f64,
    pub power_r_squared: f64,
}

impl DecayFit {
    pub fn exponential_wins(&self) -> bool {
        self.r_squared > self.power_r_squared
    }
}

/// Bin means of (r, log u) about `center`, one grid spacing per bin, for
/// bins whose mean radius lies in [r_lo, r_hi]. Averaging log u keeps the
/// exponential model exact within a bin.
pub fn radial_profile(u: &GridField, center: &[f64], r_lo: f64, r_hi: f64) -> Result<Vec<(f64, f64)>> {
    let spec = u.spec();
    let dim = spec.dim();
    if center.len() != dim {
        return Err(domain("decay_fit", format!("center has {} coordinates, grid has {dim}", center.len())));
    }
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(domain("decay_fit", format!("window [{r_lo}, {r_hi}]")));
    }
    let reach = center.iter().map(|c| c.abs()).fold(0.0, f64::max) + r_hi;
    if !(reach < spec.half_width()) {
        return Err(domain(
            "decay_fit",
            format!("window reaches {reach}, beyond the box half-width {}", spec.half_width()),
        ));
    }
    let h = spec.spacing();
    let bins = round(r_hi / h) as usize + 2;
    let mut sum = alloc::vec![0.0; bins];
    let mut rad = alloc::vec![0.0; bins];
    let mut count = alloc::vec![0usize; bins];
    for (i, &v) in u.values().iter().enumerate() {
        let p = spec.point(i);
        let r = sqrt((0..dim).map(|a| (p[a] - center[a]) * (p[a] - center[a])).sum::<f64>());
        let b = round(r / h) as usize;
        if b < bins {
            if !(v > 0.0) {
                if r >= r_lo - h && r <= r_hi + h {
                    return Err(domain("decay_fit", format!("nonpositive sample {v:e} at r = {r}")));
                }
                continue;
            }
            sum[b] += log(v);
            rad[b] += r;
            count[b] += 1;
        }
    }
    let mut out = Vec::new();
    for b in 0..bins {
        if count[b] == 0 {
            continue;
        }
        let r = rad[b] / count[b] as f64;
        if r < r_lo || r > r_hi {
            continue;
        }
        out.push((r, sum[b] / count[b] as f64));
    }
    if out.len() < 3 {
        return Err(domain("decay_fit", "fewer than three radial bins in the window"));
    }
    Ok(out)
}

/// Least-squares fits of log u against r and against log r.
pub fn decay_fit(u: &GridField, center: &[f64], r_lo: f64, r_hi: f64) -> Result<DecayFit> {
    let profile = radial_profile(u, center, r_lo, r_hi)?;
    let rs: Vec<f64> = profile.iter().map(|p| p.0).collect();
    let logs: Vec<f64> = profile.iter().map(|p| p.1).collect();
    let log_rs: Vec<f64> = rs.iter().map(|&r| log(r)).collect();
    let exp_fit = fit_line(&rs, &logs).ok_or_else(|| domain("decay_fit", "degenerate exponential fit"))?;
    let pow_fit = fit_line(&log_rs, &logs).ok_or_else(|| domain("decay_fit", "degenerate power fit"))?;
    Ok(DecayFit {
        amplitude: exp(exp_fit.intercept),
        rate: -exp_fit.slope,
        r_squared: exp_fit.r_squared,
        power_exponent: -pow_fit.slope,
        power_r_squared: pow_fit.r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_exact_exponential() {
        let g = GridSpec::new(1, 20.0, 512).unwrap();
        let c0 = 0.5;
        let u = GridField::from_fn(g, |x| 2.5 * (-0.8 * (x[0] - c0).abs()).exp()).unwrap();
        let fit = decay_fit(&u, &[c0], 4.0, 10.0).unwrap();
        assert_relative_eq!(fit.amplitude, 2.5, max_relative = 1e-10);
        assert_relative_eq!(fit.rate, 0.8, max_relative = 1e-10);
        assert!(fit.r_squared > 1.0 - 1e-12 && fit.exponential_wins());
    }

    #[test]
    fn power_law_prefers_power_model() {
        let g = GridSpec::new(2, 16.0, 128).unwrap();
        let u = GridField::from_fn(g, |x| (1.0 + x[0] * x[0] + x[1] * x[1]).powf(-1.3)).unwrap();
        let fit = decay_fit(&u, &[0.0, 0.0], 4.0, 10.0).unwrap();
        assert!(!fit.exponential_wins());
        assert!((fit.power_exponent - 2.6).abs() < 0.1);
    }

    #[test]
    fn window_errors() {
        let g = GridSpec::new(1, 10.0, 128).unwrap();
        let u = GridField::from_fn(g, |x| (3.0 - x[0].abs()).max(0.0)).unwrap();
        assert!(decay_fit(&u, &[0.0], 4.0, 8.0).is_err());
        assert!(decay_fit(&u, &[0.0], 4.0, 12.0).is_err());
        assert!(decay_fit(&u, &[0.0], 5.0, 4.0).is_err());
    }
}
