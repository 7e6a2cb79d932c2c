//! Gauss–Legendre rules and composite panel integration.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, fabs, pow};

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// ∫_a^b f.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite rule over the panels delimited by `breaks`, where `f`
    /// behaves like r^beta (beta > −1) at the left end of the first panel.
    /// That panel is mapped through r = a·u^{1/(1+beta)}, which makes the
    /// leading singular term constant.
    pub fn integrate_singular_panels(
        &self,
        breaks: &[f64],
        beta: f64,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        if breaks.len() < 2 {
            return 0.0;
        }
        let (a0, a1) = (breaks[0], breaks[1]);
        let len = a1 - a0;
        let p = 1.0 / (1.0 + beta);
        let first = self.integrate(0.0, 1.0, |u| {
            let r = a0 + len * pow(u, p);
            f(r) * len * p * pow(u, p - 1.0)
        });
        first + self.integrate_panels(&breaks[1..], f)
    }

    /// Composite rule over the panels delimited by `breaks`.
    pub fn integrate_panels(&self, breaks: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
        breaks
            .windows(2)
            .map(|w| self.integrate(w[0], w[1], &mut f))
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panel breaks on [0, ∞) suited to a radial integrand with a feature near
/// the origin at scale `inner` and exponential decay at scale `outer`:
/// geometric refinement towards 0, then uniform panels out to `cutoff`.
pub fn radial_breaks(inner: f64, outer: f64, cutoff: f64) -> Vec<f64> {
    let mut b = Vec::new();
    b.push(0.0);
    let mut r = inner * 1e-6;
    while r < inner {
        b.push(r);
        r *= 2.0;
    }
    let step = outer.min(inner.max(outer * 0.25));
    let mut r = inner;
    while r < cutoff {
        b.push(r);
        r += step;
    }
    b.push(cutoff);
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_and_polynomial_exactness() {
        let g = GaussLegendre::new(12);
        assert_relative_eq!(g.weights.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        // exact for degree 23
        let v = g.integrate(0.0, 2.0, |x| x.powi(23));
        assert_relative_eq!(v, 2f64.powi(24) / 24.0, max_relative = 1e-13);
    }

    #[test]
    fn composite_integral_of_singular_power() {
        let g = GaussLegendre::new(20);
        let b = radial_breaks(1.0, 1.0, 40.0);
        // ∫₀^∞ r^{-1/2} e^{-r} dr = Γ(1/2)
        let v = g.integrate_singular_panels(&b, -0.5, |r| r.powf(-0.5) * (-r).exp());
        assert_relative_eq!(v, PI.sqrt(), max_relative = 1e-10);
    }
}
