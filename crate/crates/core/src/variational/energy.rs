use alloc::format;
use alloc::vec::Vec;

use libm::{pow, sqrt};

use super::model::{capped_f, capped_primitive, Nonlinearity, PenalizationParams, PotentialSpec};
use crate::error::{domain, numerical, Error, Result};
use crate::grid::{inverse_transform, transform, GridField, GridSpec};
use crate::specfun::check_order;

/// Trace-side energy ½⟨(A + V)u, u⟩ − ∫G(x, u) on a fixed grid, with A the
/// multiplier (|k|²+m²)^s. Covers both the autonomous functional (V ≡ μ,
/// no penalisation) and the penalised one (V(εx), cap outside Λ/ε).
#[derive(Debug, Clone)]
pub struct EnergyModel {
    spec: GridSpec,
    m: f64,
    s: f64,
    nl: Nonlinearity,
    potential: Vec<f64>,
    inside: Vec<bool>,
    pen: Option<PenalizationParams>,
    symbol: Vec<f64>,
    shift: f64,
}

fn symbol_table(spec: &GridSpec, m: f64, s: f64) -> Vec<f64> {
    (0..spec.len()).map(|i| pow(spec.k_squared(i) + m * m, s)).collect()
}

impl EnergyModel {
    /// L_μ; needs μ > −m^{2s}.
    pub fn autonomous(spec: GridSpec, mu: f64, nl: Nonlinearity, m: f64, s: f64) -> Result<Self> {
        check_order("energy_l", s)?;
        if !(m > 0.0) {
            return Err(domain("energy_l", format!("mass m = {m}")));
        }
        let m2s = pow(m, 2.0 * s);
        if !(mu > -m2s) {
            return Err(Error::Config(format!("mu <= -m^{{2s}} (mu = {mu}, -m^{{2s}} = {})", -m2s)));
        }
        Ok(Self {
            spec,
            m,
            s,
            nl,
            potential: alloc::vec![mu; spec.len()],
            inside: alloc::vec![true; spec.len()],
            pen: None,
            symbol: symbol_table(&spec, m, s),
            shift: mu.max(0.0),
        })
    }

    /// J_ε with V and Λ sampled at εx.
    pub fn penalized(
        spec: GridSpec,
        eps: f64,
        pot: &PotentialSpec,
        pen: &PenalizationParams,
        nl: Nonlinearity,
        m: f64,
        s: f64,
    ) -> Result<Self> {
        check_order("energy_j", s)?;
        if !(eps > 0.0) || !(m > 0.0) {
            return Err(domain("energy_j", format!("eps = {eps}, m = {m}")));
        }
        if pot.dim != spec.dim() {
            return Err(Error::Shape(format!(
                "potential is {}-dimensional, grid is {}-dimensional",
                pot.dim,
                spec.dim()
            )));
        }
        let dim = spec.dim();
        let mut potential = Vec::with_capacity(spec.len());
        let mut inside = Vec::with_capacity(spec.len());
        for i in 0..spec.len() {
            let p = spec.point(i);
            let mut y = [0.0; 3];
            for a in 0..dim {
                y[a] = eps * p[a];
            }
            potential.push(pot.value(&y[..dim]));
            inside.push(pot.region.contains(&y[..dim]));
        }
        Ok(Self {
            spec,
            m,
            s,
            nl,
            potential,
            inside,
            pen: Some(*pen),
            symbol: symbol_table(&spec, m, s),
            shift: 0.0,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn penalization(&self) -> Option<&PenalizationParams> {
        self.pen.as_ref()
    }

    /// True when g = f everywhere (L_μ, or J_ε with the cap removed).
    pub fn is_unpenalized(&self) -> bool {
        self.pen.is_none()
    }

    /// Same potential with f in place of g everywhere.
    pub fn without_penalization(&self) -> Self {
        Self {
            pen: None,
            ..self.clone()
        }
    }

    /// Discrete inner product h^N Σ u v.
    pub fn inner(&self, u: &GridField, v: &GridField) -> f64 {
        u.dot(v)
    }

    pub fn apply_operator(&self, u: &GridField) -> GridField {
        self.apply_symbol(u, |l| l)
    }

    fn apply_symbol(&self, u: &GridField, f: impl Fn(f64) -> f64) -> GridField {
        let mut c = transform(u);
        for (z, l) in c.coefficients_mut().iter_mut().zip(&self.symbol) {
            *z *= f(*l);
        }
        inverse_transform(&c)
    }

    /// (A + V)u.
    pub fn apply_linear(&self, u: &GridField) -> GridField {
        let au = self.apply_operator(u);
        let vals = au
            .values()
            .iter()
            .zip(u.values())
            .zip(&self.potential)
            .map(|((a, x), v)| a + v * x)
            .collect();
        GridField::from_raw(self.spec, vals)
    }

    /// ⟨(A + V)u, u⟩.
    pub fn quadratic(&self, u: &GridField) -> f64 {
        self.inner(&self.apply_linear(u), u)
    }

    /// Nonlinearity g(x, t) at grid point i.
    pub fn g_at(&self, i: usize, t: f64) -> f64 {
        match (&self.pen, self.inside[i]) {
            (Some(pen), false) => capped_f(t, pen, &self.nl),
            _ => self.nl.f(t),
        }
    }

    pub fn big_g_at(&self, i: usize, t: f64) -> f64 {
        match (&self.pen, self.inside[i]) {
            (Some(pen), false) => capped_primitive(t, pen, &self.nl),
            _ => self.nl.primitive(t),
        }
    }

    /// ∫ G(x, u).
    pub fn potential_energy(&self, u: &GridField) -> f64 {
        self.spec.cell_volume() * u.values().iter().enumerate().map(|(i, &t)| self.big_g_at(i, t)).sum::<f64>()
    }

    pub fn energy(&self, u: &GridField) -> Result<f64> {
        self.spec.check_same(u.spec(), "energy")?;
        let e = 0.5 * self.quadratic(u) - self.potential_energy(u);
        if !e.is_finite() {
            return Err(numerical("energy", "non-finite energy"));
        }
        Ok(e)
    }

    /// L²-gradient (A + V)u − g(x, u).
    pub fn gradient(&self, u: &GridField) -> Result<GridField> {
        self.spec.check_same(u.spec(), "gradient")?;
        let lin = self.apply_linear(u);
        let vals: Vec<f64> = lin
            .values()
            .iter()
            .zip(u.values())
            .enumerate()
            .map(|(i, (l, &t))| l - self.g_at(i, t))
            .collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(numerical("gradient", "non-finite gradient"));
        }
        Ok(GridField::from_raw(self.spec, vals))
    }

    /// Discrete H^{−s} norm, (h^N n^{−N} Σ |r̂|²/(|k|²+m²)^s)^{1/2}.
    pub fn dual_norm(&self, r: &GridField) -> f64 {
        let c = transform(r);
        let sum: f64 = c
            .coefficients()
            .iter()
            .zip(&self.symbol)
            .map(|(z, l)| z.norm_sqr() / l)
            .sum();
        sqrt(self.spec.cell_volume() * sum / self.spec.len() as f64)
    }

    /// P r with P the inverse of (|k|²+m²)^s + max(μ, 0) + 1.
    pub fn precondition(&self, r: &GridField) -> GridField {
        let shift = self.shift + 1.0;
        self.apply_symbol(r, |l| 1.0 / (l + shift))
    }
}

/// J_ε(u).
pub fn energy_j(
    u: &GridField,
    eps: f64,
    pot: &PotentialSpec,
    pen: &PenalizationParams,
    nl: &Nonlinearity,
    m: f64,
    s: f64,
) -> Result<f64> {
    EnergyModel::penalized(*u.spec(), eps, pot, pen, *nl, m, s)?.energy(u)
}

pub fn gradient_j(
    u: &GridField,
    eps: f64,
    pot: &PotentialSpec,
    pen: &PenalizationParams,
    nl: &Nonlinearity,
    m: f64,
    s: f64,
) -> Result<GridField> {
    EnergyModel::penalized(*u.spec(), eps, pot, pen, *nl, m, s)?.gradient(u)
}

/// L_μ(u).
pub fn energy_l(u: &GridField, mu: f64, nl: &Nonlinearity, m: f64, s: f64) -> Result<f64> {
    EnergyModel::autonomous(*u.spec(), mu, *nl, m, s)?.energy(u)
}

pub fn gradient_l(u: &GridField, mu: f64, nl: &Nonlinearity, m: f64, s: f64) -> Result<GridField> {
    EnergyModel::autonomous(*u.spec(), mu, *nl, m, s)?.gradient(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::hs_norm;
    use crate::variational::model::{PotentialShape, Region};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(g: GridSpec, rng: &mut ChaCha8Rng) -> GridField {
        let c = rng.gen_range(-2.0..2.0);
        let w = rng.gen_range(0.7..2.0);
        let a = rng.gen_range(0.5..1.5);
        GridField::from_fn(g, |x| a * (-(x[0] - c) * (x[0] - c) / (w * w)).exp() + 0.05 * (3.0 * x[0]).sin() * (-x[0] * x[0] / 8.0).exp())
            .unwrap()
    }

    #[test]
    fn zero_field_and_quadratic_part() {
        let g = GridSpec::new(1, 10.0, 256).unwrap();
        let nl = Nonlinearity::pure_power(3.0, 1, 0.3).unwrap();
        let z = GridField::zeros(g);
        assert_eq!(energy_l(&z, -0.5, &nl, 1.0, 0.3).unwrap(), 0.0);
        let model = EnergyModel::autonomous(g, -0.5, nl, 1.0, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let u = random_field(g, &mut rng);
            let q = model.quadratic(&u);
            let expect = hs_norm(&u, 1.0, 0.3).unwrap().powi(2) - 0.5 * u.dot(&u);
            assert_relative_eq!(q, expect, max_relative = 1e-12);
        }
        assert!(matches!(energy_l(&z, -1.0, &nl, 1.0, 0.3), Err(Error::Config(_))));
    }

    #[test]
    fn autonomous_reduction() {
        let g = GridSpec::new(1, 10.0, 256).unwrap();
        let (m, s) = (1.0, 0.3);
        let nl = Nonlinearity::pure_power(3.0, 1, s).unwrap();
        let pot = PotentialSpec::new(1, PotentialShape::Constant { value: -0.5 }, Region::Everywhere, m, s).unwrap();
        let pen = PenalizationParams::with_default_kappa(&pot, &nl, m, s, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_field(g, &mut rng);
        let j = energy_j(&u, 0.3, &pot, &pen, &nl, m, s).unwrap();
        let l = energy_l(&u, -0.5, &nl, m, s).unwrap();
        assert_relative_eq!(j, l, max_relative = 1e-14);
    }

    #[test]
    fn gradient_matches_central_differences() {
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
        let models = [
            EnergyModel::autonomous(g, -0.5, nl, m, s).unwrap(),
            EnergyModel::penalized(g, 0.5, &pot, &pen, nl, m, s).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for model in &models {
            for _ in 0..5 {
                let u = random_field(g, &mut rng);
                let v = random_field(g, &mut rng);
                let tau = 1e-4;
                let mut up = u.clone();
                up.add_scaled(tau, &v);
                let mut dn = u.clone();
                dn.add_scaled(-tau, &v);
                let fd = (model.energy(&up).unwrap() - model.energy(&dn).unwrap()) / (2.0 * tau);
                let an = model.inner(&model.gradient(&u).unwrap(), &v);
                assert!((fd - an).abs() <= 1e-5 * an.abs().max(1e-3));
            }
        }
    }
}
