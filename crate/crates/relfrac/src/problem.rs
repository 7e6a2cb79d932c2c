//! Core parameter types built from a [`RunConfig`]. Constraints are checked
//! here so a bad file fails before any solve, naming the violated relation.

use rand::Rng;
use relfrac_core::grid::{GridField, GridSpec};
use relfrac_core::variational::{
    BoxPolicy, Nonlinearity, PenalizationParams, PotentialShape, PotentialSpec, Region, SolverConfig, SweepConfig,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

fn require(ok: bool, violated: &str, values: String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::config(format!("{violated} ({values})")))
    }
}

/// Dimension, mass and order shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub dim: usize,
    pub m: f64,
    pub s: f64,
}

impl Problem {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let dim = cfg.usize("dim")?;
        let m = cfg.f64("m")?;
        let s = cfg.f64("s")?;
        require((1..=3).contains(&dim), "dim outside 1..=3", format!("dim = {dim}"))?;
        require(m > 0.0, "m <= 0", format!("m = {m}"))?;
        require(s > 0.0 && s < 1.0, "s outside (0, 1)", format!("s = {s}"))?;
        require(dim as f64 > 2.0 * s, "N <= 2s", format!("N = {dim}, s = {s}"))?;
        Ok(Self { dim, m, s })
    }

    pub fn m2s(&self) -> f64 {
        self.m.powf(2.0 * self.s)
    }
}

pub fn grid(cfg: &RunConfig, dim: usize, half_width_key: &str, points: usize) -> Result<GridSpec> {
    let l = cfg.f64(half_width_key)?;
    require(l > 0.0, "half_width <= 0", format!("half_width = {l}"))?;
    Ok(GridSpec::new(dim, l, points)?)
}

pub fn nonlinearity(cfg: &RunConfig, pr: &Problem) -> Result<Nonlinearity> {
    let p = cfg.f64("p")?;
    require(p > 2.0, "p <= 2", format!("p = {p}"))?;
    Ok(Nonlinearity::pure_power(p, pr.dim, pr.s)?)
}

pub fn solver(cfg: &RunConfig) -> Result<SolverConfig> {
    let out = SolverConfig {
        tolerance: cfg.f64("tolerance")?,
        max_iterations: cfg.usize("max_iterations")?,
        initial_step: cfg.f64("initial_step")?,
        max_step: cfg.f64("max_step")?,
        min_step: cfg.f64("min_step")?,
        positivity_tolerance: cfg.f64("positivity_tolerance")?,
    };
    require(out.tolerance > 0.0, "tolerance <= 0", format!("tolerance = {}", out.tolerance))?;
    require(out.max_iterations >= 1, "max_iterations < 1", "max_iterations = 0".into())?;
    require(
        0.0 < out.min_step && out.min_step <= out.initial_step && out.initial_step <= out.max_step,
        "not 0 < min_step <= initial_step <= max_step",
        format!("{} / {} / {}", out.min_step, out.initial_step, out.max_step),
    )?;
    require(
        out.positivity_tolerance >= 0.0,
        "positivity_tolerance < 0",
        format!("positivity_tolerance = {}", out.positivity_tolerance),
    )?;
    Ok(out)
}

/// Decay-fit window `r_lo, r_hi`.
pub fn window(cfg: &RunConfig) -> Result<(f64, f64)> {
    let w = cfg.list_f64("window")?;
    require(w.len() == 2, "window needs two radii", format!("window = {w:?}"))?;
    require(0.0 < w[0] && w[0] < w[1], "not 0 < r_lo < r_hi", format!("window = {w:?}"))?;
    Ok((w[0], w[1]))
}

pub fn potential(cfg: &RunConfig, pr: &Problem) -> Result<PotentialSpec> {
    let depth = cfg.f64("depth")?;
    let shape = match cfg.raw("potential")? {
        "gaussian" => PotentialShape::GaussianWell {
            depth,
            width: cfg.f64("width")?,
        },
        "plateau" => PotentialShape::Plateau {
            depth,
            radius: cfg.f64("radius")?,
            width: cfg.f64("width")?,
        },
        "constant" => PotentialShape::Constant { value: -depth },
        other => return Err(CliError::config(format!("key `potential`: unknown shape `{other}`"))),
    };
    if let PotentialShape::GaussianWell { width, .. } | PotentialShape::Plateau { width, .. } = shape {
        require(width > 0.0, "width <= 0", format!("width = {width}"))?;
    }
    if let PotentialShape::Plateau { radius, .. } = shape {
        require(radius >= 0.0, "radius < 0", format!("radius = {radius}"))?;
    }
    let size = cfg.f64("region_size")?;
    let region = match cfg.raw("region")? {
        "cube" => Region::Cube { half_width: size },
        "ball" => Region::Ball { radius: size },
        "everywhere" => Region::Everywhere,
        other => return Err(CliError::config(format!("key `region`: unknown region `{other}`"))),
    };
    if region != Region::Everywhere {
        require(size > 0.0, "region_size <= 0", format!("region_size = {size}"))?;
    }
    Ok(PotentialSpec::new(pr.dim, shape, region, pr.m, pr.s)?)
}

pub fn penalization(cfg: &RunConfig, pr: &Problem, pot: &PotentialSpec, nl: &Nonlinearity) -> Result<PenalizationParams> {
    let multiplicity = cfg.bool("multiplicity")?;
    Ok(match cfg.raw("kappa")? {
        "auto" => PenalizationParams::with_default_kappa(pot, nl, pr.m, pr.s, multiplicity)?,
        _ => PenalizationParams::new(cfg.f64("kappa")?, pot, nl, pr.m, pr.s, multiplicity)?,
    })
}

pub fn sweep(cfg: &RunConfig, pr: &Problem) -> Result<SweepConfig> {
    let eps = cfg.list_f64("eps")?;
    require(!eps.is_empty(), "eps is empty", "eps = []".into())?;
    for &e in &eps {
        require(e > 0.0, "eps <= 0", format!("eps = {e}"))?;
    }
    let policy = BoxPolicy {
        spacing: cfg.f64("spacing")?,
        base_half_width: cfg.f64("base_half_width")?,
        max_points: cfg.usize("max_points")?,
        decay_rate: cfg.f64("decay_rate")?,
    };
    require(policy.spacing > 0.0, "spacing <= 0", format!("spacing = {}", policy.spacing))?;
    require(
        policy.base_half_width > 0.0,
        "base_half_width <= 0",
        format!("base_half_width = {}", policy.base_half_width),
    )?;
    require(policy.decay_rate > 0.0, "decay_rate <= 0", format!("decay_rate = {}", policy.decay_rate))?;
    let delta = cfg.f64("delta")?;
    let rho = cfg.f64("rho")?;
    require(delta > 0.0, "delta <= 0", format!("delta = {delta}"))?;
    require(rho > 0.0, "rho <= 0", format!("rho = {rho}"))?;
    let mut well = cfg.points("well_point", pr.dim)?;
    require(well.len() == 1, "well_point must be one point", format!("{} given", well.len()))?;
    Ok(SweepConfig {
        eps,
        policy,
        delta,
        rho,
        window: window(cfg)?,
        solver: solver(cfg)?,
        well_point: well.remove(0),
    })
}

/// Named test function on `g`.
pub fn datum(name: &str, g: GridSpec) -> Result<GridField> {
    let d = g.dim();
    let r2 = move |x: &[f64]| x[..d].iter().map(|v| v * v).sum::<f64>();
    let f: Box<dyn Fn(&[f64]) -> f64> = match name {
        "gaussian" => Box::new(move |x| (-0.5 * r2(x)).exp()),
        "bump" => Box::new(move |x| (1.0 + 0.3 * x[0]) * (-r2(x) / 1.5).exp() / (1.0 + r2(x))),
        "modulated" => Box::new(move |x| (-0.5 * r2(x)).exp() * (1.0 + 0.5 * x[0].sin())),
        other => {
            return Err(CliError::config(format!(
                "key `datum`: unknown test function `{other}` (gaussian, bump, modulated)"
            )))
        }
    };
    Ok(GridField::from_fn(g, |x| f(x))?)
}

/// Three Gaussian bumps with random centres in [−spread, spread]^N, widths
/// and amplitudes: the random starts of the ground-state solver.
pub fn random_bumps(g: GridSpec, rng: &mut impl Rng, spread: f64) -> GridField {
    let d = g.dim();
    let bumps: Vec<([f64; 3], f64, f64)> = (0..3)
        .map(|_| {
            let mut c = [0.0; 3];
            for v in c.iter_mut().take(d) {
                *v = rng.gen_range(-spread..spread);
            }
            (c, rng.gen_range(0.5..2.0), rng.gen_range(0.2..2.0))
        })
        .collect();
    GridField::from_fn(g, |x| {
        bumps
            .iter()
            .map(|(c, w, a)| {
                let r2: f64 = (0..d).map(|i| (x[i] - c[i]) * (x[i] - c[i])).sum();
                a * (-r2 / (w * w)).exp()
            })
            .sum()
    })
    .expect("bump samples are finite")
}
