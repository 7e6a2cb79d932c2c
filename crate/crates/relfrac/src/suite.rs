//! The ten acceptance criteria as named checks. Each criterion returns its
//! measured values so the report can show how close each bound is.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use relfrac_core::extension::{extend_spectral, trace_derivative, xs_norm, GradedMesh};
use relfrac_core::fit::fit_line;
use relfrac_core::grid::{convolve_with_weights, embed_centered, transform, GridField, GridSpec};
use relfrac_core::kernels::{
    bessel_potential_kernel, bessel_potential_large_r_law, bessel_potential_origin_rule, bessel_potential_small_r_law,
    bessel_potential_table, relativistic_density_half, ComparisonKernel, ComparisonKernelSpec, PoissonKernel,
    RadialKernelTable, DEFAULT_TIME_NODES,
};
use relfrac_core::operator::{apply_fourier, apply_singular_integral, hs_norm, CoreTreatment, SingularQuadratureConfig};
use relfrac_core::specfun::{bessel_k, gamma_fn, theta_profile, trace_constant};
use relfrac_core::variational::{
    barycenter, base_ground_state, ground_state, make_phi, sweep_point, EnergyModel,
};
use relfrac_core::Result as CoreResult;

use crate::commands::SweepSetup;
use crate::config::{Command, RunConfig};
use crate::problem::{self, random_bumps, Problem};

pub const CRITERIA: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum State {
    Pass,
    Fail,
    /// Fails, for a reason recorded in the criterion note.
    Documented,
    /// Reported for context, not judged.
    Info,
}

impl State {
    pub fn label(self) -> &'static str {
        match self {
            State::Pass => "pass",
            State::Fail => "fail",
            State::Documented => "fail-documented",
            State::Info => "info",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub state: State,
}

fn judged(name: impl Into<String>, value: f64, bound: String, ok: bool) -> Check {
    Check {
        name: name.into(),
        value,
        bound,
        state: if ok { State::Pass } else { State::Fail },
    }
}

fn le(name: impl Into<String>, value: f64, bound: f64) -> Check {
    judged(name, value, format!("<= {bound:e}"), value <= bound)
}

fn lt(name: impl Into<String>, value: f64, bound: f64) -> Check {
    judged(name, value, format!("< {bound:e}"), value < bound)
}

fn ge(name: impl Into<String>, value: f64, bound: f64) -> Check {
    judged(name, value, format!(">= {bound}"), value >= bound)
}

fn gt(name: impl Into<String>, value: f64, bound: f64) -> Check {
    judged(name, value, format!("> {bound}"), value > bound)
}

fn info(name: impl Into<String>, value: f64) -> Check {
    Check {
        name: name.into(),
        value,
        bound: String::new(),
        state: State::Info,
    }
}

/// Marks a failing check as a documented shortfall.
fn documented(mut c: Check) -> Check {
    if c.state == State::Fail {
        c.state = State::Documented;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Every failing check is a documented shortfall.
    FailDocumented,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::FailDocumented => "fail-documented",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub note: Option<&'static str>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Outcome {
    pub fn status(&self) -> Status {
        if self.error.is_some() || self.elapsed > self.budget || self.checks.iter().any(|c| c.state == State::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.state == State::Documented) {
            Status::FailDocumented
        } else {
            Status::Pass
        }
    }

    /// One console line: verdict, timing and the first offending check.
    pub fn line(&self) -> String {
        let verdict = match self.status() {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::FailDocumented => "FAIL (documented)",
        };
        let mut s = format!(
            "criterion {:>2} {:<36} {verdict} [{:.1} s of {} s]",
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        );
        if let Some(e) = &self.error {
            s.push_str(&format!(" error: {e}"));
        }
        if self.elapsed > self.budget {
            s.push_str(" over budget");
        }
        for c in self.checks.iter().filter(|c| matches!(c.state, State::Fail | State::Documented)) {
            s.push_str(&format!("; {} = {:.3e} ({})", c.name, c.value, c.bound));
        }
        if self.status() == Status::FailDocumented {
            if let Some(n) = self.note {
                s.push_str(&format!("; {n}"));
            }
        }
        s
    }
}

type Body = fn(u64) -> CoreResult<Vec<Check>>;

struct Criterion {
    title: &'static str,
    budget_secs: u64,
    note: Option<&'static str>,
    body: Body,
}

const TABLE: [Criterion; CRITERIA] = [
    Criterion {
        title: "operator equivalence",
        budget_secs: 30,
        note: None,
        body: operator_equivalence,
    },
    Criterion {
        title: "special-function asymptotics",
        budget_secs: 5,
        note: Some(
            "at nu = 0.3 the next small-r term (r/2)^{2nu} Gamma(1-nu)/Gamma(1+nu) is 3.8e-3 at r = 1e-4, \
             above the 1e-3 bound for an exact K_nu",
        ),
        body: special_functions,
    },
    Criterion {
        title: "Poisson normalization",
        budget_secs: 10,
        note: None,
        body: poisson_normalization,
    },
    Criterion {
        title: "trace identity and energy equality",
        budget_secs: 60,
        note: None,
        body: trace_identity,
    },
    Criterion {
        title: "Bessel potential laws",
        budget_secs: 30,
        note: None,
        body: bessel_laws,
    },
    Criterion {
        title: "comparison kernel",
        budget_secs: 60,
        note: None,
        body: comparison_kernel,
    },
    Criterion {
        title: "ground state",
        budget_secs: 300,
        note: None,
        body: ground_state_checks,
    },
    Criterion {
        title: "concentration and penalization",
        budget_secs: 1800,
        note: None,
        body: concentration,
    },
    Criterion {
        title: "test functions and barycenters",
        budget_secs: 600,
        note: None,
        body: test_functions,
    },
    Criterion {
        title: "gradient correctness",
        budget_secs: 60,
        note: None,
        body: gradients,
    },
];

/// Runs criterion `id` (1-based).
pub fn run(id: usize, seed: u64) -> Outcome {
    let c = &TABLE[id - 1];
    let start = Instant::now();
    let result = (c.body)(seed);
    let elapsed = start.elapsed();
    let (checks, error) = match result {
        Ok(checks) => (checks, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    Outcome {
        id,
        title: c.title,
        checks,
        error,
        note: c.note,
        elapsed,
        budget: Duration::from_secs(c.budget_secs),
    }
}

fn gaussian(g: GridSpec) -> GridField {
    GridField::from_fn(g, |x| (-0.5 * x[0] * x[0]).exp()).expect("finite samples")
}

/// Largest step up along `seq`, ignoring steps that land at or below `floor`.
/// Negative means strictly decreasing.
fn worst_rise(seq: &[f64], floor: f64) -> f64 {
    seq.windows(2)
        .filter(|w| w[1] > floor)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
}

fn operator_equivalence(_: u64) -> CoreResult<Vec<Check>> {
    let (m, s) = (1.0, 0.3);
    let error = |n: usize, core: CoreTreatment| -> CoreResult<f64> {
        let g = GridSpec::new(1, 20.0, n)?;
        let u = gaussian(g);
        let f = apply_fourier(&u, m, s)?;
        let cfg = SingularQuadratureConfig::for_grid(&g).with_core(core);
        Ok(apply_singular_integral(&u, m, s, &cfg)?.relative_l2_error(&f))
    };
    let (c1, c2) = (error(1024, CoreTreatment::LatticeZeta)?, error(2048, CoreTreatment::LatticeZeta)?);
    let (d1, d2) = (error(1024, CoreTreatment::Drop)?, error(2048, CoreTreatment::Drop)?);
    Ok(vec![
        le("rel L2 error, n = 1024", c1, 1e-3),
        le("rel L2 error, n = 2048", c2, 2.5e-4),
        ge("observed order", (c1 / c2).log2(), 2.0),
        info("dropped core: rel L2 error, n = 1024", d1),
        info("dropped core: rel L2 error, n = 2048", d2),
        info("dropped core: observed order", (d1 / d2).log2()),
    ])
}

fn special_functions(_: u64) -> CoreResult<Vec<Check>> {
    let mut out = Vec::new();
    let mut worst: f64 = 0.0;
    let mut r: f64 = 1e-3;
    while r <= 50.0 {
        let base = (PI / (2.0 * r)).sqrt() * (-r).exp();
        for (nu, exact) in [
            (0.5, base),
            (1.5, base * (1.0 + 1.0 / r)),
            (2.5, base * (1.0 + 3.0 / r + 3.0 / (r * r))),
        ] {
            worst = worst.max((bessel_k(nu, r)? / exact - 1.0).abs());
        }
        r *= 1.2;
    }
    out.push(le("half-integer closed forms, r in [1e-3, 50]", worst, 1e-10));
    for nu in [0.3, 1.0, 2.4] {
        let r: f64 = 1e-4;
        let dev = (r.powf(nu) * bessel_k(nu, r)? / (gamma_fn(nu)? * 2f64.powf(nu - 1.0)) - 1.0).abs();
        let c = lt(format!("small-r limit, nu = {nu}, r = 1e-4"), dev, 1e-3);
        out.push(if nu == 0.3 { documented(c) } else { c });
    }
    for nu in [0.0, 0.3, 0.5, 1.0] {
        let r: f64 = 40.0;
        let dev = (bessel_k(nu, r)? * r.exp() * r.sqrt() / (PI / 2.0).sqrt() - 1.0).abs();
        out.push(lt(format!("large-r limit, nu = {nu}, r = 40"), dev, 1e-2));
    }
    let mut ode: f64 = 0.0;
    for s in [0.2, 0.5, 0.8] {
        let h = 2e-4;
        let f = |x: f64| theta_profile(s, x);
        let mut r = 0.1;
        while r <= 10.0 {
            let (a, b, c) = (f(r - h)?, f(r)?, f(r + h)?);
            let res = (c - 2.0 * b + a) / (h * h) + (1.0 - 2.0 * s) / r * (c - a) / (2.0 * h) - b;
            ode = ode.max(res.abs());
            r += 0.35;
        }
    }
    out.push(lt("profile ODE residual, r in [0.1, 10]", ode, 1e-5));
    let mut rec: f64 = 0.0;
    for nu in [0.7, 1.3, 2.2] {
        for r in [0.3, 5.0, 24.0, 24.999, 25.0, 25.001, 26.0, 35.0] {
            let lhs = bessel_k(nu + 1.0, r)?;
            let rhs = bessel_k(nu - 1.0, r)? + 2.0 * nu / r * bessel_k(nu, r)?;
            rec = rec.max((lhs / rhs - 1.0).abs());
        }
    }
    out.push(le("recurrence across the switch radius", rec, 1e-8));
    Ok(out)
}

fn poisson_normalization(_: u64) -> CoreResult<Vec<Check>> {
    let (m, s) = (1.0, 0.3);
    let p = PoissonKernel::calibrated(1, m, s)?;
    let g = GridSpec::new(1, 60.0, 1 << 14)?;
    let mut out = Vec::new();
    for y in [0.1, 1.0, 5.0] {
        let target = theta_profile(s, m * y)?;
        let grid_mass: f64 = p.table(&g, y)?.grid_weights(&g)?.values().iter().sum();
        out.push(le(format!("grid mass, y = {y}"), (grid_mass / target - 1.0).abs(), 1e-4));
        out.push(le(format!("radial mass, y = {y}"), (p.mass(y)? / target - 1.0).abs(), 1e-4));
    }
    Ok(out)
}

fn trace_identity(_: u64) -> CoreResult<Vec<Check>> {
    let g = GridSpec::new(1, 20.0, 1024)?;
    let cases = [(1.0, 0.3), (2.0, 0.5), (0.5, 0.75)];
    let rows = cases
        .par_iter()
        .map(|&(m, s)| -> CoreResult<Vec<Check>> {
            let sigma = trace_constant(s)?;
            let u = GridField::from_fn(g, |x| (-0.5 * x[0] * x[0]).exp() * (1.0 + 0.5 * x[0].sin()))?;
            let mesh = GradedMesh::new(10.0 / m, 256, 4.0)?;
            let ext = extend_spectral(&u, m, s, &mesh)?;
            let trace = trace_derivative(&ext, s)?.relative_l2_error(&apply_fourier(&u, m, s)?.scaled(sigma));
            let energy = (xs_norm(&ext, m)?.powi(2) / (sigma * hs_norm(&u, m, s)?.powi(2)) - 1.0).abs();
            Ok(vec![
                le(format!("trace identity, m = {m}, s = {s}"), trace, 1e-2),
                le(format!("energy equality, m = {m}, s = {s}"), energy, 1e-2),
            ])
        })
        .collect::<CoreResult<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn bessel_laws(_: u64) -> CoreResult<Vec<Check>> {
    let mut out = Vec::new();
    let g = GridSpec::new(1, 16.0, 1024)?;
    for alpha in [0.6, 1.0] {
        let mass: f64 = bessel_potential_table(alpha, &g)?.grid_weights(&g)?.values().iter().sum();
        out.push(le(format!("unit mass, alpha = {alpha}"), (mass - 1.0).abs(), 1e-5));
    }
    let g = GridSpec::new(1, 32.0, 4096)?;
    let h = g.spacing();
    let half = bessel_potential_table(0.5, &g)?.grid_weights(&g)?;
    let whole = bessel_potential_table(1.0, &g)?.grid_weights(&g)?;
    let composed = convolve_with_weights(&half, &half)?;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..g.len() {
        let r = g.offset_radius(i);
        if !(0.1..=20.0).contains(&r) {
            continue;
        }
        let exact = bessel_potential_kernel(1.0, r, 1)?;
        num += (composed.values()[i] / h - exact).powi(2);
        den += exact * exact;
    }
    out.push(le("G_0.5 * G_0.5 = G_1 on r in [0.1, 20]", (num / den).sqrt(), 1e-4));
    let u = GridField::from_fn(g, |x| (-x[0] * x[0]).exp())?;
    let twice = convolve_with_weights(&convolve_with_weights(&u, &half)?, &half)?;
    let once = convolve_with_weights(&u, &whole)?;
    out.push(le("composition applied to a Gaussian", twice.relative_l2_error(&once), 1e-4));
    for (alpha, dim) in [(0.6, 1), (0.5, 1), (1.2, 2)] {
        let radii: Vec<f64> = (0..=100).map(|i| 1e-6 * 3e7f64.powf(i as f64 / 100.0)).collect();
        let values = radii
            .iter()
            .map(|&r| bessel_potential_kernel(alpha, r, dim))
            .collect::<CoreResult<Vec<_>>>()?;
        let table = RadialKernelTable::new(
            dim,
            radii,
            values,
            bessel_potential_small_r_law(alpha, dim)?,
            bessel_potential_large_r_law(alpha, dim)?,
            bessel_potential_origin_rule(alpha, dim)?,
        )?;
        let (lo, hi) = table.boundary_mismatch();
        out.push(lt(format!("small-r law at r = 1e-6, alpha = {alpha}, N = {dim}"), lo, 0.05));
        out.push(lt(format!("large-r law at r = 30, alpha = {alpha}, N = {dim}"), hi, 0.05));
    }
    Ok(out)
}

fn comparison_kernel(_: u64) -> CoreResult<Vec<Check>> {
    let mut out = Vec::new();
    let spec = ComparisonKernelSpec::new(1.0, 0.3, 0.5, 0.2)?;
    let g = GridSpec::new(1, 40.0, 1024)?;
    let b = ComparisonKernel::on_grid(spec, &g, DEFAULT_TIME_NODES)?;
    let spectrum = transform(&b.field);
    let mut worst: f64 = 0.0;
    for i in 0..g.len() {
        let k2 = g.k_squared(i);
        if k2 > 25.0 {
            continue;
        }
        let sign = if g.signed(i) % 2 == 0 { 1.0 } else { -1.0 };
        let got = spectrum.coefficients()[i].re * g.spacing() * sign;
        let want = 1.0 / ((k2 + 1.0).powf(0.3) - 0.7);
        worst = worst.max((got / want - 1.0).abs());
    }
    out.push(le("spectral identity, |k|^2 <= 25", worst, 1e-3));
    let g = GridSpec::new(1, 64.0, 4096)?;
    let b = ComparisonKernel::on_grid(spec, &g, DEFAULT_TIME_NODES)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = b
        .table
        .radii()
        .iter()
        .zip(b.table.values())
        .filter(|(r, v)| (5.0..=12.0).contains(*r) && **v > 0.0)
        .map(|(r, v)| (*r, v.ln()))
        .unzip();
    let fit = fit_line(&xs, &ys).ok_or_else(|| relfrac_core::Error::Numerical {
        op: "comparison tail fit",
        detail: "degenerate window".into(),
    })?;
    out.push(ge("tail fit R^2 on r in [5, 12]", fit.r_squared, 0.99));
    out.push(gt("tail fit rate", -fit.slope, 0.0));
    let half = ComparisonKernelSpec::new(1.0, 0.5, 0.5, 0.2)?;
    let g = GridSpec::new(1, 48.0, 1 << 15)?;
    let b = ComparisonKernel::on_grid(half, &g, DEFAULT_TIME_NODES)?;
    let mut worst: f64 = 0.0;
    for r in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let exact = b.time_quadrature(|t| relativistic_density_half(r, t, 1.0, 1))?;
        worst = worst.max((b.value(r) / exact - 1.0).abs());
    }
    out.push(le("s = 1/2 closed-form density", worst, 1e-4));
    Ok(out)
}

/// Benchmark defaults of a sweep-type command.
fn benchmark(command: Command) -> CoreResult<SweepSetup> {
    RunConfig::load(command, None, &[])
        .and_then(|c| SweepSetup::from_config(&c))
        .map_err(|e| relfrac_core::Error::Config(e.to_string()))
}

fn ground_state_checks(seed: u64) -> CoreResult<Vec<Check>> {
    let (pr, g, nl, cfg) = RunConfig::load(Command::GroundState, None, &[])
        .and_then(|c| {
            let pr = Problem::from_config(&c)?;
            let g = problem::grid(&c, pr.dim, "half_width", c.usize("points")?)?;
            Ok((pr, g, problem::nonlinearity(&c, &pr)?, problem::solver(&c)?))
        })
        .map_err(|e| relfrac_core::Error::Config(e.to_string()))?;
    let (m, s) = (pr.m, pr.s);
    let levels = [-0.5, -0.25, 0.0]
        .par_iter()
        .map(|&mu| ground_state(mu, &nl, m, s, g, None, &cfg))
        .collect::<CoreResult<Vec<_>>>()?;
    let base = &levels[0];
    let others = (0..10u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k + 1);
            let init = random_bumps(g, &mut rng, (g.half_width() / 4.0).min(5.0));
            ground_state(-0.5, &nl, m, s, g, Some(&init), &cfg)
        })
        .collect::<CoreResult<Vec<_>>>()?;
    let spread = others
        .iter()
        .map(|o| (o.energy() / base.energy() - 1.0).abs())
        .fold(0.0, f64::max);
    let least = others.iter().chain(&levels).map(|o| o.field().min()).fold(f64::INFINITY, f64::min);
    let worst_residual = others.iter().chain(&levels).map(|o| o.point.residual).fold(0.0, f64::max);
    let e: Vec<f64> = levels.iter().map(|l| l.energy()).collect();
    Ok(vec![
        lt("Euler-Lagrange residual", worst_residual, 1e-7),
        ge("minimum value", least, 0.0),
        le("relative spread over 10 random starts", spread, 1e-6),
        gt("d(-0.25) - d(-0.5)", e[1] - e[0], 0.0),
        gt("d(0) - d(-0.25)", e[2] - e[1], 0.0),
        info("d(-0.5)", e[0]),
    ])
}

fn concentration(_: u64) -> CoreResult<Vec<Check>> {
    let SweepSetup { pr, nl, pot, pen, sw } = benchmark(Command::Sweep)?;
    let ground = base_ground_state(&pot, &nl, pr.m, pr.s, &sw)?;
    let mut eps = sw.eps.clone();
    eps.sort_by(|a, b| b.total_cmp(a));
    let records = eps
        .par_iter()
        .map(|&e| sweep_point(e, &pot, &pen, &nl, pr.m, pr.s, &sw, ground.field()))
        .collect::<CoreResult<Vec<_>>>()?;
    let d = ground.energy();
    let gaps: Vec<f64> = records.iter().map(|r| (r.energy - d).abs()).collect();
    let dists: Vec<f64> = records.iter().map(|r| r.well_distance).collect();
    let last = records.last().expect("four sweep points");
    let mut out = vec![
        lt("largest change of |c - d| along the sweep", worst_rise(&gaps, f64::NEG_INFINITY), 0.0),
        le("largest change of dist(eps x, M)", worst_rise(&dists, f64::NEG_INFINITY).max(f64::MIN), 0.0),
        lt("final dist(eps x, M) / (eps h)", last.well_distance / (last.eps * last.grid.spacing()), 1.0),
    ];
    for r in &records[records.len() - 2..] {
        out.push(lt(format!("sup outside Lambda / a, eps = {}", r.eps), r.sup_outside / pen.a, 1.0));
    }
    for r in &records {
        match &r.decay {
            Ok(f) => {
                out.push(ge(format!("decay R^2, eps = {}", r.eps), f.r_squared, 0.99));
                out.push(gt(
                    format!("exponential minus power R^2, eps = {}", r.eps),
                    f.r_squared - f.power_r_squared,
                    0.0,
                ));
            }
            Err(e) => out.push(judged(format!("decay fit, eps = {}: {e}", r.eps), f64::NAN, "fit".into(), false)),
        }
    }
    out.push(info("final |c - d|", *gaps.last().unwrap()));
    Ok(out)
}

fn test_functions(_: u64) -> CoreResult<Vec<Check>> {
    let SweepSetup { pr, nl, pot, pen, sw: cfg } = benchmark(Command::BarycenterCheck)?;
    let ground = base_ground_state(&pot, &nl, pr.m, pr.s, &cfg)?;
    let d = ground.energy();
    let zs = [-0.5, -0.25, 0.0, 0.25, 0.5];
    let per_z = zs
        .par_iter()
        .map(|&z| -> CoreResult<Vec<Check>> {
            let (mut gaps, mut scales, mut drifts) = (Vec::new(), Vec::new(), Vec::new());
            for &eps in &cfg.eps {
                let grid = cfg.policy.grid_for(eps, &pot)?;
                let w = embed_centered(ground.field(), grid)?;
                let model = EnergyModel::penalized(grid, eps, &pot, &pen, nl, pr.m, pr.s)?;
                let phi = make_phi(&model, &w, &[z], eps, cfg.delta)?;
                gaps.push(phi.energy - d);
                scales.push((phi.scaling - 1.0).abs());
                drifts.push((barycenter(&phi.u, eps, cfg.rho)?[0] - z).abs());
            }
            let least_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(vec![
                lt(format!("z = {z}: largest change of J - d"), worst_rise(&gaps, f64::NEG_INFINITY), 0.0),
                ge(format!("z = {z}: smallest J - d"), least_gap, 0.0),
                lt(format!("z = {z}: largest change of |t - 1|"), worst_rise(&scales, f64::NEG_INFINITY), 0.0),
                lt(format!("z = {z}: largest change of |beta - z| above 1e-14"), worst_rise(&drifts, 1e-14), 0.0),
                info(format!("z = {z}: final J - d"), *gaps.last().unwrap()),
                info(format!("z = {z}: final |t - 1|"), *scales.last().unwrap()),
            ])
        })
        .collect::<CoreResult<Vec<_>>>()?;
    Ok(per_z.into_iter().flatten().collect())
}

fn random_field(g: GridSpec, rng: &mut ChaCha8Rng) -> CoreResult<GridField> {
    let c = rng.gen_range(-2.0..2.0);
    let w = rng.gen_range(0.7..2.0);
    let a = rng.gen_range(0.5..1.5);
    GridField::from_fn(g, |x| {
        a * (-(x[0] - c) * (x[0] - c) / (w * w)).exp() + 0.05 * (3.0 * x[0]).sin() * (-x[0] * x[0] / 8.0).exp()
    })
}

fn gradients(seed: u64) -> CoreResult<Vec<Check>> {
    let g = GridSpec::new(1, 10.0, 256)?;
    let SweepSetup { pr, nl, pot, pen, .. } = benchmark(Command::Sweep)?;
    let models = [
        ("L_mu", EnergyModel::autonomous(g, -0.5, nl, pr.m, pr.s)?),
        ("J_eps", EnergyModel::penalized(g, 0.5, &pot, &pen, nl, pr.m, pr.s)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (name, model) in &models {
        let (mut worst, mut worst_plain): (f64, f64) = (0.0, 0.0);
        for _ in 0..20 {
            let u = random_field(g, &mut rng)?;
            let v = random_field(g, &mut rng)?;
            let tau = 1e-4;
            let mut up = u.clone();
            up.add_scaled(tau, &v);
            let mut dn = u.clone();
            dn.add_scaled(-tau, &v);
            let fd = (model.energy(&up)? - model.energy(&dn)?) / (2.0 * tau);
            let grad = model.gradient(&u)?;
            let an = model.inner(&grad, &v);
            // magnitude of the inner product before cancellation
            let scale = grad.values().iter().zip(v.values()).map(|(a, b)| (a * b).abs()).sum::<f64>()
                * g.cell_volume();
            worst = worst.max((fd - an).abs() / scale);
            worst_plain = worst_plain.max((fd - an).abs() / an.abs().max(1e-3));
        }
        out.push(le(format!("{name}: worst relative error over 20 pairs"), worst, 1e-5));
        out.push(info(format!("{name}: worst error relative to |<grad, v>|"), worst_plain));
    }
    Ok(out)
}
