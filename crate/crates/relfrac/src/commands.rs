//! One function per command. Each validates its configuration, computes,
//! and writes artifacts through an [`Output`]; the caller writes the
//! manifest whether or not the command succeeded.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use relfrac_core::extension::{extend_spectral, trace_derivative, xs_norm, GradedMesh};
use relfrac_core::fit::fit_line;
use relfrac_core::grid::{embed_centered, GridField, GridSpec};
use relfrac_core::kernels::{
    bessel_potential_table, levy_measure, relativistic_density, ComparisonKernel, ComparisonKernelSpec,
    PoissonKernel, RadialKernelTable, DEFAULT_TIME_NODES,
};
use relfrac_core::operator::{apply_fourier, apply_singular_integral, hs_norm, CoreTreatment, JumpKernel, SingularQuadratureConfig};
use relfrac_core::specfun::trace_constant;
use relfrac_core::variational::{
    barycenter, base_ground_state, decay_fit, ground_state, make_phi, sweep_point, EnergyModel, Solution,
    SweepRecord,
};
use relfrac_core::Error as CoreError;

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{Cell, Output};
use crate::plot::Figure;
use crate::problem::{self, Problem};
use crate::{row, suite};

/// Runs the configured command, writing into `out`. Returns the lines of
/// the console summary.
pub fn dispatch(cfg: &RunConfig, out: &mut Output) -> Result<Vec<String>> {
    match cfg.command {
        Command::OpCheck => op_check(cfg, out),
        Command::Kernel => kernel(cfg, out),
        Command::ExtendCheck => extend_check(cfg, out),
        Command::GroundState => ground(cfg, out),
        Command::Sweep => sweep(cfg, out),
        Command::BarycenterCheck => barycenter_check(cfg, out),
        Command::PaperSuite => paper_suite(cfg, out),
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| crate::format::number(*x)).collect::<Vec<_>>().join(";")
}

fn history_rows(history: &[f64]) -> Vec<Vec<Cell>> {
    history.iter().enumerate().map(|(i, r)| row![i, *r]).collect()
}

/// Keeps the residual history of a stalled solve before passing the error on.
fn keep_history(out: &mut Output, name: &str, e: CoreError) -> CliError {
    if let CoreError::NonConvergence { history, .. } = &e {
        if let Err(w) = out.csv(name, &["iteration", "residual"], &history_rows(history)) {
            log::warn!("could not write {name}: {w}");
        }
    }
    CliError::Core(e)
}

fn op_check(cfg: &RunConfig, out: &mut Output) -> Result<Vec<String>> {
    let pr = Problem::from_config(cfg)?;
    let sizes = cfg.list_usize("op_points")?;
    let cores = cfg
        .list_str("cores")?
        .iter()
        .map(|c| match c.as_str() {
            "drop" => Ok(CoreTreatment::Drop),
            "lattice-zeta" => Ok(CoreTreatment::LatticeZeta),
            other => Err(CliError::config(format!("key `cores`: unknown treatment `{other}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let names = cfg.list_str("cores")?;
    let datum = cfg.raw("datum")?;
    let grids = sizes
        .iter()
        .map(|&n| problem::grid(cfg, pr.dim, "half_width", n))
        .collect::<Result<Vec<_>>>()?;
    for g in &grids {
        SingularQuadratureConfig::for_grid(g).validate(g)?;
    }
    let mut rows = Vec::new();
    let mut fig = Figure::new("operator equivalence", "grid points", "relative L2 error").log_y();
    let mut lines = Vec::new();
    for (core, name) in cores.iter().zip(&names) {
        let mut last: Option<(usize, f64)> = None;
        let mut pts = Vec::new();
        for g in &grids {
            let u = problem::datum(datum, *g)?;
            let f = apply_fourier(&u, pr.m, pr.s)?;
            let q = SingularQuadratureConfig::for_grid(g).with_core(*core);
            let err = apply_singular_integral(&u, pr.m, pr.s, &q)?.relative_l2_error(&f);
            let order = last.map(|(n0, e0)| (e0 / err).ln() / (g.points() as f64 / n0 as f64).ln());
            rows.push(row![
                g.points(),
                g.spacing(),
                name.as_str(),
                err,
                order.map_or(String::new(), crate::format::number)
            ]);
            lines.push(format!(
                "{name:>12} n = {:>6}: error {err:.3e}{}",
                g.points(),
                order.map_or(String::new(), |o| format!(", order {o:.2}"))
            ));
            pts.push((g.points() as f64, err));
            last = Some((g.points(), err));
        }
        fig = fig.line(name, pts);
    }
    out.csv(
        "op_check.csv",
        &["points", "spacing", "core", "rel_l2_error", "observed_order"],
        &rows,
    )?;
    out.plot("op_check.svg", &fig);
    Ok(lines)
}

fn table_samples(t: &RadialKernelTable, r_max: f64) -> Vec<(f64, f64)> {
    t.radii()
        .iter()
        .zip(t.values())
        .filter(|(r, _)| **r <= r_max)
        .map(|(r, v)| (*r, *v))
        .collect()
}

fn kernel(cfg: &RunConfig, out: &mut Output) -> Result<Vec<String>> {
    let pr = Problem::from_config(cfg)?;
    let g = problem::grid(cfg, pr.dim, "half_width", cfg.usize("points")?)?;
    let kind = cfg.raw("kernel")?.to_string();
    let r_max = cfg.f64("r_max")?;
    let (lo, hi) = (cfg.f64("tail_lo")?, cfg.f64("tail_hi")?);
    if !(0.0 < lo && lo < hi) {
        return Err(CliError::config(format!("not 0 < tail_lo < tail_hi ({lo}, {hi})")));
    }
    let reach = r_max.max(hi);
    let (samples, edges) = match kind.as_str() {
        "bessel-potential" | "poisson" | "comparison" | "jump" => {
            let table = match kind.as_str() {
                "bessel-potential" => bessel_potential_table(cfg.f64("alpha")?, &g)?,
                "poisson" => PoissonKernel::calibrated(pr.dim, pr.m, pr.s)?.table(&g, cfg.f64("height")?)?,
                "comparison" => {
                    let spec = ComparisonKernelSpec::new(pr.m, pr.s, cfg.f64("v1")?, cfg.f64("margin")?)?;
                    ComparisonKernel::on_grid(spec, &g, DEFAULT_TIME_NODES)?.table
                }
                _ => JumpKernel::new(pr.dim, pr.m, pr.s)?.table(&g)?,
            };
            (table_samples(&table, reach), Some(table.boundary_mismatch()))
        }
        "levy" => {
            let h = g.spacing();
            let n = (reach / h).floor() as usize;
            let pts = (1..=n)
                .map(|k| {
                    let r = k as f64 * h;
                    Ok((r, levy_measure(r, pr.m, pr.s, pr.dim)?))
                })
                .collect::<Result<Vec<_>>>()?;
            (pts, None)
        }
        "density" => {
            let p = relativistic_density(&g, cfg.f64("time")?, pr.m, pr.s)?;
            let d = pr.dim;
            let pts = p
                .values()
                .iter()
                .enumerate()
                .filter_map(|(i, v)| {
                    let x = g.point(i);
                    (x[0] >= 0.0 && x[0] <= reach && x[1..d].iter().all(|c| *c == 0.0)).then_some((x[0], *v))
                })
                .collect();
            (pts, None)
        }
        other => {
            return Err(CliError::config(format!(
                "key `kernel`: unknown kernel `{other}` (bessel-potential, poisson, comparison, jump, levy, density)"
            )))
        }
    };
    let dump: Vec<Vec<Cell>> = samples.iter().filter(|(r, _)| *r <= r_max).map(|(r, v)| row![*r, *v]).collect();
    out.csv("kernel.csv", &["r", "value"], &dump)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .filter(|(r, v)| (lo..=hi).contains(r) && *v > 0.0)
        .map(|(r, v)| (*r, v.ln()))
        .unzip();
    let fit = fit_line(&xs, &ys)
        .filter(|_| xs.len() >= 3)
        .ok_or_else(|| CliError::config(format!("tail window [{lo}, {hi}] holds fewer than three positive samples")))?;
    let edge = |e: Option<f64>| e.map_or(String::new(), crate::format::number);
    out.csv(
        "kernel_tail.csv",
        &[
            "kernel",
            "tail_lo",
            "tail_hi",
            "samples",
            "rate",
            "amplitude",
            "r_squared",
            "small_edge_mismatch",
            "large_edge_mismatch",
        ],
        &[row![
            kind.as_str(),
            lo,
            hi,
            xs.len(),
            -fit.slope,
            fit.intercept.exp(),
            fit.r_squared,
            edge(edges.map(|e| e.0)),
            edge(edges.map(|e| e.1))
        ]],
    )?;
    let fig = Figure::new(&format!("{kind} kernel"), "r", "value")
        .log_y()
        .line(&kind, samples.iter().copied().filter(|(r, _)| *r <= r_max).collect())
        .line(
            "tail fit",
            [lo, hi].iter().map(|&r| (r, (fit.intercept + fit.slope * r).exp())).collect(),
        );
    out.plot("kernel.svg", &fig);
    let mut lines = vec![format!(
        "{kind}: tail rate {:.6} on [{lo}, {hi}], R^2 {:.6}",
        -fit.slope, fit.r_squared
    )];
    if let Some((a, b)) = edges {
        lines.push(format!("asymptotic-law mismatch at the table edges: small r {a:.3e}, large r {b:.3e}"));
    }
    Ok(lines)
}

fn extend_check(cfg: &RunConfig, out: &mut Output) -> Result<Vec<String>> {
    let pr = Problem::from_config(cfg)?;
    let g = problem::grid(cfg, pr.dim, "half_width", cfg.usize("points")?)?;
    let u = problem::datum(cfg.raw("datum")?, g)?;
    let q = cfg.f64("mesh_exponent")?;
    let height = match cfg.raw("mesh_height")? {
        "auto" => 10.0 / pr.m,
        _ => cfg.f64("mesh_height")?,
    };
    let sizes = cfg.list_usize("mesh_points")?;
    let meshes = sizes
        .iter()
        .map(|&c| GradedMesh::new(height, c, q))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let sigma = trace_constant(pr.s)?;
    let target_trace = apply_fourier(&u, pr.m, pr.s)?.scaled(sigma);
    let target_energy = sigma * hs_norm(&u, pr.m, pr.s)?.powi(2);
    let results = meshes
        .par_iter()
        .map(|mesh| {
            let ext = extend_spectral(&u, pr.m, pr.s, mesh)?;
            let trace = trace_derivative(&ext, pr.s)?.relative_l2_error(&target_trace);
            let energy = (xs_norm(&ext, pr.m)?.powi(2) / target_energy - 1.0).abs();
            Ok((mesh.count(), trace, energy))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<Cell>> = results
        .iter()
        .map(|&(c, t, e)| row![c, q, height, t, e])
        .collect();
    out.csv(
        "extend_check.csv",
        &["mesh_points", "mesh_exponent", "mesh_height", "trace_rel_error", "energy_rel_error"],
        &rows,
    )?;
    let fig = Figure::new("trace identity and energy equality", "mesh points", "relative error")
        .log_y()
        .line("trace", results.iter().map(|r| (r.0 as f64, r.1)).collect())
        .line("energy", results.iter().map(|r| (r.0 as f64, r.2)).collect());
    out.plot("extend_check.svg", &fig);
    Ok(results
        .iter()
        .map(|(c, t, e)| format!("M = {c:>5}: trace error {t:.3e}, energy error {e:.3e}"))
        .collect())
}

/// Samples of u along the first axis through `center`, for profile plots.
fn axis_profile(u: &GridField, center: &[f64]) -> Vec<(f64, f64)> {
    let g = u.spec();
    let d = g.dim();
    u.values()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let p = g.point(i);
            (1..d)
                .all(|a| (p[a] - center[a]).abs() < 0.5 * g.spacing())
                .then_some((p[0], *v))
        })
        .collect()
}

fn argmax_point(u: &GridField) -> Vec<f64> {
    let g = u.spec();
    g.point(u.argmax())[..g.dim()].to_vec()
}

fn ground(cfg: &RunConfig, out: &mut Output) -> Result<Vec<String>> {
    let pr = Problem::from_config(cfg)?;
    let g = problem::grid(cfg, pr.dim, "half_width", cfg.usize("points")?)?;
    let nl = problem::nonlinearity(cfg, &pr)?;
    let solver = problem::solver(cfg)?;
    let window = problem::window(cfg)?;
    let mu = cfg.f64("mu")?;
    if !(mu > -pr.m2s()) {
        return Err(CliError::config(format!("mu <= -m^{{2s}} (mu = {mu}, m^{{2s}} = {})", pr.m2s())));
    }
    let starts = cfg.usize("starts")?;
    let seed = cfg.u64("seed")?;
    let base = ground_state(mu, &nl, pr.m, pr.s, g, None, &solver)
        .map_err(|e| keep_history(out, "residual_history.csv", e))?;
    out.csv("residual_history.csv", &["iteration", "residual"], &history_rows(&base.history))?;
    let spread = (g.half_width() / 4.0).min(5.0);
    let others: Vec<std::result::Result<Solution, CoreError>> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64 + 1);
            let init = problem::random_bumps(g, &mut rng, spread);
            ground_state(mu, &nl, pr.m, pr.s, g, Some(&init), &solver)
        })
        .collect();
    let d = base.energy();
    let mut rows = vec![row![
        "default",
        d,
        0.0,
        base.point.residual,
        base.iterations,
        base.field().min(),
        base.negative_part,
        "ok"
    ]];
    let mut failed = 0;
    let mut spread_max: f64 = 0.0;
    for (k, r) in others.into_iter().enumerate() {
        match r {
            Ok(sol) => {
                let rel = (sol.energy() / d - 1.0).abs();
                spread_max = spread_max.max(rel);
                rows.push(row![
                    format!("random-{k}"),
                    sol.energy(),
                    rel,
                    sol.point.residual,
                    sol.iterations,
                    sol.field().min(),
                    sol.negative_part,
                    "ok"
                ]);
            }
            Err(e) => {
                failed += 1;
                let name = format!("residual_history_start_{k}.csv");
                let e = keep_history(out, &name, e);
                rows.push(row![format!("random-{k}"), "", "", "", "", "", "", e.to_string()]);
            }
        }
    }
    out.csv(
        "starts.csv",
        &[
            "start",
            "energy",
            "rel_diff_to_default",
            "residual",
            "iterations",
            "min_value",
            "negative_part",
            "status",
        ],
        &rows,
    )?;
    let center = argmax_point(base.field());
    let fit = decay_fit(base.field(), &center, window.0, window.1)?;
    out.field("ground_state.rfgf", base.field())?;
    out.field("ground_state.csv", base.field())?;
    let summary = [
        ("mu", Cell::from(mu)),
        ("energy", d.into()),
        ("residual", base.point.residual.into()),
        ("iterations", base.iterations.into()),
        ("linf", base.field().max_abs().into()),
        ("min_value", base.field().min().into()),
        ("negative_part", base.negative_part.into()),
        ("random_starts", starts.into()),
        ("failed_starts", failed.into()),
        ("max_rel_spread", spread_max.into()),
        ("decay_rate", fit.rate.into()),
        ("decay_amplitude", fit.amplitude.into()),
        ("decay_r_squared", fit.r_squared.into()),
        ("power_exponent", fit.power_exponent.into()),
        ("power_r_squared", fit.power_r_squared.into()),
        ("exponential_wins", fit.exponential_wins().into()),
    ];
    let rows: Vec<Vec<Cell>> = summary.into_iter().map(|(k, v)| vec![Cell::from(k), v]).collect();
    out.csv("summary.csv", &["quantity", "value"], &rows)?;
    let profile = axis_profile(base.field(), &center);
    out.plot(
        "ground_state.svg",
        &Figure::new(&format!("ground state, mu = {mu}"), "x", "u").log_y().line("u", profile),
    );
    out.plot(
        "residual_history.svg",
        &Figure::new("descent residual", "iteration", "residual")
            .log_y()
            .line("residual", base.history.iter().enumerate().map(|(i, r)| (i as f64, *r)).collect()),
    );
    let lines = vec![
        format!("d_mu = {d:.12} (residual {:.2e}, {} iterations)", base.point.residual, base.iterations),
        format!("{starts} random starts, {failed} failed, max relative spread {spread_max:.2e}"),
        format!(
            "decay on [{}, {}]: rate {:.4}, R^2 {:.5} (power law R^2 {:.5})",
            window.0, window.1, fit.rate, fit.r_squared, fit.power_r_squared
        ),
    ];
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} of {starts} random starts failed")));
    }
    Ok(lines)
}

pub(crate) struct SweepSetup {
    pub pr: Problem,
    pub nl: relfrac_core::variational::Nonlinearity,
    pub pot: relfrac_core::variational::PotentialSpec,
    pub pen: relfrac_core::variational::PenalizationParams,
    pub sw: relfrac_core::variational::SweepConfig,
}

impl SweepSetup {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let pr = Problem::from_config(cfg)?;
        let nl = problem::nonlinearity(cfg, &pr)?;
        let pot = problem::potential(cfg, &pr)?;
        let pen = problem::penalization(cfg, &pr, &pot, &nl)?;
        let sw = problem::sweep(cfg, &pr)?;
        for &e in &sw.eps {
            sw.policy.grid_for(e, &pot)?;
        }
        Ok(Self { pr, nl, pot, pen, sw })
    }

    pub fn eps_decreasing(&self) -> Vec<f64> {
        let mut eps = self.sw.eps.clone();
        eps.sort_by(|a, b| b.total_cmp(a));
        eps
    }

    fn ground(&self, out: &mut Output) -> Result<Solution> {
        base_ground_state(&self.pot, &self.nl, self.pr.m, self.pr.s, &self.sw)
            .map_err(|e| keep_history(out, "residual_history_ground.csv", e))
    }
}

fn sweep(cfg: &RunConfig, out: &mut Output) -> Result<Vec<String>> {
    let st = SweepSetup::from_config(cfg)?;
    let ground = st.ground(out)?;
    let d = ground.energy();
    let eps = st.eps_decreasing();
    let results: Vec<std::result::Result<SweepRecord, CoreError>> = eps
        .par_iter()
        .map(|&e| sweep_point(e, &st.pot, &st.pen, &st.nl, st.pr.m, st.pr.s, &st.sw, ground.field()))
        .collect();
    let mut rows = Vec::new();
    let mut lines = vec![format!("d_V(0) = {d:.12}, switch height a = {:.6}", st.pen.a)];
    let mut failures = Vec::new();
    let mut profiles = Figure::new("penalized solutions", "x", "u").log_y();
    let mut gaps = Vec::new();
    for (&e, r) in eps.iter().zip(results) {
        match r {
            Ok(rec) => {
                let (rate, r2, pexp, pr2, wins) = match &rec.decay {
                    Ok(f) => (f.rate, f.r_squared, f.power_exponent, f.power_r_squared, f.exponential_wins().to_string()),
                    Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN, "error".to_string()),
                };
                let gap = rec.energy - d;
                gaps.push((e, gap.abs()));
                rows.push(row![
                    e,
                    rec.grid.half_width(),
                    rec.grid.points(),
                    rec.energy,
                    gap,
                    join(&rec.argmax),
                    rec.potential_at_max,
                    rec.well_distance,
                    rec.sup_outside,
                    rec.below_switch,
                    rec.linf,
                    rate,
                    r2,
                    pexp,
                    pr2,
                    wins,
                    join(&rec.barycenter),
                    rec.residual,
                    rec.unpenalized_residual,
                    rec.iterations,
                    rec.negative_part,
                    "ok"
                ]);
                lines.push(format!(
                    "eps {e:<5}: c - d = {gap:.4e}, dist {:.2e}, sup outside {:.3e}{}, decay R^2 {r2:.5}",
                    rec.well_distance,
                    rec.sup_outside,
                    if rec.below_switch { " < a" } else { " >= a" }
                ));
                out.field(&format!("solution_eps_{e}.rfgf"), &rec.solution)?;
                profiles = profiles.line(&format!("eps = {e}"), axis_profile(&rec.solution, &rec.argmax));
            }
            Err(err) => {
                let err = keep_history(out, &format!("residual_history_eps_{e}.csv"), err);
                let mut r = row![e];
                r.extend((0..20).map(|_| Cell::from("")));
                r.push(Cell::from(err.to_string()));
                rows.push(r);
                lines.push(format!("eps {e:<5}: failed: {err}"));
                failures.push(e);
            }
        }
    }
    out.csv(
        "sweep.csv",
        &[
            "eps",
            "half_width",
            "points",
            "energy",
            "gap",
            "argmax",
            "potential_at_max",
            "well_distance",
            "sup_outside",
            "below_switch",
            "linf",
            "decay_rate",
            "decay_r_squared",
            "power_exponent",
            "power_r_squared",
            "exponential_wins",
            "barycenter",
            "residual",
            "unpenalized_residual",
            "iterations",
            "negative_part",
            "status",
        ],
        &rows,
    )?;
    out.csv(
        "sweep_ground.csv",
        &["quantity", "value"],
        &[
            row!["energy", d],
            row!["linf", ground.field().max_abs()],
            row!["residual", ground.point.residual],
            row!["kappa", st.pen.kappa],
            row!["switch_height", st.pen.a],
        ],
    )?;
    out.plot("sweep_profiles.svg", &profiles);
    out.plot(
        "sweep_gap.svg",
        &Figure::new("energy gap", "eps", "|c_eps - d|").log_y().markers("gap", gaps),
    );
    if !failures.is_empty() {
        return Err(CliError::Failed(format!("sweep failed at eps = {failures:?}")));
    }
    Ok(lines)
}

fn barycenter_check(cfg: &RunConfig, out: &mut Output) -> Result<Vec<String>> {
    let st = SweepSetup::from_config(cfg)?;
    let zs = cfg.points("well_points", st.pr.dim)?;
    for z in &zs {
        let dist = st.pot.distance_to_well(z);
        if dist > 0.0 {
            return Err(CliError::config(format!("well point {z:?} outside the well set (distance {dist})")));
        }
    }
    let ground = st.ground(out)?;
    let d = ground.energy();
    let eps = st.eps_decreasing();
    let tables = zs
        .par_iter()
        .map(|z| {
            eps.iter()
                .map(|&e| {
                    let grid: GridSpec = st.sw.policy.grid_for(e, &st.pot)?;
                    let w = embed_centered(ground.field(), grid)?;
                    let model = EnergyModel::penalized(grid, e, &st.pot, &st.pen, st.nl, st.pr.m, st.pr.s)?;
                    let phi = make_phi(&model, &w, z, e, st.sw.delta)?;
                    let b = barycenter(&phi.u, e, st.sw.rho)?;
                    let drift = b.iter().zip(z).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                    Ok((e, phi.energy, phi.scaling, b, drift))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut lines = vec![format!("d_V(0) = {d:.12}")];
    let mut fig = Figure::new("test-function energy gap", "eps", "J - d").log_y();
    for (z, table) in zs.iter().zip(&tables) {
        for (e, energy, t, b, drift) in table {
            rows.push(row![join(z), *e, *energy, energy - d, *t, (t - 1.0).abs(), join(b), *drift]);
        }
        let last = table.last().expect("eps list is nonempty");
        lines.push(format!(
            "z = {:<6}: at eps {} gap {:.3e}, |t - 1| {:.3e}, drift {:.3e}",
            join(z),
            last.0,
            last.1 - d,
            (last.2 - 1.0).abs(),
            last.4
        ));
        fig = fig.line(&format!("z = {}", join(z)), table.iter().map(|r| (r.0, r.1 - d)).collect());
    }
    out.csv(
        "barycenter.csv",
        &["z", "eps", "energy", "gap", "scaling", "scaling_error", "barycenter", "drift"],
        &rows,
    )?;
    out.plot("barycenter_gap.svg", &fig);
    Ok(lines)
}

fn paper_suite(cfg: &RunConfig, out: &mut Output) -> Result<Vec<String>> {
    let ids = cfg.list_usize("criteria")?;
    for &id in &ids {
        if !(1..=suite::CRITERIA).contains(&id) {
            return Err(CliError::config(format!("criterion {id} outside 1..={}", suite::CRITERIA)));
        }
    }
    let seed = cfg.u64("seed")?;
    let outcomes: Vec<suite::Outcome> = ids.iter().map(|&id| suite::run(id, seed)).collect();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for o in &outcomes {
        rows.push(row![o.id, o.title, o.status().label(), o.budget.as_secs() as usize, o.note.unwrap_or("")]);
        for c in &o.checks {
            checks.push(row![o.id, c.name.as_str(), c.value, c.bound.as_str(), c.state.label()]);
        }
    }
    out.csv("suite.csv", &["criterion", "title", "status", "budget_seconds", "note"], &rows)?;
    out.csv("suite_checks.csv", &["criterion", "check", "value", "bound", "state"], &checks)?;
    let lines: Vec<String> = outcomes.iter().map(suite::Outcome::line).collect();
    let failing: Vec<usize> = outcomes
        .iter()
        .filter(|o| o.status() != suite::Status::Pass)
        .map(|o| o.id)
        .collect();
    if !failing.is_empty() {
        for l in &lines {
            println!("{l}");
        }
        return Err(CliError::Failed(format!("criteria {failing:?} did not pass")));
    }
    Ok(lines)
}
