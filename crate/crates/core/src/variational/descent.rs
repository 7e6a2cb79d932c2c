use alloc::format;
use alloc::vec::Vec;

use super::energy::EnergyModel;
use super::model::{Nonlinearity, PenalizationParams, PotentialSpec, Region};
use super::nehari::{nehari_project, NehariPoint};
use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop when the preconditioned residual ⟨r, Pr⟩^{1/2} drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
    /// Steps are never enlarged beyond this.
    pub max_step: f64,
    pub min_step: f64,
    /// Negative values below this magnitude are zeroed after convergence.
    pub positivity_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 5000,
            initial_step: 1.0,
            max_step: 1.0,
            min_step: 1e-10,
            positivity_tolerance: 1e-12,
        }
    }
}

/// Converged Nehari point and the descent trace.
#[derive(Debug, Clone)]
pub struct Solution {
    pub point: NehariPoint,
    pub iterations: usize,
    /// Preconditioned residual at every iterate.
    pub history: Vec<f64>,
    /// Most negative value before the positive-part cleanup, or 0.
    pub negative_part: f64,
}

impl Solution {
    pub fn energy(&self) -> f64 {
        self.point.energy
    }

    pub fn field(&self) -> &GridField {
        &self.point.u
    }
}

/// u ← proj(u − ηP∇E(u)) with backtracking on η.
pub fn nehari_descent(model: &EnergyModel, init: &GridField, cfg: &SolverConfig) -> Result<Solution> {
    let mut current = nehari_project(model, init)?;
    let mut history = Vec::new();
    let mut step = cfg.initial_step;
    let mut iterations = 0;
    loop {
        let grad = model.gradient(&current.u)?;
        let dir = model.precondition(&grad);
        let res = libm::sqrt(model.inner(&grad, &dir).max(0.0));
        history.push(res);
        if res < cfg.tolerance {
            break;
        }
        if iterations >= cfg.max_iterations {
            return Err(Error::NonConvergence {
                iterations,
                residual: res,
                history,
            });
        }
        let slack = 64.0 * f64::EPSILON * current.energy.abs();
        loop {
            let mut trial = current.u.clone();
            trial.add_scaled(-step, &dir);
            let accepted = match nehari_project(model, &trial) {
                Ok(p) if p.energy <= current.energy + slack => Some(p),
                _ => None,
            };
            if let Some(p) = accepted {
                current = p;
                step = (2.0 * step).min(cfg.max_step);
                break;
            }
            step *= 0.5;
            if step < cfg.min_step {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: res,
                    history,
                });
            }
        }
        iterations += 1;
    }
    let min = current.u.min();
    if min < -cfg.positivity_tolerance {
        return Err(Error::Positivity { min });
    }
    if min < 0.0 {
        let cleaned = current.u.map(|v| v.max(0.0));
        let energy = model.energy(&cleaned)?;
        let residual = model.dual_norm(&model.gradient(&cleaned)?);
        current = NehariPoint {
            u: cleaned,
            energy,
            residual,
            ..current
        };
    }
    Ok(Solution {
        point: current,
        iterations,
        history,
        negative_part: min.min(0.0),
    })
}

/// Positive ground state of L_μ from `init` (a centred Gaussian if absent).
pub fn ground_state(
    mu: f64,
    nl: &Nonlinearity,
    m: f64,
    s: f64,
    grid: GridSpec,
    init: Option<&GridField>,
    cfg: &SolverConfig,
) -> Result<Solution> {
    let model = EnergyModel::autonomous(grid, mu, *nl, m, s)?;
    let default;
    let start = match init {
        Some(u) => u,
        None => {
            default = centered_bump(grid);
            &default
        }
    };
    nehari_descent(&model, start, cfg)
}

pub(crate) fn centered_bump(grid: GridSpec) -> GridField {
    let d = grid.dim();
    GridField::from_raw(
        grid,
        (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                libm::exp(-p[..d].iter().map(|v| v * v).sum::<f64>())
            })
            .collect(),
    )
}

/// Checks that Λ/ε fits in the box. An unbounded Λ covers the whole box.
pub fn check_feasible(eps: f64, pot: &PotentialSpec, grid: &GridSpec) -> Result<()> {
    if pot.region == Region::Everywhere {
        return Ok(());
    }
    let reach = pot.region.extent() / eps;
    if !(reach < grid.half_width()) {
        return Err(Error::Infeasible {
            eps,
            detail: format!("Lambda/eps reaches {reach}, box half-width is {}", grid.half_width()),
        });
    }
    Ok(())
}

/// Critical point of J_ε reached by Nehari descent from `init`.
#[allow(clippy::too_many_arguments)]
pub fn solve_penalized(
    eps: f64,
    pot: &PotentialSpec,
    pen: &PenalizationParams,
    nl: &Nonlinearity,
    m: f64,
    s: f64,
    grid: GridSpec,
    init: &GridField,
    cfg: &SolverConfig,
) -> Result<Solution> {
    check_feasible(eps, pot, &grid)?;
    let model = EnergyModel::penalized(grid, eps, pot, pen, *nl, m, s)?;
    nehari_descent(&model, init, cfg)
}
