//! Penalised and autonomous energies on the trace, Nehari projection,
//! ground-state descent, the ε-sweep and its diagnostics.

mod decay;
mod descent;
mod energy;
mod model;
mod nehari;
mod phi;
mod sweep;

pub use decay::{decay_fit, DecayFit};
pub use descent::{check_feasible, ground_state, nehari_descent, solve_penalized, Solution, SolverConfig};
pub use energy::{energy_j, energy_l, gradient_j, gradient_l, EnergyModel};
pub use model::{
    penalized_big_g, penalized_g, Nonlinearity, PenalizationParams, PotentialShape, PotentialSpec, Region,
};
pub use nehari::{nehari_project, nehari_scaling, ray_energy, NehariPoint, BISECTION_STEPS, BRACKET_LIMIT};
pub use phi::{barycenter, cutoff, make_phi};
pub use sweep::{base_ground_state, epsilon_sweep, sweep_point, BoxPolicy, SweepConfig, SweepEntry, SweepRecord, SweepReport};
