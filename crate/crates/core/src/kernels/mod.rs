//! Named kernels: Poisson kernel of the extension, Bessel potentials,
//! relativistic stable densities, the Lévy measure and the comparison
//! kernel used in decay estimates.

mod bessel_potential;
mod comparison;
mod density;
mod poisson;
mod table;

pub use bessel_potential::{
    bessel_potential_kernel, bessel_potential_table, large_r_law as bessel_potential_large_r_law,
    origin_rule as bessel_potential_origin_rule, small_r_law as bessel_potential_small_r_law,
};
pub use comparison::{
    comparison_kernel, fit_split_bound, log_time_nodes, ComparisonKernel, ComparisonKernelSpec, SplitBound,
    DEFAULT_TIME_NODES, TIME_FLOOR,
};
pub use density::{
    density_envelope, heat_kernel, levy_measure, relativistic_density, relativistic_density_half,
    shift_to_physical, RESOLUTION_TOLERANCE,
};
pub use poisson::{poisson_kernel, PoissonKernel, CALIBRATION_HEIGHT};
pub use table::{ExpPowerLaw, OriginRule, PowerLaw, RadialKernelTable};
