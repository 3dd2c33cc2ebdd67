//! Thermodynamic quantities available in closed form or through
//! low-dimensional numerical solves.

pub mod airy;
mod crit;
mod field;
mod mgf;
mod mu;
mod params;
mod rate;
mod tilt;
mod wulff;

pub use crit::{crit_constants, excursion_area_cube_root_mean, excursion_area_density, CritConstants};
pub use field::{sample_xi, trapezoid_weights, variance_function, xi_field, GaussianFieldSpec};
pub use mgf::{log_mgf, log_mgf_direct, log_mgf_unchecked};
pub use mu::{mu_beta, mu_prob, sample_mu_beta};
pub(crate) use mu::sample_mu;
pub use params::{beta_c, model_params, x_critical, ModelParams};
pub use rate::{a_beta, g_tilde, g_tilde_expanded, g_tilde_prime, rho};
pub use tilt::{
    discrete_derivatives, log_mgf_mixed, solve_tilt, solve_tilt_discrete, solve_tilt_with,
    MixedLogMgf, MixedValue, Tilt, Want,
};
pub use wulff::{wulff, WulffShape};
