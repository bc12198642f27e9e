"""Mean-field condensation dynamics.

Everything lives in the compiled core: the interacting particle
simulation, the deterministic slow-profile flow, the cluster diffusion
with its exact square-root-diffusion transitions, stick-breaking
samplers, and the closed moment hierarchy used as an oracle. This
package re-exports the public surface.
"""

from ._core import (
    ConfigError,
    ModelParams,
    RateSpec,
    __version__,
    beta_bar,
    beta_of_y,
    canonical_config,
    default_stick_count,
    drift_b,
    fixed_point_ybar,
    gamma_closed_form_A1,
    gamma_of_y,
    integrate_flow,
    long_time_gamma,
    pd_moment,
    phi_m,
    rho_crit,
    run_config,
    run_wf_moments,
    sample_pd,
    simulate_ip,
    solve_hierarchy,
    stick_break_weights,
    theta_of_y,
    u1,
    u2,
)

__all__ = [
    "ConfigError",
    "ModelParams",
    "RateSpec",
    "__version__",
    "beta_bar",
    "beta_of_y",
    "canonical_config",
    "default_stick_count",
    "drift_b",
    "fixed_point_ybar",
    "gamma_closed_form_A1",
    "gamma_of_y",
    "integrate_flow",
    "long_time_gamma",
    "pd_moment",
    "phi_m",
    "rho_crit",
    "run_config",
    "run_wf_moments",
    "sample_pd",
    "simulate_ip",
    "solve_hierarchy",
    "stick_break_weights",
    "theta_of_y",
    "u1",
    "u2",
]
