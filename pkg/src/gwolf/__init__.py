"""Grey wolf optimizer with its exact sampling-distribution and stability
analysis toolkit: analytic step densities, central-moment recursions, and a
reproducible Monte-Carlo verification harness."""

from .backend import BACKEND
from .core import (EvaluationError, GwoResult, LeaderTriple, run_gwo,
                   schedule_a, update_agent, update_leaders)
from .dist import (BoxD, DegenerateDistributionError, GridCurve,
                   SupportParams, count_plateau_factors, leader_step_box,
                   leader_step_cdf, leader_step_pdf, leader_step_support,
                   product_density, support_params, update_box, update_pdf)
from .moments import (MomentTrajectory, central_moment_update, coeff_a_moment,
                      coeff_c_moment, leader_spread, moment_trajectory,
                      raw_from_central, stability_bounds, uniform_offset_moment,
                      variance_attractor, variance_sequence, variance_step)
from .mcverify import (Histogram, RunReport, SimConfig, StagnationStats,
                       empirical_central_moment, ks_statistic,
                       sample_leader_step, sample_update, simulate_stagnation,
                       trapezoid_cdf)
from .objectives import Objective, make_objective

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoxD",
    "DegenerateDistributionError",
    "EvaluationError",
    "GridCurve",
    "GwoResult",
    "Histogram",
    "LeaderTriple",
    "MomentTrajectory",
    "Objective",
    "RunReport",
    "SimConfig",
    "StagnationStats",
    "SupportParams",
    "central_moment_update",
    "coeff_a_moment",
    "coeff_c_moment",
    "count_plateau_factors",
    "empirical_central_moment",
    "ks_statistic",
    "leader_spread",
    "leader_step_box",
    "leader_step_cdf",
    "leader_step_pdf",
    "leader_step_support",
    "make_objective",
    "moment_trajectory",
    "product_density",
    "raw_from_central",
    "run_gwo",
    "sample_leader_step",
    "sample_update",
    "schedule_a",
    "simulate_stagnation",
    "stability_bounds",
    "support_params",
    "trapezoid_cdf",
    "uniform_offset_moment",
    "update_agent",
    "update_box",
    "update_leaders",
    "update_pdf",
    "variance_attractor",
    "variance_sequence",
    "variance_step",
]
