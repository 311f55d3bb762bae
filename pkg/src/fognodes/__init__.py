"""Optimum number of fog nodes in cloud-fog-thing networks."""
from .geometry import (
    Placement,
    bpp_distance_moment,
    center_distance_moment,
    empirical_moment,
    fog_range,
    make_rng,
    sample_placement,
)
from .model import (
    ConfigError,
    NetworkConfig,
    OptimizationResult,
    OutOfModelError,
    derived_quantities,
    dump_config,
    load_config,
)
from .optimizer import (
    ObjectiveProfile,
    analytic_p,
    inverse_sizing,
    numeric_p,
    objective_derivatives,
    objective_value,
    optimize,
)
from .simulator import (
    LinkBudget,
    RateRatioReport,
    SimulationError,
    SingularityError,
    average_rate,
    average_rates,
    link_budget,
    rate_ratio_experiment,
)

__version__ = "0.1.0"
