"""Production and network formation games with heterogeneous content.

Users choose how much content to produce and whom to subscribe to; content
is shared across friendships and aggregated with a CES index.  The package
computes exact best responses, verifies strict equilibria, maps the link
costs that sustain symmetric equilibria, searches for asymmetric ones, and
computes the social optimum with the prices that make it an equilibrium.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .audit import CheckResult, audit_passed, structural_audit
from .equilibrium import (
    BestResponse,
    Classification,
    DeviationWitness,
    EquilibriumReport,
    GammaInterval,
    GammaTable,
    best_response,
    classify_profile,
    equilibrium_gamma_range,
    gamma_region,
    gamma_region_table,
    production_fixed_point,
    symmetric_equilibrium_degrees,
    verify_strict_nash,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    InvalidProfileError,
    NoRootError,
    NumericError,
    PNFError,
    SolverError,
    TopologyError,
)
from .model import (
    BenefitSpec,
    FriendGraph,
    GameConfig,
    PricingScheme,
    StrategyProfile,
    SymmetricProfile,
    content_utility,
    friend_closure,
    marginal_benefit,
    perceived_content,
    priced_utility,
    social_welfare,
    symmetric_welfare,
    utility,
)
from .numerics import (
    SolverSettings,
    best_production,
    delta_q,
    delta_r,
    max_production,
    planner_production,
    solve_decreasing_root,
    symmetric_production,
)
from .search import SearchResult, influencer_scaling, search_equilibrium
from .topology import make_topology
from .welfare import (
    SocialOptimum,
    optimal_prices,
    social_optimum,
    verify_priced_equilibrium,
    welfare_gap,
)
