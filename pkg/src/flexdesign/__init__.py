"""Capacity design of linear networks for stochastic flexibility.

The package estimates how often a network can absorb random demands
(the sample flexibility ``SF_K``) and chooses capacity expansions that trade
design cost against flexibility, either exactly with binary scenario
indicators or through a continuous relaxation followed by rounding.
"""

from .design import (
    DEFAULT_U,
    ComparisonReport,
    Direction,
    Mode,
    ParetoPoint,
    ScenarioProgram,
    build_scenario_program,
    compare_fronts,
    enumerate_design_optimum,
    pareto_sweep,
    screen_scenarios,
    solve_design_continuous,
    solve_design_min_cost,
    solve_design_mip,
)
from .flexibility import (
    estimate_sf,
    feasibility_milp,
    aggregated_feasibility_milp,
    feasible_center,
    mean_infeasibility,
    psi,
)
from .io import load_case, parse_matpower_case, parse_network_file, serialize_network
from .lp import LinearProgram, LpSolution, LpStatus, SolverOptions, solve_lp, verify_solution
from .milp import MilpOptions, MilpSolution, MilpStatus, MixedIntegerProgram, lp_bound, solve_milp
from .model import Arc, CostSpec, Demand, DesignVector, Network, Supplier, cost, expanded_capacities, validate_network
from .sampling import GaussianSpec, SampleSet, cholesky_factor, draw_samples, empirical_moments

__version__ = "0.1.0"
