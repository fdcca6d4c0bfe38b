"""Balanced load allocations on finite hypergraphs and their random limits."""

from hyperbalance._kernels import BACKEND as KERNEL_BACKEND
from hyperbalance.hypergraph import (
    Ball,
    Hypergraph,
    HypergraphError,
    MultiHypergraph,
    ball,
    canonical_code,
    degree,
    is_hypertree,
    parse_baseload,
    parse_hypergraph,
    truncate,
)
from hyperbalance.balance import (
    Allocation,
    BalanceReport,
    ConvergenceError,
    SolveParams,
    balance,
    epsilon_balance,
    loads,
    mean_excess_finite,
    rebalance_edge,
    response_epsilon,
    variational_gap,
    verify_balanced,
)
from hyperbalance.trees import response_inverse, root_load_exceeds, tree_loads
from hyperbalance.maxload import (
    DensityResult,
    max_density_bruteforce,
    max_density_flow,
    rho_finite,
)
from hyperbalance.sampling import (
    TypeDistribution,
    TypeVector,
    draw_type_sequence,
    erase,
    parse_type_distribution,
    sample_config,
    sample_gwt_k,
    sample_ugwt,
    size_biased,
)
from hyperbalance.census import (
    Census,
    NON_TREE_KEY,
    explore,
    neighborhood_census,
    tv_distance,
    ugwt_census,
)
from hyperbalance.population import (
    RDEParams,
    RDEPool,
    mean_excess,
    rde_iterate,
    rde_solve,
    rho_limit,
)

__version__ = "0.1.0"
