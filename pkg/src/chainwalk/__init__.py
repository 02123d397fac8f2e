"""Chain of height-constrained random walkers: shape multigraph, exact
discrete Hodge decomposition, closed-form diffusivity, and Monte Carlo
verification."""

__version__ = "0.1.0"

from .errors import CapacityError, DimensionError, FieldMismatchError, SolverError
from .fields import (
    DEFAULT_TOLERANCE,
    EXACT,
    FLOAT,
    EdgeField,
    FacetFluxSystem,
    Potential,
    SigmaSquared,
    base_potentials,
    closed_form_increments,
    closed_form_potential,
    divergence,
    facet_flux_system,
    fields_table_csv,
    flux,
    gradient,
    hodge_decompose,
    inner_product,
    is_stationary,
    phi_profiles,
    sigma_squared_closed_form,
    sigma_squared_exact,
    solve_facet_flux_system,
    step_field,
)
from .graph import (
    DEFAULT_MAX_K,
    HARD_MAX_K,
    DegreeProfile,
    Shape,
    ShapeGraph,
    SignedEdge,
    build_graph,
    build_graph_inductive,
    degree_profile,
    edge_sign,
    graph_to_json_dict,
)
from .sim import (
    GraphWalkState,
    SimEstimate,
    Trajectory,
    WalkerState,
    chain_step,
    estimate_sigma2,
    graph_walk_step,
    martingale_residuals,
    shape_of,
    simulate_trajectory,
    stationary_distribution,
    trajectory_csv,
    transition_kernel,
    walker_from_shape,
    walker_successors,
)
from .verify import CheckResult, check_names, run_checks

__all__ = [
    "__version__",
    "CapacityError",
    "DimensionError",
    "FieldMismatchError",
    "SolverError",
    "Shape",
    "SignedEdge",
    "ShapeGraph",
    "DegreeProfile",
    "DEFAULT_MAX_K",
    "HARD_MAX_K",
    "build_graph",
    "build_graph_inductive",
    "degree_profile",
    "edge_sign",
    "graph_to_json_dict",
    "EXACT",
    "FLOAT",
    "DEFAULT_TOLERANCE",
    "EdgeField",
    "Potential",
    "FacetFluxSystem",
    "SigmaSquared",
    "step_field",
    "gradient",
    "divergence",
    "inner_product",
    "flux",
    "is_stationary",
    "hodge_decompose",
    "closed_form_increments",
    "closed_form_potential",
    "base_potentials",
    "phi_profiles",
    "facet_flux_system",
    "solve_facet_flux_system",
    "sigma_squared_exact",
    "sigma_squared_closed_form",
    "fields_table_csv",
    "WalkerState",
    "GraphWalkState",
    "SimEstimate",
    "Trajectory",
    "shape_of",
    "walker_from_shape",
    "walker_successors",
    "chain_step",
    "graph_walk_step",
    "stationary_distribution",
    "transition_kernel",
    "martingale_residuals",
    "estimate_sigma2",
    "simulate_trajectory",
    "trajectory_csv",
    "CheckResult",
    "check_names",
    "run_checks",
]
