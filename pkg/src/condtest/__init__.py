"""Exact and Monte Carlo conditional two-sample tests for discrete families."""

from .basis import (
    MarkovBasis,
    Move,
    admissible_moves,
    fiber_basis,
    orbit_basis,
    orbit_basis_size,
    verify_connectivity,
    verify_kernel,
)
from .exact import (
    CdfEstimate,
    DispersionReport,
    PValues,
    binomial_closed_form_cdf,
    dispersion_report,
    exact_conditional_cdf,
    orbit_cdf_exact,
    p_values,
    umpu_cdf,
    umpu_pmf,
)
from .families import FamilySpec, Scenario, builtin_family, parse_family, sample_iid
from .fiber import (
    EnumerationCapError,
    FiberGraph,
    SampleVector,
    build_fiber_graph,
    enumerate_fiber,
    fiber_cardinality,
    fiber_edge_count,
    is_bipartite,
    is_connected,
)
from .harness import (
    BiasRecord,
    ConvergenceResult,
    SummaryTable,
    TimingReport,
    convergence_trace,
    run_scenario,
    summarize,
    table3_scenarios,
    timing_report,
)
from .orbits import (
    FrequencyVector,
    OrbitRecord,
    enumerate_orbits,
    normalizing_constant,
    orbit_cardinality,
    orbit_probability,
    orbit_table,
    partition_count,
    sample_within_orbit,
    to_frequency,
)
from .samplers import (
    ChainConfig,
    ChainTrace,
    mc_replications_rule,
    mcmc_fiber_accelerated,
    mcmc_fiber_standard,
    mcmc_orbit,
    permutation_test,
)

__version__ = "0.1.0"

__all__ = [
    "BiasRecord",
    "CdfEstimate",
    "ChainConfig",
    "ChainTrace",
    "ConvergenceResult",
    "DispersionReport",
    "EnumerationCapError",
    "FamilySpec",
    "FiberGraph",
    "FrequencyVector",
    "MarkovBasis",
    "Move",
    "OrbitRecord",
    "PValues",
    "SampleVector",
    "Scenario",
    "SummaryTable",
    "TimingReport",
    "admissible_moves",
    "binomial_closed_form_cdf",
    "build_fiber_graph",
    "builtin_family",
    "convergence_trace",
    "dispersion_report",
    "enumerate_fiber",
    "enumerate_orbits",
    "exact_conditional_cdf",
    "fiber_basis",
    "fiber_cardinality",
    "fiber_edge_count",
    "is_bipartite",
    "is_connected",
    "mc_replications_rule",
    "mcmc_fiber_accelerated",
    "mcmc_fiber_standard",
    "mcmc_orbit",
    "normalizing_constant",
    "orbit_basis",
    "orbit_basis_size",
    "orbit_cardinality",
    "orbit_cdf_exact",
    "orbit_probability",
    "orbit_table",
    "p_values",
    "parse_family",
    "partition_count",
    "permutation_test",
    "run_scenario",
    "sample_iid",
    "sample_within_orbit",
    "summarize",
    "table3_scenarios",
    "timing_report",
    "to_frequency",
    "umpu_cdf",
    "umpu_pmf",
    "verify_connectivity",
    "verify_kernel",
]
