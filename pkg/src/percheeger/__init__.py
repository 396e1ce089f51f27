"""Isoperimetry of supercritical bond percolation on the discrete torus.

Sample configurations, compute the Cheeger constant of the giant component
exactly or heuristically, measure single-edge sensitivity, evaluate the
typicality events, and run seeded Monte Carlo campaigns.
"""
from .torus import TorusSpec, edge_endpoints, incident_edges, vertex_coords, vertex_index
from .percolation import (
    ClusterDecomposition,
    Configuration,
    GiantComponent,
    cluster_decomposition,
    giant_component,
    sample_configuration,
    symmetric_difference_size,
)
from .flips import FlipCase, classify_case, extremal_pair, flip, grad
from .cuts import (
    CheegerResult,
    CutSet,
    ExactRatio,
    GuardViolation,
    IsoProfileResult,
    PhiUndefined,
    boundary_size,
    cheeger_brute,
    cheeger_exact,
    cheeger_heuristic,
    epsilon_n,
    iso_profile,
    psi,
)
from .events import EventConstants, EventReport, check_events, verify_gradient_claim
from .experiments import (
    ExperimentPlan,
    estimate_event_probabilities,
    gradient_tail_summary,
    run_variance_experiment,
    talagrand_diagnostic,
)

__version__ = "0.1.0"
