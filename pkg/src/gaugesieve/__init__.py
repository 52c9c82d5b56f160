"""Lattice sieving under asymmetric polytope gauges.

Gauge machinery for near-symmetric semi-norms, an AKS-style sieve for the
subspace avoiding problem, CVP via a one-dimension lift, and approximate
integer programming built on top, together with brute-force enumeration
oracles for small dimensions.
"""

from gaugesieve.geometry import (
    CenteredPolytope,
    GaugeValue,
    barycenter_approx,
    estimate_gamma,
    gauge,
    gauge_exact,
    gauge_star,
    intersect_with_negation,
    recenter,
)
from gaugesieve.lattice import LatticeBasis, Subspace, in_lattice, in_subspace, mod_basis
from gaugesieve.report import BudgetExhausted, SolveReport, SolveStatus
from gaugesieve.sieve import SieveConfig, approx_sap, exact_sap, short_vectors
from gaugesieve.cvp import approx_cvp, exact_cvp, lift
from gaugesieve.ip import approx_ip, approx_opt, blowup_membership

__all__ = [
    "BudgetExhausted",
    "CenteredPolytope",
    "GaugeValue",
    "LatticeBasis",
    "SieveConfig",
    "SolveReport",
    "SolveStatus",
    "Subspace",
    "approx_cvp",
    "approx_ip",
    "approx_opt",
    "approx_sap",
    "barycenter_approx",
    "blowup_membership",
    "estimate_gamma",
    "exact_cvp",
    "exact_sap",
    "gauge",
    "gauge_exact",
    "gauge_star",
    "in_lattice",
    "in_subspace",
    "intersect_with_negation",
    "lift",
    "mod_basis",
    "recenter",
    "short_vectors",
]
