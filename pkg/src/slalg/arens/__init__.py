"""Repeated limits, Arens-product pairings, witnesses and the classifier."""

from .classify import Classification, classify
from .dtc import DTCReport, dtc_demo
from .iterated import IteratedLimitResult, LimitConfig, estimate_limit, iterated_limit
from .regularity import (
    CrawYoungWitness,
    ZeroClusterResult,
    arens_pairing,
    craw_young_witness,
    omega_fn,
    omega_kernel,
    pairing_kernel,
    separating_functional,
    zero_cluster_test,
)
from .sequences import SequenceSpec, calkin_wilf

__all__ = [
    "Classification",
    "CrawYoungWitness",
    "DTCReport",
    "IteratedLimitResult",
    "LimitConfig",
    "SequenceSpec",
    "ZeroClusterResult",
    "arens_pairing",
    "calkin_wilf",
    "classify",
    "craw_young_witness",
    "dtc_demo",
    "estimate_limit",
    "iterated_limit",
    "omega_fn",
    "omega_kernel",
    "pairing_kernel",
    "separating_functional",
    "zero_cluster_test",
]
