"""Stable matchings that survive preference changes."""

from .da import deferred_acceptance, firm_optimal_robust, worker_optimal_robust
from .instance import Instance, Matching, MatchingSet, classify_pair, generate_pair, is_stable
from .io import parse_instance, serialize_instance
from .rotations import build_rotation_poset, enumerate_lattice
from .xp import robust_xp_decide, robust_xp_enumerate

__all__ = [
    "Instance",
    "Matching",
    "MatchingSet",
    "classify_pair",
    "generate_pair",
    "is_stable",
    "parse_instance",
    "serialize_instance",
    "deferred_acceptance",
    "worker_optimal_robust",
    "firm_optimal_robust",
    "build_rotation_poset",
    "enumerate_lattice",
    "robust_xp_decide",
    "robust_xp_enumerate",
]
