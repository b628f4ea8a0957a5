"""Deterministic statistical numerics consumed by every other module."""

from ._backend import backend_name, kernels
from .dists import DistSpec, cdf, quantile, two_tailed_p
from .fisher import FisherResult, fisher_exact_2x2
from .huber import RobustFit, huber_iwls
from .kendall import kendall_tau_b

__all__ = [
    "DistSpec",
    "FisherResult",
    "RobustFit",
    "backend_name",
    "cdf",
    "fisher_exact_2x2",
    "huber_iwls",
    "kendall_tau_b",
    "kernels",
    "quantile",
    "two_tailed_p",
]
