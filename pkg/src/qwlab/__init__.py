"""Quantized random walk laboratory.

Classical hitting times of absorbing Markov chains, the Szegedy quantization
and its discriminant spectral theory, query-counted walk search algorithms,
asymptotic cost-model optimization, and adversary-method lower bounds.
"""

__version__ = "0.1.0"

from . import adversary, costlab, markov, numkernel, szegedy, walksim
from .numkernel import SeededRng

__all__ = [
    "SeededRng",
    "__version__",
    "adversary",
    "costlab",
    "markov",
    "numkernel",
    "szegedy",
    "walksim",
]
