"""constlab: permutation constellations vs. sphere-packing bounds.

Builds permutation-block constellations, evaluates the analytic
error-probability and energy-loss expressions for both constellation
families, and validates them against a reproducible Monte Carlo AWGN
demodulation experiment with brute-force oracles.
"""

from .backends import COMPILED_AVAILABLE, available_backends, get_backend
from .channel import ChannelConfig, SimReport, compare_detectors, simulate
from .permutation import Constellation

__version__ = "0.1.0"

__all__ = [
    "COMPILED_AVAILABLE",
    "ChannelConfig",
    "Constellation",
    "SimReport",
    "available_backends",
    "compare_detectors",
    "get_backend",
    "simulate",
    "__version__",
]
