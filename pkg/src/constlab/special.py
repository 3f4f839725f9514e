"""Special functions shared by the analytic constellation models."""

from __future__ import annotations

import math
import threading

import numpy as np

_SQRT2 = math.sqrt(2.0)

# Probability clamping is never silent: out-of-range values are counted here
# so callers (CLI verify, tests) can report how often rounding pushed a
# formula outside [0, 1].
_clamp_lock = threading.Lock()
_clamp_events = 0


def clamp_probability(value: float) -> float:
    """Clamp to [0, 1], counting every out-of-range event."""
    global _clamp_events
    if value < 0.0 or value > 1.0:
        with _clamp_lock:
            _clamp_events += 1
        return 0.0 if value < 0.0 else 1.0
    return value


def clamp_event_count() -> int:
    return _clamp_events


def reset_clamp_events() -> None:
    global _clamp_events
    with _clamp_lock:
        _clamp_events = 0


def q_function(x: float) -> float:
    """Upper-tail probability of the standard normal.

    Uses the complementary error function; beyond the range where
    erfc stays a normal float a Mills-ratio continued fraction takes
    over so the extreme tail keeps full relative accuracy.
    """
    if not math.isfinite(x):
        raise ValueError(f"q_function requires finite x, got {x}")
    if x < 37.0:
        return 0.5 * math.erfc(x / _SQRT2)
    # Mills ratio R(x) = Q(x)/phi(x) via Lentz continued fraction:
    # R = 1/(x + 1/(x + 2/(x + 3/(...))))
    r = 0.0
    for k in range(60, 0, -1):
        r = k / (x + r)
    r = 1.0 / (x + r)
    log_phi = -0.5 * x * x - 0.5 * math.log(2.0 * math.pi)
    return math.exp(log_phi) * r


def gamma_tail(n: int, x: float) -> float:
    """Regularized upper incomplete gamma for integer shape n.

    Returns P(Z >= x) for Z ~ Gamma(n, 1), i.e. exp(-x) * sum_{k<n} x^k/k!.
    The closed-form sum is used directly for moderate x; larger x switches
    to a log-domain accumulation so n up to 1e6 and x up to 1e7 are safe.
    """
    if n < 1:
        raise ValueError(f"gamma_tail requires n >= 1, got {n}")
    if x < 0.0:
        raise ValueError(f"gamma_tail requires x >= 0, got {x}")
    if x == 0.0:
        return 1.0
    if x < 600.0:
        term = 1.0
        total = 1.0
        for k in range(1, n):
            term *= x / k
            total += term
        return clamp_probability(math.exp(-x) * total)
    # log-domain: logsumexp over log(x^k/k!) = k*log(x) - lgamma(k+1)
    k = np.arange(n, dtype=np.float64)
    log_terms = k * math.log(x) - np.cumsum(np.concatenate(([0.0], np.log(k[1:]))))
    peak = float(log_terms.max())
    log_sum = peak + math.log(float(np.exp(log_terms - peak).sum()))
    return clamp_probability(math.exp(log_sum - x))


def log_factorial(m: int) -> float:
    """Natural log of m!; exact big-integer product for small m."""
    if m < 0:
        raise ValueError(f"log_factorial requires m >= 0, got {m}")
    if m <= 256:
        return math.log(math.factorial(m)) if m > 1 else 0.0
    return math.lgamma(m + 1.0)


def deviation_rate(u: float) -> float:
    """Large-deviation rate u - 1 - ln(u); zero exactly at u = 1."""
    if u <= 0.0:
        raise ValueError(f"deviation_rate requires u > 0, got {u}")
    return u - 1.0 - math.log(u)


def deviation_rate_inverse(y: float) -> float:
    """Approximate inverse of the deviation rate on its upper branch.

    1 + y/2 + sqrt(3y + (y/2)^2); exact at y = 0 and accurate to a few
    percent for u up to about 10.
    """
    if y < 0.0:
        raise ValueError(f"deviation_rate_inverse requires y >= 0, got {y}")
    half = 0.5 * y
    return 1.0 + half + math.sqrt(3.0 * y + half * half)


def to_db(ratio: float) -> float:
    if ratio <= 0.0:
        raise ValueError(f"to_db requires a positive ratio, got {ratio}")
    return 10.0 * math.log10(ratio)


def from_db(db: float) -> float:
    return 10.0 ** (db / 10.0)
