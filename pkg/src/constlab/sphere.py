"""Analytic model of sphere-packed constellations on the N-sphere.

Signals sit on a sphere of radius sqrt(n*rho_s) with spherical decision
regions of radius sqrt(n); no constructive layout exists, so this module
is purely analytic: capacity limit, minimum distance, error-probability
estimates and the resulting energy loss relative to the capacity limit.
"""

from __future__ import annotations

import math

from .special import (
    clamp_probability,
    deviation_rate,
    deviation_rate_inverse,
    gamma_tail,
)


def shannon_limit(rf: float) -> float:
    """Minimum linear SNR 2^rf - 1 for reliable transmission at rate rf."""
    if rf <= 0.0:
        raise ValueError(f"shannon_limit requires rf > 0, got {rf}")
    return 2.0**rf - 1.0


def log2_signal_count(rf: float, n: int) -> float:
    """log2 of the signal count (1 + rho_s0)^n; log form since M overflows."""
    if rf <= 0.0:
        raise ValueError(f"log2_signal_count requires rf > 0, got {rf}")
    if n < 1:
        raise ValueError(f"log2_signal_count requires n >= 1, got {n}")
    return n * rf


def min_distance(rho_s: float, rho_s0: float, n: int) -> float:
    """Minimum Euclidean distance 2*sqrt(n*rho_s/rho_s0)."""
    if rho_s <= 0.0 or rho_s0 <= 0.0 or n < 1:
        raise ValueError("min_distance requires rho_s > 0, rho_s0 > 0, n >= 1")
    return 2.0 * math.sqrt(n * rho_s / rho_s0)


def error_prob_sphere(n: int, rho_s: float, rf: float) -> float:
    """Sphere-hardening error estimate ((1+rho_s0)/(1+rho_s))^n.

    Returns exactly 1 at or below the capacity limit (threshold behavior).
    """
    if n < 1 or rho_s <= 0.0:
        raise ValueError("error_prob_sphere requires n >= 1 and rho_s > 0")
    rho_s0 = shannon_limit(rf)
    if rho_s <= rho_s0:
        return 1.0
    return clamp_probability(
        math.exp(-n * math.log((1.0 + rho_s) / (1.0 + rho_s0)))
    )


def error_prob_chernoff(n: int, ratio: float) -> float:
    """Chernoff bound exp(-n*(r - 1 - ln r)) on the displacement tail."""
    if n < 1 or ratio <= 0.0:
        raise ValueError("error_prob_chernoff requires n >= 1 and ratio > 0")
    if ratio <= 1.0:
        return 1.0
    return clamp_probability(math.exp(-n * deviation_rate(ratio)))


def error_prob_chi2(n: int, ratio: float) -> float:
    """Exact tail of the chi-square displacement model.

    The squared noise displacement over 2n coordinates of variance 0.5
    is Gamma(n, 1); an error occurs when it exceeds n*ratio.
    """
    if n < 1 or ratio <= 0.0:
        raise ValueError("error_prob_chi2 requires n >= 1 and ratio > 0")
    return gamma_tail(n, n * ratio)


def energy_loss_sphere(rf: float, n: int, p_dem: float) -> float:
    """Energy loss in dB from inverting the sphere-hardening estimate."""
    if not 0.0 < p_dem <= 1.0:
        raise ValueError(f"energy_loss_sphere requires 0 < p_dem <= 1, got {p_dem}")
    if n < 1:
        raise ValueError(f"energy_loss_sphere requires n >= 1, got {n}")
    pow_rf = 2.0**rf
    root = math.exp(-math.log(p_dem) / n)
    return 10.0 * math.log10((pow_rf * root - 1.0) / (pow_rf - 1.0))


def energy_loss_chernoff(n: int, p_dem: float) -> float:
    """Energy loss in dB from inverting the Chernoff bound.

    Applies the closed-form rate inverse to ln(1/p_dem)/n; always >= 0.
    """
    if not 0.0 < p_dem <= 1.0:
        raise ValueError(f"energy_loss_chernoff requires 0 < p_dem <= 1, got {p_dem}")
    if n < 1:
        raise ValueError(f"energy_loss_chernoff requires n >= 1, got {n}")
    y = math.log(1.0 / p_dem) / n
    return 10.0 * math.log10(deviation_rate_inverse(y))
