"""Closed-form error probability and energy loss for permutation constellations.

Two distance conventions coexist here on purpose.  The closed forms below
take the time-normalized minimum distance (which grows like sqrt(n)),
while the per-coordinate functions at the bottom use the n-independent
level spacing actually seen by the coordinate-wise detector.  The Monte
Carlo channel adjudicates between them; this module computes both and
never substitutes one for the other.
"""

from __future__ import annotations

import math

from .permutation import min_distance, spectral_efficiency, spectral_efficiency_stirling
from .special import clamp_probability, q_function

_SQRT_2PI = math.sqrt(2.0 * math.pi)

RF_MODES = ("exact", "approx")


def _rate(k: int, rf_mode: str) -> float:
    if rf_mode == "exact":
        return spectral_efficiency(k)
    if rf_mode == "approx":
        return spectral_efficiency_stirling(k)
    raise ValueError(f"rf_mode must be one of {RF_MODES}, got {rf_mode!r}")


def message_error_exact(n: int, d: float) -> float:
    """Exact all-coordinates expression 1 - (1 - 2Q(d/2))^(2n)."""
    if n < 1 or d < 0.0:
        raise ValueError("message_error_exact requires n >= 1 and d >= 0")
    bracket = 1.0 - 2.0 * q_function(d / 2.0)
    if bracket <= 0.0:
        return 1.0
    return clamp_probability(-math.expm1(2.0 * n * math.log(bracket)))


def message_error_union_raw(n: int, d: float) -> float:
    """Unclamped union-bound linearization 4n*Q(d/2); may exceed 1."""
    if n < 1 or d < 0.0:
        raise ValueError("message_error_union_raw requires n >= 1 and d >= 0")
    return 4.0 * n * q_function(d / 2.0)


def message_error_union(n: int, d: float) -> float:
    """Union-bound error probability, clamped to stay a probability."""
    return clamp_probability(message_error_union_raw(n, d))


def energy_loss_closed_form(
    k: int, n: int, p_dem: float, rf_mode: str = "exact"
) -> float:
    """Closed-form energy loss in dB for a target error probability.

    Evaluates 10*log10((4k^2-1) * Phi / (6 * (2^rf - 1))) with
    Phi = ln(Z / ln(Z_L)) / n, Z = (n / (p*sqrt(2pi)))^2, Z_L = ln(Z).
    May be negative.  Rejects parameter sets where Z_L <= 1, for which
    Phi is undefined.
    """
    if not 0.0 < p_dem < 1.0:
        raise ValueError(f"energy_loss_closed_form requires 0 < p_dem < 1, got {p_dem}")
    if n < 1 or k < 1:
        raise ValueError("energy_loss_closed_form requires k >= 1 and n >= 1")
    rf = _rate(k, rf_mode)
    z = (n / (p_dem * _SQRT_2PI)) ** 2
    z_l = math.log(z)
    if z_l <= 1.0:
        raise ValueError(
            f"outside validity region: ln(Z) = {z_l:.6g} <= 1 for n={n}, p_dem={p_dem}"
        )
    phi = math.log(z / math.log(z_l)) / n
    return 10.0 * math.log10((4.0 * k * k - 1.0) * phi / (6.0 * (2.0**rf - 1.0)))


def solve_min_distance(n: int, p_dem: float) -> float:
    """Invert 4n*Q(d/2) = p_dem for d by bisection.

    Converges to |delta p| / p <= 1e-9; the unclamped union expression is
    strictly decreasing in d so the root is unique.
    """
    if n < 1:
        raise ValueError(f"solve_min_distance requires n >= 1, got {n}")
    if not 0.0 < p_dem < min(1.0, 2.0 * n):
        raise ValueError(
            f"p_dem must lie in (0, {min(1.0, 2.0 * n)}) for inversion, got {p_dem}"
        )
    lo = 0.0
    hi = 2.0
    while message_error_union_raw(n, hi) > p_dem:
        hi *= 2.0
        if hi > 1e6:
            raise ValueError(f"no solution for p_dem={p_dem} at n={n}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        p_mid = message_error_union_raw(n, mid)
        if p_mid > p_dem:
            lo = mid
        else:
            hi = mid
        if p_mid > 0.0 and abs(p_mid - p_dem) <= 1e-9 * p_dem:
            return mid
    return 0.5 * (lo + hi)


def energy_loss_numeric(
    k: int, n: int, p_dem: float, rf_mode: str = "exact"
) -> float:
    """Independent numeric energy loss: invert the union bound for the
    distance, map it back to the SNR through the closed-form minimum
    distance, and compare against the capacity limit for the chosen rate.
    """
    if k < 1:
        raise ValueError(f"energy_loss_numeric requires k >= 1, got {k}")
    d = solve_min_distance(n, p_dem)
    rho_s = d * d * (4.0 * k * k - 1.0) / (6.0 * n)
    rho_s0 = 2.0 ** _rate(k, rf_mode) - 1.0
    return 10.0 * math.log10(rho_s / rho_s0)


def predicted_min_distance(k: int, n: int, rho_s: float) -> float:
    """Time-normalized minimum distance at the given SNR (sqrt(n) scaling)."""
    return min_distance(rho_s, k, n)


def coordinate_error_rate(k: int, rho_s: float) -> float:
    """Exact per-coordinate error of the 2k-level threshold detector.

    Interior levels err two-sided, the two edge levels one-sided:
    averaged over a uniform level this is 2*(1 - 1/(2k))*Q(h) with
    h = sqrt(3*rho_s/(4k^2 - 1)).
    """
    if k < 1 or rho_s <= 0.0:
        raise ValueError("coordinate_error_rate requires k >= 1 and rho_s > 0")
    h = math.sqrt(3.0 * rho_s / (4.0 * k * k - 1.0))
    return clamp_probability(2.0 * (1.0 - 0.5 / k) * q_function(h))


def message_error_product(k: int, q: int, rho_s: float) -> float:
    """Exact threshold-detector message error from per-level accounting.

    A block is correct when its two edge coordinates stay inside their
    one-sided regions and the 2k-2 interior coordinates inside two-sided
    ones; a message is correct when all q blocks are.
    """
    if k < 1 or q < 1 or rho_s <= 0.0:
        raise ValueError("message_error_product requires k >= 1, q >= 1, rho_s > 0")
    qh = q_function(math.sqrt(3.0 * rho_s / (4.0 * k * k - 1.0)))
    log_block_ok = 2.0 * math.log1p(-qh) + (2.0 * k - 2.0) * math.log1p(-2.0 * qh)
    return clamp_probability(-math.expm1(q * log_block_ok))
