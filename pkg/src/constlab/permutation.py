"""Permutation constellation construction.

A constellation is built from q blocks of 2K coordinates.  Each block
carries one permutation of 2K equally spaced amplitude levels, so a block
encodes log2((2K)!) bits and the whole signal has N = 2Kq coordinates.
Levels are normalized to unit average power per coordinate pair
(mean square 1/2 per coordinate), which fixes the adjacent-level spacing
at sqrt(6/(4K^2 - 1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .special import log_factorial

_LOG2 = math.log(2.0)


def level_spacing(k: int) -> float:
    """Adjacent-level distance sqrt(6/(4k^2 - 1)) after power normalization."""
    if k < 1:
        raise ValueError(f"level_spacing requires k >= 1, got {k}")
    return math.sqrt(6.0 / (4.0 * k * k - 1.0))


def level_values(k: int) -> np.ndarray:
    """The 2k normalized amplitude levels, symmetric about zero."""
    if k < 1:
        raise ValueError(f"level_values requires k >= 1, got {k}")
    odd = np.arange(1 - 2 * k, 2 * k, 2, dtype=np.float64)
    return 0.5 * level_spacing(k) * odd


def spectral_efficiency(k: int) -> float:
    """Exact rate log2((2k)!)/k in bit/s*Hz."""
    if k < 1:
        raise ValueError(f"spectral_efficiency requires k >= 1, got {k}")
    return log_factorial(2 * k) / (_LOG2 * k)


def spectral_efficiency_stirling(k: int) -> float:
    """Stirling-form rate log2(4k^2)."""
    if k < 1:
        raise ValueError(f"spectral_efficiency_stirling requires k >= 1, got {k}")
    return math.log2(4.0 * k * k)


def encode_block(k: int, index: int) -> np.ndarray:
    """Map an integer in [0, (2k)!) to a permutation of 0..2k-1.

    Lexicographic factoradic unranking; index 0 is the identity.
    """
    m = 2 * k
    cardinality = math.factorial(m)
    if not 0 <= index < cardinality:
        raise ValueError(f"block index {index} out of range [0, {cardinality})")
    available = list(range(m))
    out = np.empty(m, dtype=np.int64)
    rem = index
    for i in range(m):
        f = math.factorial(m - 1 - i)
        digit, rem = divmod(rem, f)
        out[i] = available.pop(digit)
    return out


def decode_block(k: int, perm: Sequence[int]) -> int:
    """Exact inverse of encode_block; validates the input is a bijection."""
    m = 2 * k
    p = list(perm)
    if len(p) != m or sorted(p) != list(range(m)):
        raise ValueError(f"not a permutation of 0..{m - 1}: {p}")
    available = list(range(m))
    rank = 0
    for i in range(m):
        digit = available.index(p[i])
        rank += digit * math.factorial(m - 1 - i)
        available.pop(digit)
    return rank


@dataclass(frozen=True)
class Constellation:
    """Shape of a permutation constellation: k half-levels, q blocks."""

    k: int
    q: int

    def __post_init__(self):
        if self.k < 1 or self.q < 1:
            raise ValueError(f"Constellation requires k >= 1 and q >= 1, got k={self.k} q={self.q}")

    @property
    def n(self) -> int:
        """Normalized signal duration k*q."""
        return self.k * self.q

    @property
    def dim(self) -> int:
        """Number of real coordinates N = 2kq."""
        return 2 * self.k * self.q

    @property
    def levels_per_block(self) -> int:
        return 2 * self.k

    @property
    def level_spacing(self) -> float:
        return level_spacing(self.k)

    @property
    def levels(self) -> np.ndarray:
        return level_values(self.k)

    @property
    def block_cardinality(self) -> int:
        return math.factorial(2 * self.k)

    @property
    def signal_count(self) -> int:
        return self.block_cardinality**self.q

    @property
    def log2_signal_count(self) -> float:
        return self.q * log_factorial(2 * self.k) / _LOG2

    @property
    def bits_per_block(self) -> int:
        """Whole bits carried per block under greedy bit packing."""
        return (self.block_cardinality.bit_length() - 1)

    @property
    def rf_exact(self) -> float:
        return spectral_efficiency(self.k)

    @property
    def rf_approx(self) -> float:
        return spectral_efficiency_stirling(self.k)


def modulate(constellation: Constellation, message: Sequence[int]) -> np.ndarray:
    """Normalized coordinate vector for a message (one index per block).

    Unit average power convention: sum of squares equals n.  SNR scaling
    by sqrt(rho_s) is applied by the channel, not here.
    """
    if len(message) != constellation.q:
        raise ValueError(
            f"message has {len(message)} block indices, expected {constellation.q}"
        )
    levels = constellation.levels
    blocks = [levels[encode_block(constellation.k, idx)] for idx in message]
    return np.concatenate(blocks)


def min_distance(rho_s: float, k: int, n: int) -> float:
    """Closed-form minimum distance sqrt(6*n*rho_s/(4k^2 - 1)).

    Carries the sqrt(n) factor of the time-normalized metric; the
    per-coordinate spacing under the channel convention is the
    n-independent sqrt(rho_s)*level_spacing(k).  Both are exposed and
    never conflated.
    """
    if rho_s <= 0.0 or k < 1 or n < 1:
        raise ValueError("min_distance requires rho_s > 0, k >= 1, n >= 1")
    return math.sqrt(6.0 * n * rho_s / (4.0 * k * k - 1.0))


def enumerate_messages(constellation: Constellation) -> Iterator[tuple[int, ...]]:
    """All messages in lexicographic order (block 0 most significant)."""
    yield from product(range(constellation.block_cardinality), repeat=constellation.q)


def signal_matrix(constellation: Constellation) -> tuple[np.ndarray, np.ndarray]:
    """Dense table of every normalized signal and its level indices.

    Returns (coords, level_idx) with shapes (M, N); rows follow the
    lexicographic message order of enumerate_messages.
    """
    m_block = constellation.block_cardinality
    block_perms = np.stack(
        [encode_block(constellation.k, i) for i in range(m_block)]
    ).astype(np.int8)
    rows = []
    for msg in enumerate_messages(constellation):
        rows.append(np.concatenate([block_perms[i] for i in msg]))
    level_idx = np.stack(rows)
    coords = constellation.levels[level_idx.astype(np.intp)]
    return coords, level_idx


@dataclass(frozen=True)
class BruteForceDistance:
    distance: float
    pair: tuple[tuple[int, ...], tuple[int, ...]]


BRUTE_FORCE_LIMIT = 10_000


def min_distance_bruteforce(
    constellation: Constellation, rho_s: float
) -> BruteForceDistance:
    """Exhaustive minimum pairwise distance over all scaled signals.

    Coordinates are scaled by sqrt(rho_s) to match the channel
    convention; reports the minimizing message pair.
    """
    if rho_s <= 0.0:
        raise ValueError(f"min_distance_bruteforce requires rho_s > 0, got {rho_s}")
    count = constellation.signal_count
    if count > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"constellation has {count} signals, above the enumeration "
            f"limit {BRUTE_FORCE_LIMIT}"
        )
    coords, _ = signal_matrix(constellation)
    coords = coords * math.sqrt(rho_s)
    messages = list(enumerate_messages(constellation))
    sq_norms = np.einsum("ij,ij->i", coords, coords)
    best = math.inf
    best_pair = (0, 1)
    chunk = 256
    for start in range(0, count, chunk):
        stop = min(start + chunk, count)
        cross = coords[start:stop] @ coords.T
        d2 = sq_norms[start:stop, None] - 2.0 * cross + sq_norms[None, :]
        # only pairs (i, j) with j > i
        for local, i in enumerate(range(start, stop)):
            if i + 1 >= count:
                continue
            row = d2[local, i + 1 :]
            j_rel = int(np.argmin(row))
            if row[j_rel] < best:
                best = float(row[j_rel])
                best_pair = (i, i + 1 + j_rel)
    return BruteForceDistance(
        distance=math.sqrt(max(best, 0.0)),
        pair=(messages[best_pair[0]], messages[best_pair[1]]),
    )


def message_from_bits(
    constellation: Constellation, bits: Sequence[int] | str
) -> tuple[int, ...]:
    """Greedy bit packing: floor(log2((2k)!)) bits become one block index.

    The fractional bit log2((2k)!) - floor(log2((2k)!)) per block is lost;
    bit_capacity() reports the usable whole-bit payload.
    """
    bit_list = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bit_list):
        raise ValueError("bits must be 0/1")
    width = constellation.bits_per_block
    needed = width * constellation.q
    if len(bit_list) != needed:
        raise ValueError(f"expected {needed} bits ({width} per block), got {len(bit_list)}")
    indices = []
    for b in range(constellation.q):
        chunk = bit_list[b * width : (b + 1) * width]
        idx = 0
        for bit in chunk:
            idx = (idx << 1) | bit
        indices.append(idx)
    return tuple(indices)


def bit_capacity(constellation: Constellation) -> int:
    """Whole bits carried by one signal under greedy packing."""
    return constellation.bits_per_block * constellation.q


def random_message(
    constellation: Constellation, rng: np.random.Generator
) -> tuple[int, ...]:
    card = constellation.block_cardinality
    return tuple(int(rng.integers(0, card)) for _ in range(constellation.q))
