"""Monte Carlo AWGN channel for permutation constellations.

Transmitted coordinate = sqrt(rho_s) * normalized level; noise is i.i.d.
Gaussian with variance 0.5 per coordinate, so total signal energy is
n*rho_s against mean noise energy n and the SNR is rho_s.

Reproducibility: trials are pre-partitioned into fixed-size chunks and
chunk c draws from a Philox stream keyed by (seed, c).  Counts are merged
by summation, so a report depends only on (seed, trials, chunk_size) --
never on scheduling order or the number of workers.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import beta as _beta_dist

from . import _kernels_py
from .backends import get_backend
from .permutation import Constellation, decode_block, signal_matrix

DETECTORS = ("threshold", "rank", "ml")

_SIGMA = math.sqrt(0.5)
_Z95 = 1.959963984540054
_EXACT_CI_BELOW = 30
_ML_SIGNAL_LIMIT = 4096
_OPPORTUNITY_LIMIT = 2**63


@dataclass(frozen=True)
class ChannelConfig:
    rho_s: float
    trials: int
    seed: int = 0
    detector: str = "rank"
    workers: int = 1
    chunk_size: int = 32768
    backend: str = "auto"
    # noise_scale multiplies the noise standard deviation; it exists as a
    # sensitivity hook for verification (1.0 in normal operation).
    noise_scale: float = 1.0

    def __post_init__(self):
        if self.rho_s <= 0.0:
            raise ValueError(f"rho_s must be positive, got {self.rho_s}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.detector not in DETECTORS:
            raise ValueError(f"detector must be one of {DETECTORS}, got {self.detector!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if self.noise_scale < 0.0:
            raise ValueError(f"noise_scale must be >= 0, got {self.noise_scale}")


def _confidence_interval(errors: int, opportunities: int):
    """95% interval for an error proportion.

    Normal approximation, switching to the exact (conservative)
    Clopper-Pearson interval when the error count is below 30.
    """
    p_hat = errors / opportunities
    if errors < _EXACT_CI_BELOW or opportunities - errors < _EXACT_CI_BELOW:
        lo = 0.0 if errors == 0 else float(
            _beta_dist.ppf(0.025, errors, opportunities - errors + 1)
        )
        hi = 1.0 if errors == opportunities else float(
            _beta_dist.ppf(0.975, errors + 1, opportunities - errors)
        )
        return p_hat, (lo, hi), "clopper-pearson"
    half = _Z95 * math.sqrt(p_hat * (1.0 - p_hat) / opportunities)
    return p_hat, (max(0.0, p_hat - half), min(1.0, p_hat + half)), "normal"


@dataclass(frozen=True)
class SimReport:
    trials: int
    message_errors: int
    block_errors: int
    coordinate_errors: int
    invalid_blocks: int
    p_message: float
    p_message_ci: tuple[float, float]
    p_message_ci_method: str
    p_coordinate: float
    p_coordinate_ci: tuple[float, float]
    p_coordinate_ci_method: str
    elapsed: float
    config: dict = field(default_factory=dict)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "trials": self.trials,
            "message_errors": self.message_errors,
            "block_errors": self.block_errors,
            "coordinate_errors": self.coordinate_errors,
            "invalid_blocks": self.invalid_blocks,
            "p_message": self.p_message,
            "p_message_ci": list(self.p_message_ci),
            "p_message_ci_method": self.p_message_ci_method,
            "p_coordinate": self.p_coordinate,
            "p_coordinate_ci": list(self.p_coordinate_ci),
            "p_coordinate_ci_method": self.p_coordinate_ci_method,
            "config": dict(self.config),
        }
        if include_timing:
            out["elapsed"] = self.elapsed
        return out


def _chunk_sizes(trials: int, chunk_size: int):
    full, rest = divmod(trials, chunk_size)
    sizes = [chunk_size] * full
    if rest:
        sizes.append(rest)
    return sizes


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    key = np.array([seed, chunk_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_chunk(
    constellation: Constellation,
    cfg: ChannelConfig,
    chunk_index: int,
    size: int,
    scaled_levels: np.ndarray,
):
    """Messages and received vectors for one chunk (fixed draw order)."""
    two_k = constellation.levels_per_block
    q = constellation.q
    rng = _chunk_rng(cfg.seed, chunk_index)
    perms = np.tile(np.arange(two_k, dtype=np.int8), (size * q, 1))
    rng.permuted(perms, axis=1, out=perms)
    sent = np.ascontiguousarray(perms.reshape(size, q * two_k))
    received = scaled_levels.take(sent.astype(np.intp))
    noise = rng.standard_normal((size, q * two_k))
    received += noise * (_SIGMA * cfg.noise_scale)
    return sent, np.ascontiguousarray(received)


def _ml_table(constellation: Constellation, rho_s: float):
    if constellation.signal_count > _ML_SIGNAL_LIMIT:
        raise ValueError(
            f"ml detector requires at most {_ML_SIGNAL_LIMIT} signals, "
            f"constellation has {constellation.signal_count}"
        )
    coords, level_idx = signal_matrix(constellation)
    return np.ascontiguousarray(coords * math.sqrt(rho_s)), np.ascontiguousarray(level_idx)


def simulate(constellation: Constellation, cfg: ChannelConfig) -> SimReport:
    """Run the Monte Carlo transmission experiment and tally errors."""
    dim = constellation.dim
    if cfg.trials * dim > _OPPORTUNITY_LIMIT:
        raise ValueError("trials * coordinates overflows the opportunity counter")
    kernel = get_backend(cfg.backend)
    two_k = constellation.levels_per_block
    q = constellation.q
    scaled_levels = constellation.levels * math.sqrt(cfg.rho_s)
    lev0 = float(scaled_levels[0])
    spacing = constellation.level_spacing * math.sqrt(cfg.rho_s)
    table = table_idx = None
    if cfg.detector == "ml":
        table, table_idx = _ml_table(constellation, cfg.rho_s)

    def run_chunk(args):
        chunk_index, size = args
        sent, received = _draw_chunk(
            constellation, cfg, chunk_index, size, scaled_levels
        )
        if cfg.detector == "threshold":
            return kernel.count_threshold(received, sent, lev0, spacing, two_k, q)
        if cfg.detector == "rank":
            return kernel.count_rank(received, sent, two_k, q)
        return kernel.count_ml(received, sent, table, table_idx, two_k, q)

    start = time.perf_counter()
    jobs = list(enumerate(_chunk_sizes(cfg.trials, cfg.chunk_size)))
    if cfg.workers == 1 or len(jobs) == 1:
        results = [run_chunk(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run_chunk, jobs))
    coord = sum(r[0] for r in results)
    block = sum(r[1] for r in results)
    msg = sum(r[2] for r in results)
    invalid = sum(r[3] for r in results)
    elapsed = time.perf_counter() - start

    p_msg, msg_ci, msg_method = _confidence_interval(msg, cfg.trials)
    p_coord, coord_ci, coord_method = _confidence_interval(coord, cfg.trials * dim)
    return SimReport(
        trials=cfg.trials,
        message_errors=msg,
        block_errors=block,
        coordinate_errors=coord,
        invalid_blocks=invalid,
        p_message=p_msg,
        p_message_ci=msg_ci,
        p_message_ci_method=msg_method,
        p_coordinate=p_coord,
        p_coordinate_ci=coord_ci,
        p_coordinate_ci_method=coord_method,
        elapsed=elapsed,
        config={
            "k": constellation.k,
            "q": constellation.q,
            "rho_s": cfg.rho_s,
            "trials": cfg.trials,
            "seed": cfg.seed,
            "detector": cfg.detector,
            "workers": cfg.workers,
            "chunk_size": cfg.chunk_size,
            "backend": kernel.NAME,
            "noise_scale": cfg.noise_scale,
        },
    )


def detect_threshold(
    received: np.ndarray, constellation: Constellation, rho_s: float
) -> list[int | None]:
    """Per-coordinate nearest-level detection; None marks an invalid block.

    Midpoint ties go to the lower level.  A block whose quantized levels
    are not a permutation cannot be decoded and counts as an error.
    """
    received = np.asarray(received, dtype=np.float64).reshape(1, -1)
    _check_length(received, constellation)
    two_k = constellation.levels_per_block
    scaled = constellation.levels * math.sqrt(rho_s)
    det = _kernels_py.threshold_indices(
        received, float(scaled[0]), constellation.level_spacing * math.sqrt(rho_s), two_k
    )[0]
    out: list[int | None] = []
    for b in range(constellation.q):
        blk = det[b * two_k : (b + 1) * two_k]
        if sorted(blk.tolist()) != list(range(two_k)):
            out.append(None)
        else:
            out.append(decode_block(constellation.k, blk.tolist()))
    return out


def detect_rank(received: np.ndarray, constellation: Constellation) -> list[int]:
    """Rank detection: sort each block, assign levels by rank; always valid."""
    received = np.asarray(received, dtype=np.float64).reshape(1, -1)
    _check_length(received, constellation)
    two_k = constellation.levels_per_block
    det = _kernels_py.rank_indices(received, two_k)[0]
    return [
        decode_block(constellation.k, det[b * two_k : (b + 1) * two_k].tolist())
        for b in range(constellation.q)
    ]


def detect_ml(
    received: np.ndarray, constellation: Constellation, rho_s: float
) -> list[int]:
    """Exhaustive nearest-signal detection; ties go to the lowest index."""
    received = np.asarray(received, dtype=np.float64).reshape(1, -1)
    _check_length(received, constellation)
    table, _ = _ml_table(constellation, rho_s)
    decision = int(_kernels_py.ml_decide(received, table)[0])
    return _message_from_row(decision, constellation)


def _message_from_row(row: int, constellation: Constellation) -> list[int]:
    card = constellation.block_cardinality
    out = [0] * constellation.q
    for b in range(constellation.q - 1, -1, -1):
        row, out[b] = divmod(row, card)
    return out


def _check_length(received: np.ndarray, constellation: Constellation) -> None:
    if received.shape[1] != constellation.dim:
        raise ValueError(
            f"received vector has {received.shape[1]} coordinates, "
            f"expected {constellation.dim}"
        )


def compare_detectors(
    constellation: Constellation,
    cfg: ChannelConfig,
    first: str = "rank",
    second: str = "ml",
) -> int:
    """Replay the simulation streams and count trials where two detectors
    would decide differently.  Uses the numpy kernels for both sides so the
    comparison is backend-independent.
    """
    for name in (first, second):
        if name not in DETECTORS:
            raise ValueError(f"unknown detector {name!r}")
    two_k = constellation.levels_per_block
    q = constellation.q
    scaled_levels = constellation.levels * math.sqrt(cfg.rho_s)
    lev0 = float(scaled_levels[0])
    spacing = constellation.level_spacing * math.sqrt(cfg.rho_s)
    table = table_idx = None
    if "ml" in (first, second):
        table, table_idx = _ml_table(constellation, cfg.rho_s)

    def decisions(name, received):
        if name == "threshold":
            return _kernels_py.threshold_indices(received, lev0, spacing, two_k)
        if name == "rank":
            return _kernels_py.rank_indices(received, two_k)
        return table_idx[_kernels_py.ml_decide(received, table)]

    mismatches = 0
    for chunk_index, size in enumerate(_chunk_sizes(cfg.trials, cfg.chunk_size)):
        _, received = _draw_chunk(constellation, cfg, chunk_index, size, scaled_levels)
        det_a = decisions(first, received)
        det_b = decisions(second, received)
        mismatches += int((det_a != det_b).any(axis=1).sum())
    return mismatches
