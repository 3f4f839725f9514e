"""Pure-numpy detection kernels (fallback backend).

Each count_* function fuses detection and error tallying for one chunk of
trials and must stay decision-identical to the compiled twin in
_kernels.pyx: quantization uses ceil(p - 0.5) (midpoint ties to the lower
level), ranking uses a stable ascending sort (ties to the lower
coordinate position), and brute-force search keeps the first minimum
(smallest message index).
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def threshold_indices(
    received: np.ndarray, lev0: float, spacing: float, two_k: int
) -> np.ndarray:
    """Quantize every coordinate to the nearest scaled level index."""
    pos = (received - lev0) / spacing
    idx = np.ceil(pos - 0.5)
    np.clip(idx, 0, two_k - 1, out=idx)
    return idx.astype(np.int8)


def rank_indices(received: np.ndarray, two_k: int) -> np.ndarray:
    """Assign level r to the coordinate of ascending rank r in each block."""
    c = received.shape[0]
    blocks = received.reshape(-1, two_k)
    order = np.argsort(blocks, axis=1, kind="stable")
    det = np.empty_like(order, dtype=np.int8)
    ranks = np.broadcast_to(
        np.arange(two_k, dtype=np.int8), order.shape
    )
    np.put_along_axis(det, order, ranks, axis=1)
    return det.reshape(c, -1)


def ml_decide(received: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Index of the nearest table row per trial; first minimum wins ties."""
    sq_r = np.einsum("ij,ij->i", received, received)
    sq_t = np.einsum("ij,ij->i", table, table)
    d2 = sq_r[:, None] - 2.0 * (received @ table.T) + sq_t[None, :]
    return np.argmin(d2, axis=1)


def _tally(det: np.ndarray, sent: np.ndarray, two_k: int, q: int):
    coord_wrong = det != sent
    coord = int(coord_wrong.sum())
    block_wrong = coord_wrong.reshape(-1, q, two_k).any(axis=2)
    block = int(block_wrong.sum())
    msg = int(block_wrong.any(axis=1).sum())
    return coord, block, msg


def count_threshold(
    received: np.ndarray,
    sent: np.ndarray,
    lev0: float,
    spacing: float,
    two_k: int,
    q: int,
):
    det = threshold_indices(received, lev0, spacing, two_k)
    coord, block, msg = _tally(det, sent, two_k, q)
    sorted_blocks = np.sort(det.reshape(-1, q, two_k), axis=2)
    invalid = int(
        (sorted_blocks != np.arange(two_k, dtype=np.int8)).any(axis=2).sum()
    )
    return coord, block, msg, invalid


def count_rank(
    received: np.ndarray, sent: np.ndarray, two_k: int, q: int
):
    det = rank_indices(received, two_k)
    coord, block, msg = _tally(det, sent, two_k, q)
    return coord, block, msg, 0


def count_ml(
    received: np.ndarray,
    sent: np.ndarray,
    table: np.ndarray,
    table_idx: np.ndarray,
    two_k: int,
    q: int,
):
    decisions = ml_decide(received, table)
    det = table_idx[decisions]
    coord, block, msg = _tally(det, sent, two_k, q)
    return coord, block, msg, 0
