"""Pure-Python (numpy) versions of the hot loops in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np


def _vertex_mask(Bu: np.ndarray, dmax: np.ndarray, dmin: np.ndarray, z: int, strict: bool) -> np.ndarray:
    n = Bu.shape[1]
    s = 1 if strict else 0
    bits = np.array([(z >> i) & 1 for i in range(n)], dtype=bool)
    pos_ok = (Bu - dmax) >= s
    neg_ok = (Bu - dmin) <= -s
    return np.where(bits, neg_ok, pos_ok).all(axis=1)


def first_members(Bu: np.ndarray, dmax: np.ndarray, dmin: np.ndarray, strict: bool) -> np.ndarray:
    """Index of the first row of ``Bu`` in each vertex set, or -1."""
    n = Bu.shape[1]
    out = np.full(1 << n, -1, dtype=np.int64)
    for z in range(1 << n):
        mask = _vertex_mask(Bu, dmax, dmin, z, strict)
        hit = np.flatnonzero(mask)
        if hit.size:
            out[z] = hit[0]
    return out


def member_mask(Bu: np.ndarray, dmax: np.ndarray, dmin: np.ndarray, z: int, strict: bool) -> np.ndarray:
    return _vertex_mask(Bu, dmax, dmin, z, strict)


def rollout_threshold(x0: np.ndarray, thresholds: np.ndarray, inc: np.ndarray, dw: np.ndarray):
    n = x0.shape[0]
    T = dw.shape[0]
    weights = [1 << i for i in range(n)]
    states = np.empty((T + 1, n), dtype=np.float64)
    zidx = np.empty(T, dtype=np.int64)
    x = [float(v) for v in x0]
    L = [float(v) for v in thresholds]
    inc_rows = inc.tolist()
    dw_rows = dw.tolist()
    states[0] = x
    for t in range(T):
        z = 0
        for i in range(n):
            if x[i] > L[i]:
                z += weights[i]
        zidx[t] = z
        row = inc_rows[z]
        d = dw_rows[t]
        x = [x[i] + (row[i] - d[i]) for i in range(n)]
        states[t + 1] = x
    return states, zidx
