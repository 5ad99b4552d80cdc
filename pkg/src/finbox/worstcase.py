"""Exact worst-case disturbance analysis.

``[Dw]_i = sum_j D_ij w_j`` with every ``w_j`` ranging independently over
``W``, so each channel is optimized on its own: only ``min W`` and ``max W``
matter, for any finite alphabet. This replaces ``q**p`` enumeration with a
scan over ``n * p`` matrix entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from finbox.model import Alphabet, NetworkModel


@dataclass(frozen=True)
class RowExtremes:
    """Per-row ``min``/``max`` of ``[Dw]_i`` over ``W^p`` and attaining disturbances."""

    dmin: tuple[int, ...]
    dmax: tuple[int, ...]
    wmin: tuple[tuple[int, ...], ...]
    wmax: tuple[tuple[int, ...], ...]

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.dmin, dtype=np.int64), np.array(self.dmax, dtype=np.int64)


@dataclass(frozen=True)
class IncrementInterval:
    """Tight per-row range ``[lo_i, hi_i]`` of ``[Bu - Dw]_i`` for one fixed ``u``."""

    u: tuple[int, ...]
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    w_lo: tuple[tuple[int, ...], ...]  # disturbance attaining lo_i
    w_hi: tuple[tuple[int, ...], ...]


def row_extremes(D: np.ndarray | Sequence[Sequence[int]], W: Alphabet) -> RowExtremes:
    D = np.asarray(D, dtype=np.int64)
    bmin, bmax = W.min, W.max
    dmin, dmax, wmin, wmax = [], [], [], []
    for row in D.tolist():
        lo_w, hi_w = [], []
        for d in row:
            # d >= 0: d*b grows with b. Zero entries take min W on both sides.
            if d > 0:
                lo_w.append(bmin)
                hi_w.append(bmax)
            elif d < 0:
                lo_w.append(bmax)
                hi_w.append(bmin)
            else:
                lo_w.append(bmin)
                hi_w.append(bmin)
        dmin.append(sum(d * b for d, b in zip(row, lo_w)))
        dmax.append(sum(d * b for d, b in zip(row, hi_w)))
        wmin.append(tuple(lo_w))
        wmax.append(tuple(hi_w))
    return RowExtremes(tuple(dmin), tuple(dmax), tuple(wmin), tuple(wmax))


def model_extremes(model: NetworkModel) -> RowExtremes:
    return _cached_extremes(model)


_EXTREMES_CACHE: dict[int, tuple[NetworkModel, RowExtremes]] = {}


def _cached_extremes(model: NetworkModel) -> RowExtremes:
    hit = _EXTREMES_CACHE.get(id(model))
    if hit is not None and hit[0] is model:
        return hit[1]
    ext = row_extremes(model.D, model.W)
    if len(_EXTREMES_CACHE) > 256:
        _EXTREMES_CACHE.clear()
    _EXTREMES_CACHE[id(model)] = (model, ext)
    return ext


def increment_interval(model: NetworkModel, u: Sequence[int]) -> IncrementInterval:
    """Per-row ``[min_w, max_w]`` of ``[Bu - Dw]_i``; ``u`` must lie in ``U^m``."""
    u = model.check_control(u)
    ext = model_extremes(model)
    Bu = model.Bu(u)
    lo = tuple(b - d for b, d in zip(Bu, ext.dmax))
    hi = tuple(b - d for b, d in zip(Bu, ext.dmin))
    return IncrementInterval(u, lo, hi, ext.wmax, ext.wmin)
