"""Backend selection for the hot loops.

The compiled extension ``finbox._kernels`` is used when it imports; otherwise
the numpy fallback ``finbox._kernels_py``. Set ``FINBOX_PURE_PYTHON=1`` to
force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from finbox import _kernels_py


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("FINBOX_PURE_PYTHON", "") not in ("", "0"):
        return _kernels_py, "python"
    try:
        from finbox import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return _kernels_py, "python"
    return _kernels, "cython"


_impl, BACKEND = _load()


def backends() -> dict[str, ModuleType]:
    """All importable backends, for benchmarks and cross-checks."""
    out = {"python": _kernels_py}
    try:
        from finbox import _kernels  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out


def control_increments(B: np.ndarray, values: np.ndarray) -> np.ndarray:
    """``B u`` for every ``u`` in ``values^m``, lexicographic with ``u_1`` slowest."""
    B = np.asarray(B, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64)
    n, m = B.shape
    acc = np.zeros((1, n), dtype=np.int64)
    for j in range(m):
        col = values[:, None] * B[:, j][None, :]
        acc = (acc[:, None, :] + col[None, :, :]).reshape(-1, n)
    return np.ascontiguousarray(acc)


def first_members(Bu, dmax, dmin, strict: bool, impl: ModuleType | None = None) -> np.ndarray:
    impl = impl or _impl
    return impl.first_members(
        np.ascontiguousarray(Bu, dtype=np.int64),
        np.ascontiguousarray(dmax, dtype=np.int64),
        np.ascontiguousarray(dmin, dtype=np.int64),
        bool(strict),
    )


def member_mask(Bu, dmax, dmin, z: int, strict: bool, impl: ModuleType | None = None) -> np.ndarray:
    impl = impl or _impl
    return impl.member_mask(
        np.ascontiguousarray(Bu, dtype=np.int64),
        np.ascontiguousarray(dmax, dtype=np.int64),
        np.ascontiguousarray(dmin, dtype=np.int64),
        int(z),
        bool(strict),
    )


def rollout_threshold(x0, thresholds, inc, dw, impl: ModuleType | None = None):
    impl = impl or _impl
    return impl.rollout_threshold(
        np.ascontiguousarray(x0, dtype=np.float64),
        np.ascontiguousarray(thresholds, dtype=np.float64),
        np.ascontiguousarray(inc, dtype=np.float64),
        np.ascontiguousarray(dw, dtype=np.float64),
    )
