"""Seeded closed-loop simulation and Lyapunov bookkeeping.

Random numbers come from numpy's Philox, a counter-based generator keyed per
path: path ``k`` of a run with master seed ``s`` uses the key
``splitmix64(s + (k + 1) * 0x9E3779B97F4A7C15 mod 2**64)``. Each path
therefore has its own stream and the report is identical however the paths
are scheduled.

Per path, the draws are the initial state first (one integer per axis,
giving a point on the ``2**-20`` grid so it is exactly representable), then
``horizon x p`` disturbance indices, each uniform over ``W``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from finbox import kernels
from finbox.model import ControlLaw, Hyperbox, ModelError, NetworkModel, Trajectory
from finbox.parallel import ordered_map
from finbox.verify import CERTIFIED, REFUTED, Verdict

GRID = 2.0**20
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def path_seed(seed: int, k: int) -> int:
    return splitmix64((seed + (k + 1) * 0x9E3779B97F4A7C15) & _MASK64)


def lyapunov(x: Sequence[float], box: Hyperbox) -> float:
    """Largest per-axis distance from ``x`` to the box (0 inside)."""
    v = 0.0
    for xi, lo, hi in zip(x, box.lo, box.hi):
        if xi < lo:
            v = max(v, lo - xi)
        elif xi > hi:
            v = max(v, xi - hi)
    return v


def _lyapunov_rows(states: np.ndarray, box: Hyperbox) -> np.ndarray:
    lo = np.array(box.lo)
    hi = np.array(box.hi)
    d = np.maximum(np.maximum(lo - states, states - hi), 0.0)
    return d.max(axis=1)


def simulate(
    model: NetworkModel,
    law: ControlLaw,
    x0: Sequence[float],
    disturbances: Sequence[Sequence[int]],
    box: Hyperbox | None = None,
) -> Trajectory:
    """Roll the closed loop forward under a given disturbance sequence."""
    law.check_against(model)
    x0 = tuple(float(v) for v in x0)
    if len(x0) != model.n:
        raise ModelError(f"initial state has {len(x0)} entries, expected n={model.n}")
    W = np.array([model.check_disturbance(w) for w in disturbances], dtype=np.int64).reshape(-1, model.p)
    dw = (W @ model.D.T).astype(np.float64)
    T = W.shape[0]
    if law.kind == "threshold":
        inc = np.array([model.Bu(u) for u in law.witnesses], dtype=np.float64)
        states, zidx = kernels.rollout_threshold(np.array(x0), np.array(law.thresholds), inc, dw)
        inputs = tuple(law.witnesses[int(z)] for z in zidx)
        state_rows = tuple(tuple(float(v) for v in row) for row in states.tolist())
    else:
        x = x0
        rows = [x]
        ins = []
        for t in range(T):
            u = law(x)
            ins.append(u)
            x = model.step(x, u, W[t].tolist())
            rows.append(x)
        inputs = tuple(ins)
        state_rows = tuple(rows)
    dist = tuple(tuple(int(v) for v in row) for row in W.tolist())
    lyap: tuple[float, ...] = ()
    entry = None
    if box is not None:
        V = _lyapunov_rows(np.array(state_rows), box)
        lyap = tuple(float(v) for v in V)
        hits = np.flatnonzero(V == 0.0)
        entry = int(hits[0]) if hits.size else None
    return Trajectory(state_rows, inputs, dist, lyap, entry)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class SimConfig:
    paths: int = 30
    horizon: int = 600
    seed: int = 0
    init_low: tuple[float, ...] | float = -1000.0
    init_high: tuple[float, ...] | float = 1000.0

    def __post_init__(self) -> None:
        if self.paths < 1 or self.horizon < 1:
            raise ValueError("paths and horizon must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def bounds_for(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        lo = np.broadcast_to(np.asarray(self.init_low, dtype=float), (n,)).copy()
        hi = np.broadcast_to(np.asarray(self.init_high, dtype=float), (n,)).copy()
        if np.any(lo > hi):
            raise ValueError("init_low must not exceed init_high")
        return lo, hi

    @classmethod
    def around_box(cls, box: Hyperbox, seed: int = 0, margin: float = 1000.0, **kw) -> SimConfig:
        """Initial states uniform in ``[lo_i - margin, hi_i + margin]``."""
        return cls(
            seed=seed,
            init_low=tuple(v - margin for v in box.lo),
            init_high=tuple(v + margin for v in box.hi),
            **kw,
        )


def sample_path(model: NetworkModel, config: SimConfig, k: int) -> tuple[tuple[float, ...], np.ndarray, int]:
    """Initial state and disturbance sequence for path ``k``."""
    seed = path_seed(config.seed, k)
    rng = np.random.Generator(np.random.Philox(key=seed))
    lo, hi = config.bounds_for(model.n)
    klo = np.ceil(lo * GRID).astype(np.int64)
    khi = np.floor(hi * GRID).astype(np.int64)
    x0 = tuple(float(v) / GRID for v in rng.integers(klo, khi, endpoint=True))
    idx = rng.integers(0, len(model.W), size=(config.horizon, model.p))
    if model.W.is_interval:
        W = idx + model.W.min
    else:
        W = np.asarray(model.W.values, dtype=np.int64)[idx]
    return x0, W, seed


@dataclass(frozen=True)
class PathReport:
    path: int
    seed: int
    x0: tuple[float, ...]
    entry_time: int | None
    post_entry_violations: int
    min_decrement: float | None  # over steps with x(t), x(t+1) both outside
    max_decrement: float | None
    non_decreasing_steps: int  # outside steps where V failed to drop

    def to_json(self) -> dict:
        return {
            "path": self.path,
            "seed": self.seed,
            "x0": list(self.x0),
            "entry_time": self.entry_time,
            "post_entry_violations": self.post_entry_violations,
            "min_decrement": self.min_decrement,
            "max_decrement": self.max_decrement,
            "non_decreasing_steps": self.non_decreasing_steps,
        }


@dataclass(frozen=True)
class MonteCarloReport:
    paths: tuple[PathReport, ...]
    trajectories: tuple[Trajectory, ...] = field(default=(), repr=False)

    @property
    def all_entered(self) -> bool:
        return all(p.entry_time is not None for p in self.paths)

    @property
    def total_violations(self) -> int:
        return sum(p.post_entry_violations for p in self.paths)

    @property
    def min_decrement(self) -> float | None:
        vals = [p.min_decrement for p in self.paths if p.min_decrement is not None]
        return min(vals) if vals else None

    def to_json(self) -> dict:
        return {
            "all_entered": self.all_entered,
            "post_entry_violations": self.total_violations,
            "min_decrement": self.min_decrement,
            "paths": [p.to_json() for p in self.paths],
        }


def _path_report(k: int, seed: int, traj: Trajectory) -> PathReport:
    V = traj.lyapunov
    entry = traj.entry_time
    post = 0
    if entry is not None:
        post = sum(1 for v in V[entry:] if v > 0.0)
    decs = [V[t] - V[t + 1] for t in range(len(V) - 1) if V[t] > 0.0 and V[t + 1] > 0.0]
    stalls = sum(1 for t in range(len(V) - 1) if V[t] > 0.0 and not V[t + 1] < V[t])
    return PathReport(
        k,
        seed,
        traj.states[0],
        entry,
        post,
        min(decs) if decs else None,
        max(decs) if decs else None,
        stalls,
    )


def monte_carlo(
    model: NetworkModel,
    law: ControlLaw,
    box: Hyperbox,
    config: SimConfig = SimConfig(),
    keep_trajectories: bool = True,
    workers: int | None = None,
) -> MonteCarloReport:
    """Run ``config.paths`` seeded closed-loop paths and summarize them."""

    def run(k: int):
        x0, W, seed = sample_path(model, config, k)
        traj = simulate(model, law, x0, W.tolist(), box)
        return _path_report(k, seed, traj), traj

    results = ordered_map(run, range(config.paths), workers)
    reports = tuple(r for r, _ in results)
    trajs = tuple(t for _, t in results) if keep_trajectories else ()
    return MonteCarloReport(reports, trajs)


def lyapunov_audit(traj: Trajectory, box: Hyperbox, delta: float) -> Verdict:
    """Check strict decrease of ``V`` outside the box, and a drop of at least
    ``delta`` whenever the next state is still outside."""
    V = traj.lyapunov or tuple(lyapunov(x, box) for x in traj.states)
    for t in range(len(V) - 1):
        if V[t] == 0.0:
            continue
        if not V[t + 1] < V[t]:
            return Verdict(REFUTED, {"step": t, "V": V[t], "V_next": V[t + 1]}, "V did not decrease outside the box")
        if V[t + 1] > 0.0 and V[t + 1] > V[t] - delta:
            return Verdict(
                REFUTED,
                {"step": t, "V": V[t], "V_next": V[t + 1], "delta": delta},
                "V decreased by less than delta between two outside states",
            )
    return Verdict(CERTIFIED, message="Lyapunov decrease holds along the trajectory")


def entry_bound(x0: Sequence[float], box: Hyperbox, delta: float) -> int:
    """Worst-case entry time ``ceil(V(x0) / delta) + 1`` for an attractive law."""
    return math.ceil(lyapunov(x0, box) / delta) + 1


# ---------------------------------------------------------------------------
# SVG


def trajectory_svg(traj: Trajectory, box: Hyperbox, width: int = 800, height: int = 400) -> str:
    """Line chart of every coordinate against time; box bounds dashed."""
    states = np.array(traj.states)
    T = states.shape[0] - 1
    lo = min(float(states.min()), min(box.lo))
    hi = max(float(states.max()), max(box.hi))
    if hi == lo:
        hi = lo + 1.0
    pad = 40
    palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]

    def sx(t: float) -> float:
        return pad + (width - 2 * pad) * (t / max(T, 1))

    def sy(v: float) -> float:
        return height - pad - (height - 2 * pad) * (v - lo) / (hi - lo)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{pad}" y="{pad - 10}" font-size="12">x_i(t), t = 0..{T}</text>',
    ]
    for i in range(states.shape[1]):
        color = palette[i % len(palette)]
        pts = " ".join(f"{sx(t):.2f},{sy(v):.2f}" for t, v in enumerate(states[:, i]))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        for bound in (box.lo[i], box.hi[i]):
            y = sy(bound)
            parts.append(
                f'<line x1="{pad}" y1="{y:.2f}" x2="{width - pad}" y2="{y:.2f}" '
                f'stroke="{color}" stroke-dasharray="6,4" stroke-width="0.8"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
