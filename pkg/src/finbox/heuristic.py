"""LP relaxation plus integer rounding for large interval control alphabets.

For each vertex ``z`` a small LP looks for a fractional control whose
worst-case increment has margin ``lambda >= epsilon`` in the direction
``z`` asks for. The LP point is rounded, repaired locally if needed, and
re-checked with exact integer strict membership. The float LP never decides
anything on its own: a vertex either gets an exactly verified witness or the
heuristic reports that it failed there. Failure is not a proof that
``U_z^*`` is empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from finbox.conditions import Bounds, WitnessMap, bounds, membership
from finbox.lp import Constraint, LpProblem, solve
from finbox.model import NetworkModel, SignVertex, iter_vertices, vertex_key
from finbox.parallel import ordered_map
from finbox.worstcase import model_extremes

MAX_LP_DIMENSION = 24


@dataclass(frozen=True)
class HeuristicConfig:
    """``epsilon`` floors the LP margin; ``repair_radius`` bounds the ±k
    single-coordinate adjustments tried after rounding.

    ``maximize_margin`` switches the LP objective from ``min lambda`` to
    ``max lambda`` (pushes controls to the alphabet ends). ``selection``
    picks the point on the optimal face: ``"vertex"`` keeps the simplex
    basic solution, ``"center"`` re-centers it (largest ball inside the face
    at the optimal margin), which trades a larger box for rounding headroom.
    """

    epsilon: float = 1.0
    repair_radius: int = 1
    maximize_margin: bool = False
    selection: str = "vertex"

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.repair_radius < 0:
            raise ValueError("repair_radius must be non-negative")
        if self.selection not in ("vertex", "center"):
            raise ValueError(f"unknown selection {self.selection!r}")


class HeuristicFailure(RuntimeError):
    """The LP heuristic found no verified strict witness at some vertex."""

    def __init__(self, z: tuple[int, ...], stage: str, detail: str = ""):
        self.z = z
        self.stage = stage
        msg = f"heuristic failed at vertex {vertex_key(z)} (stage: {stage})"
        super().__init__(msg + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class VertexLpResult:
    z: tuple[int, ...]
    feasible: bool
    u: tuple[float, ...] = ()
    margin: float = math.nan


def _z(z) -> tuple[int, ...]:
    return z.z if isinstance(z, SignVertex) else tuple(int(b) for b in z)


def vertex_witness_lp(model: NetworkModel, z, config: HeuristicConfig = HeuristicConfig()) -> VertexLpResult:
    """Solve the vertex LP over ``(u, lambda)``.

    ``[Bu]_i - dmax_i >= lambda`` on rows with ``z_i = 0``,
    ``[Bu]_i - dmin_i <= -lambda`` on rows with ``z_i = 1``,
    ``min U <= u_j <= max U`` and ``lambda >= epsilon``; minimize ``lambda``.
    """
    z = _z(z)
    ext = model_extremes(model)
    m = model.m
    cons = []
    for i, row in enumerate(model.B.tolist()):
        if z[i] == 0:
            cons.append(Constraint(tuple(row) + (-1.0,), ">=", ext.dmax[i]))
        else:
            cons.append(Constraint(tuple(row) + (1.0,), "<=", ext.dmin[i]))
    bnds = tuple((float(model.U.min), float(model.U.max)) for _ in range(m)) + ((config.epsilon, math.inf),)
    objective = (0.0,) * m + (1.0,)
    problem = LpProblem(objective, tuple(cons), bnds, maximize=config.maximize_margin)
    sol = solve(problem)
    if not sol.optimal:
        return VertexLpResult(z, False)
    u, lam = sol.point[:m], sol.point[m]
    if config.selection == "center":
        u = _center_on_face(model, z, lam, u)
    return VertexLpResult(z, True, u, lam)


def _center_on_face(model: NetworkModel, z: tuple[int, ...], lam: float, fallback) -> tuple[float, ...]:
    """Chebyshev center of ``{u : margins >= lam, min U <= u <= max U}``."""
    ext = model_extremes(model)
    m = model.m
    cons = []
    for i, row in enumerate(model.B.tolist()):
        norm = math.sqrt(sum(v * v for v in row))
        if z[i] == 0:
            cons.append(Constraint(tuple(row) + (-norm,), ">=", ext.dmax[i] + lam))
        else:
            cons.append(Constraint(tuple(-v for v in row) + (-norm,), ">=", lam - ext.dmin[i]))
    for j in range(m):
        e = [0.0] * (m + 1)
        e[j], e[m] = 1.0, -1.0
        cons.append(Constraint(tuple(e), ">=", model.U.min))
        e[j] = -1.0
        cons.append(Constraint(tuple(e), ">=", -model.U.max))
    bnds = tuple((-math.inf, math.inf) for _ in range(m)) + ((0.0, math.inf),)
    sol = solve(LpProblem((0.0,) * m + (1.0,), tuple(cons), bnds))
    return sol.point[:m] if sol.optimal else tuple(fallback)


def _round_half_up(v: float) -> int:
    return math.floor(v + 0.5)


def round_and_verify(
    model: NetworkModel, z, u_frac: Sequence[float], config: HeuristicConfig = HeuristicConfig()
) -> tuple[int, ...] | None:
    """Round ``u_frac`` to an exactly verified strict witness, or ``None``.

    Components are rounded half-up and clamped to the alphabet range. If
    that point fails, single-coordinate moves ``-d`` then ``+d`` are tried
    for ``d = 1 .. repair_radius``, coordinate 1 first.
    """
    z = _z(z)
    lo, hi = model.U.min, model.U.max
    base = [min(hi, max(lo, _round_half_up(v))) for v in u_frac]

    def ok(u: list[int]) -> bool:
        return all(v in model.U for v in u) and membership(model, u, z, strict=True)

    if ok(base):
        return tuple(base)
    for d in range(1, config.repair_radius + 1):
        for j in range(model.m):
            for s in (-d, d):
                cand = list(base)
                cand[j] += s
                if lo <= cand[j] <= hi and ok(cand):
                    return tuple(cand)
    return None


def heuristic_witness_map(
    model: NetworkModel, config: HeuristicConfig = HeuristicConfig()
) -> tuple[WitnessMap, Bounds]:
    """Run LP + rounding at every vertex and assemble a verified strict map.

    Raises :class:`HeuristicFailure` naming the first failing vertex (in
    binary counting order) and whether the LP or the rounding failed.
    """
    if model.n > MAX_LP_DIMENSION:
        raise ValueError(f"n={model.n} exceeds the vertex LP guard ({MAX_LP_DIMENSION})")

    def one(z: tuple[int, ...]):
        res = vertex_witness_lp(model, z, config)
        if not res.feasible:
            return z, "lp", None
        u = round_and_verify(model, z, res.u, config)
        return z, "rounding", u

    results = ordered_map(one, list(iter_vertices(model.n)))
    table = []
    for z, stage, u in results:
        if u is None:
            raise HeuristicFailure(z, stage)
        table.append(u)
    wm = WitnessMap(tuple(table), strict=True)
    return wm, bounds(model, wm)
