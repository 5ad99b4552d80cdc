"""Exact certification of boxes and laws, plus the convex-hull diagnostics.

The main tool is :func:`verify_piecewise_law`. On each region where a
piecewise-constant law is constant, the closed-loop map is the translation
``x -> x + Bu - Dw``, so the region stays in the box for every ``w`` iff its
infimum plus the smallest increment and its supremum plus the largest
increment stay inside, row by row. That makes the check a decision procedure
for this law class, with no sampling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from finbox.conditions import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    candidate_table,
    check_existence,
    bounds as witness_bounds,
)
from finbox.lp import Constraint, LpProblem, solve
from finbox.model import (
    Cell,
    ControlLaw,
    Hyperbox,
    Interval,
    LawError,
    ModelError,
    NetworkModel,
    SignVertex,
    box_vertices,
)
from finbox.worstcase import increment_interval, model_extremes

DISTURBANCE_CAP = 10**5
INTERIOR_TOL = 1e-9

CERTIFIED = "certified"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"


class DomainError(LawError):
    """The law leaves part of the box uncovered."""


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: dict | None = None
    message: str = ""
    details: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED

    def to_json(self) -> dict:
        doc = {"status": self.status, "message": self.message}
        if self.witness is not None:
            doc["witness"] = self.witness
        if self.details:
            doc["details"] = self.details
        return doc


# ---------------------------------------------------------------------------
# Vertex necessity


def vertex_necessity(model: NetworkModel, box: Hyperbox, law: ControlLaw) -> Verdict:
    """Check that the law picks a sign-consistent control at every box vertex.

    Necessary for invariance, not sufficient.
    """
    law.check_against(model)
    for x in box_vertices(box):
        z = tuple(0 if xi == lo else 1 for xi, lo in zip(x, box.lo))
        u = law(x)
        iv = increment_interval(model, u)
        for i, bit in enumerate(z):
            if bit == 0 and iv.lo[i] < 0:
                w = iv.w_lo[i]
                return Verdict(
                    REFUTED,
                    _replay_witness(model, x, u, w, i),
                    f"vertex {x}: control {u} can push coordinate {i + 1} below the box",
                )
            if bit == 1 and iv.hi[i] > 0:
                w = iv.w_hi[i]
                return Verdict(
                    REFUTED,
                    _replay_witness(model, x, u, w, i),
                    f"vertex {x}: control {u} can push coordinate {i + 1} above the box",
                )
    return Verdict(CERTIFIED, message="every vertex control is sign-consistent")


def _replay_witness(model, x, u, w, row) -> dict:
    return {
        "state": list(x),
        "control": list(u),
        "disturbance": list(w),
        "row": row + 1,
        "successor": list(model.step(x, u, w)),
    }


# ---------------------------------------------------------------------------
# Exact piecewise verification


def _box_intervals(box: Hyperbox) -> list[Interval]:
    return [Interval(lo, hi, True, True) for lo, hi in zip(box.lo, box.hi)]


def _threshold_regions(law: ControlLaw, box: Hyperbox):
    biv = _box_intervals(box)
    for cell in law.as_cells():
        yield tuple(c.intersect(b) for c, b in zip(cell.bounds, biv)), cell.u


def _first_match_regions(cells: Sequence[Cell], box: Hyperbox):
    """Split the box into elementary pieces and give each to its first cell."""
    axes = []
    for i, (lo, hi) in enumerate(zip(box.lo, box.hi)):
        pts = {lo, hi}
        for c in cells:
            for v in (c.bounds[i].lo, c.bounds[i].hi):
                if lo < v < hi:
                    pts.add(v)
        pts = sorted(pts)
        pieces = [Interval(pts[0], pts[0], True, True)]
        for a, b in zip(pts, pts[1:]):
            pieces.append(Interval(a, b, False, False))
            pieces.append(Interval(b, b, True, True))
        axes.append(pieces)

    def inside(piece: Interval, iv: Interval) -> bool:
        if piece.lo == piece.hi:
            return iv.contains(piece.lo)
        return iv.lo <= piece.lo and piece.hi <= iv.hi

    for combo in itertools.product(*axes):
        for cell in cells:
            if all(inside(p, iv) for p, iv in zip(combo, cell.bounds)):
                yield combo, cell.u
                break
        else:
            point = [p.lo if p.lo == p.hi else (p.lo + p.hi) / 2 for p in combo]
            raise DomainError(f"law is undefined at x={point} inside the box")


def _representative(iv: Interval) -> float:
    if iv.lo == iv.hi or iv.lo_closed:
        return iv.lo
    if iv.hi_closed:
        return iv.hi
    return (iv.lo + iv.hi) / 2


def verify_piecewise_law(model: NetworkModel, box: Hyperbox, law: ControlLaw) -> Verdict:
    """Decide robust invariance of ``box`` under a piecewise-constant law."""
    law.check_against(model)
    if box.n != model.n:
        raise ModelError("box dimension does not match the model")
    regions = _threshold_regions(law, box) if law.kind == "threshold" else _first_match_regions(law.cells, box)
    blo, bhi = box.lo, box.hi
    checked = 0
    for region, u in regions:
        if any(iv.empty for iv in region):
            continue
        checked += 1
        inc = increment_interval(model, u)
        for i, iv in enumerate(region):
            if iv.lo + inc.lo[i] < blo[i]:
                x = [_representative(r) for r in region]
                if iv.lo_closed:
                    x[i] = iv.lo
                else:
                    x[i] = (iv.lo + min(iv.hi, blo[i] - inc.lo[i])) / 2
                return Verdict(
                    REFUTED,
                    _replay_witness(model, x, u, inc.w_lo[i], i),
                    f"coordinate {i + 1} can leave the box from below",
                )
            if iv.hi + inc.hi[i] > bhi[i]:
                x = [_representative(r) for r in region]
                if iv.hi_closed:
                    x[i] = iv.hi
                else:
                    x[i] = (max(iv.lo, bhi[i] - inc.hi[i]) + iv.hi) / 2
                return Verdict(
                    REFUTED,
                    _replay_witness(model, x, u, inc.w_hi[i], i),
                    f"coordinate {i + 1} can leave the box from above",
                )
    return Verdict(CERTIFIED, message="box is robustly invariant under the law", details={"regions": checked})


# ---------------------------------------------------------------------------
# Scalar minimal box


@dataclass(frozen=True)
class CoverResult:
    K: int
    covered: bool
    stay: tuple[tuple[int, int], ...]  # non-empty stay intervals, sorted
    gap: tuple[float, float] | None = None  # uncovered open interval (or [0, b) start gap)
    controls: tuple[tuple[int, ...], ...] = ()

    @property
    def gap_point(self) -> float | None:
        if self.gap is None:
            return None
        return (self.gap[0] + self.gap[1]) / 2


def _scalar_increments(model: NetworkModel, cap: int) -> list[tuple[int, int, tuple[int, ...]]]:
    table = candidate_table(model, cap)
    ext = model_extremes(model)
    seen = {}
    for k in range(len(table)):
        b = int(table.Bu[k, 0])
        key = (b - ext.dmax[0], b - ext.dmin[0])
        if key not in seen:
            seen[key] = table.control(k)
    return [(lo, hi, u) for (lo, hi), u in seen.items()]


def interval_cover(model: NetworkModel, K: int, cap: int = DEFAULT_ENUMERATION_CAP, _incs=None) -> CoverResult:
    """Exact test: do the per-control stay intervals cover ``[0, K]``?

    Control ``u`` keeps ``x`` in ``[0, K]`` for every ``w`` iff
    ``max(0, -lo(u)) <= x <= min(K, K - hi(u))``.
    """
    if model.n != 1:
        raise ModelError("interval cover is defined for n = 1 only")
    incs = _incs if _incs is not None else _scalar_increments(model, cap)
    stay = []
    for lo, hi, u in incs:
        a, b = max(0, -lo), min(K, K - hi)
        if a <= b:
            stay.append((a, b, u))
    stay.sort(key=lambda t: (t[0], -t[1]))
    reach = None  # [0, reach] covered so far
    for a, b, _u in stay:
        if reach is None:
            if a > 0:
                return CoverResult(K, False, tuple((s[0], s[1]) for s in stay), (0.0, float(a)))
            reach = b
        elif a > reach:
            return CoverResult(K, False, tuple((s[0], s[1]) for s in stay), (float(reach), float(a)))
        else:
            reach = max(reach, b)
    if reach is None:
        return CoverResult(K, False, (), (0.0, float(K)))
    if reach < K:
        return CoverResult(K, False, tuple((s[0], s[1]) for s in stay), (float(reach), float(K)))
    return CoverResult(K, True, tuple((s[0], s[1]) for s in stay), None, tuple(s[2] for s in stay))


def _cover_law(model: NetworkModel, K: int, incs) -> ControlLaw:
    """Disjoint cells ``[0, b1], (b1, b2], ...`` chosen greedily from the stay intervals."""
    stay = []
    for lo, hi, u in incs:
        a, b = max(0, -lo), min(K, K - hi)
        if a <= b:
            stay.append((a, b, u))
    cells = []
    reach = None
    while reach is None or reach < K:
        cands = [s for s in stay if (s[0] <= 0 if reach is None else s[0] <= reach)]
        a, b, u = max(cands, key=lambda s: (s[1], -s[0]))
        if reach is None:
            cells.append(Cell((Interval(0, b, True, True),), u))
        else:
            cells.append(Cell((Interval(reach, b, False, True),), u))
        reach = b
    return ControlLaw.cellwise(cells)


@dataclass(frozen=True)
class MinimalBox:
    K: int
    law: ControlLaw
    cover: CoverResult
    below: CoverResult | None  # the failed test at K - 1 (None when K = 0)

    @property
    def box(self) -> Hyperbox:
        return Hyperbox((float(self.K),))


def scalar_minimal_box(model: NetworkModel, cap: int = DEFAULT_ENUMERATION_CAP) -> MinimalBox | None:
    """Least integer ``K`` with ``[0, K]`` robustly invariant (``n = 1``).

    Scans ``K = 0, 1, ..., 2 L^o``; ``2 L^o`` always works when an invariant
    interval exists at all. Returns ``None`` only if nothing up to that bound
    passes, which would contradict the constructive bound.
    """
    if model.n != 1:
        raise ModelError(f"scalar minimal box needs n = 1, got n = {model.n}")
    verdict = check_existence(model, cap)
    if not verdict.holds:
        raise ModelError("existence condition fails: no invariant interval exists")
    limit = 2 * witness_bounds(model, verdict.witnesses).L_o[0]
    incs = _scalar_increments(model, cap)
    prev = None
    for K in range(0, limit + 1):
        res = interval_cover(model, K, cap, incs)
        if res.covered:
            return MinimalBox(K, _cover_law(model, K, incs), res, prev)
        prev = res
    return None


# ---------------------------------------------------------------------------
# Scalar non-attractivity


def scalar_nonattractivity(model: NetworkModel, L: float) -> Verdict:
    """Refute global attractivity of ``[0, L]`` when a strict set is empty (``n = 1``).

    If no control has a strictly positive worst-case increment, the
    disturbance maximizing ``Dw`` keeps every state left of 0 from moving
    right; symmetrically on the right of ``L``.
    """
    if model.n != 1:
        raise ModelError(f"scalar non-attractivity needs n = 1, got n = {model.n}")
    table = candidate_table(model)
    ext = model_extremes(model)
    Bu = table.Bu[:, 0]
    sup_lo = int(Bu.max()) - ext.dmax[0]  # best worst-case increment upward
    inf_hi = int(Bu.min()) - ext.dmin[0]  # best worst-case increment downward
    if sup_lo <= 0:
        return Verdict(
            REFUTED,
            {"side": "left", "disturbance": list(ext.wmax[0]), "sup_increment": sup_lo, "L": L},
            "no control strictly increases the state against the worst disturbance; "
            "states below 0 never move right",
        )
    if inf_hi >= 0:
        return Verdict(
            REFUTED,
            {"side": "right", "disturbance": list(ext.wmin[0]), "inf_increment": inf_hi, "L": L},
            f"no control strictly decreases the state against the worst disturbance; "
            f"states above {L} never move left",
        )
    return Verdict(INCONCLUSIVE, message="both strict sets are non-empty")


# ---------------------------------------------------------------------------
# Orthant reformulation


def _disturbance_points(model: NetworkModel):
    if len(model.W) ** model.p <= DISTURBANCE_CAP:
        vals = model.W.enumerate(DISTURBANCE_CAP)
        return itertools.product(vals, repeat=model.p)
    return None


def orthant_witness_check(model: NetworkModel, z, u: Sequence[int], open: bool = False) -> bool:
    """Is ``Bu - D W^p`` inside the (closed or open) orthant of vertex ``z``?

    Enumerates ``W^p`` directly when it is small enough; otherwise only the
    per-row extreme disturbances are checked, which is equivalent.
    """
    z = z if isinstance(z, SignVertex) else SignVertex(tuple(z))
    u = model.check_control(u)
    sigma = z.orthant
    Bu = model.Bu(u)
    points = _disturbance_points(model)
    if points is None:
        ext = model_extremes(model)
        points = set(ext.wmin) | set(ext.wmax)
    for w in points:
        y = [b - d for b, d in zip(Bu, model.Dw(w))]
        for s, yi in zip(sigma, y):
            v = s * yi
            if v < 0 or (open and v == 0):
                return False
    return True


# ---------------------------------------------------------------------------
# Hull diagnostics


def _hull_lp(vertices: list[tuple[int, ...]], p: Sequence[float], direction: tuple[int, int] | None):
    """Feasibility (direction None) or max step ``eps`` with ``p + eps*dir`` in the hull."""
    k = len(vertices)
    n = len(p)
    cons = []
    for i in range(n):
        row = [float(v[i]) for v in vertices]
        if direction is not None:
            row.append(-float(direction[1]) if direction[0] == i else 0.0)
        cons.append(Constraint(tuple(row), "=", float(p[i])))
    ones = [1.0] * k + ([0.0] if direction is not None else [])
    cons.append(Constraint(tuple(ones), "=", 1.0))
    nvar = k + (1 if direction is not None else 0)
    objective = [0.0] * nvar
    if direction is not None:
        objective[-1] = 1.0
    return solve(LpProblem(tuple(objective), tuple(cons)))


def hull_inclusion(
    model: NetworkModel,
    strict_interior: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
    disturbance_cap: int = DISTURBANCE_CAP,
) -> Verdict:
    """``hull(B U^m) ⊇ hull(D W^p)`` (or interior inclusion when ``strict_interior``)."""
    table = candidate_table(model, cap)
    if len(model.W) ** model.p > disturbance_cap:
        raise EnumerationCapError(f"|W|^p exceeds the disturbance cap {disturbance_cap}")
    verts = sorted({tuple(int(v) for v in row) for row in table.Bu.tolist()})
    seen = set()
    lps = 0
    for w in itertools.product(model.W.enumerate(disturbance_cap), repeat=model.p):
        p = model.Dw(w)
        if p in seen:
            continue
        seen.add(p)
        sol = _hull_lp(verts, p, None)
        lps += 1
        if not sol.optimal:
            return Verdict(
                REFUTED,
                {"disturbance": list(w), "point": list(p), "reason": "outside hull"},
                f"Dw = {p} is not in the convex hull of B U^m",
                {"lps": lps},
            )
        if strict_interior:
            for i in range(model.n):
                for s in (1, -1):
                    sol = _hull_lp(verts, p, (i, s))
                    lps += 1
                    eps = sol.point[-1] if sol.optimal else math.inf
                    if sol.optimal and eps <= INTERIOR_TOL:
                        return Verdict(
                            REFUTED,
                            {
                                "disturbance": list(w),
                                "point": list(p),
                                "reason": "on boundary",
                                "axis": i + 1,
                                "direction": s,
                            },
                            f"Dw = {p} is not in the interior of hull(B U^m)",
                            {"lps": lps},
                        )
    which = "interior of " if strict_interior else ""
    return Verdict(CERTIFIED, message=f"hull(D W^p) lies in the {which}hull(B U^m)", details={"lps": lps})
