"""Vertex control sets and the two existence conditions.

For a vertex ``z`` the set ``U_z`` holds every ``u`` whose worst-case
increment is sign-consistent with ``z``: ``[Bu - Dw]_i >= 0`` for all ``w``
on rows with ``z_i = 0`` and ``<= 0`` on rows with ``z_i = 1``. ``U_z^*`` is
the strict version. The existence condition asks ``U_z`` to be non-empty for
every vertex (necessary and sufficient for an invariant box to exist); the
attractivity condition asks the same of ``U_z^*`` (sufficient for a globally
attractive one).

Everything is decided in exact integer arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from finbox import kernels
from finbox.model import (
    Hyperbox,
    ModelError,
    NetworkModel,
    SignVertex,
    iter_vertices,
    vertex_count,
    vertex_from_index,
    vertex_index,
    vertex_key,
)
from finbox.worstcase import increment_interval, model_extremes

DEFAULT_ENUMERATION_CAP = 2**20


class EnumerationCapError(ModelError):
    """Exhaustive enumeration of U^m refused; use the LP heuristic instead."""


def _as_vertex(z) -> SignVertex:
    return z if isinstance(z, SignVertex) else SignVertex(tuple(int(b) for b in z))


def membership(model: NetworkModel, u: Sequence[int], z, strict: bool = False) -> bool:
    """Whether ``u`` lies in ``U_z`` (``U_z^*`` when ``strict``)."""
    z = _as_vertex(z)
    iv = increment_interval(model, u)
    s = 1 if strict else 0
    for bit, lo, hi in zip(z.z, iv.lo, iv.hi):
        if bit == 0 and lo < s:
            return False
        if bit == 1 and hi > -s:
            return False
    return True


# ---------------------------------------------------------------------------
# Candidate table


@dataclass(frozen=True, eq=False)
class CandidateTable:
    """Every ``u`` in ``U^m`` (lexicographic by alphabet index) with its ``Bu``."""

    values: np.ndarray  # alphabet, sorted
    m: int
    Bu: np.ndarray  # (r**m, n) int64
    dmax: np.ndarray
    dmin: np.ndarray

    def __len__(self) -> int:
        return self.Bu.shape[0]

    def control(self, k: int) -> tuple[int, ...]:
        r = len(self.values)
        digits = []
        for _ in range(self.m):
            k, d = divmod(k, r)
            digits.append(int(self.values[d]))
        return tuple(reversed(digits))


_TABLE_CACHE: dict[tuple, tuple[NetworkModel, CandidateTable]] = {}


def candidate_table(model: NetworkModel, cap: int = DEFAULT_ENUMERATION_CAP) -> CandidateTable:
    r = len(model.U)
    if r**model.m > cap:
        hint = " (interval alphabet: use --mode lp)" if model.U.is_interval else ""
        raise EnumerationCapError(
            f"|U|^m = {r}^{model.m} candidates exceeds the enumeration cap {cap}; "
            f"use the LP heuristic mode{hint}"
        )
    key = (id(model), cap)
    hit = _TABLE_CACHE.get(key)
    if hit is not None and hit[0] is model:
        return hit[1]
    values = np.array(model.U.enumerate(cap), dtype=np.int64)
    ext = model_extremes(model)
    dmin, dmax = ext.as_arrays()
    table = CandidateTable(values, model.m, kernels.control_increments(model.B, values), dmax, dmin)
    if len(_TABLE_CACHE) > 32:
        _TABLE_CACHE.clear()
    _TABLE_CACHE[key] = (model, table)
    return table


# ---------------------------------------------------------------------------
# Vertex sets


@dataclass(frozen=True)
class VertexSets:
    z: SignVertex
    members: tuple[tuple[int, ...], ...]
    strict_members: tuple[tuple[int, ...], ...]


def vertex_sets(model: NetworkModel, z, cap: int = DEFAULT_ENUMERATION_CAP) -> VertexSets:
    z = _as_vertex(z)
    if len(z.z) != model.n:
        raise ModelError(f"vertex has {len(z.z)} bits but n={model.n}")
    table = candidate_table(model, cap)
    out = []
    for strict in (False, True):
        mask = kernels.member_mask(table.Bu, table.dmax, table.dmin, z.index, strict)
        out.append(tuple(table.control(int(k)) for k in np.flatnonzero(mask)))
    return VertexSets(z, out[0], out[1])


# ---------------------------------------------------------------------------
# Witness maps and verdicts


@dataclass(frozen=True)
class WitnessMap:
    """A control ``u_z`` for every vertex, stored in vertex-index order."""

    witnesses: tuple[tuple[int, ...], ...]
    strict: bool = False

    @property
    def n(self) -> int:
        return len(self.witnesses).bit_length() - 1

    def __getitem__(self, z) -> tuple[int, ...]:
        if isinstance(z, int):
            return self.witnesses[z]
        if isinstance(z, str):
            z = tuple(int(c) for c in z)
        if isinstance(z, SignVertex):
            z = z.z
        return self.witnesses[vertex_index(z)]

    def items(self):
        for z in iter_vertices(self.n):
            yield z, self.witnesses[vertex_index(z)]

    def as_dict(self) -> dict[str, tuple[int, ...]]:
        return {vertex_key(z): u for z, u in self.items()}

    def to_json(self) -> dict[str, str]:
        return {vertex_key(z): json.dumps(list(u), separators=(",", ":")) for z, u in self.items()}

    @classmethod
    def from_mapping(cls, n: int, mapping, strict: bool = False) -> WitnessMap:
        table = []
        for z in iter_vertices(n):
            for key in (z, vertex_key(z), vertex_index(z)):
                if key in mapping:
                    table.append(tuple(int(v) for v in mapping[key]))
                    break
            else:
                raise ModelError(f"witness map has no entry for vertex {vertex_key(z)}")
        return cls(tuple(table), strict)

    def validate(self, model: NetworkModel, strict: bool | None = None) -> list[tuple[int, ...]]:
        """Vertices whose witness fails membership (empty list when valid)."""
        strict = self.strict if strict is None else strict
        if len(self.witnesses) != vertex_count(model.n):
            raise ModelError(f"witness map has {len(self.witnesses)} entries, expected {vertex_count(model.n)}")
        return [z for z, u in self.items() if not membership(model, u, z, strict)]


@dataclass(frozen=True)
class ConditionVerdict:
    condition: str  # "(4)" or "(5)"
    holds: bool
    witnesses: WitnessMap | None = None
    failing: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def first_failure(self) -> tuple[int, ...] | None:
        return self.failing[0] if self.failing else None

    def to_json(self) -> dict:
        doc: dict = {"condition": self.condition, "holds": self.holds}
        if self.witnesses is not None:
            doc["witnesses"] = self.witnesses.to_json()
        if self.failing:
            doc["failing"] = [vertex_key(z) for z in self.failing]
        return doc


def _check(model: NetworkModel, strict: bool, cap: int) -> ConditionVerdict:
    table = candidate_table(model, cap)
    first = kernels.first_members(table.Bu, table.dmax, table.dmin, strict)
    name = "(5)" if strict else "(4)"
    failing = tuple(vertex_from_index(k, model.n) for k in np.flatnonzero(first < 0))
    if failing:
        return ConditionVerdict(name, False, None, failing)
    wm = WitnessMap(tuple(table.control(int(k)) for k in first), strict)
    return ConditionVerdict(name, True, wm)


def check_existence(model: NetworkModel, cap: int = DEFAULT_ENUMERATION_CAP) -> ConditionVerdict:
    """Existence condition: is ``U_z`` non-empty for every vertex?

    On success the witness map holds the lexicographically smallest member
    of each ``U_z``; on failure ``failing`` lists the empty vertices in
    binary counting order.
    """
    return _check(model, False, cap)


def check_attractivity_sufficient(model: NetworkModel, cap: int = DEFAULT_ENUMERATION_CAP) -> ConditionVerdict:
    """Attractivity condition: is ``U_z^*`` non-empty for every vertex?"""
    return _check(model, True, cap)


# ---------------------------------------------------------------------------
# Bounds


@dataclass(frozen=True)
class Bounds:
    L_o: tuple[int, ...]
    L_star: tuple[int, ...] | None = None
    Delta: int | None = None

    @property
    def L(self) -> tuple[int, ...]:
        return self.L_star if self.L_star is not None else self.L_o

    @property
    def box(self) -> Hyperbox:
        return Hyperbox(tuple(2 * v for v in self.L))

    def to_json(self) -> dict:
        return {
            "L_o": list(self.L_o),
            "L_star": None if self.L_star is None else list(self.L_star),
            "Delta": self.Delta,
            "box": list(self.box.upper),
        }


def bounds(model: NetworkModel, witnesses: WitnessMap) -> Bounds:
    """Worst-case increment magnitudes over the chosen witnesses.

    ``L_i = max_{z,w} |[B u_z - D w]_i|``. For strict maps also
    ``Delta = min_{i,z,w} |[B u_z - D w]_i|`` (at least 1).
    """
    if len(witnesses.witnesses) != vertex_count(model.n):
        raise ModelError("witness map does not cover every vertex")
    L = [0] * model.n
    delta = None
    for _z, u in witnesses.items():
        iv = increment_interval(model, u)
        for i, (lo, hi) in enumerate(zip(iv.lo, iv.hi)):
            L[i] = max(L[i], abs(lo), abs(hi))
            closest = 0 if lo <= 0 <= hi else min(abs(lo), abs(hi))
            delta = closest if delta is None else min(delta, closest)
    if witnesses.strict:
        if delta is None or delta < 1:
            raise ModelError("witness map is flagged strict but has a zero increment")
        return Bounds(tuple(L), tuple(L), delta)
    return Bounds(tuple(L))
