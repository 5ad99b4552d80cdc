"""Core value types for finite-alphabet logistic networks.

The system is ``x(t+1) = x(t) + B u(t) - D w(t)`` with integer matrices and
integer alphabets. Every type here is immutable after construction.

Vertex conventions used throughout the package:

* a vertex ``z`` of the unit hypercube is a tuple of bits; ``z_i = 0`` means
  signature ``+`` (coordinate at its lower face), ``z_i = 1`` means ``-``;
* vertices are iterated in binary counting order with coordinate 1 as the
  least significant bit (``index = sum(z_i << i)``);
* serialized keys are bitstrings with coordinate 1 leftmost, so ``z = (0, 1)``
  is ``"01"``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

# Increments are added to float states; they must stay exactly representable.
FLOAT_EXACT_LIMIT = 2**53


class ModelError(ValueError):
    """Malformed or inconsistent model, law or box document."""


# ---------------------------------------------------------------------------
# Alphabets


@dataclass(frozen=True)
class Alphabet:
    """Finite, strictly increasing set of integers.

    Either an explicit list (``values``) or an integer interval stored by its
    endpoints (``interval``). Interval alphabets are never enumerated
    implicitly; call :meth:`enumerate` with a cap.
    """

    values: tuple[int, ...] | None = None
    interval: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if (self.values is None) == (self.interval is None):
            raise ModelError("alphabet needs exactly one of 'values' or 'interval'")
        if self.values is not None:
            vals = self.values
            if not vals:
                raise ModelError("alphabet must be non-empty")
            for v in vals:
                if isinstance(v, bool) or not isinstance(v, int):
                    raise ModelError(f"alphabet entry {v!r} is not an integer")
            for a, b in zip(vals, vals[1:]):
                if not a < b:
                    raise ModelError(f"alphabet not strictly increasing at {a}, {b}")
        else:
            lo, hi = self.interval
            for v in (lo, hi):
                if isinstance(v, bool) or not isinstance(v, int):
                    raise ModelError(f"interval endpoint {v!r} is not an integer")
            if lo > hi:
                raise ModelError(f"empty interval alphabet [{lo}, {hi}]")

    @classmethod
    def explicit(cls, values: Sequence[int]) -> Alphabet:
        return cls(values=tuple(values))

    @classmethod
    def integer_interval(cls, lo: int, hi: int) -> Alphabet:
        return cls(interval=(lo, hi))

    @property
    def is_interval(self) -> bool:
        return self.interval is not None

    @property
    def min(self) -> int:
        return self.values[0] if self.values is not None else self.interval[0]

    @property
    def max(self) -> int:
        return self.values[-1] if self.values is not None else self.interval[1]

    def __len__(self) -> int:
        if self.values is not None:
            return len(self.values)
        return self.interval[1] - self.interval[0] + 1

    def __contains__(self, v: object) -> bool:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            if isinstance(v, float) and v.is_integer():
                v = int(v)
            else:
                return False
        v = int(v)
        if self.values is not None:
            return v in self.values
        return self.interval[0] <= v <= self.interval[1]

    def value_at(self, k: int) -> int:
        if self.values is not None:
            return self.values[k]
        return self.interval[0] + k

    def enumerate(self, cap: int | None = None) -> tuple[int, ...]:
        if self.values is not None:
            return self.values
        if cap is not None and len(self) > cap:
            raise ModelError(f"refusing to enumerate {len(self)} interval values (cap {cap})")
        return tuple(range(self.interval[0], self.interval[1] + 1))

    def to_json(self) -> dict:
        if self.values is not None:
            return {"values": list(self.values)}
        return {"interval": list(self.interval)}

    @classmethod
    def from_json(cls, obj: object, name: str) -> Alphabet:
        if not isinstance(obj, dict):
            raise ModelError(f"field '{name}': expected an object with 'values' or 'interval'")
        if "values" in obj:
            vals = obj["values"]
            if not isinstance(vals, list):
                raise ModelError(f"field '{name}.values': expected a list")
            return cls(values=tuple(_as_int(v, f"{name}.values") for v in vals))
        if "interval" in obj:
            iv = obj["interval"]
            if not isinstance(iv, list) or len(iv) != 2:
                raise ModelError(f"field '{name}.interval': expected [lo, hi]")
            return cls(interval=(_as_int(iv[0], f"{name}.interval"), _as_int(iv[1], f"{name}.interval")))
        raise ModelError(f"field '{name}': expected 'values' or 'interval'")


def _as_int(v: object, where: str) -> int:
    if isinstance(v, bool):
        raise ModelError(f"field '{where}': boolean {v!r} is not an integer")
    if isinstance(v, int):
        return v
    if isinstance(v, float) and v.is_integer():
        return int(v)
    raise ModelError(f"field '{where}': entry {v!r} is not an integer")


def _frozen_array(rows: Sequence[Sequence[int]], shape: tuple[int, int]) -> np.ndarray:
    arr = np.array(rows, dtype=np.int64).reshape(shape)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Network model


@dataclass(frozen=True, eq=False)
class NetworkModel:
    """The integer network ``x+ = x + B u - D w`` with alphabets ``U`` and ``W``."""

    B: np.ndarray
    D: np.ndarray
    U: Alphabet
    W: Alphabet

    def __post_init__(self) -> None:
        B = np.asarray(self.B)
        D = np.asarray(self.D)
        if B.ndim != 2 or D.ndim != 2:
            raise ModelError("B and D must be 2-d matrices")
        if B.shape[0] != D.shape[0]:
            raise ModelError(f"B has {B.shape[0]} rows but D has {D.shape[0]}")
        if B.shape[1] == 0 or D.shape[1] == 0 or B.shape[0] == 0:
            raise ModelError("n, m and p must be positive")
        for name, M in (("B", B), ("D", D)):
            if not np.issubdtype(M.dtype, np.integer):
                if not np.all(np.equal(np.mod(M, 1), 0)):
                    raise ModelError(f"{name} has non-integer entries")
        object.__setattr__(self, "B", _frozen_array(B.tolist(), B.shape))
        object.__setattr__(self, "D", _frozen_array(D.tolist(), D.shape))
        # Worst-case |Bu - Dw| must fit the exact float range.
        umag = max(abs(self.U.min), abs(self.U.max))
        wmag = max(abs(self.W.min), abs(self.W.max))
        bound = max(
            sum(abs(int(b)) for b in row_b) * umag + sum(abs(int(d)) for d in row_d) * wmag
            for row_b, row_d in zip(self.B.tolist(), self.D.tolist())
        )
        if bound >= FLOAT_EXACT_LIMIT:
            raise ModelError(f"increments up to {bound} exceed the exact float range 2**53")

    @property
    def n(self) -> int:
        return self.B.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.D.shape[1]

    @property
    def u_mode(self) -> str:
        return "integer_interval" if self.U.is_interval else "explicit"

    def check_control(self, u: Sequence[int]) -> tuple[int, ...]:
        u = tuple(u)
        if len(u) != self.m:
            raise ModelError(f"control has {len(u)} components, expected m={self.m}")
        for j, uj in enumerate(u):
            if uj not in self.U:
                raise ModelError(f"control component u_{j + 1}={uj} is outside the alphabet")
        return tuple(int(v) for v in u)

    def check_disturbance(self, w: Sequence[int]) -> tuple[int, ...]:
        w = tuple(w)
        if len(w) != self.p:
            raise ModelError(f"disturbance has {len(w)} components, expected p={self.p}")
        for j, wj in enumerate(w):
            if wj not in self.W:
                raise ModelError(f"disturbance component w_{j + 1}={wj} is outside the alphabet")
        return tuple(int(v) for v in w)

    def Bu(self, u: Sequence[int]) -> tuple[int, ...]:
        """Exact integer product ``B u``."""
        return tuple(sum(int(b) * int(v) for b, v in zip(row, u)) for row in self.B.tolist())

    def Dw(self, w: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(int(d) * int(v) for d, v in zip(row, w)) for row in self.D.tolist())

    def increment(self, u: Sequence[int], w: Sequence[int]) -> tuple[int, ...]:
        return tuple(a - b for a, b in zip(self.Bu(u), self.Dw(w)))

    def step(self, x: Sequence[float], u: Sequence[int], w: Sequence[int]) -> tuple[float, ...]:
        return tuple(float(xi) + float(di) for xi, di in zip(x, self.increment(u, w)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetworkModel):
            return NotImplemented
        return (
            np.array_equal(self.B, other.B)
            and np.array_equal(self.D, other.D)
            and self.U == other.U
            and self.W == other.W
        )

    def __hash__(self) -> int:
        return hash((self.B.tobytes(), self.B.shape, self.D.tobytes(), self.D.shape, self.U, self.W))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "B": self.B.tolist(),
            "D": self.D.tolist(),
            "U": self.U.to_json(),
            "W": self.W.to_json(),
        }


def _matrix(obj: object, name: str, rows: int, cols: int) -> list[list[int]]:
    if not isinstance(obj, list):
        raise ModelError(f"field '{name}': expected a list of rows")
    if len(obj) != rows:
        raise ModelError(f"field '{name}': dimension mismatch, {len(obj)} rows but n={rows}")
    out = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ModelError(f"field '{name}[{i}]': expected a list")
        if len(row) != cols:
            raise ModelError(
                f"field '{name}[{i}]': dimension mismatch, {len(row)} entries but expected {cols}"
            )
        out.append([_as_int(v, f"{name}[{i}]") for v in row])
    return out


def model_from_dict(doc: Mapping) -> NetworkModel:
    if not isinstance(doc, Mapping):
        raise ModelError("model document must be a JSON object")
    for key in ("n", "m", "p", "B", "D", "U", "W"):
        if key not in doc:
            raise ModelError(f"model document is missing field '{key}'")
    n, m, p = (_as_int(doc[k], k) for k in ("n", "m", "p"))
    if min(n, m, p) < 1:
        raise ModelError("n, m and p must be positive")
    B = _matrix(doc["B"], "B", n, m)
    D = _matrix(doc["D"], "D", n, p)
    U = Alphabet.from_json(doc["U"], "U")
    W = Alphabet.from_json(doc["W"], "W")
    return NetworkModel(B=np.array(B, dtype=np.int64), D=np.array(D, dtype=np.int64), U=U, W=W)


def load_model(text: str) -> NetworkModel:
    """Parse and validate a model document (JSON text)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return model_from_dict(doc)


def dump_model(model: NetworkModel) -> str:
    return json.dumps(model.to_json(), indent=2)


# ---------------------------------------------------------------------------
# Hypercube vertices


def vertex_count(n: int) -> int:
    return 1 << n


def vertex_from_index(index: int, n: int) -> tuple[int, ...]:
    index = int(index)
    return tuple((index >> i) & 1 for i in range(n))


def vertex_index(z: Sequence[int]) -> int:
    return sum(int(b) << i for i, b in enumerate(z))


def iter_vertices(n: int) -> Iterator[tuple[int, ...]]:
    """All z in B^n, binary counting with coordinate 1 least significant."""
    for k in range(vertex_count(n)):
        yield vertex_from_index(k, n)


def vertex_key(z: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in z)


def parse_vertex_key(key: str) -> tuple[int, ...]:
    if not key or any(c not in "01" for c in key):
        raise ModelError(f"bad vertex key {key!r}")
    return tuple(int(c) for c in key)


@dataclass(frozen=True)
class SignVertex:
    z: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.z):
            raise ModelError(f"vertex {self.z!r} is not a bit vector")

    @property
    def signature(self) -> tuple[str, ...]:
        return tuple("+" if b == 0 else "-" for b in self.z)

    @property
    def orthant(self) -> tuple[int, ...]:
        """Sign vector of the orthant containing ``1/2 - z``."""
        return tuple(1 if b == 0 else -1 for b in self.z)

    @property
    def key(self) -> str:
        return vertex_key(self.z)

    @property
    def index(self) -> int:
        return vertex_index(self.z)


# ---------------------------------------------------------------------------
# Boxes


@dataclass(frozen=True)
class Hyperbox:
    """``[lower_1, lower_1 + upper_1] x ... ``; ``lower`` defaults to the origin.

    ``upper`` holds the side lengths ``x_i^+`` (equal to the upper corner
    when the box is anchored at 0).
    """

    upper: tuple[float, ...]
    lower: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        up = tuple(float(v) for v in self.upper)
        if any(not math.isfinite(v) or v < 0 for v in up):
            raise ModelError(f"box extents must be finite and non-negative, got {up}")
        object.__setattr__(self, "upper", up)
        if self.lower is None:
            object.__setattr__(self, "lower", tuple(0.0 for _ in up))
        else:
            lo = tuple(float(v) for v in self.lower)
            if len(lo) != len(up):
                raise ModelError("box lower corner has the wrong dimension")
            object.__setattr__(self, "lower", lo)

    @property
    def n(self) -> int:
        return len(self.upper)

    @property
    def lo(self) -> tuple[float, ...]:
        return self.lower

    @property
    def hi(self) -> tuple[float, ...]:
        return tuple(a + b for a, b in zip(self.lower, self.upper))

    def contains(self, x: Sequence[float]) -> bool:
        return all(a <= xi <= b for xi, a, b in zip(x, self.lo, self.hi))

    def to_json(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}

    @classmethod
    def from_json(cls, obj: Mapping) -> Hyperbox:
        if "upper" not in obj:
            raise ModelError("box document needs 'upper'")
        return cls(upper=tuple(obj["upper"]), lower=tuple(obj["lower"]) if obj.get("lower") is not None else None)


def box_vertices(box: Hyperbox) -> list[tuple[float, ...]]:
    """Vertices of ``box`` in binary counting order (coordinate 1 fastest).

    Degenerate axes produce repeated points; only the first occurrence of each
    point is kept.
    """
    seen = set()
    out = []
    for z in iter_vertices(box.n):
        x = tuple(hi if b else lo for b, lo, hi in zip(z, box.lo, box.hi))
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


# ---------------------------------------------------------------------------
# Control laws


@dataclass(frozen=True)
class Interval:
    """Real interval with per-end closedness; infinite ends are always open."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if math.isinf(self.lo):
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi):
            object.__setattr__(self, "hi_closed", False)

    def contains(self, v: float) -> bool:
        if v < self.lo or v > self.hi:
            return False
        if v == self.lo and not self.lo_closed:
            return False
        if v == self.hi and not self.hi_closed:
            return False
        return True

    @property
    def empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed))

    def intersect(self, other: Interval) -> Interval:
        if self.lo > other.lo:
            lo, lo_c = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lo_c = other.lo, other.lo_closed
        else:
            lo, lo_c = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_c = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hi_c = other.hi, other.hi_closed
        else:
            hi, hi_c = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lo_c, hi_c)

    def to_json(self) -> dict:
        return {
            "lo": None if math.isinf(self.lo) else self.lo,
            "hi": None if math.isinf(self.hi) else self.hi,
            "closed": ("[" if self.lo_closed else "(") + ("]" if self.hi_closed else ")"),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> Interval:
        closed = obj.get("closed", "[]")
        if len(closed) != 2 or closed[0] not in "[(" or closed[1] not in "])":
            raise ModelError(f"bad closedness marker {closed!r}")
        lo = -math.inf if obj.get("lo") is None else float(obj["lo"])
        hi = math.inf if obj.get("hi") is None else float(obj["hi"])
        return cls(lo, hi, closed[0] == "[", closed[1] == "]")


@dataclass(frozen=True)
class Cell:
    bounds: tuple[Interval, ...]
    u: tuple[int, ...]

    def contains(self, x: Sequence[float]) -> bool:
        return all(iv.contains(float(v)) for iv, v in zip(self.bounds, x))


class LawError(ValueError):
    """A control law is undefined at a state or inconsistent with a model."""


@dataclass(frozen=True)
class ControlLaw:
    """Piecewise-constant state feedback.

    ``threshold`` laws pick ``witnesses[z(x)]`` with ``z(x)_i = 0`` iff
    ``x_i <= thresholds[i]``. ``cellwise`` laws return the control of the
    first cell containing ``x``.
    """

    kind: str
    thresholds: tuple[float, ...] | None = None
    witnesses: tuple[tuple[int, ...], ...] | None = None  # indexed by vertex_index
    cells: tuple[Cell, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind == "threshold":
            if self.thresholds is None or self.witnesses is None:
                raise LawError("threshold law needs thresholds and witnesses")
            n = len(self.thresholds)
            if len(self.witnesses) != vertex_count(n):
                raise LawError(f"threshold law needs {vertex_count(n)} witnesses, got {len(self.witnesses)}")
            object.__setattr__(self, "thresholds", tuple(float(v) for v in self.thresholds))
            object.__setattr__(self, "witnesses", tuple(tuple(int(v) for v in u) for u in self.witnesses))
        elif self.kind == "cellwise":
            if not self.cells:
                raise LawError("cellwise law needs at least one cell")
            n = len(self.cells[0].bounds)
            if any(len(c.bounds) != n for c in self.cells):
                raise LawError("cells have inconsistent dimensions")
        else:
            raise LawError(f"unknown law kind {self.kind!r}")

    @classmethod
    def threshold(cls, thresholds: Sequence[float], witnesses: Mapping | Sequence) -> ControlLaw:
        """Build a threshold law; ``witnesses`` is a sequence in vertex order or a
        mapping keyed by vertex tuple, bitstring or index."""
        n = len(thresholds)
        if isinstance(witnesses, Mapping):
            table = []
            for z in iter_vertices(n):
                for key in (z, vertex_key(z), vertex_index(z)):
                    if key in witnesses:
                        table.append(tuple(witnesses[key]))
                        break
                else:
                    raise LawError(f"witness map has no entry for vertex {vertex_key(z)}")
        else:
            table = [tuple(u) for u in witnesses]
        return cls(kind="threshold", thresholds=tuple(thresholds), witnesses=tuple(table))

    @classmethod
    def cellwise(cls, cells: Sequence[Cell]) -> ControlLaw:
        return cls(kind="cellwise", cells=tuple(cells))

    @property
    def n(self) -> int:
        if self.kind == "threshold":
            return len(self.thresholds)
        return len(self.cells[0].bounds)

    def controls(self) -> list[tuple[int, ...]]:
        if self.kind == "threshold":
            return list(self.witnesses)
        return [c.u for c in self.cells]

    def vertex_of(self, x: Sequence[float]) -> tuple[int, ...]:
        return tuple(0 if float(xi) <= li else 1 for xi, li in zip(x, self.thresholds))

    def __call__(self, x: Sequence[float]) -> tuple[int, ...]:
        if self.kind == "threshold":
            return self.witnesses[vertex_index(self.vertex_of(x))]
        for cell in self.cells:
            if cell.contains(x):
                return cell.u
        raise LawError(f"law is undefined at x={tuple(x)}")

    def as_cells(self) -> tuple[Cell, ...]:
        """Equivalent disjoint cell list (threshold laws become 2^n orthant cells)."""
        if self.kind == "cellwise":
            return self.cells
        cells = []
        for z in iter_vertices(self.n):
            bounds = tuple(
                Interval(-math.inf, L, False, True) if b == 0 else Interval(L, math.inf, False, False)
                for b, L in zip(z, self.thresholds)
            )
            cells.append(Cell(bounds, self.witnesses[vertex_index(z)]))
        return tuple(cells)

    def check_against(self, model: NetworkModel) -> None:
        if self.n != model.n:
            raise LawError(f"law is {self.n}-dimensional but the model has n={model.n}")
        for u in self.controls():
            try:
                model.check_control(u)
            except ModelError as exc:
                raise LawError(str(exc)) from exc

    def to_json(self) -> dict:
        if self.kind == "threshold":
            return {
                "kind": "threshold",
                "thresholds": list(self.thresholds),
                "witnesses": {
                    vertex_key(z): list(self.witnesses[vertex_index(z)]) for z in iter_vertices(self.n)
                },
            }
        return {
            "kind": "cellwise",
            "cells": [{"bounds": [iv.to_json() for iv in c.bounds], "u": list(c.u)} for c in self.cells],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> ControlLaw:
        kind = doc.get("kind")
        if kind == "threshold":
            thresholds = doc.get("thresholds")
            raw = doc.get("witnesses")
            if not isinstance(thresholds, list) or not isinstance(raw, dict):
                raise ModelError("threshold law needs 'thresholds' (list) and 'witnesses' (object)")
            wit = {}
            for key, u in raw.items():
                z = parse_vertex_key(key)
                if len(z) != len(thresholds):
                    raise ModelError(f"witness key {key!r} does not match n={len(thresholds)}")
                if isinstance(u, str):
                    u = json.loads(u)
                wit[z] = tuple(_as_int(v, f"witnesses.{key}") for v in u)
            return cls.threshold(thresholds, wit)
        if kind == "cellwise":
            cells = []
            for k, c in enumerate(doc.get("cells") or []):
                bounds = tuple(Interval.from_json(b) for b in c["bounds"])
                cells.append(Cell(bounds, tuple(_as_int(v, f"cells[{k}].u") for v in c["u"])))
            return cls.cellwise(cells)
        raise ModelError(f"unknown law kind {kind!r}")


def load_law(text: str) -> ControlLaw:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return ControlLaw.from_json(doc)


def dump_law(law: ControlLaw, **extra) -> str:
    doc = law.to_json()
    doc.update(extra)
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# Trajectories


@dataclass(frozen=True)
class Trajectory:
    states: tuple[tuple[float, ...], ...]
    inputs: tuple[tuple[int, ...], ...]
    disturbances: tuple[tuple[int, ...], ...]
    lyapunov: tuple[float, ...] = field(default=())
    entry_time: int | None = None

    def __post_init__(self) -> None:
        if len(self.states) != len(self.inputs) + 1 or len(self.inputs) != len(self.disturbances):
            raise ModelError("trajectory needs one more state than inputs/disturbances")
        if self.lyapunov and len(self.lyapunov) != len(self.states):
            raise ModelError("trajectory needs one Lyapunov value per state")

    @property
    def horizon(self) -> int:
        return len(self.inputs)

    def replays(self, model: NetworkModel) -> bool:
        """True iff re-running the dynamics reproduces the stored states bit-exactly."""
        x = self.states[0]
        for t, (u, w) in enumerate(zip(self.inputs, self.disturbances)):
            x = model.step(x, u, w)
            if x != self.states[t + 1]:
                return False
        return True

    def to_csv(self) -> str:
        n = len(self.states[0])
        m = len(self.inputs[0]) if self.inputs else 0
        p = len(self.disturbances[0]) if self.disturbances else 0
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["t"] + [f"x_{i + 1}" for i in range(n)] + [f"u_{j + 1}" for j in range(m)]
        header += [f"w_{j + 1}" for j in range(p)] + ["V"]
        writer.writerow(header)
        for t, x in enumerate(self.states):
            u = self.inputs[t] if t < self.horizon else [""] * m
            w = self.disturbances[t] if t < self.horizon else [""] * p
            V = self.lyapunov[t] if self.lyapunov else ""
            writer.writerow([t, *(repr(float(v)) for v in x), *u, *w, V if V == "" else repr(float(V))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, n: int, m: int, p: int) -> Trajectory:
        rows = list(csv.reader(io.StringIO(text)))
        states, inputs, dists, lyap = [], [], [], []
        for row in rows[1:]:
            states.append(tuple(float(v) for v in row[1 : 1 + n]))
            if row[1 + n] != "":
                inputs.append(tuple(int(v) for v in row[1 + n : 1 + n + m]))
                dists.append(tuple(int(v) for v in row[1 + n + m : 1 + n + m + p]))
            if row[-1] != "":
                lyap.append(float(row[-1]))
        return cls(tuple(states), tuple(inputs), tuple(dists), tuple(lyap))


def control_tuples(model: NetworkModel, cap: int) -> Iterator[tuple[int, ...]]:
    """All of U^m in lexicographic alphabet-index order (u_1 most significant)."""
    vals = model.U.enumerate(cap)
    if len(vals) ** model.m > cap:
        raise ModelError(f"|U|^m = {len(vals)}^{model.m} exceeds the enumeration cap {cap}")
    return itertools.product(vals, repeat=model.m)
