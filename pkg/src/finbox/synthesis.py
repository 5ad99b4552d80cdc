"""Threshold feedback laws built from a witness map.

Given ``u_z`` for every vertex and per-axis thresholds ``L``, the law is
``phi(x) = u_{z(x)}`` with ``z(x)_i = 0`` iff ``x_i <= L_i``. With
``L >= L^o`` the box ``[0, 2L]`` is robustly invariant; with strict witnesses
and ``L = L^*`` the same formula, applied on all of ``R^n``, also drives every
state into the box.
"""

from __future__ import annotations

import json
from typing import Sequence

from finbox.conditions import Bounds, WitnessMap, bounds
from finbox.model import ControlLaw, Hyperbox, ModelError, NetworkModel, load_law


class SynthesisError(ValueError):
    pass


def _law(witnesses: WitnessMap, L: Sequence[float]) -> ControlLaw:
    return ControlLaw.threshold(tuple(L), witnesses.witnesses)


def synthesize_invariant(
    model: NetworkModel, witnesses: WitnessMap, L: Sequence[float] | None = None
) -> tuple[ControlLaw, Hyperbox]:
    bad = witnesses.validate(model, strict=False)
    if bad:
        raise SynthesisError(f"witness for vertex {bad[0]} is not in U_z")
    b = bounds(model, witnesses)
    if L is None:
        L = b.L_o
    elif len(L) != model.n:
        raise SynthesisError(f"threshold vector has {len(L)} entries, expected {model.n}")
    else:
        for i, (li, lo) in enumerate(zip(L, b.L_o)):
            if li < lo:
                raise SynthesisError(f"L_{i + 1}={li} is below the required bound L^o_{i + 1}={lo}")
    law = _law(witnesses, L)
    return law, Hyperbox(tuple(2 * float(v) for v in L))


def synthesize_attractive(model: NetworkModel, witnesses: WitnessMap) -> tuple[ControlLaw, Hyperbox, int]:
    """Law, box ``[0, 2L^*]`` and the guaranteed Lyapunov decrement ``Delta``."""
    bad = witnesses.validate(model, strict=True)
    if bad:
        raise SynthesisError(f"witness for vertex {bad[0]} is not in U_z^* (non-strict)")
    strict = witnesses if witnesses.strict else WitnessMap(witnesses.witnesses, True)
    b: Bounds = bounds(model, strict)
    law = _law(strict, b.L_star)
    return law, b.box, b.Delta


def translate_law(law: ControlLaw, box: Hyperbox, offset: Sequence[float]) -> tuple[ControlLaw, Hyperbox]:
    """Shift a law and its box by ``offset``: ``phi'(x) = phi(x - offset)``."""
    if law.kind != "threshold":
        raise SynthesisError("only threshold laws can be translated")
    if len(offset) != law.n:
        raise SynthesisError("offset dimension does not match the law")
    shifted = ControlLaw.threshold(
        tuple(L + float(o) for L, o in zip(law.thresholds, offset)), law.witnesses
    )
    new_box = Hyperbox(box.upper, tuple(lo + float(o) for lo, o in zip(box.lower, offset)))
    return shifted, new_box


def export_lookup(law: ControlLaw, box: Hyperbox | None = None, delta: int | None = None) -> str:
    """Law document (JSON); the box and ``Delta`` ride along when given."""
    doc = law.to_json()
    if box is not None:
        doc["box"] = box.to_json()
    if delta is not None:
        doc["delta"] = delta
    return json.dumps(doc, indent=2)


def load_lookup(text: str) -> tuple[ControlLaw, Hyperbox | None, int | None]:
    law = load_law(text)
    doc = json.loads(text)
    box = Hyperbox.from_json(doc["box"]) if doc.get("box") else None
    delta = doc.get("delta")
    if box is not None and box.n != law.n:
        raise ModelError("box dimension does not match the law")
    return law, box, delta
