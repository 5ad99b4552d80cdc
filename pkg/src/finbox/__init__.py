"""Robust invariance and attractivity of hyperboxes for integer networks
with finite control and disturbance alphabets."""

__version__ = "0.1.0"

from finbox.conditions import (  # noqa: E402
    Bounds,
    WitnessMap,
    bounds,
    check_attractivity_sufficient,
    check_existence,
    vertex_sets,
)
from finbox.model import (  # noqa: E402
    Alphabet,
    ControlLaw,
    Hyperbox,
    NetworkModel,
    SignVertex,
    Trajectory,
    load_law,
    load_model,
)
from finbox.synthesis import synthesize_attractive, synthesize_invariant, translate_law  # noqa: E402

__all__ = [
    "Alphabet",
    "Bounds",
    "ControlLaw",
    "Hyperbox",
    "NetworkModel",
    "SignVertex",
    "Trajectory",
    "WitnessMap",
    "bounds",
    "check_attractivity_sufficient",
    "check_existence",
    "load_law",
    "load_model",
    "synthesize_attractive",
    "synthesize_invariant",
    "translate_law",
    "vertex_sets",
]
