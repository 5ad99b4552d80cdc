"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from finbox.conditions import (  # noqa: E402
    WitnessMap,
    bounds,
    check_attractivity_sufficient,
    check_existence,
    membership,
    vertex_sets,
)
from finbox.heuristic import HeuristicConfig, heuristic_witness_map  # noqa: E402
from finbox.lp import Constraint, LpProblem, solve  # noqa: E402
from finbox.model import Alphabet, Hyperbox, NetworkModel, iter_vertices, load_law, load_model  # noqa: E402
from finbox.sim import SimConfig, lyapunov_audit, monte_carlo, simulate  # noqa: E402
from finbox.synthesis import synthesize_attractive, synthesize_invariant, translate_law  # noqa: E402
from finbox.verify import (  # noqa: E402
    hull_inclusion,
    interval_cover,
    orthant_witness_check,
    scalar_minimal_box,
    verify_piecewise_law,
)
from oracles import (  # noqa: E402
    U1,
    U2,
    U3,
    U4,
    all_controls,
    brute_membership,
    brute_scalar_invariant,
    isclose,
    lp_vertex_oracle,
    random_model,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "finbox" / "data"
REFERENCE_BOX = (1250, 1250, 442, 442, 474, 474)


def _model(name: str) -> NetworkModel:
    return load_model((DATA / name).read_text())


def _timed(fn, repeat: int = 1):
    best, out = math.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return out, best


# ---------------------------------------------------------------------------
# Criteria. Each returns (ok, detail).


def criterion_1():
    cx1 = _model("counterexample1.json")
    expected = {
        (0, 0): ({U3, U4}, set()),
        (0, 1): ({U2, U4}, {U2}),
        (1, 0): ({U1, U3}, set()),
        (1, 1): ({U1}, set()),
    }

    def run():
        sets = {z: vertex_sets(cx1, z) for z in iter_vertices(2)}
        return sets, check_existence(cx1), check_attractivity_sufficient(cx1)

    (sets, c4, c5), secs = _timed(run, repeat=5)
    sets_ok = all(
        set(sets[z].members) == mem and set(sets[z].strict_members) == strict for z, (mem, strict) in expected.items()
    )
    failing = [z for z in c5.failing]
    ok = sets_ok and c4.holds and not c5.holds and failing == [(0, 0), (1, 0), (1, 1)] and secs < 1e-3
    return ok, f"8 sets exact={sets_ok}, existence holds={c4.holds}, strict condition fails at {failing}, {secs * 1e3:.3f} ms"


def criterion_2():
    cx1 = _model("counterexample1.json")
    # signature order ++, +-, -+, -- is z = 00, 01, 10, 11
    wm = WitnessMap.from_mapping(2, {"00": U4, "01": U2, "10": U3, "11": U1})
    b = bounds(cx1, wm)
    ok = wm.validate(cx1) == [] and b.box.upper == (24.0, 8.0) and b.box.lower == (0.0, 0.0)
    return ok, f"L^o={b.L_o}, box [0,{b.box.upper[0]:g}]x[0,{b.box.upper[1]:g}]"


def criterion_3():
    ex1 = _model("example1.json")
    # oracle first: half-integer grid search over [0, K]
    oracle_K = next(K for K in range(0, 400) if brute_scalar_invariant(ex1, K))
    res, secs = _timed(lambda: scalar_minimal_box(ex1), repeat=5)
    gap = res.below.gap if res.below else None
    strict = check_attractivity_sufficient(ex1).witnesses
    law, box, delta = synthesize_attractive(ex1, strict)
    ok = (
        res.K == 157 == oracle_K
        and res.below is not None
        and not res.below.covered
        and gap == (0.0, 1.0)
        and interval_cover(ex1, 157).covered
        and verify_piecewise_law(ex1, res.box, res.law).certified
        and box.upper == (312.0,)
        and delta == 94
        and verify_piecewise_law(ex1, box, law).certified
        and secs < 10e-3
    )
    return ok, (
        f"K={res.K} (oracle {oracle_K}), K=156 gap {gap}, constructive box [0,{box.upper[0]:g}], "
        f"Delta={delta}, minbox {secs * 1e3:.2f} ms"
    )


def _scalar_sweep():
    U = Alphabet.explicit([-100, -2, 3, 150])
    W = Alphabet.explicit([-6, 4])
    rows = []
    for b in range(-1, 11):
        model = NetworkModel([[b]], [[1]], U, W)
        holds = check_existence(model).holds
        brute = all(any(brute_membership(model, u, z, False) for u in all_controls(model)) for z in iter_vertices(1))
        closed = b >= max(0.06, -0.04)
        rows.append((b, holds, brute, closed))
    return rows


def criterion_4():
    rows = _scalar_sweep()
    mismatch = [b for b, holds, _, _ in rows if holds != (b >= 1)]
    detail = "holds iff B>=1" if not mismatch else f"disagrees with 'holds iff B>=1' at B={mismatch}"
    if mismatch:
        detail += " (B=-1: u=-100 serves +, u=150 serves -; the inequality presumes B>=0)"
    return not mismatch, detail


def criterion_4_oracle():
    rows = _scalar_sweep()
    exact = all(h == br for _, h, br, _ in rows)
    closed = all(h == c for b, h, _, c in rows if b >= 0)
    return exact and closed, "sweep equals brute-force quantifier for all B, and B >= max(0.06D, -0.04D) for B>=0"


def _example2_map():
    ex2 = _model("example2.json")
    (wm, b), secs = _timed(lambda: heuristic_witness_map(ex2, HeuristicConfig(epsilon=1.0)))
    return ex2, wm, b, secs


def criterion_5a():
    ex2, wm, b, secs = _example2_map()
    ok = len(wm.witnesses) == 64 and wm.strict and wm.validate(ex2, strict=True) == [] and secs < 10
    return ok, f"64 witnesses verified strict={wm.validate(ex2, strict=True) == []}, {secs:.2f} s"


def criterion_5b():
    _, _, b, _ = _example2_map()
    box = tuple(2 * v for v in b.L_star)
    ratios = tuple(round(v / t, 3) for v, t in zip(box, REFERENCE_BOX))
    ok = all(0.5 <= r <= 2.0 for r in ratios)
    return ok, f"2L*={box} vs reference {REFERENCE_BOX}, ratios {ratios}"


def criterion_6():
    ex2, wm, _, _ = _example2_map()
    law, box, delta = synthesize_attractive(ex2, wm)
    cfg = SimConfig.around_box(box, seed=2010, margin=1000.0, paths=30, horizon=600)
    rep, secs = _timed(lambda: monte_carlo(ex2, law, box, cfg))
    audits = [lyapunov_audit(tr, box, delta) for tr in rep.trajectories]
    replay = all(tr.replays(ex2) for tr in rep.trajectories)
    entered = sum(p.entry_time is not None for p in rep.paths)
    ok = entered == 30 and rep.total_violations == 0 and all(a.certified for a in audits) and replay and secs < 30
    return ok, (
        f"{entered}/30 entered, violations={rep.total_violations}, Lyapunov audit "
        f"{sum(a.certified for a in audits)}/30 with Delta={delta}, "
        f"max entry {max((p.entry_time or 0) for p in rep.paths)}, {secs:.2f} s"
    )


def criterion_7():
    cx1 = _model("counterexample1.json")
    law = load_law((DATA / "counterexample1_law.json").read_text())
    box = Hyperbox((24, 8))
    grid = np.linspace(-50, 50, 21)
    worst = 0
    missed = []
    for x0 in itertools.product(grid, grid):
        tr = simulate(cx1, law, x0, [(0,)] * 100, box)
        if tr.entry_time is None:
            missed.append(x0)
        else:
            worst = max(worst, tr.entry_time)
    v = verify_piecewise_law(cx1, box, law)
    ok = not missed and v.certified
    return ok, f"441/441 entered={not missed} (max entry {worst} steps), box invariance {v.status}"


# ----- property suites over a seeded random corpus


def _corpus(k: int = 1000, seed: int = 20100601):
    rng = np.random.default_rng(seed)
    return [random_model(rng) for _ in range(k)]


def criterion_8a():
    bad = 0
    for model in _corpus():
        for z in iter_vertices(model.n):
            for u in all_controls(model):
                for strict in (False, True):
                    bad += membership(model, u, z, strict) != brute_membership(model, u, z, strict)
    return bad == 0, f"1000 models, {bad} disagreements with brute-force w enumeration"


def criterion_8b():
    bad = 0
    for model in _corpus():
        for z in iter_vertices(model.n):
            for u in all_controls(model):
                for strict in (False, True):
                    bad += orthant_witness_check(model, z, u, open=strict) != membership(model, u, z, strict)
    return bad == 0, f"1000 models, {bad} orthant/membership disagreements"


def criterion_8c():
    bad, n4, n5 = 0, 0, 0
    for model in _corpus():
        if check_existence(model).holds:
            n4 += 1
            bad += not hull_inclusion(model).certified
        if check_attractivity_sufficient(model).holds:
            n5 += 1
            bad += not hull_inclusion(model, strict_interior=True).certified
    return bad == 0, f"existence => hull inclusion on {n4} models, strict => interior inclusion on {n5} models, {bad} violations"


def _threshold_eval(law, X: np.ndarray) -> np.ndarray:
    """Vectorized threshold law, written independently of ``ControlLaw.__call__``."""
    z = (X > np.array(law.thresholds)).astype(np.int64)
    idx = (z << np.arange(X.shape[1])).sum(axis=1)
    return np.array(law.witnesses, dtype=np.int64)[idx]


def _sampled_containment(model, law, box, rng, samples: int = 10_000) -> bool:
    lo, hi = np.array(box.lo), np.array(box.hi)
    X = rng.uniform(lo, hi, size=(samples, model.n))
    # a quarter of the samples sit on faces or thresholds
    k = samples // 4
    pick = rng.integers(0, 3, size=(k, model.n))
    thr = np.clip(np.array(law.thresholds), lo, hi)
    X[:k] = np.where(pick == 0, lo, np.where(pick == 1, hi, thr))
    U = _threshold_eval(law, X)
    Wv = np.array(model.W.values)
    Wd = Wv[rng.integers(0, len(Wv), size=(samples, model.p))]
    Xn = X + U @ model.B.T - Wd @ model.D.T
    return bool(np.all((Xn >= lo) & (Xn <= hi)))


def _synthesized(corpus):
    for model in corpus:
        v = check_existence(model)
        if v.holds:
            yield model, *synthesize_invariant(model, v.witnesses)
        s = check_attractivity_sufficient(model)
        if s.holds:
            law, box, _ = synthesize_attractive(model, s.witnesses)
            yield model, law, box


def criterion_8d():
    rng = np.random.default_rng(8)
    count, bad = 0, 0
    for model, law, box in _synthesized(_corpus()):
        count += 1
        bad += not verify_piecewise_law(model, box, law).certified
        bad += not _sampled_containment(model, law, box, rng)
    return bad == 0, f"{count} synthesized laws, exact verifier + 10^4-sample containment, {bad} failures"


def criterion_8e():
    rng = np.random.default_rng(5)
    bad, infeasible = 0, 0
    for _ in range(500):
        k = int(rng.integers(1, 7))
        rows = int(rng.integers(1, 9))
        A = rng.integers(-5, 6, size=(rows, k)).astype(float)
        b = rng.integers(-3, 12, size=rows).astype(float)
        c = rng.integers(-5, 6, size=k).astype(float)
        lb = rng.integers(-4, 1, size=k).astype(float)
        ub = lb + rng.integers(1, 6, size=k)
        prob = LpProblem(tuple(c), tuple(Constraint(tuple(a), "<=", v) for a, v in zip(A, b)), tuple(zip(lb, ub)))
        sol = solve(prob)
        want = lp_vertex_oracle(c, A, b, lb, ub)
        if want is None:
            infeasible += 1
            bad += sol.status != "infeasible"
        else:
            bad += not (sol.optimal and isclose(sol.value, want, 1e-6) and prob.max_violation(sol.point) <= 1e-9)
    return bad == 0, f"500 LPs ({infeasible} infeasible), {bad} disagreements with vertex enumeration"


def criterion_8f():
    rng = np.random.default_rng(13)
    count, bad = 0, 0
    for model, law, box in _synthesized(_corpus()):
        offset = tuple(float(v) for v in rng.integers(-50, 51, size=model.n))
        moved, mbox = translate_law(law, box, offset)
        count += 1
        bad += not verify_piecewise_law(model, mbox, moved).certified
    return bad == 0, f"{count} translated (law, box) pairs, {bad} not re-certified"


CRITERIA = {
    "1": criterion_1,
    "2": criterion_2,
    "3": criterion_3,
    "4": criterion_4,
    "4-oracle": criterion_4_oracle,
    "5a": criterion_5a,
    "5b": criterion_5b,
    "6": criterion_6,
    "7": criterion_7,
    "8a": criterion_8a,
    "8b": criterion_8b,
    "8c": criterion_8c,
    "8d": criterion_8d,
    "8e": criterion_8e,
    "8f": criterion_8f,
}


def _line(name: str, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}"


@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name, acceptance_log):
    ok, detail = CRITERIA[name]()
    acceptance_log(_line(name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for name, fn in CRITERIA.items():
        ok, detail = fn()
        results.append(ok)
        print(_line(name, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
