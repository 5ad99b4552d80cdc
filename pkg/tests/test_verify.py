import itertools

import numpy as np
import pytest

from finbox.conditions import check_attractivity_sufficient, check_existence
from finbox.model import Alphabet, Cell, ControlLaw, Hyperbox, Interval, ModelError, NetworkModel, iter_vertices
from finbox.synthesis import synthesize_attractive, synthesize_invariant
from finbox.verify import (
    DomainError,
    hull_inclusion,
    interval_cover,
    orthant_witness_check,
    scalar_minimal_box,
    scalar_nonattractivity,
    verify_piecewise_law,
    vertex_necessity,
)
from oracles import U1, U3, U4, constant_law, all_controls, brute_scalar_invariant, random_model, sampled_one_step


def test_vertex_necessity(cx1):
    law, box = synthesize_invariant(cx1, check_existence(cx1).witnesses)
    assert vertex_necessity(cx1, Hyperbox((24, 8)), law).certified
    v = vertex_necessity(cx1, Hyperbox((24, 8)), constant_law(2, U1))
    assert v.refuted and v.witness["state"] == [0.0, 0.0]


def test_vertex_necessity_degenerate_box():
    model = NetworkModel([[1]], [[1]], Alphabet.explicit([2]), Alphabet.explicit([2]))
    assert vertex_necessity(model, Hyperbox((0,)), constant_law(1, (2,))).certified


def test_cx1_cellwise_law_on_box(cx1, cx1_law):
    assert verify_piecewise_law(cx1, Hyperbox((24, 8)), cx1_law).certified


def test_example1_law_certified_and_refuted(ex1):
    law, box, _ = synthesize_attractive(ex1, check_attractivity_sufficient(ex1).witnesses)
    assert verify_piecewise_law(ex1, box, law).certified
    small = ControlLaw.threshold((100.0,), law.witnesses)
    v = verify_piecewise_law(ex1, Hyperbox((200,)), small)
    assert v.refuted
    w = v.witness
    assert w["state"] == [100.0] and w["disturbance"] == [-6] and w["successor"] == [256.0]
    assert ex1.step(tuple(w["state"]), tuple(w["control"]), tuple(w["disturbance"])) == (256.0,)


def test_sampled_search_agrees_on_refutation(ex1):
    law = ControlLaw.threshold((100.0,), ((150,), (-100,)))
    rng = np.random.default_rng(0)
    ok, bad = sampled_one_step(ex1, law, Hyperbox((200,)), rng, samples=10_000)
    assert not ok


def test_uncovered_domain(cx1):
    law = ControlLaw.cellwise([Cell((Interval(0, 10, True, True), Interval(0, 8, True, True)), U4)])
    with pytest.raises(DomainError):
        verify_piecewise_law(cx1, Hyperbox((24, 8)), law)


def test_minbox_example1(ex1):
    res = scalar_minimal_box(ex1)
    assert res.K == 157
    assert not res.below.covered and res.below.K == 156
    assert res.below.stay == ((0, 0), (1, 147), (6, 152), (104, 156))
    assert res.below.gap == (0.0, 1.0)
    assert verify_piecewise_law(ex1, res.box, res.law).certified


def test_minbox_matches_cover_oracle():
    rng = np.random.default_rng(41)
    done = 0
    while done < 60:
        model = random_model(rng, n_max=1, m_max=2)
        if not check_existence(model).holds:
            continue
        res = scalar_minimal_box(model)
        assert brute_scalar_invariant(model, res.K)
        if res.K >= 1:
            assert not brute_scalar_invariant(model, res.K - 1)
        for K in range(0, res.K + 3):
            assert interval_cover(model, K).covered == brute_scalar_invariant(model, K)
        done += 1


def test_minbox_toy_unit_steps():
    model = NetworkModel([[1]], [[1]], Alphabet.explicit([-1, 1]), Alphabet.explicit([0]))
    res = scalar_minimal_box(model)
    assert res.K == 2 and brute_scalar_invariant(model, 2) and not brute_scalar_invariant(model, 1)


def test_minbox_preconditions(cx1):
    with pytest.raises(ModelError):
        scalar_minimal_box(cx1)
    model = NetworkModel([[1]], [[1]], Alphabet.explicit([0]), Alphabet.explicit([1]))
    with pytest.raises(ModelError):
        scalar_minimal_box(model)


def test_nonattractivity(ex1, cx1):
    model = NetworkModel([[1]], [[1]], Alphabet.explicit([0, 1]), Alphabet.explicit([1]))
    v = scalar_nonattractivity(model, 5)
    assert v.refuted and v.witness["disturbance"] == [1]
    assert scalar_nonattractivity(ex1, 156).status == "inconclusive"
    with pytest.raises(ModelError):
        scalar_nonattractivity(cx1, 1)


def test_orthant_examples(cx1):
    assert orthant_witness_check(cx1, (0, 0), U3)
    assert not orthant_witness_check(cx1, (0, 0), U3, open=True)


def test_orthant_equivalence_random():
    from finbox.conditions import membership

    rng = np.random.default_rng(51)
    for _ in range(100):
        model = random_model(rng)
        for z in iter_vertices(model.n):
            for u in all_controls(model):
                for strict in (False, True):
                    assert orthant_witness_check(model, z, u, open=strict) == membership(model, u, z, strict)


def test_hull_examples(ex1, cx1):
    assert hull_inclusion(ex1).certified and hull_inclusion(ex1, strict_interior=True).certified
    assert hull_inclusion(cx1).certified
    model = NetworkModel([[1]], [[1]], Alphabet.explicit([0]), Alphabet.explicit([5]))
    v = hull_inclusion(model)
    assert v.refuted and v.witness["point"] == [5]


def test_hull_degenerate_never_strict():
    # B U^2 lies on a line in R^2; its hull has empty interior
    model = NetworkModel([[1, 0], [1, 0]], [[0], [0]], Alphabet.explicit([-1, 1]), Alphabet.explicit([0]))
    assert hull_inclusion(model).certified
    assert hull_inclusion(model, strict_interior=True).refuted


def test_hull_implications_random():
    rng = np.random.default_rng(61)
    for _ in range(80):
        model = random_model(rng)
        if check_existence(model).holds:
            assert hull_inclusion(model).certified
        if check_attractivity_sufficient(model).holds:
            assert hull_inclusion(model, strict_interior=True).certified


def test_exact_verifier_agrees_with_grid():
    rng = np.random.default_rng(71)
    for _ in range(60):
        model = random_model(rng, n_max=2)
        v = check_existence(model)
        if not v.holds:
            continue
        law, box = synthesize_invariant(model, v.witnesses)
        # shrink the box (sometimes) so refutations show up too
        upper = tuple(max(0.0, u - float(rng.integers(0, 3))) for u in box.upper)
        small = Hyperbox(upper)
        verdict = verify_piecewise_law(model, small, law)
        grid = [np.arange(0, u + 0.5, 0.5) for u in upper]
        W = list(itertools.product(model.W.values, repeat=model.p))
        ok = True
        for x in itertools.product(*grid):
            for w in W:
                if not small.contains(model.step(x, law(x), w)):
                    ok = False
                    break
            if not ok:
                break
        if verdict.refuted:
            wt = verdict.witness
            nxt = model.step(tuple(wt["state"]), tuple(wt["control"]), tuple(wt["disturbance"]))
            assert not small.contains(nxt)
        assert ok == verdict.certified
