import json
import random

import pytest

from clonelab.core import FnTable, SmallnessIdeal, Universe
from clonelab.funcgraph import realize_spectrum
from clonelab.monoids import (
    PREDICATE_NAMES,
    RichnessParams,
    composition_closure_survey,
    in_A,
    in_A_prime,
    in_B,
    in_chi,
    in_E,
    in_F,
    in_G_lambda,
    in_G_lambda_oracle,
    in_M_lambda,
    is_generous,
    is_rich,
    lambda_injective,
    lambda_surjective,
    membership_report,
    min_injective_removal,
    min_injective_removal_oracle,
    unary_predicates,
)

U = FnTable.unary


def I(n, k=None):
    return SmallnessIdeal(n, k)


def test_in_A_examples():
    for k in range(2, 6):
        assert in_A(FnTable.identity(5), I(5, k))
    assert not in_A(FnTable.identity(5), I(5, 1))
    assert in_A(FnTable.constant(5, 1), I(5, 5))
    assert not in_A(U([0, 0, 1, 1]), I(4, 2))


def test_in_B_examples():
    assert in_B(FnTable.identity(4), I(4, 2))
    assert not in_B(FnTable.constant(4, 0), I(4, 3))
    assert in_B(U([0, 0, 1, 2]), I(4, 3))


def test_in_E_F_examples():
    assert in_E(FnTable.identity(4))
    c = FnTable.constant(5, 0)
    assert not in_E(c, I(5, 3)) and in_F(c, I(5, 3))
    assert in_E(U([0, 1, 2, 3, 0]), I(5, 2))


def test_G_lambda_examples():
    for lam in range(1, 6):
        assert in_G_lambda(FnTable.identity(5), lam)
        assert in_G_lambda(FnTable.constant(5, 2), lam)
    f = U([0, 1, 2, 2])
    assert in_G_lambda(f, 2) == in_G_lambda_oracle(f, 2)
    with pytest.raises(ValueError):
        in_G_lambda(f, 0)
    with pytest.raises(ValueError):
        in_G_lambda(f, 5)


def test_G_lambda_closed_form_exhaustive_small():
    for n in range(1, 5):
        for f in Universe(n).all_unary():
            for lam in range(1, n + 1):
                assert in_G_lambda(f, lam) == in_G_lambda_oracle(f, lam)


def test_injectivity_examples():
    for lam in range(1, 5):
        assert lambda_injective(FnTable.identity(4), lam)
    c = FnTable.constant(5, 0)
    assert min_injective_removal(c) == 4 == min_injective_removal_oracle(c)
    assert [lambda_injective(c, lam) for lam in range(1, 6)] == [False] * 4 + [True]
    assert min_injective_removal(U([0, 0, 1, 1])) == 2
    assert lambda_injective(U([0, 0, 1, 1]), 3)


def test_injective_removal_oracle_random():
    rng = random.Random(1)
    for _ in range(300):
        n = rng.randint(1, 7)
        f = FnTable(n, 1, tuple(rng.randrange(n) for _ in range(n)))
        assert min_injective_removal(f) == min_injective_removal_oracle(f)


def test_surjective_reading_and_M_lambda():
    # with this reading the two notions coincide on finite sets
    for f in Universe(4).all_unary():
        for lam in range(1, 5):
            assert lambda_surjective(f, lam) == lambda_injective(f, lam)
            assert in_M_lambda(f, lam)


def test_A_prime_examples():
    assert in_A_prime(FnTable.identity(4), I(4, 2))
    for f in Universe(3).all_unary():
        assert in_A_prime(f, I(3, 1), lambda_bound=3)
    assert in_A_prime(U([0, 0, 1, 2]), I(4, 2), lambda_bound=1)
    # the default bound n - 1 leaves the constant out when k = 1
    assert not in_A_prime(FnTable.constant(4, 0), I(4, 1))
    assert in_A_prime(FnTable.constant(4, 0), I(4, 2))


def test_generous_and_chi_examples():
    c = FnTable.constant(4, 0)
    assert is_generous(c, I(4, 4)) and in_chi(c, I(4, 4))
    assert not is_generous(FnTable.identity(4), I(4, 2))
    assert in_chi(U([0, 0, 1, 1]), I(4, 2))
    assert not in_chi(U([0, 0, 1, 1, 2, 2]), I(6, 2))


def test_rich_examples():
    assert is_rich(FnTable.identity(4), RichnessParams({1}, 4))
    assert not is_rich(U([1, 2, 0]), RichnessParams({1, 2}, 1))
    f = realize_spectrum(9, {1: 2, 2: 2})
    assert is_rich(f, RichnessParams({1, 2}, 2))
    with pytest.raises(ValueError):
        RichnessParams({0}, 1)


def test_containments_exhaustive():
    for n in range(1, 5):
        perms = set(Universe(n).all_permutations())
        for k in range(1, n + 1):
            ideal = I(n, k)
            for f in Universe(n).all_unary():
                if in_B(f, ideal):
                    assert in_A(f, ideal)
                if in_E(f, ideal):
                    assert in_F(f, ideal)
                if in_chi(f, ideal):
                    assert is_generous(f, ideal)
                if f.is_permutation():
                    assert in_E(f, ideal) and in_F(f, ideal)
                    assert all(in_G_lambda(f, lam) for lam in range(1, n + 1))
                    # k = 1 makes only the empty set small, so singleton fibers are large
                    assert in_A(f, ideal) == in_B(f, ideal) == (k >= 2)
        assert len(perms) == len([f for f in Universe(n).all_unary() if f.is_permutation()])


def test_report_matches_direct_calls():
    rng = random.Random(7)
    f = FnTable(5, 1, tuple(rng.randrange(5) for _ in range(5)))
    ideal = I(5, 3)
    rep = membership_report(f, ideal, richness=RichnessParams({1, 2}, 1))
    preds = rep.predicates
    assert set(preds) == set(PREDICATE_NAMES)
    single = unary_predicates(ideal, 2, RichnessParams({1, 2}, 1))
    for name, pred in single.items():
        val = preds[name]
        assert (val[2] if isinstance(val, dict) else val) == pred(f)
    doc = json.loads(rep.dumps())
    assert doc["parameters"]["k"] == 3
    assert doc["function_id"] == f.digest
    assert rep.dumps() == membership_report(f, ideal, richness=RichnessParams({1, 2}, 1)).dumps()


def test_report_identity_and_constant():
    rep = membership_report(FnTable.identity(4)).predicates
    assert rep["A"] and rep["B"] and rep["E"] and rep["F"]
    assert all(rep["G_lambda"].values())
    rep = membership_report(FnTable.constant(4, 1)).predicates
    assert not rep["B"] and rep["F"]


def test_composition_survey_measures_without_asserting():
    for k in range(1, 4):
        out = composition_closure_survey(3, unary_predicates(I(3, k), 1), k)
        assert {m.name for m in out} == set(PREDICATE_NAMES)
        for m in out:
            if not m.closed:
                a, b = m.counterexample
                assert a.n == b.n == 3
    # with k = 1, E is exactly the permutations
    e = {m.name: m for m in composition_closure_survey(3, unary_predicates(I(3, 1), 1), 1)}
    assert e["E"].size == 6 and e["E"].closed
