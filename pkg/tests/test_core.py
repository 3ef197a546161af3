import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clonelab.core import (
    ArityError,
    FnTable,
    GuardError,
    ParseError,
    Permutation,
    SmallnessIdeal,
    Universe,
    compose,
    compose_unary,
    conjugate,
    fiber_sizes,
    format_table,
    image,
    kernel_classes,
    parse_endofunction,
    parse_table,
    support,
)


def unary(n):
    return st.lists(st.integers(0, n - 1), min_size=n, max_size=n).map(
        lambda v: FnTable(n, 1, tuple(v))
    )


def perms(n):
    return st.permutations(range(n)).map(Permutation.from_values)


def test_table_validation():
    with pytest.raises(ValueError):
        FnTable(3, 1, (0, 1))
    with pytest.raises(ValueError):
        FnTable(3, 1, (0, 1, 3))


def test_index_order_first_argument_most_significant():
    f = FnTable.projection(3, 2, 1)
    assert f(2, 0) == 2 and f(0, 2) == 0
    assert FnTable(3, 2, tuple(range(3)) * 3).index((2, 0)) == 6


def test_projections_and_constants():
    p = FnTable.projection(2, 2, 1)
    assert p.values == (0, 0, 1, 1)
    assert FnTable.projection(2, 2, 2).values == (0, 1, 0, 1)
    assert FnTable.constant(3, 2).values == (2, 2, 2)
    assert FnTable.constant(2, 1, m=2).is_constant()


def test_compose_xor_diagonal_is_constant_zero():
    xor = FnTable.from_function(2, 2, lambda a, b: a ^ b)
    ident = FnTable.identity(2)
    assert compose(xor, [ident, ident]) == FnTable.constant(2, 0)


def test_compose_rejects_mixed_arity():
    and_ = FnTable(2, 2, (0, 0, 0, 1))
    with pytest.raises(ArityError):
        compose(and_, [FnTable.identity(2), FnTable.projection(2, 2, 1)])


def test_conjugate_of_constant():
    c = FnTable.constant(3, 0)
    assert conjugate(c, [1, 2, 0]).values == (2, 2, 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(unary(n), perms(n), perms(n))))
def test_conjugation_is_an_action(data):
    f, g, h = data
    assert conjugate(f, g @ h) == conjugate(conjugate(f, g), h)
    assert conjugate(f, Permutation.identity(f.n)) == f


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, n - 1), min_size=n * n, max_size=n * n), perms(n))))
def test_conjugation_respects_composition(data):
    vals, gamma = data
    n = gamma.n
    f = FnTable(n, 2, tuple(vals))
    gs = [FnTable.projection(n, 2, 2), FnTable.projection(n, 2, 1)]
    lhs = conjugate(compose(f, gs), gamma)
    rhs = compose(conjugate(f, gamma), [conjugate(g, gamma) for g in gs])
    assert lhs == rhs


def test_permutation_basics():
    p = Permutation.from_cycles(5, [(0, 1, 2), (3, 4)])
    assert p.order() == 6
    assert p.cycle_type() == (3, 2)
    assert not p.is_even()
    assert (p @ p.inv()).values == tuple(range(5))
    assert p.power(6) == Permutation.identity(5)
    with pytest.raises(ValueError):
        Permutation.from_values([0, 0, 1])


def test_kernel_and_image():
    f = FnTable.unary([1, 0, 0, 2, 3])
    assert kernel_classes(f) == [(0,), (1, 2), (3,), (4,)]
    assert sorted(fiber_sizes(f)) == [0, 1, 1, 1, 2]
    assert image(f) == {0, 1, 2, 3}
    assert support(Permutation.from_values([1, 0, 2])) == {0, 1}


def test_compose_unary_order():
    f = FnTable.unary([1, 2, 0])
    g = FnTable.unary([0, 0, 1])
    assert compose_unary(f, g).values == tuple(f(g(x)) for x in range(3))


def test_smallness_ideal():
    I = SmallnessIdeal(5)
    assert I.k == 5
    assert I.small(4) and I.large(5)
    assert I.co_large([])
    J = SmallnessIdeal(5, 2)
    assert J.small({0}) and J.large({0, 1})
    with pytest.raises(ValueError):
        SmallnessIdeal(3, 4)


def test_universe_guards():
    assert sum(1 for _ in Universe(3).all_unary()) == 27
    assert sum(1 for _ in Universe(4).all_permutations()) == 24
    with pytest.raises(GuardError):
        next(Universe(9).all_unary())


def test_format_round_trip():
    for f in [FnTable.unary([2, 0, 1]), FnTable(2, 3, (0, 1, 1, 0, 1, 0, 0, 1))]:
        assert parse_table(format_table(f)) == f


def test_parse_errors_report_position():
    with pytest.raises(ParseError) as e:
        parse_table("3\n0 x 1\n")
    assert (e.value.line, e.value.column) == (2, 3)
    with pytest.raises(ParseError) as e:
        parse_table("3\n0 1\n")
    assert e.value.line == 2
    with pytest.raises(ParseError):
        parse_endofunction("2 2\n0 0 0 1\n")


def test_all_tables_parse_back():
    for vals in itertools.product(range(2), repeat=4):
        f = FnTable(2, 2, vals)
        assert parse_table(format_table(f)) == f
