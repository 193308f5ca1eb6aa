import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from feqfactor.core import FiniteSet, TabulatedFn, as_unary, compose
from feqfactor.errors import EnumerationLimitError, InvalidInputError
from feqfactor.quasi import (
    canonical_quasi_inverse,
    count_quasi_inverses,
    enumerate_quasi_inverses,
    fibers,
    is_quasi_inverse,
)

A = FiniteSet(["a", "b", "c", "d"])


def parity():
    return TabulatedFn((A,), FiniteSet([0, 1]), {("a",): 0, ("b",): 1, ("c",): 0, ("d",): 1})


def test_canonical_tie_breaks():
    f = parity()
    assert canonical_quasi_inverse(f).choice == {0: "a", 1: "b"}
    assert canonical_quasi_inverse(f, "last").choice == {0: "c", 1: "d"}
    with pytest.raises(InvalidInputError):
        canonical_quasi_inverse(f, "middle")


def test_domain_is_range_only():
    f = TabulatedFn((A,), FiniteSet([0, 1, 2]), {(x,): 0 for x in A})
    q = canonical_quasi_inverse(f)
    assert q.g.domains == (FiniteSet([0]),)


def test_enumeration_order_and_count():
    f = parity()
    all_q = enumerate_quasi_inverses(f)
    assert [q.choice for q in all_q] == [
        {0: "a", 1: "b"}, {0: "a", 1: "d"}, {0: "c", 1: "b"}, {0: "c", 1: "d"}
    ]
    assert count_quasi_inverses(f) == 4


def test_enumeration_limit():
    f = parity()
    with pytest.raises(EnumerationLimitError) as err:
        enumerate_quasi_inverses(f, limit=3)
    assert err.value.hypothesis == "enumeration-limit"


def test_multi_argument_function_gets_point_values():
    B = FiniteSet([0, 1])
    f = TabulatedFn.from_callable((B, B), lambda x, y: max(x, y))
    q = canonical_quasi_inverse(f)
    assert q(Fraction(1)) == (Fraction(0), Fraction(1))
    assert is_quasi_inverse(f, q.g) == (True, None)


def test_is_quasi_inverse_witnesses():
    f = parity()
    dom = FiniteSet([0, 1])
    bad_back = TabulatedFn((dom,), A, {(0,): "b", (1,): "b"})
    assert is_quasi_inverse(f, bad_back) == (False, 0)
    wide = FiniteSet([0, 1, 2])
    unreached = TabulatedFn((wide,), A, {(0,): "a", (1,): "b", (2,): "c"})
    assert is_quasi_inverse(f, unreached) == (False, 2)
    with pytest.raises(InvalidInputError):
        is_quasi_inverse(f, TabulatedFn((FiniteSet([0]),), A, {(0,): "a"}))


tables = st.integers(1, 4).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 2), min_size=n, max_size=n))
)


@given(tables)
def test_laws_for_every_enumerated_quasi_inverse(data):
    n, vals = data
    D = FiniteSet(range(n))
    f = TabulatedFn((D,), FiniteSet(range(3)), {(i,): v for i, v in enumerate(vals)})
    qs = enumerate_quasi_inverses(f)
    assert len(qs) == math.prod(len(p) for p in fibers(f).values())
    assert len({tuple(sorted(q.choice.items())) for q in qs}) == len(qs)
    for q in qs:
        g = q.g
        assert compose(f, g).same_values(TabulatedFn((f.ran(),), f.ran(), {(u,): u for u in f.ran()}))
        assert compose(g, compose(f, g)).same_values(g)
        assert is_quasi_inverse(g, as_unary(f))[0]


def test_count_is_product_of_fibre_sizes_on_pairs():
    B = FiniteSet([0, 1, 2])
    f = TabulatedFn.from_callable((B, B), lambda x, y: (x + y) % 2)
    sizes = [sum(1 for p in itertools.product(B, B) if (p[0] + p[1]) % 2 == v) for v in (0, 1)]
    assert count_quasi_inverses(f) == sizes[0] * sizes[1] == 20
