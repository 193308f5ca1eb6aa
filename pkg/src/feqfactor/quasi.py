"""Quasi-inverses of tabulated functions.

A quasi-inverse ``g`` of ``f`` satisfies ``f∘g = id`` on ran(f) and
``ran(g|ran(f)) = ran(g)``.  Constructed quasi-inverses always have the minimal
domain ran(f); their values are argument points of ``f`` (plain elements for
unary ``f``, tuples otherwise).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any

from .core import Element, FiniteSet, TabulatedFn, format_element
from .errors import EnumerationLimitError, InvalidInputError

TIE_BREAKS = ("first", "last")


@dataclass(frozen=True, eq=False)
class QuasiInverse:
    of: TabulatedFn
    g: TabulatedFn

    @property
    def choice(self) -> dict[Element, Element]:
        """Chosen representative for each value of ran(f)."""
        return {args[0]: v for args, v in self.g.table.items()}

    def __call__(self, u: Element) -> Element:
        return self.g.table[(u,)]


def _point_value(f: TabulatedFn, p: tuple) -> Element:
    return p[0] if f.arity == 1 else p


def _point_set(f: TabulatedFn) -> FiniteSet:
    if f.arity == 1:
        return f.domains[0]
    return FiniteSet.product(*f.domains)


def fibers(f: TabulatedFn) -> dict[Element, list[tuple]]:
    """Preimages of each value in ran(f), keyed in codomain order, points in canonical order."""
    by_value: dict[Element, list[tuple]] = {}
    for p in f.points():
        by_value.setdefault(f.table[p], []).append(p)
    return {u: by_value[u] for u in f.ran()}


def _build(f: TabulatedFn, reps: dict[Element, tuple], ran: FiniteSet, points: FiniteSet) -> QuasiInverse:
    table = {(u,): _point_value(f, reps[u]) for u in ran}
    return QuasiInverse(f, TabulatedFn((ran,), points, table))


def canonical_quasi_inverse(f: TabulatedFn, tie_break: str = "first") -> QuasiInverse:
    """The quasi-inverse picking the smallest (or largest) preimage of each value."""
    if tie_break not in TIE_BREAKS:
        raise InvalidInputError(f"unknown tie-break {tie_break!r}")
    pick = 0 if tie_break == "first" else -1
    reps = {u: pts[pick] for u, pts in fibers(f).items()}
    return _build(f, reps, f.ran(), _point_set(f))


def count_quasi_inverses(f: TabulatedFn) -> int:
    return math.prod(len(pts) for pts in fibers(f).values())


def enumerate_quasi_inverses(f: TabulatedFn, limit: int = 4096) -> list[QuasiInverse]:
    """All quasi-inverses with domain ran(f), in lexicographic order of choices."""
    fib = fibers(f)
    count = math.prod(len(pts) for pts in fib.values())
    if count > limit:
        raise EnumerationLimitError(count, limit)
    ran, points = f.ran(), _point_set(f)
    values = list(fib)
    return [
        _build(f, dict(zip(values, choice)), ran, points)
        for choice in itertools.product(*fib.values())
    ]


def is_quasi_inverse(f: TabulatedFn, g: TabulatedFn) -> tuple[bool, Any]:
    """Check both defining conditions of ``g ∈ Q(f)``.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is a
    value of ran(f) with ``f(g(u)) != u``, or a point of dom(g) whose image is
    not reached from ran(f).
    """
    if g.arity != 1:
        raise InvalidInputError("a quasi-inverse must be a unary function")
    ran_f = f.ran()
    for u in ran_f:
        if (u,) not in g.table:
            raise InvalidInputError(f"quasi-inverse candidate undefined at {format_element(u)}")
    for u in ran_f:
        v = g.table[(u,)]
        try:
            back = f.table.get(f.args_of(v))
        except InvalidInputError:
            back = None
        if back != u:
            return False, u
    reached = {g.table[(u,)] for u in ran_f}
    for args, v in g.table.items():
        if v not in reached:
            return False, args[0]
    return True, None
