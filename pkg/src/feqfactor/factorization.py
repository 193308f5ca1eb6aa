"""The solution class of ``F(x,y,z) = G(J(x,y),z) = H(x,K(y,z))``.

A function belongs to the class exactly when it is constant on every block of
the join of two gluing partitions of X×Y×Z:

* (x,y,z) ~ (x',y',z)  whenever J(x,y) = J(x',y')
* (x,y,z) ~ (x,y',z')  whenever K(y,z) = K(y',z')

The class is represented by that partition and its block-index generator B;
members are exactly the functions f∘B.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Any

from .core import (
    FiniteSet,
    Partition,
    TabulatedFn,
    format_element,
    join_partitions,
    kernel_on,
)
from .errors import InvalidInputError, NotMemberError
from .quasi import canonical_quasi_inverse


@dataclass(frozen=True)
class TripleInstance:
    X: FiniteSet
    Y: FiniteSet
    Z: FiniteSet
    J: TabulatedFn
    K: TabulatedFn

    def __post_init__(self) -> None:
        if self.J.domains != (self.X, self.Y):
            raise InvalidInputError("J must be defined on X×Y")
        if self.K.domains != (self.Y, self.Z):
            raise InvalidInputError("K must be defined on Y×Z")
        self._check_domains()

    def _check_domains(self) -> None:
        if self.J.partial or self.K.partial:
            raise InvalidInputError("J and K must be total; use a partial instance instead")

    @property
    def U_J(self) -> FiniteSet:
        return self.J.codomain

    @property
    def U_K(self) -> FiniteSet:
        return self.K.codomain

    @property
    def domain_sets(self) -> tuple[FiniteSet, FiniteSet, FiniteSet]:
        return (self.X, self.Y, self.Z)

    @cached_property
    def universe(self) -> tuple[tuple, ...]:
        """Triples in lexicographic order of the canonical set orders."""
        return tuple(itertools.product(self.X, self.Y, self.Z))

    @cached_property
    def index(self) -> dict[tuple, int]:
        return {t: i for i, t in enumerate(self.universe)}

    @property
    def is_full(self) -> bool:
        return len(self.universe) == len(self.X) * len(self.Y) * len(self.Z)

    def check_function(self, F: TabulatedFn) -> None:
        if F.domains != self.domain_sets:
            raise InvalidInputError("function must be defined on X×Y×Z of the instance")
        for t in self.universe:
            if t not in F.table:
                raise InvalidInputError(f"function undefined at {format_element(t)}")

    def tabulate(self, fn: Any, codomain: FiniteSet | None = None) -> TabulatedFn:
        """Tabulate a Python callable over the instance universe."""
        universe = set(self.universe)
        return TabulatedFn.from_callable(
            self.domain_sets,
            fn,
            codomain,
            where=None if self.is_full else (lambda *t: t in universe),
        )


@dataclass(frozen=True, eq=False)
class SolutionClass:
    instance: TripleInstance
    partition: Partition
    generator: TabulatedFn

    @property
    def num_blocks(self) -> int:
        return self.partition.num_blocks

    def blocks(self) -> list[list[tuple]]:
        u = self.instance.universe
        return [[u[i] for i in block] for block in self.partition.blocks()]

    def admits(self, F: TabulatedFn) -> bool:
        """Constancy of F on every block (the partition-side membership test)."""
        self.instance.check_function(F)
        return kernel_on(self.generator, self.instance.universe).refines(
            kernel_on(F, self.instance.universe)
        )


def gluing_partitions(instance: TripleInstance) -> tuple[Partition, Partition]:
    """The two partitions glued by equal J-values (fixed z) and equal K-values (fixed x)."""
    J, K = instance.J.table, instance.K.table
    return (
        Partition((J[(x, y)], z) for x, y, z in instance.universe),
        Partition((x, K[(y, z)]) for x, y, z in instance.universe),
    )


def solution_partition(instance: TripleInstance) -> SolutionClass:
    by_j, by_k = gluing_partitions(instance)
    part = join_partitions(by_j, by_k)
    blocks = FiniteSet(range(part.num_blocks))
    table = dict(zip(instance.universe, part.labels))
    B = TabulatedFn(instance.domain_sets, blocks, table, partial=not instance.is_full)
    return SolutionClass(instance, part, B)


def is_member(instance: TripleInstance, F: TabulatedFn) -> tuple[bool, Any]:
    """Check both implications directly, without building any partition.

    Each triple is compared with the first triple sharing its key; that is
    enough because equality of F-values is transitive.  The witness is a dict
    naming the condition and the two triples that disagree.
    """
    instance.check_function(F)
    J, K, Ft = instance.J.table, instance.K.table, F.table
    first_j: dict[tuple, tuple] = {}
    for x, y, z in instance.universe:
        t = (x, y, z)
        s = first_j.setdefault((J[(x, y)], z), t)
        if Ft[s] != Ft[t]:
            return False, {"condition": "J", "value": J[(x, y)], "triples": (s, t), "values": (Ft[s], Ft[t])}
    first_k: dict[tuple, tuple] = {}
    for x, y, z in instance.universe:
        t = (x, y, z)
        s = first_k.setdefault((x, K[(y, z)]), t)
        if Ft[s] != Ft[t]:
            return False, {"condition": "K", "value": K[(y, z)], "triples": (s, t), "values": (Ft[s], Ft[t])}
    return True, None


def recover_outer(instance: TripleInstance, F: TabulatedFn) -> tuple[TabulatedFn, TabulatedFn]:
    """Outer functions G on ran(J)×Z and H on X×ran(K) with F = G(J,z) = H(x,K)."""
    ok, witness = is_member(instance, F)
    if not ok:
        raise NotMemberError(witness)
    if not instance.is_full:
        raise InvalidInputError("outer recovery needs a total instance")
    phi = canonical_quasi_inverse(instance.J)
    psi = canonical_quasi_inverse(instance.K)
    ran_j, ran_k = instance.J.ran(), instance.K.ran()
    G = TabulatedFn(
        (ran_j, instance.Z),
        F.codomain,
        {(u, z): F.at((*phi(u), z)) for u in ran_j for z in instance.Z},
    )
    H = TabulatedFn(
        (instance.X, ran_k),
        F.codomain,
        {(x, v): F.at((x, *psi(v))) for x in instance.X for v in ran_k},
    )
    J, K = instance.J.table, instance.K.table
    for x, y, z in instance.universe:
        value = F.at((x, y, z))
        if G.table[(J[(x, y)], z)] != value or H.table[(x, K[(y, z)])] != value:
            raise AssertionError(f"outer recovery failed at {format_element((x, y, z))}")
    return G, H


def count_class(instance: TripleInstance, c: int) -> int:
    """Number of members with values in a fixed set of size ``c``."""
    if c < 1:
        raise InvalidInputError("codomain size must be at least 1")
    return c ** solution_partition(instance).num_blocks
