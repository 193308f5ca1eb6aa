"""Finite sets, tabulated functions and partitions.

Elements are plain Python values: ``str`` for symbols, ``fractions.Fraction``
for exact rationals (ints are normalized to ``Fraction``), and tuples of
elements for points of Cartesian powers.  No floats are accepted anywhere.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import InvalidInputError

Element = Union[str, Fraction, tuple]


def normalize(value: Any) -> Element:
    if isinstance(value, bool):
        raise InvalidInputError(f"booleans are not elements: {value!r}")
    if isinstance(value, Fraction) or isinstance(value, str):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, tuple):
        return tuple(normalize(v) for v in value)
    raise InvalidInputError(f"unsupported element {value!r} ({type(value).__name__})")


def format_element(e: Element) -> str:
    if isinstance(e, Fraction):
        return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"
    if isinstance(e, tuple):
        return "(" + ",".join(format_element(v) for v in e) + ")"
    return e


class FiniteSet:
    """Nonempty ordered finite set; the canonical order is declaration order."""

    __slots__ = ("elements", "_index")

    def __init__(self, elements: Iterable[Any]):
        elems = tuple(normalize(e) for e in elements)
        if not elems:
            raise InvalidInputError("finite sets must be nonempty")
        index: dict[Element, int] = {}
        for i, e in enumerate(elems):
            if e in index:
                raise InvalidInputError(f"duplicate element {format_element(e)}")
            index[e] = i
        self.elements = elems
        self._index = index

    @classmethod
    def product(cls, *sets: FiniteSet) -> FiniteSet:
        """Cartesian product as a set of tuples, in lexicographic order."""
        return cls(itertools.product(*(s.elements for s in sets)))

    def index(self, e: Element) -> int:
        try:
            return self._index[e]
        except (KeyError, TypeError):
            raise InvalidInputError(f"{format_element(e)} is not an element of the set") from None

    def subset(self, values: Iterable[Element]) -> FiniteSet:
        """The given values as a FiniteSet ordered by this set's order."""
        wanted = set(values)
        for v in wanted:
            if v not in self._index:
                raise InvalidInputError(f"{format_element(v)} is not an element of the set")
        return FiniteSet(e for e in self.elements if e in wanted)

    def __contains__(self, e: object) -> bool:
        try:
            return e in self._index
        except TypeError:
            return False

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i: int) -> Element:
        return self.elements[i]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteSet) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return "FiniteSet([" + ", ".join(format_element(e) for e in self.elements) + "])"


def infer_codomain(values: Iterable[Element]) -> FiniteSet:
    """Distinct values, sorted when all rational, else in first-seen order."""
    seen = list(dict.fromkeys(values))
    if seen and all(isinstance(v, Fraction) for v in seen):
        seen.sort()
    return FiniteSet(seen)


class TabulatedFn:
    """A total or partial function given by an explicit argument table.

    Keys of ``table`` are argument tuples (1-tuples for unary functions).
    """

    __slots__ = ("domains", "codomain", "table", "partial", "_points", "_image")

    def __init__(
        self,
        domains: Sequence[FiniteSet],
        codomain: FiniteSet,
        table: Mapping[tuple, Any],
        partial: bool = False,
    ):
        domains = tuple(domains)
        if not domains:
            raise InvalidInputError("functions need at least one argument")
        clean: dict[tuple, Element] = {}
        for args, value in table.items():
            args = tuple(normalize(a) for a in args)
            if len(args) != len(domains):
                raise InvalidInputError(f"argument tuple {format_element(args)} has wrong arity")
            for pos, (a, dom) in enumerate(zip(args, domains), start=1):
                if a not in dom:
                    raise InvalidInputError(
                        f"argument {format_element(a)} at position {pos} is outside its domain"
                    )
            value = normalize(value)
            if value not in codomain:
                raise InvalidInputError(
                    f"value {format_element(value)} at {format_element(args)} is outside the codomain"
                )
            clean[args] = value
        if not partial and len(clean) != math.prod(len(d) for d in domains):
            missing = next(p for p in itertools.product(*domains) if p not in clean)
            raise InvalidInputError(f"total function undefined at {format_element(missing)}")
        self.domains = domains
        self.codomain = codomain
        self.table = clean
        self.partial = partial
        self._points: tuple | None = None
        self._image: frozenset | None = None

    @classmethod
    def from_callable(
        cls,
        domains: Sequence[FiniteSet],
        fn: Callable[..., Any],
        codomain: FiniteSet | None = None,
        where: Callable[..., bool] | None = None,
    ) -> TabulatedFn:
        """Tabulate ``fn`` over the product of ``domains`` (optionally filtered)."""
        points = itertools.product(*domains)
        if where is not None:
            points = (p for p in points if where(*p))
        table = {p: normalize(fn(*p)) for p in points}
        if codomain is None:
            codomain = infer_codomain(table.values())
        full = math.prod(len(d) for d in domains)
        return cls(domains, codomain, table, partial=len(table) < full)

    @property
    def arity(self) -> int:
        return len(self.domains)

    def __call__(self, *args: Element) -> Element:
        return self.table[args]

    def at(self, point: tuple) -> Element:
        return self.table[point]

    def defined_at(self, point: tuple) -> bool:
        return point in self.table

    def args_of(self, value: Element) -> tuple:
        """Argument tuple for feeding ``value`` (an element or a point) to this function."""
        if self.arity == 1:
            return (value,)
        if not isinstance(value, tuple) or len(value) != self.arity:
            raise InvalidInputError(f"{format_element(value)} is not a point of arity {self.arity}")
        return value

    def points(self) -> tuple:
        """Defined argument tuples in lexicographic canonical order."""
        if self._points is None:
            if self.partial:
                self._points = tuple(p for p in itertools.product(*self.domains) if p in self.table)
            else:
                self._points = tuple(itertools.product(*self.domains))
        return self._points

    def image(self) -> frozenset:
        if self._image is None:
            self._image = frozenset(self.table.values())
        return self._image

    def ran(self) -> FiniteSet:
        """Range as a FiniteSet in codomain order."""
        return self.codomain.subset(self.image())

    def is_injective(self) -> bool:
        return len(self.image()) == len(self.table)

    def restrict(self, points: Iterable[tuple]) -> TabulatedFn:
        table = {p: self.table[p] for p in points}
        return TabulatedFn(self.domains, self.codomain, table, partial=True)

    def with_codomain(self, codomain: FiniteSet) -> TabulatedFn:
        return TabulatedFn(self.domains, codomain, self.table, self.partial)

    def same_values(self, other: TabulatedFn) -> bool:
        """Equality as graphs: same defined points, same values."""
        return self.table == other.table

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TabulatedFn)
            and self.domains == other.domains
            and self.codomain == other.codomain
            and self.partial == other.partial
            and self.table == other.table
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        kind = "partial" if self.partial else "total"
        return f"<TabulatedFn arity={self.arity} {kind} |table|={len(self.table)}>"


def identity_fn(s: FiniteSet) -> TabulatedFn:
    return TabulatedFn((s,), s, {(e,): e for e in s})


def as_unary(f: TabulatedFn) -> TabulatedFn:
    """View ``f`` as a unary function on its argument points."""
    if f.arity == 1:
        return f
    dom = FiniteSet.product(*f.domains)
    return TabulatedFn((dom,), f.codomain, {(p,): v for p, v in f.table.items()}, f.partial)


def constant_fn(domains: Sequence[FiniteSet], value: Element, codomain: FiniteSet | None = None) -> TabulatedFn:
    value = normalize(value)
    return TabulatedFn.from_callable(domains, lambda *_: value, codomain or FiniteSet([value]))


def compose(f: TabulatedFn, g: TabulatedFn) -> TabulatedFn:
    """``f∘g``; tuple values of ``g`` are unpacked when ``f`` has arity > 1."""
    table = {}
    for p, v in g.table.items():
        args = f.args_of(v)
        try:
            table[p] = f.table[args]
        except KeyError:
            raise InvalidInputError(
                f"value {format_element(v)} of the inner function is outside the domain of the outer one"
            ) from None
    return TabulatedFn(g.domains, f.codomain, table, partial=g.partial)


class Partition:
    """Frozen partition of ``range(size)`` with canonical block numbers.

    Blocks are numbered 0..b-1 in order of their smallest member.
    """

    __slots__ = ("labels", "num_blocks")

    def __init__(self, labels: Iterable[Hashable]):
        renumber: dict[Hashable, int] = {}
        out = []
        for lab in labels:
            if lab not in renumber:
                renumber[lab] = len(renumber)
            out.append(renumber[lab])
        self.labels = tuple(out)
        self.num_blocks = len(renumber)

    @classmethod
    def singletons(cls, size: int) -> Partition:
        return cls(range(size))

    @classmethod
    def whole(cls, size: int) -> Partition:
        return cls([0] * size)

    @classmethod
    def from_blocks(cls, size: int, blocks: Iterable[Iterable[int]]) -> Partition:
        labels: list[int | None] = [None] * size
        for b, block in enumerate(blocks):
            for i in block:
                if labels[i] is not None:
                    raise InvalidInputError(f"index {i} appears in two blocks")
                labels[i] = b
        if None in labels:
            raise InvalidInputError("blocks do not cover the universe")
        return cls(labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def block_of(self, i: int) -> int:
        return self.labels[i]

    def same_block(self, i: int, j: int) -> bool:
        return self.labels[i] == self.labels[j]

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for i, b in enumerate(self.labels):
            out[b].append(i)
        return tuple(tuple(b) for b in out)

    def refines(self, other: Partition) -> bool:
        """True when every block of self lies inside a block of ``other``."""
        _check_sizes(self, other)
        seen: dict[int, int] = {}
        for mine, theirs in zip(self.labels, other.labels):
            if seen.setdefault(mine, theirs) != theirs:
                return False
        return True

    def join(self, other: Partition) -> Partition:
        return join_partitions(self, other)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Partition) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return "Partition(" + repr([list(b) for b in self.blocks()]) + ")"


class DisjointSet:
    """Union-find with union by rank and path compression."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self.rank[ri] < self.rank[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        if self.rank[ri] == self.rank[rj]:
            self.rank[ri] += 1
        return True

    def union_partition(self, p: Partition) -> None:
        firsts: dict[int, int] = {}
        for i, b in enumerate(p.labels):
            first = firsts.setdefault(b, i)
            if first != i:
                self.union(first, i)

    def freeze(self) -> Partition:
        return Partition(self.find(i) for i in range(len(self.parent)))


def _check_sizes(p: Partition, q: Partition) -> None:
    if p.size != q.size:
        raise InvalidInputError(f"partitions of different universes ({p.size} vs {q.size})")


def join_partitions(p: Partition, q: Partition) -> Partition:
    """Finest partition coarsening both ``p`` and ``q``."""
    _check_sizes(p, q)
    ds = DisjointSet(p.size)
    ds.union_partition(p)
    ds.union_partition(q)
    return ds.freeze()


def kernel_on(f: TabulatedFn, points: Sequence[tuple]) -> Partition:
    """Kernel of ``f`` over an explicitly indexed universe of argument tuples."""
    try:
        return Partition(f.table[p] for p in points)
    except KeyError as exc:
        raise InvalidInputError(f"function undefined at {format_element(exc.args[0])}") from None


def kernel_partition(f: TabulatedFn) -> Partition:
    if f.partial:
        raise InvalidInputError("kernel requires total function")
    return kernel_on(f, f.points())
