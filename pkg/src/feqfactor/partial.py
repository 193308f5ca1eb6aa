"""Instances whose inner functions are defined on subsets of X×Y and Y×Z."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

from .core import Element, TabulatedFn, format_element, infer_codomain
from .errors import EmptyDomainError, HypothesisError, InvalidInputError, NotMemberError
from .factorization import TripleInstance, is_member
from .reductions import NO_RANGE, Reduction, build_reduction, factor_through, range_gap


@dataclass(frozen=True)
class PartialInstance(TripleInstance):
    """J on D_J ⊆ X×Y and K on D_K ⊆ Y×Z; the universe is the joint domain."""

    def _check_domains(self) -> None:
        if not self.J.table or not self.K.table:
            raise EmptyDomainError("empty joint domain")
        if not self.universe:
            raise EmptyDomainError("empty joint domain")

    @cached_property
    def universe(self) -> tuple[tuple, ...]:
        J, K = self.J.table, self.K.table
        return tuple(
            (x, y, z)
            for x, y, z in itertools.product(self.X, self.Y, self.Z)
            if (x, y) in J and (y, z) in K
        )

    @property
    def D_J(self) -> tuple[tuple, ...]:
        return self.J.points()

    @property
    def D_K(self) -> tuple[tuple, ...]:
        return self.K.points()

    @classmethod
    def from_triple(cls, instance: TripleInstance) -> PartialInstance:
        return cls(instance.X, instance.Y, instance.Z, instance.J, instance.K)

    def restricted(self, D_J: Iterable[tuple] | None = None, D_K: Iterable[tuple] | None = None) -> PartialInstance:
        J = self.J if D_J is None else self.J.restrict(D_J)
        K = self.K if D_K is None else self.K.restrict(D_K)
        return PartialInstance(self.X, self.Y, self.Z, J, K)


def compute_domain(p: PartialInstance) -> list[tuple]:
    return list(p.universe)


@dataclass(frozen=True, eq=False)
class PartialReduction:
    instance: PartialInstance
    reduction: Reduction
    qualifying: tuple[tuple, ...]
    f: TabulatedFn

    def value(self, t: tuple) -> Element:
        return self.f.table[(self.reduction.map.at(t),)]


def partial_reduce(
    p: PartialInstance,
    F: TabulatedFn,
    side: str = "K",
    a: Element | None = None,
    tie_break: str = "first",
) -> PartialReduction:
    """Reduce F on the triples where the rebuilt inner pair stays in the domain.

    ``F`` may be defined beyond the joint domain; only its restriction is used.
    """
    if a is None:
        a = p.Z[0] if side == "K" else p.X[0]
    gap = range_gap(p, side, a)
    if gap:
        restrict = "D_K" if side == "K" else "D_J"
        raise HypothesisError(
            NO_RANGE,
            f"{format_element(gap[0])} is not reached by the section at {format_element(a)}; "
            f"try restricting {restrict} so the section covers the whole range",
            gap[0],
        )
    ok, witness = is_member(p, F)
    if not ok:
        raise NotMemberError(witness)
    red = build_reduction(p, side, a, tie_break)
    qualifying = tuple(t for t in p.universe if red.map.defined_at(t))
    f = factor_through(F, red.map, qualifying)
    for t in qualifying:
        if f.table[(red.map.at(t),)] != F.at(t):
            raise AssertionError(f"F = f∘R fails at {format_element(t)}")
    return PartialReduction(p, red, qualifying, f)


@dataclass
class MergeResult:
    f: TabulatedFn | None
    generator: TabulatedFn | None
    conflicts: list[dict[str, Any]] = field(default_factory=list)
    uncovered: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.conflicts and not self.uncovered

    def as_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "f": None if self.f is None else {
                format_element(u): format_element(v) for (u,), v in self.f.table.items()
            },
            "conflicts": [{k: format_element(v) for k, v in c.items()} for c in self.conflicts],
            "uncovered": [format_element(t) for t in self.uncovered],
        }


def merge_partial_reductions(
    parts: Sequence[PartialReduction],
    coordinate: TabulatedFn | None = None,
    domain: Iterable[tuple] | None = None,
) -> MergeResult:
    """Piece partial reductions together into one f on a common coordinate.

    Without ``coordinate`` the reduction maps themselves are the coordinate
    and must agree wherever two parts overlap.  With it (for example the sum
    x+y+z when the parts use differently shifted maps) each qualifying triple
    contributes ``coordinate(t) ↦ part.f(part.map(t))``.  ``domain`` defaults
    to the union of the parts' joint domains.
    """
    if not parts:
        raise InvalidInputError("nothing to merge")
    sets = parts[0].instance.domain_sets
    if domain is None:
        seen = set()
        for part in parts:
            seen.update(part.instance.universe)
        domain = [t for t in itertools.product(*sets) if t in seen]
    else:
        domain = list(domain)

    keys: dict[tuple, Element] = {}
    values: dict[Element, tuple[Element, tuple]] = {}
    conflicts: list[dict[str, Any]] = []
    for part in parts:
        R = part.reduction.map
        for t in part.qualifying:
            key = R.at(t) if coordinate is None else coordinate.at(t)
            if keys.setdefault(t, key) != key:
                conflicts.append({"kind": "map", "triple": t, "first": keys[t], "second": key})
                continue
            v = part.value(t)
            prev = values.setdefault(key, (v, t))
            if prev[0] != v:
                conflicts.append({"kind": "value", "triple": t, "other_triple": prev[1],
                                  "first": prev[0], "second": v})
    uncovered = [t for t in domain if t not in keys]
    if conflicts or uncovered:
        return MergeResult(None, None, conflicts, uncovered)

    key_set = coordinate.codomain.subset(values) if coordinate is not None else infer_codomain(values)
    codomain = parts[0].f.codomain
    for part in parts[1:]:
        if part.f.codomain != codomain:
            codomain = infer_codomain(v for v, _ in values.values())
            break
    f = TabulatedFn((key_set,), codomain, {(u,): values[u][0] for u in key_set})
    full = len(sets[0]) * len(sets[1]) * len(sets[2])
    generator = TabulatedFn(sets, key_set, {t: keys[t] for t in domain}, partial=len(domain) < full)
    return MergeResult(f, generator)
