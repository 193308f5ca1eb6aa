"""Sections, range conditions and the reductions R_k and S_j.

With a base point ``a`` in Z such that ran(K) equals the range of the section
y ↦ K(y,a), every member F factors as f∘R_k where

    R_k(x,y,z) = J(x, k(K(y,z)))

for any quasi-inverse k of that section.  Dually, with ``b`` in X and
ran(J) equal to the range of y ↦ J(b,y), members factor through

    S_j(x,y,z) = K(j(J(x,y)), z).

``characterize`` searches every base point, and reports whether one of the
reductions generates the whole class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from .core import Element, FiniteSet, TabulatedFn, format_element, kernel_on
from .errors import HypothesisError, InternalInvariantError, InvalidInputError, NotMemberError
from .factorization import SolutionClass, TripleInstance, is_member, solution_partition
from .quasi import QuasiInverse, canonical_quasi_inverse, count_quasi_inverses, enumerate_quasi_inverses

SIDES = ("K", "J")

CHARACTERIZED = "characterized"
CONSTANTS = "characterized-as-constants"
NECESSARY_ONLY = "necessary-only"
NO_RANGE = "no-range-condition"


def section_at(f: TabulatedFn, position: int, a: Element) -> TabulatedFn:
    """Freeze argument ``position`` (1-based) of ``f`` at ``a``.

    Works on partial functions too: the section is defined wherever the
    frozen point is.
    """
    if not 1 <= position <= f.arity:
        raise InvalidInputError(f"position {position} out of range for arity {f.arity}")
    if f.arity == 1:
        raise InvalidInputError("cannot take a section of a unary function")
    i = position - 1
    if a not in f.domains[i]:
        raise InvalidInputError(f"{format_element(a)} is not in domain set {position}")
    domains = f.domains[:i] + f.domains[i + 1:]
    table = {p[:i] + p[i + 1:]: v for p, v in f.table.items() if p[i] == a}
    full = math.prod(len(d) for d in domains)
    return TabulatedFn(domains, f.codomain, table, partial=len(table) < full)


def _side_parts(instance: TripleInstance, side: str) -> tuple[TabulatedFn, int, FiniteSet]:
    if side == "K":
        return instance.K, 2, instance.Z
    if side == "J":
        return instance.J, 1, instance.X
    raise InvalidInputError(f"side must be 'K' or 'J', got {side!r}")


def side_section(instance: TripleInstance, side: str, a: Element) -> TabulatedFn:
    """K_2^a (K-side, a in Z) or J_1^a (J-side, a in X)."""
    fn, position, _ = _side_parts(instance, side)
    return section_at(fn, position, a)


def range_gap(instance: TripleInstance, side: str, a: Element) -> list[Element]:
    """Values of ran(K) (or ran(J)) missed by the section, in codomain order."""
    fn, _, _ = _side_parts(instance, side)
    sec = side_section(instance, side, a)
    hit = sec.image()
    return [u for u in fn.ran() if u not in hit]


def range_condition(instance: TripleInstance, side: str, a: Element) -> bool:
    return not range_gap(instance, side, a)


@dataclass(frozen=True, eq=False)
class Reduction:
    side: str
    base: Element
    quasi_inverse: QuasiInverse
    map: TabulatedFn

    @property
    def name(self) -> str:
        return "R_k" if self.side == "K" else "S_j"


def _reduction_table(instance: TripleInstance, side: str, q: QuasiInverse) -> dict[tuple, Element]:
    J, K = instance.J.table, instance.K.table
    table = {}
    for x, y, z in instance.universe:
        if side == "K":
            key = (x, q(K[(y, z)]))
            if key in J:
                table[(x, y, z)] = J[key]
        else:
            key = (q(J[(x, y)]), z)
            if key in K:
                table[(x, y, z)] = K[key]
    return table


def build_reduction(
    instance: TripleInstance,
    side: str,
    a: Element,
    tie_break: str = "first",
    quasi_inverse: QuasiInverse | None = None,
) -> Reduction:
    """R_k (side "K") or S_j (side "J") at base point ``a``.

    On partial instances the map is defined only on qualifying triples, i.e.
    those where the rebuilt inner pair lies in the domain of J (resp. K).
    """
    gap = range_gap(instance, side, a)
    if gap:
        fn = "K" if side == "K" else "J"
        raise HypothesisError(
            NO_RANGE,
            f"ran({fn}) differs from the range of its section at {format_element(a)}; "
            f"{format_element(gap[0])} is never reached",
            gap[0],
        )
    sec = side_section(instance, side, a)
    q = quasi_inverse or canonical_quasi_inverse(sec, tie_break)
    codomain = instance.U_J if side == "K" else instance.U_K
    table = _reduction_table(instance, side, q)
    full = len(instance.X) * len(instance.Y) * len(instance.Z)
    R = TabulatedFn(instance.domain_sets, codomain, table, partial=len(table) < full)
    return Reduction(side, a, q, R)


def factor_through(F: TabulatedFn, R: TabulatedFn, points) -> TabulatedFn:
    """The unique f on R-values with F = f∘R over ``points``.

    Raises InternalInvariantError if F is not constant on the fibres of R.
    """
    values: dict[Element, Element] = {}
    for t in points:
        u = R.at(t)
        v = values.setdefault(u, F.at(t))
        if v != F.at(t):
            raise InternalInvariantError(
                f"F is not a function of the reduction: {format_element(t)} maps to "
                f"{format_element(u)} but F values {format_element(v)} and {format_element(F.at(t))} differ"
            )
    dom = R.codomain.subset(values)
    return TabulatedFn((dom,), F.codomain, {(u,): values[u] for u in dom})


def outer_section(instance: TripleInstance, F: TabulatedFn, side: str, a: Element) -> TabulatedFn:
    """The outer function frozen at the base point, on every value it is pinned to.

    K-side: u ↦ F(x,y,a) for any (x,y,a) in the universe with J(x,y) = u.
    J-side: v ↦ F(a,y,z) for any (a,y,z) in the universe with K(y,z) = v.
    This extends the f of ``reduce_member`` beyond the range of one reduction.
    """
    J, K = instance.J.table, instance.K.table
    if side == "K":
        pairs = (((J[(x, y)]), (x, y, z)) for x, y, z in instance.universe if z == a)
        codomain = instance.U_J
    else:
        pairs = ((K[(y, z)], (x, y, z)) for x, y, z in instance.universe if x == a)
        codomain = instance.U_K
    values: dict[Element, Element] = {}
    for u, t in pairs:
        if values.setdefault(u, F.at(t)) != F.at(t):
            raise NotMemberError({"condition": side, "value": u, "triples": (t,)})
    dom = codomain.subset(values)
    return TabulatedFn((dom,), F.codomain, {(u,): values[u] for u in dom})


def reduce_member(
    instance: TripleInstance,
    F: TabulatedFn,
    side: str,
    a: Element,
    tie_break: str = "first",
    enumerate_limit: int = 4096,
) -> TabulatedFn:
    """The f on ran(R) with F = f∘R, R the reduction at ``a``.

    When the quasi-inverses of the section number at most ``enumerate_limit``,
    F is re-checked against every one of them through ``outer_section``, which
    agrees with f on ran(R).
    """
    ok, witness = is_member(instance, F)
    if not ok:
        raise NotMemberError(witness)
    red = build_reduction(instance, side, a, tie_break)
    points = [t for t in instance.universe if red.map.defined_at(t)]
    f = factor_through(F, red.map, points)
    sec = side_section(instance, side, a)
    if count_quasi_inverses(sec) <= enumerate_limit:
        ext = outer_section(instance, F, side, a).table
        if any(ext[k] != v for k, v in f.table.items()):
            raise InternalInvariantError("f disagrees with the outer section on ran(R)")
        for q in enumerate_quasi_inverses(sec, enumerate_limit):
            other = build_reduction(instance, side, a, quasi_inverse=q)
            for t, u in other.map.table.items():
                if ext.get((u,), _MISSING) != F.at(t):
                    raise InternalInvariantError(
                        f"F = f∘{red.name} fails for another quasi-inverse at {format_element(t)}"
                    )
    return f


_MISSING = object()


@dataclass
class BaseTrial:
    side: str
    base: Element
    range_condition: bool
    missing_value: Element | None = None
    member: bool | None = None
    kernel_equal: bool | None = None
    range_size: int | None = None
    reduction: Reduction | None = field(default=None, repr=False)

    def as_dict(self) -> dict[str, Any]:
        return {
            "side": self.side,
            "base": format_element(self.base),
            "range_condition": self.range_condition,
            "missing_value": None if self.missing_value is None else format_element(self.missing_value),
            "member": self.member,
            "kernel_equal": self.kernel_equal,
            "range_size": self.range_size,
        }


@dataclass
class CharacterizationReport:
    status: str
    solution: SolutionClass
    reduction: Reduction | None = None
    generator_agreement: bool = False
    tried: list[BaseTrial] = field(default_factory=list)
    alternatives: list[tuple[str, Element]] = field(default_factory=list)
    coinciding: list[tuple[Element, Element]] = field(default_factory=list)
    witnesses: list[str] = field(default_factory=list)

    def as_dict(self) -> dict[str, Any]:
        red = self.reduction
        return {
            "status": self.status,
            "num_blocks": self.solution.num_blocks,
            "reduction": None if red is None else {
                "side": red.side,
                "base": format_element(red.base),
                "map": red.name,
                "range": [format_element(u) for u in red.map.ran()],
            },
            "generator_agreement": self.generator_agreement,
            "tried": [t.as_dict() for t in self.tried],
            "alternatives": [{"side": s, "base": format_element(b)} for s, b in self.alternatives],
            "coinciding_reductions": [
                {"K_base": format_element(a), "J_base": format_element(b)} for a, b in self.coinciding
            ],
            "witnesses": list(self.witnesses),
        }


def _trial(instance: TripleInstance, sol: SolutionClass, side: str, a: Element, tie_break: str) -> BaseTrial:
    gap = range_gap(instance, side, a)
    if gap:
        return BaseTrial(side, a, False, missing_value=gap[0])
    red = build_reduction(instance, side, a, tie_break)
    member, _ = is_member(instance, red.map) if not red.map.partial else (False, None)
    kernel_equal = (
        not red.map.partial
        and kernel_on(red.map, instance.universe) == sol.partition
    )
    return BaseTrial(side, a, True, member=member, kernel_equal=kernel_equal,
                     range_size=len(red.map.image()), reduction=red)


def characterize(
    instance: TripleInstance,
    sides: tuple[str, ...] = SIDES,
    tie_break: str = "first",
) -> CharacterizationReport:
    """Try every base point on the requested sides and classify the instance."""
    sol = solution_partition(instance)
    report = CharacterizationReport(NO_RANGE, sol)
    for side in sides:
        _, _, bases = _side_parts(instance, side)
        for a in bases:
            trial = _trial(instance, sol, side, a, tie_break)
            report.tried.append(trial)
            if trial.member and not trial.kernel_equal:
                raise InternalInvariantError(
                    f"{trial.reduction.name} at {format_element(a)} is a member but does not generate the class"
                )

    built = [t for t in report.tried if t.reduction is not None]
    for tr in (t for t in built if t.side == "K"):
        for ts in (t for t in built if t.side == "J"):
            if tr.reduction.map.same_values(ts.reduction.map):
                report.coinciding.append((tr.base, ts.base))
                if not tr.member:
                    raise InternalInvariantError("coinciding R_k and S_j must be members")
                report.witnesses.append(
                    f"R_k at {format_element(tr.base)} equals S_j at {format_element(ts.base)}; both are members"
                )

    winners = [t for t in built if t.kernel_equal]
    if winners:
        report.status = CHARACTERIZED
        report.reduction = winners[0].reduction
        report.generator_agreement = True
        report.alternatives = [(t.side, t.base) for t in winners[1:]]
    elif built:
        report.status = CONSTANTS if sol.num_blocks == 1 else NECESSARY_ONLY
        report.reduction = built[0].reduction
        for t in built:
            report.witnesses.append(
                f"{t.reduction.name} at {format_element(t.base)} is not a member "
                f"({t.range_size} values vs {sol.num_blocks} blocks)"
            )
    elif sol.num_blocks == 1:
        report.status = CONSTANTS
    for t in report.tried:
        if not t.range_condition:
            report.witnesses.append(
                f"{t.side}-side base {format_element(t.base)}: value {format_element(t.missing_value)} "
                "is missing from the section range"
            )
    return report
