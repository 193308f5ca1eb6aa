"""Instances on Cartesian powers A^n and diagonal-section machinery.

A PowerInstance takes J, K on A^(n-1) and curries the middle n-2 coordinates
into Y = A^(n-2), so that X×Y×Z = A×A^(n-2)×A is identified with A^n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable

from .core import (
    Element,
    FiniteSet,
    TabulatedFn,
    compose,
    format_element,
    kernel_on,
)
from .errors import HypothesisError, InvalidInputError
from .factorization import SolutionClass, TripleInstance, is_member, solution_partition
from .quasi import (
    QuasiInverse,
    canonical_quasi_inverse,
    count_quasi_inverses,
    enumerate_quasi_inverses,
    is_quasi_inverse,
)
from .reductions import (
    CHARACTERIZED,
    NECESSARY_ONLY,
    NO_RANGE,
    BaseTrial,
    CharacterizationReport,
    Reduction,
    build_reduction,
    range_gap,
    side_section,
)

HYPOTHESIS_FAILED = "hypothesis-failed"
DIAGONAL_RANGE = "ran(R)=ran(delta_R)"


@dataclass(frozen=True)
class PowerInstance:
    A: FiniteSet
    n: int
    J: TabulatedFn
    K: TabulatedFn

    def __post_init__(self) -> None:
        if self.n < 3:
            raise InvalidInputError("power instances need n >= 3")
        arity = (self.A,) * (self.n - 1)
        for name, fn in (("J", self.J), ("K", self.K)):
            if fn.domains != arity:
                raise InvalidInputError(f"{name} must be defined on A^{self.n - 1}")
            if fn.partial:
                raise InvalidInputError(f"{name} must be total")

    @cached_property
    def Y(self) -> FiniteSet:
        return FiniteSet.product(*([self.A] * (self.n - 2)))

    @cached_property
    def triple(self) -> TripleInstance:
        J, K = self.J.table, self.K.table
        cj = TabulatedFn((self.A, self.Y), self.J.codomain, {(x, y): J[(x, *y)] for x in self.A for y in self.Y})
        ck = TabulatedFn((self.Y, self.A), self.K.codomain, {(y, z): K[(*y, z)] for y in self.Y for z in self.A})
        return TripleInstance(self.A, self.Y, self.A, cj, ck)

    @property
    def power_domains(self) -> tuple[FiniteSet, ...]:
        return (self.A,) * self.n

    def to_triple(self, F: TabulatedFn) -> TabulatedFn:
        if F.domains != self.power_domains:
            raise InvalidInputError(f"function must be defined on A^{self.n}")
        table = {(p[0], p[1:-1], p[-1]): v for p, v in F.table.items()}
        return TabulatedFn(self.triple.domain_sets, F.codomain, table, F.partial)

    def to_power(self, F: TabulatedFn) -> TabulatedFn:
        if F.domains != self.triple.domain_sets:
            raise InvalidInputError("function must be defined on X×Y×Z of the curried instance")
        table = {(x, *y, z): v for (x, y, z), v in F.table.items()}
        return TabulatedFn(self.power_domains, F.codomain, table, F.partial)


@dataclass(frozen=True, eq=False)
class DiagonalReport:
    delta: TabulatedFn
    idempotent: bool
    range_idempotent: bool
    note: str | None = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "delta": {format_element(x): format_element(v) for (x,), v in self.delta.table.items()},
            "idempotent": self.idempotent,
            "range_idempotent": self.range_idempotent,
            "note": self.note,
        }


def delta(F: TabulatedFn) -> TabulatedFn:
    """Diagonal section x ↦ F(x, ..., x)."""
    A = F.domains[0]
    if any(d != A for d in F.domains):
        raise InvalidInputError("diagonal sections need a function on a Cartesian power")
    return TabulatedFn((A,), F.codomain, {(x,): F.at((x,) * F.arity) for x in A})


def _idempotent(d: TabulatedFn) -> bool:
    return all(v == x for (x,), v in d.table.items())


def diagonal_section(F: TabulatedFn) -> DiagonalReport:
    d = delta(F)
    A = F.domains[0]
    idem = _idempotent(d)
    if not F.image() <= set(A):
        return DiagonalReport(d, idem, False, note="range is not contained in A")
    range_idem = all(d.table[(v,)] == v for v in F.table.values())
    return DiagonalReport(d, idem, range_idem)


def _diagonal_gap(R: TabulatedFn, dR: TabulatedFn) -> list[Element]:
    return [u for u in R.ran() if u not in dR.image()]


def _check_diagonal_hypothesis(R: TabulatedFn) -> TabulatedFn:
    dR = delta(R)
    gap = _diagonal_gap(R, dR)
    if gap:
        raise HypothesisError(
            DIAGONAL_RANGE,
            f"{format_element(gap[0])} is a value of R but not of its diagonal section",
            gap[0],
        )
    return dR


def verify_diagonal_lemma(
    R: TabulatedFn,
    f: TabulatedFn,
    r: QuasiInverse,
    others: Iterable[TabulatedFn] = (),
) -> dict[str, bool]:
    """Check assertions (a)-(e) of the diagonal lemma for F = f∘R.

    ``others`` supplies the f' used by (b); any f' whose F' has the same
    diagonal section as F must give F' = F.
    """
    dR = _check_diagonal_hypothesis(R)
    ok, witness = is_quasi_inverse(dR, r.g)
    if not ok:
        raise InvalidInputError(f"r is not a quasi-inverse of the diagonal section (at {format_element(witness)})")
    F = compose(f, R)
    dF = compose(f, dR)
    rR = compose(r.g, R)
    a = F.same_values(compose(dF, rR))
    b = True
    for f2 in others:
        if compose(f2, dR).same_values(dF):
            b = b and compose(f2, R).same_values(F)
    F_idem = _idempotent(dF)
    rR_idem = _idempotent(delta(rR))
    c = (not F_idem) or F.same_values(rR)
    d = not (F_idem and not rR_idem)
    e = compose(r.g, compose(dR, rR)).same_values(rR) and rR_idem == dR.is_injective()
    return {"a": a, "b": b, "c": c, "d": d, "e": e}


def verify_projection_lemma(
    R: TabulatedFn,
    f: TabulatedFn,
    Pi: TabulatedFn,
    r: QuasiInverse,
    others: Iterable[TabulatedFn] = (),
) -> dict[str, bool]:
    """The same five assertions with the diagonal replaced by a self-map Pi.

    ``Pi`` maps the argument points of R to argument points of R; ``r`` is a
    quasi-inverse of R∘Pi whose values are argument points.
    """
    if Pi.domains != R.domains:
        raise InvalidInputError("Pi must be a self-map of the domain of R")
    RPi = compose(R, Pi)
    gap = [u for u in R.ran() if u not in RPi.image()]
    if gap:
        raise HypothesisError(
            "ran(R)=ran(R∘Pi)", f"{format_element(gap[0])} is a value of R but not of R∘Pi", gap[0]
        )
    ok, witness = is_quasi_inverse(RPi, r.g)
    if not ok:
        raise InvalidInputError(f"r is not a quasi-inverse of R∘Pi (at {format_element(witness)})")
    points = R.points()
    F = compose(f, R)
    FPi = compose(F, Pi)
    T = compose(Pi, compose(r.g, R))
    a = F.same_values(compose(F, T))
    b = True
    for f2 in others:
        F2 = compose(f2, R)
        if compose(F2, Pi).same_values(FPi):
            b = b and F2.same_values(F)
    fixes = FPi.same_values(Pi)
    c = (not fixes) or F.same_values(T)
    d = compose(T, Pi).same_values(Pi) or not fixes
    e = True
    if compose(Pi, Pi).same_values(Pi):
        TPi = compose(T, Pi)
        e = compose(T, compose(Pi, T)).same_values(T) and (
            TPi.same_values(Pi) == (kernel_on(TPi, points) == kernel_on(Pi, points))
        )
    return {"a": a, "b": b, "c": c, "d": d, "e": e}


def diagonal_projection(domains: tuple[FiniteSet, ...]) -> TabulatedFn:
    """Pi(x1, ..., xn) = (x1, ..., x1)."""
    n = len(domains)
    return TabulatedFn(
        domains,
        FiniteSet.product(*domains),
        {p: (p[0],) * n for p in itertools.product(*domains)},
    )


@dataclass
class DiagonalResult:
    report: CharacterizationReport
    diagonal: DiagonalReport | None = None
    R: TabulatedFn | None = None
    r: QuasiInverse | None = None
    generator: TabulatedFn | None = None
    member: bool | None = None
    failed_hypothesis: str | None = None
    witness: Element | None = None
    per_k: list[dict[str, Any]] = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return self.failed_hypothesis is None

    def as_dict(self) -> dict[str, Any]:
        gen = self.generator
        return {
            "status": self.report.status,
            "failed_hypothesis": self.failed_hypothesis,
            "witness": None if self.witness is None else format_element(self.witness),
            "member": self.member,
            "generator_agreement": self.report.generator_agreement,
            "generator": None if gen is None else [
                [format_element(p), format_element(v)] for p, v in gen.table.items()
            ],
            "r": None if self.r is None else {
                format_element(u): format_element(v) for u, v in self.r.choice.items()
            },
            "diagonal": None if self.diagonal is None else self.diagonal.as_dict(),
            "per_k": self.per_k,
        }


def diagonal_characterize(
    p: PowerInstance,
    side: str = "K",
    base: Element | None = None,
    tie_break: str = "first",
    enumerate_limit: int = 64,
) -> DiagonalResult:
    """Build R at ``base``, then r∘R with r the canonical quasi-inverse of δ_R.

    The instance is characterized when r∘R is a member; every member is then
    δ_F∘(r∘R).  Failed hypotheses become statuses rather than exceptions.
    Each quasi-inverse of the section (up to ``enumerate_limit``) is also
    tried and recorded separately in ``per_k``.
    """
    tri = p.triple
    sol = solution_partition(tri)
    if base is None:
        base = tri.Z[0] if side == "K" else tri.X[0]
    report = CharacterizationReport(NO_RANGE, sol)
    result = DiagonalResult(report)
    gap = range_gap(tri, side, base)
    report.tried.append(BaseTrial(side, base, not gap, missing_value=gap[0] if gap else None))
    if gap:
        result.failed_hypothesis = "range condition"
        result.witness = gap[0]
        report.witnesses.append(f"{format_element(gap[0])} is missing from the section range")
        return result
    red = build_reduction(tri, side, base, tie_break)
    report.reduction = red
    R = p.to_power(red.map)
    result.R = R
    dR = delta(R)
    missing = _diagonal_gap(R, dR)
    sec = side_section(tri, side, base)
    if count_quasi_inverses(sec) <= enumerate_limit:
        result.per_k = [_per_k(p, tri, side, base, q) for q in enumerate_quasi_inverses(sec, enumerate_limit)]
    if missing:
        report.status = HYPOTHESIS_FAILED
        result.failed_hypothesis = DIAGONAL_RANGE
        result.witness = missing[0]
        report.witnesses.append(
            f"{format_element(missing[0])} is a value of {red.name} but not of its diagonal section"
        )
        return result
    r = canonical_quasi_inverse(dR, tie_break)
    T = compose(r.g, R)
    member, witness = is_member(tri, p.to_triple(T))
    result.r, result.generator, result.member = r, T, member
    result.diagonal = diagonal_section(T)
    report.generator_agreement = kernel_on(T, T.points()) == sol.partition
    report.status = CHARACTERIZED if member else NECESSARY_ONLY
    report.tried[-1].member = member
    report.tried[-1].kernel_equal = report.generator_agreement
    report.tried[-1].range_size = len(T.image())
    if not member:
        report.witnesses.append(f"r∘{red.name} is not a member: {witness['condition']}-condition fails")
    return result


def _per_k(p: PowerInstance, tri: TripleInstance, side: str, base: Element, q: QuasiInverse) -> dict[str, Any]:
    red = build_reduction(tri, side, base, quasi_inverse=q)
    R = p.to_power(red.map)
    dR = delta(R)
    entry: dict[str, Any] = {
        "k": {format_element(u): format_element(v) for u, v in q.choice.items()},
        "diagonal_range_condition": not _diagonal_gap(R, dR),
        "member": None,
    }
    if entry["diagonal_range_condition"]:
        T = compose(canonical_quasi_inverse(dR).g, R)
        entry["member"] = is_member(tri, p.to_triple(T))[0]
    return entry


@dataclass
class Equivalences:
    injective_diagonal_member: bool
    equal_and_idempotent: bool
    r_side: bool
    s_side: bool
    inverse_identity: bool | None = None

    @property
    def verdict(self) -> bool:
        return len({self.injective_diagonal_member, self.equal_and_idempotent, self.r_side, self.s_side}) == 1

    def as_dict(self) -> dict[str, Any]:
        return {
            "i": self.injective_diagonal_member,
            "ii": self.equal_and_idempotent,
            "iii": self.r_side,
            "iv": self.s_side,
            "inverse_identity": self.inverse_identity,
            "verdict": self.verdict,
        }


def diagonal_equivalences(
    p: PowerInstance,
    R: TabulatedFn,
    r: QuasiInverse,
    S: TabulatedFn,
    s: QuasiInverse,
    solution: SolutionClass | None = None,
) -> Equivalences:
    """Decide the four equivalent assertions for r∘R and s∘S.

    (i) quantifies over all members; since members are f∘B and
    δ_(f∘B) = f∘δ_B, it is decided as "δ_B is one-to-one".
    """
    for fn, q in ((R, r), (S, s)):
        d = _check_diagonal_hypothesis(fn)
        if not is_quasi_inverse(d, q.g)[0]:
            raise InvalidInputError("supplied map is not a quasi-inverse of the diagonal section")
    tri = p.triple
    sol = solution or solution_partition(tri)
    B = p.to_power(sol.generator)
    dB = delta(B)
    rR, sS = compose(r.g, R), compose(s.g, S)
    rR_idem, sS_idem = _idempotent(delta(rR)), _idempotent(delta(sS))
    i = dB.is_injective()
    out = Equivalences(
        injective_diagonal_member=i,
        equal_and_idempotent=rR.same_values(sS) and rR_idem,
        r_side=rR_idem and is_member(tri, p.to_triple(rR))[0],
        s_side=sS_idem and is_member(tri, p.to_triple(sS))[0],
    )
    if i:
        inv = {v: x for (x,), v in dB.table.items()}
        out.inverse_identity = all(inv[B.at(q)] == rR.at(q) for q in B.points())
    return out


def reduction_pair(p: PowerInstance, a: Element, b: Element, tie_break: str = "first"):
    """(R, r, S, s) at K-side base ``a`` and J-side base ``b``; hypotheses checked."""
    tri = p.triple
    out = []
    for side, base in (("K", a), ("J", b)):
        red: Reduction = build_reduction(tri, side, base, tie_break)
        M = p.to_power(red.map)
        d = _check_diagonal_hypothesis(M)
        out += [M, canonical_quasi_inverse(d, tie_break)]
    return tuple(out)
