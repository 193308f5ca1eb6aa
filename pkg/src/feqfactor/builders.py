"""Builders for the function families used by the fixtures.

Every builder returns a Python callable of any arity; ``tabulate`` turns it
into a TabulatedFn over given domain sets.  ``natural_set`` gives the carrier
a builder is meant for when an instance file does not declare one.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Callable

from .core import Element, FiniteSet, TabulatedFn, normalize
from .errors import InvalidInputError

HALF = Fraction(1, 2)


def zmod(n: int) -> FiniteSet:
    return FiniteSet(range(n))


def chain(m: int) -> FiniteSet:
    return FiniteSet(range(m))


def grid(q: int, top: Any = 1) -> FiniteSet:
    """{0, 1/q, 2/q, ..., top}."""
    top = Fraction(top)
    steps = top * q
    if steps.denominator != 1 or steps < 0:
        raise InvalidInputError(f"grid top {top} is not a multiple of 1/{q}")
    return FiniteSet(Fraction(i, q) for i in range(int(steps) + 1))


def _alt_sum(args) -> Fraction:
    return sum((a if i % 2 == 0 else -a) for i, a in enumerate(args))


def _rationals(name: str, args) -> None:
    for a in args:
        if not isinstance(a, Fraction):
            raise InvalidInputError(f"builder {name} needs rational arguments, got {a!r}")


def make_callable(name: str, params: dict[str, Any], domains: tuple[FiniteSet, ...]) -> Callable[..., Element]:
    def need(key: str) -> Any:
        if key not in params:
            raise InvalidInputError(f"builder {name} needs parameter {key!r}")
        return params[key]

    if name in ("mod_add", "mod_diff", "mod_mul"):
        n = int(need("n"))
        combine = {"mod_add": sum, "mod_diff": _alt_sum, "mod_mul": math.prod}[name]

        def modular(*args):
            _rationals(name, args)
            return Fraction(combine(args) % n)

        return modular
    if name in ("max", "min"):
        pick = max if name == "max" else min
        if all(all(isinstance(e, Fraction) for e in d) for d in domains):
            return lambda *args: pick(args)
        if len(set(domains)) != 1:
            raise InvalidInputError(f"{name} over symbols needs all arguments from one chain")
        order = domains[0]
        return lambda *args: pick(args, key=order.index)
    if name == "proj":
        i = int(need("i"))
        if not 1 <= i <= len(domains):
            raise InvalidInputError(f"proj index {i} out of range")
        return lambda *args: args[i - 1]
    if name == "const":
        value = normalize(need("value"))
        return lambda *args: value
    if name == "clip_half_max":
        return lambda *args: HALF * max(Fraction(1), sum(args))
    if name == "sum":
        return lambda *args: sum(args)
    if name == "half_mean":
        return lambda *args: sum(args) / len(args)
    if name == "truncated_max1":
        return lambda *args: max(Fraction(1), sum(args))
    raise InvalidInputError(f"unknown builder {name!r}")


def natural_set(name: str, params: dict[str, Any]) -> FiniteSet | None:
    if name in ("mod_add", "mod_diff", "mod_mul"):
        return zmod(int(params["n"]))
    if name in ("clip_half_max", "half_mean"):
        return grid(int(params.get("q", 1)))
    if name == "truncated_max1":
        return grid(int(params.get("q", 1)), params.get("M", 1))
    return None


def natural_codomain(name: str, params: dict[str, Any]) -> FiniteSet | None:
    if name in ("mod_add", "mod_diff", "mod_mul"):
        return zmod(int(params["n"]))
    return None


def tabulate(
    name: str,
    params: dict[str, Any],
    domains: tuple[FiniteSet, ...],
    codomain: FiniteSet | None = None,
    where: Callable[..., bool] | None = None,
) -> TabulatedFn:
    fn = make_callable(name, params, domains)
    if codomain is None:
        codomain = natural_codomain(name, params)
    return TabulatedFn.from_callable(domains, fn, codomain, where)
