"""Instance files: parsing, validation and canonical emission.

Instance files are JSON.  Elements are strings; strings of the form ``p`` or
``p/q`` (integers) denote exact rationals, anything else is a symbol.  JSON
integers are accepted as rationals too.

    {"kind": "triple",
     "sets": {"X": SET, "Y": SET, "Z": SET},
     "J": FN, "K": FN}

    {"kind": "power", "A": SET, "n": 3, "J": FN, "K": FN}

    {"kind": "partial", "sets": {...}, "J": FN, "K": FN,
     "D_J": DOMAIN, "D_K": DOMAIN,
     "restrictions": [{"side": "K", "base": "0", "D_K": DOMAIN}, ...],
     "coordinate": FN}

    {"kind": "function", "domains": [SET, ...], "codomain": SET, ...FN}

SET is a list of elements or one of {"zmod": n}, {"chain": m},
{"grid": q, "top": "1"}.  FN is {"builder": NAME, ...params} or
{"table": [[[arg, ...], value], ...]}, with an optional "codomain" SET.
DOMAIN is "full", a list of pairs, {"sum_le": c}, {"sum_ge": c} or
{"all_except": [pairs]}.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Union

from . import builders
from .core import Element, FiniteSet, TabulatedFn, format_element, infer_codomain
from .diagonal import PowerInstance
from .errors import InvalidInputError
from .factorization import TripleInstance
from .partial import PartialInstance

Instance = Union[TripleInstance, PowerInstance, PartialInstance]

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")
KINDS = ("triple", "power", "partial")


class SchemaError(InvalidInputError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def parse_element(raw: Any, path: str = "$") -> Element:
    if isinstance(raw, bool):
        raise SchemaError(path, "booleans are not elements")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        if _RATIONAL.match(raw):
            num, _, den = raw.partition("/")
            if den and int(den) == 0:
                raise SchemaError(path, f"zero denominator in {raw!r}")
            return Fraction(int(num), int(den or 1))
        if not raw:
            raise SchemaError(path, "empty symbol")
        return raw
    raise SchemaError(path, f"expected an element string, got {type(raw).__name__}")


def emit_element(e: Element) -> str:
    if isinstance(e, str) and _RATIONAL.match(e):
        raise InvalidInputError(f"symbol {e!r} would be read back as a rational")
    if isinstance(e, tuple):
        raise InvalidInputError("tuple elements cannot be written to instance files")
    return format_element(e)


def _need(doc: dict, key: str, path: str) -> Any:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected an object")
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing field")
    return doc[key]


def parse_set(raw: Any, path: str) -> FiniteSet:
    try:
        if isinstance(raw, list):
            return FiniteSet(parse_element(e, f"{path}[{i}]") for i, e in enumerate(raw))
        if isinstance(raw, dict):
            if "zmod" in raw:
                return builders.zmod(int(raw["zmod"]))
            if "chain" in raw:
                return builders.chain(int(raw["chain"]))
            if "grid" in raw:
                return builders.grid(int(raw["grid"]), parse_element(raw.get("top", "1"), f"{path}.top"))
    except SchemaError:
        raise
    except (InvalidInputError, ValueError, TypeError) as exc:
        raise SchemaError(path, str(exc)) from None
    raise SchemaError(path, "expected a list of elements or a set builder")


def _builder_params(raw: dict) -> dict[str, Any]:
    return {k: v for k, v in raw.items() if k not in ("builder", "codomain", "kind", "domains")}


def parse_function(
    raw: Any,
    domains: tuple[FiniteSet, ...],
    path: str,
    where: Callable[..., bool] | None = None,
) -> TabulatedFn:
    if not isinstance(raw, dict):
        raise SchemaError(path, "expected a function object")
    codomain = parse_set(raw["codomain"], f"{path}.codomain") if "codomain" in raw else None
    try:
        if "builder" in raw:
            return builders.tabulate(raw["builder"], _builder_params(raw), domains, codomain, where)
        if "table" in raw:
            rows = raw["table"]
            if not isinstance(rows, list):
                raise SchemaError(f"{path}.table", "expected a list of [args, value] rows")
            table: dict[tuple, Element] = {}
            for i, row in enumerate(rows):
                rp = f"{path}.table[{i}]"
                if not (isinstance(row, list) and len(row) == 2 and isinstance(row[0], list)):
                    raise SchemaError(rp, "expected [[arg, ...], value]")
                args = tuple(parse_element(a, f"{rp}[0][{j}]") for j, a in enumerate(row[0]))
                if args in table:
                    raise SchemaError(rp, f"duplicate row for {format_element(args)}")
                table[args] = parse_element(row[1], f"{rp}[1]")
            if codomain is None:
                codomain = infer_codomain(table.values())
            full = 1
            for d in domains:
                full *= len(d)
            return TabulatedFn(domains, codomain, table, partial=len(table) < full)
    except SchemaError:
        raise
    except InvalidInputError as exc:
        raise SchemaError(path, str(exc)) from None
    raise SchemaError(path, "expected 'builder' or 'table'")


def parse_domain(raw: Any, left: FiniteSet, right: FiniteSet, path: str) -> Callable[..., bool]:
    """A predicate on pairs describing a subset of left×right."""
    if raw == "full" or raw is None:
        return lambda a, b: True
    if isinstance(raw, list):
        pairs = set()
        for i, pair in enumerate(raw):
            if not (isinstance(pair, list) and len(pair) == 2):
                raise SchemaError(f"{path}[{i}]", "expected a pair")
            a, b = (parse_element(e, f"{path}[{i}]") for e in pair)
            if a not in left or b not in right:
                raise SchemaError(f"{path}[{i}]", "pair outside the declared sets")
            pairs.add((a, b))
        return lambda a, b: (a, b) in pairs
    if isinstance(raw, dict):
        if "sum_le" in raw:
            c = parse_element(raw["sum_le"], f"{path}.sum_le")
            return lambda a, b: a + b <= c
        if "sum_ge" in raw:
            c = parse_element(raw["sum_ge"], f"{path}.sum_ge")
            return lambda a, b: a + b >= c
        if "all_except" in raw:
            keep = parse_domain(raw["all_except"], left, right, f"{path}.all_except")
            return lambda a, b: not keep(a, b)
    raise SchemaError(path, "expected 'full', a list of pairs, or a domain builder")


def _triple_sets(doc: dict) -> tuple[FiniteSet, FiniteSet, FiniteSet]:
    sets = doc.get("sets", {})
    if not isinstance(sets, dict):
        raise SchemaError("$.sets", "expected an object")
    natural = None
    j = doc.get("J")
    if isinstance(j, dict) and "builder" in j:
        try:
            natural = builders.natural_set(j["builder"], _builder_params(j))
        except (KeyError, ValueError):
            natural = None
    out = []
    for name in ("X", "Y", "Z"):
        if name in sets:
            out.append(parse_set(sets[name], f"$.sets.{name}"))
        elif natural is not None:
            out.append(natural)
        else:
            raise SchemaError(f"$.sets.{name}", "missing set (and no builder default)")
    return out[0], out[1], out[2]


def parse_instance_doc(doc: Any) -> Instance:
    kind = _need(doc, "kind", "$")
    if kind not in KINDS:
        raise SchemaError("$.kind", f"expected one of {', '.join(KINDS)}")
    try:
        if kind == "power":
            A = parse_set(_need(doc, "A", "$"), "$.A")
            n = _need(doc, "n", "$")
            if not isinstance(n, int) or isinstance(n, bool):
                raise SchemaError("$.n", "expected an integer")
            if n < 3:
                raise SchemaError("$.n", "must be at least 3")
            doms = (A,) * (n - 1)
            J = parse_function(_need(doc, "J", "$"), doms, "$.J")
            K = parse_function(_need(doc, "K", "$"), doms, "$.K")
            return PowerInstance(A, n, J, K)
        X, Y, Z = _triple_sets(doc)
        if kind == "triple":
            J = parse_function(_need(doc, "J", "$"), (X, Y), "$.J")
            K = parse_function(_need(doc, "K", "$"), (Y, Z), "$.K")
            return TripleInstance(X, Y, Z, J, K)
        dj = parse_domain(doc.get("D_J"), X, Y, "$.D_J")
        dk = parse_domain(doc.get("D_K"), Y, Z, "$.D_K")
        J = parse_function(_need(doc, "J", "$"), (X, Y), "$.J", where=dj)
        K = parse_function(_need(doc, "K", "$"), (Y, Z), "$.K", where=dk)
        if not J.table:
            raise SchemaError("$.D_J", "empty joint domain")
        if not K.table:
            raise SchemaError("$.D_K", "empty joint domain")
        return PartialInstance(X, Y, Z, J, K)
    except SchemaError:
        raise
    except InvalidInputError as exc:
        raise SchemaError("$", str(exc)) from None


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON ({exc.msg} at line {exc.lineno})") from None


def parse_instance(path: str | Path) -> Instance:
    return parse_instance_doc(load_json(path))


def function_domains(instance: Instance) -> tuple[FiniteSet, ...]:
    if isinstance(instance, PowerInstance):
        return instance.power_domains
    return instance.domain_sets


def parse_function_doc(doc: Any, domains: tuple[FiniteSet, ...] | None = None) -> TabulatedFn:
    """A standalone function file; ``domains`` is used when the file omits them."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected a function object")
    if "domains" in doc:
        raw = doc["domains"]
        if not isinstance(raw, list) or not raw:
            raise SchemaError("$.domains", "expected a nonempty list of sets")
        domains = tuple(parse_set(s, f"$.domains[{i}]") for i, s in enumerate(raw))
    if domains is None:
        raise SchemaError("$.domains", "missing field")
    return parse_function(doc, domains, "$")


@dataclass
class Restriction:
    side: str
    base: Element
    instance: PartialInstance


@dataclass
class MergePlan:
    restrictions: list[Restriction] = field(default_factory=list)
    coordinate: TabulatedFn | None = None


def parse_merge_plan(doc: dict, instance: TripleInstance) -> MergePlan:
    """Sub-domain restrictions and the merge coordinate of a partial instance file."""
    raw = doc.get("restrictions")
    if not isinstance(raw, list) or not raw:
        raise SchemaError("$.restrictions", "expected a nonempty list")
    base = instance if isinstance(instance, PartialInstance) else PartialInstance.from_triple(instance)
    X, Y, Z = base.domain_sets
    plan = MergePlan()
    for i, item in enumerate(raw):
        path = f"$.restrictions[{i}]"
        side = _need(item, "side", path)
        if side not in ("K", "J"):
            raise SchemaError(f"{path}.side", "expected 'K' or 'J'")
        point = parse_element(_need(item, "base", path), f"{path}.base")
        dj = dk = None
        if "D_J" in item:
            keep = parse_domain(item["D_J"], X, Y, f"{path}.D_J")
            dj = [q for q in base.D_J if keep(*q)]
        if "D_K" in item:
            keep = parse_domain(item["D_K"], Y, Z, f"{path}.D_K")
            dk = [q for q in base.D_K if keep(*q)]
        try:
            sub = base.restricted(dj, dk)
        except InvalidInputError as exc:
            raise SchemaError(path, str(exc)) from None
        plan.restrictions.append(Restriction(side, point, sub))
    if "coordinate" in doc:
        plan.coordinate = parse_function(doc["coordinate"], base.domain_sets, "$.coordinate")
    return plan


def _emit_set(s: FiniteSet) -> list[str]:
    return [emit_element(e) for e in s]


def emit_function(f: TabulatedFn) -> dict[str, Any]:
    return {
        "codomain": _emit_set(f.codomain),
        "table": [[[emit_element(a) for a in p], emit_element(f.table[p])] for p in f.points()],
    }


def emit_instance(instance: Instance) -> dict[str, Any]:
    """Canonical explicit-table form; ``parse_instance_doc`` inverts it."""
    if isinstance(instance, PowerInstance):
        return {
            "kind": "power",
            "A": _emit_set(instance.A),
            "n": instance.n,
            "J": emit_function(instance.J),
            "K": emit_function(instance.K),
        }
    kind = "partial" if isinstance(instance, PartialInstance) else "triple"
    return {
        "kind": kind,
        "sets": {name: _emit_set(s) for name, s in zip("XYZ", instance.domain_sets)},
        "J": emit_function(instance.J),
        "K": emit_function(instance.K),
    }


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(instance: Instance) -> str:
    return hashlib.sha256(canonical_json(emit_instance(instance)).encode("utf-8")).hexdigest()
