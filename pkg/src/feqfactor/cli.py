"""Command line entry point: ``feqfactor <command> <instance-file> [flags]``.

Exit codes: 0 success, 1 a stated hypothesis does not hold, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .core import FiniteSet, TabulatedFn, compose, format_element, identity_fn
from .diagonal import (
    PowerInstance,
    diagonal_characterize,
    diagonal_equivalences,
    diagonal_projection,
    verify_diagonal_lemma,
    verify_projection_lemma,
)
from .errors import HypothesisError, InvalidInputError
from .factorization import TripleInstance, count_class, is_member, recover_outer, solution_partition
from .io import (
    Instance,
    digest,
    function_domains,
    load_json,
    parse_element,
    parse_function_doc,
    parse_instance_doc,
    parse_merge_plan,
)
from .partial import PartialInstance, compute_domain, merge_partial_reductions, partial_reduce
from .quasi import canonical_quasi_inverse, count_quasi_inverses, enumerate_quasi_inverses
from .reductions import SIDES, build_reduction, characterize, range_gap, reduce_member

SCHEMA_VERSION = 1
COMMANDS = ("solve", "member", "reduce", "characterize", "diagonal", "qinv", "partial-reduce", "merge")


class Outcome(Exception):
    """Carries a finished report together with a nonzero exit code."""

    def __init__(self, report: dict[str, Any], code: int):
        super().__init__(code)
        self.report = report
        self.code = code


def _table(f: TabulatedFn) -> list[list[str]]:
    return [[format_element(p if len(p) > 1 else p[0]), format_element(f.table[p])] for p in f.points()]


def _witness(w: Any) -> Any:
    if isinstance(w, dict):
        return {k: [_witness(x) for x in v] if k == "values" else _witness(v) for k, v in w.items()}
    if isinstance(w, list) or isinstance(w, tuple) and any(isinstance(v, tuple) for v in w):
        return [_witness(v) for v in w]
    if w is None or isinstance(w, bool):
        return w
    return format_element(w)


def _triple_of(instance: Instance) -> TripleInstance:
    return instance.triple if isinstance(instance, PowerInstance) else instance


def _points(instance: Instance, triples) -> list[str]:
    if isinstance(instance, PowerInstance):
        return [format_element((x, *y, z)) for x, y, z in triples]
    return [format_element(t) for t in triples]


def _load_function(path: str | None, instance: Instance) -> TabulatedFn:
    if path is None:
        raise InvalidInputError("this command needs --function")
    F = parse_function_doc(load_json(path), function_domains(instance))
    return instance.to_triple(F) if isinstance(instance, PowerInstance) else F


def _base(raw: str | None):
    return None if raw is None else parse_element(raw, "--base")


def _sides(args) -> tuple[str, ...]:
    return SIDES if args.side == "both" else (args.side,)


def cmd_solve(instance: Instance, args) -> dict[str, Any]:
    tri = _triple_of(instance)
    sol = solution_partition(tri)
    return {
        "universe_size": len(tri.universe),
        "num_blocks": sol.num_blocks,
        "blocks": [_points(instance, block) for block in sol.blocks()],
        "generator": [[p, b] for p, b in zip(_points(instance, tri.universe), sol.partition.labels)],
        "count_class_c2": count_class(tri, 2),
    }


def cmd_member(instance: Instance, args) -> dict[str, Any]:
    tri = _triple_of(instance)
    F = _load_function(args.function, instance)
    ok, witness = is_member(tri, F)
    sol = solution_partition(tri)
    out: dict[str, Any] = {
        "member": ok,
        "witness": _witness(witness),
        "constant_on_blocks": sol.admits(F),
    }
    if ok and tri.is_full and not isinstance(tri, PartialInstance):
        G, H = recover_outer(tri, F)
        out["G"] = _table(G)
        out["H"] = _table(H)
    return out


def _first_base(tri: TripleInstance, side: str):
    bases = tri.Z if side == "K" else tri.X
    for a in bases:
        if not range_gap(tri, side, a):
            return a
    raise HypothesisError("no-range-condition", f"no base point satisfies the {side}-side range condition")


def cmd_reduce(instance: Instance, args) -> dict[str, Any]:
    tri = _triple_of(instance)
    side = "K" if args.side == "both" else args.side
    a = _base(args.base)
    if a is None:
        a = _first_base(tri, side)
    red = build_reduction(tri, side, a, args.tie_break)
    if args.function:
        F = _load_function(args.function, instance)
    else:
        F = solution_partition(tri).generator
    f = reduce_member(tri, F, side, a, args.tie_break, args.enumerate_limit)
    return {
        "side": side,
        "base": format_element(a),
        "map": red.name,
        "quasi_inverse": {format_element(u): format_element(v) for u, v in red.quasi_inverse.choice.items()},
        "reduction": [[p, format_element(v)] for p, v in zip(_points(instance, tri.universe), (red.map.at(t) for t in tri.universe))],
        "f": {format_element(u): format_element(v) for (u,), v in f.table.items()},
        "reduced": "function" if args.function else "generator",
    }


def cmd_characterize(instance: Instance, args) -> dict[str, Any]:
    tri = _triple_of(instance)
    report = characterize(tri, _sides(args), args.tie_break)
    return report.as_dict()


def cmd_diagonal(instance: Instance, args) -> dict[str, Any]:
    if not isinstance(instance, PowerInstance):
        raise InvalidInputError("diagonal needs a power instance")
    p = instance
    base = _base(args.base)
    results: dict[str, Any] = {}
    found = {}
    for side in _sides(args):
        candidates = [base] if base is not None else list(p.A)
        # when no base works, report the one that got furthest
        best = None
        for a in candidates:
            res = diagonal_characterize(p, side, a, args.tie_break, min(args.enumerate_limit, 64))
            if best is None or best.R is None and res.R is not None:
                best = res
            if res.hypotheses_hold:
                found[side] = (a, res)
                break
        res = found[side][1] if side in found else best
        entry = {"base": format_element(res.report.tried[-1].base), **res.as_dict()}
        if side in found:
            entry["lemma"] = _lemma_checks(res)
        results[side] = entry
    out: dict[str, Any] = {"sides": results}
    if "K" in found and "J" in found:
        (_, rk), (_, sj) = found["K"], found["J"]
        eq = diagonal_equivalences(p, rk.R, rk.r, sj.R, sj.r, rk.report.solution)
        out["equivalences"] = eq.as_dict()
    if not found:
        raise Outcome(out, 1)
    return out


def _lemma_checks(res) -> dict[str, Any]:
    R, r = res.R, res.r
    ident = identity_fn(R.codomain)
    const = TabulatedFn((R.codomain,), FiniteSet([R.codomain[0]]), {(u,): R.codomain[0] for u in R.codomain})
    diag = {name: verify_diagonal_lemma(R, f, r, others=(ident, const)) for name, f in (("identity", ident), ("constant", const))}
    Pi = diagonal_projection(R.domains)
    rp = canonical_quasi_inverse(compose(R, Pi))
    proj = verify_projection_lemma(R, ident, Pi, rp, others=(ident, const))
    return {"diagonal_lemma": diag, "projection_lemma": proj}


def cmd_qinv(path: str, args) -> dict[str, Any]:
    f = parse_function_doc(load_json(path))
    q = canonical_quasi_inverse(f, args.tie_break)
    out: dict[str, Any] = {
        "count": count_quasi_inverses(f),
        "canonical": {format_element(u): format_element(v) for u, v in q.choice.items()},
    }
    if args.all:
        out["all"] = [
            {format_element(u): format_element(v) for u, v in g.choice.items()}
            for g in enumerate_quasi_inverses(f, args.enumerate_limit)
        ]
    return out


def _partial_of(instance: Instance) -> PartialInstance:
    if isinstance(instance, PartialInstance):
        return instance
    if isinstance(instance, TripleInstance):
        return PartialInstance.from_triple(instance)
    raise InvalidInputError("this command needs a triple or partial instance")


def cmd_partial_reduce(instance: Instance, args) -> dict[str, Any]:
    p = _partial_of(instance)
    F = _load_function(args.function, instance)
    side = "K" if args.side == "both" else args.side
    part = partial_reduce(p, F, side, _base(args.base), args.tie_break)
    return {
        "side": side,
        "base": format_element(part.reduction.base),
        "domain_size": len(compute_domain(p)),
        "qualifying_size": len(part.qualifying),
        "qualifying": [format_element(t) for t in part.qualifying],
        "f": {format_element(u): format_element(v) for (u,), v in part.f.table.items()},
    }


def cmd_merge(instance: Instance, args, doc: dict) -> dict[str, Any]:
    p = _partial_of(instance)
    plan = parse_merge_plan(doc, p)
    F = _load_function(args.function, instance)
    parts = [partial_reduce(r.instance, F, r.side, r.base, args.tie_break) for r in plan.restrictions]
    result = merge_partial_reductions(parts, plan.coordinate, domain=p.universe)
    out = {
        "parts": [
            {"side": r.side, "base": format_element(r.base), "qualifying_size": len(part.qualifying)}
            for r, part in zip(plan.restrictions, parts)
        ],
        **result.as_dict(),
    }
    if not result.ok:
        raise Outcome(out, 1)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="feqfactor", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("instance", help="instance file (function file for qinv)")
    parser.add_argument("--side", choices=("J", "K", "both"), default="both")
    parser.add_argument("--base", help="base point (element string)")
    parser.add_argument("--tie-break", choices=("first", "last"), default="first")
    parser.add_argument("--enumerate-limit", type=int, default=4096)
    parser.add_argument("--format", choices=("text", "json"), default="json")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--function", help="function file (member, reduce, partial-reduce, merge)")
    parser.add_argument("--all", action="store_true", help="qinv: enumerate every quasi-inverse")
    return parser


def run_command(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    report: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "command": args.command}
    try:
        if args.command == "qinv":
            body = cmd_qinv(args.instance, args)
        else:
            doc = load_json(args.instance)
            instance = parse_instance_doc(doc)
            report["instance_digest"] = digest(instance)
            report["kind"] = type(instance).__name__
            handlers = {
                "solve": cmd_solve,
                "member": cmd_member,
                "reduce": cmd_reduce,
                "characterize": cmd_characterize,
                "diagonal": cmd_diagonal,
                "partial-reduce": cmd_partial_reduce,
            }
            if args.command == "merge":
                body = cmd_merge(instance, args, doc)
            else:
                body = handlers[args.command](instance, args)
        report.update(body)
        return report, 0
    except Outcome as out:
        report.update(out.report)
        return report, out.code
    except HypothesisError as exc:
        report["error"] = {"kind": "hypothesis", "hypothesis": exc.hypothesis, "message": str(exc),
                           "witness": _witness(exc.witness)}
        return report, 1
    except InvalidInputError as exc:
        report["error"] = {"kind": "invalid-input", "message": str(exc)}
        return report, 2


def render(report: dict[str, Any], fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    lines: list[str] = []
    _render_text(report, "", lines)
    return "\n".join(lines) + "\n"


def _render_text(obj: Any, prefix: str, lines: list[str]) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _render_text(obj[k], f"{prefix}.{k}" if prefix else str(k), lines)
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _render_text(v, f"{prefix}[{i}]", lines)
    else:
        lines.append(f"{prefix}: {json.dumps(obj, ensure_ascii=False)}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report, code = run_command(args)
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if code == 2 and "error" in report:
        print(f"feqfactor: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
