"""Brute-force oracles and random instance generators shared by the tests.

The oracles deliberately avoid the package's partition machinery: they work
from the defining equations on plain dicts.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from pathlib import Path

from feqfactor.core import FiniteSet, TabulatedFn
from feqfactor.factorization import TripleInstance

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fx(name: str) -> str:
    return str(FIXTURES / name)


def random_instance(rng: random.Random, max_side: int = 3, max_u: int = 4) -> TripleInstance:
    X, Y, Z = (FiniteSet(range(rng.randint(1, max_side))) for _ in range(3))
    uj, uk = FiniteSet(["j%d" % i for i in range(rng.randint(1, max_u))]), FiniteSet(
        ["k%d" % i for i in range(rng.randint(1, max_u))]
    )
    J = TabulatedFn((X, Y), uj, {p: rng.choice(uj.elements) for p in itertools.product(X, Y)})
    K = TabulatedFn((Y, Z), uk, {p: rng.choice(uk.elements) for p in itertools.product(Y, Z)})
    return TripleInstance(X, Y, Z, J, K)


def random_function(rng: random.Random, domains, codomain_size: int) -> TabulatedFn:
    cod = FiniteSet(range(codomain_size))
    return TabulatedFn(domains, cod, {p: rng.randrange(codomain_size) for p in itertools.product(*domains)})


def oracle_blocks(inst: TripleInstance) -> set[frozenset]:
    """Naive fixpoint: keep merging any two classes holding a glued pair."""
    J, K = inst.J.table, inst.K.table
    universe = list(inst.universe)

    def glued(s, t):
        return (s[2] == t[2] and J[s[:2]] == J[t[:2]]) or (s[0] == t[0] and K[s[1:]] == K[t[1:]])

    label = {t: i for i, t in enumerate(universe)}
    changed = True
    while changed:
        changed = False
        for s, t in itertools.combinations(universe, 2):
            if label[s] != label[t] and glued(s, t):
                old, new = label[t], label[s]
                for w in universe:
                    if label[w] == old:
                        label[w] = new
                changed = True
    groups: dict[int, set] = {}
    for t, lab in label.items():
        groups.setdefault(lab, set()).add(t)
    return {frozenset(g) for g in groups.values()}


def oracle_member(inst: TripleInstance, values: dict) -> bool:
    """F is a member iff the outer G and H it forces are well defined."""
    G: dict = {}
    H: dict = {}
    for x, y, z in inst.universe:
        v = values[(x, y, z)]
        if G.setdefault((inst.J.table[(x, y)], z), v) != v:
            return False
        if H.setdefault((x, inst.K.table[(y, z)]), v) != v:
            return False
    return True


def level_sets(points, fn) -> set[frozenset]:
    groups: dict = {}
    for p in points:
        groups.setdefault(fn(*p), set()).add(p)
    return {frozenset(g) for g in groups.values()}


def blocks_as_sets(sol) -> set[frozenset]:
    return {frozenset(b) for b in sol.blocks()}


def F(*args) -> Fraction:
    return Fraction(*args)
