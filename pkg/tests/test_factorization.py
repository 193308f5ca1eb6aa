import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from feqfactor.core import FiniteSet, TabulatedFn, compose
from feqfactor.errors import InvalidInputError, NotMemberError
from feqfactor.factorization import (
    TripleInstance,
    count_class,
    gluing_partitions,
    is_member,
    recover_outer,
    solution_partition,
)
from feqfactor.io import parse_instance

from helpers import blocks_as_sets, fx, level_sets, oracle_blocks, oracle_member, random_function, random_instance


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_solution_partition_matches_naive_closure(seed):
    inst = random_instance(random.Random(seed))
    assert blocks_as_sets(solution_partition(inst)) == oracle_blocks(inst)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_is_member_matches_outer_function_oracle(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    sol = solution_partition(inst)
    for _ in range(10):
        F = random_function(rng, inst.domain_sets, 2)
        ok, witness = is_member(inst, F)
        assert ok == oracle_member(inst, F.table)
        assert (witness is None) == ok
        fB = compose(random_function(rng, (sol.generator.codomain,), 3), sol.generator)
        assert is_member(inst, fB)[0]


def test_member_witness_names_disagreeing_triples():
    inst = parse_instance(fx("diff_z5.json"))
    F = inst.tabulate(lambda x, y, z: x)
    ok, w = is_member(inst, F)
    assert not ok and w["condition"] in ("J", "K")
    s, t = w["triples"]
    assert F.at(s) != F.at(t)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_difference_blocks_are_level_sets(n):
    inst = parse_instance(fx(f"diff_z{n}.json"))
    sol = solution_partition(inst)
    assert sol.num_blocks == n
    assert blocks_as_sets(sol) == level_sets(inst.universe, lambda x, y, z: (x - y + z) % n)


def test_projection_counterexample_depends_on_y_only():
    inst = parse_instance(fx("proj_y.json"))
    sol = solution_partition(inst)
    assert blocks_as_sets(sol) == level_sets(inst.universe, lambda x, y, z: y)


def test_truncated_max_grid_is_not_constant_in_finite_model():
    # boundary triples cannot be glued once the grid is capped
    inst = parse_instance(fx("max1_grid.json"))
    assert solution_partition(inst).num_blocks == len(oracle_blocks(inst)) == 7


def test_explicit_table_fixture():
    inst = parse_instance(fx("table_2x2x2.json"))
    assert len(inst.universe) == 8
    assert blocks_as_sets(solution_partition(inst)) == oracle_blocks(inst)


def test_recover_outer_reproduces_F():
    inst = parse_instance(fx("diff_z5.json"))
    F = inst.tabulate(lambda x, y, z: (x - y + z) % 5 * 2 % 5)
    G, H = recover_outer(inst, F)
    for x, y, z in inst.universe:
        assert G(inst.J(x, y), z) == F(x, y, z) == H(x, inst.K(y, z))


def test_recover_outer_rejects_non_member():
    inst = parse_instance(fx("diff_z3.json"))
    with pytest.raises(NotMemberError):
        recover_outer(inst, inst.tabulate(lambda x, y, z: y))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_count_class_by_brute_force(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, max_side=2, max_u=3)
    cod = FiniteSet([0, 1])
    members = 0
    for values in itertools.product([0, 1], repeat=len(inst.universe)):
        F = TabulatedFn(inst.domain_sets, cod, dict(zip(inst.universe, values)))
        members += is_member(inst, F)[0]
    assert members == count_class(inst, 2)


def test_generator_blocks_numbered_by_first_triple():
    inst = parse_instance(fx("diff_z3.json"))
    B = solution_partition(inst).generator
    seen = []
    for t in inst.universe:
        if B.at(t) not in seen:
            seen.append(B.at(t))
    assert seen == [0, 1, 2]


def test_gluing_partitions_are_refined_by_solution_join():
    inst = parse_instance(fx("chain_max_m3.json"))
    by_j, by_k = gluing_partitions(inst)
    sol = solution_partition(inst).partition
    assert by_j.refines(sol) and by_k.refines(sol)


def test_instance_rejects_mismatched_domains():
    A, B = FiniteSet([0, 1]), FiniteSet([0, 1, 2])
    J = TabulatedFn.from_callable((A, A), lambda x, y: x)
    K = TabulatedFn.from_callable((B, A), lambda y, z: y)
    with pytest.raises(InvalidInputError):
        TripleInstance(A, A, A, J, K)


def test_member_rejects_function_on_wrong_domain():
    inst = parse_instance(fx("diff_z2.json"))
    A = FiniteSet([0, 1, 2])
    with pytest.raises(InvalidInputError):
        is_member(inst, TabulatedFn.from_callable((A, A, A), lambda *t: Fraction(0)))
