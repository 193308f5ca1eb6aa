"""Finite-model toolkit for the generalized associativity equation G(J(x,y),z) = H(x,K(y,z))."""

from .core import FiniteSet, Partition, TabulatedFn, compose, kernel_partition
from .diagonal import PowerInstance, diagonal_characterize, diagonal_equivalences, verify_diagonal_lemma
from .errors import EmptyDomainError, FeqError, HypothesisError, InvalidInputError, NotMemberError
from .factorization import TripleInstance, is_member, recover_outer, solution_partition
from .partial import PartialInstance, merge_partial_reductions, partial_reduce
from .quasi import canonical_quasi_inverse, enumerate_quasi_inverses, is_quasi_inverse
from .reductions import build_reduction, characterize, reduce_member

__all__ = [
    "FiniteSet", "Partition", "TabulatedFn", "compose", "kernel_partition",
    "PowerInstance", "diagonal_characterize", "diagonal_equivalences", "verify_diagonal_lemma",
    "EmptyDomainError", "FeqError", "HypothesisError", "InvalidInputError", "NotMemberError",
    "TripleInstance", "is_member", "recover_outer", "solution_partition",
    "PartialInstance", "merge_partial_reductions", "partial_reduce",
    "canonical_quasi_inverse", "enumerate_quasi_inverses", "is_quasi_inverse",
    "build_reduction", "characterize", "reduce_member",
]
