"""
Finite specialization semilattices and closure semilattices.

Elements are the indices 0..n-1. The join table is the source of truth: the
order a <= b is read off as join[a][b] == b and never stored separately.
Both structure types validate eagerly; ``model_construct`` skips validation
and is how malformed or failing structures reach ``validate``.
"""

import logging
from functools import reduce
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from services.axiom_validator import AxiomValidator, ValidationReport, Violation, check_tables, is_index
from services.errors import PreconditionError, StructuralError

logger = logging.getLogger(__name__)

axiom_validator = AxiomValidator()

Table = Tuple[Tuple[int, ...], ...]
Relation = Tuple[Tuple[bool, ...], ...]


def _rejection(kind: str, report: ValidationReport) -> str:
    first = report.violations[0]
    return f"Invalid {kind}: axiom {first.axiom} fails at {first.witness}"


class SpecSemilattice(BaseModel):
    """A join semilattice with a specialization preorder sq (sq[a][b] means a ⊑ b)."""

    model_config = ConfigDict(frozen=True)

    n: int
    join: Table
    sq: Relation
    zero: Optional[int] = None
    labels: Optional[Tuple[str, ...]] = None

    @model_validator(mode="after")
    def check_axioms(self) -> "SpecSemilattice":
        report = axiom_validator.validate_spec(self.n, self.join, self.sq, self.zero)
        if not report.passed:
            raise ValueError(_rejection("specialization semilattice", report))
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError(f"Expected {self.n} labels, got {len(self.labels)}")
        return self

    def leq(self, a: int, b: int) -> bool:
        return self.join[a][b] == b

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)


class ClosureSemilattice(BaseModel):
    """A join semilattice with an extensive, idempotent, monotone operator K."""

    model_config = ConfigDict(frozen=True)

    n: int
    join: Table
    K: Tuple[int, ...]
    zero: Optional[int] = None
    labels: Optional[Tuple[str, ...]] = None

    @model_validator(mode="after")
    def check_axioms(self) -> "ClosureSemilattice":
        report = axiom_validator.validate_closure(self.n, self.join, self.K, self.zero)
        if not report.passed:
            raise ValueError(_rejection("closure semilattice", report))
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError(f"Expected {self.n} labels, got {len(self.labels)}")
        return self

    def leq(self, a: int, b: int) -> bool:
        return self.join[a][b] == b

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)


Structure = Union[SpecSemilattice, ClosureSemilattice]


def leq_matrix(join: Table) -> np.ndarray:
    J = np.asarray(join, dtype=np.intp)
    return J == np.arange(len(J))[None, :]


def validate(S: SpecSemilattice) -> ValidationReport:
    """Checks (S0)-(S4) and the join laws; works on raw (unvalidated) structures too."""
    return axiom_validator.validate_spec(S.n, S.join, S.sq, S.zero)


def validate_closure(
    C: ClosureSemilattice,
    require_additive: bool = False,
    sq: Optional[Relation] = None,
) -> ValidationReport:
    """``sq``, when given, is a stored relation that must match the one K induces."""
    return axiom_validator.validate_closure(C.n, C.join, C.K, C.zero, require_additive=require_additive, sq=sq)


def induced_order(S: Structure) -> Relation:
    """The partial order a <= b iff a ∨ b = b."""
    check_tables(S.n, S.join)
    return tuple(tuple(bool(x) for x in row) for row in leq_matrix(S.join))


def check_s7(S: SpecSemilattice) -> ValidationReport:
    return axiom_validator.check_s7(S.n, S.join, S.sq)


def _check_element(S: Structure, a: int) -> None:
    if not is_index(a) or not 0 <= a < S.n:
        raise StructuralError(f"Element {a!r} is out of range for a structure of size {S.n}")


def closure_of(S: SpecSemilattice, a: int) -> Optional[int]:
    """
    Ka, the <=-maximum of {b : b ⊑ a}, if it exists.
    The set is join-closed by (S3), so its total join is the only candidate.
    """
    _check_element(S, a)
    below = [b for b in range(S.n) if S.sq[b][a]]
    if not below:
        return None
    top = reduce(lambda x, y: S.join[x][y], below)
    return top if S.sq[top][a] else None


def closure_map(S: SpecSemilattice) -> Tuple[Optional[int], ...]:
    return tuple(closure_of(S, a) for a in range(S.n))


def is_principal(S: SpecSemilattice) -> bool:
    return all(k is not None for k in closure_map(S))


def is_additive(S: Structure) -> bool:
    """K(a∨b) = Ka ∨ Kb for all pairs; spec structures must be principal."""
    K = closure_table(S)
    return all(
        K[S.join[a][b]] == S.join[K[a]][K[b]]
        for a in range(S.n)
        for b in range(S.n)
    )


def closure_table(S: Structure) -> Tuple[int, ...]:
    if isinstance(S, ClosureSemilattice):
        return S.K
    K = closure_map(S)
    missing = [a for a, k in enumerate(K) if k is None]
    if missing:
        raise PreconditionError(f"Structure is not principal: no closure for {missing[0]}", (missing[0],))
    return K


def to_closure_semilattice(S: SpecSemilattice) -> ClosureSemilattice:
    """Same carrier and join, K[a] = closure_of(S, a)."""
    return ClosureSemilattice(n=S.n, join=S.join, K=closure_table(S), zero=S.zero, labels=S.labels)


def from_closure_semilattice(C: ClosureSemilattice) -> SpecSemilattice:
    """a ⊑ b iff a <= Kb."""
    leq = leq_matrix(C.join)
    sq = leq[:, np.asarray(C.K, dtype=np.intp)]
    return SpecSemilattice(
        n=C.n,
        join=C.join,
        sq=tuple(tuple(bool(x) for x in row) for row in sq),
        zero=C.zero,
        labels=C.labels,
    )


def as_spec(S: Structure) -> SpecSemilattice:
    if isinstance(S, ClosureSemilattice):
        return from_closure_semilattice(S)
    return S


def as_closure(S: Structure) -> ClosureSemilattice:
    if isinstance(S, ClosureSemilattice):
        return S
    return to_closure_semilattice(S)


def check_closure_identities(C: ClosureSemilattice) -> ValidationReport:
    """K(a∨b) = K(a∨Kb) and K(a∨b) = K(Ka∨Kb), witnesses (a, b)."""
    J = np.asarray(C.join, dtype=np.intp)
    K = np.asarray(C.K, dtype=np.intp)
    idx = np.arange(C.n)
    closed = K[J]
    one_sided = K[J[idx[:, None], K[None, :]]]
    two_sided = K[J[K[:, None], K[None, :]]]
    violations: List[Violation] = []
    for name, other in (("absorbs-closure", one_sided), ("absorbs-both-closures", two_sided)):
        hits = np.argwhere(closed != other)
        if len(hits):
            violations.append(Violation(axiom=name, witness=tuple(int(x) for x in hits[0])))
    return ValidationReport.from_violations(violations, "closure identities")


def check_closure_order(S: SpecSemilattice) -> ValidationReport:
    """Ka <= Kb iff a ⊑ b, and Ka = Kb iff a ⊑ b ⊑ a."""
    K = np.asarray(closure_table(S), dtype=np.intp)
    Q = np.asarray(S.sq, dtype=bool)
    leq = leq_matrix(S.join)
    by_closure = leq[K[:, None], K[None, :]]
    same_closure = K[:, None] == K[None, :]
    violations: List[Violation] = []
    for name, lhs, rhs in (
        ("closure-order", by_closure, Q),
        ("closure-equivalence", same_closure, Q & Q.T),
    ):
        hits = np.argwhere(lhs != rhs)
        if len(hits):
            violations.append(Violation(axiom=name, witness=tuple(int(x) for x in hits[0])))
    return ValidationReport.from_violations(violations, "closure order")
