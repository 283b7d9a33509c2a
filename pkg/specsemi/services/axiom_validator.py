import logging
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from services.errors import StructuralError

logger = logging.getLogger(__name__)

Witness = Tuple[int, ...]


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    axiom: str
    witness: Witness


class ValidationReport(BaseModel):
    """Pass/fail per axiom; each failure carries its least witness tuple."""

    model_config = ConfigDict(frozen=True)

    status: Literal["pass", "fail"]
    violations: Tuple[Violation, ...] = ()
    subject: str = "specialization semilattice"

    @classmethod
    def from_violations(cls, violations: Sequence[Violation], subject: str) -> "ValidationReport":
        return cls(
            status="fail" if violations else "pass",
            violations=tuple(violations),
            subject=subject,
        )

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def failed_axioms(self) -> List[str]:
        return [v.axiom for v in self.violations]

    def witness_for(self, axiom: str) -> Optional[Witness]:
        for violation in self.violations:
            if violation.axiom == axiom:
                return violation.witness
        return None


def is_index(value: Any) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_square(table: Any, n: int) -> bool:
    return (
        isinstance(table, (list, tuple))
        and len(table) == n
        and all(isinstance(row, (list, tuple)) and len(row) == n for row in table)
    )


def _is_flag(value: Any) -> bool:
    return isinstance(value, (bool, np.bool_)) or (is_index(value) and value in (0, 1))


def check_tables(
    n: Any,
    join: Any,
    sq: Any = None,
    K: Any = None,
    zero: Any = None,
) -> None:
    """Reject tables with wrong dimensions or out-of-range entries."""
    if not is_index(n) or n < 1:
        raise StructuralError(f"Element count must be a positive integer, got {n!r}")
    if not _is_square(join, n):
        raise StructuralError(f"Join table must be {n}x{n}")
    for a, row in enumerate(join):
        for b, value in enumerate(row):
            if not is_index(value) or not 0 <= value < n:
                raise StructuralError(f"Join entry ({a},{b}) = {value!r} is not an element index")
    if sq is not None:
        if not _is_square(sq, n):
            raise StructuralError(f"Specialization relation must be {n}x{n}")
        for a, row in enumerate(sq):
            for b, value in enumerate(row):
                if not _is_flag(value):
                    raise StructuralError(f"Specialization entry ({a},{b}) = {value!r} is not 0/1")
    if K is not None:
        if not isinstance(K, (list, tuple)) or len(K) != n:
            raise StructuralError(f"Closure map must have {n} entries")
        for a, value in enumerate(K):
            if not is_index(value) or not 0 <= value < n:
                raise StructuralError(f"Closure entry {a} = {value!r} is not an element index")
    if zero is not None and (not is_index(zero) or not 0 <= zero < n):
        raise StructuralError(f"Zero {zero!r} is not an element index")


def _first(mask: np.ndarray) -> Optional[Witness]:
    # argwhere walks the array in row-major order, so the first hit is lexicographically least
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return tuple(int(x) for x in hits[0])


class AxiomValidator:
    """Checks the defining axioms of specialization and closure semilattices on raw tables."""

    def __init__(self):
        self.join_axioms = ['join-idempotent', 'join-commutative', 'join-associative', 'zero-neutral']
        self.spec_axioms = self.join_axioms + ['S0', 'S1', 'S2', 'S3', 'S4']
        self.closure_axioms = self.join_axioms + [
            'extensive', 'idempotent', 'monotone', 'additive', 'zero-closed', 'derived-order',
        ]

    def _join_violations(self, J: np.ndarray, zero: Optional[int]) -> Dict[str, Optional[Witness]]:
        n = len(J)
        idx = np.arange(n)
        left = J[J[:, :, None], idx[None, None, :]]
        right = J[idx[:, None, None], J[None, :, :]]
        found = {
            'join-idempotent': _first(J[idx, idx] != idx),
            'join-commutative': _first(J != J.T),
            'join-associative': _first(left != right),
            'zero-neutral': None,
        }
        if zero is not None:
            found['zero-neutral'] = _first(J[zero] != idx)
        return found

    def validate_spec(self, n: int, join: Any, sq: Any, zero: Optional[int] = None) -> ValidationReport:
        """
        Validates a specialization semilattice given as raw tables.
        Raises StructuralError for malformed input; axiom failures go into the report.
        """
        check_tables(n, join, sq=sq, zero=zero)
        J = np.asarray(join, dtype=np.intp)
        Q = np.asarray(sq, dtype=bool)
        idx = np.arange(n)
        leq = J == idx[None, :]

        found = self._join_violations(J, zero)
        found['S0'] = None
        if zero is not None:
            found['S0'] = _first(Q[:, zero] & (idx != zero))
        found['S1'] = _first(leq & ~Q)
        found['S2'] = _first(Q[:, :, None] & Q[None, :, :] & ~Q[:, None, :])
        joined = Q[J[:, :, None], idx[None, None, :]]
        found['S3'] = _first(Q[:, None, :] & Q[None, :, :] & ~joined)
        found['S4'] = _first(~Q[idx, idx])

        violations = [Violation(axiom=name, witness=found[name])
                      for name in self.spec_axioms if found[name] is not None]
        if violations:
            logger.warning(f"Specialization semilattice rejected: {[v.axiom for v in violations]}")
        return ValidationReport.from_violations(violations, "specialization semilattice")

    def validate_closure(
        self,
        n: int,
        join: Any,
        K: Any,
        zero: Optional[int] = None,
        require_additive: bool = False,
        sq: Any = None,
    ) -> ValidationReport:
        """
        Validates a closure semilattice (extensive, idempotent, monotone K).
        A stored ``sq`` must equal the derived relation a ⊑ b iff a <= Kb.
        """
        check_tables(n, join, sq=sq, K=K, zero=zero)
        J = np.asarray(join, dtype=np.intp)
        C = np.asarray(K, dtype=np.intp)

        found = self._join_violations(J, zero)
        found['extensive'] = _first(J[np.arange(n), C] != C)
        found['idempotent'] = _first(C[C] != C)
        closed_join = C[J]
        join_of_closures = J[C[:, None], C[None, :]]
        found['monotone'] = _first(J[join_of_closures, closed_join] != closed_join)
        found['additive'] = _first(closed_join != join_of_closures) if require_additive else None
        found['zero-closed'] = None
        if zero is not None and C[zero] != zero:
            found['zero-closed'] = (int(zero),)
        found['derived-order'] = None
        if sq is not None:
            derived = J[np.arange(n)[:, None], C[None, :]] == C[None, :]
            found['derived-order'] = _first(np.asarray(sq, dtype=bool) != derived)

        violations = [Violation(axiom=name, witness=found[name])
                      for name in self.closure_axioms if found[name] is not None]
        if violations:
            logger.warning(f"Closure semilattice rejected: {[v.axiom for v in violations]}")
        return ValidationReport.from_violations(violations, "closure semilattice")

    def check_s7(self, n: int, join: Any, sq: Any) -> ValidationReport:
        """a ⊑ b and a1 ⊑ b1 imply a∨a1 ⊑ b∨b1; witness order (a, b, a1, b1)."""
        check_tables(n, join, sq=sq)
        J = np.asarray(join, dtype=np.intp)
        Q = np.asarray(sq, dtype=bool)
        target = Q[J[:, None, :, None], J[None, :, None, :]]
        witness = _first(Q[:, :, None, None] & Q[None, None, :, :] & ~target)
        violations = [] if witness is None else [Violation(axiom='S7', witness=witness)]
        return ValidationReport.from_violations(violations, "derived rule S7")

    def replay(
        self,
        axiom: str,
        witness: Witness,
        join: Any,
        sq: Any = None,
        K: Any = None,
        zero: Optional[int] = None,
    ) -> bool:
        """Re-evaluates one axiom at one witness with scalar lookups; True means it fails there."""
        j = lambda a, b: join[a][b]
        leq = lambda a, b: join[a][b] == b
        s = lambda a, b: bool(sq[a][b])
        checks: Dict[str, Callable[..., bool]] = {
            'join-idempotent': lambda a: j(a, a) != a,
            'join-commutative': lambda a, b: j(a, b) != j(b, a),
            'join-associative': lambda a, b, c: j(j(a, b), c) != j(a, j(b, c)),
            'zero-neutral': lambda a: j(zero, a) != a,
            'S0': lambda a: s(a, zero) and a != zero,
            'S1': lambda a, b: leq(a, b) and not s(a, b),
            'S2': lambda a, b, c: s(a, b) and s(b, c) and not s(a, c),
            'S3': lambda a, a1, b: s(a, b) and s(a1, b) and not s(j(a, a1), b),
            'S4': lambda a: not s(a, a),
            'S7': lambda a, b, a1, b1: s(a, b) and s(a1, b1) and not s(j(a, a1), j(b, b1)),
            'extensive': lambda a: not leq(a, K[a]),
            'idempotent': lambda a: K[K[a]] != K[a],
            'monotone': lambda a, b: not leq(j(K[a], K[b]), K[j(a, b)]),
            'additive': lambda a, b: K[j(a, b)] != j(K[a], K[b]),
            'zero-closed': lambda z: K[z] != z,
            'derived-order': lambda a, b: s(a, b) != leq(a, K[b]),
        }
        if axiom not in checks:
            raise StructuralError(f"Unknown axiom: {axiom}")
        return checks[axiom](*witness)
