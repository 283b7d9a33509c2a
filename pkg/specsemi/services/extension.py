"""
The universal additive closure extension of a specialization semilattice.

Pairs (a, b) of S×S stand for "a ∨ Kb". Two pairs are identified by the
relation

    (a,b) ∼ (c,d)  iff  b ⊑ d, d ⊑ b, and some a1 ⊑ b, c1 ⊑ d have
                        a <= c ∨ c1 and c <= a ∨ a1,

the classes form S̃ with K[a,b] = [a, a∨b], and υ(a) = [a, 0] embeds S.
Structures without a zero get one adjoined first; its class [0,0] is the
last class and is stripped from the final carrier.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from config import Config
from services.axiom_validator import ValidationReport, Violation, is_index
from services.constructions import adjoin_zero, restrict
from services.core import (
    ClosureSemilattice,
    SpecSemilattice,
    Structure,
    as_closure,
    as_spec,
    closure_of,
    from_closure_semilattice,
    leq_matrix,
    validate,
    validate_closure,
)
from services.errors import AxiomError, BudgetExceededError, InvariantViolation, PreconditionError, StructuralError
from services.morphisms import Morphism, is_homomorphism, is_K_homomorphism, search_maps
from services.partition import UnionFind, partition_index

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]

__all__ = [
    "ExtensionResult",
    "Morphism",
    "UniversalityFailure",
    "build_extension",
    "check_sim_laws",
    "check_universal_property",
    "find_universality_failure",
    "lift_functorial",
    "lift_homomorphism",
    "sim_matrix",
    "sim_related",
    "sim_witness",
]


class ExtensionResult(BaseModel):
    """
    S̃ as a closure semilattice and as a specialization semilattice, the
    embedding υ, and the class table over the pairs of ``base`` (S itself,
    or S with an adjoined zero, in which case that zero's pair maps to None).
    """

    model_config = ConfigDict(frozen=True)

    source: SpecSemilattice
    base: SpecSemilattice
    tilde: ClosureSemilattice
    tilde_spec: SpecSemilattice
    upsilon: Tuple[int, ...]
    class_of: Tuple[Tuple[Optional[int], ...], ...]
    representatives: Tuple[Tuple[int, int], ...]
    adjoined_zero: bool = False

    @model_validator(mode="after")
    def check_shape(self) -> "ExtensionResult":
        m = self.tilde.n
        if self.tilde_spec.n != m or len(self.representatives) != m:
            raise ValueError("tilde, tilde_spec and representatives disagree on the carrier size")
        if len(self.upsilon) != self.source.n or any(not 0 <= u < m for u in self.upsilon):
            raise ValueError("upsilon must send every source element into the carrier")
        if len(self.class_of) != self.base.n or any(len(row) != self.base.n for row in self.class_of):
            raise ValueError("class_of must be a table over the pairs of the base structure")
        if any(x is not None and not 0 <= x < m for row in self.class_of for x in row):
            raise ValueError("class_of entries must be carrier indices or null")
        for x, (a, b) in enumerate(self.representatives):
            if not (0 <= a < self.base.n and 0 <= b < self.base.n):
                raise ValueError(f"Representative {x} = ({a},{b}) is not a pair of base elements")
            if self.class_of[a][b] != x:
                raise ValueError(f"Representative ({a},{b}) is not in class {x}")
        return self

    def element(self, a: int, b: int) -> Optional[int]:
        """Index of the class [a, b], with a, b indices of ``base``."""
        return self.class_of[a][b]


def _require_zero(S: SpecSemilattice) -> int:
    if S.zero is None:
        raise PreconditionError("The pair relation is defined here for structures with a zero; adjoin one first")
    return S.zero


def _check_pair(S: SpecSemilattice, p: Sequence[int]) -> Pair:
    if len(p) != 2 or not all(is_index(x) and 0 <= x < S.n for x in p):
        raise StructuralError(f"{p!r} is not a pair of elements of a structure of size {S.n}")
    return int(p[0]), int(p[1])


def sim_witness(S: SpecSemilattice, p: Sequence[int], q: Sequence[int]) -> Optional[Pair]:
    """
    The least (a1, c1) witnessing p ∼ q, or None.
    The conditions on a1 and c1 are independent, so the least pair is the
    pair of least witnesses.
    """
    _require_zero(S)
    a, b = _check_pair(S, p)
    c, d = _check_pair(S, q)
    if not (S.sq[b][d] and S.sq[d][b]):
        return None
    a1 = next((x for x in range(S.n) if S.sq[x][b] and S.leq(c, S.join[a][x])), None)
    if a1 is None:
        return None
    c1 = next((x for x in range(S.n) if S.sq[x][d] and S.leq(a, S.join[c][x])), None)
    if c1 is None:
        return None
    return a1, c1


def sim_related(S: SpecSemilattice, p: Sequence[int], q: Sequence[int]) -> bool:
    return sim_witness(S, p, q) is not None


def sim_matrix(S: SpecSemilattice) -> np.ndarray:
    """The relation ∼ as an n²×n² boolean matrix; pair (a, b) has index a*n + b."""
    _require_zero(S)
    n = S.n
    J = np.asarray(S.join, dtype=np.intp)
    Q = np.asarray(S.sq, dtype=bool)
    leq = leq_matrix(S.join)
    # reach[x, y, z]: some w ⊑ z has x <= y ∨ w
    reach = np.einsum("xyw,wz->xyz", leq[:, J].astype(np.int64), Q.astype(np.int64)) > 0
    mutual = Q & Q.T
    related = (
        mutual[None, :, None, :]
        & reach[:, None, :, :]
        & np.transpose(reach, (1, 2, 0))[:, :, :, None]
    )
    return related.reshape(n * n, n * n)


def _pairs(n: int, *indices: int) -> Tuple[int, ...]:
    return tuple(x for p in indices for x in divmod(int(p), n))


def check_sim_laws(S: SpecSemilattice, M: Optional[np.ndarray] = None) -> ValidationReport:
    """
    Runtime check that ∼ is an equivalence and a join congruence on S×S,
    that K[a,b] = [a, a∨b] respects it, and that [a, a∨b] = [0, a∨b].
    Witnesses are flattened pairs.
    """
    zero = _require_zero(S)
    n = S.n
    M = sim_matrix(S) if M is None else M
    N = n * n
    J = np.asarray(S.join, dtype=np.intp)
    A, B = np.divmod(np.arange(N), n)
    violations: List[Violation] = []

    def record(name: str, mask: np.ndarray) -> Optional[np.ndarray]:
        hits = np.argwhere(mask)
        if len(hits):
            violations.append(Violation(axiom=name, witness=_pairs(n, *hits[0])))
            return hits[0]
        return None

    record("sim-reflexive", ~np.diag(M))
    record("sim-symmetric", M != M.T)

    Mi = M.astype(np.int64)
    hit = np.argwhere(((Mi @ Mi) > 0) & ~M)
    if len(hit):
        p, r = hit[0]
        q = int(np.argwhere(M[p] & M[:, r])[0][0])
        violations.append(Violation(axiom="sim-transitive", witness=_pairs(n, p, q, r)))

    K = A * n + J[A, B]
    record("k-well-defined", M & ~M[K[:, None], K[None, :]])

    PJ = J[A[:, None], A[None, :]] * n + J[B[:, None], B[None, :]]
    record("sim-congruence", M[:, :, None] & ~M[PJ[:, None, :], PJ[None, :, :]])

    closed = A * n + J[A, B]
    grounded = zero * n + J[A, B]
    hits = np.argwhere(~M[closed, grounded])
    if len(hits):
        violations.append(Violation(axiom="k-class-identity", witness=_pairs(n, hits[0][0])))

    return ValidationReport.from_violations(violations, "pair relation")


def _assemble(base: SpecSemilattice) -> Tuple[List[List[int]], List[int]]:
    M = sim_matrix(base)
    laws = check_sim_laws(base, M)
    if not laws.passed:
        first = laws.violations[0]
        raise InvariantViolation(f"Pair relation fails {first.axiom} at {first.witness}")
    uf = UnionFind(range(base.n * base.n))
    for p, q in np.argwhere(np.triu(M, 1)):
        uf.union(int(p), int(q))
    classes = uf.classes()
    return classes, partition_index(classes, base.n * base.n)


def build_extension(S: SpecSemilattice, max_size: int = Config.MAX_EXTENSION_SIZE) -> ExtensionResult:
    """
    Builds S̃, K, ⊑ on S̃ and υ. Classes are numbered by their least pair.
    A structure without a zero goes through adjoin, extend, strip.
    """
    report = validate(S)
    if not report.passed:
        raise AxiomError(f"Cannot extend an invalid structure: {report.failed_axioms()}", report)
    if S.n > max_size:
        raise BudgetExceededError(f"Structure of size {S.n} exceeds the extension ceiling {max_size}")

    adjoined = S.zero is None
    base = adjoin_zero(S) if adjoined else S
    n, z = base.n, base.zero
    classes, cls = _assemble(base)
    m = len(classes)
    reps = [divmod(block[0], n) for block in classes]

    def cell(a: int, b: int) -> int:
        return cls[a * n + b]

    join = tuple(
        tuple(cell(base.join[a][c], base.join[b][d]) for (c, d) in reps)
        for (a, b) in reps
    )
    K = tuple(cell(a, base.join[a][b]) for (a, b) in reps)
    labels = tuple(f"[{base.label(a)},{base.label(b)}]" for (a, b) in reps)
    full = ClosureSemilattice(n=m, join=join, K=K, zero=cell(z, z), labels=labels)
    if not validate_closure(full, require_additive=True).passed:
        raise InvariantViolation("The extension's closure is not additive")
    full_spec = from_closure_semilattice(full)
    for x in range(m):
        if closure_of(full_spec, x) != full.K[x]:
            raise InvariantViolation(f"K[{x}] is not the largest element specializing to {x}")

    upsilon = tuple(cell(a, z) for a in range(S.n))
    class_of = [[cell(a, b) for b in range(n)] for a in range(n)]
    tilde, tilde_spec, reps_kept = full, full_spec, reps
    if adjoined:
        if cell(z, z) != m - 1:
            raise InvariantViolation("The class of the adjoined zero is not the last class")
        if m == 1:
            raise InvariantViolation("Stripping the zero class leaves an empty carrier")
        keep = list(range(m - 1))
        tilde, tilde_spec = restrict(full, keep), restrict(full_spec, keep)
        class_of[z][z] = None
        reps_kept = reps[:-1]

    logger.info(f"Extension of a size-{S.n} structure has {tilde.n} elements")
    return ExtensionResult(
        source=S,
        base=base,
        tilde=tilde,
        tilde_spec=tilde_spec,
        upsilon=upsilon,
        class_of=tuple(tuple(row) for row in class_of),
        representatives=tuple(reps_kept),
        adjoined_zero=adjoined,
    )


def _closure_target(T: Structure) -> ClosureSemilattice:
    C = as_closure(T)
    if not validate_closure(C, require_additive=True).passed:
        raise PreconditionError("Target must be an additive closure semilattice")
    return C


def lift_homomorphism(ext: ExtensionResult, T: Structure, eta: Morphism) -> Morphism:
    """The unique K-homomorphism η̃ with η̃[a,b] = η(a) ∨ Kη(b) and η̃ ∘ υ = η."""
    C = _closure_target(T)
    S = ext.source
    if as_spec(eta.source) != S or as_spec(eta.target) != as_spec(C):
        raise PreconditionError("η must run from the extended structure into the target")
    both_zero = S.zero is not None and C.zero is not None
    if not is_homomorphism(eta, zero_preserving=both_zero):
        raise PreconditionError(f"{list(eta.map)} is not a homomorphism")
    if S.zero is not None and C.K[eta.map[S.zero]] != eta.map[S.zero]:
        raise PreconditionError("η(0) is not closed in the target, so nothing factors η", (S.zero,))

    # on the base, the adjoined zero contributes nothing to a join
    image: List[Optional[int]] = list(eta.map) + ([None] if ext.adjoined_zero else [])
    values = []
    for a, b in ext.representatives:
        parts = [image[a]] if image[a] is not None else []
        if image[b] is not None:
            parts.append(C.K[image[b]])
        value = parts[0]
        for part in parts[1:]:
            value = C.join[value][part]
        values.append(value)

    lifted = Morphism(source=ext.tilde, target=C, map=tuple(values))
    if not is_K_homomorphism(lifted):
        raise InvariantViolation(f"Lift {values} is not a K-homomorphism")
    if any(lifted.map[ext.upsilon[a]] != eta.map[a] for a in range(S.n)):
        raise InvariantViolation(f"Lift {values} does not extend η")
    return lifted.model_copy(update={"role": "k_homomorphism"})


def lift_functorial(extS: ExtensionResult, extU: ExtensionResult, psi: Morphism) -> Morphism:
    """ψ̃ : S̃ → Ũ with ψ̃ ∘ υ_S = υ_U ∘ ψ, obtained by lifting υ_U ∘ ψ."""
    if as_spec(psi.source) != extS.source or as_spec(psi.target) != extU.source:
        raise PreconditionError("ψ must run between the two extended structures")
    if not is_homomorphism(psi, zero_preserving=True):
        raise PreconditionError(f"{list(psi.map)} is not a 0-preserving homomorphism")
    eta = Morphism(
        source=extS.source,
        target=extU.tilde,
        map=tuple(extU.upsilon[x] for x in psi.map),
    )
    lifted = lift_homomorphism(extS, extU.tilde, eta)
    for a in range(extS.source.n):
        if lifted.map[extS.upsilon[a]] != extU.upsilon[psi.map[a]]:
            raise InvariantViolation(f"Square does not commute at {a}")
    return lifted


class UniversalityFailure(BaseModel):
    """A homomorphism η whose factorizations through υ are not exactly the closed-form lift."""

    eta: Tuple[int, ...]
    factorizations: List[Tuple[int, ...]]
    expected: Optional[Tuple[int, ...]] = None
    reason: str


Lift = Callable[[ExtensionResult, Structure, Morphism], Morphism]


def find_universality_failure(
    S: SpecSemilattice,
    ext: ExtensionResult,
    T: Structure,
    lift: Optional[Lift] = None,
    budget: int = Config.ENUMERATION_BUDGET,
) -> Optional[UniversalityFailure]:
    """
    Enumerates every homomorphism η : S → T and every K-homomorphism
    g : S̃ → T, and checks that exactly one g has g ∘ υ = η and that it is
    the closed-form lift. If η(0) is not closed in T no g may exist.
    """
    C = _closure_target(T)
    if S != ext.source:
        raise PreconditionError("The extension was built from a different structure")
    lift = lift or lift_homomorphism
    both_zero = S.zero is not None and C.zero is not None

    by_restriction: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    for g in search_maps(ext.tilde, C, k_only=True, budget=budget):
        key = tuple(g[u] for u in ext.upsilon)
        by_restriction.setdefault(key, []).append(g)

    checked = 0
    for eta in search_maps(S, C, zero_preserving=both_zero, budget=budget):
        checked += 1
        factorizations = by_restriction.get(eta, [])
        liftable = S.zero is None or C.K[eta[S.zero]] == eta[S.zero]
        if not liftable:
            if factorizations:
                return UniversalityFailure(
                    eta=eta, factorizations=factorizations,
                    reason="η(0) is not closed, yet some K-homomorphism factors η",
                )
            continue
        try:
            expected = lift(ext, C, Morphism(source=S, target=C, map=eta)).map
        except InvariantViolation as e:
            return UniversalityFailure(
                eta=eta, factorizations=factorizations,
                reason=f"closed-form lift rejected: {e}",
            )
        if len(factorizations) != 1:
            return UniversalityFailure(
                eta=eta, factorizations=factorizations, expected=expected,
                reason=f"{len(factorizations)} K-homomorphisms factor η",
            )
        if factorizations[0] != expected:
            return UniversalityFailure(
                eta=eta, factorizations=factorizations, expected=expected,
                reason="the unique factorization differs from the closed-form lift",
            )
    logger.info(f"Universal property holds for {checked} homomorphisms")
    return None


def check_universal_property(
    S: SpecSemilattice,
    ext: ExtensionResult,
    T: Structure,
    budget: int = Config.ENUMERATION_BUDGET,
) -> bool:
    return find_universality_failure(S, ext, T, budget=budget) is None
