"""
Maps between finite structures: the Morphism type, the homomorphism,
embedding and K-homomorphism predicates, and exhaustive enumerators that
serve as the oracle for uniqueness claims.
"""

import logging
from math import prod
from typing import Callable, Dict, Iterator, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from config import Config
from services.core import Structure, as_spec, closure_table
from services.errors import BudgetExceededError, InvariantViolation, PreconditionError

logger = logging.getLogger(__name__)

Role = Literal["homomorphism", "embedding", "k_homomorphism"]


class Morphism(BaseModel):
    """A total map between carriers; a role, when set, is checked on construction."""

    model_config = ConfigDict(frozen=True)

    source: Structure
    target: Structure
    map: Tuple[int, ...]
    role: Optional[Role] = None
    zero_preserving: bool = False

    @model_validator(mode="after")
    def check_map(self) -> "Morphism":
        if len(self.map) != self.source.n:
            raise ValueError(f"Map has {len(self.map)} entries for a source of size {self.source.n}")
        for a, value in enumerate(self.map):
            if not 0 <= value < self.target.n:
                raise ValueError(f"Map sends {a} to {value}, outside the target")
        if self.role is not None and not satisfies_role(self, self.role):
            raise ValueError(f"Map {list(self.map)} is not a {self.role.replace('_', '-')}")
        return self

    def __call__(self, a: int) -> int:
        return self.map[a]


def satisfies_role(f: Morphism, role: Role) -> bool:
    checks = {
        "homomorphism": is_homomorphism,
        "embedding": is_embedding,
        "k_homomorphism": is_K_homomorphism,
    }
    return checks[role](f, zero_preserving=f.zero_preserving)


def _preserves_join(f: Morphism) -> bool:
    S, T, m = f.source, f.target, f.map
    return all(
        m[S.join[a][b]] == T.join[m[a]][m[b]]
        for a in range(S.n)
        for b in range(a, S.n)
    )


def _preserves_zero(f: Morphism) -> bool:
    S, T = f.source, f.target
    if S.zero is None or T.zero is None:
        return True
    return f.map[S.zero] == T.zero


def is_homomorphism(f: Morphism, zero_preserving: bool = False) -> bool:
    """f(a∨b) = f(a)∨f(b) and a ⊑ b implies f(a) ⊑ f(b)."""
    if not _preserves_join(f):
        return False
    if zero_preserving and not _preserves_zero(f):
        return False
    S, T, m = as_spec(f.source), as_spec(f.target), f.map
    return all(
        T.sq[m[a]][m[b]]
        for a in range(S.n)
        for b in range(S.n)
        if S.sq[a][b]
    )


def is_embedding(f: Morphism, zero_preserving: bool = False) -> bool:
    """An injective homomorphism that also reflects ⊑."""
    if not is_homomorphism(f, zero_preserving=zero_preserving):
        return False
    if len(set(f.map)) != len(f.map):
        return False
    S, T, m = as_spec(f.source), as_spec(f.target), f.map
    return all(
        S.sq[a][b]
        for a in range(S.n)
        for b in range(S.n)
        if T.sq[m[a]][m[b]]
    )


def is_K_homomorphism(f: Morphism, zero_preserving: bool = False) -> bool:
    """A join homomorphism with f(Ka) = K f(a); both ends must be principal."""
    KS, KT = closure_table(f.source), closure_table(f.target)
    if not _preserves_join(f):
        return False
    if zero_preserving and not _preserves_zero(f):
        return False
    if any(f.map[KS[a]] != KT[f.map[a]] for a in range(f.source.n)):
        return False
    # commuting with K already forces ⊑ to be preserved
    if not is_homomorphism(f):
        raise InvariantViolation(f"Join map {list(f.map)} commutes with K but does not preserve ⊑")
    return True


def identity(S: Structure) -> Morphism:
    return Morphism(source=S, target=S, map=tuple(range(S.n)))


def compose(f: Morphism, g: Morphism) -> Morphism:
    """Apply f, then g."""
    if as_spec(f.target) != as_spec(g.source):
        raise PreconditionError("Cannot compose: target of the first map is not the source of the second")
    return Morphism(source=f.source, target=g.target, map=tuple(g.map[x] for x in f.map))


def kernel_partition(f: Morphism) -> List[List[int]]:
    """Blocks of elements with equal image, ordered by least member."""
    blocks: Dict[int, List[int]] = {}
    for a, value in enumerate(f.map):
        blocks.setdefault(value, []).append(a)
    return sorted(blocks.values())


Check = Callable[[List[int]], bool]


def _constraints(
    S: Structure,
    T: Structure,
    k_only: bool,
) -> List[List[Check]]:
    """Per element i, the checks that become decidable once f[0..i] is assigned."""
    n = S.n
    checks: List[List[Check]] = [[] for _ in range(n)]
    Sspec, Tspec = as_spec(S), as_spec(T)
    TJ, TQ = T.join, Tspec.sq

    for a in range(n):
        for b in range(a, n):
            c = S.join[a][b]
            checks[max(a, b, c)].append(lambda f, a=a, b=b, c=c: f[c] == TJ[f[a]][f[b]])
    for a in range(n):
        for b in range(n):
            if Sspec.sq[a][b]:
                checks[max(a, b)].append(lambda f, a=a, b=b: TQ[f[a]][f[b]])
    if k_only:
        KS, KT = closure_table(S), closure_table(T)
        for a in range(n):
            checks[max(a, KS[a])].append(lambda f, a=a, k=KS[a]: f[k] == KT[f[a]])
    return checks


def search_maps(
    S: Structure,
    T: Structure,
    zero_preserving: bool = False,
    k_only: bool = False,
    fixed: Optional[Dict[int, int]] = None,
    budget: int = Config.ENUMERATION_BUDGET,
) -> Iterator[Tuple[int, ...]]:
    """
    Lexicographic backtracking over all maps S -> T, yielding those that are
    homomorphisms (K-homomorphisms when k_only). ``fixed`` pins chosen values.
    """
    n = S.n
    domains: List[Sequence[int]] = [range(T.n)] * n
    if zero_preserving and S.zero is not None and T.zero is not None:
        domains[S.zero] = (T.zero,)
    for a, value in (fixed or {}).items():
        if value not in domains[a]:
            return
        domains[a] = (value,)

    candidates = prod(len(d) for d in domains)
    if candidates > budget:
        raise BudgetExceededError(f"{candidates} candidate maps exceed the budget of {budget}")

    checks = _constraints(S, T, k_only)
    f = [0] * n

    def extend(i: int) -> Iterator[Tuple[int, ...]]:
        if i == n:
            yield tuple(f)
            return
        for value in domains[i]:
            f[i] = value
            if all(check(f) for check in checks[i]):
                yield from extend(i + 1)

    yield from extend(0)


def enumerate_homomorphisms(
    S: Structure,
    T: Structure,
    zero_preserving: bool = False,
    fixed: Optional[Dict[int, int]] = None,
    budget: int = Config.ENUMERATION_BUDGET,
) -> List[Morphism]:
    maps = list(search_maps(S, T, zero_preserving=zero_preserving, fixed=fixed, budget=budget))
    logger.info(f"Enumerated {len(maps)} homomorphisms from size {S.n} to size {T.n}")
    return [
        Morphism(source=S, target=T, map=m, role="homomorphism", zero_preserving=zero_preserving)
        for m in maps
    ]


def enumerate_K_homomorphisms(
    S: Structure,
    T: Structure,
    zero_preserving: bool = False,
    fixed: Optional[Dict[int, int]] = None,
    budget: int = Config.ENUMERATION_BUDGET,
) -> List[Morphism]:
    maps = list(search_maps(S, T, zero_preserving=zero_preserving, k_only=True, fixed=fixed, budget=budget))
    logger.info(f"Enumerated {len(maps)} K-homomorphisms from size {S.n} to size {T.n}")
    return [
        Morphism(source=S, target=T, map=m, role="k_homomorphism", zero_preserving=zero_preserving)
        for m in maps
    ]
