"""
Builders for the standard examples and auxiliary constructions, plus the
seeded generator for the random test corpus.

Subsets of a ground set are bitmask integers; a powerset carrier lists its
subsets by numeric bitmask value, so index == mask.
"""

import logging
from functools import reduce
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from config import Config
from services.axiom_validator import check_tables
from services.core import ClosureSemilattice, SpecSemilattice, Structure, Table, axiom_validator
from services.errors import BudgetExceededError, PreconditionError, StructuralError
from services.morphisms import Morphism
from services.partition import partition_index

logger = logging.getLogger(__name__)


def _relation(rows) -> Tuple[Tuple[bool, ...], ...]:
    return tuple(tuple(bool(x) for x in row) for row in rows)


def _table(rows) -> Table:
    return tuple(tuple(int(x) for x in row) for row in rows)


def subset_label(mask: int, ground_size: int) -> str:
    names = [Config.GROUND_LABELS[i] for i in range(ground_size) if mask >> i & 1]
    return "{" + ",".join(names) + "}"


def _check_ground(ground_size: int, family: Sequence[int], what: str) -> Set[int]:
    if not 0 <= ground_size <= Config.MAX_GROUND_SIZE:
        raise BudgetExceededError(
            f"Ground size {ground_size} is outside 0..{Config.MAX_GROUND_SIZE}"
        )
    full = (1 << ground_size) - 1
    for mask in family:
        if not 0 <= mask <= full:
            raise StructuralError(f"{what} member {mask} is not a subset of a {ground_size}-element ground set")
    return set(family)


def _powerset_join(ground_size: int) -> Table:
    size = 1 << ground_size
    return tuple(tuple(x | y for y in range(size)) for x in range(size))


# Closure spaces

def closure_space_closure(ground_size: int, closed_sets: Sequence[int], x: int) -> int:
    """Smallest closed superset of x (the ground set is always closed)."""
    full = (1 << ground_size) - 1
    return reduce(lambda acc, c: acc & c, (c for c in closed_sets if x & ~c == 0), full)


def is_topological(ground_size: int, closed_sets: Sequence[int]) -> bool:
    """Closed sets also closed under binary union, with ∅ closed."""
    family = set(closed_sets)
    return 0 in family and all(x | y in family for x in family for y in family)


def from_closure_space(ground_size: int, closed_sets: Sequence[int]) -> SpecSemilattice:
    """
    Powerset of the ground set with union as join and x ⊑ y iff x ⊆ Ky.
    ∅ is the zero only when it is closed.
    """
    family = _check_ground(ground_size, closed_sets, "Closed set")
    full = (1 << ground_size) - 1
    if full not in family:
        raise PreconditionError("Closed sets must include the ground set", (full,))
    for x in sorted(family):
        for y in sorted(family):
            if x & y not in family:
                raise PreconditionError(f"Closed sets not closed under intersection: {x} & {y}", (x, y))

    size = 1 << ground_size
    K = [closure_space_closure(ground_size, sorted(family), x) for x in range(size)]
    sq = [[x & ~K[y] == 0 for y in range(size)] for x in range(size)]
    logger.info(f"Built closure space on {ground_size} points with {len(family)} closed sets")
    return SpecSemilattice(
        n=size,
        join=_powerset_join(ground_size),
        sq=_relation(sq),
        zero=0 if 0 in family else None,
        labels=tuple(subset_label(x, ground_size) for x in range(size)),
    )


# Hom-induced structures

def _join_table_of(T: Union[Structure, Sequence[Sequence[int]]]) -> Table:
    if isinstance(T, (SpecSemilattice, ClosureSemilattice)):
        return T.join
    return _table(T)


def _check_semilattice(join: Table) -> None:
    n = len(join)
    check_tables(n, join)
    # with ⊑ taken as the join order only the join laws can fail
    leq = [[join[a][b] == b for b in range(n)] for a in range(n)]
    report = axiom_validator.validate_spec(n, join, leq)
    if not report.passed:
        first = report.violations[0]
        raise StructuralError(f"Not a semilattice: {first.axiom} fails at {first.witness}")


def from_semilattice_hom(
    S_join: Sequence[Sequence[int]],
    T: Union[Structure, Sequence[Sequence[int]]],
    phi: Sequence[int],
    labels: Optional[Sequence[str]] = None,
) -> SpecSemilattice:
    """a ⊑ b iff φ(a) <= φ(b) in T, for a join homomorphism φ."""
    join = _table(S_join)
    T_join = _join_table_of(T)
    _check_semilattice(join)
    _check_semilattice(T_join)
    n = len(join)
    if len(phi) != n or any(not 0 <= v < len(T_join) for v in phi):
        raise StructuralError(f"φ must send each of the {n} elements into the target")
    for a in range(n):
        for b in range(n):
            if phi[join[a][b]] != T_join[phi[a]][phi[b]]:
                raise PreconditionError(f"φ is not a join homomorphism at ({a},{b})", (a, b))

    sq = [[T_join[phi[a]][phi[b]] == phi[b] for b in range(n)] for a in range(n)]
    zero = None
    neutral = [z for z in range(n) if all(join[z][a] == a for a in range(n))]
    if neutral:
        z = neutral[0]
        if all(phi[x] != phi[z] for x in range(n) if x != z):
            zero = z
        else:
            logger.info("φ identifies another element with the neutral element; no zero")
    return SpecSemilattice(
        n=n,
        join=join,
        sq=_relation(sq),
        zero=zero,
        labels=tuple(labels) if labels else None,
    )


def mod_ideal(ground_size: int, ideal: Sequence[int]) -> SpecSemilattice:
    """Powerset with x ⊑ y iff x ∖ y belongs to the ideal."""
    family = _check_ground(ground_size, ideal, "Ideal")
    if 0 not in family:
        raise PreconditionError("An ideal must contain the empty set", (0,))
    for x in sorted(family):
        sub = x
        while sub:
            sub = (sub - 1) & x
            if sub not in family:
                raise PreconditionError(f"Ideal is not downward closed: {sub} ⊆ {x}", (sub, x))
        for y in sorted(family):
            if x | y not in family:
                raise PreconditionError(f"Ideal is not closed under union: {x} | {y}", (x, y))

    size = 1 << ground_size
    sq = [[(x & ~y) in family for y in range(size)] for x in range(size)]
    return SpecSemilattice(
        n=size,
        join=_powerset_join(ground_size),
        sq=_relation(sq),
        zero=0 if family == {0} else None,
        labels=tuple(subset_label(x, ground_size) for x in range(size)),
    )


# Zero handling and restriction

def restrict(S: Structure, keep: Sequence[int]) -> Structure:
    """The substructure on ``keep`` (which must be join-closed), reindexed in the given order."""
    position = {a: i for i, a in enumerate(keep)}
    try:
        join = tuple(tuple(position[S.join[a][b]] for b in keep) for a in keep)
    except KeyError as e:
        raise PreconditionError(f"Kept elements are not closed under join: {e.args[0]} escapes") from e
    zero = position.get(S.zero) if S.zero is not None else None
    labels = tuple(S.labels[a] for a in keep) if S.labels else None
    if isinstance(S, ClosureSemilattice):
        if any(S.K[a] not in position for a in keep):
            raise PreconditionError("Kept elements are not closed under K")
        K = tuple(position[S.K[a]] for a in keep)
        return ClosureSemilattice(n=len(keep), join=join, K=K, zero=zero, labels=labels)
    sq = tuple(tuple(S.sq[a][b] for b in keep) for a in keep)
    return SpecSemilattice(n=len(keep), join=join, sq=sq, zero=zero, labels=labels)


def adjoin_zero(S: SpecSemilattice) -> SpecSemilattice:
    """Adds a fresh bottom at index n with 0 ⊑ a for all a and a ⋢ 0 for a ≠ 0."""
    n = S.n
    join = [list(row) + [a] for a, row in enumerate(S.join)]
    join.append(list(range(n)) + [n])
    sq = [list(row) + [False] for row in S.sq]
    sq.append([True] * (n + 1))
    labels = None
    if S.labels:
        labels = tuple(S.labels) + ("0" if "0" not in S.labels else "zero",)
    return SpecSemilattice(n=n + 1, join=_table(join), sq=_relation(sq), zero=n, labels=labels)


def strip_zero(S: SpecSemilattice) -> SpecSemilattice:
    if S.zero is None:
        raise PreconditionError("Structure has no zero to strip")
    if S.n == 1:
        raise PreconditionError("Stripping the zero of a one-element structure leaves nothing")
    return restrict(S, [a for a in range(S.n) if a != S.zero])


# Quotients

def _normalize_partition(classes: Sequence[Sequence[int]], n: int) -> List[List[int]]:
    blocks = [sorted(block) for block in classes if len(block)]
    seen = [x for block in blocks for x in block]
    if sorted(seen) != list(range(n)):
        raise StructuralError(f"Classes must cover 0..{n - 1} exactly once")
    return sorted(blocks)


def check_congruence(S: SpecSemilattice, classes: Sequence[Sequence[int]]) -> None:
    """
    Raises PreconditionError unless the partition is a join congruence and
    a ⊑ b ∼ b1 ⊑ c always yields a1 ∼ a, c1 ∼ c with a1 ⊑ c1.
    """
    blocks = _normalize_partition(classes, S.n)
    cls = np.asarray(partition_index(blocks, S.n))
    J = np.asarray(S.join, dtype=np.intp)
    Q = np.asarray(S.sq, dtype=bool)
    same = cls[:, None] == cls[None, :]

    CJ = cls[J]
    hits = np.argwhere(same[:, :, None] & (CJ[:, None, :] != CJ[None, :, :]))
    if len(hits):
        a, b, c = (int(x) for x in hits[0])
        raise PreconditionError(f"Not a join congruence: {a} ∼ {b} but {a}∨{c} ≁ {b}∨{c}", (a, b, c))

    R = _class_relation(Q, cls, len(blocks))
    reachable = (Q.astype(int) @ same.astype(int) @ Q.astype(int)) > 0
    bad = reachable & ~R[cls[:, None], cls[None, :]]
    if bad.any():
        raise PreconditionError(
            "Specialization does not pass through the classes", _interpolation_witness(S, cls, R)
        )


def _class_relation(Q: np.ndarray, cls: np.ndarray, m: int) -> np.ndarray:
    R = np.zeros((m, m), dtype=bool)
    for a, c in np.argwhere(Q):
        R[cls[a], cls[c]] = True
    return R


def _interpolation_witness(S: SpecSemilattice, cls: np.ndarray, R: np.ndarray) -> Tuple[int, ...]:
    n = S.n
    for a in range(n):
        for b in range(n):
            if not S.sq[a][b]:
                continue
            for b1 in range(n):
                if cls[b1] != cls[b]:
                    continue
                for c in range(n):
                    if S.sq[b1][c] and not R[cls[a], cls[c]]:
                        return (a, b, b1, c)
    raise AssertionError("no interpolation witness found")


def quotient(S: SpecSemilattice, classes: Sequence[Sequence[int]]) -> SpecSemilattice:
    """
    S/∼ with [a] ⊑ [b] iff a1 ⊑ b1 for some a1 ∼ a, b1 ∼ b.
    The class of the zero stays the zero when (S0) survives.
    """
    check_congruence(S, classes)
    blocks = _normalize_partition(classes, S.n)
    m = len(blocks)
    cls = np.asarray(partition_index(blocks, S.n))
    R = _class_relation(np.asarray(S.sq, dtype=bool), cls, m)
    reps = [block[0] for block in blocks]
    join = [[int(cls[S.join[reps[i]][reps[j]]]) for j in range(m)] for i in range(m)]

    zero = None
    if S.zero is not None:
        z = int(cls[S.zero])
        if all(not R[i, z] for i in range(m) if i != z):
            zero = z
    labels = tuple("{" + ",".join(S.label(a) for a in block) + "}" for block in blocks)
    logger.info(f"Quotient of size {S.n} by {m} classes")
    return SpecSemilattice(n=m, join=_table(join), sq=_relation(R), zero=zero, labels=labels)


def quotient_projection(S: SpecSemilattice, classes: Sequence[Sequence[int]]) -> Morphism:
    Q = quotient(S, classes)
    blocks = _normalize_partition(classes, S.n)
    return Morphism(source=S, target=Q, map=tuple(partition_index(blocks, S.n)), role="homomorphism")


# Products

def product(S: SpecSemilattice, T: SpecSemilattice) -> SpecSemilattice:
    """Componentwise join and ⊑ on S×T; the pair (s, t) has index s*|T| + t."""
    pairs = [(s, t) for s in range(S.n) for t in range(T.n)]
    index = {p: i for i, p in enumerate(pairs)}
    join = [[index[(S.join[s][u], T.join[t][v])] for (u, v) in pairs] for (s, t) in pairs]
    sq = [[S.sq[s][u] and T.sq[t][v] for (u, v) in pairs] for (s, t) in pairs]
    zero = None
    if S.zero is not None and T.zero is not None:
        zero = index[(S.zero, T.zero)]
    labels = tuple(f"({S.label(s)},{T.label(t)})" for (s, t) in pairs)
    return SpecSemilattice(n=len(pairs), join=_table(join), sq=_relation(sq), zero=zero, labels=labels)


# Named examples

def chain(length: int) -> SpecSemilattice:
    """{0..length-1} with max as join and ⊑ equal to <=."""
    idx = range(length)
    return SpecSemilattice(
        n=length,
        join=_table([[max(a, b) for b in idx] for a in idx]),
        sq=_relation([[a <= b for b in idx] for a in idx]),
        zero=0,
        labels=tuple(str(a) for a in idx),
    )


DIAMOND_JOIN = ((0, 1, 2, 3), (1, 1, 3, 3), (2, 3, 2, 3), (3, 3, 3, 3))


def diamond() -> SpecSemilattice:
    """{0, x, y, 1} with x, y incomparable and ⊑ equal to <=."""
    return SpecSemilattice(
        n=4,
        join=DIAMOND_JOIN,
        sq=_relation([[DIAMOND_JOIN[a][b] == b for b in range(4)] for a in range(4)]),
        zero=0,
        labels=("0", "x", "y", "1"),
    )


def diamond_hom() -> SpecSemilattice:
    """The diamond with ⊑ induced by collapsing x, y, 1 onto the top of the 2-chain."""
    return from_semilattice_hom(DIAMOND_JOIN, chain(2), [0, 1, 1, 1], labels=("0", "x", "y", "1"))


def truncated_naturals(top: int = Config.DEFAULT_TRUNCATION) -> SpecSemilattice:
    """{0..top} with max as join and a ⊑ b iff a = 0 or b > 0."""
    idx = range(top + 1)
    return SpecSemilattice(
        n=top + 1,
        join=_table([[max(a, b) for b in idx] for a in idx]),
        sq=_relation([[a == 0 or b > 0 for b in idx] for a in idx]),
        zero=0,
        labels=tuple(str(a) for a in idx),
    )


def counterexample_t() -> SpecSemilattice:
    """The chain {0,1,2} with the extra specialization 2 ⊑ 1."""
    idx = range(3)
    return SpecSemilattice(
        n=3,
        join=_table([[max(a, b) for b in idx] for a in idx]),
        sq=_relation([[a <= b or (a, b) == (2, 1) for b in idx] for a in idx]),
        zero=0,
        labels=("0", "1", "2"),
    )


def nonadditive_space() -> SpecSemilattice:
    """Subsets of {p,q,r} whose closed sets are ∅, the singletons and the whole set."""
    return from_closure_space(3, [0b000, 0b001, 0b010, 0b100, 0b111])


NAMED_EXAMPLES: Dict[str, Callable[..., SpecSemilattice]] = {
    "singleton": lambda: chain(1),
    "chain2": lambda: chain(2),
    "chain3": lambda: chain(3),
    "diamond": diamond,
    "diamond_hom": diamond_hom,
    "truncated_naturals": truncated_naturals,
    "counterexample_t": counterexample_t,
    "nonadditive_space": nonadditive_space,
}


def example_names() -> List[str]:
    return sorted(NAMED_EXAMPLES)


def named_example(name: str, size: Optional[int] = None) -> SpecSemilattice:
    """Builds a named example; ``size`` is the top of truncated_naturals."""
    if name not in NAMED_EXAMPLES:
        raise StructuralError(f"Unknown example '{name}'. Known: {', '.join(example_names())}")
    if size is not None:
        if name != "truncated_naturals":
            raise StructuralError(f"Example '{name}' takes no size")
        return truncated_naturals(size)
    return NAMED_EXAMPLES[name]()


# Random corpus

def _union_closed_family(rng: np.random.Generator, size: int) -> Tuple[List[int], int]:
    """A union-closed family of exactly ``size`` masks containing 0, and the number of bits used."""
    family = {0}
    for _ in range(4 * size):
        if len(family) == size:
            break
        x = int(rng.integers(1, 1 << size))
        grown = family | {x | f for f in family}
        if len(grown) <= size:
            family = grown
    fresh = size
    while len(family) < size:
        # a new top: above every member, so exactly one element is added
        family.add(reduce(lambda acc, f: acc | f, family) | 1 << fresh)
        fresh += 1
    return sorted(family), fresh


def random_structure(seed: int, max_size: int = Config.DEFAULT_RANDOM_SIZE) -> SpecSemilattice:
    """
    A random union-closed family of sets with ⊑ induced by a random join
    homomorphism into a small powerset; valid by construction, ∅ is the zero.
    """
    if not 1 <= max_size <= Config.MAX_RANDOM_SIZE:
        raise PreconditionError(f"max_size must be in 1..{Config.MAX_RANDOM_SIZE}, got {max_size}")
    rng = np.random.default_rng(seed)
    size = int(rng.integers(1, max_size + 1))
    members, bits = _union_closed_family(rng, size)
    target_bits = int(rng.integers(1, 4))
    images = [int(rng.integers(1, 1 << target_bits)) for _ in range(bits)]

    def phi(x: int) -> int:
        return reduce(lambda acc, i: acc | images[i], (i for i in range(bits) if x >> i & 1), 0)

    index = {x: i for i, x in enumerate(members)}
    join = [[index[x | y] for y in members] for x in members]
    sq = [[phi(x) & ~phi(y) == 0 for y in members] for x in members]
    logger.debug(f"random_structure(seed={seed}) has {size} elements")
    return SpecSemilattice(n=size, join=_table(join), sq=_relation(sq), zero=0)


def random_corpus(count: int, max_size: int = Config.DEFAULT_RANDOM_SIZE, seed: int = Config.DEFAULT_SEED) -> List[SpecSemilattice]:
    return [random_structure(seed + i, max_size) for i in range(count)]
