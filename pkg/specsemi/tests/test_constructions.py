import pytest

from services.constructions import (
    adjoin_zero,
    chain,
    check_congruence,
    closure_space_closure,
    counterexample_t,
    diamond,
    diamond_hom,
    example_names,
    from_closure_space,
    from_semilattice_hom,
    is_topological,
    mod_ideal,
    named_example,
    nonadditive_space,
    product,
    quotient,
    quotient_projection,
    random_corpus,
    random_structure,
    restrict,
    strip_zero,
    truncated_naturals,
)
from services.core import SpecSemilattice, induced_order, is_additive, to_closure_semilattice, validate
from services.errors import BudgetExceededError, PreconditionError, StructuralError
from services.morphisms import is_homomorphism, kernel_partition, Morphism


def test_discrete_space_is_inclusion():
    S = from_closure_space(2, [0, 1, 2, 3])
    assert S.sq == induced_order(S)
    assert S.zero == 0
    assert S.labels == ("{}", "{p}", "{q}", "{p,q}")
    assert is_additive(S)


def test_indiscrete_space():
    S = from_closure_space(2, [0, 3])
    for x in range(4):
        for y in range(1, 4):
            assert S.sq[x][y]
    assert not S.sq[1][0]


def test_nonadditive_space():
    S = nonadditive_space()
    assert S.n == 8
    assert not is_topological(3, [0, 1, 2, 4, 7])
    assert closure_space_closure(3, [0, 1, 2, 4, 7], 0b011) == 0b111
    assert not is_additive(S)


def test_space_without_closed_empty_set_has_no_zero():
    S = from_closure_space(2, [1, 3])
    assert S.zero is None
    assert validate(S).passed


@pytest.mark.parametrize("closed", [[0, 1, 2], [0, 1, 2, 3, 5]])
def test_bad_closed_families(closed):
    with pytest.raises((PreconditionError, StructuralError)):
        from_closure_space(2, closed)


def test_not_intersection_closed():
    with pytest.raises(PreconditionError) as info:
        from_closure_space(3, [0, 3, 6, 7])
    assert info.value.witness == (3, 6)


def test_ground_size_guard():
    with pytest.raises(BudgetExceededError):
        from_closure_space(7, [127])


def test_semilattice_hom_identity_gives_order():
    S = from_semilattice_hom(diamond().join, diamond(), [0, 1, 2, 3])
    assert S.sq == induced_order(S)
    assert S.zero == 0


def test_diamond_collapse():
    S = diamond_hom()
    assert S.sq[1][2] and S.sq[2][1] and S.sq[3][1]
    assert not S.sq[1][0]
    assert S.zero == 0


def test_constant_hom_loses_zero():
    S = from_semilattice_hom(diamond().join, chain(2), [0, 0, 0, 0])
    assert S.zero is None
    assert all(all(row) for row in S.sq)


def test_non_hom_rejected():
    with pytest.raises(PreconditionError):
        from_semilattice_hom(diamond().join, chain(2), [0, 1, 0, 0])


def test_ideal_examples():
    assert mod_ideal(2, [0]) == from_closure_space(2, [0, 1, 2, 3])
    total = mod_ideal(2, [0, 1, 2, 3])
    assert all(all(row) for row in total.sq)
    assert total.zero is None
    S = mod_ideal(3, [0, 1])
    for x in range(8):
        for y in range(8):
            assert S.sq[x][y] == ((x & ~y) in (0, 1))


@pytest.mark.parametrize("ideal", [[1], [0, 3], [0, 1, 2]])
def test_not_an_ideal(ideal):
    with pytest.raises(PreconditionError):
        mod_ideal(2, ideal)


def test_adjoin_to_single_point():
    point = SpecSemilattice(n=1, join=((0,),), sq=((True,),))
    S = adjoin_zero(point)
    assert S.zero == 1
    assert S.n == 2
    assert validate(S).passed
    assert strip_zero(S) == point


def test_strip_needs_zero():
    with pytest.raises(PreconditionError):
        strip_zero(SpecSemilattice(n=1, join=((0,),), sq=((True,),)))


def test_adjoin_strip_on_truncation():
    S = strip_zero(truncated_naturals(3))
    assert S.zero is None
    assert strip_zero(adjoin_zero(S)) == S


def test_restrict_requires_join_closed_subset():
    with pytest.raises(PreconditionError):
        restrict(diamond(), [1, 2])


PASSING_QUOTIENTS = [
    (chain(2), [[0], [1]]),
    (chain(2), [[0, 1]]),
    (diamond(), [[0], [1, 2, 3]]),
    (diamond(), [[0, 1], [2, 3]]),
    (diamond(), [[0, 2], [1, 3]]),
    (chain(3), [[0], [1, 2]]),
    (chain(3), [[0, 1], [2]]),
    (truncated_naturals(3), [[0], [1, 2, 3]]),
    (truncated_naturals(3), [[0, 1], [2, 3]]),
    (counterexample_t(), [[0], [1, 2]]),
    (diamond_hom(), [[0], [1, 2, 3]]),
    (product(chain(2), chain(3)), [[0, 1, 2], [3, 4, 5]]),
]


@pytest.mark.parametrize("S,classes", PASSING_QUOTIENTS)
def test_quotient_projection_is_homomorphism(S, classes):
    Q = quotient(S, classes)
    assert validate(Q).passed
    assert Q.n == len(classes)
    pi = quotient_projection(S, classes)
    assert is_homomorphism(pi)


def test_diamond_quotient_is_chain():
    Q = quotient(diamond(), [[0], [1, 2, 3]])
    assert Q.join == chain(2).join
    assert Q.sq == chain(2).sq
    assert Q.zero == 0
    assert Q.labels == ("{0}", "{x,y,1}")


def test_singleton_classes_keep_structure():
    S = truncated_naturals(3)
    Q = quotient(S, [[a] for a in range(S.n)])
    assert Q.join == S.join and Q.sq == S.sq


def test_one_class():
    assert quotient(diamond(), [[0, 1, 2, 3]]).n == 1


def _chain_with_two_drops(length: int) -> SpecSemilattice:
    """{0..length-1} with 2 ⊑ 1 and length-1 ⊑ length-2 added to the order."""
    idx = range(length)
    return SpecSemilattice(
        n=length,
        join=tuple(tuple(max(a, b) for b in idx) for a in idx),
        sq=tuple(
            tuple(a <= b or (a == 2 and b >= 1) or (a == length - 1 and b >= length - 2) for b in idx)
            for a in idx
        ),
        zero=0,
    )


@pytest.mark.parametrize("length", [5, 6, 7])
def test_interpolation_failure(length):
    S = _chain_with_two_drops(length)
    classes = [[0], [1], list(range(2, length - 1)), [length - 1]]
    with pytest.raises(PreconditionError) as info:
        quotient(S, classes)
    assert info.value.witness == (length - 1, length - 2, 2, 1)


def test_join_congruence_failure():
    with pytest.raises(PreconditionError) as info:
        check_congruence(chain(3), [[0, 2], [1]])
    assert info.value.witness == (0, 2, 1)


def test_partition_must_cover():
    with pytest.raises(StructuralError):
        quotient(chain(3), [[0], [1]])


def test_kernel_partition_feeds_quotient():
    f = Morphism(source=diamond(), target=chain(2), map=(0, 1, 1, 1))
    classes = kernel_partition(f)
    assert classes == [[0], [1, 2, 3]]
    assert quotient(diamond(), classes).n == 2


def test_products():
    S = truncated_naturals(3)
    assert product(S, chain(1)).join == S.join
    square = product(chain(2), chain(2))
    assert square.join == diamond().join
    assert square.sq == diamond().sq
    assert validate(product(truncated_naturals(2), counterexample_t())).passed


def test_named_examples():
    assert set(example_names()) >= {"chain2", "diamond", "truncated_naturals", "counterexample_t"}
    assert named_example("truncated_naturals").n == 4
    assert named_example("truncated_naturals", size=5).n == 6
    assert to_closure_semilattice(named_example("counterexample_t")).K == (0, 2, 2)
    with pytest.raises(StructuralError):
        named_example("pentagon")
    with pytest.raises(StructuralError):
        named_example("diamond", size=3)


def test_random_structure_is_seed_stable():
    assert random_structure(42) == random_structure(42)


def test_random_sizes_cover_range():
    sizes = {S.n for S in random_corpus(200, max_size=8)}
    assert sizes == set(range(1, 9))


def test_random_size_guard():
    with pytest.raises(PreconditionError):
        random_structure(0, max_size=13)
