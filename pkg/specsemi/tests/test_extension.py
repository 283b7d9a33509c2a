import numpy as np
import pytest

from services.constructions import (
    adjoin_zero,
    chain,
    diamond,
    nonadditive_space,
    restrict,
    strip_zero,
    truncated_naturals,
)
from services.core import closure_of, to_closure_semilattice
from services.errors import AxiomError, BudgetExceededError, PreconditionError, StructuralError
from services.extension import (
    build_extension,
    check_sim_laws,
    check_universal_property,
    find_universality_failure,
    lift_functorial,
    lift_homomorphism,
    sim_matrix,
    sim_related,
    sim_witness,
)
from services.morphisms import Morphism, enumerate_K_homomorphisms

from conftest import raw_spec


def test_sim_examples(chain2):
    assert sim_related(chain2, (1, 1), (0, 1))
    assert not sim_related(chain2, (1, 0), (0, 0))
    assert sim_witness(chain2, (1, 1), (0, 1)) == (0, 1)
    for a in range(2):
        for b in range(2):
            assert sim_related(chain2, (a, b), (a, b))


def test_sim_needs_zero():
    S = strip_zero(truncated_naturals(3))
    with pytest.raises(PreconditionError):
        sim_related(S, (0, 0), (0, 0))


def test_sim_rejects_bad_pairs(chain2):
    with pytest.raises(StructuralError):
        sim_related(chain2, (0, 2), (0, 0))


def test_matrix_matches_pairwise(n3):
    M = sim_matrix(n3)
    n = n3.n
    for p in range(n * n):
        for q in range(n * n):
            assert M[p, q] == sim_related(n3, divmod(p, n), divmod(q, n))


def test_sim_laws_hold(n3):
    assert check_sim_laws(n3).passed
    assert check_sim_laws(diamond()).passed


def test_sim_laws_report_a_broken_matrix(chain2):
    M = sim_matrix(chain2).copy()
    M[0, 1] = True
    report = check_sim_laws(chain2, M)
    assert "sim-symmetric" in report.failed_axioms()
    assert report.witness_for("sim-symmetric") == (0, 0, 0, 1)


def test_singleton_extension():
    ext = build_extension(chain(1))
    assert ext.tilde.n == 1
    assert ext.tilde.K == (0,)


def test_chain_extension(chain2):
    ext = build_extension(chain2)
    assert ext.tilde.n == 3
    assert ext.representatives == ((0, 0), (0, 1), (1, 0))
    assert ext.upsilon == (0, 2)
    assert ext.tilde.K == (0, 1, 1)
    assert ext.class_of == ((0, 1), (2, 1))
    # a 3-chain: 0 < υ(1) < Kυ(1)
    assert ext.tilde.join[2][1] == 1
    assert ext.tilde.labels == ("[0,0]", "[0,1]", "[1,0]")


def test_truncation_has_one_point_at_infinity(n3):
    ext = build_extension(n3)
    assert ext.tilde.n == 5
    assert ext.upsilon == (0, 2, 3, 4)
    outside = set(range(ext.tilde.n)) - set(ext.upsilon)
    assert outside == {1}
    for a in range(1, n3.n):
        assert ext.tilde.K[ext.upsilon[a]] == 1


@pytest.mark.parametrize("top", [1, 2, 4])
def test_truncation_sizes(top):
    assert build_extension(truncated_naturals(top)).tilde.n == top + 2


def test_extension_invariants(n3):
    ext = build_extension(n3)
    z = n3.zero
    for a in range(n3.n):
        assert ext.upsilon[a] == ext.class_of[a][z]
        for b in range(n3.n):
            assert ext.tilde.K[ext.class_of[a][b]] == ext.class_of[z][n3.join[a][b]]
            assert ext.class_of[z][n3.join[a][b]] == ext.class_of[a][n3.join[a][b]]
    for x, (a, b) in enumerate(ext.representatives):
        assert x == ext.tilde.join[ext.upsilon[a]][ext.tilde.K[ext.upsilon[b]]]


def test_extension_does_not_preserve_existing_closures(chain2):
    ext = build_extension(chain2)
    assert ext.tilde.K[ext.upsilon[1]] != ext.upsilon[closure_of(chain2, 1)]


def test_extend_rejects_invalid_input():
    S = raw_spec(2, [[0, 1], [1, 1]], [[1, 1], [1, 1]], zero=0)
    with pytest.raises(AxiomError):
        build_extension(S)


def test_extension_size_guard():
    with pytest.raises(BudgetExceededError):
        build_extension(chain(4), max_size=3)


def test_zero_less_pipeline():
    S = strip_zero(chain(3))
    ext = build_extension(S)
    assert ext.adjoined_zero
    assert ext.base == adjoin_zero(S)
    assert ext.tilde.zero is None
    assert ext.tilde.n == 5
    assert ext.upsilon == (2, 4)
    assert ext.tilde.K == (0, 1, 0, 1, 1)
    assert ext.class_of[2][2] is None
    full = build_extension(adjoin_zero(S))
    assert ext.tilde == restrict(full.tilde, range(full.tilde.n - 1))
    assert ext.upsilon == full.upsilon[:S.n]


def test_lift_counterexample(n3, t_closure):
    ext = build_extension(n3)
    eta = Morphism(source=n3, target=t_closure, map=(0, 1, 1, 1))
    lifted = lift_homomorphism(ext, t_closure, eta)
    assert lifted.map == (0, 2, 1, 1, 1)
    assert lifted.role == "k_homomorphism"


def test_lift_identity_into_chain(chain2):
    ext = build_extension(chain2)
    C = to_closure_semilattice(chain2)
    lifted = lift_homomorphism(ext, C, Morphism(source=chain2, target=C, map=(0, 1)))
    assert lifted.map == (0, 1, 1)


def test_lifting_upsilon_gives_identity(n3):
    ext = build_extension(n3)
    upsilon = Morphism(source=n3, target=ext.tilde, map=ext.upsilon)
    assert lift_homomorphism(ext, ext.tilde, upsilon).map == tuple(range(ext.tilde.n))


def test_lift_rejects_non_homomorphism(n3, t_closure):
    ext = build_extension(n3)
    with pytest.raises(PreconditionError):
        lift_homomorphism(ext, t_closure, Morphism(source=n3, target=t_closure, map=(0, 2, 1, 1)))


def test_lift_rejects_non_additive_target(n3):
    ext = build_extension(n3)
    T = to_closure_semilattice(nonadditive_space())
    eta = Morphism(source=n3, target=T, map=(0, 0, 0, 0))
    with pytest.raises(PreconditionError):
        lift_homomorphism(ext, T, eta)


def test_functorial_lift_into_truncation(chain2, n3):
    extS, extU = build_extension(chain2), build_extension(n3)
    psi = Morphism(source=chain2, target=n3, map=(0, 1))
    lifted = lift_functorial(extS, extU, psi)
    assert lifted.map == (0, 1, 2)
    # the top Kυ(1) of the 3-chain goes to the point at infinity
    assert lifted.map[extS.tilde.K[extS.upsilon[1]]] == 1
    fixed = {extS.upsilon[a]: extU.upsilon[psi.map[a]] for a in range(chain2.n)}
    assert [g.map for g in enumerate_K_homomorphisms(extS.tilde, extU.tilde, fixed=fixed)] == [lifted.map]


@pytest.mark.parametrize(
    "S,U,mapping",
    [
        (truncated_naturals(3), truncated_naturals(3), (0, 1, 2, 3)),
        (diamond(), chain(2), (0, 1, 1, 1)),
        (chain(1), chain(3), (0,)),
        (chain(3), truncated_naturals(2), (0, 1, 2)),
    ],
)
def test_functorial_square_commutes_and_is_unique(S, U, mapping):
    extS, extU = build_extension(S), build_extension(U)
    psi = Morphism(source=S, target=U, map=mapping)
    lifted = lift_functorial(extS, extU, psi)
    for a in range(S.n):
        assert lifted.map[extS.upsilon[a]] == extU.upsilon[mapping[a]]
    fixed = {extS.upsilon[a]: extU.upsilon[mapping[a]] for a in range(S.n)}
    assert len(enumerate_K_homomorphisms(extS.tilde, extU.tilde, fixed=fixed)) == 1


def test_functorial_identity(n3):
    ext = build_extension(n3)
    psi = Morphism(source=n3, target=n3, map=tuple(range(n3.n)))
    assert lift_functorial(ext, ext, psi).map == tuple(range(ext.tilde.n))


def test_functorial_rejects_zero_dropping_map(chain2):
    ext = build_extension(chain2)
    with pytest.raises(PreconditionError):
        lift_functorial(ext, ext, Morphism(source=chain2, target=chain2, map=(1, 1)))


def test_universal_property_on_pairs(universal_pairs):
    for S, T in universal_pairs:
        ext = build_extension(S)
        assert find_universality_failure(S, ext, T) is None
        assert check_universal_property(S, ext, T)


def test_universal_property_detects_a_corrupted_lift(n3, t_closure):
    ext = build_extension(n3)

    def corrupted(ext, T, eta):
        f = lift_homomorphism(ext, T, eta)
        # send the point at infinity where υ(1) goes, as a plain homomorphism would
        return Morphism(source=f.source, target=f.target, map=(f.map[0], f.map[2]) + f.map[2:])

    failure = find_universality_failure(n3, ext, t_closure, lift=corrupted)
    assert failure is not None
    assert failure.eta == (0, 1, 1, 1)
    assert failure.factorizations == [(0, 2, 1, 1, 1)]
    assert failure.expected == (0, 1, 1, 1, 1)


def test_universal_property_without_zero_in_target():
    # T has no zero and η(0) = 1 is not closed there, so nothing may factor η
    T = to_closure_semilattice(strip_zero(truncated_naturals(2)))
    S = chain(1)
    ext = build_extension(S)
    eta = Morphism(source=S, target=T, map=(0,))
    assert T.K[0] != 0
    with pytest.raises(PreconditionError):
        lift_homomorphism(ext, T, eta)
    assert check_universal_property(S, ext, T)


def test_universal_property_zero_less_source():
    S = strip_zero(chain(3))
    ext = build_extension(S)
    assert check_universal_property(S, ext, to_closure_semilattice(chain(2)))


def test_universality_needs_matching_extension(chain2, n3, t_closure):
    with pytest.raises(PreconditionError):
        find_universality_failure(chain2, build_extension(n3), t_closure)


def test_sim_matrix_is_boolean(n3):
    M = sim_matrix(n3)
    assert M.dtype == np.bool_
    assert M.shape == (16, 16)
