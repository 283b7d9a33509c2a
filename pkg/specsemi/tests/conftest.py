import os

import pytest

from services.constructions import (
    chain,
    counterexample_t,
    diamond,
    diamond_hom,
    random_corpus,
    truncated_naturals,
)
from services.core import SpecSemilattice, to_closure_semilattice
from services.structure_store import StructureStore

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, name)


def raw_spec(n, join, sq, zero=None) -> SpecSemilattice:
    """A structure that skips validation, for exercising failure paths."""
    return SpecSemilattice.model_construct(
        n=n,
        join=tuple(tuple(row) for row in join),
        sq=tuple(tuple(bool(x) for x in row) for row in sq),
        zero=zero,
        labels=None,
    )


@pytest.fixture(scope="session")
def corpus():
    """200 seeded random structures of sizes 1..8."""
    return random_corpus(200, max_size=8, seed=0)


@pytest.fixture(scope="session")
def small_corpus(corpus):
    return [S for S in corpus if S.n <= 5]


@pytest.fixture
def chain2():
    return chain(2)


@pytest.fixture
def n3():
    return truncated_naturals(3)


@pytest.fixture
def t_closure():
    return to_closure_semilattice(counterexample_t())


@pytest.fixture
def store():
    return StructureStore(FIXTURE_DIR)


@pytest.fixture(scope="session")
def universal_pairs():
    """(S, T) pairs with T a principal additive closure semilattice."""
    t = to_closure_semilattice(counterexample_t())
    c2 = to_closure_semilattice(chain(2))
    return [
        (chain(1), to_closure_semilattice(chain(1))),
        (chain(2), c2),
        (chain(2), t),
        (truncated_naturals(3), t),
        (chain(3), c2),
        (diamond(), t),
        (diamond_hom(), c2),
    ]
