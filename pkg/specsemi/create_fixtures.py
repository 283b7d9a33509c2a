"""Regenerates the JSON fixtures under fixtures/ from the library's own constructions."""

import logging
import os

from config import Config
from services.constructions import chain, counterexample_t, diamond, truncated_naturals
from services.core import to_closure_semilattice
from services.extension import build_extension
from services.morphisms import Morphism
from services.structure_store import StructureStore

logging.basicConfig(level=logging.INFO, format=Config.LOG_FORMAT)
logger = logging.getLogger(__name__)

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


def main() -> None:
    store = StructureStore(FIXTURE_DIR)
    chain2, n3, t = chain(2), truncated_naturals(3), counterexample_t()

    store.save_structure(chain(1), "singleton.json")
    store.save_structure(chain2, "chain2.json")
    store.save_structure(to_closure_semilattice(chain2), "chain2_closure.json")
    store.save_structure(n3, "n3.json")
    store.save_structure(t, "counterexample_t.json")
    store.save_extension(build_extension(chain2), "chain2_extension.json")
    n3_extension = build_extension(n3)
    store.save_extension(n3_extension, "n3_extension.json")

    # υ(2) and υ(3) swapped: loads fine, fails the universality check
    corrupted = store.extension_to_dict(n3_extension)
    corrupted["upsilon"] = [0, 2, 4, 3]
    store.write_document(corrupted, "n3_extension_corrupted.json")

    store.save_morphism(
        Morphism(source=n3, target=t, map=(0, 1, 1, 1)),
        "eta_n3.json", "n3.json", "counterexample_t.json",
    )
    store.save_morphism(
        Morphism(source=n3, target=t, map=(0, 2, 1, 1)),
        "eta_n3_not_hom.json", "n3.json", "counterexample_t.json",
    )
    store.save_morphism(
        Morphism(source=chain2, target=to_closure_semilattice(chain2), map=(0, 1)),
        "eta_chain2_identity.json", "chain2.json", "chain2_closure.json",
    )

    # x and y specialize to each other, but their join does not specialize to x
    broken = store.structure_to_dict(diamond())
    broken["sq"][1][2] = 1
    broken["sq"][2][1] = 1
    store.write_document(broken, "broken_s3.json")

    # construction inputs, subsets as bitmasks
    store.write_document({"closure_space": {"ground_size": 3, "closed": [0, 1, 2, 4, 7]}}, "closure_space.json")
    store.write_document({"closure_space": {"ground_size": 3, "closed": [0, 3, 6, 7]}}, "closure_space_not_closed.json")
    store.write_document({"ideal": {"ground_size": 3, "members": [0, 1]}}, "ideal.json")
    store.write_document(
        {"semilattice_hom": {"join": [list(row) for row in diamond().join], "target": "chain2.json", "map": [0, 1, 1, 1]}},
        "diamond_hom.json",
    )

    with open(os.path.join(FIXTURE_DIR, "malformed.json"), "w", encoding="utf-8") as handle:
        handle.write('{"n": 2, "join": [[0, 1], [1, 1]],\n')

    logger.info(f"Fixtures written to {FIXTURE_DIR}")


if __name__ == "__main__":
    main()
