"""
JSON files for structures, extensions and morphisms.

A structure file is one object {"n", "join", "sq", "zero", "K", "labels"};
"K" is non-null only for closure semilattices, whose "sq" is the derived
a ⊑ b iff a <= Kb. An extension file is the structure file of S̃ plus
"upsilon", "class_of", "reps", "adjoined_zero" and the embedded "source".
A morphism file is {"source": ref, "target": ref, "map": [...]}, where a ref
is a path relative to the morphism file, "example:<name>", or an inline
structure object.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional, Union

from pydantic import ValidationError

from services.axiom_validator import check_tables, is_index
from services.constructions import adjoin_zero, from_closure_space, from_semilattice_hom, mod_ideal, named_example
from services.core import ClosureSemilattice, SpecSemilattice, Structure, from_closure_semilattice
from services.errors import AxiomError, StructuralError
from services.extension import ExtensionResult
from services.morphisms import Morphism

logger = logging.getLogger(__name__)

EXAMPLE_PREFIX = "example:"
STRUCTURE_KEYS = ("n", "join", "sq", "zero", "K", "labels")
CONSTRUCTIONS = ("closure_space", "ideal", "semilattice_hom")


class StructureStore:
    """Reads and writes the JSON formats; relative refs resolve against the referring file."""

    def __init__(self, base_dir: str = "."):
        self.base_dir = base_dir

    def _path(self, path: str, relative_to: Optional[str] = None) -> str:
        if os.path.isabs(path):
            return path
        return os.path.join(relative_to or self.base_dir, path)

    def load_document(self, path: str) -> Dict[str, Any]:
        full_path = self._path(path)
        try:
            with open(full_path, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as e:
            raise StructuralError(f"Cannot read {full_path}: {e.strerror or e}") from e
        except json.JSONDecodeError as e:
            raise StructuralError(f"{full_path} is not valid JSON: {e.msg} at line {e.lineno}") from e
        if not isinstance(data, dict):
            raise StructuralError(f"{full_path} must hold a JSON object")
        return data

    def write_document(self, data: Dict[str, Any], path: str) -> str:
        full_path = self._path(path)
        directory = os.path.dirname(full_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        try:
            with open(full_path, "w", encoding="utf-8") as handle:
                json.dump(data, handle, indent=2)
                handle.write("\n")
        except OSError as e:
            raise StructuralError(f"Cannot write {full_path}: {e.strerror or e}") from e
        logger.info(f"Wrote {full_path}")
        return full_path

    # Structures

    def structure_from_dict(self, data: Dict[str, Any], raw: bool = False) -> Structure:
        """
        Builds a structure from its JSON object. With ``raw`` only the table
        shapes are checked and axioms are left to ``validate``.
        """
        unknown = set(data) - set(STRUCTURE_KEYS) - {"upsilon", "class_of", "reps", "adjoined_zero", "source"}
        if unknown:
            raise StructuralError(f"Unknown structure fields: {sorted(unknown)}")
        n, join, K = data.get("n"), data.get("join"), data.get("K")
        zero, labels = data.get("zero"), data.get("labels")
        sq = data.get("sq")
        check_tables(n, join, sq=sq, K=K, zero=zero)
        if labels is not None and (not isinstance(labels, list) or not all(isinstance(x, str) for x in labels)):
            raise StructuralError("labels must be a list of strings")
        fields = {
            "n": n,
            "join": tuple(tuple(row) for row in join),
            "zero": zero,
            "labels": tuple(labels) if labels is not None else None,
        }

        if K is not None:
            fields["K"] = tuple(K)
            structure = self._build(ClosureSemilattice, fields, raw)
            if sq is not None and not raw:
                derived = from_closure_semilattice(structure).sq
                if tuple(tuple(bool(x) for x in row) for row in sq) != derived:
                    raise StructuralError("sq disagrees with the relation derived from K")
            return structure
        if sq is None:
            raise StructuralError("A specialization semilattice needs an sq relation")
        fields["sq"] = tuple(tuple(bool(x) for x in row) for row in sq)
        return self._build(SpecSemilattice, fields, raw)

    def _build(self, model, fields: Dict[str, Any], raw: bool) -> Structure:
        if raw:
            return model.model_construct(**fields)
        try:
            return model(**fields)
        except ValidationError as e:
            message = e.errors()[0].get("msg", str(e))
            raise AxiomError(message.removeprefix("Value error, ")) from e

    def structure_to_dict(self, S: Structure) -> Dict[str, Any]:
        closure = isinstance(S, ClosureSemilattice)
        sq = from_closure_semilattice(S).sq if closure else S.sq
        return {
            "n": S.n,
            "join": [list(row) for row in S.join],
            "sq": [[int(x) for x in row] for row in sq],
            "zero": S.zero,
            "K": list(S.K) if closure else None,
            "labels": list(S.labels) if S.labels else None,
        }

    def load_structure(self, path: str, raw: bool = False) -> Structure:
        structure = self.structure_from_dict(self.load_document(path), raw=raw)
        logger.info(f"Loaded a size-{structure.n} structure from {path}")
        return structure

    def save_structure(self, S: Structure, path: str) -> str:
        return self.write_document(self.structure_to_dict(S), path)

    def resolve_ref(self, ref: Any, relative_to: Optional[str] = None) -> Structure:
        if isinstance(ref, dict):
            return self.structure_from_dict(ref)
        if not isinstance(ref, str):
            raise StructuralError(f"Structure reference must be a path, an example id or an object, got {ref!r}")
        if ref.startswith(EXAMPLE_PREFIX):
            return named_example(ref[len(EXAMPLE_PREFIX):])
        document = self.load_document(self._path(ref, relative_to))
        if "upsilon" in document:
            return self.extension_from_dict(document).tilde
        return self.structure_from_dict(document)

    # Extensions

    def extension_to_dict(self, ext: ExtensionResult) -> Dict[str, Any]:
        data = self.structure_to_dict(ext.tilde)
        data.update({
            "upsilon": list(ext.upsilon),
            "class_of": [list(row) for row in ext.class_of],
            "reps": [list(pair) for pair in ext.representatives],
            "adjoined_zero": ext.adjoined_zero,
            "source": self.structure_to_dict(ext.source),
        })
        return data

    def extension_from_dict(self, data: Dict[str, Any]) -> ExtensionResult:
        for key in ("upsilon", "class_of", "reps", "source"):
            if key not in data:
                raise StructuralError(f"Extension file is missing '{key}'")
        tilde = self.structure_from_dict({k: data.get(k) for k in STRUCTURE_KEYS})
        if not isinstance(tilde, ClosureSemilattice):
            raise StructuralError("Extension carrier must carry its closure K")
        source = self.structure_from_dict(data["source"])
        if not isinstance(source, SpecSemilattice):
            raise StructuralError("Extension source must be a specialization semilattice")
        adjoined = bool(data.get("adjoined_zero", False))
        try:
            return ExtensionResult(
                source=source,
                base=adjoin_zero(source) if adjoined else source,
                tilde=tilde,
                tilde_spec=from_closure_semilattice(tilde),
                upsilon=tuple(data["upsilon"]),
                class_of=tuple(tuple(row) for row in data["class_of"]),
                representatives=tuple(tuple(pair) for pair in data["reps"]),
                adjoined_zero=adjoined,
            )
        except ValidationError as e:
            raise StructuralError(f"Inconsistent extension file: {e.errors()[0].get('msg')}") from e

    def load_extension(self, path: str) -> ExtensionResult:
        return self.extension_from_dict(self.load_document(path))

    def save_extension(self, ext: ExtensionResult, path: str) -> str:
        return self.write_document(self.extension_to_dict(ext), path)

    def load_any(self, path: str) -> Union[Structure, ExtensionResult]:
        """An extension if the file carries an embedding, a structure otherwise."""
        document = self.load_document(path)
        if "upsilon" in document:
            return self.extension_from_dict(document)
        return self.structure_from_dict(document)

    # Constructions

    def _index_list(self, params: Dict[str, Any], key: str) -> List[int]:
        values = params.get(key)
        if not isinstance(values, list) or not all(is_index(x) for x in values):
            raise StructuralError(f"'{key}' must be a list of integers")
        return values

    def construction_from_dict(self, data: Dict[str, Any], relative_to: Optional[str] = None) -> SpecSemilattice:
        """
        Builds a structure from one of
        {"closure_space": {"ground_size": g, "closed": [masks]}},
        {"ideal": {"ground_size": g, "members": [masks]}} or
        {"semilattice_hom": {"join": table, "target": ref, "map": [...]}}.
        Subsets of the ground set are bitmasks.
        """
        if len(data) != 1 or next(iter(data)) not in CONSTRUCTIONS:
            raise StructuralError(f"A construction file holds exactly one of {', '.join(CONSTRUCTIONS)}")
        kind, params = next(iter(data.items()))
        if not isinstance(params, dict):
            raise StructuralError(f"'{kind}' must map to an object")

        if kind == "semilattice_hom":
            join = params.get("join")
            if not isinstance(join, list):
                raise StructuralError("'join' must be a table")
            check_tables(len(join) or 1, join)
            target = self.resolve_ref(params.get("target"), relative_to)
            return from_semilattice_hom(join, target, self._index_list(params, "map"))

        ground_size = params.get("ground_size")
        if not is_index(ground_size):
            raise StructuralError("'ground_size' must be an integer")
        if kind == "closure_space":
            return from_closure_space(ground_size, self._index_list(params, "closed"))
        return mod_ideal(ground_size, self._index_list(params, "members"))

    def load_construction(self, path: str) -> SpecSemilattice:
        structure = self.construction_from_dict(self.load_document(path), os.path.dirname(self._path(path)))
        logger.info(f"Constructed a size-{structure.n} structure from {path}")
        return structure

    # Morphisms

    def morphism_to_dict(self, f: Morphism, source_ref: Any = None, target_ref: Any = None) -> Dict[str, Any]:
        return {
            "source": source_ref if source_ref is not None else self.structure_to_dict(f.source),
            "target": target_ref if target_ref is not None else self.structure_to_dict(f.target),
            "map": list(f.map),
        }

    def load_morphism(
        self,
        path: str,
        source: Optional[Structure] = None,
        target: Optional[Structure] = None,
    ) -> Morphism:
        """Loads a map; explicit ``source``/``target`` take precedence over the file's refs."""
        data = self.load_document(path)
        mapping = data.get("map")
        if not isinstance(mapping, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in mapping):
            raise StructuralError("Morphism 'map' must be a list of element indices")
        relative_to = os.path.dirname(self._path(path))
        if source is None:
            source = self.resolve_ref(data.get("source"), relative_to)
        if target is None:
            target = self.resolve_ref(data.get("target"), relative_to)
        try:
            return Morphism(source=source, target=target, map=tuple(mapping))
        except ValidationError as e:
            raise StructuralError(f"Invalid morphism: {e.errors()[0].get('msg')}") from e

    def save_morphism(self, f: Morphism, path: str, source_ref: Any = None, target_ref: Any = None) -> str:
        return self.write_document(self.morphism_to_dict(f, source_ref, target_ref), path)
