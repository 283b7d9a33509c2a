# main.py - batch command line for specialization semilattices and their extensions

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

from pydantic import BaseModel

from config import Config
from services.constructions import example_names, named_example, random_structure
from services.core import ClosureSemilattice, as_spec, validate, validate_closure
from services.errors import PreconditionError, SpecSemiError
from services.extension import (
    ExtensionResult,
    build_extension,
    find_universality_failure,
    lift_homomorphism,
)
from services.morphisms import enumerate_homomorphisms, enumerate_K_homomorphisms
from services.report_formatter import ReportFormatter
from services.structure_store import StructureStore

logger = logging.getLogger("specsemi")

store = StructureStore()
formatter = ReportFormatter()


class CommandResult(BaseModel):
    payload: Any
    text: str
    exit_code: int = 0


def cmd_validate(args: argparse.Namespace) -> CommandResult:
    document = store.load_document(args.file)
    S = store.structure_from_dict(document, raw=True)
    if isinstance(S, ClosureSemilattice):
        report = validate_closure(S, sq=document.get("sq"))
    else:
        report = validate(S)
    return CommandResult(
        payload=report.model_dump(mode="json"),
        text=formatter.format_report(report),
        exit_code=0 if report.passed else 2,
    )


def cmd_extend(args: argparse.Namespace) -> CommandResult:
    S = as_spec(store.load_structure(args.file))
    ext = build_extension(S, max_size=args.max_size)
    document = store.extension_to_dict(ext)
    if args.out:
        store.save_extension(ext, args.out)
    return CommandResult(payload=document, text=formatter.format_extension(ext))


def _load_extension_or_build(path: str, max_size: int) -> ExtensionResult:
    loaded = store.load_any(path)
    if isinstance(loaded, ExtensionResult):
        return loaded
    return build_extension(as_spec(loaded), max_size=max_size)


def cmd_lift(args: argparse.Namespace) -> CommandResult:
    ext = store.load_extension(args.ext_file)
    T = store.resolve_ref(args.target_file)
    eta = store.load_morphism(args.morphism_file, source=ext.source, target=T)
    lifted = lift_homomorphism(ext, T, eta)
    return CommandResult(
        payload=formatter.morphism_summary(lifted),
        text=formatter.format_morphism(lifted),
    )


def cmd_check_universal(args: argparse.Namespace) -> CommandResult:
    ext = _load_extension_or_build(args.file, Config.MAX_EXTENSION_SIZE)
    T = store.resolve_ref(args.target_file)
    failure = find_universality_failure(ext.source, ext, T, budget=args.budget)
    payload: Dict[str, Any] = {"status": "pass" if failure is None else "fail"}
    if failure is not None:
        payload["counterexample"] = failure.model_dump(mode="json")
    return CommandResult(
        payload=payload,
        text=formatter.format_universality(failure),
        exit_code=0 if failure is None else 2,
    )


def cmd_enum_homs(args: argparse.Namespace) -> CommandResult:
    loaded = store.load_any(args.src)
    source = loaded.tilde if isinstance(loaded, ExtensionResult) else loaded
    target = store.resolve_ref(args.dst)
    fixed: Optional[Dict[int, int]] = None
    if args.extending:
        if not isinstance(loaded, ExtensionResult):
            raise PreconditionError("--extending needs an extension file as the source")
        eta = store.load_morphism(args.extending, source=loaded.source, target=target)
        fixed = {loaded.upsilon[a]: value for a, value in enumerate(eta.map)}
    enumerate_maps = enumerate_K_homomorphisms if args.k_only else enumerate_homomorphisms
    maps = enumerate_maps(
        source, target,
        zero_preserving=args.zero_preserving,
        fixed=fixed,
        budget=args.budget,
    )
    kind = "K-homomorphisms" if args.k_only else "homomorphisms"
    return CommandResult(
        payload=[list(f.map) for f in maps],
        text=formatter.format_morphisms(maps, kind),
    )


def _emit_structure(S, out: Optional[str]) -> CommandResult:
    if out:
        store.save_structure(S, out)
    return CommandResult(payload=store.structure_to_dict(S), text=formatter.format_structure(S))


def cmd_example(args: argparse.Namespace) -> CommandResult:
    return _emit_structure(named_example(args.name, size=args.size), args.out)


def cmd_generate(args: argparse.Namespace) -> CommandResult:
    return _emit_structure(random_structure(args.seed, max_size=args.max_size), args.out)


def cmd_construct(args: argparse.Namespace) -> CommandResult:
    return _emit_structure(store.load_construction(args.file), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specsemi",
        description="Finite specialization semilattices and their universal additive closure extensions",
    )
    parser.add_argument("--json", action="store_true", help="print JSON on stdout")
    parser.add_argument("--log-level", default=Config.LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("validate", help="check the axioms of a structure file")
    p.add_argument("file")
    p.set_defaults(handler=cmd_validate)

    p = commands.add_parser("extend", help="build the universal extension")
    p.add_argument("file")
    p.add_argument("--out")
    p.add_argument("--max-size", type=int, default=Config.MAX_EXTENSION_SIZE)
    p.set_defaults(handler=cmd_extend)

    p = commands.add_parser("lift", help="lift a homomorphism into an additive closure semilattice")
    p.add_argument("ext_file")
    p.add_argument("target_file")
    p.add_argument("morphism_file")
    p.set_defaults(handler=cmd_lift)

    p = commands.add_parser("check-universal", help="verify the universal property by enumeration")
    p.add_argument("file", help="structure or extension file")
    p.add_argument("target_file")
    p.add_argument("--budget", type=int, default=Config.ENUMERATION_BUDGET)
    p.set_defaults(handler=cmd_check_universal)

    p = commands.add_parser("enum-homs", help="enumerate homomorphisms between two structures")
    p.add_argument("src")
    p.add_argument("dst")
    p.add_argument("--k-only", action="store_true")
    p.add_argument("--zero-preserving", action="store_true")
    p.add_argument("--extending", help="morphism file; only maps extending it through the embedding")
    p.add_argument("--budget", type=int, default=Config.ENUMERATION_BUDGET)
    p.set_defaults(handler=cmd_enum_homs)

    p = commands.add_parser("example", help="write a named example structure")
    p.add_argument("name", choices=example_names())
    p.add_argument("--size", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_example)

    p = commands.add_parser("construct", help="build a structure from a closure space, an ideal or a homomorphism")
    p.add_argument("file", help="JSON object with one of closure_space, ideal, semilattice_hom")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_construct)

    p = commands.add_parser("generate", help="write a random corpus structure")
    p.add_argument("--seed", type=int, default=Config.DEFAULT_SEED)
    p.add_argument("--max-size", type=int, default=Config.DEFAULT_RANDOM_SIZE)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_generate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0

    logging.basicConfig(level=args.log_level, format=Config.LOG_FORMAT, stream=sys.stderr, force=True)
    for warning in Config.validate_config()["warnings"]:
        logger.warning(warning)
    handler: Callable[[argparse.Namespace], CommandResult] = args.handler
    try:
        result = handler(args)
    except SpecSemiError as e:
        logger.error(f"{args.command} failed: {e}")
        if args.json:
            print(json.dumps({"error": type(e).__name__, "message": str(e)}))
        return e.exit_code

    if args.json:
        print(json.dumps(result.payload, indent=2))
    else:
        print(result.text)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
