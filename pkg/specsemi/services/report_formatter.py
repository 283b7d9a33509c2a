from typing import Any, Dict, List, Optional, Sequence

from services.axiom_validator import ValidationReport
from services.core import ClosureSemilattice, Structure, as_spec
from services.extension import ExtensionResult, UniversalityFailure
from services.morphisms import Morphism


class ReportFormatter:
    """Plain-text renderings of structures, reports, extensions and maps."""

    def format_report(self, report: ValidationReport) -> str:
        if report.passed:
            return f"{report.subject}: pass"
        lines = [f"{report.subject}: fail"]
        for violation in report.violations:
            witness = ", ".join(str(x) for x in violation.witness)
            lines.append(f"  - {violation.axiom} fails at ({witness})")
        return "\n".join(lines)

    def _grid(self, title: str, rows: Sequence[Sequence[Any]], labels: List[str]) -> str:
        width = max(len(x) for x in labels)
        header = " " * (width + 2) + " ".join(x.rjust(width) for x in labels)
        body = [
            f"{labels[a].rjust(width)} |" + " ".join(str(v).rjust(width) for v in row)
            for a, row in enumerate(rows)
        ]
        return "\n".join([title, header] + body)

    def format_structure(self, S: Structure) -> str:
        labels = [S.label(a) for a in range(S.n)]
        kind = "closure semilattice" if isinstance(S, ClosureSemilattice) else "specialization semilattice"
        zero = S.label(S.zero) if S.zero is not None else "none"
        parts = [f"{kind} with {S.n} elements, zero {zero}"]
        parts.append(self._grid("join:", [[labels[x] for x in row] for row in S.join], labels))
        sq = as_spec(S).sq
        parts.append(self._grid("sq (row ⊑ column):", [["x" if x else "." for x in row] for row in sq], labels))
        if isinstance(S, ClosureSemilattice):
            parts.append("K: " + ", ".join(f"{labels[a]} -> {labels[k]}" for a, k in enumerate(S.K)))
        return "\n\n".join(parts)

    def format_extension(self, ext: ExtensionResult) -> str:
        tilde = ext.tilde
        lines = [f"extension of a size-{ext.source.n} structure: {tilde.n} classes"]
        if ext.adjoined_zero:
            lines.append("(zero adjoined and its class stripped)")
        embedded = set(ext.upsilon)
        for x, (a, b) in enumerate(ext.representatives):
            mark = "  υ" if x in embedded else ""
            lines.append(f"  {x}: {tilde.label(x)}  K -> {tilde.K[x]}{mark}")
        lines.append("upsilon: " + ", ".join(
            f"{ext.source.label(a)} -> {u}" for a, u in enumerate(ext.upsilon)
        ))
        return "\n".join(lines)

    def format_morphism(self, f: Morphism) -> str:
        pairs = ", ".join(f"{f.source.label(a)} -> {f.target.label(v)}" for a, v in enumerate(f.map))
        role = f" ({f.role.replace('_', '-')})" if f.role else ""
        return f"[{pairs}]{role}"

    def format_morphisms(self, maps: Sequence[Morphism], kind: str) -> str:
        lines = [f"{len(maps)} {kind}"]
        lines.extend(f"  {self.format_morphism(f)}" for f in maps)
        return "\n".join(lines)

    def format_universality(self, failure: Optional[UniversalityFailure]) -> str:
        if failure is None:
            return "universal property: pass"
        lines = [
            "universal property: fail",
            f"  eta: {list(failure.eta)}",
            f"  reason: {failure.reason}",
            f"  factorizations: {[list(g) for g in failure.factorizations]}",
        ]
        if failure.expected is not None:
            lines.append(f"  expected lift: {list(failure.expected)}")
        return "\n".join(lines)

    def morphism_summary(self, f: Morphism) -> Dict[str, Any]:
        return {"map": list(f.map), "role": f.role}
