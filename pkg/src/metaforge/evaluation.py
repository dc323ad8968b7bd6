"""Score a candidate metamodel against a reference.

Matching is name-based: element names are normalized (lowercased,
underscores and hyphens stripped) and looked up per category rather than
via graph isomorphism. Category semantics:

- classes: concrete (non-abstract) reference classes matched by name.
  Abstract classes act as scaffolding: they are never counted here, but
  their attributes and any edges touching them are scored in the other
  categories.
- attributes: every declared attribute, keyed by (owning class, name);
  a type mismatch still matches and is surfaced as a note.
- compositions: containment references as a (source, target) multiset.
- subclass relations: direct (sub, super) generalization pairs.

Candidate elements with no counterpart in the reference are reported as
extras but never affect matched/total.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .model import InvalidMetamodelError, Metamodel, validate


def normalize_name(name: str) -> str:
    return name.lower().replace("_", "").replace("-", "")


@dataclass(frozen=True)
class CategoryScore:
    matched: int
    total: int
    missing: tuple[str, ...] = ()
    extra: tuple[str, ...] = ()

    def cell(self) -> str:
        return f"{self.matched}/{self.total}"


@dataclass(frozen=True)
class ComparisonReport:
    classes: CategoryScore
    attributes: CategoryScore
    compositions: CategoryScore
    subclass_relations: CategoryScore
    notes: tuple[str, ...] = ()

    def categories(self) -> list[tuple[str, CategoryScore]]:
        return [
            ("classes", self.classes),
            ("attributes", self.attributes),
            ("compositions", self.compositions),
            ("subclass relations", self.subclass_relations),
        ]


def _require_valid(label: str, m: Metamodel) -> None:
    violations = validate(m)
    if violations:
        raise InvalidMetamodelError([f"{label} metamodel: {v}" for v in violations])


def _score_classes(candidate: Metamodel, reference: Metamodel) -> CategoryScore:
    cand_names = {normalize_name(c.name) for c in candidate.classes}
    ref_all = {normalize_name(c.name) for c in reference.classes}
    concrete = [c.name for c in reference.classes if not c.is_abstract]
    missing = tuple(sorted(n for n in concrete if normalize_name(n) not in cand_names))
    extra = tuple(sorted(c.name for c in candidate.classes if normalize_name(c.name) not in ref_all))
    return CategoryScore(len(concrete) - len(missing), len(concrete), missing, extra)


def _score_attributes(candidate: Metamodel, reference: Metamodel,
                      notes: list[str]) -> CategoryScore:
    cand_attrs = {
        (normalize_name(cls.name), normalize_name(attr.name)): attr
        for cls in candidate.classes for attr in cls.attributes
    }
    total = matched = 0
    missing: list[str] = []
    ref_keys = set()
    for cls in reference.classes:
        for attr in cls.attributes:
            total += 1
            key = (normalize_name(cls.name), normalize_name(attr.name))
            ref_keys.add(key)
            found = cand_attrs.get(key)
            if found is None:
                missing.append(f"{cls.name}.{attr.name}")
            else:
                matched += 1
                if found.value_type is not attr.value_type:
                    notes.append(
                        f"type mismatch {cls.name}.{attr.name}: candidate "
                        f"{found.value_type.value}, reference {attr.value_type.value}"
                    )
    extra = tuple(sorted(
        f"{cls.name}.{attr.name}"
        for cls in candidate.classes for attr in cls.attributes
        if (normalize_name(cls.name), normalize_name(attr.name)) not in ref_keys
    ))
    return CategoryScore(matched, total, tuple(sorted(missing)), extra)


def _composition_pairs(m: Metamodel) -> Counter:
    return Counter(
        (normalize_name(cls.name), normalize_name(ref.target_class))
        for cls in m.classes for ref in cls.references if ref.containment
    )


def _score_compositions(candidate: Metamodel, reference: Metamodel) -> CategoryScore:
    cand = _composition_pairs(candidate)
    missing: list[str] = []
    matched = total = 0
    seen: Counter = Counter()
    for cls in reference.classes:
        for ref in cls.references:
            if not ref.containment:
                continue
            total += 1
            key = (normalize_name(cls.name), normalize_name(ref.target_class))
            seen[key] += 1
            if seen[key] <= cand.get(key, 0):
                matched += 1
            else:
                missing.append(f"{cls.name}->{ref.target_class}")
    ref_pairs = _composition_pairs(reference)
    extra: list[str] = []
    used: Counter = Counter()
    for cls in candidate.classes:
        for ref in cls.references:
            if not ref.containment:
                continue
            key = (normalize_name(cls.name), normalize_name(ref.target_class))
            used[key] += 1
            if used[key] > ref_pairs.get(key, 0):
                extra.append(f"{cls.name}->{ref.target_class}")
    return CategoryScore(matched, total, tuple(sorted(missing)), tuple(sorted(extra)))


def _subclass_pairs(m: Metamodel) -> set[tuple[str, str]]:
    return {
        (normalize_name(cls.name), normalize_name(sup))
        for cls in m.classes for sup in cls.super_types
    }


def _score_subclasses(candidate: Metamodel, reference: Metamodel) -> CategoryScore:
    cand = _subclass_pairs(candidate)
    missing: list[str] = []
    total = matched = 0
    for cls in reference.classes:
        for sup in cls.super_types:
            total += 1
            if (normalize_name(cls.name), normalize_name(sup)) in cand:
                matched += 1
            else:
                missing.append(f"{cls.name}->{sup}")
    ref_pairs = _subclass_pairs(reference)
    extra = tuple(sorted(
        f"{cls.name}->{sup}"
        for cls in candidate.classes for sup in cls.super_types
        if (normalize_name(cls.name), normalize_name(sup)) not in ref_pairs
    ))
    return CategoryScore(matched, total, tuple(sorted(missing)), extra)


def compare(candidate: Metamodel, reference: Metamodel) -> ComparisonReport:
    """Score `candidate` against `reference`; totals always come from the
    reference, so compare(m, m) is full marks in every category."""
    _require_valid("candidate", candidate)
    _require_valid("reference", reference)
    notes: list[str] = []
    return ComparisonReport(
        classes=_score_classes(candidate, reference),
        attributes=_score_attributes(candidate, reference, notes),
        compositions=_score_compositions(candidate, reference),
        subclass_relations=_score_subclasses(candidate, reference),
        notes=tuple(notes),
    )


def format_report(report: ComparisonReport) -> str:
    """Aligned matched/total table plus missing/extra listings."""
    lines = []
    width = max(len(label) for label, _ in report.categories())
    cell_width = max(len(score.cell()) for _, score in report.categories())
    for label, score in report.categories():
        lines.append(f"{label.ljust(width)}  {score.cell().rjust(cell_width)}")
    for label, score in report.categories():
        if score.missing:
            lines.append(f"missing {label}: " + ", ".join(score.missing))
    for label, score in report.categories():
        if score.extra:
            lines.append(f"extra {label}: " + ", ".join(score.extra))
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: ComparisonReport) -> dict:
    """JSON-ready shape with camelCase keys (the wire format)."""
    def entry(score: CategoryScore) -> dict:
        return {
            "matched": score.matched,
            "total": score.total,
            "missing": list(score.missing),
            "extra": list(score.extra),
        }

    return {
        "classes": entry(report.classes),
        "attributes": entry(report.attributes),
        "compositions": entry(report.compositions),
        "subclassRelations": entry(report.subclass_relations),
        "notes": list(report.notes),
    }
