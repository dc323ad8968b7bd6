"""Core metamodel IR: immutable domain types, validation, canonical form,
and the monotone merge that drives iterative refinement.

Every other module (codecs, scoring, pipeline, service) works on these
values. All types are frozen dataclasses, all operations pure functions,
so they are safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum

IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

DEFAULT_PACKAGE_NAME = "automotive"
DEFAULT_NS_URI = "http://www.example.org/automotive"
DEFAULT_NS_PREFIX = "automotive"
SEED_CLASS_NAME = "Vehicle"


class ValueType(Enum):
    """Attribute value types supported by the IR (a deliberate Ecore subset)."""

    STRING = "String"
    INT = "Int"
    DOUBLE = "Double"
    FLOAT = "Float"
    BOOLEAN = "Boolean"


class MetamodelError(ValueError):
    """Base error carrying a list of human-readable violations."""

    def __init__(self, violations: list[str] | tuple[str, ...], prefix: str = "invalid metamodel"):
        self.violations = list(violations)
        super().__init__(f"{prefix}: " + "; ".join(self.violations))


class InvalidMetamodelError(MetamodelError):
    """A metamodel failed validation where a valid one was required."""


class MergeError(MetamodelError):
    """A merge would produce an invalid metamodel; the inputs are untouched."""

    def __init__(self, violations: list[str] | tuple[str, ...]):
        super().__init__(violations, prefix="merge rejected")


@dataclass(frozen=True)
class AttributeDef:
    name: str
    value_type: ValueType = ValueType.STRING
    default_value: str | None = None


@dataclass(frozen=True)
class ReferenceDef:
    name: str
    target_class: str
    containment: bool = False
    lower_bound: int = 0
    upper_bound: int = 1  # -1 denotes unbounded


@dataclass(frozen=True)
class ClassDef:
    name: str
    is_abstract: bool = False
    super_types: tuple[str, ...] = ()
    attributes: tuple[AttributeDef, ...] = ()
    references: tuple[ReferenceDef, ...] = ()

    def feature_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes) + tuple(r.name for r in self.references)


@dataclass(frozen=True)
class Metamodel:
    name: str = DEFAULT_PACKAGE_NAME
    ns_uri: str = DEFAULT_NS_URI
    ns_prefix: str = DEFAULT_NS_PREFIX
    classes: tuple[ClassDef, ...] = ()

    def class_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)

    def find_class(self, name: str) -> ClassDef | None:
        for cls in self.classes:
            if cls.name == name:
                return cls
        return None


@dataclass(frozen=True)
class MergeOutcome:
    merged: Metamodel
    warnings: tuple[str, ...] = ()


def seed_metamodel(
    name: str = DEFAULT_PACKAGE_NAME,
    ns_uri: str = DEFAULT_NS_URI,
    ns_prefix: str = DEFAULT_NS_PREFIX,
) -> Metamodel:
    """Initial metamodel: a single featureless root class."""
    return Metamodel(name=name, ns_uri=ns_uri, ns_prefix=ns_prefix,
                     classes=(ClassDef(SEED_CLASS_NAME),))


def sanitize_identifier(raw: str) -> str:
    """Coerce arbitrary text to a legal identifier by replacing bad characters."""
    cleaned = re.sub(r"[^A-Za-z0-9_]", "_", raw.strip())
    if not cleaned or not re.match(r"[A-Za-z_]", cleaned[0]):
        cleaned = "_" + cleaned
    return cleaned


_BOOLEAN_LITERALS = {"true", "false"}


def default_value_ok(value: str, value_type: ValueType) -> bool:
    if value_type is ValueType.STRING:
        return True
    if value_type is ValueType.BOOLEAN:
        return value in _BOOLEAN_LITERALS
    if value_type is ValueType.INT:
        try:
            int(value)
            return True
        except ValueError:
            return False
    # Double / Float accept decimal literals
    try:
        float(value)
        return True
    except ValueError:
        return False


def _find_cycle(classes_by_name: dict[str, ClassDef]) -> list[str] | None:
    """Return one generalization cycle as a name path, or None."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {name: WHITE for name in classes_by_name}
    stack: list[str] = []

    def dfs(name: str) -> list[str] | None:
        color[name] = GREY
        stack.append(name)
        for sup in classes_by_name[name].super_types:
            if sup not in classes_by_name:
                continue
            if color[sup] == GREY:
                return stack[stack.index(sup):] + [sup]
            if color[sup] == WHITE:
                found = dfs(sup)
                if found:
                    return found
        color[name] = BLACK
        stack.pop()
        return None

    for name in sorted(classes_by_name):
        if color[name] == WHITE:
            cycle = dfs(name)
            if cycle:
                return cycle
    return None


def _ancestors(name: str, classes_by_name: dict[str, ClassDef]) -> list[str]:
    """All transitive supertypes of `name`, cycle-safe, in deterministic order."""
    seen: list[str] = []
    pending = list(classes_by_name[name].super_types)
    while pending:
        sup = pending.pop(0)
        if sup == name or sup in seen or sup not in classes_by_name:
            continue
        seen.append(sup)
        pending.extend(classes_by_name[sup].super_types)
    return seen


def validate(m: Metamodel) -> list[str]:
    """Check every IR invariant; returns one description per violation.

    Violations are data, not failures: an empty list means the metamodel
    is valid.
    """
    violations: list[str] = []

    if not IDENTIFIER_RE.match(m.name):
        violations.append(f"package '{m.name}': name is not a valid identifier")
    if not m.ns_uri.strip():
        violations.append("package: nsURI must be non-empty")
    if not IDENTIFIER_RE.match(m.ns_prefix):
        violations.append(f"package '{m.name}': nsPrefix '{m.ns_prefix}' is not a valid identifier")

    names = [c.name for c in m.classes]
    by_name: dict[str, ClassDef] = {}
    for cls in m.classes:
        if cls.name in by_name:
            violations.append(f"class '{cls.name}': duplicate class name")
        else:
            by_name[cls.name] = cls

    for cls in m.classes:
        if not IDENTIFIER_RE.match(cls.name):
            violations.append(f"class '{cls.name}': name is not a valid identifier")

        seen_supers: set[str] = set()
        for sup in cls.super_types:
            if sup == cls.name:
                violations.append(f"class '{cls.name}': lists itself as a supertype")
            elif sup in seen_supers:
                violations.append(f"class '{cls.name}': duplicate supertype '{sup}'")
            elif sup not in by_name:
                violations.append(f"class '{cls.name}': unresolved supertype '{sup}'")
            seen_supers.add(sup)

        local: set[str] = set()
        for attr in cls.attributes:
            if not IDENTIFIER_RE.match(attr.name):
                violations.append(f"class '{cls.name}', attribute '{attr.name}': name is not a valid identifier")
            if attr.name in local:
                violations.append(f"class '{cls.name}', attribute '{attr.name}': duplicate feature name")
            local.add(attr.name)
            if attr.default_value is not None and not default_value_ok(attr.default_value, attr.value_type):
                violations.append(
                    f"class '{cls.name}', attribute '{attr.name}': default '{attr.default_value}' "
                    f"does not parse as {attr.value_type.value}"
                )
        for ref in cls.references:
            if not IDENTIFIER_RE.match(ref.name):
                violations.append(f"class '{cls.name}', reference '{ref.name}': name is not a valid identifier")
            if ref.name in local:
                violations.append(f"class '{cls.name}', reference '{ref.name}': duplicate feature name")
            local.add(ref.name)
            if ref.target_class not in by_name:
                violations.append(f"class '{cls.name}', reference '{ref.name}': unresolved target '{ref.target_class}'")
            if ref.lower_bound < 0:
                violations.append(f"class '{cls.name}', reference '{ref.name}': negative lowerBound {ref.lower_bound}")
            if ref.upper_bound == 0:
                violations.append(f"class '{cls.name}', reference '{ref.name}': upperBound must not be 0")
            elif ref.upper_bound != -1 and ref.upper_bound < ref.lower_bound:
                violations.append(
                    f"class '{cls.name}', reference '{ref.name}': upperBound {ref.upper_bound} "
                    f"below lowerBound {ref.lower_bound}"
                )

    if len(set(names)) == len(names):
        cycle = _find_cycle(by_name)
        if cycle:
            violations.append("inheritance cycle: " + " -> ".join(cycle))
        else:
            # Chain uniqueness only means anything on an acyclic graph.
            for cls in m.classes:
                inherited: dict[str, str] = {}
                for anc_name in _ancestors(cls.name, by_name):
                    for feat in by_name[anc_name].feature_names():
                        inherited.setdefault(feat, anc_name)
                for feat in cls.feature_names():
                    if feat in inherited:
                        violations.append(
                            f"class '{cls.name}', feature '{feat}': shadows feature of supertype '{inherited[feat]}'"
                        )
    return violations


def canonicalize(m: Metamodel) -> Metamodel:
    """Deterministic normal form: everything sorted by name.

    Semantically equal metamodels (same elements, any order) map to the
    same value, so canonical forms compare with ==. Idempotent.
    """
    violations = validate(m)
    if violations:
        raise InvalidMetamodelError(violations)
    classes = tuple(
        replace(
            cls,
            super_types=tuple(sorted(cls.super_types)),
            attributes=tuple(sorted(cls.attributes, key=lambda a: a.name)),
            references=tuple(sorted(cls.references, key=lambda r: r.name)),
        )
        for cls in sorted(m.classes, key=lambda c: c.name)
    )
    return replace(m, classes=classes)


def _merge_class(cur: ClassDef, new: ClassDef, warnings: list[str]) -> ClassDef:
    is_abstract = cur.is_abstract
    if new.is_abstract != cur.is_abstract:
        is_abstract = new.is_abstract
        warnings.append(f"class '{cur.name}': abstract changed from {cur.is_abstract} to {new.is_abstract}")

    supers = list(cur.super_types) + [s for s in new.super_types if s not in cur.super_types]

    attrs = {a.name: a for a in cur.attributes}
    refs = {r.name: r for r in cur.references}
    attr_order = [a.name for a in cur.attributes]
    ref_order = [r.name for r in cur.references]

    for attr in new.attributes:
        if attr.name in refs:
            warnings.append(f"class '{cur.name}': feature '{attr.name}' redefined as attribute (was a reference)")
            del refs[attr.name]
            ref_order.remove(attr.name)
            attrs[attr.name] = attr
            attr_order.append(attr.name)
        elif attr.name in attrs:
            if attrs[attr.name] != attr:
                warnings.append(f"class '{cur.name}': attribute '{attr.name}' redefined; newer definition wins")
                attrs[attr.name] = attr
        else:
            attrs[attr.name] = attr
            attr_order.append(attr.name)

    for ref in new.references:
        if ref.name in attrs:
            warnings.append(f"class '{cur.name}': feature '{ref.name}' redefined as reference (was an attribute)")
            del attrs[ref.name]
            attr_order.remove(ref.name)
            refs[ref.name] = ref
            ref_order.append(ref.name)
        elif ref.name in refs:
            if refs[ref.name] != ref:
                warnings.append(f"class '{cur.name}': reference '{ref.name}' redefined; newer definition wins")
                refs[ref.name] = ref
        else:
            refs[ref.name] = ref
            ref_order.append(ref.name)

    return ClassDef(
        name=cur.name,
        is_abstract=is_abstract,
        super_types=tuple(supers),
        attributes=tuple(attrs[n] for n in attr_order),
        references=tuple(refs[n] for n in ref_order),
    )


def _drop_shadowed_features(
    merged: dict[str, ClassDef],
    order: list[str],
    current: Metamodel,
    warnings: list[str],
) -> None:
    """Resolve feature names duplicated along a newly formed inheritance chain.

    The occurrence that existed in `current` is kept (merge never deletes);
    otherwise the topmost declaration wins. If both collision sides come
    from `current` the merge has no monotone resolution and is rejected.
    """
    current_pairs = {
        (cls.name, feat) for cls in current.classes for feat in cls.feature_names()
    }
    drops: set[tuple[str, str]] = set()
    dead_ends: list[str] = []

    for name in order:
        cls = merged[name]
        for anc_name in _ancestors(name, merged):
            anc = merged[anc_name]
            for feat in set(cls.feature_names()) & set(anc.feature_names()):
                sub_pair, anc_pair = (name, feat), (anc_name, feat)
                if sub_pair in drops or anc_pair in drops:
                    continue
                sub_is_current = sub_pair in current_pairs
                anc_is_current = anc_pair in current_pairs
                if sub_is_current and anc_is_current:
                    dead_ends.append(
                        f"feature '{feat}' of '{name}' would shadow '{anc_name}.{feat}'; "
                        "both predate this merge"
                    )
                elif sub_is_current:
                    drops.add(anc_pair)
                    warnings.append(
                        f"class '{anc_name}': dropped feature '{feat}' shadowed by pre-existing '{name}.{feat}'"
                    )
                else:
                    drops.add(sub_pair)
                    warnings.append(
                        f"class '{name}': dropped feature '{feat}' already inherited from '{anc_name}'"
                    )

    if dead_ends:
        raise MergeError(dead_ends)

    for cls_name, feat in drops:
        cls = merged[cls_name]
        merged[cls_name] = replace(
            cls,
            attributes=tuple(a for a in cls.attributes if a.name != feat),
            references=tuple(r for r in cls.references if r.name != feat),
        )


def merge(current: Metamodel, partial: Metamodel) -> MergeOutcome:
    """Fold a newly derived partial metamodel into the current one.

    Classes are unioned by name; within a shared class, features and
    supertypes are unioned by name with the partial (newer) definition
    winning on conflict. Nothing present in `current` is ever deleted.
    A merge that cannot yield a valid metamodel (inheritance cycle,
    unresolved target, irreconcilable shadowing) raises MergeError and
    leaves both inputs untouched.
    """
    for label, metamodel in (("current", current), ("partial", partial)):
        violations = validate(metamodel)
        if violations:
            raise InvalidMetamodelError([f"{label} metamodel: {v}" for v in violations])

    warnings: list[str] = []
    merged: dict[str, ClassDef] = {}
    order: list[str] = []
    for cls in current.classes:
        merged[cls.name] = cls
        order.append(cls.name)
    for cls in partial.classes:
        if cls.name in merged:
            merged[cls.name] = _merge_class(merged[cls.name], cls, warnings)
        else:
            merged[cls.name] = cls
            order.append(cls.name)

    cycle = _find_cycle(merged)
    if cycle:
        raise MergeError(["inheritance cycle: " + " -> ".join(cycle)])

    _drop_shadowed_features(merged, order, current, warnings)

    result = replace(current, classes=tuple(merged[n] for n in order))
    violations = validate(result)
    if violations:
        raise MergeError(violations)
    return MergeOutcome(result, tuple(warnings))
