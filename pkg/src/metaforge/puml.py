"""PlantUML class-diagram codec for the metamodel IR.

Supports a deliberate subset of the PlantUML grammar: class declarations
(optionally abstract, optionally with a field body), typed fields with
optional defaults, composition edges ("*--"), directed association edges
("-->", the textual form of a non-containment reference) and
generalization edges. The full grammar is written out in
docs/plantuml-grammar.ebnf.

Lenient mode (the default, meant for model text produced by an LLM) skips
unsupported constructs with a located warning; strict mode turns them into
errors. Emission is deterministic: canonically equal metamodels produce
byte-identical text, and parse(emit(m)) == canonicalize(m).
"""

from __future__ import annotations

import re

from .diagnostics import Diagnostic, ParseResult, SyntaxDiagnosticError
from .model import (
    AttributeDef,
    ClassDef,
    InvalidMetamodelError,
    Metamodel,
    ReferenceDef,
    ValueType,
    canonicalize,
    sanitize_identifier,
    validate,
)

class PumlSyntaxError(SyntaxDiagnosticError):
    """Input is not parseable PlantUML within the supported subset."""


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"

_CLASS_RE = re.compile(rf"(abstract\s+)?class\s+({_NAME})\s*(\{{\s*\}}|\{{)?\s*$")
_COMPOSITION_RE = re.compile(
    rf"({_NAME})\s*(?:\"([^\"]*)\")?\s*\*--\s*(?:\"([^\"]*)\")?\s*({_NAME})\s*(?::\s*(.+?))?\s*$"
)
_ASSOCIATION_RE = re.compile(
    rf"({_NAME})\s*(?:\"([^\"]*)\")?\s*-->\s*(?:\"([^\"]*)\")?\s*({_NAME})\s*(?::\s*(.+?))?\s*$"
)
_GENERALIZATION_LEFT_RE = re.compile(rf"({_NAME})\s*<\|--\s*({_NAME})\s*$")   # Super <|-- Sub
_GENERALIZATION_RIGHT_RE = re.compile(rf"({_NAME})\s*--\|>\s*({_NAME})\s*$")  # Sub --|> Super
_FIELD_RE = re.compile(r"[+\-#~]?\s*([A-Za-z_][A-Za-z0-9_ ]*?)\s*(?::\s*([A-Za-z_][A-Za-z0-9_]*))?\s*(?:=\s*(.+?))?\s*$")
_MULTIPLICITY_RE = re.compile(r"^(?:(\d+)(?:\s*\.\.\s*(\d+|\*))?|(\*))$")

# Case-insensitive aliases the LLMs tend to use for the five value types.
_TYPE_ALIASES = {
    "string": ValueType.STRING,
    "estring": ValueType.STRING,
    "str": ValueType.STRING,
    "int": ValueType.INT,
    "eint": ValueType.INT,
    "integer": ValueType.INT,
    "double": ValueType.DOUBLE,
    "edouble": ValueType.DOUBLE,
    "float": ValueType.FLOAT,
    "efloat": ValueType.FLOAT,
    "boolean": ValueType.BOOLEAN,
    "eboolean": ValueType.BOOLEAN,
    "bool": ValueType.BOOLEAN,
}


def coerce_value_type(raw: str) -> tuple[ValueType, bool]:
    """Map a type token to a ValueType; unknown types fall back to String.

    Returns the type and whether a fallback happened.
    """
    alias = _TYPE_ALIASES.get(raw.strip().lower())
    if alias is not None:
        return alias, False
    return ValueType.STRING, True


def default_reference_name(target_class: str) -> str:
    """Edge labels are optional in diagrams; Ecore names are not."""
    return target_class.lower() + "s"


def _parse_multiplicity(label: str) -> tuple[int, int] | None:
    match = _MULTIPLICITY_RE.match(label.strip())
    if not match:
        return None
    if match.group(3) == "*":
        return 0, -1
    lower = int(match.group(1))
    if match.group(2) is None:
        return lower, lower
    upper = -1 if match.group(2) == "*" else int(match.group(2))
    return lower, upper


class _Parser:
    def __init__(self, text: str, strict: bool, source: str | None):
        self.lines = text.split("\n")
        self.strict = strict
        self.source = source
        self.warnings: list[Diagnostic] = []
        self.violations: list[str] = []
        self.class_order: list[str] = []
        self.abstract: dict[str, bool] = {}
        self.attributes: dict[str, list[AttributeDef]] = {}
        self.references: dict[str, list[ReferenceDef]] = {}
        self.supers: dict[str, list[str]] = {}
        self.open_class: str | None = None

    def fail(self, message: str, line_no: int, column: int = 1):
        raise PumlSyntaxError(Diagnostic(message, line_no, column, severity="error"))

    def report(self, message: str, line_no: int, column: int = 1):
        if self.strict:
            self.fail(message, line_no, column)
        self.warnings.append(Diagnostic(message, line_no, column))

    def identifier(self, raw: str, what: str, line_no: int) -> str:
        clean = sanitize_identifier(raw)
        if clean != raw:
            self.warnings.append(Diagnostic(f"{what} '{raw}' sanitized to '{clean}'", line_no))
        return clean

    def declare_class(self, name: str, is_abstract: bool, line_no: int):
        if name in self.abstract:
            self.fail(f"duplicate declaration of class '{name}'", line_no)
        self.class_order.append(name)
        self.abstract[name] = is_abstract
        self.attributes[name] = []
        self.references[name] = []
        self.supers[name] = []

    def add_field(self, owner: str, line: str, line_no: int):
        column = len(line) - len(line.lstrip()) + 1
        body = line.strip()
        match = _FIELD_RE.match(body)
        if not match or "(" in body or ")" in body:
            self.report(f"unsupported construct in class body: '{body}'", line_no, column)
            return
        raw_name, raw_type, raw_default = match.groups()
        name = self.identifier(raw_name, "field name", line_no)
        if raw_type is None:
            value_type = ValueType.STRING
            self.warnings.append(Diagnostic(f"field '{name}' has no type; defaulting to String", line_no))
        else:
            value_type, fell_back = coerce_value_type(raw_type)
            if fell_back:
                self.warnings.append(
                    Diagnostic(f"field '{name}' has unknown type '{raw_type}'; defaulting to String", line_no)
                )
        if any(a.name == name for a in self.attributes[owner]):
            self.report(f"duplicate field '{name}' in class '{owner}'", line_no, column)
            return
        self.attributes[owner].append(AttributeDef(name, value_type, raw_default))

    def unique_reference_name(self, owner: str, base: str, line_no: int) -> str:
        taken = {r.name for r in self.references[owner]} | {a.name for a in self.attributes[owner]}
        if base not in taken:
            return base
        suffix = 2
        while f"{base}{suffix}" in taken:
            suffix += 1
        name = f"{base}{suffix}"
        self.warnings.append(
            Diagnostic(f"reference name '{base}' already used in '{owner}'; renamed to '{name}'", line_no)
        )
        return name

    def add_reference_edge(self, match: re.Match, containment: bool, line_no: int):
        source_raw, _source_mult, target_mult, target_raw, label = match.groups()
        source = self.identifier(source_raw, "class name", line_no)
        target = self.identifier(target_raw, "class name", line_no)
        # Unlabeled composition means "many parts"; a plain association
        # keeps the Ecore reference defaults.
        lower, upper = (0, -1) if containment else (0, 1)
        if target_mult:
            parsed = _parse_multiplicity(target_mult)
            if parsed is None:
                self.report(f"unparseable multiplicity '{target_mult}'", line_no)
            else:
                lower, upper = parsed
        name = self.identifier(label, "reference name", line_no) if label else default_reference_name(target)
        if source not in self.abstract:
            self.violations.append(f"class '{source}': edge on line {line_no} names an undeclared class")
            return
        name = self.unique_reference_name(source, name, line_no)
        self.references[source].append(
            ReferenceDef(name, target, containment=containment, lower_bound=lower, upper_bound=upper)
        )

    def add_generalization(self, super_name: str, sub_name: str, line_no: int):
        sup = self.identifier(super_name, "class name", line_no)
        sub = self.identifier(sub_name, "class name", line_no)
        if sub not in self.abstract:
            self.violations.append(f"class '{sub}': generalization on line {line_no} names an undeclared class")
            return
        if sup not in self.supers[sub]:
            self.supers[sub].append(sup)

    def parse(self) -> ParseResult:
        starts = [i for i, line in enumerate(self.lines) if line.strip() == "@startuml"]
        ends = [i for i, line in enumerate(self.lines) if line.strip() == "@enduml"]
        if len(starts) != 1 or len(ends) != 1 or ends[0] < starts[0]:
            self.fail("document must contain exactly one @startuml...@enduml block", 1)
        start, end = starts[0], ends[0]

        for i, line in enumerate(self.lines):
            if i < start or i > end:
                if line.strip():
                    self.report(f"content outside @startuml block: '{line.strip()}'", i + 1)

        for i in range(start + 1, end):
            line_no = i + 1
            raw = self.lines[i]
            stripped = raw.strip()
            if not stripped or stripped.startswith("'"):
                continue

            if self.open_class is not None:
                if stripped == "}":
                    self.open_class = None
                else:
                    self.add_field(self.open_class, raw, line_no)
                continue

            match = _CLASS_RE.match(stripped)
            if match:
                name = self.identifier(match.group(2), "class name", line_no)
                self.declare_class(name, bool(match.group(1)), line_no)
                if match.group(3) == "{":
                    self.open_class = name
                continue

            match = _COMPOSITION_RE.match(stripped)
            if match:
                self.add_reference_edge(match, True, line_no)
                continue

            match = _ASSOCIATION_RE.match(stripped)
            if match:
                self.add_reference_edge(match, False, line_no)
                continue

            match = _GENERALIZATION_LEFT_RE.match(stripped)
            if match:
                self.add_generalization(match.group(1), match.group(2), line_no)
                continue

            match = _GENERALIZATION_RIGHT_RE.match(stripped)
            if match:
                self.add_generalization(match.group(2), match.group(1), line_no)
                continue

            self.report(f"unsupported construct: '{stripped}'", line_no,
                        len(raw) - len(raw.lstrip()) + 1)

        if self.open_class is not None:
            self.fail(f"class '{self.open_class}' body never closed", end + 1)

        metamodel = Metamodel(classes=tuple(
            ClassDef(
                name=name,
                is_abstract=self.abstract[name],
                super_types=tuple(self.supers[name]),
                attributes=tuple(self.attributes[name]),
                references=tuple(self.references[name]),
            )
            for name in self.class_order
        ))
        violations = self.violations + validate(metamodel)
        if violations:
            raise InvalidMetamodelError(violations)
        return ParseResult(metamodel, tuple(self.warnings))


def parse_puml(text: str, *, strict: bool = False, source: str | None = None) -> ParseResult:
    """Parse PlantUML class-diagram text into a valid metamodel.

    Raises PumlSyntaxError (with line/column) on hard syntax problems and
    InvalidMetamodelError when the diagram references undeclared classes
    or otherwise breaks IR invariants.
    """
    return _Parser(text, strict, source).parse()


def _format_bounds(ref: ReferenceDef) -> str:
    upper = "*" if ref.upper_bound == -1 else str(ref.upper_bound)
    return f"{ref.lower_bound}..{upper}"


def emit_puml(m: Metamodel) -> str:
    """Deterministic PlantUML text for a valid metamodel.

    Classes come out in canonical order with sorted attribute bodies,
    followed by reference edges and generalization edges. Rasterizing the
    diagram is delegated to whatever renders the text.
    """
    canon = canonicalize(m)
    lines = ["@startuml"]
    for cls in canon.classes:
        keyword = "abstract class" if cls.is_abstract else "class"
        if cls.attributes:
            lines.append(f"{keyword} {cls.name} {{")
            for attr in cls.attributes:
                field = f"  {attr.name} : {attr.value_type.value}"
                if attr.default_value is not None:
                    field += f" = {attr.default_value}"
                lines.append(field)
            lines.append("}")
        else:
            lines.append(f"{keyword} {cls.name}")
    for cls in canon.classes:
        for ref in cls.references:
            edge = "*--" if ref.containment else "-->"
            lead = f'{cls.name} "1" ' if ref.containment else f"{cls.name} "
            lines.append(f'{lead}{edge} "{_format_bounds(ref)}" {ref.target_class} : {ref.name}')
    for cls in canon.classes:
        for sup in cls.super_types:
            lines.append(f"{sup} <|-- {cls.name}")
    lines.append("@enduml")
    return "\n".join(lines) + "\n"
