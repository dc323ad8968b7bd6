"""Ecore XMI codec: serialize the metamodel IR to .ecore documents and back.

The emitter writes the file byte-for-byte itself instead of going through
an XML library so the output is stable enough for golden-file comparison:
UTF-8 declaration, LF line endings, 2-space indentation, fixed attribute
order (xsi:type, name, abstract, eSuperTypes, eType, defaultValueLiteral,
containment, lowerBound, upperBound), XML attributes left out whenever
they equal the Ecore default (lowerBound 0, upperBound 1, containment
false). Parsing uses xml.etree and accepts the same subset; EOperation,
EEnum and EAnnotation content is skipped with a warning in lenient mode.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape

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

ECORE_NS = "http://www.eclipse.org/emf/2002/Ecore"
XMI_NS = "http://www.omg.org/XMI"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"

_XSI_TYPE = f"{{{XSI_NS}}}type"

_DATATYPE_FRAGMENT = {
    ValueType.STRING: "EString",
    ValueType.INT: "EInt",
    ValueType.DOUBLE: "EDouble",
    ValueType.FLOAT: "EFloat",
    ValueType.BOOLEAN: "EBoolean",
}
_FRAGMENT_DATATYPE = {v: k for k, v in _DATATYPE_FRAGMENT.items()}


class EcoreParseError(SyntaxDiagnosticError):
    """Input is not a readable .ecore document."""


def _attr(value: str) -> str:
    return escape(value, {'"': "&quot;"})


def emit_ecore(m: Metamodel) -> str:
    """Serialize a valid metamodel as an XMI 2.0 EPackage document."""
    canon = canonicalize(m)
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    out.append(
        '<ecore:EPackage xmi:version="2.0" '
        f'xmlns:xmi="{XMI_NS}" xmlns:xsi="{XSI_NS}" xmlns:ecore="{ECORE_NS}" '
        f'name="{_attr(canon.name)}" nsURI="{_attr(canon.ns_uri)}" nsPrefix="{_attr(canon.ns_prefix)}">'
    )
    for cls in canon.classes:
        head = f'  <eClassifiers xsi:type="ecore:EClass" name="{_attr(cls.name)}"'
        if cls.is_abstract:
            head += ' abstract="true"'
        if cls.super_types:
            refs = " ".join(f"#//{name}" for name in cls.super_types)
            head += f' eSuperTypes="{_attr(refs)}"'
        if not cls.attributes and not cls.references:
            out.append(head + "/>")
            continue
        out.append(head + ">")
        for attr in cls.attributes:
            line = (
                f'    <eStructuralFeatures xsi:type="ecore:EAttribute" name="{_attr(attr.name)}" '
                f'eType="ecore:EDataType {ECORE_NS}#//{_DATATYPE_FRAGMENT[attr.value_type]}"'
            )
            if attr.default_value is not None:
                line += f' defaultValueLiteral="{_attr(attr.default_value)}"'
            out.append(line + "/>")
        for ref in cls.references:
            line = (
                f'    <eStructuralFeatures xsi:type="ecore:EReference" name="{_attr(ref.name)}" '
                f'eType="#//{ref.target_class}"'
            )
            if ref.containment:
                line += ' containment="true"'
            if ref.lower_bound != 0:
                line += f' lowerBound="{ref.lower_bound}"'
            if ref.upper_bound != 1:
                line += f' upperBound="{ref.upper_bound}"'
            out.append(line + "/>")
        out.append("  </eClassifiers>")
    out.append("</ecore:EPackage>")
    return "\n".join(out) + "\n"


def _byte_offset(text: str, line: int, column: int) -> int:
    lines = text.split("\n")
    prefix = "\n".join(lines[: line - 1])
    offset = len(prefix.encode("utf-8"))
    if line > 1:
        offset += 1
    return offset + len(lines[line - 1][:column].encode("utf-8")) if line <= len(lines) else offset


def _fragment_name(raw: str) -> str | None:
    """Pull the classifier name out of an eType/eSuperTypes token."""
    token = raw.split()[-1] if raw.split() else raw
    if "#//" not in token:
        return None
    name = token.rsplit("#//", 1)[1]
    return name or None


class _EcoreReader:
    def __init__(self, text: str, strict: bool):
        self.text = text
        self.strict = strict
        self.warnings: list[Diagnostic] = []
        self.violations: list[str] = []

    def report(self, message: str):
        if self.strict:
            raise EcoreParseError(Diagnostic(message, severity="error"))
        self.warnings.append(Diagnostic(message))

    def identifier(self, raw: str, what: str) -> str:
        clean = sanitize_identifier(raw)
        if clean != raw:
            self.warnings.append(Diagnostic(f"{what} '{raw}' sanitized to '{clean}'"))
        return clean

    def read(self) -> ParseResult:
        try:
            root = ET.fromstring(self.text)
        except ET.ParseError as exc:
            line, column = exc.position
            raise EcoreParseError(Diagnostic(
                f"malformed XML: {exc.msg} (byte offset {_byte_offset(self.text, line, column)})",
                line, column + 1, severity="error",
            )) from exc

        if root.tag != f"{{{ECORE_NS}}}EPackage":
            raise EcoreParseError(Diagnostic(f"root element is '{root.tag}', expected ecore:EPackage", 1, 1, "error"))

        name = self.identifier(root.get("name", ""), "package name") if root.get("name") else Metamodel().name
        ns_uri = root.get("nsURI") or Metamodel().ns_uri
        ns_prefix = (
            self.identifier(root.get("nsPrefix", ""), "package nsPrefix")
            if root.get("nsPrefix") else Metamodel().ns_prefix
        )
        if not root.get("name"):
            self.warnings.append(Diagnostic("EPackage has no name; using default"))

        classes = []
        for child in root:
            if child.tag != "eClassifiers":
                self.report(f"unsupported package element '{child.tag}'")
                continue
            xsi_type = child.get(_XSI_TYPE, "")
            if xsi_type != "ecore:EClass":
                self.report(f"unsupported classifier type '{xsi_type or child.tag}'")
                continue
            classes.append(self.read_class(child))

        metamodel = Metamodel(name=name, ns_uri=ns_uri, ns_prefix=ns_prefix, classes=tuple(classes))
        violations = self.violations + validate(metamodel)
        if violations:
            raise InvalidMetamodelError(violations)
        return ParseResult(metamodel, tuple(self.warnings))

    def read_class(self, elem: ET.Element) -> ClassDef:
        name = self.identifier(elem.get("name", ""), "class name")
        supers = []
        for token in (elem.get("eSuperTypes") or "").split():
            sup = _fragment_name(token)
            if sup is None:
                self.violations.append(f"class '{name}': unparseable eSuperTypes token '{token}'")
            elif sup not in supers:
                supers.append(self.identifier(sup, "supertype name"))
        attributes: list[AttributeDef] = []
        references: list[ReferenceDef] = []
        for feat in elem:
            if feat.tag != "eStructuralFeatures":
                self.report(f"unsupported element '{feat.tag}' in class '{name}'")
                continue
            xsi_type = feat.get(_XSI_TYPE, "")
            if xsi_type == "ecore:EAttribute":
                attributes.append(self.read_attribute(feat, name))
            elif xsi_type == "ecore:EReference":
                ref = self.read_reference(feat, name)
                if ref is not None:
                    references.append(ref)
            else:
                self.report(f"unsupported feature type '{xsi_type}' in class '{name}'")
        return ClassDef(
            name=name,
            is_abstract=elem.get("abstract") == "true",
            super_types=tuple(supers),
            attributes=tuple(attributes),
            references=tuple(references),
        )

    def read_attribute(self, elem: ET.Element, owner: str) -> AttributeDef:
        name = self.identifier(elem.get("name", ""), f"attribute name in '{owner}'")
        fragment = _fragment_name(elem.get("eType") or "")
        value_type = _FRAGMENT_DATATYPE.get(fragment or "")
        if value_type is None:
            self.warnings.append(Diagnostic(
                f"class '{owner}', attribute '{name}': unknown eType "
                f"'{elem.get('eType') or '(missing)'}' mapped to String"
            ))
            value_type = ValueType.STRING
        return AttributeDef(name, value_type, elem.get("defaultValueLiteral"))

    def read_reference(self, elem: ET.Element, owner: str) -> ReferenceDef | None:
        name = self.identifier(elem.get("name", ""), f"reference name in '{owner}'")
        target = _fragment_name(elem.get("eType") or "")
        if target is None:
            self.violations.append(
                f"class '{owner}', reference '{name}': unresolvable eType '{elem.get('eType') or '(missing)'}'"
            )
            return None
        try:
            lower = int(elem.get("lowerBound", "0"))
            upper = int(elem.get("upperBound", "1"))
        except ValueError:
            self.violations.append(f"class '{owner}', reference '{name}': non-integer bounds")
            return None
        return ReferenceDef(
            name=name,
            target_class=self.identifier(target, "reference target"),
            containment=elem.get("containment") == "true",
            lower_bound=lower,
            upper_bound=upper,
        )


def parse_ecore(text: str, *, strict: bool = False) -> ParseResult:
    """Parse an .ecore document into a valid metamodel.

    Inverse of emit_ecore on the supported subset. Raises EcoreParseError
    for malformed XML (message carries line/column and byte offset) and
    InvalidMetamodelError when fragments do not resolve or IR invariants
    fail.
    """
    return _EcoreReader(text, strict).read()
