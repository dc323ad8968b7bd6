"""Scorer: matching semantics, Table fixtures, report formatting."""

from __future__ import annotations

import json

import pytest

from metaforge.ecore import parse_ecore
from metaforge.evaluation import compare, format_report, normalize_name, report_to_dict
from metaforge.model import (
    AttributeDef,
    ClassDef,
    Metamodel,
    ReferenceDef,
    ValueType,
)

from generators import corpus

TABLE3_EXPECTED = {
    "sensors": {"classes": (6, 6), "attributes": (15, 21), "compositions": (5, 5), "subclass": (6, 6)},
    "actuators": {"classes": (2, 2), "attributes": (3, 8), "compositions": (2, 2), "subclass": (0, 2)},
    "power": {"classes": (1, 1), "attributes": (3, 6), "compositions": (1, 1), "subclass": (0, 1)},
}


def load_pair(table3_dir, row):
    candidate = parse_ecore((table3_dir / f"{row}_candidate.ecore").read_text(encoding="utf-8")).metamodel
    reference = parse_ecore((table3_dir / f"{row}_reference.ecore").read_text(encoding="utf-8")).metamodel
    return candidate, reference


class TestCompare:
    def test_self_comparison_full_marks(self):
        for m in corpus(10):
            report = compare(m, m)
            for _, score in report.categories():
                assert score.matched == score.total
                assert score.missing == () and score.extra == ()

    @pytest.mark.parametrize("row", sorted(TABLE3_EXPECTED))
    def test_fixture_rows(self, table3_dir, row):
        candidate, reference = load_pair(table3_dir, row)
        report = compare(candidate, reference)
        want = TABLE3_EXPECTED[row]
        assert (report.classes.matched, report.classes.total) == want["classes"]
        assert (report.attributes.matched, report.attributes.total) == want["attributes"]
        assert (report.compositions.matched, report.compositions.total) == want["compositions"]
        assert (report.subclass_relations.matched, report.subclass_relations.total) == want["subclass"]

    def test_normalized_name_matching(self):
        candidate = Metamodel(classes=(ClassDef("power_management"),))
        reference = Metamodel(classes=(ClassDef("PowerManagement"),))
        report = compare(candidate, reference)
        assert report.classes.matched == 1
        assert report.classes.extra == ()

    def test_type_mismatch_counts_matched_with_note(self):
        candidate = Metamodel(classes=(
            ClassDef("A", attributes=(AttributeDef("x", ValueType.DOUBLE),)),
        ))
        reference = Metamodel(classes=(
            ClassDef("A", attributes=(AttributeDef("x", ValueType.INT),)),
        ))
        report = compare(candidate, reference)
        assert report.attributes.matched == 1
        assert any("type mismatch A.x" in note for note in report.notes)

    def test_extras_reported_but_not_counted(self):
        candidate = Metamodel(classes=(
            ClassDef("A", attributes=(AttributeDef("x"), AttributeDef("y"))),
            ClassDef("Spare"),
        ))
        reference = Metamodel(classes=(ClassDef("A", attributes=(AttributeDef("x"),)),))
        report = compare(candidate, reference)
        assert (report.classes.matched, report.classes.total) == (1, 1)
        assert report.classes.extra == ("Spare",)
        assert (report.attributes.matched, report.attributes.total) == (1, 1)
        assert report.attributes.extra == ("A.y",)

    def test_totals_depend_only_on_reference(self):
        reference = Metamodel(classes=(
            ClassDef("A", attributes=(AttributeDef("x"),), references=(
                ReferenceDef("b", "B", containment=True, upper_bound=-1),
            )),
            ClassDef("B", super_types=()),
            ClassDef("C", super_types=("B",)),
        ))
        for candidate in corpus(6):
            report = compare(candidate, reference)
            assert report.classes.total == 3
            assert report.attributes.total == 1
            assert report.compositions.total == 1
            assert report.subclass_relations.total == 1

    def test_removing_candidate_element_never_increases_matched(self):
        full = Metamodel(classes=(
            ClassDef("A", attributes=(AttributeDef("x"),)),
            ClassDef("B", super_types=("A",), references=(
                ReferenceDef("a", "A", containment=True, upper_bound=-1),
            )),
        ))
        baseline = compare(full, full)
        reduced = Metamodel(classes=(ClassDef("A", attributes=(AttributeDef("x"),)),))
        report = compare(reduced, full)
        for (_, after), (_, before) in zip(report.categories(), baseline.categories()):
            assert after.matched <= before.matched

    def test_abstract_reference_classes_are_scaffolding(self):
        reference = Metamodel(classes=(
            ClassDef("Base", is_abstract=True, attributes=(AttributeDef("id"),)),
            ClassDef("Leaf", super_types=("Base",)),
        ))
        candidate = Metamodel(classes=(
            ClassDef("Base", attributes=(AttributeDef("id"),)),
            ClassDef("Leaf", super_types=("Base",)),
        ))
        report = compare(candidate, reference)
        assert report.classes.total == 1          # only Leaf is concrete
        assert report.attributes.total == 1       # Base.id still counts
        assert report.subclass_relations.total == 1

    def test_empty_metamodels(self):
        report = compare(Metamodel(), Metamodel())
        for _, score in report.categories():
            assert score.cell() == "0/0"


class TestFormatReport:
    def test_self_comparison_cells(self):
        m = corpus(1)[0]
        text = format_report(compare(m, m))
        for _, score in compare(m, m).categories():
            assert f"{score.total}/{score.total}" in text

    def test_sensors_fixture_contains_15_21(self, table3_dir):
        candidate, reference = load_pair(table3_dir, "sensors")
        text = format_report(compare(candidate, reference))
        assert "15/21" in text
        assert "6/6" in text

    def test_empty_report_all_zero(self):
        text = format_report(compare(Metamodel(), Metamodel()))
        assert text.count("0/0") == 4

    def test_missing_and_extra_sections(self, table3_dir):
        candidate, reference = load_pair(table3_dir, "actuators")
        text = format_report(compare(candidate, reference))
        assert "missing attributes:" in text
        assert "missing subclass relations:" in text

    def test_deterministic(self, table3_dir):
        candidate, reference = load_pair(table3_dir, "power")
        assert format_report(compare(candidate, reference)) == format_report(compare(candidate, reference))


class TestReportJson:
    def test_shape_and_serializability(self, table3_dir):
        candidate, reference = load_pair(table3_dir, "sensors")
        payload = report_to_dict(compare(candidate, reference))
        round_tripped = json.loads(json.dumps(payload))
        assert round_tripped["attributes"]["matched"] == 15
        assert round_tripped["attributes"]["total"] == 21
        assert set(round_tripped) == {"classes", "attributes", "compositions", "subclassRelations", "notes"}


class TestNormalizeName:
    @pytest.mark.parametrize("a,b", [
        ("PowerManagement", "power_management"),
        ("GPS-Sensor", "GpsSensor"),
        ("radar", "Radar"),
    ])
    def test_equivalences(self, a, b):
        assert normalize_name(a) == normalize_name(b)
