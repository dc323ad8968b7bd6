"""Chunking and lexical aspect retrieval."""

from __future__ import annotations

import re

import pytest

from metaforge.requirements import (
    LexicalRetriever,
    RequirementChunk,
    chunk,
    filter_by_aspect,
)


def strip_ws(text: str) -> str:
    return re.sub(r"\s+", "", text)


class TestChunk:
    def test_empty_document(self):
        assert chunk("") == []
        assert chunk("   \n\n  ") == []

    def test_single_short_paragraph(self):
        chunks = chunk("The vehicle shall have a camera.", 512)
        assert len(chunks) == 1
        assert chunks[0].ordinal == 0
        assert chunks[0].text == "The vehicle shall have a camera."

    def test_nineteen_requirements_fixture(self, scenario_dir):
        text = (scenario_dir / "01_sensors.txt").read_text(encoding="utf-8")
        assert len(chunk(text)) == 19

    def test_ordinals_dense_and_ordered(self):
        doc = "First requirement.\n\nSecond requirement.\n\nThird requirement."
        chunks = chunk(doc)
        assert [c.ordinal for c in chunks] == [0, 1, 2]
        assert [c.text for c in chunks] == ["First requirement.", "Second requirement.", "Third requirement."]

    def test_long_paragraph_splits_on_sentences(self):
        sentences = [f"Requirement number {i} covers a distinct aspect of the system." for i in range(10)]
        doc = " ".join(sentences)
        chunks = chunk(doc, 128)
        assert len(chunks) > 1
        assert all(len(c.text) <= 128 for c in chunks)

    def test_indivisible_sentence_kept_whole(self):
        doc = "x" * 300  # no sentence boundary at all
        chunks = chunk(doc, 64)
        assert len(chunks) == 1
        assert chunks[0].text == doc

    def test_content_preserved(self):
        doc = ("Alpha requirement one. Beta requirement two.\n\n"
               "Gamma paragraph here.\n\nDelta closes the document.")
        chunks = chunk(doc, 64)
        assert strip_ws("".join(c.text for c in chunks)) == strip_ws(doc)

    def test_minimum_chunk_size_enforced(self):
        with pytest.raises(ValueError):
            chunk("anything", 32)

    def test_deterministic(self):
        doc = "One.\n\nTwo.\n\nThree paragraphs of text."
        assert chunk(doc) == chunk(doc)

    def test_aspect_tag_applied(self):
        chunks = chunk("The radar shall work.", aspect="sensors")
        assert chunks[0].aspect == "sensors"


class TestFilterByAspect:
    CHUNKS = [
        RequirementChunk(0, "The radar range shall be configurable."),
        RequirementChunk(1, "Brakes actuate within 100 ms."),
        RequirementChunk(2, "A sensor cluster hosts the lidar."),
        RequirementChunk(3, "Passenger comfort is paramount."),
    ]

    def test_absent_keyword_matches_nothing(self):
        assert filter_by_aspect(self.CHUNKS, ["zzz-absent"]) == []

    def test_keyword_hits(self):
        got = filter_by_aspect(self.CHUNKS, ["sensor", "radar"])
        assert [c.ordinal for c in got] == [0, 2]

    def test_case_insensitive_word_boundaries(self):
        got = filter_by_aspect(self.CHUNKS, ["RADAR"])
        assert [c.ordinal for c in got] == [0]
        # "sens" must not match inside "sensor"
        assert filter_by_aspect(self.CHUNKS, ["sens"]) == []

    def test_duplicates_equal_deduplicated(self):
        keywords = ["sensor", "sensor", "radar"]
        assert filter_by_aspect(self.CHUNKS, keywords) == filter_by_aspect(self.CHUNKS, ["sensor", "radar"])

    def test_result_is_subsequence(self):
        got = filter_by_aspect(self.CHUNKS, ["the", "a"])
        ordinals = [c.ordinal for c in got]
        assert ordinals == sorted(ordinals)
        assert all(c in self.CHUNKS for c in got)

    def test_empty_keywords_rejected(self):
        with pytest.raises(ValueError):
            filter_by_aspect(self.CHUNKS, [])

    def test_retriever_protocol_object(self):
        retriever = LexicalRetriever()
        assert retriever.retrieve(self.CHUNKS, ["lidar"]) == [self.CHUNKS[2]]
