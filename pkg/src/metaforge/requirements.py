"""Requirements intake: chunking and aspect-oriented retrieval.

Retrieval is deliberately lexical (case-insensitive keyword match on word
boundaries) so runs are reproducible; anything fancier plugs in through
the RetrievalProvider protocol.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

logger = logging.getLogger(__name__)

DEFAULT_MAX_CHUNK_CHARS = 1000
MIN_CHUNK_CHARS = 64

_PARAGRAPH_RE = re.compile(r"\n\s*\n")
_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")


@dataclass(frozen=True)
class RequirementChunk:
    ordinal: int
    text: str
    aspect: str | None = None


def _split_long_paragraph(paragraph: str, max_chars: int) -> list[str]:
    pieces: list[str] = []
    buffer = ""
    for sentence in _SENTENCE_RE.split(paragraph):
        sentence = sentence.strip()
        if not sentence:
            continue
        if len(sentence) > max_chars:
            if buffer:
                pieces.append(buffer)
                buffer = ""
            logger.warning("indivisible sentence of %d chars exceeds chunk limit %d; kept whole",
                           len(sentence), max_chars)
            pieces.append(sentence)
            continue
        candidate = f"{buffer} {sentence}" if buffer else sentence
        if len(candidate) > max_chars:
            pieces.append(buffer)
            buffer = sentence
        else:
            buffer = candidate
    if buffer:
        pieces.append(buffer)
    return pieces


def chunk(document: str, max_chunk_chars: int = DEFAULT_MAX_CHUNK_CHARS,
          aspect: str | None = None) -> list[RequirementChunk]:
    """Split a requirements document into ordered chunks.

    Paragraphs (blank-line separated) are the primary unit; a paragraph
    longer than max_chunk_chars is split on sentence boundaries instead.
    An empty document yields an empty list.
    """
    if max_chunk_chars < MIN_CHUNK_CHARS:
        raise ValueError(f"max_chunk_chars must be >= {MIN_CHUNK_CHARS}, got {max_chunk_chars}")
    texts: list[str] = []
    for paragraph in _PARAGRAPH_RE.split(document):
        paragraph = " ".join(part.strip() for part in paragraph.strip().split("\n") if part.strip())
        if not paragraph:
            continue
        if len(paragraph) <= max_chunk_chars:
            texts.append(paragraph)
        else:
            texts.extend(_split_long_paragraph(paragraph, max_chunk_chars))
    return [RequirementChunk(i, text, aspect) for i, text in enumerate(texts)]


def filter_by_aspect(chunks: Sequence[RequirementChunk],
                     aspect_keywords: Iterable[str]) -> list[RequirementChunk]:
    """Keep chunks whose text mentions at least one keyword (word-bounded,
    case-insensitive), preserving order. Duplicate keywords are harmless."""
    keywords = [k for k in dict.fromkeys(aspect_keywords) if k.strip()]
    if not keywords:
        raise ValueError("aspect_keywords must contain at least one keyword")
    patterns = [re.compile(rf"\b{re.escape(k.strip())}\b", re.IGNORECASE) for k in keywords]
    return [c for c in chunks if any(p.search(c.text) for p in patterns)]


class RetrievalProvider(Protocol):
    """Pluggable chunk retrieval; the shipped implementation is lexical."""

    def retrieve(self, chunks: Sequence[RequirementChunk],
                 aspect_keywords: Iterable[str]) -> list[RequirementChunk]: ...


class LexicalRetriever:
    def retrieve(self, chunks: Sequence[RequirementChunk],
                 aspect_keywords: Iterable[str]) -> list[RequirementChunk]:
        return filter_by_aspect(chunks, aspect_keywords)
