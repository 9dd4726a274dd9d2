"""Tag-structured response parsing.

Responses are expected to follow a three-block template::

    <factual>...</factual><thinking>...</thinking><answering>...</answering>

This module decomposes a raw response into those blocks and extracts the
evidence the reward functions consume: causal-stage keywords, predicted
time segments, multiple-choice letters, and a whitespace token count.
All functions are pure and total; malformed input never raises.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

TAG_NAMES = ("factual", "thinking", "answering")

#: Mandatory causal-reasoning stage markers looked up inside <thinking>.
#: Matching is case-sensitive exact substring.
CAUSAL_KEYWORDS = frozenset(
    {
        "Global Search",
        "Causal Verification",
        "Final Alignment",
        "Antecedent",
        "Visual Verification",
        "Consequence",
    }
)

_BLOCK_RE = re.compile(
    r"<factual>(.*?)</factual>"
    r".*?<thinking>(.*?)</thinking>"
    r".*?<answering>(.*?)</answering>",
    re.DOTALL,
)

# Unsigned floats only: a leading "-" is always a separator, never a sign,
# so "3-8" parses as the pair (3, 8).
_NUMBER = r"(?:\d+\.\d+|\d+|\.\d+)"
_SEGMENT_RE = re.compile(rf"({_NUMBER})\s*(?:to|-|,)\s*({_NUMBER})")

_CHOICE_RE = re.compile(r"\b([ABCD])\b")


@dataclass(frozen=True)
class ParsedResponse:
    """A response decomposed into its factual/thinking/answering blocks.

    ``basic_pattern_ok`` is true iff all three blocks appear in order;
    when it is false all block fields are ``None``. ``tags_unique`` is
    true iff each opening and closing tag occurs exactly once in the raw
    text. ``token_length`` counts whitespace-delimited tokens of the full
    response.
    """

    raw_text: str
    factual_block: Optional[str]
    thinking_block: Optional[str]
    answering_block: Optional[str]
    basic_pattern_ok: bool
    tags_unique: bool
    token_length: int


@dataclass(frozen=True)
class TimeSegment:
    """A time interval in seconds with ``end >= start >= 0``."""

    start: float
    end: float

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError(f"segment start must be nonnegative, got {self.start}")
        if self.end < self.start:
            raise ValueError(f"segment end {self.end} precedes start {self.start}")

    @property
    def length(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class KeywordReport:
    """Partition of the mandatory keyword set into found and not-found."""

    present: frozenset[str]
    missing: frozenset[str]

    @property
    def complete(self) -> bool:
        return not self.missing


def parse_response(text: str) -> ParsedResponse:
    """Decompose ``text`` into blocks and structural flags.

    Never raises: text that does not match the three-block pattern yields
    ``basic_pattern_ok=False`` with all blocks absent.
    """
    match = _BLOCK_RE.search(text)
    tags_unique = all(
        text.count(f"<{name}>") == 1 and text.count(f"</{name}>") == 1
        for name in TAG_NAMES
    )
    if match is None:
        factual = thinking = answering = None
    else:
        factual, thinking, answering = match.group(1), match.group(2), match.group(3)
    return ParsedResponse(
        raw_text=text,
        factual_block=factual,
        thinking_block=thinking,
        answering_block=answering,
        basic_pattern_ok=match is not None,
        tags_unique=tags_unique,
        token_length=len(text.split()),
    )


def render_response(factual: str, thinking: str, answering: str) -> str:
    """Render blocks back into the tag template (inverse of parse_response
    for block content that does not itself contain the tags)."""
    return (
        f"<factual>{factual}</factual>"
        f"<thinking>{thinking}</thinking>"
        f"<answering>{answering}</answering>"
    )


def check_causal_keywords(thinking_block: str) -> KeywordReport:
    """Report which mandatory causal keywords occur in the thinking block.

    A keyword counts as present iff it occurs as a case-sensitive
    substring.
    """
    present = frozenset(k for k in CAUSAL_KEYWORDS if k in thinking_block)
    return KeywordReport(present=present, missing=CAUSAL_KEYWORDS - present)


def extract_segments(answering_block: str) -> list[TimeSegment]:
    """Extract predicted time segments from free-form answer text.

    Matches every ``<number> <sep> <number>`` pair with separator "to",
    "-", or ",", in bracketed or plain form. Pairs whose end precedes
    their start are dropped. Order of appearance is preserved;
    unparseable text yields an empty list.
    """
    segments = []
    for m in _SEGMENT_RE.finditer(answering_block):
        start, end = float(m.group(1)), float(m.group(2))
        if end < start:
            continue
        segments.append(TimeSegment(start, end))
    return segments


def extract_choice(answering_block: str) -> Optional[str]:
    """Return the first standalone A/B/C/D letter, or None.

    The letter must be word-boundary delimited; trailing "." or ")" is
    naturally allowed.
    """
    m = _CHOICE_RE.search(answering_block)
    return m.group(1) if m else None
