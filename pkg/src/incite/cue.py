"""Parse a rough citation placeholder into a structured cue.

A placeholder like ``SmithJ25`` encodes surname, first initial and year;
tokens carrying ADS field syntax (``title:"emcee"``) are passed through
verbatim as literal queries.
"""

from __future__ import annotations

import datetime
import enum
import re
from dataclasses import dataclass
from typing import Optional

from .errors import BadYear, EmptyCue

MIN_YEAR = 1800


class SearchMode(enum.Enum):
    CONTEXTUAL = "contextual"
    SIMPLE = "simple"
    ADS_QUERY = "ads"


ADS_FIELD_PREFIXES = (
    "author",
    "title",
    "abstract",
    "year",
    "bibcode",
    "doi",
    "full",
    "first_author",
)

_FIELD_SYNTAX_RE = re.compile(
    r"(?:^|[\s(])(?:" + "|".join(ADS_FIELD_PREFIXES) + r"):", re.IGNORECASE
)
_QUOTED_PHRASE_RE = re.compile(r'"[^"]*"')
_TRAILING_DIGITS_RE = re.compile(r"(\d+)$")
_INITIAL_RE = re.compile(r"[a-z]([A-Z])$")


@dataclass(frozen=True)
class CitationCue:
    raw: str
    mode: SearchMode
    surname: Optional[str] = None
    initial: Optional[str] = None
    year: Optional[int] = None
    is_collaboration: bool = False
    ads_query: Optional[str] = None


def expand_year(digits: str, current_year: int | None = None) -> int:
    """Map a 2- or 4-digit year string to a full year.

    Two-digit YY becomes 2000+YY unless that lies beyond next year, in
    which case it becomes 1900+YY.
    """
    if not re.fullmatch(r"\d{2}|\d{4}", digits):
        raise BadYear(f"expected 2 or 4 digits, got {digits!r}")
    if len(digits) == 4:
        return int(digits)
    now = current_year if current_year is not None else datetime.date.today().year
    candidate = 2000 + int(digits)
    return candidate if candidate <= now + 1 else 1900 + int(digits)


def has_ads_syntax(raw: str) -> bool:
    return bool(_FIELD_SYNTAX_RE.search(raw) or _QUOTED_PHRASE_RE.search(raw))


def parse_cue(
    raw: str,
    requested_mode: SearchMode = SearchMode.CONTEXTUAL,
    current_year: int | None = None,
) -> CitationCue:
    """Decompose a placeholder key into surname / initial / year, or detect
    a literal ADS query (which overrides the requested mode)."""
    token = raw.strip()
    if not token:
        raise EmptyCue("citation key is empty")

    if requested_mode is SearchMode.ADS_QUERY or has_ads_syntax(token):
        return CitationCue(raw=token, mode=SearchMode.ADS_QUERY, ads_query=token)

    now = current_year if current_year is not None else datetime.date.today().year
    name = token
    year: Optional[int] = None
    digit_match = _TRAILING_DIGITS_RE.search(name)
    if digit_match:
        digits = digit_match.group(1)
        if len(digits) == 2:
            year = expand_year(digits, now)
            name = name[: digit_match.start()].rstrip()
        elif len(digits) == 4 and MIN_YEAR <= int(digits) <= now + 1:
            year = int(digits)
            name = name[: digit_match.start()].rstrip()

    initial: Optional[str] = None
    if name and " " not in name:
        initial_match = _INITIAL_RE.search(name)
        if initial_match:
            initial = initial_match.group(1)
            name = name[: initial_match.start() + 1]

    if not name:
        raise EmptyCue(f"no surname in citation key {token!r}")

    words = name.split()
    is_collaboration = bool(words) and words[-1].lower() == "collaboration"
    return CitationCue(
        raw=token,
        mode=requested_mode,
        surname=name,
        initial=initial,
        year=year,
        is_collaboration=is_collaboration,
    )
