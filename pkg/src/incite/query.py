"""Build ADS/SciX Solr-style queries from citation cues.

Sentence-context terms never enter the query string: retrieval stays broad
(author + year only) and all contextual logic happens client-side in the
ranker, so server behavior stays predictable and testable offline.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .cue import CitationCue, SearchMode

SORT_RELEVANCE = "score desc"
SORT_CITATIONS = "citation_count desc"
DEFAULT_ROWS = 50
MAX_ROWS = 200

DEFAULT_FIELDS: tuple[str, ...] = (
    "bibcode",
    "author",
    "year",
    "title",
    "abstract",
    "citation_count",
    "pub",
    "doi",
)


@dataclass(frozen=True)
class AdsQuery:
    q: str
    sort: str = SORT_RELEVANCE
    rows: int = DEFAULT_ROWS
    fields: tuple[str, ...] = field(default=DEFAULT_FIELDS)

    def __post_init__(self) -> None:
        if not 1 <= self.rows <= MAX_ROWS:
            raise ValueError(f"rows must be in [1, {MAX_ROWS}], got {self.rows}")


def _author_clause(cue: CitationCue, with_initial: bool = True) -> str:
    name = cue.surname or ""
    if with_initial and cue.initial:
        name = f"{name}, {cue.initial}"
    return f'author:"{name}"'


def _compose(cue: CitationCue, *, with_initial: bool, year: Optional[str]) -> str:
    clauses = [_author_clause(cue, with_initial)]
    if year:
        clauses.append(year)
    return " ".join(clauses)


def build_query(cue: CitationCue) -> AdsQuery:
    """Concrete API query for a cue; retrieval is any-author-position broad,
    first-author preference is the ranker's job."""
    if cue.mode is SearchMode.ADS_QUERY:
        return AdsQuery(q=cue.ads_query or "", sort=SORT_RELEVANCE)
    year = f"year:{cue.year}" if cue.year is not None else None
    sort = SORT_CITATIONS if cue.mode is SearchMode.SIMPLE else SORT_RELEVANCE
    return AdsQuery(q=_compose(cue, with_initial=True, year=year), sort=sort)


def widen_query(prev: AdsQuery, cue: CitationCue, attempt: int) -> Optional[AdsQuery]:
    """Fallback ladder for empty result sets.

    Attempt 1 widens the year to a +/-1 range, attempt 2 drops the year,
    attempt 3 drops the initial as well; anything beyond has no wider
    query. Literal ADS queries are never widened. Rungs that do not change
    the query (cue without year/initial) come back equal to ``prev``;
    callers should skip those.
    """
    if cue.mode is SearchMode.ADS_QUERY or attempt > 3:
        return None
    if attempt == 1:
        if cue.year is not None:
            year = f"year:[{cue.year - 1} TO {cue.year + 1}]"
        else:
            year = None
        q = _compose(cue, with_initial=True, year=year)
    elif attempt == 2:
        q = _compose(cue, with_initial=True, year=None)
    else:
        q = _compose(cue, with_initial=False, year=None)
    return replace(prev, q=q)
