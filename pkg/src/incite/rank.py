"""Deterministic rule-based ordering of candidate records.

No model inference anywhere: scores decompose into author-position, year,
initial, sentence-context overlap and a capped popularity term, and the
full ordering is a pure function of (cue, context, candidates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .ads import AdsRecord
from .cue import CitationCue, SearchMode
from .texscan import SentenceContext
from .textnorm import fold, tokenize_words


@dataclass(frozen=True)
class ScoreWeights:
    """Default weights are frozen; override via config only."""

    first_author: float = 40.0
    other_author: float = 10.0
    year_exact: float = 20.0
    year_adjacent: float = 12.0
    initial: float = 8.0
    context_max: float = 20.0
    popularity_cap: float = 5.0


DEFAULT_WEIGHTS = ScoreWeights()


@dataclass(frozen=True)
class ScoredCandidate:
    record: AdsRecord
    s_author: float
    s_year: float
    s_initial: float
    s_context: float
    s_popularity: float

    @property
    def total(self) -> float:
        return self.s_author + self.s_year + self.s_initial + self.s_context + self.s_popularity


def _author_surname(author: str) -> str:
    return author.split(",", 1)[0].strip()


def _author_initial(author: str) -> Optional[str]:
    _, _, rest = author.partition(",")
    for ch in rest:
        if ch.isalpha():
            return ch
    return None


def _match_author(cue: CitationCue, authors: Sequence[str], require_initial: bool) -> Optional[int]:
    """Index of the first author matching the cue surname, or None.

    Collaboration cues match as a folded substring of the author entry
    (ADS lists e.g. "Gaia Collaboration" as an author); plain surnames
    must equal the author's surname after diacritic folding.
    """
    target = fold(cue.surname or "")
    if not target:
        return None
    for i, author in enumerate(authors):
        if cue.is_collaboration:
            hit = target in fold(author)
        else:
            hit = fold(_author_surname(author)) == target
        if not hit:
            continue
        if require_initial and cue.initial:
            got = _author_initial(author)
            if got is None or fold(got) != fold(cue.initial):
                continue
        return i
    return None


def context_overlap(ctx: Optional[SentenceContext], record: AdsRecord) -> float:
    """Fraction of distinct context terms present in title+abstract tokens."""
    if ctx is None or not ctx.terms:
        return 0.0
    terms = set(ctx.terms)
    record_tokens = set(tokenize_words(f"{record.title or ''} {record.abstract or ''}"))
    return len(terms & record_tokens) / max(1, len(terms))


def _score(
    cue: CitationCue,
    ctx: Optional[SentenceContext],
    record: AdsRecord,
    weights: ScoreWeights,
) -> ScoredCandidate:
    matched = _match_author(cue, record.authors, require_initial=False)
    if matched is None:
        s_author = 0.0
    elif matched == 0:
        s_author = weights.first_author
    else:
        s_author = weights.other_author

    s_initial = 0.0
    if cue.initial and matched is not None:
        got = _author_initial(record.authors[matched])
        if got is not None and fold(got) == fold(cue.initial):
            s_initial = weights.initial

    if cue.year is None:
        s_year = weights.year_exact  # unconstrained
    elif record.year == cue.year:
        s_year = weights.year_exact
    elif abs(record.year - cue.year) == 1:
        s_year = weights.year_adjacent
    else:
        s_year = 0.0

    s_context = weights.context_max * context_overlap(ctx, record)
    s_popularity = min(
        weights.popularity_cap, math.log10(1 + max(0, record.citation_count))
    )
    return ScoredCandidate(
        record=record,
        s_author=s_author,
        s_year=s_year,
        s_initial=s_initial,
        s_context=s_context,
        s_popularity=s_popularity,
    )


def _matches_simple(cue: CitationCue, record: AdsRecord) -> bool:
    if _match_author(cue, record.authors, require_initial=True) is None:
        return False
    if cue.year is not None and record.year != cue.year:
        return False
    return True


def rank(
    cue: CitationCue,
    ctx: Optional[SentenceContext],
    candidates: Iterable[AdsRecord],
    weights: ScoreWeights = DEFAULT_WEIGHTS,
) -> list[ScoredCandidate]:
    """Order candidates for the picker.

    Contextual: scored by the full decomposition, sorted by total, then
    citation count, then bibcode. Simple: hard-filtered on surname
    (+initial) and exact year, sorted by citation count alone. Literal
    ADS queries preserve server order with zero scores.
    """
    records = list(candidates)
    if cue.mode is SearchMode.ADS_QUERY:
        return [
            ScoredCandidate(r, 0.0, 0.0, 0.0, 0.0, 0.0)
            for r in records
        ]
    scored = [_score(cue, ctx, r, weights) for r in records]
    if cue.mode is SearchMode.SIMPLE:
        kept = [sc for sc in scored if _matches_simple(cue, sc.record)]
        kept.sort(key=lambda sc: (-sc.record.citation_count, sc.record.bibcode))
        return kept
    scored.sort(key=lambda sc: (-sc.total, -sc.record.citation_count, sc.record.bibcode))
    return scored
