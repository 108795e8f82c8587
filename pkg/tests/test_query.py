from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incite.cue import SearchMode, parse_cue
from incite.query import (
    DEFAULT_FIELDS,
    SORT_CITATIONS,
    SORT_RELEVANCE,
    AdsQuery,
    build_query,
    widen_query,
)

YEAR = 2026


class TestBuildQuery:
    def test_contextual_author_year(self):
        q = build_query(parse_cue("Shariat25", SearchMode.CONTEXTUAL, YEAR))
        assert q.q == 'author:"Shariat" year:2025'
        assert q.rows == 50
        assert q.sort == SORT_RELEVANCE

    def test_ads_query_verbatim(self):
        q = build_query(parse_cue('title:"emcee"', SearchMode.CONTEXTUAL, YEAR))
        assert q.q == 'title:"emcee"'
        assert q.sort == SORT_RELEVANCE

    def test_simple_with_initial_sorts_by_citations(self):
        q = build_query(parse_cue("SmithJ25", SearchMode.SIMPLE, YEAR))
        assert q.q == 'author:"Smith, J" year:2025'
        assert q.sort == SORT_CITATIONS

    def test_collaboration_quoted_whole(self):
        q = build_query(parse_cue("Gaia Collaboration2021", SearchMode.CONTEXTUAL, YEAR))
        assert q.q == 'author:"Gaia Collaboration" year:2021'

    def test_no_year_omits_clause(self):
        q = build_query(parse_cue("Abbott", SearchMode.CONTEXTUAL, YEAR))
        assert q.q == 'author:"Abbott"'

    def test_required_fields_always_requested(self):
        q = build_query(parse_cue("Abbott", SearchMode.CONTEXTUAL, YEAR))
        for name in ("bibcode", "author", "year", "title", "abstract", "citation_count", "pub"):
            assert name in q.fields

    def test_rows_bounds_enforced(self):
        with pytest.raises(ValueError):
            AdsQuery(q="x", rows=0)
        with pytest.raises(ValueError):
            AdsQuery(q="x", rows=201)


class TestWidenQuery:
    def setup_method(self):
        self.cue = parse_cue("SmithJ25", SearchMode.SIMPLE, YEAR)
        self.base = build_query(self.cue)

    def test_attempt_1_widens_year_range(self):
        wider = widen_query(self.base, self.cue, 1)
        assert wider.q == 'author:"Smith, J" year:[2024 TO 2026]'
        assert wider.sort == self.base.sort

    def test_attempt_2_drops_year(self):
        wider = widen_query(self.base, self.cue, 2)
        assert wider.q == 'author:"Smith, J"'

    def test_attempt_3_drops_initial(self):
        wider = widen_query(self.base, self.cue, 3)
        assert wider.q == 'author:"Smith"'

    def test_attempt_4_has_no_wider_query(self):
        assert widen_query(self.base, self.cue, 4) is None

    def test_ads_queries_never_widened(self):
        cue = parse_cue('title:"emcee"', SearchMode.CONTEXTUAL, YEAR)
        assert widen_query(build_query(cue), cue, 1) is None


# ---- properties --------------------------------------------------------

_names = st.from_regex(r"[A-Z][a-z]{1,10}", fullmatch=True)
_terms = st.lists(st.from_regex(r"[a-z]{4,10}", fullmatch=True), min_size=1, max_size=5)


@settings(max_examples=200, deadline=None)
@given(_names, st.one_of(st.none(), st.integers(min_value=1900, max_value=2027)), _terms)
def test_context_terms_never_enter_query(surname, year, terms):
    raw = f"{surname}{year}" if year else surname
    cue = parse_cue(raw, SearchMode.CONTEXTUAL, YEAR)
    q = build_query(cue)
    # the query is a pure function of the cue: only author/year clauses
    assert q.q.startswith('author:"')
    for term in terms:
        if term not in (cue.surname or "").lower():
            assert term not in q.q
    assert build_query(cue) == q  # deterministic
