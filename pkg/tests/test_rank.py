from __future__ import annotations

import math
import random

from incite.ads import AdsRecord
from incite.cue import SearchMode, parse_cue
from incite.rank import context_overlap, rank
from incite.texscan import SentenceContext

YEAR = 2026


def record(bibcode, authors, year, citations=0, title="", abstract=None):
    return AdsRecord(
        bibcode=bibcode,
        title=title,
        authors=tuple(authors),
        year=year,
        citation_count=citations,
        abstract=abstract,
    )


def ctx(*terms):
    return SentenceContext(raw=" ".join(terms), terms=tuple(terms))


class TestContextualMode:
    def test_first_author_beats_later_author(self):
        cue = parse_cue("Shariat25", SearchMode.CONTEXTUAL, YEAR)
        first = record("2025A", ["Shariat, C."], 2025, citations=0)
        later = record("2025B", ["Naoz, S.", "Li, G.", "Shariat, C."], 2025, citations=50000)
        result = rank(cue, None, [later, first])
        assert [sc.record.bibcode for sc in result] == ["2025A", "2025B"]
        # 40 vs 10 dominates the popularity cap of 5
        assert result[0].total - result[1].total >= 30 - 5

    def test_context_promotes_topical_paper(self):
        cue = parse_cue("Shariat25", SearchMode.CONTEXTUAL, YEAR)
        topical = record(
            "2025T",
            ["Shariat, C."],
            2025,
            citations=12,
            title="Wide Stellar Triples Drive White Dwarf Mergers",
        )
        other = record(
            "2025O", ["Shariat, C."], 2025, citations=30, title="Compact Binary Orbital Decay"
        )
        sentence = ctx("triples", "drive", "mergers")
        result = rank(cue, sentence, [other, topical])
        assert result[0].record.bibcode == "2025T"
        assert result[0].s_context == 20.0

    def test_year_scoring(self):
        cue = parse_cue("Doe20", SearchMode.CONTEXTUAL, YEAR)
        exact = record("A", ["Doe, J."], 2020)
        adjacent = record("B", ["Doe, J."], 2021)
        far = record("C", ["Doe, J."], 2010)
        scored = {sc.record.bibcode: sc for sc in rank(cue, None, [exact, adjacent, far])}
        assert scored["A"].s_year == 20
        assert scored["B"].s_year == 12
        assert scored["C"].s_year == 0

    def test_no_year_cue_leaves_year_unconstrained(self):
        cue = parse_cue("Abbott", SearchMode.CONTEXTUAL, YEAR)
        result = rank(cue, None, [record("A", ["Abbott, B. P."], 2016)])
        assert result[0].s_year == 20

    def test_initial_bonus_applies_to_matched_author(self):
        cue = parse_cue("SmithJ25", SearchMode.CONTEXTUAL, YEAR)
        jane = record("A", ["Smith, Jane"], 2025)
        aaron = record("B", ["Smith, Aaron"], 2025)
        scored = {sc.record.bibcode: sc for sc in rank(cue, None, [jane, aaron])}
        assert scored["A"].s_initial == 8
        assert scored["B"].s_initial == 0

    def test_diacritics_fold_in_author_match(self):
        cue = parse_cue("Garcia21", SearchMode.CONTEXTUAL, YEAR)
        result = rank(cue, None, [record("A", ["García, M."], 2021)])
        assert result[0].s_author == 40

    def test_collaboration_substring_match(self):
        cue = parse_cue("Gaia Collaboration2021", SearchMode.CONTEXTUAL, YEAR)
        result = rank(cue, None, [record("A", ["Gaia Collaboration", "Brown, A."], 2021)])
        assert result[0].s_author == 40

    def test_tie_breaks_by_citations_then_bibcode(self):
        cue = parse_cue("Doe20", SearchMode.CONTEXTUAL, YEAR)
        a = record("2025A", ["Doe, J."], 2020, citations=10)
        b = record("2025B", ["Doe, J."], 2020, citations=10)
        assert [sc.record.bibcode for sc in rank(cue, None, [b, a])] == ["2025A", "2025B"]

    def test_popularity_capped_at_five(self):
        cue = parse_cue("Doe20", SearchMode.CONTEXTUAL, YEAR)
        result = rank(cue, None, [record("A", ["Doe, J."], 2020, citations=10_000_000)])
        assert result[0].s_popularity == 5.0


class TestSimpleMode:
    def test_sorted_by_citation_count(self):
        cue = parse_cue("Smith25", SearchMode.SIMPLE, YEAR)
        records = [
            record("S1", ["Smith, Jane"], 2025, citations=45),
            record("S2", ["Smith, Aaron"], 2025, citations=120),
            record("S3", ["Doe, R.", "Smith, Bob"], 2025, citations=7),
        ]
        result = rank(cue, None, records)
        assert [sc.record.citation_count for sc in result] == [120, 45, 7]

    def test_brute_force_sort_oracle(self):
        cue = parse_cue("Smith25", SearchMode.SIMPLE, YEAR)
        rng = random.Random(7)
        records = [
            record(f"B{i:03d}", ["Smith, X."], 2025, citations=rng.randrange(0, 500))
            for i in range(30)
        ]
        expected = sorted(records, key=lambda r: (-r.citation_count, r.bibcode))
        got = [sc.record for sc in rank(cue, None, records)]
        assert got == expected

    def test_filters_on_year_and_initial(self):
        cue = parse_cue("SmithJ25", SearchMode.SIMPLE, YEAR)
        keep = record("A", ["Smith, J."], 2025)
        wrong_year = record("B", ["Smith, J."], 2024)
        wrong_initial = record("C", ["Smith, A."], 2025)
        result = rank(cue, None, [keep, wrong_year, wrong_initial])
        assert [sc.record.bibcode for sc in result] == ["A"]

    def test_any_author_position_matches(self):
        cue = parse_cue("Smith25", SearchMode.SIMPLE, YEAR)
        result = rank(cue, None, [record("A", ["Doe, R.", "Smith, B."], 2025)])
        assert len(result) == 1


class TestAdsQueryMode:
    def test_server_order_preserved_scores_zero(self):
        cue = parse_cue('title:"emcee"', SearchMode.CONTEXTUAL, YEAR)
        records = [record("Z", [], 2013), record("A", [], 2014)]
        result = rank(cue, None, records)
        assert [sc.record.bibcode for sc in result] == ["Z", "A"]
        assert all(sc.total == 0 for sc in result)


class TestContextOverlap:
    def test_empty_context(self):
        assert context_overlap(ctx(), record("A", [], 2020, title="anything")) == 0

    def test_full_overlap(self):
        rec = record("A", [], 2020, title="Triples and mergers galore")
        assert context_overlap(ctx("triples", "mergers"), rec) == 1.0

    def test_two_thirds(self):
        rec = record("A", [], 2020, title="Dust maps of the sky", abstract="All-sky dust maps.")
        assert context_overlap(ctx("dust", "maps", "extinction"), rec) == 2 / 3

    def test_duplicates_counted_once(self):
        rec = record("A", [], 2020, title="dust dust dust")
        assert context_overlap(ctx("dust", "dust"), rec) == 1.0


class TestInvariants:
    def test_decomposition_sums_to_total(self):
        cue = parse_cue("Shariat25", SearchMode.CONTEXTUAL, YEAR)
        rec = record("A", ["Shariat, C."], 2025, citations=12, title="Triples drive mergers")
        (sc,) = rank(cue, ctx("triples", "mergers"), [rec])
        assert sc.total == sc.s_author + sc.s_year + sc.s_initial + sc.s_context + sc.s_popularity

    def test_permutation_invariance(self):
        cue = parse_cue("Smith25", SearchMode.CONTEXTUAL, YEAR)
        rng = random.Random(3)
        records = [
            record(f"P{i:02d}", ["Smith, A."] if i % 2 else ["Doe, B.", "Smith, C."], 2025 - (i % 3), citations=i * 11 % 97)
            for i in range(20)
        ]
        baseline = [sc.record.bibcode for sc in rank(cue, None, records)]
        for _ in range(10):
            shuffled = records[:]
            rng.shuffle(shuffled)
            assert [sc.record.bibcode for sc in rank(cue, None, shuffled)] == baseline

    def test_citation_monotonicity(self):
        cue = parse_cue("Smith25", SearchMode.CONTEXTUAL, YEAR)
        records = [
            record("A", ["Smith, A."], 2025, citations=10),
            record("B", ["Smith, B."], 2025, citations=20),
            record("C", ["Doe, C.", "Smith, C."], 2025, citations=5000),
        ]
        before = [sc.record.bibcode for sc in rank(cue, None, records)].index("A")
        boosted = [
            AdsRecord(**{**r.__dict__, "citation_count": r.citation_count + (1000 if r.bibcode == "A" else 0)})
            for r in records
        ]
        after = [sc.record.bibcode for sc in rank(cue, None, boosted)].index("A")
        assert after <= before

    def test_popularity_is_log10(self):
        cue = parse_cue("Doe20", SearchMode.CONTEXTUAL, YEAR)
        (sc,) = rank(cue, None, [record("A", ["Doe, J."], 2020, citations=99)])
        assert sc.s_popularity == math.log10(100)
