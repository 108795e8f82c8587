from __future__ import annotations

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incite.errors import NotInCitation
from incite.texscan import (
    SourceDocument,
    Span,
    extract_context,
    list_bib_targets,
    scan_document,
    site_at_position,
)


def doc(text: str) -> SourceDocument:
    return SourceDocument(uri="test.tex", text=text)


class TestScanDocument:
    def test_single_citep(self):
        sites = scan_document(doc("as shown \\citep{Shariat25}."))
        assert len(sites) == 1
        site = sites[0]
        assert site.command == "citep"
        assert site.keys[0].raw_key == "Shariat25"
        # \citep{Shariat25} starts after "as shown " (9 bytes), key after "\citep{"
        assert site.keys[0].span == Span(16, 25)
        assert site.active_index == 0

    def test_empty_braces_yield_no_site(self):
        assert scan_document(doc("\\citep{}")) == []

    def test_optional_args_and_multiple_keys(self):
        # hand-traced spans: \citep=0..5, [e.g.]=6..11, []=12..13, {=14,
        # Abbott=15..21, ", "=21..23, Hawking1975=23..34, }=34
        sites = scan_document(doc("\\citep[e.g.][]{Abbott, Hawking1975}"))
        assert len(sites) == 1
        site = sites[0]
        assert [k.raw_key for k in site.keys] == ["Abbott", "Hawking1975"]
        assert site.keys[0].span == Span(15, 21)
        assert site.keys[1].span == Span(23, 34)
        assert site.active_index == 0
        assert site.span == Span(0, 35)

    def test_all_recognized_commands_and_starred(self):
        text = (
            "\\cite{a} \\citep{b} \\citet{c} \\citealt{d} \\citealp{e} "
            "\\citeauthor{f} \\citeyear{g} \\citet*{h}"
        )
        sites = scan_document(doc(text))
        assert [s.command for s in sites] == [
            "cite", "citep", "citet", "citealt", "citealp",
            "citeauthor", "citeyear", "citet*",
        ]

    def test_comment_lines_excluded(self):
        text = "% \\citep{Hidden}\nreal \\citep{Seen} % \\citep{AlsoHidden}\n"
        keys = [k.raw_key for s in scan_document(doc(text)) for k in s.keys]
        assert keys == ["Seen"]

    def test_escaped_percent_does_not_comment(self):
        text = "a 5\\% rise \\citep{Seen}"
        assert len(scan_document(doc(text))) == 1

    def test_nested_brace_aborts_site(self):
        assert scan_document(doc("\\citep{bad{key}}")) == []

    def test_unclosed_command_skipped(self):
        sites = scan_document(doc("\\citep{never closes... \\citet{ok}"))
        # the outer \citep aborts on the nested brace; the inner survives
        assert [s.command for s in sites] == ["citet"]

    def test_multibyte_text_spans_are_byte_offsets(self):
        text = "Müller's résumé \\citep{García25}"
        site = scan_document(doc(text))[0]
        data = text.encode("utf-8")
        key = site.keys[0]
        assert data[key.span.start : key.span.end].decode("utf-8") == "García25"
        assert key.raw_key == "García25"


class TestSiteAtPosition:
    def test_offset_inside_key(self):
        text = "\\citep{Hawking1975}"
        offset = text.encode().index(b"1975")  # cursor on the year digits
        site = site_at_position(doc(text), offset)
        assert site.active_index == 0
        assert site.keys[0].raw_key == "Hawking1975"

    def test_plain_text_raises(self):
        with pytest.raises(NotInCitation):
            site_at_position(doc("plain text"), 0)

    def test_offset_on_comma_picks_preceding_key(self):
        text = "\\citep{Abbott, Smith25}"
        comma = text.encode().index(b",")
        site = site_at_position(doc(text), comma)
        assert site.active_index == 0

    def test_offset_in_second_key(self):
        text = "\\citep{Abbott, Smith25}"
        offset = text.encode().index(b"Smith25") + 2
        site = site_at_position(doc(text), offset)
        assert site.active_index == 1

    def test_offset_beyond_document(self):
        with pytest.raises(NotInCitation):
            site_at_position(doc("x"), 99)


class TestExtractContext:
    def test_terms_from_sentence(self):
        text = "Triples drive mergers \\citep{Shariat25}. Next sentence."
        site = scan_document(doc(text))[0]
        ctx = extract_context(doc(text), site)
        assert ctx.raw == "Triples drive mergers \\citep{Shariat25}."
        assert ctx.terms == ("triples", "drive", "mergers")

    def test_single_sentence_document(self):
        text = "only one sentence here \\citep{X}"
        site = scan_document(doc(text))[0]
        assert extract_context(doc(text), site).raw == text

    def test_abbreviation_does_not_split(self):
        text = "dust maps, e.g., \\citep{Schlegel98}, are used."
        site = scan_document(doc(text))[0]
        ctx = extract_context(doc(text), site)
        assert ctx.raw == text

    def test_paragraph_break_bounds_sentence(self):
        text = "First paragraph without punctuation\n\nsecond one \\citep{X} continues\n\nthird"
        site = scan_document(doc(text))[0]
        ctx = extract_context(doc(text), site)
        assert ctx.raw == "second one \\citep{X} continues"

    def test_markup_is_stripped(self):
        text = "We use \\emph{triple} systems with $e > 0.9$ \\citep{X} and \\LaTeX."
        site = scan_document(doc(text))[0]
        ctx = extract_context(doc(text), site)
        assert "triple" in ctx.terms
        assert all("$" not in t and "\\" not in t for t in ctx.terms)

    def test_term_cap(self):
        words = " ".join(f"word{i:02d}" for i in range(40))
        text = f"{words} \\citep{{X}}."
        site = scan_document(doc(text))[0]
        assert len(extract_context(doc(text), site).terms) == 25


class TestListBibTargets:
    def test_single_bibliography(self):
        assert list_bib_targets(doc("\\bibliography{refs}")) == ["refs.bib"]

    def test_no_bibliography(self):
        assert list_bib_targets(doc("no commands here")) == []

    def test_suffix_appended_where_missing(self):
        assert list_bib_targets(doc("\\bibliography{main,extra.bib}")) == [
            "main.bib",
            "extra.bib",
        ]

    def test_addbibresource(self):
        text = "\\addbibresource{a.bib}\n\\bibliography{b}\n\\addbibresource{sub/c}"
        assert list_bib_targets(doc(text)) == ["a.bib", "b.bib", "sub/c.bib"]

    def test_bibliographystyle_not_matched(self):
        assert list_bib_targets(doc("\\bibliographystyle{aasjournal}")) == []


# ---- properties --------------------------------------------------------

_key_chars = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd"), max_codepoint=0x2FF),
    min_size=1,
    max_size=12,
)
_filler = st.text(
    alphabet=st.characters(blacklist_characters="\\{}%[]", max_codepoint=0x2FF),
    max_size=30,
)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(_filler, st.lists(_key_chars, min_size=1, max_size=3)), min_size=1, max_size=5))
def test_key_span_round_trip(chunks):
    parts = []
    expected = []
    for filler, keys in chunks:
        parts.append(filler)
        parts.append("\\citep{" + ", ".join(keys) + "}")
        expected.extend(keys)
    document = doc("".join(parts))
    data = document.data
    found = []
    for site in scan_document(document):
        for key in site.keys:
            assert data[key.span.start : key.span.end].decode("utf-8") == key.raw_key
            found.append(key.raw_key)
    assert found == expected


@settings(max_examples=100, deadline=None)
@given(_filler, _key_chars)
def test_scan_is_pure(filler, key):
    document = doc(f"{filler}\\citep{{{key}}}")
    assert scan_document(document) == scan_document(document)


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet=st.characters(max_codepoint=0x2FF), max_size=80))
def test_no_site_in_comment_lines(body):
    commented = "\n".join("% " + line for line in body.split("\n"))
    document = doc(commented)
    for site in scan_document(document):
        # any site found must not start inside a commented region
        line_start = document.data.rfind(b"\n", 0, site.span.start) + 1
        prefix = document.data[line_start : site.span.start]
        assert not prefix.lstrip().startswith(b"%")
    # with every line commented there must be no sites at all
    assert scan_document(document) == []


@settings(max_examples=100, deadline=None)
@given(_filler, st.lists(_key_chars, min_size=1, max_size=3), st.integers(min_value=0, max_value=200))
def test_site_at_position_consistency(filler, keys, probe):
    document = doc(f"{filler}\\citep{{{', '.join(keys)}}}")
    sites = scan_document(document)
    probe = min(probe, len(document.data))
    contained = any(s.span.contains(probe) for s in sites)
    try:
        found = site_at_position(document, probe)
        assert contained
        assert found.span.contains(probe)
    except NotInCitation:
        assert not contained
