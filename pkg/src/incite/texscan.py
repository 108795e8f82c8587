"""Locate citation commands in LaTeX source and extract sentence context.

All spans are byte offsets into the UTF-8 encoding of the document text;
the stdio protocol and the CLI use the same coordinate system. Scanning is
tolerant: malformed or unclosed commands are skipped, never raised, and
commands inside ``%`` comments are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

from .errors import NotInCitation
from .textnorm import STOPWORDS, tokenize_words

DEFAULT_CITE_COMMANDS: tuple[str, ...] = (
    "cite",
    "citep",
    "citet",
    "citealt",
    "citealp",
    "citeauthor",
    "citeyear",
)

MAX_CONTEXT_TERMS = 25
MIN_TERM_LENGTH = 3

# A sentence-ending [.!?] is not a boundary right after one of these.
SENTENCE_ABBREVIATIONS: tuple[str, ...] = (
    "e.g.",
    "i.e.",
    "et al.",
    "cf.",
    "vs.",
    "Fig.",
    "Eq.",
    "Sec.",
    "Tab.",
    "No.",
)

_WHITESPACE = b" \t\r\n"
_SENTENCE_PUNCT = b".!?"
_PARAGRAPH_RE = re.compile(rb"\n[ \t]*\n")
_BIBLIOGRAPHY_RE = re.compile(rb"\\bibliography\s*\{([^{}]*)\}")
_ADDBIBRESOURCE_RE = re.compile(rb"\\addbibresource\s*(?:\[[^\]]*\])?\s*\{([^{}]*)\}")


class Span(NamedTuple):
    """Half-open byte range [start, end) into the document's UTF-8 bytes."""

    start: int
    end: int

    def contains(self, offset: int) -> bool:
        return self.start <= offset < self.end


class KeyRef(NamedTuple):
    raw_key: str
    span: Span


@dataclass(frozen=True)
class SourceDocument:
    """Immutable snapshot of one LaTeX source file/buffer."""

    uri: str
    text: str

    @property
    def data(self) -> bytes:
        return self.text.encode("utf-8")


@dataclass(frozen=True)
class CitationSite:
    """One occurrence of a citation command, with per-key spans."""

    command: str
    span: Span
    keys: tuple[KeyRef, ...]
    active_index: int = 0

    @property
    def active_key(self) -> KeyRef:
        return self.keys[self.active_index]


@dataclass(frozen=True)
class SentenceContext:
    """The sentence around a site plus its content words."""

    raw: str
    terms: tuple[str, ...]


@lru_cache(maxsize=8)
def _command_pattern(commands: tuple[str, ...]) -> re.Pattern[bytes]:
    # Longest names first so \citealt is not consumed as \cite + "alt".
    names = sorted(commands, key=len, reverse=True)
    alternation = "|".join(re.escape(name) for name in names)
    return re.compile(
        (r"\\(" + alternation + r")(\*?)(?![a-zA-Z])").encode("ascii")
    )


def _blank_comments(data: bytes) -> bytes:
    """Copy of data with every unescaped %-comment replaced by spaces.

    Replacement keeps byte offsets identical between copy and original.
    A % is escaped iff preceded by an odd run of backslashes.
    """
    out = bytearray(data)
    i, n = 0, len(data)
    while i < n:
        b = data[i]
        if b == 0x5C:  # backslash escapes the next byte
            i += 2
            continue
        if b == 0x25:  # %
            while i < n and data[i] != 0x0A:
                out[i] = 0x20
                i += 1
            continue
        i += 1
    return bytes(out)


def _skip_ws(data: bytes, pos: int) -> int:
    n = len(data)
    while pos < n and data[pos] in _WHITESPACE:
        pos += 1
    return pos


def _parse_site(data: bytes, scan: bytes, match: re.Match[bytes]) -> Optional[CitationSite]:
    command = (match.group(1) + match.group(2)).decode("ascii")
    n = len(scan)
    pos = match.end()

    # Up to two optional [..] arguments (natbib pre/post notes).
    for _ in range(2):
        probe = _skip_ws(scan, pos)
        if probe < n and scan[probe] == 0x5B:  # [
            close = scan.find(b"]", probe + 1)
            if close == -1 or b"\n\n" in scan[probe:close]:
                return None
            pos = close + 1
        else:
            break

    probe = _skip_ws(scan, pos)
    if probe >= n or scan[probe] != 0x7B:  # {
        return None
    body_start = probe + 1
    q = body_start
    while q < n and scan[q] not in b"{}":
        q += 1
    if q >= n or scan[q] == 0x7B:  # unclosed, or nested brace: abort this site
        return None
    body_end = q

    keys: list[KeyRef] = []
    piece_start = body_start
    for piece_end in [*(i for i in range(body_start, body_end) if scan[i] == 0x2C), body_end]:
        a, b = piece_start, piece_end
        while a < b and scan[a] in _WHITESPACE:
            a += 1
        while b > a and scan[b - 1] in _WHITESPACE:
            b -= 1
        if b > a:
            keys.append(KeyRef(data[a:b].decode("utf-8", errors="replace"), Span(a, b)))
        piece_start = piece_end + 1

    if not keys:
        return None
    return CitationSite(command=command, span=Span(match.start(), body_end + 1), keys=tuple(keys))


def scan_document(
    doc: SourceDocument, commands: Sequence[str] = DEFAULT_CITE_COMMANDS
) -> list[CitationSite]:
    """Every recognized citation command in the document, in text order."""
    data = doc.data
    scan = _blank_comments(data)
    pattern = _command_pattern(tuple(commands))
    sites = []
    for match in pattern.finditer(scan):
        site = _parse_site(data, scan, match)
        if site is not None:
            sites.append(site)
    return sites


def site_at_position(
    doc: SourceDocument, offset: int, commands: Sequence[str] = DEFAULT_CITE_COMMANDS
) -> CitationSite:
    """The site whose span contains offset, with active_index set from the cursor.

    Raises NotInCitation when the offset lies in no citation command.
    """
    if offset < 0 or offset > len(doc.data):
        raise NotInCitation(f"offset {offset} outside document")
    for site in scan_document(doc, commands):
        if site.span.contains(offset):
            return CitationSite(
                command=site.command,
                span=site.span,
                keys=site.keys,
                active_index=_nearest_key(site, offset),
            )
    raise NotInCitation(f"offset {offset} is not inside a citation command")


def _nearest_key(site: CitationSite, offset: int) -> int:
    best_index, best_distance = 0, None
    for i, key in enumerate(site.keys):
        if key.span.start <= offset <= key.span.end:
            distance = 0
        else:
            distance = min(abs(offset - key.span.start), abs(offset - key.span.end))
        if best_distance is None or distance < best_distance:
            best_index, best_distance = i, distance
    return best_index


def _is_abbreviation(scan: bytes, punct: int) -> bool:
    end = punct + 1
    for abbr in SENTENCE_ABBREVIATIONS:
        token = abbr.encode("ascii")
        start = end - len(token)
        if start < 0 or scan[start:end] != token:
            continue
        if start == 0:
            return True
        prev = scan[start - 1]
        if not (0x41 <= prev <= 0x5A or 0x61 <= prev <= 0x7A):
            return True
    return False


def _sentence_bounds(scan: bytes, site_start: int, site_end: int) -> tuple[int, int]:
    n = len(scan)
    para_before = 0
    para_after = n
    for m in _PARAGRAPH_RE.finditer(scan):
        if m.end() <= site_start:
            para_before = max(para_before, m.end())
        if m.start() >= site_end:
            para_after = min(para_after, m.start())

    start = para_before
    i = site_start - 1
    while i > para_before:
        if (
            scan[i] in _SENTENCE_PUNCT
            and i + 1 < n
            and scan[i + 1] in _WHITESPACE
            and not _is_abbreviation(scan, i)
        ):
            start = i + 1
            break
        i -= 1

    end = para_after
    i = site_end
    while i < para_after:
        if scan[i] in _SENTENCE_PUNCT and (i + 1 >= n or scan[i + 1] in _WHITESPACE):
            if not _is_abbreviation(scan, i):
                end = i + 1
                break
        i += 1

    while start < end and scan[start] in _WHITESPACE:
        start += 1
    while end > max(start, site_end) and scan[end - 1] in _WHITESPACE:
        end -= 1
    return start, end


@lru_cache(maxsize=8)
def _cite_strip_pattern(commands: tuple[str, ...]) -> re.Pattern[str]:
    names = sorted(commands, key=len, reverse=True)
    alternation = "|".join(re.escape(name) for name in names)
    return re.compile(
        r"\\(?:" + alternation + r")(?![a-zA-Z])\*?(?:\s*\[[^\]\n]*\]){0,2}\s*\{[^{}]*\}"
    )


_COMMENT_STR_RE = re.compile(r"(?<!\\)%[^\n]*")
_TEXT_MACRO_RE = re.compile(r"\\(?:emph|textbf|textit|mbox)\s*\{([^{}]*)\}")
_INLINE_MATH_RE = re.compile(r"\$[^$]*\$")
_COMMAND_RE = re.compile(r"\\[A-Za-z@]+\*?")


def _strip_latex(raw: str, commands: tuple[str, ...]) -> str:
    text = _COMMENT_STR_RE.sub(" ", raw)
    text = _cite_strip_pattern(commands).sub(" ", text)
    for _ in range(3):  # unwrap a few nesting levels of \emph{\textbf{..}}
        unwrapped = _TEXT_MACRO_RE.sub(r"\1", text)
        if unwrapped == text:
            break
        text = unwrapped
    text = _INLINE_MATH_RE.sub(" ", text)
    return _COMMAND_RE.sub(" ", text)


def extract_context(
    doc: SourceDocument,
    site: CitationSite,
    commands: Sequence[str] = DEFAULT_CITE_COMMANDS,
) -> SentenceContext:
    """Sentence around the site, plus its lowercase content words.

    Boundaries are .!? followed by whitespace (except after the shipped
    abbreviation list) and paragraph breaks. Terms drop LaTeX markup,
    stopwords and tokens shorter than 3 characters; at most 25 are kept.
    """
    data = doc.data
    scan = _blank_comments(data)
    start, end = _sentence_bounds(scan, site.span.start, site.span.end)
    raw = data[start:end].decode("utf-8", errors="replace")
    stripped = _strip_latex(raw, tuple(commands))
    terms = [
        token
        for token in tokenize_words(stripped)
        if len(token) >= MIN_TERM_LENGTH and token not in STOPWORDS
    ][:MAX_CONTEXT_TERMS]
    return SentenceContext(raw=raw, terms=tuple(terms))


def list_bib_targets(doc: SourceDocument) -> list[str]:
    """Bibliography files referenced by the document, in document order.

    ``\\bibliography{a,b}`` contributes comma-separated basenames,
    ``\\addbibresource{path}`` one path each; a ``.bib`` suffix is appended
    where missing.
    """
    scan = _blank_comments(doc.data)
    found: list[tuple[int, str]] = []
    for m in _BIBLIOGRAPHY_RE.finditer(scan):
        for i, name in enumerate(m.group(1).decode("utf-8", errors="replace").split(",")):
            name = name.strip()
            if name:
                found.append((m.start() + i, name))
    for m in _ADDBIBRESOURCE_RE.finditer(scan):
        name = m.group(1).decode("utf-8", errors="replace").strip()
        if name:
            found.append((m.start(), name))
    found.sort(key=lambda item: item[0])
    return [name if name.endswith(".bib") else name + ".bib" for _, name in found]
