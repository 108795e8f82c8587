"""Parse, query and mutate BibTeX files.

The parser is deliberately tolerant: entries are delimited by ``@type{key,``
with balanced-brace field values; ``@comment``/``@preamble``/``@string``
blocks pass through untouched; malformed entries are skipped with a
diagnostic and never abort the parse. Mutations are pure text transforms
that leave every byte outside the insertion point untouched.
"""

from __future__ import annotations

import enum
import itertools
import logging
import re
import string
import urllib.parse
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .ads import AdsRecord
from .errors import DuplicateKey, NoAuthors
from .textnorm import fold

logger = logging.getLogger(__name__)

KEY_CHARSET_RE = re.compile(r"[A-Za-z0-9:_.-]+")
_KEY_SANITIZE_RE = re.compile(r"[^A-Za-z0-9:_.-]+")
_BIBCODE_RE = re.compile(r"^\d{4}\S{15}$")
_PASSTHROUGH_TYPES = {"comment", "preamble", "string"}


class KeyStyle(enum.Enum):
    AUTHOR_YEAR = "AuthorYear"
    AUTHOR_YEAR_LOWER = "authoryear"
    AUTHOR_COLON_YEAR = "Author:Year"
    BIBCODE = "Bibcode"


class OrderPolicy(enum.Enum):
    APPEND = "Append"
    ALPHA_BY_KEY = "AlphaByKey"
    YEAR_THEN_AUTHOR = "YearThenAuthor"


@dataclass(frozen=True)
class BibEntry:
    key: str
    entry_type: str
    fields: dict[str, str] = field(default_factory=dict)
    raw: str = ""
    span: tuple[int, int] = (0, 0)

    @property
    def bibcode(self) -> Optional[str]:
        adsurl = self.fields.get("adsurl")
        if adsurl and "/abs/" in adsurl:
            tail = adsurl.rsplit("/abs/", 1)[1].strip().rstrip("/")
            return urllib.parse.unquote(tail) or None
        if _BIBCODE_RE.match(self.key):
            return self.key
        return None

    @property
    def year(self) -> Optional[int]:
        match = re.search(r"\d{4}", self.fields.get("year", ""))
        return int(match.group()) if match else None

    @property
    def first_author_surname(self) -> Optional[str]:
        authors = self.fields.get("author", "")
        first = authors.split(" and ")[0].strip()
        if not first:
            return None
        surname = first.split(",", 1)[0]
        return surname.replace("{", "").replace("}", "").strip() or None


def _scan_value(text: str, pos: int) -> tuple[Optional[str], int]:
    """Parse one field value starting at pos; returns (value, next_pos)."""
    n = len(text)
    if pos >= n:
        return None, pos
    ch = text[pos]
    if ch == "{":
        depth, i = 1, pos + 1
        while i < n and depth:
            if text[i] == "{":
                depth += 1
            elif text[i] == "}":
                depth -= 1
            i += 1
        if depth:
            return None, i
        return text[pos + 1 : i - 1], i
    if ch == '"':
        depth, i = 0, pos + 1
        while i < n:
            if text[i] == "{":
                depth += 1
            elif text[i] == "}":
                depth -= 1
            elif text[i] == '"' and depth == 0:
                return text[pos + 1 : i], i + 1
            i += 1
        return None, i
    i = pos
    while i < n and text[i] not in ",}\n":
        i += 1
    bare = text[pos:i].strip()
    return (bare if bare else None), i


def _close_of_block(text: str, brace_pos: int) -> int:
    """Index just past the brace that closes the one at brace_pos, or -1."""
    depth, i, n = 0, brace_pos, len(text)
    while i < n:
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return -1


def parse_bib(text: str, diagnostics: Optional[list[str]] = None) -> list[BibEntry]:
    """Tolerant parse of a bibliography file; malformed entries are skipped."""

    def complain(message: str) -> None:
        logger.warning("bib parse: %s", message)
        if diagnostics is not None:
            diagnostics.append(message)

    entries: list[BibEntry] = []
    n = len(text)
    pos = 0
    while True:
        at = text.find("@", pos)
        if at == -1:
            break
        head = re.match(r"@\s*([A-Za-z]+)\s*", text[at:])
        if not head:
            pos = at + 1
            continue
        entry_type = head.group(1)
        brace = at + head.end()
        if brace >= n or text[brace] != "{":
            complain(f"entry head without '{{' at offset {at}")
            pos = at + 1
            continue
        if entry_type.lower() in _PASSTHROUGH_TYPES:
            close = _close_of_block(text, brace)
            pos = close if close != -1 else brace + 1
            continue
        close = _close_of_block(text, brace)
        if close == -1:
            complain(f"unterminated @{entry_type} entry at offset {at}")
            pos = at + 1
            continue

        body = text[brace + 1 : close - 1]
        comma = body.find(",")
        key = (body[:comma] if comma != -1 else body).strip()
        if not key or any(c in key for c in "{}"):
            complain(f"@{entry_type} entry at offset {at} has no usable key")
            pos = close
            continue

        fields: dict[str, str] = {}
        i = comma + 1 if comma != -1 else len(body)
        while i < len(body):
            m = re.match(r"[\s,]*([A-Za-z][\w.-]*)\s*=\s*", body[i:])
            if not m:
                break
            value, after = _scan_value(body, i + m.end())
            if value is None:
                complain(f"@{entry_type} {key}: malformed value for field {m.group(1)!r}")
                break
            fields[m.group(1).lower()] = " ".join(value.split())
            i = after

        entries.append(
            BibEntry(
                key=key,
                entry_type=entry_type.lower(),
                fields=fields,
                raw=text[at:close],
                span=(at, close),
            )
        )
        pos = close
    return entries


def _fold_ascii(text: str) -> str:
    """Diacritic-folded text suitable for a citation key (case preserved)."""
    import unicodedata

    decomposed = unicodedata.normalize("NFD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c))


def generate_key(record: AdsRecord, style: KeyStyle) -> str:
    """Citation key for a record under the configured style."""
    if style is KeyStyle.BIBCODE:
        return _KEY_SANITIZE_RE.sub("", record.bibcode) or "anon"
    if not record.authors:
        raise NoAuthors(f"record {record.bibcode} has no authors")
    surname = record.authors[0].split(",", 1)[0]
    compact = _KEY_SANITIZE_RE.sub("", _fold_ascii(surname).replace(" ", ""))
    if not compact:
        compact = "anon"
    if style is KeyStyle.AUTHOR_YEAR:
        return f"{compact}{record.year}"
    if style is KeyStyle.AUTHOR_YEAR_LOWER:
        return f"{compact}{record.year}".lower()
    return f"{compact}:{record.year}"


def _suffixes() -> Iterable[str]:
    for length in itertools.count(1):
        for combo in itertools.product(string.ascii_lowercase, repeat=length):
            yield "".join(combo)


def resolve_collision(key: str, existing: set[str]) -> str:
    """First unused of key, key+'a'..'z', key+'aa'.., deterministically."""
    if key not in existing:
        return key
    for suffix in _suffixes():
        candidate = key + suffix
        if candidate not in existing:
            return candidate
    raise AssertionError("unreachable")


def _normalized_title(title: str) -> str:
    return re.sub(r"[^a-z0-9]+", "", title.lower())


def find_duplicate(entries: list[BibEntry], record: AdsRecord) -> Optional[BibEntry]:
    """Existing entry for the same paper: bibcode, else DOI, else
    normalized title + same year."""
    if record.bibcode:
        for entry in entries:
            if entry.bibcode == record.bibcode:
                return entry
    if record.doi:
        target = record.doi.strip().lower()
        for entry in entries:
            if entry.fields.get("doi", "").strip().lower() == target:
                return entry
    wanted = _normalized_title(record.title)
    if wanted:
        for entry in entries:
            if (
                _normalized_title(entry.fields.get("title", "")) == wanted
                and entry.year == record.year
            ):
                return entry
    return None


def rekey_entry(entry_text: str, new_key: str) -> str:
    """Replace the key in the entry head; only the text between '{' and the
    first ',' changes."""
    m = re.match(r"(\s*@[A-Za-z]+\s*\{)([^,}]*?)(\s*,)", entry_text)
    if not m:
        raise ValueError("cannot find entry head to re-key")
    return entry_text[: m.start(2)] + new_key + entry_text[m.end(2) :]


def _append(file_text: str, entry_text: str) -> str:
    if file_text == "":
        return entry_text
    if file_text.endswith("\n\n"):
        separator = ""
    elif file_text.endswith("\n"):
        separator = "\n"
    else:
        separator = "\n\n"
    return file_text + separator + entry_text


def _insert_before(file_text: str, entry_text: str, offset: int) -> str:
    chunk = entry_text
    if not chunk.endswith("\n"):
        chunk += "\n"
    chunk += "\n"
    return file_text[:offset] + chunk + file_text[offset:]


def insert_entry(
    file_text: str, new_entry_text: str, key: str, policy: OrderPolicy
) -> str:
    """Insert an entry according to the ordering policy.

    Every byte outside the insertion point is preserved verbatim. The
    caller must have resolved collisions; a pre-existing key raises
    DuplicateKey.
    """
    entries = parse_bib(file_text)
    if any(entry.key == key for entry in entries):
        raise DuplicateKey(key)

    if policy is OrderPolicy.ALPHA_BY_KEY:
        for entry in entries:
            if entry.key.lower() > key.lower():
                return _insert_before(file_text, new_entry_text, entry.span[0])
    elif policy is OrderPolicy.YEAR_THEN_AUTHOR:
        new_parsed = parse_bib(new_entry_text)
        if new_parsed:
            new_sort = _year_author_sort(new_parsed[0])
            for entry in entries:
                if _year_author_sort(entry) > new_sort:
                    return _insert_before(file_text, new_entry_text, entry.span[0])
    return _append(file_text, new_entry_text)


def _year_author_sort(entry: BibEntry) -> tuple[int, str]:
    year = entry.year if entry.year is not None else 9999
    surname = fold(entry.first_author_surname or "")
    return (year, surname)
