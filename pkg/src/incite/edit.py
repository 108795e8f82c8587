"""Turn a candidate selection into the manuscript + bibliography edit pair.

Planning is pure; applying is hash-gated (any concurrent modification of a
target file raises StaleFile and writes nothing) and atomic per file via
temp-file-then-rename, with compensating rollback so an injected failure
at any step leaves both files byte-identical to their pre-apply state.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .ads import AdsRecord
from .bib import (
    BibEntry,
    KeyStyle,
    OrderPolicy,
    find_duplicate,
    generate_key,
    insert_entry,
    parse_bib,
    rekey_entry,
    resolve_collision,
)
from .errors import StaleFile
from .texscan import CitationSite

# seam for crash-injection tests
_replace = os.replace


@dataclass(frozen=True)
class TexEdit:
    uri: str
    start: int
    end: int
    replacement: str


@dataclass(frozen=True)
class BibEdit:
    path: str
    new_text: str


@dataclass(frozen=True)
class WorkspaceEdit:
    tex_edit: TexEdit
    bib_edit: Optional[BibEdit]
    final_key: str
    reused_existing: bool
    bib_hash: str
    tex_hash: Optional[str] = None

    def __post_init__(self) -> None:
        if self.reused_existing != (self.bib_edit is None):
            raise ValueError("reused_existing must hold exactly when there is no bib edit")
        if self.tex_edit.replacement != self.final_key:
            raise ValueError("tex replacement must equal the final key")


@dataclass(frozen=True)
class ApplyReport:
    final_key: str
    paths_touched: tuple[str, ...]
    tex_edit: Optional[TexEdit] = None  # returned unapplied on the protocol path


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def plan_edits(
    site: CitationSite,
    record: AdsRecord,
    bibtex: str,
    bib_text: str,
    style: KeyStyle,
    policy: OrderPolicy,
    bib_path: str,
    *,
    tex_uri: str = "",
    tex_text: Optional[str] = None,
) -> WorkspaceEdit:
    """Plan the manuscript key rewrite plus the bibliography insertion.

    If the record already exists in the bibliography its key is reused and
    no bib edit is produced. Only the active key of a multi-key command is
    replaced. ``tex_text``, when given, captures the manuscript snapshot
    hash so apply_edits can write the file; without it the tex edit is
    editor-applied (protocol path).
    """
    entries = parse_bib(bib_text)
    duplicate: Optional[BibEntry] = find_duplicate(entries, record)
    if duplicate is not None:
        final_key = duplicate.key
        bib_edit = None
    else:
        base = generate_key(record, style)
        final_key = resolve_collision(base, {entry.key for entry in entries})
        entry_text = rekey_entry(bibtex.strip(), final_key) + "\n"
        bib_edit = BibEdit(
            path=bib_path,
            new_text=insert_entry(bib_text, entry_text, final_key, policy),
        )
    key_span = site.active_key.span
    return WorkspaceEdit(
        tex_edit=TexEdit(
            uri=tex_uri, start=key_span.start, end=key_span.end, replacement=final_key
        ),
        bib_edit=bib_edit,
        final_key=final_key,
        reused_existing=duplicate is not None,
        bib_hash=_sha256(bib_text),
        tex_hash=_sha256(tex_text) if tex_text is not None else None,
    )


_locks_guard = threading.Lock()
_path_locks: dict[str, threading.Lock] = {}


def _lock_for(path: str) -> threading.Lock:
    resolved = str(Path(path).resolve())
    with _locks_guard:
        return _path_locks.setdefault(resolved, threading.Lock())


def _read_current(path: str) -> str:
    p = Path(path)
    return p.read_text(encoding="utf-8") if p.exists() else ""


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=target.name + ".", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        _replace(tmp_name, str(target))
    finally:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)


def _apply_tex(edit: TexEdit, text: str) -> str:
    data = text.encode("utf-8")
    patched = data[: edit.start] + edit.replacement.encode("utf-8") + data[edit.end :]
    return patched.decode("utf-8")


def apply_edits(edit: WorkspaceEdit, *, write_tex: bool = True) -> ApplyReport:
    """Apply a planned edit to disk.

    The bibliography is always written engine-side (when there is a bib
    edit); the tex file is written only on the CLI path. Hash gates verify
    nothing changed since planning. On any failure every already-renamed
    file is restored, then the error is re-raised.
    """
    steps: list[tuple[str, str]] = []  # (path, new_text)
    if edit.bib_edit is not None:
        current_bib = _read_current(edit.bib_edit.path)
        if _sha256(current_bib) != edit.bib_hash:
            raise StaleFile(f"{edit.bib_edit.path} changed since planning")
        steps.append((edit.bib_edit.path, edit.bib_edit.new_text))

    tex_returned: Optional[TexEdit] = edit.tex_edit
    if write_tex:
        if edit.tex_hash is None:
            raise StaleFile("no manuscript snapshot hash; re-plan with tex_text")
        current_tex = _read_current(edit.tex_edit.uri)
        if _sha256(current_tex) != edit.tex_hash:
            raise StaleFile(f"{edit.tex_edit.uri} changed since planning")
        steps.append((edit.tex_edit.uri, _apply_tex(edit.tex_edit, current_tex)))
        tex_returned = None

    locks = sorted({_lock_for(path) for path, _ in steps}, key=id)
    for lock in locks:
        lock.acquire()
    written: list[tuple[str, str, bool]] = []  # (path, original_text, existed)
    try:
        for path, new_text in steps:
            existed = Path(path).exists()
            original = _read_current(path)
            _write_atomic(path, new_text)
            written.append((path, original, existed))
    except BaseException:
        for path, original, existed in reversed(written):
            if existed:
                _write_atomic(path, original)
            else:
                Path(path).unlink(missing_ok=True)
        raise
    finally:
        for lock in reversed(locks):
            lock.release()

    return ApplyReport(
        final_key=edit.final_key,
        paths_touched=tuple(path for path, _ in steps),
        tex_edit=tex_returned,
    )
