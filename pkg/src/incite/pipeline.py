"""End-to-end orchestration: cursor position to ranked candidates, and
selection to planned workspace edit. Shared by the CLI and the stdio server.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .ads import AdsClient, AdsRecord
from .bib import KeyStyle, OrderPolicy
from .config import InciteConfig
from .cue import CitationCue, SearchMode, parse_cue
from .edit import WorkspaceEdit, plan_edits
from .errors import EmptyResults, NoBibTarget, NotFound
from .query import AdsQuery, build_query, widen_query
from .rank import ScoredCandidate, rank
from .texscan import (
    CitationSite,
    DEFAULT_CITE_COMMANDS,
    SentenceContext,
    SourceDocument,
    extract_context,
    list_bib_targets,
    site_at_position,
)

DEFAULT_MAX_RESULTS = 8


@dataclass(frozen=True)
class ResolveOutcome:
    site: CitationSite
    cue: CitationCue
    context: Optional[SentenceContext]
    candidates: tuple[ScoredCandidate, ...]
    widened: bool


def _cite_commands(config: InciteConfig) -> tuple[str, ...]:
    return DEFAULT_CITE_COMMANDS + tuple(config.extra_cite_commands)


def _search_with_widening(
    client: AdsClient, query: AdsQuery, cue: CitationCue
) -> tuple[list[AdsRecord], bool]:
    records, _ = client.search(query)
    if records:
        return records, False
    tried = {query.q}
    previous = query
    for attempt in (1, 2, 3):
        wider = widen_query(previous, cue, attempt)
        if wider is None:
            break
        if wider.q in tried:
            continue
        tried.add(wider.q)
        previous = wider
        records, _ = client.search(wider)
        if records:
            return records, True
    raise EmptyResults(f"no results for {cue.raw!r}, even after widening")


def resolve(
    text: str,
    offset: int,
    *,
    client: AdsClient,
    config: InciteConfig,
    mode: Optional[SearchMode] = None,
    max_results: int = DEFAULT_MAX_RESULTS,
    uri: str = "",
) -> ResolveOutcome:
    """site_at_position -> parse_cue -> extract_context -> search (+widen)
    -> rank -> truncate."""
    doc = SourceDocument(uri=uri, text=text)
    commands = _cite_commands(config)
    site = site_at_position(doc, offset, commands)
    cue = parse_cue(site.active_key.raw_key, mode or config.default_mode)
    context = (
        extract_context(doc, site, commands) if cue.mode is SearchMode.CONTEXTUAL else None
    )
    records, widened = _search_with_widening(client, build_query(cue), cue)
    scored = rank(cue, context, records)
    if not scored:
        raise EmptyResults(f"no candidate matched the cue {cue.raw!r}")
    return ResolveOutcome(
        site=site,
        cue=cue,
        context=context,
        candidates=tuple(scored[:max_results]),
        widened=widened,
    )


def lookup_record(client: AdsClient, bibcode: str) -> AdsRecord:
    records, _ = client.search(AdsQuery(q=f'bibcode:"{bibcode}"', rows=1))
    for record in records:
        if record.bibcode == bibcode:
            return record
    raise NotFound([bibcode])


def pick_bib_target(
    doc: SourceDocument,
    config: InciteConfig,
    explicit: Optional[str] = None,
) -> str:
    """Target bib precedence: explicit request value, config, first
    bibliography command in the document."""
    if explicit:
        return explicit
    if config.target_bib:
        return config.target_bib
    targets = list_bib_targets(doc)
    if targets:
        return targets[0]
    raise NoBibTarget("no bibliography target: pass one, set target_bib, or add \\bibliography")


def plan_selection(
    text: str,
    offset: int,
    bibcode: str,
    *,
    client: AdsClient,
    config: InciteConfig,
    base_dir: Path,
    key_style: Optional[KeyStyle] = None,
    order_policy: Optional[OrderPolicy] = None,
    target_bib: Optional[str] = None,
    tex_path: Optional[Path] = None,
) -> WorkspaceEdit:
    """Fetch record + BibTeX for the chosen bibcode and plan both edits.

    ``base_dir`` anchors relative bibliography paths; ``tex_path`` marks
    the CLI path where the manuscript file itself will be rewritten.
    """
    doc = SourceDocument(uri=str(tex_path) if tex_path else "", text=text)
    site = site_at_position(doc, offset, _cite_commands(config))
    bibtex = client.export_bibtex([bibcode])
    record = lookup_record(client, bibcode)
    target = pick_bib_target(doc, config, target_bib)
    bib_path = Path(target)
    if not bib_path.is_absolute():
        bib_path = Path(base_dir) / bib_path
    bib_text = bib_path.read_text(encoding="utf-8") if bib_path.exists() else ""
    return plan_edits(
        site,
        record,
        bibtex,
        bib_text,
        key_style or config.key_style,
        order_policy or config.order_policy,
        str(bib_path),
        tex_uri=str(tex_path) if tex_path else "",
        tex_text=text if tex_path else None,
    )


def unresolved_keys(
    doc: SourceDocument,
    bib_keys: set[str],
    commands: Sequence[str] = DEFAULT_CITE_COMMANDS,
) -> list[str]:
    """Cited keys missing from the bibliography, in first-use order."""
    from .texscan import scan_document

    seen: list[str] = []
    for site in scan_document(doc, commands):
        for key in site.keys:
            if key.raw_key not in bib_keys and key.raw_key not in seen:
                seen.append(key.raw_key)
    return seen
