"""incite: resolve rough LaTeX citation placeholders against the ADS/SciX
literature service, rank the candidates deterministically, and insert the
selected BibTeX entry into the project bibliography."""

from .ads import AdsClient, AdsRecord, HttpTransport, RateBudget, RecordingTransport, ReplayTransport
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
from .config import InciteConfig, load_config, save_config
from .cue import CitationCue, SearchMode, expand_year, parse_cue
from .edit import ApplyReport, BibEdit, TexEdit, WorkspaceEdit, apply_edits, plan_edits
from .errors import (
    AuthFailed,
    BadYear,
    DuplicateKey,
    EmptyCue,
    EmptyResults,
    InciteError,
    MalformedResponse,
    NoAuthors,
    NoBibTarget,
    NotFound,
    NotInCitation,
    RateLimited,
    StaleFile,
    TransportError,
)
from .pipeline import ResolveOutcome, plan_selection, resolve
from .query import AdsQuery, build_query, widen_query
from .rank import ScoredCandidate, ScoreWeights, context_overlap, rank
from .texscan import (
    CitationSite,
    KeyRef,
    SentenceContext,
    SourceDocument,
    Span,
    extract_context,
    list_bib_targets,
    scan_document,
    site_at_position,
)

__version__ = "0.1.0"

__all__ = [
    "AdsClient",
    "AdsQuery",
    "AdsRecord",
    "ApplyReport",
    "AuthFailed",
    "BadYear",
    "BibEdit",
    "BibEntry",
    "CitationCue",
    "CitationSite",
    "DuplicateKey",
    "EmptyCue",
    "EmptyResults",
    "HttpTransport",
    "InciteConfig",
    "InciteError",
    "KeyRef",
    "KeyStyle",
    "MalformedResponse",
    "NoAuthors",
    "NoBibTarget",
    "NotFound",
    "NotInCitation",
    "OrderPolicy",
    "RateBudget",
    "RateLimited",
    "RecordingTransport",
    "ReplayTransport",
    "ResolveOutcome",
    "ScoreWeights",
    "ScoredCandidate",
    "SearchMode",
    "SentenceContext",
    "SourceDocument",
    "Span",
    "StaleFile",
    "TexEdit",
    "TransportError",
    "WorkspaceEdit",
    "apply_edits",
    "build_query",
    "context_overlap",
    "expand_year",
    "extract_context",
    "find_duplicate",
    "generate_key",
    "insert_entry",
    "list_bib_targets",
    "load_config",
    "parse_bib",
    "parse_cue",
    "plan_edits",
    "plan_selection",
    "rank",
    "rekey_entry",
    "resolve",
    "resolve_collision",
    "save_config",
    "scan_document",
    "site_at_position",
    "widen_query",
]
