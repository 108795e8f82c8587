"""Line-delimited JSON-RPC 2.0 service over stdin/stdout.

One message per line, UTF-8, ``\\n``-terminated. Requests are handled
strictly in arrival order and the engine is stateless per request (the
document text travels with every call); only the session config persists.
All offsets on the wire are byte offsets into UTF-8 text.

Methods: ``overcite/resolve``, ``overcite/select``, ``overcite/scan``,
``overcite/config``.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, TextIO

from .ads import AdsClient
from .config import InciteConfig, load_config, parse_key_style, parse_mode, parse_order_policy
from .edit import ApplyReport, WorkspaceEdit, apply_edits
from .errors import (
    AuthFailed,
    EmptyCue,
    EmptyResults,
    InciteError,
    NoBibTarget,
    NotFound,
    NotInCitation,
    RateLimited,
    StaleFile,
)
from .pipeline import (
    plan_selection,
    resolve,
    unresolved_keys,
    _cite_commands,
)
from .rank import ScoredCandidate
from .texscan import SourceDocument, list_bib_targets, scan_document

logger = logging.getLogger(__name__)

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603
APPLICATION_ERROR = -32000

ERROR_CODES: tuple[tuple[type, int], ...] = (
    (NotInCitation, -32001),
    (AuthFailed, -32002),
    (RateLimited, -32003),
    (EmptyResults, -32004),
    (StaleFile, -32005),
    (NoBibTarget, -32006),
)

MAX_AUTHORS_SHOWN = 3


def _candidate_payload(candidate: ScoredCandidate) -> dict[str, Any]:
    record = candidate.record
    authors = list(record.authors[:MAX_AUTHORS_SHOWN])
    if len(record.authors) > MAX_AUTHORS_SHOWN:
        authors.append("et al.")
    return {
        "bibcode": record.bibcode,
        "title": record.title,
        "authors": authors,
        "year": record.year,
        "pub": record.pub,
        "citation_count": record.citation_count,
        "score_total": candidate.total,
        "score_components": {
            "author": candidate.s_author,
            "year": candidate.s_year,
            "initial": candidate.s_initial,
            "context": candidate.s_context,
            "popularity": candidate.s_popularity,
        },
    }


def _edit_payload(edit: WorkspaceEdit, report: Optional[ApplyReport] = None) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "tex_edit": {
            "uri": edit.tex_edit.uri,
            "start": edit.tex_edit.start,
            "end": edit.tex_edit.end,
            "replacement": edit.tex_edit.replacement,
        },
        "bib_edit": (
            {"path": edit.bib_edit.path, "new_text": edit.bib_edit.new_text}
            if edit.bib_edit
            else None
        ),
        "final_key": edit.final_key,
        "reused_existing": edit.reused_existing,
    }
    if report is not None:
        payload["paths_touched"] = list(report.paths_touched)
    return payload


class StdioServer:
    """Sequential JSON-RPC loop; never exits on malformed input."""

    def __init__(
        self,
        *,
        client: AdsClient,
        root: Path | str = ".",
        config: Optional[InciteConfig] = None,
        instream: Optional[TextIO] = None,
        outstream: Optional[TextIO] = None,
    ):
        self.client = client
        self.root = Path(root)
        self.config = config if config is not None else load_config(self.root)
        self._in = instream if instream is not None else sys.stdin
        self._out = outstream if outstream is not None else sys.stdout
        self._methods = {
            "overcite/resolve": self._rpc_resolve,
            "overcite/select": self._rpc_select,
            "overcite/scan": self._rpc_scan,
            "overcite/config": self._rpc_config,
        }

    # ---- framing ----------------------------------------------------

    def serve_forever(self) -> None:
        for line in self._in:
            line = line.strip()
            if not line:
                continue
            response = self.handle_line(line)
            if response is not None:
                self._write(response)

    def _write(self, message: dict) -> None:
        self._out.write(json.dumps(message, ensure_ascii=False) + "\n")
        self._out.flush()

    def handle_line(self, line: str) -> Optional[dict]:
        try:
            request = json.loads(line)
        except ValueError:
            return _error_response(None, PARSE_ERROR, "parse error: invalid JSON")
        if not isinstance(request, dict) or not isinstance(request.get("method"), str):
            request_id = request.get("id") if isinstance(request, dict) else None
            return _error_response(request_id, INVALID_REQUEST, "invalid request")
        request_id = request.get("id")
        has_id = "id" in request
        method = request["method"]
        params = request.get("params", {})
        if params is None:
            params = {}
        if not isinstance(params, dict):
            return _error_response(request_id, INVALID_PARAMS, "params must be an object") if has_id else None
        handler = self._methods.get(method)
        if handler is None:
            return _error_response(request_id, METHOD_NOT_FOUND, f"unknown method {method}") if has_id else None
        try:
            result = handler(params)
        except InciteError as exc:
            if not has_id:
                return None
            return _error_response(request_id, _code_for(exc), str(exc), _data_for(exc))
        except (KeyError, TypeError, ValueError) as exc:
            if not has_id:
                return None
            return _error_response(request_id, INVALID_PARAMS, f"bad params: {exc}")
        except Exception as exc:  # keep the loop alive no matter what
            logger.exception("internal error handling %s", method)
            if not has_id:
                return None
            return _error_response(request_id, INTERNAL_ERROR, f"internal error: {exc}")
        if not has_id:
            return None
        return {"jsonrpc": "2.0", "id": request_id, "result": result}

    # ---- methods ----------------------------------------------------

    def _rpc_resolve(self, params: dict) -> dict:
        text = params["text"]
        offset = int(params["offset"])
        if not isinstance(text, str):
            raise TypeError("text must be a string")
        if offset > len(text.encode("utf-8")):
            raise ValueError("offset beyond end of text")
        mode = parse_mode(params["mode"]) if params.get("mode") else None
        max_results = int(params.get("max_results", 8))
        outcome = resolve(
            text,
            offset,
            client=self.client,
            config=self.config,
            mode=mode,
            max_results=max_results,
        )
        cue = outcome.cue
        return {
            "cue": {
                "raw": cue.raw,
                "mode": cue.mode.value,
                "surname": cue.surname,
                "initial": cue.initial,
                "year": cue.year,
                "is_collaboration": cue.is_collaboration,
                "ads_query": cue.ads_query,
            },
            "candidates": [_candidate_payload(c) for c in outcome.candidates],
            "widened": outcome.widened,
        }

    def _rpc_select(self, params: dict) -> dict:
        text = params["text"]
        offset = int(params["offset"])
        bibcode = params["bibcode"]
        key_style = parse_key_style(params["key_style"]) if params.get("key_style") else None
        order_policy = (
            parse_order_policy(params["order_policy"]) if params.get("order_policy") else None
        )
        edit = plan_selection(
            text,
            offset,
            bibcode,
            client=self.client,
            config=self.config,
            base_dir=self.root,
            key_style=key_style,
            order_policy=order_policy,
            target_bib=params.get("target_bib"),
        )
        # Bib written engine-side; the tex edit is returned for the editor,
        # which owns the (possibly dirty) buffer.
        report = apply_edits(edit, write_tex=False)
        payload = _edit_payload(edit, report)
        return {"edits": payload, "final_key": edit.final_key}

    def _rpc_scan(self, params: dict) -> dict:
        text = params["text"]
        doc = SourceDocument(uri="", text=text)
        commands = _cite_commands(self.config)
        sites = scan_document(doc, commands)
        bib_keys: set[str] = set()
        targets = list_bib_targets(doc)
        if self.config.target_bib:
            targets.insert(0, self.config.target_bib)
        from .bib import parse_bib

        for target in targets:
            path = Path(target)
            if not path.is_absolute():
                path = self.root / path
            if path.exists():
                bib_keys.update(e.key for e in parse_bib(path.read_text(encoding="utf-8")))
        return {
            "sites": [
                {
                    "command": site.command,
                    "span": [site.span.start, site.span.end],
                    "keys": [
                        {"raw": key.raw_key, "span": [key.span.start, key.span.end]}
                        for key in site.keys
                    ],
                }
                for site in sites
            ],
            "unresolved": unresolved_keys(doc, bib_keys, commands),
        }

    def _rpc_config(self, params: dict) -> dict:
        updates = params.get("set")
        if updates is not None:
            if not isinstance(updates, dict):
                raise TypeError("set must be an object")
            self.config = self.config.with_values(updates)
        visible = self.config.to_dict()
        visible.pop("api_token", None)  # never echo credentials
        return visible


def _code_for(exc: InciteError) -> int:
    for exc_type, code in ERROR_CODES:
        if isinstance(exc, exc_type):
            return code
    if isinstance(exc, (NotFound, EmptyCue)):
        return APPLICATION_ERROR
    return APPLICATION_ERROR


def _data_for(exc: InciteError) -> Optional[dict]:
    if isinstance(exc, RateLimited):
        return {"reset_at": exc.reset_at}
    if isinstance(exc, NotFound):
        return {"missing": exc.missing}
    return None


def _error_response(request_id: Any, code: int, message: str, data: Optional[dict] = None) -> dict:
    error: dict[str, Any] = {"code": code, "message": message}
    if data is not None:
        error["data"] = data
    return {"jsonrpc": "2.0", "id": request_id, "error": error}
