"""Local HTTP stand-in for the two literature-API endpoints.

Serves a small JSON corpus (records with embedded BibTeX) through the same
wire shapes as the real service: ``GET /v1/search/query`` with a minimal
query evaluator and ``POST /v1/export/bibtex``. Supports bearer-token
auth, the three X-RateLimit headers counting down from a configurable
limit, and 429 once the limit is exhausted. The evaluator covers exactly
the query grammar the engine emits: ``author:"..."`` (optional ``^``
first-author anchor), ``year:N``, ``year:[A TO B]``, ``title:"..."``,
``bibcode:...`` and bare terms (title+abstract substring), AND-joined.
"""

from __future__ import annotations

import json
import re
import threading
import time
import urllib.parse
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any, Optional

from .ads import AdsRecord
from .textnorm import fold

_CLAUSE_RE = re.compile(
    r"""
    (?P<field>\w+):"(?P<phrase>[^"]*)"
    | (?P<rfield>\w+):\[(?P<lo>\d+)\s+TO\s+(?P<hi>\d+)\]
    | (?P<bfield>\w+):(?P<bvalue>\S+)
    | "(?P<term_phrase>[^"]*)"
    | (?P<term>\S+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class CorpusEntry:
    record: AdsRecord
    bibtex: str


def load_corpus(path: str | Path) -> list[CorpusEntry]:
    """Corpus file format: JSON array of records, each with a ``bibtex`` string."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = []
    for item in data:
        entries.append(
            CorpusEntry(
                record=AdsRecord(
                    bibcode=item["bibcode"],
                    title=item.get("title", ""),
                    authors=tuple(item.get("authors", ())),
                    year=int(item.get("year", 0)),
                    citation_count=int(item.get("citation_count", 0)),
                    abstract=item.get("abstract"),
                    pub=item.get("pub"),
                    doi=item.get("doi"),
                ),
                bibtex=item["bibtex"],
            )
        )
    return entries


class QueryError(ValueError):
    pass


def parse_clauses(q: str) -> list[tuple[str, Any]]:
    clauses: list[tuple[str, Any]] = []
    for m in _CLAUSE_RE.finditer(q):
        if m.group("field"):
            name = m.group("field").lower()
            if name not in ("author", "title", "bibcode", "year", "abstract"):
                raise QueryError(f"unsupported field: {name}")
            clauses.append((name, m.group("phrase")))
        elif m.group("rfield"):
            if m.group("rfield").lower() != "year":
                raise QueryError(f"unsupported range field: {m.group('rfield')}")
            clauses.append(("year_range", (int(m.group("lo")), int(m.group("hi")))))
        elif m.group("bfield"):
            name = m.group("bfield").lower()
            if name == "year":
                if not m.group("bvalue").isdigit():
                    raise QueryError(f"bad year value: {m.group('bvalue')}")
                clauses.append(("year", int(m.group("bvalue"))))
            elif name == "bibcode":
                clauses.append(("bibcode", m.group("bvalue")))
            else:
                raise QueryError(f"unsupported field: {name}")
        elif m.group("term_phrase") is not None:
            clauses.append(("term", m.group("term_phrase")))
        else:
            term = m.group("term")
            if term.upper() != "AND":
                clauses.append(("term", term))
    return clauses


def _matches(record: AdsRecord, clause: tuple[str, Any]) -> bool:
    kind, value = clause
    if kind == "author":
        phrase = str(value)
        first_only = phrase.startswith("^")
        needle = fold(phrase.lstrip("^"))
        authors = record.authors[:1] if first_only else record.authors
        return any(fold(author).startswith(needle) for author in authors)
    if kind == "title":
        return fold(str(value)) in fold(record.title)
    if kind == "abstract":
        return fold(str(value)) in fold(record.abstract or "")
    if kind == "bibcode":
        return record.bibcode == str(value).strip('"')
    if kind == "year":
        return record.year == value
    if kind == "year_range":
        lo, hi = value
        return lo <= record.year <= hi
    if kind == "term":
        return fold(str(value)) in fold(f"{record.title} {record.abstract or ''}")
    raise QueryError(f"unknown clause kind {kind}")


def evaluate_query(q: str, corpus: list[CorpusEntry]) -> list[AdsRecord]:
    """Records matching the AND of all clauses, in corpus order."""
    clauses = parse_clauses(q)
    if not clauses:
        return []
    return [
        entry.record
        for entry in corpus
        if all(_matches(entry.record, clause) for clause in clauses)
    ]


def _relevance(record: AdsRecord, q: str) -> int:
    # Term-hit count over title+abstract; deterministic stand-in for Solr scoring.
    haystack = fold(f"{record.title} {record.abstract or ''}")
    hits = 0
    for kind, value in parse_clauses(q):
        if kind in ("term", "title", "abstract") and fold(str(value)) in haystack:
            hits += 1
    return hits


class _CorpusHTTPServer(ThreadingHTTPServer):
    # connections are accepted concurrently (clients keep them alive), but
    # request handling itself is serialized by handle_lock: one at a time
    daemon_threads = True

    def __init__(self, address, handler, *, corpus, limit, reset_at, token_required):
        super().__init__(address, handler)
        self.corpus = corpus
        self.limit = limit
        self.remaining = limit
        self.reset_at = reset_at
        self.token_required = token_required
        self.handle_lock = threading.Lock()


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: _CorpusHTTPServer

    def log_message(self, format: str, *args: Any) -> None:  # silence
        pass

    def _rate_headers(self) -> dict[str, str]:
        return {
            "X-RateLimit-Limit": str(self.server.limit),
            "X-RateLimit-Remaining": str(max(0, self.server.remaining)),
            "X-RateLimit-Reset": str(self.server.reset_at),
        }

    def _send(self, status: int, payload: dict, headers: Optional[dict[str, str]] = None) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        for name, value in (headers or {}).items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(body)

    def _gate(self) -> bool:
        """Auth + rate limiting; sends the error response when rejecting."""
        auth = self.headers.get("Authorization", "")
        if self.server.token_required and not auth.startswith("Bearer "):
            self._send(401, {"error": "Unauthorized"})
            return False
        if self.server.remaining <= 0:
            self._send(429, {"error": "Too many requests"}, self._rate_headers())
            return False
        self.server.remaining -= 1
        return True

    def do_GET(self) -> None:
        with self.server.handle_lock:
            self._handle_get()

    def do_POST(self) -> None:
        with self.server.handle_lock:
            self._handle_post()

    def _handle_get(self) -> None:
        parsed = urllib.parse.urlparse(self.path)
        if parsed.path != "/v1/search/query":
            self._send(404, {"error": f"unknown path {parsed.path}"})
            return
        if not self._gate():
            return
        params = urllib.parse.parse_qs(parsed.query)
        q = (params.get("q") or [""])[0]
        rows = int((params.get("rows") or ["10"])[0])
        sort = (params.get("sort") or ["score desc"])[0]
        try:
            records = evaluate_query(q, self.server.corpus)
        except QueryError as exc:
            self._send(400, {"error": str(exc)}, self._rate_headers())
            return
        if sort.startswith("citation_count"):
            records.sort(key=lambda r: (-r.citation_count, r.bibcode))
        else:
            records.sort(key=lambda r: (-_relevance(r, q), -r.citation_count, r.bibcode))
        docs = [_doc_from_record(r) for r in records[:rows]]
        self._send(
            200,
            {"response": {"numFound": len(records), "docs": docs}},
            self._rate_headers(),
        )

    def _handle_post(self) -> None:
        parsed = urllib.parse.urlparse(self.path)
        if parsed.path != "/v1/export/bibtex":
            self._send(404, {"error": f"unknown path {parsed.path}"})
            return
        if not self._gate():
            return
        length = int(self.headers.get("Content-Length", "0"))
        try:
            body = json.loads(self.rfile.read(length).decode("utf-8"))
            requested = list(body["bibcode"])
        except (ValueError, KeyError, TypeError):
            self._send(400, {"error": "body must be {\"bibcode\": [...]}"}, self._rate_headers())
            return
        by_code = {entry.record.bibcode: entry for entry in self.server.corpus}
        missing = [code for code in requested if code not in by_code]
        if missing:
            self._send(
                404,
                {"error": "bibcodes not found", "missing": missing},
                self._rate_headers(),
            )
            return
        export = "\n\n".join(by_code[code].bibtex.strip() for code in requested) + "\n"
        self._send(
            200,
            {"export": export, "msg": f"Retrieved {len(requested)} abstracts"},
            self._rate_headers(),
        )


def _doc_from_record(record: AdsRecord) -> dict:
    doc: dict[str, Any] = {
        "bibcode": record.bibcode,
        "title": [record.title],
        "author": list(record.authors),
        "year": str(record.year),
        "citation_count": record.citation_count,
    }
    if record.abstract is not None:
        doc["abstract"] = record.abstract
    if record.pub is not None:
        doc["pub"] = record.pub
    if record.doi is not None:
        doc["doi"] = [record.doi]
    return doc


class MockScixServer:
    """Mock service handling one request at a time (serialized by a lock)."""

    def __init__(
        self,
        corpus: list[CorpusEntry],
        *,
        port: int = 0,
        limit: int = 5000,
        reset_at: Optional[int] = None,
        token_required: bool = True,
    ):
        if len({e.record.bibcode for e in corpus}) != len(corpus):
            raise ValueError("corpus bibcodes must be unique")
        self._http = _CorpusHTTPServer(
            ("127.0.0.1", port),
            _Handler,
            corpus=corpus,
            limit=limit,
            reset_at=reset_at if reset_at is not None else int(time.time()) + 86400,
            token_required=token_required,
        )
        self._thread: Optional[threading.Thread] = None

    @property
    def base_url(self) -> str:
        host, port = self._http.server_address[:2]
        return f"http://{host}:{port}"

    @property
    def reset_at(self) -> int:
        return self._http.reset_at

    def start(self) -> "MockScixServer":
        self._thread = threading.Thread(target=self._http.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._http.shutdown()
        self._http.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


def serve(corpus: list[CorpusEntry], port: int = 0, **kwargs: Any) -> MockScixServer:
    """Start a mock server for the given corpus; returns the running server."""
    return MockScixServer(corpus, port=port, **kwargs).start()


def main(argv: Optional[list[str]] = None) -> int:
    import argparse

    parser = argparse.ArgumentParser(
        prog="incite-mock-scix", description="Serve a JSON corpus over the literature-API wire format."
    )
    parser.add_argument("corpus", help="JSON corpus file")
    parser.add_argument("--port", type=int, default=8642)
    parser.add_argument("--limit", type=int, default=5000, help="daily request budget")
    parser.add_argument("--no-auth", action="store_true", help="do not require a bearer token")
    args = parser.parse_args(argv)

    server = MockScixServer(
        load_corpus(args.corpus),
        port=args.port,
        limit=args.limit,
        token_required=not args.no_auth,
    )
    print(f"serving on {server.base_url} (limit {args.limit})")
    try:
        server._http.serve_forever()
    except KeyboardInterrupt:
        server.stop()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
