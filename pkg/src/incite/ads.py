"""Authenticated transport to the ADS/SciX search and export endpoints.

The client talks to any transport implementing ``send``; besides the live
HTTP transport there is a recording wrapper and a replay transport that
serves stored fixtures, so the whole test suite runs offline and
deterministically. Budget bookkeeping follows the service's daily request
cap via the X-RateLimit-* headers.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

import requests

from .errors import (
    AuthFailed,
    MalformedResponse,
    NotFound,
    RateLimited,
    ReplayMiss,
    TransportError,
)
from .query import AdsQuery

logger = logging.getLogger(__name__)

ADS_API_BASE = "https://api.adsabs.harvard.edu"
TOKEN_ENV_VAR = "ADS_API_TOKEN"
DAILY_LIMIT = 5000
LOW_BUDGET_THRESHOLD = 100
MAX_EXPORT_BIBCODES = 100


@dataclass(frozen=True)
class AdsRecord:
    """One candidate paper as returned by the search endpoint."""

    bibcode: str
    title: str = ""
    authors: tuple[str, ...] = ()
    year: int = 0
    citation_count: int = 0
    abstract: Optional[str] = None
    pub: Optional[str] = None
    doi: Optional[str] = None


@dataclass(frozen=True)
class RateBudget:
    limit: int = DAILY_LIMIT
    remaining: int = DAILY_LIMIT
    reset_at: int = 0


@dataclass(frozen=True)
class TransportResponse:
    status: int
    headers: Mapping[str, str]
    text: str

    def header(self, name: str) -> Optional[str]:
        lowered = name.lower()
        for key, value in self.headers.items():
            if key.lower() == lowered:
                return value
        return None


def canonical_request(
    method: str,
    path: str,
    params: Optional[Mapping[str, str]] = None,
    json_body: Any = None,
) -> dict:
    return {
        "method": method.upper(),
        "path": path,
        "params": dict(params or {}),
        "body": json_body,
    }


def fixture_key(descriptor: dict) -> str:
    blob = json.dumps(descriptor, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:24]


class HttpTransport:
    """Live HTTPS transport; raises TransportError on network failure."""

    needs_auth = True

    def __init__(self, base_url: str = ADS_API_BASE, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()

    def send(
        self,
        method: str,
        path: str,
        params: Optional[Mapping[str, str]] = None,
        json_body: Any = None,
        headers: Optional[Mapping[str, str]] = None,
    ) -> TransportResponse:
        try:
            response = self._session.request(
                method,
                self.base_url + path,
                params=params,
                json=json_body,
                headers=dict(headers or {}),
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"{method} {path}: {exc}") from exc
        return TransportResponse(
            status=response.status_code,
            headers=dict(response.headers),
            text=response.text,
        )


class ReplayTransport:
    """Serves responses recorded as JSON files; never touches the network."""

    needs_auth = False

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def send(
        self,
        method: str,
        path: str,
        params: Optional[Mapping[str, str]] = None,
        json_body: Any = None,
        headers: Optional[Mapping[str, str]] = None,
    ) -> TransportResponse:
        descriptor = canonical_request(method, path, params, json_body)
        fixture = self.directory / f"{fixture_key(descriptor)}.json"
        if not fixture.exists():
            raise ReplayMiss(
                f"no fixture for {descriptor['method']} {descriptor['path']} "
                f"params={descriptor['params']} body={descriptor['body']} in {self.directory}"
            )
        payload = json.loads(fixture.read_text(encoding="utf-8"))
        recorded = payload["response"]
        return TransportResponse(
            status=int(recorded["status"]),
            headers=dict(recorded.get("headers", {})),
            text=recorded.get("text", ""),
        )


class RecordingTransport:
    """Forwards to an inner transport and stores each response as a fixture."""

    def __init__(self, inner: HttpTransport, directory: str | Path):
        self.inner = inner
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @property
    def needs_auth(self) -> bool:
        return self.inner.needs_auth

    def send(
        self,
        method: str,
        path: str,
        params: Optional[Mapping[str, str]] = None,
        json_body: Any = None,
        headers: Optional[Mapping[str, str]] = None,
    ) -> TransportResponse:
        response = self.inner.send(method, path, params, json_body, headers)
        descriptor = canonical_request(method, path, params, json_body)
        rate_headers = {
            k: v
            for k, v in response.headers.items()
            if k.lower().startswith("x-ratelimit") or k.lower() == "content-type"
        }
        fixture = {
            "request": descriptor,
            "response": {
                "status": response.status,
                "headers": rate_headers,
                "text": response.text,
            },
        }
        path_on_disk = self.directory / f"{fixture_key(descriptor)}.json"
        path_on_disk.write_text(
            json.dumps(fixture, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return response


class AdsClient:
    """Search and BibTeX export against the two service endpoints.

    Token sourcing: explicit argument (typically from config), then the
    ADS_API_TOKEN environment variable. The token is never logged. At most
    two live requests are in flight at any time (politeness cap) and
    budget updates are atomic.
    """

    def __init__(
        self,
        token: Optional[str] = None,
        *,
        base_url: Optional[str] = None,
        transport: Optional[Any] = None,
        max_retries: int = 2,
        retry_wait: float = 0.5,
    ):
        self.transport = transport or HttpTransport(base_url or ADS_API_BASE)
        self.token = token or os.environ.get(TOKEN_ENV_VAR) or None
        self.max_retries = max_retries
        self.retry_wait = retry_wait
        self._budget = RateBudget()
        self._budget_lock = threading.Lock()
        self._inflight = threading.BoundedSemaphore(2)

    @property
    def budget(self) -> RateBudget:
        with self._budget_lock:
            return self._budget

    def _headers(self) -> dict[str, str]:
        if not self.token:
            if getattr(self.transport, "needs_auth", True):
                raise AuthFailed(
                    "no API token configured (set the api_token config field "
                    f"or the {TOKEN_ENV_VAR} environment variable)"
                )
            return {}
        return {"Authorization": f"Bearer {self.token}"}

    def _request(
        self,
        method: str,
        path: str,
        params: Optional[Mapping[str, str]] = None,
        json_body: Any = None,
    ) -> TransportResponse:
        headers = self._headers()
        response: Optional[TransportResponse] = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.retry_wait * (2 ** (attempt - 1)))
            try:
                with self._inflight:
                    response = self.transport.send(method, path, params, json_body, headers)
            except ReplayMiss:
                raise
            except TransportError:
                if attempt == self.max_retries:
                    raise
                continue
            if response.status >= 500:
                if attempt == self.max_retries:
                    raise TransportError(f"{method} {path}: server error {response.status}")
                continue
            break
        assert response is not None
        self._update_budget(response)
        if response.status in (401, 403):
            raise AuthFailed(f"server rejected credentials ({response.status})")
        if response.status == 429:
            raise RateLimited(reset_at=_int_header(response, "X-RateLimit-Reset"))
        return response

    def _update_budget(self, response: TransportResponse) -> None:
        limit = _int_header(response, "X-RateLimit-Limit")
        remaining = response.header("X-RateLimit-Remaining")
        if remaining is None:
            return
        with self._budget_lock:
            self._budget = RateBudget(
                limit=limit or self._budget.limit,
                remaining=int(remaining),
                reset_at=_int_header(response, "X-RateLimit-Reset"),
            )
            low = self._budget.remaining
        if low < LOW_BUDGET_THRESHOLD:
            logger.warning("rate budget low: %d requests remaining today", low)

    def search(self, query: AdsQuery) -> tuple[list[AdsRecord], RateBudget]:
        """Run a search query; returns parsed records in server order."""
        params = {
            "q": query.q,
            "fl": ",".join(query.fields),
            "rows": str(query.rows),
            "sort": query.sort,
        }
        response = self._request("GET", "/v1/search/query", params=params)
        try:
            payload = json.loads(response.text)
            docs = payload["response"]["docs"]
            records = [_record_from_doc(doc) for doc in docs]
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponse(f"unparseable search response: {exc}") from exc
        return records, self.budget

    def export_bibtex(self, bibcodes: list[str]) -> str:
        """Concatenated BibTeX entries for the given bibcodes, keys as
        generated by the server (re-keying happens downstream)."""
        if not 1 <= len(bibcodes) <= MAX_EXPORT_BIBCODES:
            raise ValueError(
                f"export takes between 1 and {MAX_EXPORT_BIBCODES} bibcodes, got {len(bibcodes)}"
            )
        response = self._request(
            "POST", "/v1/export/bibtex", json_body={"bibcode": list(bibcodes)}
        )
        if response.status == 404:
            missing = bibcodes
            try:
                body = json.loads(response.text)
                missing = body.get("missing", bibcodes)
            except ValueError:
                pass
            raise NotFound(missing)
        try:
            payload = json.loads(response.text)
            export = payload["export"]
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponse(f"unparseable export response: {exc}") from exc
        if not isinstance(export, str):
            raise MalformedResponse("export field is not text")
        return export


def _int_header(response: TransportResponse, name: str) -> int:
    value = response.header(name)
    try:
        return int(value) if value is not None else 0
    except ValueError:
        return 0


def _first(value: Any) -> Any:
    if isinstance(value, list):
        return value[0] if value else None
    return value


def _record_from_doc(doc: Mapping[str, Any]) -> AdsRecord:
    bibcode = doc.get("bibcode")
    if not bibcode:
        raise KeyError("record without bibcode")
    title = _first(doc.get("title")) or ""
    year_raw = doc.get("year")
    try:
        year = int(year_raw) if year_raw is not None else 0
    except (TypeError, ValueError):
        year = 0
    return AdsRecord(
        bibcode=str(bibcode),
        title=str(title),
        authors=tuple(doc.get("author") or ()),
        year=year,
        citation_count=int(doc.get("citation_count") or 0),
        abstract=doc.get("abstract"),
        pub=doc.get("pub"),
        doi=_first(doc.get("doi")),
    )
