"""Exception hierarchy shared across the engine.

All domain failures derive from :class:`InciteError` so callers (CLI,
stdio server) can map them to exit codes / JSON-RPC error codes in one
place.
"""

from __future__ import annotations


class InciteError(Exception):
    """Base class for every domain error raised by this package."""


class NotInCitation(InciteError):
    """The requested offset does not fall inside any citation command."""


class EmptyCue(InciteError):
    """A citation key was empty or whitespace-only."""


class BadYear(InciteError):
    """A year string did not have 2 or 4 decimal digits."""


class AdsError(InciteError):
    """Base class for API-client failures."""


class AuthFailed(AdsError):
    """Missing token, or the server rejected it (401/403)."""


class RateLimited(AdsError):
    """Daily request budget exhausted (429)."""

    def __init__(self, message: str = "rate limit exceeded", reset_at: int = 0):
        super().__init__(message)
        self.reset_at = reset_at


class TransportError(AdsError):
    """Network failure or 5xx after retries."""


class ReplayMiss(TransportError):
    """No recorded fixture matches the request (replay transport only)."""


class MalformedResponse(AdsError):
    """The server answered with a body the client cannot interpret."""


class NotFound(AdsError):
    """One or more requested bibcodes are unknown to the server."""

    def __init__(self, missing: list[str] | None = None, message: str | None = None):
        self.missing = list(missing or [])
        super().__init__(message or f"bibcodes not found: {', '.join(self.missing) or '?'}")


class NoAuthors(InciteError):
    """Key generation needs an author list but the record has none."""


class DuplicateKey(InciteError):
    """The bibliography already contains an entry with this key."""


class StaleFile(InciteError):
    """A target file changed between planning and applying an edit."""


class EmptyResults(InciteError):
    """No candidate matched, even after the full widening ladder."""


class NoBibTarget(InciteError):
    """No bibliography file could be determined for the insertion."""
