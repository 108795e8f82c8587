"""Text normalization helpers used by the scanner, the ranker and key generation."""

from __future__ import annotations

import re
import unicodedata

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


def fold(text: str) -> str:
    """Diacritic- and case-insensitive form: NFD, strip combining marks, casefold."""
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c)).casefold()


def tokenize_words(text: str) -> list[str]:
    """Lowercased alphanumeric tokens, split on everything else."""
    return _WORD_RE.findall(text.lower())


# Standard English stopwords plus LaTeX residue that survives command stripping.
# Tokens shorter than 3 characters are dropped by the context pipeline anyway,
# so two-letter function words do not need to be listed.
STOPWORDS = frozenset(
    """
    about above after again against all also among and another any are aren
    because been before being below between both but can cannot could couldn
    did didn does doesn doing don down during each few for from further had
    hadn has hasn have haven having her here hers herself him himself his how
    into isn its itself just let more most mustn myself nor not now off once
    only other ought our ours ourselves out over own same shan she should
    shouldn some such than that the their theirs them themselves then there
    these they this those through too under until very was wasn were weren
    what when where which while who whom why will with won would wouldn you
    your yours yourself yourselves
    citep citet label ref
    """.split()
)
