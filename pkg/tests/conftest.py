from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from incite.ads import AdsClient, ReplayTransport
from incite.config import InciteConfig
from incite.mockscix import CorpusEntry, load_corpus

FIXTURES = Path(__file__).parent / "fixtures"
REPLAY_DIR = FIXTURES / "replay"
PROJECT_DIR = FIXTURES / "project"
GOLDEN_DIR = FIXTURES / "golden"
CORPUS_PATH = FIXTURES / "corpus.json"

FIXTURE_BIBCODE = "2025ApJ...985...10S"


@pytest.fixture(scope="session")
def corpus() -> list[CorpusEntry]:
    return load_corpus(CORPUS_PATH)


@pytest.fixture
def replay_client() -> AdsClient:
    return AdsClient(transport=ReplayTransport(REPLAY_DIR))


@pytest.fixture
def default_config() -> InciteConfig:
    return InciteConfig()


@pytest.fixture
def project(tmp_path: Path) -> Path:
    """Fresh copy of the sample LaTeX project."""
    target = tmp_path / "project"
    shutil.copytree(PROJECT_DIR, target)
    return target


def placeholder_offset(text: str, needle: str = "Shariat25") -> int:
    return text.encode("utf-8").index(needle.encode("utf-8"))
