from pathlib import Path

import pytest

from dnsadvisor import load_corpus

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_corpus(name: str, metadata: bool = True, anchor: str = "."):
    directory = FIXTURES / name
    zones = sorted(str(p) for p in directory.glob("*.zone"))
    meta = directory / "metadata.json"
    return load_corpus(zones, str(meta) if metadata and meta.exists() else None,
                       anchor=anchor)


def fixture_paths(name: str) -> tuple[list[str], str | None]:
    directory = FIXTURES / name
    zones = sorted(str(p) for p in directory.glob("*.zone"))
    meta = directory / "metadata.json"
    return zones, str(meta) if meta.exists() else None


@pytest.fixture(scope="session")
def case1():
    return fixture_corpus("case1")


@pytest.fixture(scope="session")
def case1_refactored():
    return fixture_corpus("case1_refactored")


@pytest.fixture(scope="session")
def case2():
    return fixture_corpus("case2")


@pytest.fixture(scope="session")
def minimal():
    return fixture_corpus("minimal")


@pytest.fixture(scope="session")
def clean():
    return fixture_corpus("clean")
