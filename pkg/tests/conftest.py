import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
if str(TESTS) not in sys.path:
    sys.path.insert(0, str(TESTS))

from fslice.lang import parse_program, validate  # noqa: E402


def corpus_paths() -> list[Path]:
    return sorted((TESTS / "corpus").glob("*.fsl"))


def ho_paths() -> list[Path]:
    return sorted((TESTS / "corpus" / "ho").glob("*.fsl"))


def load(path: Path, higher_order: bool = False):
    p = parse_program(path.read_text(encoding="utf-8"))
    return validate(p, higher_order=higher_order)


def golden(name: str) -> str:
    return (TESTS / "golden" / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus() -> dict:
    return {path.stem: load(path) for path in corpus_paths()}


@pytest.fixture(scope="session")
def ho_corpus() -> dict:
    return {path.stem: load(path, higher_order=True) for path in ho_paths()}
