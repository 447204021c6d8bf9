import json
from pathlib import Path

import pytest

from adaptbpe.vocab_model import extend, load_extended, load_merges, load_vocabulary

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def golden():
    return json.loads((FIXTURES / "golden.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def base_vocab():
    return load_vocabulary(FIXTURES / "vocab.json")


@pytest.fixture(scope="session")
def base_merges():
    return load_merges(FIXTURES / "merges.txt")


@pytest.fixture(scope="session")
def base_ev(base_vocab, base_merges):
    return extend(base_vocab, base_merges)


@pytest.fixture(scope="session")
def medical_ev():
    return load_extended(FIXTURES / "vocab.json", FIXTURES / "merges_ext.txt", FIXTURES / "domain.txt")


@pytest.fixture(scope="session")
def cholesterol_ev(base_vocab, base_merges):
    chain = [("cholesterol"[:i], "cholesterol"[i]) for i in range(1, len("cholesterol"))]
    return extend(base_vocab, base_merges, ["cholesterol"], chain)


@pytest.fixture(scope="session")
def medical_corpus():
    return (FIXTURES / "medical_corpus.txt").read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def toy_corpus():
    return (FIXTURES / "toy_corpus.txt").read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def english_corpus():
    return (FIXTURES / "english.txt").read_text(encoding="utf-8").splitlines()
