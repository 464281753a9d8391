import pathlib

import pytest

from mirtaint import ir

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def corpus_path(name: str) -> str:
    return str(CORPUS / name)


def load(name: str) -> ir.Program:
    text = (CORPUS / name).read_text()
    program = ir.parse_program(text)
    assert not ir.validate(program), f"{name} should validate cleanly"
    return program


@pytest.fixture
def corpus():
    return load
