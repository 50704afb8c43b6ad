from __future__ import annotations

from pathlib import Path

import pytest

from amt.syntax import parse

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"


def load(name: str):
    path = MODELS / name
    return parse(path.read_text(encoding="utf-8"), str(path))


@pytest.fixture
def bank():
    return load("bank.amt")
