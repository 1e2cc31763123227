from __future__ import annotations

from pathlib import Path

import pytest

from guadasim.fixtures import load_hardware

CORPUS_DIR = Path(__file__).parent / "corpus"


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # expose per-phase outcomes so the acceptance module can print a
    # pass/fail line per criterion
    outcome = yield
    rep = outcome.get_result()
    setattr(item, f"rep_{rep.when}", rep)


@pytest.fixture(scope="session")
def omap4():
    return load_hardware("omap4")


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR
