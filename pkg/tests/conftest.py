import math

import pytest

from obe3b.coeffs import BracketProvider, build_hyper_table, load_tables, save_tables

ACCEPTANCE_QMAX = 28


@pytest.fixture(scope="session")
def hyper_small():
    return build_hyper_table(12)


@pytest.fixture(scope="session")
def cache_file(tmp_path_factory):
    """Coefficient cache covering every acceptance table, built once per session."""
    path = tmp_path_factory.mktemp("cache") / "hyper28.bin"
    save_tables(build_hyper_table(ACCEPTANCE_QMAX), path)
    return path


@pytest.fixture(scope="session")
def hyper_full(cache_file):
    return load_tables(cache_file)


@pytest.fixture(scope="session")
def bm_pi6():
    return BracketProvider().table(math.pi / 6)


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Store one pass/fail line per acceptance criterion for the end-of-run summary."""

    def record(number: int, ok: bool, detail: str):
        _ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
