import pytest

from fidkit.linalg import make_rng

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def report(name: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
        print(_ACCEPTANCE[-1])
        assert ok, f"{name}: {detail}"

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


def spd(rng, d, k=None):
    """Random PSD matrix B B^T with ``k`` columns in B (default d)."""
    b = rng.standard_normal((d, k or d))
    return b @ b.T
