import sys
from pathlib import Path

import pytest

# make the oracle helpers importable as a plain module
sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Recorder for one acceptance criterion: ``record(n, ok, seconds, detail)``."""
    def record(n: int, ok: bool, seconds: float, detail: str) -> None:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  [{seconds:.1f} s]  {detail}"
        _ACCEPTANCE[n] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
