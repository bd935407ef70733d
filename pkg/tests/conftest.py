import time
from types import SimpleNamespace

import pytest

from sgdkf.cli import cmd_estimate, load_config

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number} [{status}] {title}"
        if detail:
            line += f" :: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_config():
    return load_config("default", env={})


@pytest.fixture(scope="session")
def suite_run(tmp_path_factory, default_config):
    """The bundled 8-row suite, run once per session through the CLI pipeline."""
    out = tmp_path_factory.mktemp("suite")
    start = time.perf_counter()
    code = cmd_estimate(default_config, "both", out)
    elapsed = time.perf_counter() - start
    return SimpleNamespace(out=out, exit_code=code, elapsed=elapsed, config=default_config)
