import json
import pathlib
import sys

import pytest

HERE = pathlib.Path(__file__).parent
sys.path.insert(0, str(HERE))

from qbt.damping import DrudeParams  # noqa: E402

#: (w0, Omega, gamma) of the four reference curves, bottom to top.
FIG1 = [(1.0, 1.0, 1.5), (1.0, 1.0, 4.0), (1.0, 5.0, 1.5), (1.0, 5.0, 4.0)]


@pytest.fixture(scope="session")
def frozen():
    return json.loads((HERE / "data" / "frozen.json").read_text())


@pytest.fixture(params=FIG1, ids=lambda s: f"W{s[1]:g}-g{s[2]:g}")
def fig1_params(request):
    return DrudeParams(*request.param)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects ``{criterion: (passed, detail)}`` for the end-of-run summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(log):
        ok, detail = log[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
