import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from suwitness.algebra import build_operator_set  # noqa: E402
from suwitness.catalog import random_guarded_state, two_photon_theta  # noqa: E402
from suwitness.fock import build_space  # noqa: E402


@pytest.fixture(scope="session")
def space8():
    return build_space(8, 8)


@pytest.fixture(scope="session")
def ops8(space8):
    return build_operator_set(space8)


@pytest.fixture(scope="session")
def tp45(space8):
    return two_photon_theta(math.pi / 4, space8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def guarded_states(space8):
    r = np.random.default_rng(11)
    return [random_guarded_state(r, space8, guard=4) for _ in range(20)]


# --- acceptance reporting ----------------------------------------------------
# Tests marked ``@pytest.mark.acceptance(n, title)`` get one PASS/FAIL line in the
# terminal summary, together with any ``detail`` recorded via record_property.

_acceptance: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (rep.when != "call" and rep.passed):
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    status = "PASS" if rep.passed else "FAIL"
    if rep.when == "call" or status == "FAIL":
        _acceptance[number] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        status, title, detail = _acceptance[number]
        line = f"[{status}] criterion {number}: {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
