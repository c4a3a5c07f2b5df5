import math
from collections import OrderedDict

import numpy as np
import pytest

from capflow.capgeom import cap_state

# (label, n, theta, r, amplitude, mode). Amplitudes sit below the largest
# values that still validate at m = 400.
CORPUS = [
    ("cap_n2_pi3_r1", 2, math.pi / 3, 1.0, 0.0, 1),
    ("cap_n3_pi4_r05", 3, math.pi / 4, 0.5, 0.0, 1),
    ("cap_n4_pi2_r2", 4, math.pi / 2, 2.0, 0.0, 1),
    ("pert_n2_pi3_r1_a02", 2, math.pi / 3, 1.0, 0.02, 1),
    ("pert_n2_pi3_r05_m2", 2, math.pi / 3, 0.5, 0.015, 2),
    ("pert_n2_pi2_r1_a05", 2, math.pi / 2, 1.0, 0.05, 1),
    ("pert_n2_pi6_r05", 2, math.pi / 6, 0.5, 0.01, 1),
    ("pert_n3_pi4_r1", 3, math.pi / 4, 1.0, 0.02, 1),
    ("pert_n3_pi2_r2", 3, math.pi / 2, 2.0, 0.03, 1),
    ("pert_n3_pi3_r05_m2", 3, math.pi / 3, 0.5, 0.01, 2),
    ("pert_n4_pi3_r1", 4, math.pi / 3, 1.0, 0.03, 1),
    ("pert_n4_pi6_r1", 4, math.pi / 6, 1.0, 0.008, 1),
]


def corpus_state(entry, m):
    """Corpus member sampled on an m-cell grid (not validated here)."""
    _, n, theta, r, amp, mode = entry
    base = cap_state(theta, r, m, n)
    return base.with_u(base.u + amp * np.cos(2 * mode * base.beta))


def is_cap(entry):
    return entry[4] == 0.0


@pytest.fixture(scope="session")
def corpus400():
    return OrderedDict((e[0], corpus_state(e, 400)) for e in CORPUS)


# ---- acceptance reporting -------------------------------------------------

_CRITERIA = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "tests": 0})
    if rep.when == "call":
        entry["tests"] += 1
    if rep.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {e['title']}  ({e['tests']} tests)")
