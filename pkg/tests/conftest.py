import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def lambda_wt_grid():
    """(lambda, omega*t) grid shared by several invariants: 5 couplings x 64 times."""
    lams = (0.0, 0.05, 0.1, 0.2, 0.5)
    wts = np.linspace(0.0, 4.0 * np.pi, 64)
    return [(lam, float(wt)) for lam in lams for wt in wts]


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", None) != "call":
                continue
            lines.extend(v for k, v in rep.user_properties if k == "acceptance")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[2])):
            terminalreporter.write_line(line)
