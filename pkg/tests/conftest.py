import numpy as np
import pytest
from hypothesis import settings

from dlf.basis import generate_nodes, make_psi_family, validate_basis

settings.register_profile("dlf", deadline=None, max_examples=60)
settings.load_profile("dlf")


def build_basis(kind="identity", params=None, n=8, a=-1.0, b=1.0, scheme="cgl"):
    """One-stop basis factory used across the suite."""
    nodes = generate_nodes(scheme, n, a, b)
    fam = make_psi_family(kind, params or {}, size=n + 1)
    return validate_basis(fam, nodes)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            if "test_acceptance" in rep.nodeid and rep.when == "call":
                rows.append((rep.nodeid.split("::")[-1], status.upper()))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(rows):
            terminalreporter.write_line(f"{status:7s} {name}")
