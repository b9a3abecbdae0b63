import numpy as np
import pytest

from groupaccess.builtins import builtin_representation, builtin_table

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def record(crit, passed, detail=""):
    ACCEPTANCE[crit] = (bool(passed), detail)
    line = f"ACCEPTANCE {crit}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: (len(c), c)):
        ok, detail = ACCEPTANCE[crit]
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def rep_of():
    return builtin_representation


@pytest.fixture(scope="session")
def table_of():
    return builtin_table


def random_rates(rng, g, t_max=5.0):
    """Dirichlet rates on the non-identity elements and a uniform time."""
    q = np.zeros(g)
    if g > 1:
        q[1:] = rng.dirichlet(np.ones(g - 1))
    return q, rng.uniform(0, t_max)
