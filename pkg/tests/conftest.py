import numpy as np
import pytest


def random_density(rng, dim=4, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(rng, dim=4):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_unitary(rng, dim=2):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one summary line per acceptance criterion

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n, title = marker.args
    ok = call.excinfo is None
    prev = _criteria.get(n, (title, True))
    _criteria[n] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria, key=lambda k: (int(str(k).rstrip("abcdef")), str(k))):
        title, ok = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
