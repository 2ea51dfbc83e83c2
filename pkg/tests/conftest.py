import numpy as np
import pytest

from oiasim.channel import UserChannels
from oiasim.linalg import herm, random_gaussian_matrix

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def random_generator(rng, n, m):
    """Uniformly distributed point of the Grassmannian as an n x m generator."""
    q, _ = np.linalg.qr(random_gaussian_matrix(n, m, rng))
    return q


def random_semi_unitary(rng, m, n):
    """m x n matrix with orthonormal rows."""
    return herm(random_generator(rng, n, m))


def random_user(rng, M):
    return UserChannels(*(random_gaussian_matrix(2 * M, M, rng) for _ in range(3)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the terminal summary prints them all."""

    def report(name, ok, detail=""):
        _ACCEPTANCE.append((name, bool(ok), detail))
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
