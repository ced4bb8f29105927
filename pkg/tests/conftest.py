import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sepcones import qlinalg as ql
from sepcones.generate import sample

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_qmat(rng, rows, cols, ncomp=4):
    A = np.zeros((rows, cols, 4))
    A[..., :ncomp] = rng.normal(size=(rows, cols, ncomp))
    return A


def random_herm(rng, n, ncomp=4):
    return ql.herm(random_qmat(rng, n, n, ncomp))


def random_psd(rng, n, rank=None, ncomp=4):
    G = random_qmat(rng, n, rank or n, ncomp)
    return ql.herm(ql.mm(G, ql.ct(G)))


def separable(m, n, seed):
    return sample(("tensor", m, n), "separable", seed)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
