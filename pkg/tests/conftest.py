import numpy as np
import pytest

from monogamy.qlinalg import BipartitePureState, DensityMatrix, maximally_entangled

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def bell():
    return maximally_entangled(2).density_matrix()


@pytest.fixture
def max_entangled_44():
    return maximally_entangled(4).density_matrix()


def random_density(rng, d, rank=None, dims=None):
    rank = d if rank is None else rank
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ G.conj().T
    return DensityMatrix(rho / np.trace(rho).real, dims or (d,))


def random_pure(rng, dA, dB):
    v = rng.standard_normal(dA * dB) + 1j * rng.standard_normal(dA * dB)
    return BipartitePureState.normalized(v, dA, dB)


def record(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
