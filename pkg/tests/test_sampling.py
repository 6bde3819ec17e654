import numpy as np
import pytest

from monogamy.qlinalg import ValidationError, schmidt_squared
from monogamy.sampling import (
    haar_unitary,
    majorizing_pair,
    random_probability,
    sample_bipartite_mixed,
    sample_mixed,
    sample_pure,
    sample_separable,
)
from monogamy.qlinalg import majorizes, partial_transpose, eigenvalues_desc


def within_3_sigma(samples, mean, var):
    se = np.sqrt(var / samples.size)
    return abs(samples.mean() - mean) <= 3 * se


def test_haar_unitary_is_unitary():
    U = haar_unitary(6, 0)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(6), atol=1e-13)


def test_haar_trace_moments():
    # E|tr U|^2 = 1 for Haar unitaries of any size
    rng = np.random.default_rng(1)
    t = np.array([abs(np.trace(haar_unitary(4, rng))) ** 2 for _ in range(20_000)])
    assert within_3_sigma(t, 1.0, np.var(t))


def test_pure_amplitude_statistics():
    # |a|^2 of a random unit vector in C^4 is Beta(1, 3): mean 1/4, variance 3/80
    rng = np.random.default_rng(2)
    v = np.array([abs(sample_pure(2, 2, rng).amplitudes[1]) ** 2 for _ in range(100_000)])
    assert within_3_sigma(v, 0.25, 3 / 80)
    assert v.var() == pytest.approx(3 / 80, rel=0.03)


def test_schmidt_gap_statistics():
    # for 2x2 the gap g = p1 - p2 has density 3 g^2 on [0, 1]
    rng = np.random.default_rng(3)
    g = np.array([np.diff(schmidt_squared(sample_pure(2, 2, rng)))[0] for _ in range(100_000)])
    g = -g
    assert within_3_sigma(g, 0.75, 3 / 80)


def test_pure_phase_convention():
    psi = sample_pure(1, 1, 5)
    assert psi.amplitudes[0] == pytest.approx(1.0)
    assert sample_pure(3, 2, 9).amplitudes[0].imag == 0


def test_seed_reproducible():
    np.testing.assert_array_equal(sample_pure(4, 4, 11).amplitudes, sample_pure(4, 4, 11).amplitudes)
    np.testing.assert_array_equal(sample_mixed(4, 2, 11).data, sample_mixed(4, 2, 11).data)


def test_mixed_rank():
    for r in range(1, 5):
        rho = sample_mixed(4, r, r)
        assert np.sum(rho.spectrum() > 1e-12) == r


def test_mixed_mean_is_maximally_mixed():
    rng = np.random.default_rng(4)
    acc = sum(sample_mixed(3, 2, rng).data for _ in range(20_000)) / 20_000
    np.testing.assert_allclose(acc, np.eye(3) / 3, atol=0.01)


def test_bipartite_dims():
    assert sample_bipartite_mixed(4, 3, 2, 0).dims == (4, 3)


def test_separable_is_ppt():
    for seed in range(10):
        rho = sample_separable(3, 2, 4, seed)
        assert eigenvalues_desc(partial_transpose(rho))[-1] >= -1e-12


def test_validation():
    with pytest.raises(ValidationError):
        sample_mixed(3, 4)
    with pytest.raises(ValidationError):
        sample_pure(0, 2)


def test_random_probability_sorted():
    p = random_probability(6, 0)
    assert np.all(np.diff(p) <= 0) and p.sum() == pytest.approx(1.0)


def test_majorizing_pair():
    rng = np.random.default_rng(5)
    for d in range(1, 7):
        for _ in range(100):
            q, p = majorizing_pair(d, rng)
            assert majorizes(q, p)
