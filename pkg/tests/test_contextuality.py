import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density
from monogamy.contextuality import (
    CHSH_CMAX,
    SQRT2,
    ChshObservables,
    SpectralSet,
    build_chsh_observables,
    chsh_family_sup,
    chsh_family_sup_numeric,
    chsh_family_vector,
    chsh_full_value,
    chsh_oracle_search,
    chsh_spectral_set,
    chsh_value,
    compress_spectrum,
    lc_entropy,
    spectral_context_value,
    witness_identity_residual,
)
from monogamy.qlinalg import DensityMatrix, ValidationError, eigenvalues_desc

probability = st.lists(st.floats(0, 1), min_size=1, max_size=8).filter(lambda v: sum(v) > 1e-3).map(
    lambda v: np.array(v) / sum(v)
)


def grid_family_sup(p, n=200_001):
    """Brute force over the r family: sorted dot products on a dense grid.

    The grid runs over the angle with sqrt(1+r) = sqrt2 cos t, sqrt(1-r) = sqrt2 sin t
    so that it stays uniform where sqrt(1-r) is singular.
    """
    p = compress_spectrum(p, 4)
    t = np.linspace(0, np.pi / 4, n)
    c, s = np.sqrt(2) * np.cos(t), np.sqrt(2) * np.sin(t)
    mu = np.stack([c, s, -s, -c], axis=1)
    return float(np.max(mu @ p))


class TestClosedForm:
    def test_pure(self):
        assert chsh_value([1, 0, 0, 0]) == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_maximally_mixed(self):
        assert chsh_value([0.25] * 4) == 0.0
        assert chsh_full_value([0.25] * 4) == 1.0

    def test_worked_example(self):
        assert chsh_value([0.5, 0.3, 0.15, 0.05]) == pytest.approx(np.sqrt(0.45), abs=1e-14)

    def test_short_vector_is_padded(self):
        assert chsh_full_value([0.6, 0.4]) == pytest.approx(np.sqrt(1.04), abs=1e-14)

    def test_order_does_not_matter(self):
        assert chsh_value([0.05, 0.3, 0.5, 0.15]) == chsh_value([0.5, 0.3, 0.15, 0.05])

    def test_rejects_rank_above_four(self):
        with pytest.raises(ValidationError):
            chsh_value([0.2] * 5)

    def test_accepts_padded_zeros(self):
        assert chsh_value([0.6, 0.4, 0, 0, 0, 0]) == chsh_value([0.6, 0.4])

    def test_rejects_non_probability(self):
        with pytest.raises(ValidationError):
            chsh_value([0.7, 0.7])
        with pytest.raises(ValidationError):
            chsh_value([1.2, -0.2])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3))
    def test_matches_grid_oracle(self, v):
        p = np.array(v) / sum(v)
        assert chsh_value(p) == pytest.approx(grid_family_sup(p), abs=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-1, 1), min_size=4, max_size=4))
    def test_bounded_search_agrees(self, v):
        assert chsh_family_sup_numeric(v, tol=1e-10) == pytest.approx(chsh_family_sup(v), abs=1e-8)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3))
    def test_bounded(self, v):
        p = np.array(v) / sum(v)
        assert 0.0 <= chsh_value(p) <= SQRT2 + 1e-12
        assert 1.0 <= chsh_full_value(p) <= SQRT2 + 1e-12


class TestSpectralSet:
    def test_family_vector(self):
        np.testing.assert_allclose(chsh_family_vector(1.0), [SQRT2, 0, 0, -SQRT2])
        np.testing.assert_allclose(chsh_family_vector(0.0), [1, 1, -1, -1])

    def test_chsh_set_matches_full_value(self, rng):
        S = chsh_spectral_set()
        for _ in range(100):
            p = rng.dirichlet(np.ones(4))
            assert spectral_context_value(p, S) == pytest.approx(chsh_full_value(p), abs=1e-14)

    def test_without_trivial_member(self, rng):
        S = chsh_spectral_set(include_trivial=False)
        p = np.array([0.25] * 4)
        assert spectral_context_value(p, S) == pytest.approx(0.0, abs=1e-15)

    def test_samples_are_sorted(self):
        S = SpectralSet(3, ([0, 2, 1],))
        np.testing.assert_array_equal(S.samples[0], [2, 1, 0])
        assert S.sup([0.5, 0.5, 0]) == pytest.approx(1.5)

    def test_generator_family(self):
        gen = lambda th: chsh_family_vector(th[0])
        S = SpectralSet(4, generator=gen, bounds=((0.0, 1.0),))
        p = np.array([0.5, 0.3, 0.15, 0.05])
        assert S.sup(p) == pytest.approx(chsh_value(p), abs=1e-7)

    @pytest.mark.parametrize("kwargs", [
        dict(d0=4),
        dict(d0=3, family="chsh"),
        dict(d0=4, family="bogus"),
        dict(d0=4, samples=([1, 2, 3],)),
        dict(d0=4, generator=lambda t: t),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            SpectralSet(**kwargs)

    def test_json_round_trip(self):
        S = SpectralSet(4, ([3, 1, 0, -1],), "chsh")
        T = SpectralSet.from_dict(json.loads(json.dumps(S.to_dict())))
        assert T.d0 == 4 and T.family == "chsh"
        np.testing.assert_array_equal(T.samples[0], S.samples[0])

    def test_generator_not_serializable(self):
        S = SpectralSet(2, generator=lambda t: [t[0], -t[0]], bounds=((0, 1),))
        with pytest.raises(ValidationError):
            S.to_dict()


class TestLcEntropy:
    S = chsh_spectral_set()

    def test_pure_is_zero(self):
        assert lc_entropy([1, 0, 0, 0], self.S, CHSH_CMAX) == pytest.approx(0.0, abs=1e-15)

    def test_two_level_uniform(self):
        assert lc_entropy([0.5, 0.5], self.S, CHSH_CMAX) == pytest.approx(SQRT2 - 1, abs=1e-14)

    def test_truncation_without_renormalization(self):
        p = np.array([0.3, 0.25, 0.2, 0.15, 0.1])
        expected = SQRT2 - max(1 * 0.9, chsh_family_sup(p[:4]))
        assert lc_entropy(p, self.S, CHSH_CMAX) == pytest.approx(expected, abs=1e-14)

    def test_rejects_small_cmax(self):
        with pytest.raises(ValidationError):
            lc_entropy([1, 0], self.S, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(probability, probability, st.floats(0, 1))
    def test_concave(self, p, q, t):
        n = max(p.size, q.size)
        p, q = np.pad(p, (0, n - p.size)), np.pad(q, (0, n - q.size))
        # concavity under mixing of commuting (diagonal) states
        mix = lc_entropy(t * p + (1 - t) * q, self.S, CHSH_CMAX)
        avg = t * lc_entropy(p, self.S, CHSH_CMAX) + (1 - t) * lc_entropy(q, self.S, CHSH_CMAX)
        assert mix >= avg - 1e-12

    def test_schur_monotone_up_to_four_levels(self):
        from monogamy.qlinalg import majorizes
        from monogamy.sampling import majorizing_pair

        rng = np.random.default_rng(8)
        for _ in range(1000):
            q, p = majorizing_pair(int(rng.integers(1, 5)), rng)
            assert majorizes(q, p)
            assert chsh_value(q) >= chsh_value(p) - 1e-12
            assert lc_entropy(q, self.S, CHSH_CMAX) <= lc_entropy(p, self.S, CHSH_CMAX) + 1e-12

    def test_unitary_invariance(self, rng):
        from monogamy.sampling import haar_unitary

        rho = random_density(rng, 4)
        base = lc_entropy(rho.spectrum(), self.S, CHSH_CMAX)
        for _ in range(100):
            p = rho.conjugate(haar_unitary(4, rng)).spectrum()
            assert lc_entropy(p, self.S, CHSH_CMAX) == pytest.approx(base, abs=1e-10)
            assert chsh_value(p) == pytest.approx(chsh_value(rho.spectrum()), abs=1e-10)

    @settings(max_examples=200, deadline=None)
    @given(probability)
    def test_expansible(self, p):
        assert lc_entropy(np.append(p, 0.0), self.S, CHSH_CMAX) == lc_entropy(p, self.S, CHSH_CMAX)

    @settings(max_examples=200, deadline=None)
    @given(probability)
    def test_nonnegative(self, p):
        assert lc_entropy(p, self.S, CHSH_CMAX) >= -1e-15


class TestObservables:
    def test_defaults(self):
        o = ChshObservables(0.6, 0.8)
        assert o.nu_hat1 == pytest.approx(0.8) and o.nu_hat2 == pytest.approx(0.6)
        np.testing.assert_array_equal(o.basis, np.eye(4))

    @pytest.mark.parametrize("kwargs", [
        dict(nu1=1.5, nu2=0.2),
        dict(nu1=0.5, nu2=0.5, nu_hat1=0.5),
        dict(nu1=0.5, nu2=0.5, eta=(1, 1, 1, 0)),
        dict(nu1=0.5, nu2=0.5, basis=np.ones((4, 4))),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            ChshObservables(**kwargs)

    def test_dichotomic(self, rng):
        A, _ = build_chsh_observables(ChshObservables(0.3, 0.7, eta=(1, -1, 1, -1)))
        for a in A:
            np.testing.assert_allclose(a @ a, np.eye(4), atol=1e-14)
            np.testing.assert_allclose(a, a.conj().T, atol=1e-15)
            assert abs(np.trace(a)) < 1e-14

    def test_zero_angle_commuting(self):
        _, w = build_chsh_observables(ChshObservables(0.0, 0.0))
        np.testing.assert_allclose(w.R, 0, atol=1e-15)
        np.testing.assert_allclose(w.spectrum, [2, 2, -2, -2], atol=1e-14)
        assert w.r == 0.0

    def test_spectrum_follows_family(self, rng):
        for _ in range(200):
            nu1, nu2 = rng.uniform(0, 1, 2)
            o = ChshObservables(nu1, nu2,
                                np.sqrt(1 - nu1**2) * np.exp(1j * rng.uniform(0, 7)),
                                np.sqrt(1 - nu2**2) * np.exp(1j * rng.uniform(0, 7)),
                                tuple(rng.choice([1, -1], 4)))
            _, w = build_chsh_observables(o)
            np.testing.assert_allclose(w.spectrum, 2 * chsh_family_vector(o.r), atol=1e-10)
            assert w.r == pytest.approx(o.r, abs=1e-10)
            assert abs(np.trace(w.T)) < 1e-12

    def test_square_identity(self, rng):
        for _ in range(200):
            nu1, nu2 = rng.uniform(0, 1, 2)
            q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
            _, w = build_chsh_observables(ChshObservables(nu1, nu2, basis=q))
            assert witness_identity_residual(w) <= 1e-12
            # the commutator product carries eigenvalues +-r/4, each twice
            lam = eigenvalues_desc((w.R + w.R.conj().T) / 2)
            np.testing.assert_allclose(lam, np.array([1, 1, -1, -1]) * w.r / 4, atol=1e-10)

    def test_eta_does_not_change_spectrum(self):
        base = build_chsh_observables(ChshObservables(0.4, 0.9))[1].spectrum
        for eta in [(1, 1, -1, 1), (-1, -1, -1, -1), (1, -1, 1, 1)]:
            w = build_chsh_observables(ChshObservables(0.4, 0.9, eta=eta))[1]
            np.testing.assert_allclose(w.spectrum, base, atol=1e-12)

    def test_maximal_violation(self):
        s = np.sqrt(0.5)
        _, w = build_chsh_observables(ChshObservables(s, s))
        assert w.r == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(w.spectrum, [2 * SQRT2, 0, 0, -2 * SQRT2], atol=1e-12)


class TestOracle:
    def test_pure_state(self):
        rho = DensityMatrix(np.diag([1.0, 0, 0, 0]).astype(complex))
        res = chsh_oracle_search(rho, budget=20_000, seed=1)
        assert res.value == pytest.approx(SQRT2, abs=1e-6)
        assert res.identity_residual <= 1e-9
        assert res.evaluations <= 20_000 + 10

    def test_oracle_never_exceeds_closed_form(self, rng):
        for i in range(10):
            rho = random_density(rng, 4, rank=1 + i % 4)
            res = chsh_oracle_search(rho, budget=5_000, seed=i)
            assert res.value <= chsh_full_value(rho.spectrum()) + 1e-10

    def test_maximally_mixed(self):
        res = chsh_oracle_search(DensityMatrix(np.eye(4) / 4), budget=2_000)
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_witness_value_is_direct(self, rng):
        rho = random_density(rng, 4, rank=2)
        res = chsh_oracle_search(rho, budget=5_000, seed=3)
        assert res.value > 1
        _, w = build_chsh_observables(res.best_params)
        assert np.trace(rho.data @ w.T).real / 2 == pytest.approx(res.value, abs=1e-12)

    def test_dimension_check(self):
        with pytest.raises(ValidationError):
            chsh_oracle_search(DensityMatrix(np.eye(2) / 2))
        with pytest.raises(ValidationError):
            chsh_oracle_search(DensityMatrix(np.eye(4) / 4), budget=0)
