"""Random states for tests and Monte Carlo campaigns.

``seed`` arguments accept anything ``numpy.random.default_rng`` does, including
an existing ``Generator`` (which is then advanced).
"""

from __future__ import annotations

import numpy as np

from .qlinalg import BipartitePureState, DensityMatrix, ValidationError


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary (QR of a Ginibre matrix, phases fixed)."""
    rng = np.random.default_rng(seed)
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    diag = np.diag(R)
    return Q * (diag / np.abs(diag))


def _ginibre_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    # fix the unobservable global phase so that the first amplitude is real
    if v[0] != 0:
        v *= abs(v[0]) / v[0]
        v[0] = abs(v[0])
    return v


def sample_pure(dA: int, dB: int, seed=None) -> BipartitePureState:
    """Unitarily invariant random pure state on ``dA x dB``."""
    if dA < 1 or dB < 1:
        raise ValidationError("dimensions must be positive")
    rng = np.random.default_rng(seed)
    return BipartitePureState(_ginibre_vector(rng, dA * dB), dA, dB)


def sample_mixed(d: int, rank: int, seed=None, dims=None) -> DensityMatrix:
    """Random state of rank at most ``rank`` from the induced measure.

    A random pure state on ``d x rank`` is drawn and the ancilla traced out.
    ``dims`` optionally declares a subsystem structure with product ``d``.
    """
    if not 1 <= rank <= d:
        raise ValidationError(f"rank must be in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    G = (rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank)))
    rho = G @ G.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix(rho, tuple(dims) if dims is not None else (d,))


def sample_bipartite_mixed(dA: int, dB: int, rank: int, seed=None) -> DensityMatrix:
    return sample_mixed(dA * dB, rank, seed, dims=(dA, dB))


def sample_separable(dA: int, dB: int, terms: int, seed=None) -> DensityMatrix:
    """Mixture of ``terms`` random pure product states with Dirichlet weights."""
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((dA * dB, dA * dB), dtype=complex)
    for w in weights:
        v = np.kron(_ginibre_vector(rng, dA), _ginibre_vector(rng, dB))
        rho += w * np.outer(v, v.conj())
    return DensityMatrix(rho / np.trace(rho).real, (dA, dB))


def random_probability(d: int, seed=None) -> np.ndarray:
    """Flat (Dirichlet(1)) probability vector sorted decreasing."""
    rng = np.random.default_rng(seed)
    return np.sort(rng.dirichlet(np.ones(d)))[::-1]


def majorizing_pair(d: int, seed=None, transfers: int = 3):
    """Random ``(q, p)`` with ``q`` majorizing ``p``.

    ``q`` is obtained from ``p`` by moving mass from smaller to larger entries
    (reverse Robin Hood transfers), which can only sharpen the distribution.
    """
    rng = np.random.default_rng(seed)
    p = random_probability(d, rng)
    q = p.copy()
    for _ in range(transfers):
        if d < 2:
            break
        i, j = sorted(rng.choice(d, 2, replace=False))
        t = rng.uniform(0, q[j])
        q[i] += t
        q[j] -= t
        q = np.sort(q)[::-1]
    return q, p
