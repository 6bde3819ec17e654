"""Numerical convex roof of the CHSH-based pure-state monotone.

Every pure-state decomposition of a rank-``k`` state ``rho = sum_k l_k |e_k><e_k|``
into ``n >= k`` members has the form ``|psi_m> = sum_k U_mk sqrt(l_k) |e_k>``
for an ``n x k`` isometry ``U``. We parameterize ``U = Z (Z^dag Z)^(-1/2)``
with an unconstrained complex ``Z`` and minimize with L-BFGS using an analytic
gradient.

Because the monotone is ``sqrt(2) - C'(p)`` and ``C'`` is homogeneous of degree
one, the ensemble average is ``sqrt(2) - sum_m C'(eig(M_m M_m^dag))`` with
``M_m`` the unnormalized coefficient matrix of member ``m``. No division by the
member weights is needed, which keeps the objective smooth where weights vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .contextuality import SQRT2
from .entanglement import pure_monotone
from .qlinalg import (
    BipartitePureState,
    DensityMatrix,
    ValidationError,
    eigenvalues_desc,
    schmidt_squared,
)

RANK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PureEnsemble:
    """Weighted pure states ``{P_m, |psi_m>}`` of common dimensions."""

    weights: np.ndarray
    states: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size != len(self.states) or w.size == 0:
            raise ValidationError("weights and states must be non-empty and of equal length")
        if w.min() < 0 or abs(w.sum() - 1.0) > 1e-9:
            raise ValidationError("weights must be a probability vector")
        dims = {(s.dA, s.dB) for s in self.states}
        if len(dims) != 1:
            raise ValidationError(f"states have mixed dimensions {dims}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(self.states))

    def density_matrix(self) -> np.ndarray:
        amps = np.array([s.amplitudes for s in self.states])
        return (amps.T * self.weights) @ amps.conj()

    def reproduces(self, rho: DensityMatrix, tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.density_matrix() - rho.data)) <= tol)

    def average_monotone(self) -> float:
        return float(sum(w * pure_monotone(schmidt_squared(s)) for w, s in zip(self.weights, self.states)))

    def average_y(self) -> float:
        """Mean of ``(sum_i sqrt(p_i))^2`` over members, ``p`` the Schmidt spectrum."""
        ys = [np.sqrt(schmidt_squared(s)).sum() ** 2 for s in self.states]
        return float(self.weights @ ys)


@dataclass
class ConvexRoofResult:
    value: float
    ensemble: PureEnsemble
    restart_values: list


def _weights_for_sorted(lam: np.ndarray) -> np.ndarray:
    """Gradient of ``C'`` w.r.t. decreasing eigenvalues (batched, last axis)."""
    d = lam.shape[-1]
    q = np.zeros(lam.shape[:-1] + (max(d, 4),))
    q[..., :d] = lam
    a = q[..., 0] - q[..., 3]
    b = q[..., 1] - q[..., 2]
    h = np.hypot(a, b)
    safe = np.where(h > 0, h, 1.0)
    g = np.zeros_like(q)
    g[..., 0], g[..., 1], g[..., 2], g[..., 3] = a, b, -b, -a
    g *= (SQRT2 / safe * (h > 0))[..., None]
    return g[..., :d], SQRT2 * h


class _Objective:
    """``sqrt(2) - sum_m C'(M_m M_m^dag)`` as a function of the raw parameter ``Z``."""

    def __init__(self, B: np.ndarray, n: int, dA: int, dB: int):
        self.B = B
        self.k = B.shape[0]
        self.n, self.dA, self.dB = n, dA, dB

    def isometry(self, x: np.ndarray):
        Z = (x[: x.size // 2] + 1j * x[x.size // 2:]).reshape(self.n, self.k)
        s, Q = np.linalg.eigh(Z.conj().T @ Z)
        if s[0] <= 1e-14 * max(s[-1], 1.0):
            return Z, None, None, None
        T = (Q * s**-0.5) @ Q.conj().T
        return Z, Z @ T, (s, Q), T

    def __call__(self, x: np.ndarray):
        Z, U, sq, T = self.isometry(x)
        if U is None:
            return np.inf, np.zeros_like(x)
        psi = U @ self.B
        M = psi.reshape(self.n, self.dA, self.dB)
        G = M @ M.conj().transpose(0, 2, 1)
        lam, V = np.linalg.eigh(G)
        lam, V = lam[:, ::-1], V[:, :, ::-1]
        w, cp = _weights_for_sorted(lam)
        value = SQRT2 - cp.sum()

        W = (V * w[:, None, :]) @ V.conj().transpose(0, 2, 1)
        Gpsi = (W @ M).reshape(self.n, -1)
        GU = Gpsi @ self.B.conj().T
        s, Q = sq
        H = Q.conj().T @ (Z.conj().T @ GU) @ Q
        rs = s**-0.5
        ds = s[:, None] - s[None, :]
        close = np.abs(ds) <= 1e-12 * np.maximum(s[:, None], s[None, :])
        K = np.where(close, -0.5 * np.sqrt(s[:, None] * s[None, :]) ** -1.5,
                     (rs[:, None] - rs[None, :]) / np.where(close, 1.0, ds))
        J = Q @ (H * K) @ Q.conj().T
        GZ = GU @ T + Z @ (J + J.conj().T)
        grad = -2 * np.concatenate([GZ.real.ravel(), GZ.imag.ravel()])
        return value, grad


def _decompose(rho: DensityMatrix):
    if not rho.is_bipartite:
        raise ValidationError(f"expected a bipartite state, got dims {rho.dims}")
    lam, V = eigenvalues_desc(rho.data, vectors=True)
    keep = lam > RANK_TOL
    lam, V = lam[keep], V[:, keep]
    lam = lam / lam.sum()
    return lam, V


def ensemble_from_isometry(rho: DensityMatrix, U: np.ndarray) -> PureEnsemble:
    """Decomposition of ``rho`` induced by an ``n x rank`` isometry ``U``."""
    lam, V = _decompose(rho)
    U = np.asarray(U, dtype=complex)
    if U.shape[1] != lam.size or np.max(np.abs(U.conj().T @ U - np.eye(lam.size))) > 1e-10:
        raise ValidationError("U must be an isometry with one column per nonzero eigenvalue")
    psi = U @ (np.sqrt(lam)[:, None] * V.T)
    weights = np.einsum("ij,ij->i", psi, psi.conj()).real
    dA, dB = rho.dims
    keep = weights > 1e-15
    states = tuple(BipartitePureState.normalized(v, dA, dB) for v in psi[keep])
    return PureEnsemble(weights[keep] / weights[keep].sum(), states)


def optimize_convex_roof(rho: DensityMatrix, ensemble_size: int | None = None,
                         restarts: int = 20, *, seed: int, maxiter: int = 2000) -> ConvexRoofResult:
    """Multi-start minimization of the ensemble-averaged monotone.

    The first start is the eigen-decomposition; the others draw ``Z`` from a
    complex Gaussian seeded by ``seed``. The returned value is the best ensemble
    average found, an upper bound on the convex roof.
    """
    lam, V = _decompose(rho)
    k = lam.size
    dA, dB = rho.dims
    n = 2 * k if ensemble_size is None else int(ensemble_size)
    if n < k:
        raise ValidationError(f"ensemble_size {n} is below the rank {k}")
    if restarts < 1:
        raise ValidationError("restarts must be positive")
    if k == 1:
        ens = PureEnsemble(np.ones(1), (BipartitePureState.normalized(V[:, 0], dA, dB),))
        v = ens.average_monotone()
        return ConvexRoofResult(v, ens, [v])

    B = np.sqrt(lam)[:, None] * V.T
    obj = _Objective(B, n, dA, dB)
    rng = np.random.default_rng(seed)
    best_x, best_val, history = None, np.inf, []
    for i in range(restarts):
        if i == 0:
            Z0 = np.eye(n, k, dtype=complex)
        else:
            Z0 = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        x0 = np.concatenate([Z0.real.ravel(), Z0.imag.ravel()])
        res = minimize(obj, x0, jac=True, method="L-BFGS-B",
                       options={"maxiter": maxiter, "gtol": 1e-12, "ftol": 1e-15})
        history.append(float(res.fun))
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    _, U, _, _ = obj.isometry(best_x)
    ens = ensemble_from_isometry(rho, U)
    return ConvexRoofResult(ens.average_monotone(), ens, history)


def convex_roof_estimate(rho: DensityMatrix, ensemble_size: int | None = None,
                         restarts: int = 20, *, seed: int) -> float:
    """Upper estimate of the convex-roof monotone ``E(rho)``."""
    return optimize_convex_roof(rho, ensemble_size, restarts, seed=seed).value
