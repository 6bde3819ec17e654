"""Contextuality values and the entropy they induce on local spectra.

A state-dependent noncontextuality inequality enters only through its set of
achievable operator spectra (``SpectralSet``); the largest left-hand side
reachable with a state of spectrum ``p`` is ``sup_mu mu . p``. For CHSH on a
four-level system that set is known in closed form, and an explicit projector
construction (``build_chsh_observables``) provides an independent check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .qlinalg import (
    PHYSICS_TOL,
    DensityMatrix,
    ValidationError,
    as_hermitian,
    eigenvalues_desc,
)

SQRT2 = np.sqrt(2.0)
CHSH_CMAX = SQRT2


def compress_spectrum(p, d0: int) -> np.ndarray:
    """Sort decreasing, keep the ``d0`` largest entries and zero-pad to ``d0``."""
    p = np.sort(np.asarray(p, dtype=float).ravel())[::-1][:d0]
    return np.pad(p, (0, d0 - p.size))


def _probability(p) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or abs(p.sum() - 1.0) > PHYSICS_TOL or p.min() < -PHYSICS_TOL:
        raise ValidationError(f"not a probability vector: {p}")
    return np.sort(np.clip(p, 0.0, None))[::-1]


def _strip_to(p: np.ndarray, d0: int) -> np.ndarray:
    """Zero-pad ``p`` to ``d0``; entries beyond ``d0`` must vanish."""
    if p.size > d0:
        if np.any(p[d0:] > PHYSICS_TOL):
            raise ValidationError(f"spectrum has more than {d0} nonzero entries")
        p = p[:d0]
    return np.pad(p, (0, d0 - p.size))


def chsh_family_sup(p) -> float:
    """``sup_r sqrt(1+r)(p1-p4) + sqrt(1-r)(p2-p3)`` over ``r in [0, 1]``.

    ``p`` is any 4-vector (sorted decreasing internally); it need not be
    normalized, which is what truncated spectra require.
    """
    p = np.sort(np.asarray(p, dtype=float))[::-1]
    a, b = p[0] - p[3], p[1] - p[2]
    # a >= b >= 0 for sorted input, so the Cauchy-Schwarz optimum is interior
    return float(SQRT2 * np.hypot(a, b))


def chsh_family_sup_numeric(p, tol: float = 1e-6) -> float:
    """Bounded scalar maximization of the CHSH family, for cross-checking."""
    p = np.sort(np.asarray(p, dtype=float))[::-1]
    a, b = p[0] - p[3], p[1] - p[2]
    g = lambda r: -(a * np.sqrt(1 + r) + b * np.sqrt(1 - r))
    res = minimize_scalar(g, bounds=(0.0, 1.0), method="bounded", options={"xatol": tol})
    r = float(np.clip(res.x, 0.0, 1.0))
    return max(-g(r), -g(0.0), -g(1.0))


def chsh_family_vector(r: float) -> np.ndarray:
    """Half the spectrum of the CHSH operator at mixing parameter ``r``."""
    return np.array([np.sqrt(1 + r), np.sqrt(1 - r), -np.sqrt(1 - r), -np.sqrt(1 + r)])


@dataclass(frozen=True)
class SpectralSet:
    """Achievable decreasing eigenvalue vectors of a Bell/noncontextuality operator.

    Parameters
    ----------
    d0 : int
        Dimension the inequality is evaluated in.
    samples : sequence of vectors
        Finite members of the set; each is sorted decreasing on construction.
    family : {"none", "chsh"}
        Built-in parametric family; ``"chsh"`` adds ``chsh_family_vector(r)``
        for every ``r in [0, 1]`` and is maximized in closed form.
    generator, bounds : optional
        A custom parametric family ``theta -> vector`` over a box, maximized by
        a grid scan plus bounded local refinement.
    """

    d0: int
    samples: tuple = ()
    family: str = "none"
    generator: Callable | None = field(default=None, compare=False)
    bounds: tuple | None = None

    def __post_init__(self):
        if self.family not in ("none", "chsh"):
            raise ValidationError(f"unknown family {self.family!r}")
        if self.family == "chsh" and self.d0 != 4:
            raise ValidationError("the CHSH family lives in d0 = 4")
        samples = []
        for s in self.samples:
            s = np.asarray(s, dtype=float).ravel()
            if s.size != self.d0:
                raise ValidationError(f"sample of length {s.size}, expected {self.d0}")
            s = np.sort(s)[::-1]
            s.setflags(write=False)
            samples.append(s)
        object.__setattr__(self, "samples", tuple(samples))
        if self.generator is not None and self.bounds is None:
            raise ValidationError("a generator needs parameter bounds")
        if self.is_empty:
            raise ValidationError("spectral set is empty")

    @property
    def is_empty(self) -> bool:
        return not self.samples and self.family == "none" and self.generator is None

    def sup(self, p) -> float:
        """``sup_mu mu . p`` for a length-``d0`` vector ``p``."""
        p = np.asarray(p, dtype=float)
        vals = [float(s @ p) for s in self.samples]
        if self.family == "chsh":
            vals.append(chsh_family_sup(p))
        if self.generator is not None:
            vals.append(self._generator_sup(p))
        return max(vals)

    def _generator_sup(self, p, grid: int = 25) -> float:
        lo, hi = np.asarray(self.bounds, dtype=float).T
        f = lambda th: -float(np.sort(np.asarray(self.generator(th), dtype=float))[::-1] @ p)
        axes = [np.linspace(a, b, grid) for a, b in zip(lo, hi)]
        pts = np.array(list(itertools.product(*axes)))
        vals = np.array([f(t) for t in pts])
        best = pts[np.argmin(vals)]
        res = minimize(f, best, method="L-BFGS-B", bounds=list(zip(lo, hi)))
        return -min(vals.min(), res.fun)

    def to_dict(self) -> dict:
        if self.generator is not None:
            raise ValidationError("custom generators cannot be serialized")
        return {"d0": self.d0, "samples": [s.tolist() for s in self.samples], "family": self.family}

    @classmethod
    def from_dict(cls, obj: dict) -> "SpectralSet":
        return cls(int(obj["d0"]), tuple(obj.get("samples", ())), obj.get("family", "none"))


def chsh_spectral_set(include_trivial: bool = True) -> SpectralSet:
    """CHSH set: the ``r`` family, plus ``(1,1,1,1)`` from equal observables."""
    samples = (np.ones(4),) if include_trivial else ()
    return SpectralSet(4, samples, "chsh")


def chsh_value(p) -> float:
    """Closed-form CHSH contextuality ``sqrt(2[(p1-p4)^2 + (p2-p3)^2])``."""
    p = _strip_to(_probability(p), 4)
    return chsh_family_sup(p)


def chsh_full_value(p) -> float:
    """CHSH contextuality including the classical floor, ``max(1, chsh_value)``."""
    return max(1.0, chsh_value(p))


def spectral_context_value(p, spectral_set: SpectralSet) -> float:
    """Contextuality value of a state with spectrum ``p`` (zero-padded to ``d0``)."""
    p = _strip_to(_probability(p), spectral_set.d0)
    return spectral_set.sup(p)


def lc_entropy(p, spectral_set: SpectralSet, c_max: float) -> float:
    """Local-contextuality entropy ``c_max - sup_mu mu . p[:d0]``.

    Spectra longer than ``d0`` keep only their ``d0`` largest entries (without
    renormalization); shorter ones are zero-padded.
    """
    p = _probability(p)
    d0 = spectral_set.d0
    pure = spectral_set.sup(np.eye(d0)[0])
    if pure > c_max + 1e-9:
        raise ValidationError(f"c_max={c_max} is below the pure-state value {pure}")
    return float(c_max - spectral_set.sup(compress_spectrum(p, d0)))


@dataclass(frozen=True)
class ChshObservables:
    """Parameters of the rank-2 projector family for the CHSH operator.

    ``nu_hat1``/``nu_hat2`` default to ``sqrt(1 - nu^2)``; when given they must
    satisfy ``|nu_hat|^2 + nu^2 = 1``. ``basis`` holds the kets of the working
    basis as columns.
    """

    nu1: float
    nu2: float
    nu_hat1: complex | None = None
    nu_hat2: complex | None = None
    eta: tuple = (1, 1, 1, 1)
    basis: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("nu1", "nu2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name}={v} outside [0, 1]")
        for nu, name in ((self.nu1, "nu_hat1"), (self.nu2, "nu_hat2")):
            h = getattr(self, name)
            if h is None:
                object.__setattr__(self, name, complex(np.sqrt(1.0 - nu**2)))
            elif abs(abs(h) ** 2 + nu**2 - 1.0) > 1e-12:
                raise ValidationError(f"{name} violates |nu_hat|^2 + nu^2 = 1")
        if len(self.eta) != 4 or any(e not in (1, -1) for e in self.eta):
            raise ValidationError(f"eta must be four signs, got {self.eta}")
        basis = np.eye(4, dtype=complex) if self.basis is None else np.asarray(self.basis, dtype=complex)
        if basis.shape != (4, 4) or np.max(np.abs(basis.conj().T @ basis - np.eye(4))) > PHYSICS_TOL:
            raise ValidationError("basis must be a 4x4 unitary")
        object.__setattr__(self, "basis", basis)

    @property
    def r(self) -> float:
        """Mixing parameter implied by the angles, ``4 nu1 |nu_hat1| nu2 |nu_hat2|``."""
        return 4 * self.nu1 * abs(self.nu_hat1) * self.nu2 * abs(self.nu_hat2)


@dataclass(frozen=True, eq=False)
class ChshWitness:
    """CHSH operator ``T``, the commutator product ``R`` and the extracted ``r``."""

    T: np.ndarray
    R: np.ndarray
    r: float

    @property
    def spectrum(self) -> np.ndarray:
        return eigenvalues_desc(self.T)


def _projectors(nu1, nu2, h1, h2) -> list[np.ndarray]:
    e = np.eye(4, dtype=complex)
    kets = [
        (e[0], e[1]),
        (e[1], e[2]),
        (nu1 * e[1] + h1 * e[2], nu1 * e[0] + h1 * e[3]),
        (nu2 * e[0] + h2 * e[1], h2 * e[2] + nu2 * e[3]),
    ]
    return [np.outer(a, a.conj()) + np.outer(b, b.conj()) for a, b in kets]


def _comm(X, Y):
    return X @ Y - Y @ X


def build_chsh_observables(params: ChshObservables):
    """Dichotomic observables ``A_k = eta_k (2 Pi_k - I)`` and their CHSH witness.

    Returns ``(A, witness)`` with ``A`` a tuple of four 4x4 arrays expressed in
    the computational basis (i.e. already rotated by ``params.basis``).
    """
    U = params.basis
    P = [U @ p @ U.conj().T for p in _projectors(params.nu1, params.nu2, params.nu_hat1, params.nu_hat2)]
    I = np.eye(4)
    A = tuple(eta * (2 * p - I) for eta, p in zip(params.eta, P))
    T = A[0] @ (A[1] + A[3]) + A[2] @ (A[1] - A[3])
    R = _comm(P[0], P[2]) @ _comm(P[1], P[3])
    lam = eigenvalues_desc(T)
    r = float(np.clip(lam[0] ** 2 / 4 - 1, 0.0, 1.0))
    return A, ChshWitness(as_hermitian(T, tol=1e-10), R, r)


def _batched_T(nu1, nu2) -> np.ndarray:
    """CHSH operators for arrays of real angle parameters, identity basis."""
    nu1 = np.asarray(nu1, dtype=float)[:, None]
    nu2 = np.asarray(nu2, dtype=float)[:, None]
    h1, h2 = np.sqrt(1 - nu1**2), np.sqrt(1 - nu2**2)
    e = np.eye(4)
    ones = np.ones_like(nu1)
    kets = [
        (ones * e[0], ones * e[1]),
        (ones * e[1], ones * e[2]),
        (nu1 * e[1] + h1 * e[2], nu1 * e[0] + h1 * e[3]),
        (nu2 * e[0] + h2 * e[1], h2 * e[2] + nu2 * e[3]),
    ]
    A1, A2, A3, A4 = (
        2 * (a[:, :, None] * a[:, None, :] + b[:, :, None] * b[:, None, :]) - e for a, b in kets
    )
    return A1 @ (A2 + A4) + A3 @ (A2 - A4)


def _haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, Rm = np.linalg.qr(Z)
    return Q * (np.diag(Rm) / np.abs(np.diag(Rm)))


def witness_identity_residual(witness: ChshWitness) -> float:
    """``min over signs of max|T^2 - 4I -+ 16R|``."""
    T2 = witness.T @ witness.T - 4 * np.eye(4)
    return float(min(np.max(np.abs(T2 - 16 * witness.R)), np.max(np.abs(T2 + 16 * witness.R))))


@dataclass
class OracleResult:
    value: float
    best_params: ChshObservables | None
    identity_residual: float
    evaluations: int


def chsh_oracle_search(rho_A: DensityMatrix, budget: int = 100_000, seed: int = 0) -> OracleResult:
    """Best CHSH value found by searching the explicit projector family.

    ``tr(rho_A T)/2`` is evaluated directly on constructed observables. The
    search spends ``budget`` operator evaluations: a slice on fully random
    parameters and bases, most on a grid over ``(nu1, nu2)`` with the working
    basis aligned to the eigenbasis of ``rho_A``, and the rest on local
    refinement. The trivial family (all observables equal) contributes 1.
    Every witness built through ``build_chsh_observables`` is checked against
    ``T^2 = 4I -+ 16R``; the worst residual is reported.
    """
    if budget < 1:
        raise ValidationError("budget must be positive")
    if rho_A.dim != 4:
        raise ValidationError(f"expected a four-level state, got dimension {rho_A.dim}")
    rng = np.random.default_rng(seed)
    rho = rho_A.data
    _, Vr = eigenvalues_desc(rho, vectors=True)

    A = np.diag([1.0, 1.0, -1.0, -1.0])
    T_trivial = A @ (A + A) + A @ (A - A)
    best = float(np.trace(rho @ T_trivial).real / 2)
    best_params, residual, evals = None, 0.0, 1

    def aligned_values(nu1, nu2):
        T = _batched_T(nu1, nu2)
        _, VT = np.linalg.eigh(T)
        # map T's eigenvectors (decreasing) onto rho's (decreasing)
        U = Vr[None] @ VT[..., ::-1].conj().transpose(0, 2, 1)
        Tr = U @ T @ U.conj().transpose(0, 2, 1)
        return np.einsum("ij,nji->n", rho, Tr).real / 2

    n_random = min(budget // 10, 2000)
    n_refine = min(budget // 5, 2000)
    n_grid = max(budget - n_random - n_refine, 4)

    for _ in range(n_random):
        nu1, nu2 = rng.uniform(0, 1, 2)
        params = ChshObservables(
            nu1, nu2,
            np.sqrt(1 - nu1**2) * np.exp(1j * rng.uniform(0, 2 * np.pi)),
            np.sqrt(1 - nu2**2) * np.exp(1j * rng.uniform(0, 2 * np.pi)),
            tuple(int(e) for e in rng.choice([1, -1], 4)),
            _haar_unitary(rng, 4),
        )
        _, w = build_chsh_observables(params)
        residual = max(residual, witness_identity_residual(w))
        val = float(np.trace(rho @ w.T).real / 2)
        evals += 1
        if val > best:
            best, best_params = val, params

    g = max(int(np.sqrt(n_grid)), 2)
    grid = np.linspace(0.0, 1.0, g)
    n1, n2 = (a.ravel() for a in np.meshgrid(grid, grid))
    vals = np.concatenate([aligned_values(n1[i:i + 4096], n2[i:i + 4096]) for i in range(0, n1.size, 4096)])
    evals += vals.size
    k = int(np.argmax(vals))
    x_best = np.array([n1[k], n2[k]])

    if n_refine > 0:
        f = lambda x: -float(aligned_values(np.clip(x[:1], 0, 1), np.clip(x[1:], 0, 1))[0])
        res = minimize(f, x_best, method="Nelder-Mead",
                       options={"maxfev": n_refine, "xatol": 1e-10, "fatol": 1e-14})
        evals += res.nfev
        if -res.fun > vals[k]:
            x_best = np.clip(res.x, 0, 1)

    # rebuild the winner as explicit observables and evaluate it directly
    nu1, nu2 = (float(v) for v in x_best)
    T0 = _batched_T([nu1], [nu2])[0]
    _, VT = np.linalg.eigh(T0)
    params = ChshObservables(nu1, nu2, basis=Vr @ VT[:, ::-1].conj().T)
    _, w = build_chsh_observables(params)
    residual = max(residual, witness_identity_residual(w))
    val = float(np.trace(rho @ w.T).real / 2)
    if val > best:
        best, best_params = val, params
    return OracleResult(best, best_params, residual, evals)


def chsh_oracle_value(rho_A: DensityMatrix, budget: int = 100_000, seed: int = 0) -> float:
    """Constructive lower bound on ``chsh_full_value``; see ``chsh_oracle_search``."""
    return chsh_oracle_search(rho_A, budget, seed).value
