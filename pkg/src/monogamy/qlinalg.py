"""Dense Hermitian linear algebra for small bipartite quantum systems.

States are stored as plain complex numpy arrays wrapped in light, immutable
containers that remember the subsystem dimensions. Everything here is a pure
function of its inputs.

Realignment convention: ``realign(rho)[i*dA + i2, j*dB + j2] = <i j|rho|i2 j2>``.
Both common conventions in the literature differ by a fixed permutation of rows
and columns, so trace norms do not depend on the choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# tolerance ladder: validation, physics invariants, cross-oracle agreement
VALIDATION_TOL = 1e-12
PHYSICS_TOL = 1e-10
ORACLE_TOL = 1e-8


class ValidationError(ValueError):
    """Raised when an input violates a structural or physical precondition."""


def as_hermitian(H, tol: float = VALIDATION_TOL) -> np.ndarray:
    """Return ``H`` as a symmetrized complex array, rejecting non-Hermitian input."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise ValidationError("matrix has non-finite entries")
    err = np.max(np.abs(H - H.conj().T)) if H.size else 0.0
    if err > tol:
        raise ValidationError(f"matrix is not Hermitian (max deviation {err:.3e})")
    return (H + H.conj().T) / 2


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive semidefinite unit-trace matrix with declared subsystem dimensions.

    Parameters
    ----------
    data : array_like
        Square complex matrix of size ``prod(dims)``.
    dims : sequence of int, optional
        Subsystem dimensions; defaults to a single system.
    """

    data: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        data = as_hermitian(self.data)
        dims = tuple(int(d) for d in self.dims) if self.dims else (data.shape[0],)
        if any(d < 1 for d in dims) or int(np.prod(dims)) != data.shape[0]:
            raise ValidationError(f"dims {dims} do not match matrix size {data.shape[0]}")
        tr = np.trace(data).real
        if abs(tr - 1.0) > VALIDATION_TOL:
            raise ValidationError(f"trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(data)[0]
        if lo < -PHYSICS_TOL:
            raise ValidationError(f"matrix has negative eigenvalue {lo:.3e}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def is_bipartite(self) -> bool:
        return len(self.dims) == 2

    def spectrum(self) -> np.ndarray:
        """Eigenvalues in decreasing order, tiny negatives clamped and renormalized."""
        return clamp_spectrum(eigenvalues_desc(self.data))

    def conjugate(self, U) -> "DensityMatrix":
        """Return ``U rho U^dagger`` with the same dims."""
        U = np.asarray(U, dtype=complex)
        return DensityMatrix(U @ self.data @ U.conj().T, self.dims)


@dataclass(frozen=True, eq=False)
class BipartitePureState:
    """Unit vector on ``C^dA (x) C^dB``, amplitudes in row-major ``(a, b)`` order."""

    amplitudes: np.ndarray
    dA: int
    dB: int

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amp.size != self.dA * self.dB:
            raise ValidationError(f"{amp.size} amplitudes for dims ({self.dA}, {self.dB})")
        norm2 = np.vdot(amp, amp).real
        if norm2 == 0:
            raise ValidationError("zero vector is not a state")
        if abs(norm2 - 1.0) > VALIDATION_TOL:
            raise ValidationError(f"squared norm is {norm2!r}, expected 1")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, vec, dA: int, dB: int) -> "BipartitePureState":
        vec = np.asarray(vec, dtype=complex).ravel()
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValidationError("zero vector is not a state")
        return cls(vec / norm, dA, dB)

    @property
    def matrix(self) -> np.ndarray:
        """Amplitudes reshaped to a ``dA x dB`` coefficient matrix."""
        return self.amplitudes.reshape(self.dA, self.dB)

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), (self.dA, self.dB))


def clamp_spectrum(values, tol: float = PHYSICS_TOL) -> np.ndarray:
    """Clamp eigenvalues in ``[-tol, 0)`` to zero and renormalize to unit sum."""
    p = np.array(values, dtype=float)
    if p.size and p.min() < -tol:
        raise ValidationError(f"spectrum has negative entry {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def eigenvalues_desc(H, vectors: bool = False):
    """Eigenvalues of a Hermitian matrix in decreasing order.

    With ``vectors=True`` also returns the matching eigenvectors as columns,
    so that ``H = V @ diag(w) @ V^dagger``.
    """
    H = as_hermitian(H)
    if vectors:
        w, V = np.linalg.eigh(H)
        return w[::-1], V[:, ::-1]
    return np.linalg.eigvalsh(H)[::-1]


def _require_bipartite(rho: DensityMatrix) -> tuple[int, int]:
    if not isinstance(rho, DensityMatrix):
        raise ValidationError("expected a DensityMatrix")
    if not rho.is_bipartite:
        raise ValidationError(f"expected a bipartite state, got dims {rho.dims}")
    return rho.dims


def partial_trace(rho: DensityMatrix, keep: int | Sequence[int]) -> DensityMatrix:
    """Reduced state on the subsystem(s) ``keep``, tracing out the rest."""
    if len(rho.dims) < 2:
        raise ValidationError("partial trace needs at least two subsystems")
    n = len(rho.dims)
    keep = [keep] if np.isscalar(keep) else list(keep)
    if not keep or any(not 0 <= k < n for k in keep) or len(set(keep)) != len(keep):
        raise ValidationError(f"invalid subsystem index {keep} for dims {rho.dims}")
    keep = sorted(keep)
    t = rho.data.reshape(rho.dims + rho.dims)
    # contract traced-out indices from the highest down so positions stay valid
    for k in reversed(range(n)):
        if k not in keep:
            m = t.ndim // 2
            t = np.trace(t, axis1=k, axis2=k + m)
    d = int(np.prod([rho.dims[k] for k in keep]))
    return DensityMatrix(t.reshape(d, d), tuple(rho.dims[k] for k in keep))


def partial_transpose(rho: DensityMatrix, on: int = 1) -> np.ndarray:
    """Partial transpose of a bipartite state on subsystem ``on`` (0 or 1)."""
    dA, dB = _require_bipartite(rho)
    if on not in (0, 1):
        raise ValidationError(f"subsystem index must be 0 or 1, got {on}")
    t = rho.data.reshape(dA, dB, dA, dB)
    t = t.transpose(0, 3, 2, 1) if on == 1 else t.transpose(2, 1, 0, 3)
    return np.ascontiguousarray(t.reshape(dA * dB, dA * dB))


def realign(rho: DensityMatrix) -> np.ndarray:
    """Realigned ``dA^2 x dB^2`` matrix of a bipartite state."""
    dA, dB = _require_bipartite(rho)
    t = rho.data.reshape(dA, dB, dA, dB).transpose(0, 2, 1, 3)
    return np.ascontiguousarray(t.reshape(dA * dA, dB * dB))


def trace_norm(M) -> float:
    """Sum of singular values."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValidationError(f"expected a matrix, got shape {M.shape}")
    return float(np.linalg.svd(M, compute_uv=False).sum())


def schmidt_squared(psi: BipartitePureState) -> np.ndarray:
    """Squared Schmidt coefficients, decreasing, of length ``min(dA, dB)``."""
    s = np.linalg.svd(psi.matrix, compute_uv=False)
    p = s**2
    return p / p.sum()


def _as_probability(p, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or abs(p.sum() - 1.0) > PHYSICS_TOL:
        raise ValidationError(f"{name} is not normalized (sum={p.sum() if p.size else 0})")
    return p


def majorizes(q, p, tol: float = VALIDATION_TOL) -> bool:
    """True iff ``q`` majorizes ``p`` (both probability vectors)."""
    q = _as_probability(q, "q")
    p = _as_probability(p, "p")
    n = max(q.size, p.size)
    q = np.sort(np.pad(q, (0, n - q.size)))[::-1]
    p = np.sort(np.pad(p, (0, n - p.size)))[::-1]
    return bool(np.all(np.cumsum(q) >= np.cumsum(p) - tol))


def purify(rho_A: DensityMatrix) -> BipartitePureState:
    """Purification on ``d x d`` whose reduced state on the first factor is ``rho_A``."""
    w, V = eigenvalues_desc(rho_A.data, vectors=True)
    w = np.clip(w, 0.0, None)
    d = rho_A.dim
    # |Psi> = sum_i sqrt(w_i) |v_i>|i>
    amp = (V * np.sqrt(w)).reshape(d, d)
    return BipartitePureState.normalized(amp, d, d)


def pure_density(vec, dims: Sequence[int]) -> DensityMatrix:
    """Projector onto the normalized vector ``vec``."""
    vec = np.asarray(vec, dtype=complex).ravel()
    vec = vec / np.linalg.norm(vec)
    return DensityMatrix(np.outer(vec, vec.conj()), tuple(dims))


def product_state(rho_A: DensityMatrix, rho_B: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.kron(rho_A.data, rho_B.data), (rho_A.dim, rho_B.dim))


def maximally_entangled(d: int, dB: int | None = None) -> BipartitePureState:
    """``sum_i |ii> / sqrt(d)`` embedded in ``d x dB`` (``dB >= d``)."""
    dB = d if dB is None else dB
    if d < 1 or dB < d:
        raise ValidationError(f"need 1 <= d <= dB, got d={d}, dB={dB}")
    amp = np.zeros((d, dB), dtype=complex)
    amp[np.arange(d), np.arange(d)] = 1.0
    return BipartitePureState.normalized(amp, d, dB)
