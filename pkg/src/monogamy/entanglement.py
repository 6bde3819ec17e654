"""Entanglement quantities and the entanglement/contextuality monogamy bound.

The CHSH-based pure-state monotone is ``s(p) = sqrt(2) - chsh_value(p)``. Its
convex roof is bounded below by ``co(f)(x)``, where ``x`` is the larger of the
partial-transpose and realignment trace norms and ``f(y)`` is the smallest
``s(p)`` over spectra with ``(sum_i sqrt(p_i))^2 = y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import bisect, minimize

from .contextuality import (
    CHSH_CMAX,
    SQRT2,
    chsh_family_sup,
    chsh_full_value,
    chsh_value,
    compress_spectrum,
)
from .qlinalg import (
    PHYSICS_TOL,
    DensityMatrix,
    ValidationError,
    partial_trace,
    partial_transpose,
    realign,
    trace_norm,
)

HULL_KNOTS = 512
MONOGAMY_TOL = 1e-8


def negativity(rho: DensityMatrix) -> float:
    """``(||rho^Gamma||_1 - 1) / 2``."""
    return (trace_norm(partial_transpose(rho)) - 1.0) / 2


def ccnr_norm(rho: DensityMatrix) -> float:
    """Trace norm of the realigned matrix; at most 1 for separable states."""
    return trace_norm(realign(rho))


def _d_star(rho: DensityMatrix) -> int:
    dA, dB = rho.dims
    return min(dA, dB)


def x_measure(rho: DensityMatrix) -> float:
    """``max(||rho^Gamma||_1, ||R(rho)||_1)``, clamped into ``[1, d*]`` within 1e-9."""
    x = max(trace_norm(partial_transpose(rho)), ccnr_norm(rho))
    lo, hi = 1.0, float(_d_star(rho))
    if lo - 1e-9 <= x < lo:
        x = lo
    elif hi < x <= hi + 1e-9:
        x = hi
    return x


def pure_monotone(p) -> float:
    """CHSH-based pure-state monotone ``s(p) = sqrt(2) - C'(p[:4])``.

    ``p`` is a probability vector of any length; only its four largest entries
    matter.
    """
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or abs(p.sum() - 1.0) > PHYSICS_TOL or p.min() < -PHYSICS_TOL:
        raise ValidationError(f"not a probability vector: {p}")
    return float(CHSH_CMAX - chsh_family_sup(compress_spectrum(np.clip(p, 0, None), 4)))


def _check_y(y: float, d_star: int) -> float:
    y = float(y)
    if not 1.0 - 1e-12 <= y <= d_star + 1e-12:
        raise ValidationError(f"y={y} outside [1, {d_star}]")
    return min(max(y, 1.0), float(d_star))


def f_closed(y: float) -> float:
    """Closed-form ``f(y)`` for four-component spectra, ``y in [1, 4]``."""
    y = _check_y(y, 4)
    a, b = math.sqrt(y), math.sqrt(max(32.0 - 7.0 * y, 0.0))
    return SQRT2 - (3 * a + b) ** 1.5 * math.sqrt(max(b - a, 0.0)) / 32


def _chamber_directions(d_star: int, grid: int) -> np.ndarray:
    """Unit directions orthogonal to ``(1,...,1)``, around the ``e_1`` vertex.

    Polar angles are packed quadratically towards the vertex, where the feasible
    set shrinks to a point as ``y -> 1``; the range covers the Voronoi cell of
    the vertex, which contains every spectrum with ``p_1`` largest.
    """
    ones = np.ones(d_star) / math.sqrt(d_star)
    d1 = np.eye(d_star)[0] - ones / math.sqrt(d_star)
    d1 /= np.linalg.norm(d1)
    if d_star == 2:
        return d1[None]
    # orthonormal basis of the complement of span{1, d1}
    Q, _ = np.linalg.qr(np.column_stack([ones, d1, np.eye(d_star)[:, 1:]]))
    rest = Q[:, 2:d_star]
    theta_max = math.acos(1.0 / (d_star - 1))
    theta = theta_max * np.linspace(0.0, 1.0, grid) ** 2
    if d_star == 3:
        az = np.array([[1.0], [-1.0]])
    else:
        phi = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
        az = np.column_stack([np.cos(phi), np.sin(phi)])
    side = az @ rest.T
    dirs = np.cos(theta)[:, None, None] * d1 + np.sin(theta)[:, None, None] * side[None]
    return dirs.reshape(-1, d_star)


def _chsh_prime_rows(p: np.ndarray) -> np.ndarray:
    p = -np.sort(-p, axis=1)
    p = np.pad(p, ((0, 0), (0, max(4 - p.shape[1], 0))))[:, :4]
    return SQRT2 * np.hypot(p[:, 0] - p[:, 3], p[:, 1] - p[:, 2])


def f_oracle(y: float, grid: int = 200, d_star: int = 4, polish: int = 5) -> float:
    """Brute-force ``f(y)``: minimize ``s(p)`` over ``d*``-component spectra.

    Square-root amplitudes ``u = sqrt(p)`` satisfy ``|u| = 1`` and
    ``sum(u) = sqrt(y)``, i.e. they lie on a sphere centred on the diagonal.
    That sphere is scanned on a dense angular grid and the best points are
    polished with SLSQP under the same constraints.
    """
    if d_star not in (1, 2, 3, 4):
        raise ValidationError(f"d_star must be 1..4, got {d_star}")
    y = _check_y(y, d_star)
    if d_star == 1 or y == 1.0:
        return 0.0
    c = math.sqrt(y) / d_star
    radius = math.sqrt(max(1.0 - y / d_star, 0.0))
    u = c + radius * _chamber_directions(d_star, grid)
    u = np.clip(u[(u >= -1e-13).all(axis=1)], 0.0, None)
    vals = _chsh_prime_rows(u**2)
    best = float(vals.max())

    target = math.sqrt(y)
    cons = [
        {"type": "eq", "fun": lambda v: v @ v - 1.0, "jac": lambda v: 2 * v},
        {"type": "eq", "fun": lambda v: v.sum() - target, "jac": lambda v: np.ones_like(v)},
    ]

    def obj(v):
        q = sorted((v * v).tolist(), reverse=True) + [0.0] * (4 - d_star)
        return -SQRT2 * math.hypot(q[0] - q[3], q[1] - q[2])

    for k in np.argsort(-vals)[:polish]:
        res = minimize(obj, u[k], method="SLSQP", bounds=[(0.0, 1.0)] * d_star,
                       constraints=cons, options={"ftol": 1e-15, "maxiter": 500})
        v = res.x
        if abs(v @ v - 1.0) < 1e-11 and abs(v.sum() - target) < 1e-11 and v.min() >= -1e-12:
            best = max(best, -obj(np.clip(v, 0.0, None)))
    return float(SQRT2 - best)


@dataclass(frozen=True, eq=False)
class PiecewiseLinearFn:
    """Piecewise-linear function on increasing knots.

    Evaluates by linear interpolation, returning 0 left of the first knot and
    the last value right of the last knot.
    """

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or k.size < 2 or np.any(np.diff(k) <= 0):
            raise ValidationError("knots must be a strictly increasing 1-d array matching values")
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        return np.interp(x, self.knots, self.values, left=0.0, right=self.values[-1])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.knots)

    def is_convex(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.diff(self.slopes) >= -tol))


def convex_hull_1d(knots, values) -> PiecewiseLinearFn:
    """Greatest convex minorant of sampled points (lower convex envelope).

    Monotone-chain scan; collinear interior points are dropped from the hull
    and then re-sampled so the output shares the input knots.
    """
    x = np.asarray(knots, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.size < 2 or x.shape != y.shape:
        raise ValidationError("need at least two samples of matching shape")
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    hull: list[int] = []
    for i in range(x.size):
        while len(hull) >= 2:
            j, k = hull[-2], hull[-1]
            # drop k if it lies on or above the chord j -> i
            if (y[k] - y[j]) * (x[i] - x[j]) >= (y[i] - y[j]) * (x[k] - x[j]):
                hull.pop()
            else:
                break
        hull.append(i)
    env = np.interp(x, x[hull], y[hull])
    env[hull] = y[hull]
    return PiecewiseLinearFn(x, env)


def _hull_grid_values(d_star: int) -> tuple[np.ndarray, np.ndarray]:
    knots = np.linspace(1.0, float(d_star), HULL_KNOTS)
    if d_star == 4:
        return knots, np.array([f_closed(y) for y in knots])
    return knots, np.array([_f_restricted(y, d_star) for y in knots])


def _f_restricted(y: float, d_star: int) -> float:
    return f_oracle(y, grid=1000, d_star=d_star, polish=2)


@lru_cache(maxsize=None)
def _co_f_cached(d_star: int) -> tuple[PiecewiseLinearFn, bool]:
    knots, vals = _hull_grid_values(d_star)
    hull = convex_hull_1d(knots, vals)
    return hull, bool(np.max(np.abs(hull.values - vals)) <= 1e-12)


def co_f(d_star: int = 4) -> PiecewiseLinearFn:
    """Convex hull of ``f`` on ``[1, d*]`` sampled at 512 uniform knots."""
    if d_star < 2:
        return PiecewiseLinearFn(np.array([1.0, 2.0]), np.zeros(2))
    return _co_f_cached(d_star)[0]


def entanglement_lower_bound(rho: DensityMatrix) -> float:
    """``co(f)(x)``, a lower bound on the CHSH convex-roof monotone.

    When the sampled ``f`` is convex (always observed for ``d* <= 4``) the hull
    is ``f`` itself and ``f`` is evaluated at ``x`` directly; linear
    interpolation between knots would overshoot a convex ``f``.
    """
    if not rho.is_bipartite:
        raise ValidationError(f"expected a bipartite state, got dims {rho.dims}")
    if rho.dims[0] > 4:
        raise ValidationError("the CHSH instance needs dA <= 4")
    d_star = _d_star(rho)
    x = min(max(x_measure(rho), 1.0), float(d_star))
    if d_star == 1:
        return 0.0
    if d_star == 4:
        return f_closed(x)
    hull, convex = _co_f_cached(d_star)
    if convex:
        return _f_restricted(x, d_star)
    return max(float(hull(x)), 0.0)


def threshold_x(tol: float = 1e-13) -> float:
    """Smallest ``x`` with ``f(x) = sqrt(2) - 1``: beyond it CHSH cannot be violated locally."""
    return float(bisect(lambda y: f_closed(y) - (SQRT2 - 1.0), 1.0, 4.0, xtol=tol))


@dataclass
class BoundReport:
    """All bound quantities for one bipartite state.

    ``slack_cof = sqrt(2) - cof_x - chsh_prime`` must be non-negative;
    ``slack_tdi = sqrt(2) - ecr_est - chsh_prime`` is present only when a
    convex-roof estimate was requested.
    """

    p: tuple
    chsh_prime: float
    chsh_full: float
    neg: float
    ccnr: float
    x: float
    cof_x: float
    slack_cof: float
    ecr_est: float | None = None
    slack_tdi: float | None = None
    ok: bool = True

    def to_dict(self) -> dict:
        """Flat JSON-ready mapping; ``None`` marks an absent convex-roof estimate."""
        d = dict(self.to_row(), ok=self.ok)
        for k, v in d.items():
            if isinstance(v, float) and not math.isfinite(v):
                raise ValidationError(f"non-finite value for {k}")
        return d

    def to_row(self) -> dict:
        """Flat mapping using the campaign CSV column names (sans index)."""
        p = list(self.p) + [0.0] * (4 - len(self.p))
        return {
            "p1": p[0], "p2": p[1], "p3": p[2], "p4": p[3],
            "chsh_prime": self.chsh_prime, "chsh_full": self.chsh_full,
            "neg": self.neg, "ccnr": self.ccnr, "x": self.x, "cof_x": self.cof_x,
            "ecr_est": self.ecr_est, "slack_cof": self.slack_cof, "slack_tdi": self.slack_tdi,
        }


def monogamy_check(rho: DensityMatrix, convex_roof: bool = False, seed: int = 0,
                   restarts: int = 20, tol: float = MONOGAMY_TOL) -> BoundReport:
    """Evaluate ``C'(rho_A) <= sqrt(2) - co(f)(x)`` for a ``4 x d'`` state.

    With ``convex_roof=True`` the optimized convex-roof estimate ``E`` is added
    and ``E + C'(rho_A) <= sqrt(2)`` is checked as well. Violations set
    ``ok = False``; they are never raised.
    """
    if not rho.is_bipartite or rho.dims[0] != 4:
        raise ValidationError(f"expected a 4 x d' state, got dims {rho.dims}")
    p = partial_trace(rho, 0).spectrum()
    cp = chsh_value(p)
    cof_x = entanglement_lower_bound(rho)
    slack = CHSH_CMAX - cof_x - cp
    report = BoundReport(
        p=tuple(float(v) for v in compress_spectrum(p, 4)),
        chsh_prime=cp,
        chsh_full=chsh_full_value(p),
        neg=negativity(rho),
        ccnr=ccnr_norm(rho),
        x=x_measure(rho),
        cof_x=cof_x,
        slack_cof=slack,
        ok=bool(slack >= -tol and cof_x >= -1e-12),
    )
    if convex_roof:
        from .convex_roof import convex_roof_estimate

        e = convex_roof_estimate(rho, restarts=restarts, seed=seed)
        report.ecr_est = e
        report.slack_tdi = CHSH_CMAX - e - cp
        report.ok = bool(report.ok and report.slack_tdi >= -1e-6)
    return report
